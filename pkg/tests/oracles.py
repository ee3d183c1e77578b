"""Independent reference computations in exact rational arithmetic.

Nothing here imports the package; these are the checks the tests trust.
"""

from fractions import Fraction
from itertools import combinations


def one_hot(answers, sizes):
    rows = []
    for row in answers:
        out = []
        for a, m in zip(row, sizes):
            out.extend(1 if x == a else 0 for x in range(m))
        rows.append(out)
    return rows


def margins(table):
    return [sum(col) for col in zip(*table)]


def chi2_rows(table, i, i2):
    """Profile form: sum_j (1/d.j) (d_ij/d_i. - d_i'j/d_i'.)^2."""
    d = margins(table)
    ri, ri2 = sum(table[i]), sum(table[i2])
    return sum(
        Fraction(1, d[j]) * (Fraction(table[i][j], ri) - Fraction(table[i2][j], ri2)) ** 2
        for j in range(len(d)) if d[j]
    )


def chi2_cols(table, j, j2):
    """Profile form over rows with row weight 1/d_i. ."""
    d = margins(table)
    return sum(
        Fraction(1, sum(row)) * (Fraction(row[j], d[j]) - Fraction(row[j2], d[j2])) ** 2
        for row in table
    )


def corrected_squared(table, k):
    """Squared corrected entries d_ij^2 / (K d.j), exact."""
    d = margins(table)
    return [[Fraction(x * x, k * d[j]) for j, x in enumerate(row)] for row in table]


def gram_squared_root_free(table, k):
    """(D^c' D^c)_{jj'} = sum_i d_ij d_ij' / (K sqrt(d_j d_j')), returned as float."""
    d = margins(table)
    m = len(d)
    return [
        [sum(row[a] * row[b] for row in table) / (k * (d[a] * d[b]) ** 0.5) for b in range(m)]
        for a in range(m)
    ]


def ward_brute_force(points):
    """Merge sequence recomputed from centroids at every step.

    Returns [(a, b, cost)] with a < b cluster ids, ids numbered like the
    package (leaves 0..n-1, t-th merge creates n + t).
    """
    clusters = {i: [list(p)] for i, p in enumerate(points)}
    n = len(points)
    out = []

    def centroid(members):
        dim = len(members[0])
        return [sum(p[c] for p in members) / len(members) for c in range(dim)]

    for t in range(n - 1):
        best = None
        for a, b in combinations(sorted(clusters), 2):
            A, B = clusters[a], clusters[b]
            ca, cb = centroid(A), centroid(B)
            cost = len(A) * len(B) / (len(A) + len(B)) * sum((x - y) ** 2 for x, y in zip(ca, cb))
            if best is None or cost < best[2]:
                best = (a, b, cost)
        a, b, cost = best
        clusters[n + t] = clusters.pop(a) + clusters.pop(b)
        out.append(best)
    return out
