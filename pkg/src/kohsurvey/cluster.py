"""Ascending hierarchical classification with Ward's criterion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Merge(NamedTuple):
    a: int
    b: int
    cost: float
    new_id: int


@dataclass(frozen=True)
class Dendrogram:
    """Leaves are ids ``0..n-1``; the t-th merge creates id ``n + t``."""

    merges: tuple[Merge, ...]
    n: int

    def to_json(self) -> dict:
        return {"n": self.n, "merges": [[m.a, m.b, m.cost, m.new_id] for m in self.merges]}

    @classmethod
    def from_json(cls, obj: dict) -> "Dendrogram":
        return cls(tuple(Merge(int(a), int(b), float(c), int(i)) for a, b, c, i in obj["merges"]),
                   obj["n"])


def ward_cost(size_a: int, size_b: int, centroid_a, centroid_b) -> float:
    diff = np.asarray(centroid_a) - np.asarray(centroid_b)
    return size_a * size_b / (size_a + size_b) * float(diff @ diff)


def ahc_ward(points) -> Dendrogram:
    """Merge the cheapest pair until one cluster is left.

    Costs are updated with the Lance-Williams recurrence. Equal costs go to the
    lexicographically smallest pair of cluster ids.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("need a nonempty sequence of equal-length vectors")
    n = X.shape[0]
    diff = X[:, None, :] - X[None, :, :]
    cost = 0.5 * np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(cost, np.inf)

    ids = np.arange(n)
    sizes = np.ones(n)
    alive = np.ones(n, dtype=bool)
    merges = []
    for step in range(n - 1):
        live = np.flatnonzero(alive)
        sub = cost[np.ix_(live, live)]
        best = sub.min()
        ii, jj = np.nonzero(sub == best)
        pairs = sorted((min(ids[live[i]], ids[live[j]]), max(ids[live[i]], ids[live[j]]),
                        live[i], live[j]) for i, j in zip(ii, jj))
        a_id, b_id, sa, sb = pairs[0]
        if ids[sa] != a_id:
            sa, sb = sb, sa
        new_id = n + step
        merges.append(Merge(int(a_id), int(b_id), float(best), new_id))

        na, nb = sizes[sa], sizes[sb]
        nc = sizes[live]
        updated = ((na + nc) * cost[sa, live] + (nb + nc) * cost[sb, live] - nc * best) / (na + nb + nc)
        cost[sa, live] = updated
        cost[live, sa] = updated
        cost[sa, sa] = np.inf
        cost[sb, :] = np.inf
        cost[:, sb] = np.inf
        alive[sb] = False
        sizes[sa] = na + nb
        ids[sa] = new_id
    return Dendrogram(tuple(merges), n)


def cut(d: Dendrogram, n_classes: int) -> list[int]:
    """Partition from the first ``n - n_classes`` merges.

    Classes are numbered by their smallest member index.
    """
    if not 1 <= n_classes <= d.n:
        raise ValueError(f"n_classes must lie in 1..{d.n}, got {n_classes}")
    parent = list(range(d.n + len(d.merges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for merge in d.merges[: d.n - n_classes]:
        parent[find(merge.a)] = merge.new_id
        parent[find(merge.b)] = merge.new_id

    labels, numbering = [], {}
    for i in range(d.n):
        root = find(i)
        if root not in numbering:
            numbering[root] = len(numbering)
        labels.append(numbering[root])
    return labels
