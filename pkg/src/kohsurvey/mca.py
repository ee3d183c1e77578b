"""Multiple correspondence analysis of the corrected disjunctive table."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tables import CorrectedTable

ZERO_EIGENVALUE = 1e-8
INDIVIDUAL = "individual"
MODALITY = "modality"


class ConvergenceFailure(RuntimeError):
    pass


class DegenerateMCA(RuntimeError):
    """No informative axis survives."""


def gram_matrix(Dc: CorrectedTable) -> np.ndarray:
    S = Dc.entries.T @ Dc.entries
    return (S + S.T) / 2


def _round_robin(size: int) -> list[list[tuple[int, int]]]:
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    padded = size + size % 2
    ring = list(range(padded))
    rounds = []
    for _ in range(padded - 1):
        pairs = []
        for a in range(padded // 2):
            p, q = ring[a], ring[padded - 1 - a]
            if p < size and q < size:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        ring = [ring[0], ring[-1]] + ring[1:-1]
    return rounds


def _off_diagonal_max(A: np.ndarray) -> float:
    if A.shape[0] < 2:
        return 0.0
    off = A - np.diag(np.diag(A))
    return float(np.abs(off).max())


def eigensym(S: np.ndarray, tol: float = 1e-12, max_sweeps: int = 50):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit every off-diagonal pair once, grouped into rounds of disjoint
    pairs that are rotated together. Iteration stops once the largest
    off-diagonal magnitude drops below ``tol``.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues nonincreasing
    (numerical ties kept in original index order) and eigenvectors as columns,
    each signed so that its largest-magnitude component is positive.
    """
    A = np.array(S, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("eigensym needs a square matrix")
    size = A.shape[0]
    scale = max(1.0, float(np.abs(A).max())) if size else 1.0
    if size and np.abs(A - A.T).max() > max(tol, 1e-12) * scale:
        raise ValueError("matrix is not symmetric")
    A = (A + A.T) / 2
    V = np.eye(size)
    rounds = [(np.array([pq[0] for pq in pairs], dtype=np.intp),
               np.array([pq[1] for pq in pairs], dtype=np.intp))
              for pairs in _round_robin(size) if pairs]

    for _sweep in range(max_sweeps + 1):
        if _off_diagonal_max(A) < tol:
            break
        if _sweep == max_sweeps:
            raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps")
        for p, q in rounds:
            apq = A[p, q]
            active = apq != 0
            if not active.all():
                if not active.any():
                    continue
                p, q, apq = p[active], q[active], apq[active]
            theta = (A[q, q] - A[p, p]) / (2 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1 / np.sqrt(t * t + 1)
            s = t * c
            J = np.eye(size)
            J[p, p] = c
            J[q, q] = c
            J[p, q] = s
            J[q, p] = -s
            A = J.T @ A @ J
            A = (A + A.T) / 2
            A[p, q] = A[q, p] = 0.0
            V = V @ J

    values = np.diag(A).copy()
    order = _sorted_order(values)
    values, V = values[order], V[:, order]
    return values, _sign_fix(V)


def _sorted_order(values: np.ndarray) -> np.ndarray:
    """Nonincreasing order; values within a numerical tie stay in index order."""
    order = list(np.argsort(-values, kind="stable"))
    tie = 1e-10 * max(1.0, float(np.abs(values).max())) if values.size else 0.0
    out, group = [], []
    for idx in order:
        if group and values[group[0]] - values[idx] > tie:
            out.extend(sorted(group))
            group = []
        group.append(idx)
    out.extend(sorted(group))
    return np.array(out, dtype=np.intp)


@dataclass
class MCAResult:
    raw_eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    eigenvalues: np.ndarray
    axes: np.ndarray
    individual_coords: np.ndarray
    modality_coords: np.ndarray
    variance_share: np.ndarray
    n: int
    m: int
    k: int
    individual_ids: tuple[str, ...] = ()
    modality_names: tuple[str, ...] = ()

    @property
    def n_axes_kept(self) -> int:
        return self.axes.shape[1]

    def to_json(self) -> dict:
        flat = lambda a: [float(x) for x in np.asarray(a).ravel()]  # noqa: E731
        return {
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "raw_eigenvalues": flat(self.raw_eigenvalues),
            "eigenvectors": flat(self.eigenvectors),
            "n_axes_kept": self.n_axes_kept,
            "eigenvalues": flat(self.eigenvalues),
            "variance_share": flat(self.variance_share),
            "axes": flat(self.axes),
            "individual_coords": flat(self.individual_coords),
            "modality_coords": flat(self.modality_coords),
            "individual_ids": list(self.individual_ids),
            "modality_names": list(self.modality_names),
        }


def trivial_direction(Dc: CorrectedTable) -> np.ndarray:
    root = np.sqrt(Dc.column_margins.astype(np.float64))
    return root / np.linalg.norm(root)


def _sign_fix(V: np.ndarray) -> np.ndarray:
    for a in range(V.shape[1]):
        col = np.abs(V[:, a])
        lead = int(np.flatnonzero(col >= col.max() - 1e-12)[0])
        if V[lead, a] < 0:
            V[:, a] = -V[:, a]
    return V


def canonical_unit_space(values: np.ndarray, vectors: np.ndarray,
                         trivial: np.ndarray) -> np.ndarray:
    """Re-base the eigenvalue-1 eigenvectors so the first one is ``trivial``.

    The leading eigenvalue of the gram matrix is 1; when it is repeated its
    eigenvectors are only defined up to rotation, so the trivial direction is
    made explicit and the rest of the eigenspace is taken orthogonal to it.
    """
    ones = np.flatnonzero(np.abs(values - 1) <= ZERO_EIGENVALUE)
    if ones.size == 0 or ones[0] != 0:
        raise ValueError("gram matrix has no leading unit eigenvalue; not a disjunctive table")
    basis = vectors[:, ones]
    if np.linalg.norm(basis.T @ trivial) < 1 - ZERO_EIGENVALUE:
        raise ValueError("trivial direction does not lie in the unit eigenspace")
    out = vectors.copy()
    out[:, 0] = trivial
    if ones.size > 1:
        residual = basis - np.outer(trivial, trivial @ basis)
        u, _, _ = np.linalg.svd(residual, full_matrices=False)
        out[:, ones[1:]] = _sign_fix(u[:, : ones.size - 1].copy())
    return out


def run_mca(Dc: CorrectedTable, tol: float = 1e-12) -> MCAResult:
    S = gram_matrix(Dc)
    raw_values, vectors = eigensym(S, tol)
    vectors = canonical_unit_space(raw_values, vectors, trivial_direction(Dc))
    # axis 0 is the trivial one
    informative = 1 + np.flatnonzero(raw_values[1:] >= ZERO_EIGENVALUE)
    keep = informative[: max(0, Dc.m - Dc.k)]
    lam, V = raw_values[keep], vectors[:, keep]
    F = Dc.entries @ V
    G = V * np.sqrt(lam)
    share = lam / lam.sum() if lam.size else lam
    return MCAResult(
        raw_eigenvalues=raw_values,
        eigenvectors=vectors,
        eigenvalues=lam,
        axes=V,
        individual_coords=F,
        modality_coords=G,
        variance_share=share,
        n=Dc.n,
        m=Dc.m,
        k=Dc.k,
        individual_ids=Dc.individual_ids,
        modality_names=Dc.names,
    )


@dataclass(frozen=True)
class JointPoints:
    coords: np.ndarray
    tags: tuple[str, ...]
    names: tuple[str, ...]

    @property
    def n_individuals(self) -> int:
        return self.tags.count(INDIVIDUAL)


def joint_points(res: MCAResult) -> JointPoints:
    """Individuals then modalities in one factorial point cloud."""
    if res.n_axes_kept == 0:
        raise DegenerateMCA("MCA kept no informative axis")
    coords = np.vstack([res.individual_coords, res.modality_coords])
    tags = (INDIVIDUAL,) * res.n + (MODALITY,) * res.m
    ids = res.individual_ids or tuple(str(i + 1) for i in range(res.n))
    names = res.modality_names or tuple(str(j) for j in range(res.m))
    return JointPoints(coords, tags, tuple(ids) + tuple(names))
