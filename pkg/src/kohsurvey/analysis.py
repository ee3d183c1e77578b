"""Deviation diagnostics, class profiles, synthetic surveys and method comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import cluster, kdisj, mca, som
from .tables import (
    DROP,
    CategoricalDataset,
    DisjunctiveTable,
    Question,
    build_disjunctive,
    correct_table,
)


@dataclass(frozen=True)
class DeviationTable:
    """``values[j, k] = n_jk - d_.j * n_k / N`` plus each modality's own-class value."""

    values: np.ndarray
    modality_class: tuple[int, ...]
    names: tuple[str, ...] = ()

    @property
    def assigned(self) -> np.ndarray:
        return self.values[np.arange(self.values.shape[0]), list(self.modality_class)]

    def to_json(self) -> dict:
        m, u = self.values.shape
        return {
            "m": m,
            "classes": u,
            "names": list(self.names),
            "modality_class": list(self.modality_class),
            "assigned": [float(x) for x in self.assigned],
            "values": [float(x) for x in self.values.ravel()],
        }

    def render(self) -> str:
        names = self.names or tuple(str(j) for j in range(self.values.shape[0]))
        width = max(len("modality"), *(len(s) for s in names))
        lines = [f"{'modality':<{width}}  {'class':>5}  {'deviation':>10}"]
        for name, k, dev in zip(names, self.modality_class, self.assigned):
            flag = "  <" if dev < 0 else ""
            lines.append(f"{name:<{width}}  {k:>5}  {dev:>10.3f}{flag}")
        lines.append(f"negative assigned deviations: {negative_count(self)}")
        return "\n".join(lines) + "\n"


def _labels(labels: Sequence[int], size: int, U: int, what: str) -> np.ndarray:
    arr = np.asarray(labels, dtype=np.int64)
    if arr.shape != (size,):
        raise ValueError(f"expected {size} {what} labels, got {arr.shape}")
    if size and (arr.min() < 0 or arr.max() >= U):
        raise ValueError(f"{what} label out of range 0..{U - 1}")
    return arr


def deviations(D: DisjunctiveTable, individual_class: Sequence[int],
               modality_class: Sequence[int], U: int) -> DeviationTable:
    ind = _labels(individual_class, D.n, U, "individual")
    mod = _labels(modality_class, D.m, U, "modality")
    onehot = np.zeros((D.n, U), dtype=np.int64)
    onehot[np.arange(D.n), ind] = 1
    counts = D.entries.T @ onehot                  # n_jk
    sizes = onehot.sum(axis=0)                     # n_k
    # integer numerator keeps the sign exact
    numer = D.n * counts - np.outer(D.column_margins, sizes)
    return DeviationTable(numer / D.n, tuple(int(k) for k in mod), D.names)


def negative_count(dev: DeviationTable) -> int:
    return int(np.sum(dev.assigned < 0))


@dataclass(frozen=True)
class ClassProfile:
    size: int
    counts: tuple[int, ...]
    shares: tuple[float, ...]
    population_shares: tuple[float, ...]
    names: tuple[str, ...]

    def count_of(self, name: str) -> int:
        return self.counts[self.names.index(name)]


def class_profile(ds: CategoricalDataset, individual_class: Sequence[int], k: int) -> ClassProfile:
    """Size of class ``k`` and how often each modality occurs in it vs. overall."""
    D = build_disjunctive(ds)
    members = np.asarray(individual_class) == k
    size = int(members.sum())
    counts = D.entries[members].sum(axis=0)
    shares = counts / size if size else np.zeros(D.m)
    population = D.column_margins / D.n
    return ClassProfile(
        size,
        tuple(int(c) for c in counts),
        tuple(float(s) for s in shares),
        tuple(float(p) for p in population),
        D.names,
    )


@dataclass(frozen=True)
class SyntheticSpec:
    n_groups: int
    group_size: int
    n_questions: int
    modalities: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if not 0.5 < self.p <= 1:
            raise ValueError("signal probability must lie in (0.5, 1]")
        if min(self.n_groups, self.group_size, self.n_questions, self.modalities) < 1:
            raise ValueError("sizes must be at least 1")


def generate_synthetic(spec: SyntheticSpec) -> CategoricalDataset:
    """Planted-group survey; individuals are listed group by group.

    Every group prefers one modality per question and picks it with
    probability ``p``, otherwise a uniformly chosen other modality.
    """
    rng = np.random.default_rng(spec.seed)
    m = spec.modalities
    preferred = rng.integers(m, size=(spec.n_groups, spec.n_questions))
    n = spec.n_groups * spec.group_size
    groups = planted_groups(spec)
    answers = preferred[groups].copy()
    if m > 1:
        off = rng.random((n, spec.n_questions)) >= spec.p
        shift = rng.integers(1, m, size=(n, spec.n_questions))
        answers = np.where(off, (answers + shift) % m, answers)
    questions = tuple(
        Question(f"Q{q + 1}", tuple(f"Q{q + 1}_{a + 1}" for a in range(m)))
        for q in range(spec.n_questions)
    )
    width = len(str(n))
    ids = tuple(f"i{i + 1:0{width}d}" for i in range(n))
    return CategoricalDataset(ids, questions, answers)


def planted_groups(spec: SyntheticSpec) -> np.ndarray:
    return np.repeat(np.arange(spec.n_groups), spec.group_size)


KDISJ = "KDISJ"
MCA = "MCA"
MCA_AHC = "MCA+AHC"
MCA_KOHONEN = "MCA+Kohonen"


@dataclass(frozen=True)
class MethodRow:
    method: str
    classification: bool
    negative_deviations: int | None
    visualization: str


@dataclass
class ComparisonReport:
    rows: tuple[MethodRow, ...]
    deviations: dict[str, DeviationTable] = field(default_factory=dict)
    individual_class: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "methods": [
                {
                    "method": r.method,
                    "classification": r.classification,
                    "negative_deviations": r.negative_deviations,
                    "visualization": r.visualization,
                }
                for r in self.rows
            ],
            "deviations": {k: v.to_json() for k, v in self.deviations.items()},
        }

    def render(self) -> str:
        header = ("Method", "Classification", "Negative deviations", "Visualization")
        body = [
            (r.method, "Yes" if r.classification else "Not",
             "" if r.negative_deviations is None else str(r.negative_deviations), r.visualization)
            for r in self.rows
        ]
        widths = [max(len(row[c]) for row in [header, *body]) for c in range(4)]
        fmt = lambda row: "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()  # noqa: E731
        return "\n".join([fmt(header), fmt(tuple("-" * w for w in widths)), *map(fmt, body)]) + "\n"


def classify_points(codebook: som.CodeBook, points: np.ndarray) -> tuple[int, ...]:
    return tuple(som.winner(codebook, x) for x in points)


def run_comparison(ds: CategoricalDataset, topology: som.MapTopology,
                   schedule: som.TrainingSchedule | None = None,
                   n_classes: int | None = None, policy: str = DROP) -> ComparisonReport:
    """KDISJ, MCA alone, MCA followed by Ward AHC, and MCA followed by a numeric SOM.

    The SOM baselines share ``schedule`` (default: the KDISJ budget); the
    AHC cut defaults to the number of map units.
    """
    Dc = correct_table(build_disjunctive(ds), policy)
    D = Dc.disjunctive
    U = topology.units
    n_classes = U if n_classes is None else n_classes
    if schedule is None:
        schedule = kdisj.default_schedule(Dc)
    report = ComparisonReport(rows=())
    rows = []

    model = kdisj.train_kdisj(Dc, topology, schedule)
    assign = kdisj.classify(model, Dc)
    dev = deviations(D, assign.individual_class, assign.modality_class, U)
    report.deviations[KDISJ] = dev
    report.individual_class[KDISJ] = assign.individual_class
    rows.append(MethodRow(KDISJ, True, negative_count(dev), "Good"))

    res = mca.run_mca(Dc)
    rows.append(MethodRow(MCA, False, None, "Bad"))
    joint = mca.joint_points(res)
    n = D.n

    labels = cluster.cut(cluster.ahc_ward(joint.coords), n_classes)
    dev = deviations(D, labels[:n], labels[n:], n_classes)
    report.deviations[MCA_AHC] = dev
    report.individual_class[MCA_AHC] = tuple(labels[:n])
    rows.append(MethodRow(MCA_AHC, True, negative_count(dev), "Bad"))

    codebook = som.train_numeric_som(joint.coords, topology, schedule)
    labels = classify_points(codebook, joint.coords)
    dev = deviations(D, labels[:n], labels[n:], U)
    report.deviations[MCA_KOHONEN] = dev
    report.individual_class[MCA_KOHONEN] = labels[:n]
    rows.append(MethodRow(MCA_KOHONEN, True, negative_count(dev), "Good"))

    report.rows = tuple(rows)
    return report
