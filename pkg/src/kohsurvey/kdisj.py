"""Simultaneous Kohonen classification of individuals and modalities.

Each unit carries an (M + N)-component code vector: the first M components
live in the individual space (rows of the corrected table), the last N in the
modality space (its columns). Training alternates between drawing an
individual, extended with its rarest modality, and drawing a modality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .som import (
    CodeBook,
    MapTopology,
    Step,
    TrainingSchedule,
    init_codebook,
    neighbors,
    update_toward,
    winner,
)
from .tables import CorrectedTable

ITERATIONS_PER_ITEM = 15


def rarest_modality(Dc: CorrectedTable, i: int) -> int:
    """Column of the largest corrected entry in row ``i`` (lowest index on ties)."""
    return int(np.argmax(Dc.entries[i]))


def make_extended_row(Dc: CorrectedTable, i: int) -> np.ndarray:
    return np.concatenate([Dc.entries[i], Dc.entries[:, rarest_modality(Dc, i)]])


def column_vector(Dc: CorrectedTable, j: int) -> np.ndarray:
    return Dc.entries[:, j].copy()


def default_schedule(Dc: CorrectedTable, seed: int = 0,
                     multiplier: int = ITERATIONS_PER_ITEM, **kwargs) -> TrainingSchedule:
    """Budget of ``multiplier * (N + M)`` steps."""
    return TrainingSchedule(multiplier * (Dc.n + Dc.m), seed=seed, **kwargs)


@dataclass
class KdisjModel:
    codebook: CodeBook
    n: int
    m: int
    k: int
    column_margins: tuple[int, ...]
    modality_names: tuple[str, ...]
    individual_ids: tuple[str, ...]
    schedule: TrainingSchedule
    meta: dict = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.schedule.seed

    @property
    def topology(self) -> MapTopology:
        return self.codebook.topology

    @property
    def individual_slice(self) -> slice:
        return slice(0, self.m)

    @property
    def modality_slice(self) -> slice:
        return slice(self.m, self.m + self.n)

    def to_json(self) -> dict:
        return {
            "codebook": self.codebook.to_json(),
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "column_margins": list(self.column_margins),
            "modality_names": list(self.modality_names),
            "individual_ids": list(self.individual_ids),
            "schedule": self.schedule.to_json(),
            "seed": self.seed,
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "KdisjModel":
        return cls(
            codebook=CodeBook.from_json(obj["codebook"]),
            n=obj["n"],
            m=obj["m"],
            k=obj["k"],
            column_margins=tuple(obj["column_margins"]),
            modality_names=tuple(obj["modality_names"]),
            individual_ids=tuple(obj["individual_ids"]),
            schedule=TrainingSchedule.from_json(obj["schedule"]),
            meta=obj.get("meta", {}),
        )


def start_kdisj(Dc: CorrectedTable, topology: MapTopology, schedule: TrainingSchedule,
                column_steps: bool = True) -> tuple[KdisjModel, Iterator[Step]]:
    """Build the initial model and a generator running the training steps.

    Odd steps present an individual and update whole code vectors; even steps
    present a modality and touch only the modality components. With
    ``column_steps=False`` every step is a row step.
    """
    n, m = Dc.n, Dc.m
    rng = np.random.default_rng(schedule.seed)
    extended = np.stack([make_extended_row(Dc, i) for i in range(n)])
    codebook = init_codebook(extended, topology, rng)
    model = KdisjModel(
        codebook=codebook,
        n=n,
        m=m,
        k=Dc.k,
        column_margins=tuple(int(x) for x in Dc.column_margins),
        modality_names=Dc.names or tuple(str(j) for j in range(m)),
        individual_ids=Dc.individual_ids or tuple(str(i + 1) for i in range(n)),
        schedule=schedule,
    )
    return model, _steps(Dc, codebook, extended, schedule, rng, column_steps)


def _steps(Dc, codebook, extended, schedule, rng, column_steps) -> Iterator[Step]:
    topology = codebook.topology
    n, m = Dc.n, Dc.m
    rows, cols = slice(0, m), slice(m, m + n)
    for t in range(1, schedule.total_steps + 1):
        if t % 2 == 1 or not column_steps:
            i = int(rng.integers(n))
            x = extended[i]
            u0 = winner(codebook, x[rows], rows)
            r, eps = schedule.radius(t, topology), schedule.epsilon(t)
            update_toward(codebook, neighbors(topology, u0, r), x, None, eps)
            yield Step(t, "row", i, u0, r, eps)
        else:
            j = int(rng.integers(m))
            y = Dc.entries[:, j]
            v0 = winner(codebook, y, cols)
            r, eps = schedule.radius(t, topology), schedule.epsilon(t)
            update_toward(codebook, neighbors(topology, v0, r), y, cols, eps)
            yield Step(t, "column", j, v0, r, eps)


def train_kdisj(Dc: CorrectedTable, topology: MapTopology,
                schedule: TrainingSchedule | None = None, column_steps: bool = True) -> KdisjModel:
    if schedule is None:
        schedule = default_schedule(Dc)
    model, steps = start_kdisj(Dc, topology, schedule, column_steps)
    for _ in steps:
        pass
    return model


@dataclass(frozen=True)
class Assignment:
    individual_class: tuple[int, ...]
    modality_class: tuple[int, ...]

    def to_json(self, individual_ids, modality_names) -> dict:
        return {
            "individuals": dict(zip(individual_ids, self.individual_class)),
            "modalities": dict(zip(modality_names, self.modality_class)),
        }


def classify(model: KdisjModel, Dc: CorrectedTable) -> Assignment:
    """Winner unit per individual (row space) and per modality (column space)."""
    if (Dc.n, Dc.m) != (model.n, model.m):
        raise ValueError(f"table is {Dc.n}x{Dc.m}, model expects {model.n}x{model.m}")
    cb = model.codebook
    rows, cols = model.individual_slice, model.modality_slice
    ind = tuple(winner(cb, Dc.entries[i], rows) for i in range(Dc.n))
    mod = tuple(winner(cb, Dc.entries[:, j], cols) for j in range(Dc.m))
    return Assignment(ind, mod)
