"""Categorical survey data, complete disjunctive tables and the chi-2 correction."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

DROP = "drop"
FAIL = "fail"


class DataError(ValueError):
    """Base class for problems with the input survey data."""


class MissingAnswer(DataError):
    def __init__(self, row: int, question: str):
        self.row = row
        self.question = question
        super().__init__(f"row {row}: no answer for question {question!r}")


class DuplicateId(DataError):
    def __init__(self, ident: str):
        self.ident = ident
        super().__init__(f"duplicate individual id {ident!r}")


class EmptyDataset(DataError):
    pass


class UnusedModality(DataError):
    def __init__(self, question: str, label: str):
        self.question = question
        self.label = label
        super().__init__(f"modality {label!r} of question {question!r} is never chosen")


@dataclass(frozen=True)
class Question:
    name: str
    modalities: tuple[str, ...]


@dataclass(frozen=True)
class CategoricalDataset:
    """N individuals answering K questions; ``answers[i, k]`` indexes ``questions[k].modalities``."""

    individual_ids: tuple[str, ...]
    questions: tuple[Question, ...]
    answers: np.ndarray

    def __post_init__(self):
        answers = np.array(self.answers, dtype=np.int64)
        answers.setflags(write=False)
        object.__setattr__(self, "answers", answers)
        object.__setattr__(self, "individual_ids", tuple(self.individual_ids))
        object.__setattr__(self, "questions", tuple(self.questions))
        if not self.individual_ids:
            raise EmptyDataset("dataset has no individuals")
        if not self.questions:
            raise DataError("dataset has no questions")
        n, k = len(self.individual_ids), len(self.questions)
        if answers.shape != (n, k):
            raise DataError(f"answers shape {answers.shape} does not match ({n}, {k})")
        seen = set()
        for ident in self.individual_ids:
            if ident in seen:
                raise DuplicateId(ident)
            seen.add(ident)
        for q, question in enumerate(self.questions):
            if not question.modalities:
                raise DataError(f"question {question.name!r} has no modalities")
            col = answers[:, q]
            if col.min() < 0 or col.max() >= len(question.modalities):
                raise DataError(f"answer index out of range for question {question.name!r}")

    @property
    def n(self) -> int:
        return len(self.individual_ids)

    @property
    def k(self) -> int:
        return len(self.questions)

    def question_index(self, name: str) -> int:
        for q, question in enumerate(self.questions):
            if question.name == name:
                return q
        raise KeyError(name)


def ingest_csv(text: str, has_id: bool = False) -> CategoricalDataset:
    """Parse a CSV document (header row first) into a dataset.

    Modalities are listed in order of first appearance. Without ``has_id`` the
    individuals are named by their 1-based data row number.
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise EmptyDataset("CSV has no header row")
    header, data = rows[0], rows[1:]
    if not data:
        raise EmptyDataset("CSV has no data rows")
    names = header[1:] if has_id else header
    if not names:
        raise DataError("CSV has no question columns")

    ids = []
    labels: list[list[str]] = [[] for _ in names]
    lookup: list[dict[str, int]] = [{} for _ in names]
    answers = np.empty((len(data), len(names)), dtype=np.int64)
    for r, row in enumerate(data, start=1):
        if len(row) != len(header):
            raise DataError(f"row {r}: expected {len(header)} fields, got {len(row)}")
        if has_id:
            ids.append(row[0].strip())
            cells = row[1:]
        else:
            ids.append(str(r))
            cells = row
        for q, cell in enumerate(cells):
            cell = cell.strip()
            if cell == "":
                raise MissingAnswer(r, names[q])
            index = lookup[q].get(cell)
            if index is None:
                index = lookup[q][cell] = len(labels[q])
                labels[q].append(cell)
            answers[r - 1, q] = index

    questions = tuple(Question(name.strip(), tuple(mods)) for name, mods in zip(names, labels))
    return CategoricalDataset(tuple(ids), questions, answers)


def read_csv(path, has_id: bool = False) -> CategoricalDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        return ingest_csv(fh.read(), has_id=has_id)


def modality_names(questions: Sequence[Question]) -> tuple[str, ...]:
    """Display name per modality: the bare label when unique across questions."""
    counts: dict[str, int] = {}
    for question in questions:
        for label in question.modalities:
            counts[label] = counts.get(label, 0) + 1
    return tuple(
        label if counts[label] == 1 else f"{question.name}:{label}"
        for question in questions
        for label in question.modalities
    )


@dataclass(frozen=True)
class DisjunctiveTable:
    """Binary N x M table with exactly one 1 per question block in every row."""

    entries: np.ndarray
    block_offsets: tuple[int, ...]
    column_margins: np.ndarray
    k: int
    individual_ids: tuple[str, ...] = ()
    questions: tuple[str, ...] = ()
    labels: tuple[str, ...] = ()
    names: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    def block_of(self, j: int) -> int:
        """Question index owning column ``j``."""
        return int(np.searchsorted(self.block_offsets, j, side="right")) - 1

    def block_ranges(self) -> list[range]:
        bounds = list(self.block_offsets) + [self.m]
        return [range(bounds[q], bounds[q + 1]) for q in range(self.k)]

    def decode(self) -> np.ndarray:
        """Recover the N x K answer indices."""
        out = np.empty((self.n, self.k), dtype=np.int64)
        for q, block in enumerate(self.block_ranges()):
            out[:, q] = np.argmax(self.entries[:, block.start:block.stop], axis=1)
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "block_offsets": list(self.block_offsets),
            "column_margins": [int(x) for x in self.column_margins],
            "entries": [int(x) for x in self.entries.ravel()],
        }


def build_disjunctive(ds: CategoricalDataset) -> DisjunctiveTable:
    sizes = [len(q.modalities) for q in ds.questions]
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    m = int(sum(sizes))
    entries = np.zeros((ds.n, m), dtype=np.int64)
    rows = np.arange(ds.n)
    for q in range(ds.k):
        entries[rows, offsets[q] + ds.answers[:, q]] = 1
    entries.setflags(write=False)
    margins = entries.sum(axis=0)
    margins.setflags(write=False)
    return DisjunctiveTable(
        entries=entries,
        block_offsets=tuple(int(o) for o in offsets),
        column_margins=margins,
        k=ds.k,
        individual_ids=ds.individual_ids,
        questions=tuple(q.name for q in ds.questions for _ in q.modalities),
        labels=tuple(label for q in ds.questions for label in q.modalities),
        names=modality_names(ds.questions),
    )


def _select_columns(D: DisjunctiveTable, keep: np.ndarray) -> DisjunctiveTable:
    entries = D.entries[:, keep]
    entries.setflags(write=False)
    margins = D.column_margins[keep]
    margins.setflags(write=False)
    owners = [D.block_of(int(j)) for j in keep]
    offsets = tuple(owners.index(q) for q in range(D.k))
    pick = lambda seq: tuple(seq[int(j)] for j in keep)  # noqa: E731
    return DisjunctiveTable(
        entries, offsets, margins, D.k, D.individual_ids,
        pick(D.questions), pick(D.labels), pick(D.names),
    )


@dataclass(frozen=True)
class CorrectedTable:
    """Entries ``d_ij / sqrt(K d_.j)``; ``disjunctive`` is the (possibly column-reduced) source."""

    entries: np.ndarray
    disjunctive: DisjunctiveTable
    kept_columns: tuple[int, ...] = field(default=())

    @property
    def column_margins(self) -> np.ndarray:
        return self.disjunctive.column_margins

    @property
    def k(self) -> int:
        return self.disjunctive.k

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    @property
    def names(self) -> tuple[str, ...]:
        return self.disjunctive.names

    @property
    def individual_ids(self) -> tuple[str, ...]:
        return self.disjunctive.individual_ids

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "block_offsets": list(self.disjunctive.block_offsets),
            "column_margins": [int(x) for x in self.column_margins],
            "entries": [float(x) for x in self.entries.ravel()],
        }


def correct_table(D: DisjunctiveTable, policy: str = DROP) -> CorrectedTable:
    """Apply the chi-2 correction; zero-margin columns are dropped or rejected per ``policy``."""
    if policy not in (DROP, FAIL):
        raise ValueError(f"unknown unused-modality policy {policy!r}")
    unused = np.flatnonzero(D.column_margins == 0)
    if unused.size:
        if policy == FAIL:
            j = int(unused[0])
            raise UnusedModality(D.questions[j] if D.questions else str(D.block_of(j)),
                                 D.labels[j] if D.labels else str(j))
        keep = np.flatnonzero(D.column_margins > 0)
        log.info("dropping unused modalities %s; kept columns %s",
                 [D.names[j] if D.names else j for j in unused], keep.tolist())
        D = _select_columns(D, keep)
        kept = tuple(int(j) for j in keep)
    else:
        kept = tuple(range(D.m))
    entries = D.entries / np.sqrt(D.k * D.column_margins.astype(np.float64))
    entries.setflags(write=False)
    return CorrectedTable(entries, D, kept)


def _check_index(i: int, size: int, what: str) -> None:
    if not 0 <= i < size:
        raise IndexError(f"{what} index {i} out of range 0..{size - 1}")


def chi2_row_distance(D: DisjunctiveTable, i: int, i2: int) -> float:
    _check_index(i, D.n, "row")
    _check_index(i2, D.n, "row")
    # zero-margin columns hold no 1s and contribute nothing
    used = D.column_margins > 0
    diff = (D.entries[i, used] - D.entries[i2, used]) / D.k
    return float(np.sum(diff * diff / D.column_margins[used]))


def chi2_col_distance(D: DisjunctiveTable, j: int, j2: int) -> float:
    _check_index(j, D.m, "column")
    _check_index(j2, D.m, "column")
    for c in (j, j2):
        if D.column_margins[c] == 0:
            raise UnusedModality(D.questions[c] if D.questions else "?",
                                 D.labels[c] if D.labels else str(c))
    diff = D.entries[:, j] / D.column_margins[j] - D.entries[:, j2] / D.column_margins[j2]
    return float(np.sum(diff * diff) / D.k)
