"""Kohonen map machinery: topology, schedules, winner search and the update rule.

Randomness comes from numpy's PCG64 generator (``np.random.default_rng``),
whose bounded integer draws are rejection based and hence unbiased.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

LINE = "line"
GRID = "grid"


@dataclass(frozen=True)
class MapTopology:
    kind: str
    rows: int
    cols: int

    def __post_init__(self):
        if self.kind not in (LINE, GRID):
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("a map needs at least one unit")
        if self.kind == LINE and self.rows != 1:
            raise ValueError("a line map has a single row")

    @classmethod
    def line(cls, length: int) -> "MapTopology":
        return cls(LINE, 1, length)

    @classmethod
    def grid(cls, rows: int, cols: int) -> "MapTopology":
        return cls(GRID, rows, cols)

    @classmethod
    def parse(cls, text: str) -> "MapTopology":
        """Read ``line:U`` or ``grid:RxC``."""
        kind, _, size = text.strip().lower().partition(":")
        try:
            if kind == LINE:
                return cls.line(int(size))
            if kind == GRID:
                r, _, c = size.partition("x")
                return cls.grid(int(r), int(c))
        except ValueError as exc:
            raise ValueError(f"bad topology {text!r}: {exc}") from None
        raise ValueError(f"bad topology {text!r}; expected line:U or grid:RxC")

    def __str__(self) -> str:
        return f"line:{self.cols}" if self.kind == LINE else f"grid:{self.rows}x{self.cols}"

    @property
    def units(self) -> int:
        return self.rows * self.cols

    @property
    def default_radius(self) -> int:
        return max(self.rows, self.cols) // 2

    def coords(self, u: int) -> tuple[int, int]:
        return divmod(u, self.cols)

    def distance(self, u: int, v: int) -> int:
        (r1, c1), (r2, c2) = self.coords(u), self.coords(v)
        return max(abs(r1 - r2), abs(c1 - c2))

    def to_json(self) -> dict:
        return {"kind": self.kind, "rows": self.rows, "cols": self.cols}

    @classmethod
    def from_json(cls, obj: dict) -> "MapTopology":
        return cls(obj["kind"], obj["rows"], obj["cols"])


def neighbors(topology: MapTopology, u0: int, r: int) -> list[int]:
    """Units within Chebyshev distance ``r`` of ``u0``, in increasing order."""
    if not 0 <= u0 < topology.units:
        raise IndexError(f"unit {u0} out of range")
    row, col = topology.coords(u0)
    rows = range(max(0, row - r), min(topology.rows, row + r + 1))
    cols = range(max(0, col - r), min(topology.cols, col + r + 1))
    return [i * topology.cols + j for i in rows for j in cols]


@dataclass(frozen=True)
class TrainingSchedule:
    """Step budget, learning-rate and radius schedules, and the seed.

    By default the learning rate decays geometrically from ``eps0`` to
    ``eps_end`` and the radius falls linearly from ``radius0`` to 0 over the
    first half of the run. ``epsilon_fn`` / ``radius_fn`` override either.
    """

    total_steps: int
    seed: int = 0
    eps0: float = 0.5
    eps_end: float = 0.01
    radius0: int | None = None
    epsilon_fn: Callable[[int], float] | None = field(default=None, compare=False)
    radius_fn: Callable[[int], int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.total_steps < 0:
            raise ValueError("total_steps must be nonnegative")
        if not 0 < self.eps_end <= self.eps0 <= 1:
            raise ValueError("need 0 < eps_end <= eps0 <= 1")
        if self.radius0 is not None and self.radius0 < 0:
            raise ValueError("radius0 must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def epsilon(self, t: int) -> float:
        if self.epsilon_fn is not None:
            return self.epsilon_fn(t)
        T = self.total_steps
        if T <= 1:
            return self.eps0
        return self.eps0 * (self.eps_end / self.eps0) ** ((t - 1) / (T - 1))

    def radius(self, t: int, topology: MapTopology) -> int:
        if self.radius_fn is not None:
            return self.radius_fn(t)
        r0 = topology.default_radius if self.radius0 is None else self.radius0
        half = max(1, self.total_steps // 2)
        if t > half:
            return 0
        # r0, r0 - 1, ..., 0 in equal-length phases over the first half
        return max(0, r0 - ((t - 1) * (r0 + 1)) // half)

    def to_json(self) -> dict:
        custom = self.epsilon_fn is not None or self.radius_fn is not None
        return {
            "total_steps": self.total_steps,
            "seed": self.seed,
            "eps0": self.eps0,
            "eps_end": self.eps_end,
            "radius0": self.radius0,
            "custom": custom,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrainingSchedule":
        return cls(obj["total_steps"], obj["seed"], obj["eps0"], obj["eps_end"], obj["radius0"])


@dataclass
class CodeBook:
    vectors: np.ndarray
    topology: MapTopology

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != self.topology.units:
            raise ValueError("need one code vector per unit")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("code vectors must be finite")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def copy(self) -> "CodeBook":
        return CodeBook(self.vectors.copy(), self.topology)

    def to_json(self) -> dict:
        return {
            "topology": self.topology.to_json(),
            "dim": self.dim,
            "vectors": [float(x) for x in self.vectors.ravel()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CodeBook":
        topology = MapTopology.from_json(obj["topology"])
        vectors = np.array(obj["vectors"], dtype=np.float64).reshape(topology.units, obj["dim"])
        return cls(vectors, topology)


def _as_slice(sl: slice | None, dim: int) -> slice:
    if sl is None:
        return slice(0, dim)
    start, stop, step = sl.indices(dim)
    if step != 1 or stop <= start:
        raise ValueError("empty or strided slice")
    return slice(start, stop)


def _check_x(x, sl: slice) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (sl.stop - sl.start,):
        raise ValueError(f"vector of shape {x.shape} does not match slice length {sl.stop - sl.start}")
    return x


def winner(codebook: CodeBook, x: np.ndarray, sl: slice | None = None) -> int:
    """Unit nearest to ``x`` on the given component slice; lowest index wins ties."""
    sl = _as_slice(sl, codebook.dim)
    x = _check_x(x, sl)
    diff = codebook.vectors[:, sl] - x
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def update_toward(codebook: CodeBook, targets: Sequence[int], x: np.ndarray,
                  sl: slice | None, eps: float) -> None:
    """Move the slice of each target unit a fraction ``eps`` of the way to ``x``."""
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    sl = _as_slice(sl, codebook.dim)
    x = _check_x(x, sl)
    rows = np.asarray(targets, dtype=np.intp)
    old = codebook.vectors[rows, sl]
    if eps == 1:
        new = np.broadcast_to(x, old.shape)
    else:
        # clip keeps rounding from leaving the segment [old, x]
        new = np.clip(old + eps * (x - old), np.minimum(old, x), np.maximum(old, x))
    codebook.vectors[rows, sl] = new


def init_codebook(points: np.ndarray, topology: MapTopology,
                  rng: np.random.Generator) -> CodeBook:
    """Distinct sampled data points when there are enough, else uniform in the data's box."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if topology.units <= n:
        picks = rng.choice(n, size=topology.units, replace=False)
        vectors = points[picks].copy()
    else:
        lo, hi = points.min(axis=0), points.max(axis=0)
        vectors = lo + (hi - lo) * rng.random((topology.units, points.shape[1]))
    return CodeBook(vectors, topology)


class Step(NamedTuple):
    t: int
    kind: str
    index: int
    winner: int
    radius: int
    eps: float


def start_numeric_som(points, topology: MapTopology, schedule: TrainingSchedule):
    """Initialize a codebook and return it with a generator of training steps.

    The generator mutates the codebook in place and yields one ``Step`` per
    iteration, so callers can inspect the map between steps.
    """
    points = _check_points(points)
    rng = np.random.default_rng(schedule.seed)
    codebook = init_codebook(points, topology, rng)
    return codebook, _numeric_steps(points, codebook, schedule, rng)


def _numeric_steps(points, codebook, schedule, rng) -> Iterator[Step]:
    topology = codebook.topology
    for t in range(1, schedule.total_steps + 1):
        i = int(rng.integers(points.shape[0]))
        x = points[i]
        u0 = winner(codebook, x)
        r, eps = schedule.radius(t, topology), schedule.epsilon(t)
        update_toward(codebook, neighbors(topology, u0, r), x, None, eps)
        yield Step(t, "point", i, u0, r, eps)


def train_numeric_som(points, topology: MapTopology, schedule: TrainingSchedule) -> CodeBook:
    codebook, steps = start_numeric_som(points, topology, schedule)
    for _ in steps:
        pass
    return codebook


def _check_points(points) -> np.ndarray:
    try:
        arr = np.asarray(points, dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"points must share one dimension: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("need a nonempty sequence of equal-length vectors")
    return arr


def quantization_error(codebook: CodeBook, points, sl: slice | None = None) -> float:
    """Mean squared distance from each point to its winner's slice."""
    points = _check_points(points)
    sl = _as_slice(sl, codebook.dim)
    protos = codebook.vectors[:, sl]
    d2 = ((points[:, None, :] - protos[None, :, :]) ** 2).sum(axis=2)
    return float(d2.min(axis=1).mean())
