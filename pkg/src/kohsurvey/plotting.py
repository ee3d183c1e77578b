"""Text and SVG renderings of maps, factorial planes and comparison reports."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .som import MapTopology  # noqa: E402

# fixed salt and no date stamp keep SVG output byte-stable
SVG_RC = {"svg.hashsalt": "kohsurvey", "svg.fonttype": "none", "font.size": 8}


def cell_lines(topology: MapTopology, modality_class: Sequence[int], names: Sequence[str],
               sizes: Sequence[int], breakdowns: Sequence[Sequence[int]] | None = None,
               starred: Sequence[bool] | None = None) -> list[list[str]]:
    """Lines of each map cell: sorted modality labels, then the class size line."""
    cells = []
    for u in range(topology.units):
        labels = sorted(name for name, k in zip(names, modality_class) if k == u)
        size = str(sizes[u])
        if breakdowns is not None:
            size += " (" + ", ".join(str(c) for c in breakdowns[u]) + ")"
        if starred is not None and starred[u]:
            size += " *"
        cells.append(labels + [size])
    return cells


def render_map_text(topology: MapTopology, cells: list[list[str]]) -> str:
    width = max(len(line) for cell in cells for line in cell)
    out = []
    rule = "+".join("-" * (width + 2) for _ in range(topology.cols))
    out.append("+" + rule + "+")
    for r in range(topology.rows):
        row = cells[r * topology.cols:(r + 1) * topology.cols]
        height = max(len(c) for c in row)
        # blank lines between labels and size so every size sits on the last line
        padded = [c[:-1] + [""] * (height - len(c)) + c[-1:] for c in row]
        for h in range(height):
            out.append("| " + " | ".join(c[h].ljust(width) for c in padded) + " |")
        out.append("+" + rule + "+")
    return "\n".join(out) + "\n"


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def map_figure(topology: MapTopology, cells: list[list[str]], path, title: str = "") -> None:
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(1.8 * topology.cols, 1.6 * topology.rows + 0.4))
        for u, lines in enumerate(cells):
            r, c = topology.coords(u)
            y = topology.rows - 1 - r
            ax.add_patch(plt.Rectangle((c, y), 1, 1, fill=False, linewidth=0.8))
            ax.text(c + 0.5, y + 0.93, "\n".join(lines[:-1]), ha="center", va="top")
            ax.text(c + 0.5, y + 0.06, lines[-1], ha="center", va="bottom", weight="bold")
        ax.set_xlim(0, topology.cols)
        ax.set_ylim(0, topology.rows)
        ax.set_aspect("equal")
        ax.axis("off")
        if title:
            ax.set_title(title)
        _save(fig, path)


def mca_figure(individual_coords: np.ndarray, modality_coords: np.ndarray, names: Sequence[str],
               variance_share: Sequence[float], path, axes: tuple[int, int] = (0, 1)) -> None:
    """Superposed factorial plane: unlabeled individual dots and labeled modalities."""
    a, b = axes
    A = individual_coords.shape[1]

    def pick(coords, axis):
        return coords[:, axis] if axis < A else np.zeros(coords.shape[0])

    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 5))
        ax.scatter(pick(individual_coords, a), pick(individual_coords, b), s=6, c="0.6")
        gx, gy = pick(modality_coords, a), pick(modality_coords, b)
        ax.scatter(gx, gy, s=14, c="tab:red", marker="^")
        for name, x, y in zip(names, gx, gy):
            ax.annotate(name, (x, y), xytext=(3, 3), textcoords="offset points")
        ax.axhline(0, color="0.8", linewidth=0.6)
        ax.axvline(0, color="0.8", linewidth=0.6)
        share = lambda i: f" ({100 * variance_share[i]:.1f}%)" if i < A else ""  # noqa: E731
        ax.set_xlabel(f"axis {a + 1}{share(a)}")
        ax.set_ylabel(f"axis {b + 1}{share(b)}")
        _save(fig, path)


def deviation_figure(assigned: dict[str, np.ndarray], names: Sequence[str], path) -> None:
    """Assigned deviation per modality, one bar group per classifying method."""
    methods = list(assigned)
    x = np.arange(len(names))
    width = 0.8 / max(1, len(methods))
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(max(6, 0.35 * len(names)), 3.5))
        for i, method in enumerate(methods):
            ax.bar(x + (i - (len(methods) - 1) / 2) * width, assigned[method], width, label=method)
        ax.axhline(0, color="k", linewidth=0.6)
        ax.set_xticks(x)
        ax.set_xticklabels(names, rotation=90)
        ax.set_ylabel("assigned deviation")
        ax.legend()
        fig.tight_layout()
        _save(fig, path)
