"""Command-line front end: ``kohsurvey {train,mca,compare,render}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import analysis, kdisj, mca, plotting
from .som import MapTopology, TrainingSchedule
from .tables import DROP, FAIL, CategoricalDataset, DataError, build_disjunctive, correct_table, read_csv

log = logging.getLogger("kohsurvey")

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    input: str | None = None
    has_id: bool = False
    topology: str = "grid:5x5"
    iters_mult: int = kdisj.ITERATIONS_PER_ITEM
    eps0: float = 0.5
    eps_end: float = 0.01
    radius0: int | None = None
    seed: int = 0
    unused_policy: str = DROP
    out: str = "."
    classes: int | None = None
    star_modality: str | None = None
    breakdown: str | None = None

    def __post_init__(self):
        if self.iters_mult < 1:
            raise UsageError("--iters-mult must be at least 1")
        try:
            MapTopology.parse(self.topology)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    @property
    def map_topology(self) -> MapTopology:
        return MapTopology.parse(self.topology)

    def schedule(self, total_steps: int) -> TrainingSchedule:
        try:
            return TrainingSchedule(total_steps, self.seed, self.eps0, self.eps_end, self.radius0)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load(config: RunConfig):
    if not config.input:
        raise UsageError("--input is required")
    path = Path(config.input)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    ds = read_csv(path, has_id=config.has_id)
    Dc = correct_table(build_disjunctive(ds), config.unused_policy)
    return ds, Dc


def _outdir(config: RunConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def map_cells(ds: CategoricalDataset, Dc, topology: MapTopology, assignment: kdisj.Assignment,
              star_modality: str | None = None, breakdown: str | None = None) -> list[list[str]]:
    U = topology.units
    ind = np.asarray(assignment.individual_class)
    sizes = np.bincount(ind, minlength=U)
    breakdowns = None
    if breakdown is not None:
        try:
            q = ds.question_index(breakdown)
        except KeyError:
            raise UsageError(f"no question named {breakdown!r}") from None
        m_q = len(ds.questions[q].modalities)
        breakdowns = [np.bincount(ds.answers[ind == u, q], minlength=m_q).tolist() for u in range(U)]
    starred = None
    if star_modality is not None:
        names = Dc.names
        if star_modality not in names:
            raise UsageError(f"no modality named {star_modality!r}")
        column = Dc.disjunctive.entries[:, names.index(star_modality)]
        population = column.mean()
        starred = [bool(sizes[u] and column[ind == u].mean() > population) for u in range(U)]
    return plotting.cell_lines(topology, assignment.modality_class, Dc.names, sizes.tolist(),
                               breakdowns, starred)


def _write_map(out: Path, ds, Dc, model: kdisj.KdisjModel, assignment, config: RunConfig) -> None:
    cells = map_cells(ds, Dc, model.topology, assignment, config.star_modality, config.breakdown)
    (out / "map.txt").write_text(plotting.render_map_text(model.topology, cells), encoding="utf-8")
    plotting.map_figure(model.topology, cells, out / "map.svg")


def cmd_train(config: RunConfig) -> None:
    ds, Dc = _load(config)
    out = _outdir(config)
    topology = config.map_topology
    schedule = config.schedule(config.iters_mult * (Dc.n + Dc.m))
    model = kdisj.train_kdisj(Dc, topology, schedule)
    saved = {k: v for k, v in asdict(config).items() if k != "out"}
    model.meta = {"config": saved, "kept_columns": list(Dc.kept_columns)}
    assignment = kdisj.classify(model, Dc)
    dev = analysis.deviations(Dc.disjunctive, assignment.individual_class,
                              assignment.modality_class, topology.units)
    dump_json(model.to_json(), out / "model.json")
    dump_json(assignment.to_json(Dc.individual_ids, Dc.names), out / "assignment.json")
    dump_json(dev.to_json(), out / "deviations.json")
    _write_map(out, ds, Dc, model, assignment, config)
    log.info("negative assigned deviations: %d", analysis.negative_count(dev))


def cmd_mca(config: RunConfig) -> None:
    _, Dc = _load(config)
    out = _outdir(config)
    res = mca.run_mca(Dc)
    dump_json(
        {
            "raw": [float(x) for x in res.raw_eigenvalues],
            "kept": [float(x) for x in res.eigenvalues],
            "n_axes_kept": res.n_axes_kept,
            "variance_share": [float(x) for x in res.variance_share],
        },
        out / "eigenvalues.json",
    )
    dump_json(res.to_json(), out / "mca.json")
    if res.n_axes_kept == 0:
        raise mca.DegenerateMCA("MCA kept no informative axis")
    plotting.mca_figure(res.individual_coords, res.modality_coords, Dc.names,
                        res.variance_share, out / "mca.svg")


def cmd_compare(config: RunConfig) -> None:
    ds, Dc = _load(config)
    out = _outdir(config)
    schedule = config.schedule(config.iters_mult * (Dc.n + Dc.m))
    report = analysis.run_comparison(ds, config.map_topology, schedule, config.classes,
                                     config.unused_policy)
    dump_json(report.to_json(), out / "report.json")
    (out / "report.txt").write_text(report.render(), encoding="utf-8")
    assigned = {name: dev.assigned for name, dev in report.deviations.items()}
    plotting.deviation_figure(assigned, Dc.names, out / "report.svg")


def cmd_render(config: RunConfig, model_path: str) -> None:
    path = Path(model_path)
    if not path.is_file():
        raise UsageError(f"model file not found: {path}")
    model = kdisj.KdisjModel.from_json(json.loads(path.read_text(encoding="utf-8")))
    saved = model.meta.get("config", {})
    if config.input is None:
        config.input = saved.get("input")
        config.has_id = saved.get("has_id", config.has_id)
        config.unused_policy = saved.get("unused_policy", config.unused_policy)
    ds, Dc = _load(config)
    assignment = kdisj.classify(model, Dc)
    _write_map(_outdir(config), ds, Dc, model, assignment, config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kohsurvey", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, training=True):
        p.add_argument("--input", help="survey CSV (header row first)")
        p.add_argument("--has-id", action="store_true", help="first column holds individual ids")
        p.add_argument("--unused-policy", choices=(DROP, FAIL), default=DROP)
        p.add_argument("--out", default=".", help="output directory")
        if training:
            p.add_argument("--topology", default="grid:5x5", help="line:U or grid:RxC")
            p.add_argument("--iters-mult", type=int, default=kdisj.ITERATIONS_PER_ITEM,
                           help="training steps per table row and column")
            p.add_argument("--eps0", type=float, default=0.5)
            p.add_argument("--eps-end", type=float, default=0.01)
            p.add_argument("--radius0", type=int, default=None)
            p.add_argument("--seed", type=int, default=0)

    def rendering(p):
        p.add_argument("--star-modality", help="star units where this modality is over-represented")
        p.add_argument("--breakdown", help="question whose modality counts follow each class size")

    p = sub.add_parser("train", help="train a KDISJ map")
    common(p)
    rendering(p)
    p = sub.add_parser("mca", help="multiple correspondence analysis")
    common(p, training=False)
    p = sub.add_parser("compare", help="KDISJ vs MCA-based classifications")
    common(p)
    p.add_argument("--classes", type=int, default=None, help="AHC cut (default: number of units)")
    p = sub.add_parser("render", help="redraw map.txt / map.svg from a saved model")
    p.add_argument("model", help="model.json written by train")
    common(p, training=False)
    rendering(p)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    fields = set(RunConfig.__dataclass_fields__)
    values = {k: v for k, v in vars(args).items() if k in fields}
    try:
        config = RunConfig(**values)
        if args.command == "train":
            cmd_train(config)
        elif args.command == "mca":
            cmd_mca(config)
        elif args.command == "compare":
            cmd_compare(config)
        else:
            cmd_render(config, args.model)
    except (UsageError, DataError, OSError) as exc:
        print(f"kohsurvey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (mca.ConvergenceFailure, mca.DegenerateMCA, ValueError) as exc:
        print(f"kohsurvey: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
