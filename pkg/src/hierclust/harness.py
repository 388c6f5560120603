"""Experiments, data plumbing, and the command-line interface.

The two experiments mirror the benchmark tables this library exists to
reproduce at desk scale:

* `run_table1` subsamples a dataset, runs a selection of the four tree
  builders over several seeded runs, evaluates the requested objectives, and
  reports per-run values plus mean / population-std summaries together with
  the objective upper bounds.
* `run_random_bad` builds the unbalanced two-cluster instance (n^2 points at
  one spot, n at another) on which random splitting provably loses most of
  the achievable revenue, and measures the revenue ratio of random trees
  against the exact optimum.

All CSV output is byte-stable for a fixed config: floats are written with
repr and rows are emitted in sorted order.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algorithms import (
    RngStream,
    TwoMeansSolverConfig,
    average_linkage,
    bisecting_kmeans,
    random_tree,
    single_linkage,
)
from .hiertree import HierTree, TreeParseError, parse
from .metricspace import DistanceMatrix, PointSet, pairwise_distances
from .objectives import (
    brute_force_opt,
    ckmm_value,
    dasgupta_cost,
    revenue_upper_bound,
    tree_revenue,
)
from .ultrametric import UltrametricSpec, embed_euclidean, generate_random

ALGORITHMS = ("bkm", "avg", "single", "random")
OBJECTIVES = ("revenue", "ckmm", "dasgupta")

_ALGO_KEY = {name: k for k, name in enumerate(ALGORITHMS)}


class DataError(ValueError):
    """Bad input data or an unrunnable configuration (CLI exit code 2)."""


# ----------------------------------------------------------------------
# CSV ingestion


@dataclass(frozen=True)
class IngestOptions:
    """Column selection and parsing options for points CSV files.

    With `columns=None` every column that parses as a number in every row is
    kept and the rest are dropped. With explicit columns, rows where a
    selected cell fails to parse are rejected (dropped and reported).
    Row numbers are 1-based file lines, counting a skipped header.
    """

    columns: Optional[Tuple[int, ...]] = None
    skip_header: bool = False
    delimiter: str = ","


@dataclass(frozen=True)
class IngestResult:
    points: PointSet
    used_columns: Tuple[int, ...]
    dropped_columns: Tuple[int, ...]
    rejected_rows: Tuple[int, ...]


def _parse_cell(cell: str) -> Optional[float]:
    try:
        return float(cell)
    except ValueError:
        return None


def ingest_csv_report(path: str, options: IngestOptions = IngestOptions()) -> IngestResult:
    """Load a points CSV and report which columns and rows were used."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh, delimiter=options.delimiter))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    first_data_line = 1
    if options.skip_header:
        rows = rows[1:]
        first_data_line = 2
    rows = [r for r in rows if r]
    if not rows:
        raise DataError(f"{path} has no data rows")
    width = len(rows[0])
    for k, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"inconsistent column count at row {first_data_line + k}:"
                f" expected {width}, got {len(row)}"
            )

    parsed = [[_parse_cell(c) for c in row] for row in rows]
    if options.columns is None:
        used = tuple(
            j for j in range(width) if all(parsed[k][j] is not None for k in range(len(rows)))
        )
        dropped = tuple(j for j in range(width) if j not in used)
        if not used:
            raise DataError("no numeric columns found")
        data = [[parsed[k][j] for j in used] for k in range(len(rows))]
        rejected: Tuple[int, ...] = ()
    else:
        used = tuple(int(j) for j in options.columns)
        if not used:
            raise DataError("empty column selection")
        for j in used:
            if not 0 <= j < width:
                raise DataError(f"selected column {j} out of range for width {width}")
        dropped = ()
        data = []
        bad: List[int] = []
        for k in range(len(rows)):
            values = [parsed[k][j] for j in used]
            if any(v is None for v in values):
                bad.append(first_data_line + k)
            else:
                data.append(values)
        rejected = tuple(bad)
        if not data:
            raise DataError("every row was rejected; no points left")
    return IngestResult(
        points=PointSet(np.array(data, dtype=np.float64)),
        used_columns=used,
        dropped_columns=dropped,
        rejected_rows=rejected,
    )


def ingest_csv(path: str, options: IngestOptions = IngestOptions()) -> PointSet:
    """Load a points CSV: one point per accepted row."""
    return ingest_csv_report(path, options).points


# ----------------------------------------------------------------------
# synthetic instances


def synth_gaussian_mixture(
    k: int, n: int, dim: int, separation: float, rng: RngStream
) -> PointSet:
    """n points from k unit-variance spherical clusters, sizes balanced to +-1.

    Centers sit at pairwise distance at least `separation`: on scaled
    coordinate axes when k <= dim, else on a one-axis lattice.
    """
    if k < 1 or n < 1 or dim < 1:
        raise ValueError("k, n, and dim must all be positive")
    centers = np.zeros((k, dim))
    if k <= dim:
        for c in range(k):
            centers[c, c] = separation
    else:
        centers[:, 0] = separation * np.arange(k)
    sizes = [n // k + (1 if c < n % k else 0) for c in range(k)]
    g = rng.generator()
    blocks = []
    for c in range(k):
        if sizes[c]:
            blocks.append(centers[c] + g.standard_normal((sizes[c], dim)))
    return PointSet(np.concatenate(blocks, axis=0))


@dataclass(frozen=True)
class RandomBadInstanceSpec:
    """The unbalanced two-location instance: n^2 points at A, n points at B."""

    n: int
    inter_cluster_distance: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not (self.inter_cluster_distance > 0.0):
            raise ValueError("inter-cluster distance must be positive")

    @property
    def total_points(self) -> int:
        return self.n * self.n + self.n

    def optimal_revenue(self) -> float:
        m = self.total_points
        return float(m * (m - 1) // 2)


def build_random_bad_instance(spec: RandomBadInstanceSpec) -> PointSet:
    """n^2 coincident points at the origin, n more at distance D on the axis."""
    m = spec.total_points
    coords = np.zeros((m, 1))
    coords[spec.n * spec.n :, 0] = spec.inter_cluster_distance
    return PointSet(coords)


def _chain(ids: Sequence[int]):
    nested: object = ids[0]
    for x in ids[1:]:
        nested = (nested, x)
    return nested


def clean_reference_tree(spec: RandomBadInstanceSpec) -> HierTree:
    """Separate the two locations at the root, then finish each side any way.

    Every split of this tree is clean, so it earns the full n(n-1)/2 units:
    the exact optimum for the instance.
    """
    a = spec.n * spec.n
    nested = (_chain(range(a)), _chain(range(a, spec.total_points)))
    return HierTree.from_nested(nested)


# ----------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class GaussianMixtureSpec:
    k: int
    n: int
    dim: int
    separation: float
    seed: int = 0

    def build(self) -> PointSet:
        return synth_gaussian_mixture(self.k, self.n, self.dim, self.separation, RngStream(self.seed))


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark-table run: dataset, subsample size, runs, algorithms."""

    subsample_size: int
    input_csv: Optional[str] = None
    synthetic: Optional[GaussianMixtureSpec] = None
    num_runs: int = 5
    algorithms: Tuple[str, ...] = ALGORITHMS
    objectives: Tuple[str, ...] = ("revenue", "ckmm")
    base_seed: int = 0
    output: Optional[str] = None
    solver: str = "lloyd"
    lloyd_restarts: int = 10
    max_exhaustive_n: int = 20
    ingest: IngestOptions = field(default_factory=IngestOptions)

    def __post_init__(self) -> None:
        if (self.input_csv is None) == (self.synthetic is None):
            raise ValueError("exactly one of input_csv and synthetic must be set")
        if self.num_runs < 1:
            raise ValueError("num_runs must be at least 1")
        if self.subsample_size < 1:
            raise ValueError("subsample_size must be positive")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        for o in self.objectives:
            if o not in OBJECTIVES:
                raise ValueError(f"unknown objective {o!r}")
        if self.solver not in ("exhaustive", "lloyd"):
            raise ValueError(f"unknown solver {self.solver!r}")


@dataclass(frozen=True)
class StatsRow:
    """Mean and population standard deviation of one (algorithm, objective) cell."""

    algorithm: str
    objective: str
    mean: float
    std: float

    def __post_init__(self) -> None:
        if not (self.std >= 0.0):
            raise ValueError("std must be nonnegative")


def _mean_std(values: Sequence[float]) -> Tuple[float, float]:
    arr = np.array(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


def _load_dataset(config: ExperimentConfig) -> PointSet:
    if config.input_csv is not None:
        return ingest_csv(config.input_csv, config.ingest)
    assert config.synthetic is not None
    return config.synthetic.build()


def _build_tree(name: str, points: PointSet, config: ExperimentConfig, rng: RngStream) -> HierTree:
    if name == "bkm":
        solver = TwoMeansSolverConfig(
            kind=config.solver,
            max_exhaustive_n=config.max_exhaustive_n,
            lloyd_restarts=config.lloyd_restarts,
            seed=rng.seed_int(),
        )
        return bisecting_kmeans(points, solver)
    if name == "avg":
        return average_linkage(pairwise_distances(points))
    if name == "single":
        return single_linkage(pairwise_distances(points))
    if name == "random":
        return random_tree(points.n, rng)
    raise ValueError(f"unknown algorithm {name!r}")


def _objective_value(objective: str, points: PointSet, dist: Optional[DistanceMatrix], tree: HierTree) -> float:
    if objective == "revenue":
        return tree_revenue(points, tree).total
    assert dist is not None
    if objective == "ckmm":
        return ckmm_value(dist, tree).total
    return dasgupta_cost(dist, tree).total


def run_table1(config: ExperimentConfig) -> Tuple[List[StatsRow], str]:
    """Run the benchmark-table experiment; returns summary rows and the CSV text.

    Each run subsamples `subsample_size` points without replacement (seeded
    with base_seed + run), builds every requested algorithm's tree, and
    evaluates every requested objective. Upper-bound rows are emitted for
    revenue (the pair count, identical each run) and ckmm (m times the sum
    of pairwise distances of the run's subsample).
    """
    data = _load_dataset(config)
    m = config.subsample_size
    if m > data.n:
        raise DataError(f"subsample size {m} exceeds dataset size {data.n}")
    needs_dist = any(o in ("ckmm", "dasgupta") for o in config.objectives) or "avg" in config.algorithms or "single" in config.algorithms

    raw: Dict[Tuple[str, str], List[float]] = {}
    for r in range(config.num_runs):
        g = RngStream(config.base_seed + r).generator()
        idx = np.sort(g.choice(data.n, size=m, replace=False))
        sub = PointSet(data.coords[idx])
        dist = pairwise_distances(sub) if needs_dist else None
        for name in config.algorithms:
            rng = RngStream(config.base_seed).substream(r, _ALGO_KEY[name])
            tree = _build_tree(name, sub, config, rng)
            for objective in config.objectives:
                raw.setdefault((name, objective), []).append(
                    _objective_value(objective, sub, dist, tree)
                )
        if "revenue" in config.objectives:
            raw.setdefault(("upper_bound", "revenue"), []).append(revenue_upper_bound(m))
        if "ckmm" in config.objectives:
            assert dist is not None
            raw.setdefault(("upper_bound", "ckmm"), []).append(m * float(dist.values.sum()) / 2.0)

    stats = [
        StatsRow(name, objective, *_mean_std(values))
        for (name, objective), values in sorted(raw.items())
    ]
    lines = ["algorithm,objective,run,value"]
    for (name, objective), values in sorted(raw.items()):
        for r, v in enumerate(values):
            lines.append(f"{name},{objective},{r},{v!r}")
    lines.append("# summary")
    lines.append("algorithm,objective,mean,std")
    for row in stats:
        lines.append(f"{row.algorithm},{row.objective},{row.mean!r},{row.std!r}")
    text = "\n".join(lines) + "\n"
    if config.output:
        with open(config.output, "w") as fh:
            fh.write(text)
    return stats, text


@dataclass(frozen=True)
class RandomBadRow:
    n: int
    mean_ratio: float
    std_ratio: float
    reference_ratio: float


def run_random_bad(sizes: Sequence[int], trials: int, rng: RngStream) -> List[RandomBadRow]:
    """Revenue ratio of random trees on the unbalanced instance, per size.

    For each n the instance has n^2 + n points and a known exact optimum;
    `trials` independent random trees are scored against it. The clean
    reference tree's ratio is reported alongside and should always be 1.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    out = []
    for n in sizes:
        spec = RandomBadInstanceSpec(int(n))
        points = build_random_bad_instance(spec)
        opt = spec.optimal_revenue()
        ref = tree_revenue(points, clean_reference_tree(spec)).total / opt
        ratios = []
        for t in range(trials):
            tree = random_tree(points.n, rng.substream(int(n), t))
            ratios.append(tree_revenue(points, tree).total / opt)
        mean, std = _mean_std(ratios)
        out.append(RandomBadRow(int(n), mean, std, ref))
    return out


def random_bad_report_csv(rows: Sequence[RandomBadRow]) -> str:
    lines = ["n,mean_ratio,std_ratio,reference_ratio"]
    for row in rows:
        lines.append(f"{row.n},{row.mean_ratio!r},{row.std_ratio!r},{row.reference_ratio!r}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# CLI


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _points_csv_text(points: PointSet) -> str:
    lines = [",".join(repr(float(x)) for x in row) for row in points.coords]
    return "\n".join(lines) + "\n"


def _write_or_print(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ingest_options(args: argparse.Namespace) -> IngestOptions:
    columns = None
    if args.columns:
        columns = tuple(int(c) for c in args.columns.split(","))
    return IngestOptions(columns=columns, skip_header=args.skip_header, delimiter=args.delimiter)


def _load_points(args: argparse.Namespace) -> PointSet:
    result = ingest_csv_report(args.points, _ingest_options(args))
    if result.dropped_columns:
        print(
            f"dropped {len(result.dropped_columns)} non-numeric column(s):"
            f" {list(result.dropped_columns)}",
            file=sys.stderr,
        )
    if result.rejected_rows:
        print(f"rejected {len(result.rejected_rows)} row(s): {list(result.rejected_rows)}", file=sys.stderr)
    return result.points


def _add_points_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--points", required=True, help="points CSV, one point per row")
    p.add_argument("--columns", default=None, help="comma-separated column indices to use")
    p.add_argument("--skip-header", action="store_true", help="skip the first row")
    p.add_argument("--delimiter", default=",")


def _build_cli() -> _Parser:
    parser = _Parser(prog="hierclust", description="Hierarchical clustering objectives and experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a Gaussian mixture points CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("gen-ultrametric", help="generate a random ultrametric spec")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("strict", "with-ties"), default="strict")
    p.add_argument("--out", default=None)

    p = sub.add_parser("embed", help="embed an ultrametric spec as a points CSV")
    p.add_argument("--spec", required=True, help="annotated tree file")
    p.add_argument("--out", default=None)

    p = sub.add_parser("cluster", help="build a tree from a points CSV")
    _add_points_arguments(p)
    p.add_argument("--algo", choices=ALGORITHMS, required=True)
    p.add_argument("--solver", choices=("exhaustive", "lloyd"), default="lloyd")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--out", default=None)

    p = sub.add_parser("eval", help="evaluate an objective for a tree over points")
    _add_points_arguments(p)
    p.add_argument("--objective", choices=OBJECTIVES, required=True)
    p.add_argument("--tree-file", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("enumerate-opt", help="exact optimum over all trees (n <= 7)")
    _add_points_arguments(p)
    p.add_argument("--objective", choices=OBJECTIVES, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("experiment", help="run a benchmark experiment")
    esub = p.add_subparsers(dest="experiment", required=True)

    t = esub.add_parser("table1", help="algorithms x objectives summary table")
    t.add_argument("--points", default=None, help="points CSV (else use --synth-*)")
    t.add_argument("--columns", default=None)
    t.add_argument("--skip-header", action="store_true")
    t.add_argument("--delimiter", default=",")
    t.add_argument("--synth-k", type=int, default=None)
    t.add_argument("--synth-n", type=int, default=None)
    t.add_argument("--synth-dim", type=int, default=None)
    t.add_argument("--synth-separation", type=float, default=10.0)
    t.add_argument("--synth-seed", type=int, default=0)
    t.add_argument("--subsample", type=int, required=True)
    t.add_argument("--runs", type=int, default=5)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--algo", default="bkm,avg,single,random", help="comma-separated algorithms")
    t.add_argument("--objective", default="revenue,ckmm", help="comma-separated objectives")
    t.add_argument("--solver", choices=("exhaustive", "lloyd"), default="lloyd")
    t.add_argument("--restarts", type=int, default=10)
    t.add_argument("--out", default=None)

    rb = esub.add_parser("random-bad", help="revenue ratio decay of random trees")
    rb.add_argument("--sizes", default="4,8,12", help="comma-separated values of n")
    rb.add_argument("--trials", type=int, default=200)
    rb.add_argument("--seed", type=int, default=0)
    rb.add_argument("--out", default=None)

    return parser


def _cmd_synth(args: argparse.Namespace) -> int:
    points = synth_gaussian_mixture(args.k, args.n, args.dim, args.separation, RngStream(args.seed))
    _write_or_print(_points_csv_text(points), args.out)
    return 0


def _cmd_gen_ultrametric(args: argparse.Namespace) -> int:
    mode = args.mode.replace("-", "_")
    spec = generate_random(args.n, RngStream(args.seed), mode)
    _write_or_print(spec.serialize() + "\n", args.out)
    return 0


def _cmd_embed(args: argparse.Namespace) -> int:
    try:
        with open(args.spec) as fh:
            text = fh.read().strip()
    except OSError as exc:
        raise DataError(f"cannot read {args.spec}: {exc}") from exc
    spec = UltrametricSpec.parse(text)
    _write_or_print(_points_csv_text(embed_euclidean(spec)), args.out)
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    points = _load_points(args)
    rng = RngStream(args.seed)
    if args.algo == "bkm":
        config = TwoMeansSolverConfig(kind=args.solver, lloyd_restarts=args.restarts, seed=args.seed)
        tree = bisecting_kmeans(points, config)
    elif args.algo == "avg":
        tree = average_linkage(pairwise_distances(points))
    elif args.algo == "single":
        tree = single_linkage(pairwise_distances(points))
    else:
        tree = random_tree(points.n, rng)
    _write_or_print(tree.serialize() + "\n", args.out)
    return 0


def _read_tree(path: str) -> HierTree:
    try:
        with open(path) as fh:
            text = fh.read().strip()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return parse(text)


def _cmd_eval(args: argparse.Namespace) -> int:
    points = _load_points(args)
    tree = _read_tree(args.tree_file)
    if args.objective == "revenue":
        report = tree_revenue(points, tree)
    else:
        dist = pairwise_distances(points)
        report = ckmm_value(dist, tree) if args.objective == "ckmm" else dasgupta_cost(dist, tree)
    _write_or_print(report.to_csv(), args.out)
    return 0


def _cmd_enumerate_opt(args: argparse.Namespace) -> int:
    points = _load_points(args)
    if points.n > 7:
        raise DataError("enumerate-opt is capped at 7 points")
    if args.objective == "revenue":
        tree, value = brute_force_opt(points, "revenue")
    else:
        tree, value = brute_force_opt(pairwise_distances(points), args.objective)
    text = f"objective,{args.objective}\noptimal_value,{value!r}\ntree,{tree.serialize()}\n"
    _write_or_print(text, args.out)
    return 0


def _cmd_table1(args: argparse.Namespace) -> int:
    synthetic = None
    if args.points is None:
        if args.synth_k is None or args.synth_n is None or args.synth_dim is None:
            raise _UsageError("table1 needs --points or all of --synth-k/--synth-n/--synth-dim")
        synthetic = GaussianMixtureSpec(
            k=args.synth_k,
            n=args.synth_n,
            dim=args.synth_dim,
            separation=args.synth_separation,
            seed=args.synth_seed,
        )
    config = ExperimentConfig(
        subsample_size=args.subsample,
        input_csv=args.points,
        synthetic=synthetic,
        num_runs=args.runs,
        algorithms=tuple(args.algo.split(",")),
        objectives=tuple(args.objective.split(",")),
        base_seed=args.seed,
        output=args.out,
        solver=args.solver,
        lloyd_restarts=args.restarts,
        ingest=IngestOptions(
            columns=tuple(int(c) for c in args.columns.split(",")) if args.columns else None,
            skip_header=args.skip_header,
            delimiter=args.delimiter,
        ),
    )
    _, text = run_table1(config)
    if not args.out:
        sys.stdout.write(text)
    return 0


def _cmd_random_bad(args: argparse.Namespace) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = run_random_bad(sizes, args.trials, RngStream(args.seed))
    _write_or_print(random_bad_report_csv(rows), args.out)
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "gen-ultrametric": _cmd_gen_ultrametric,
    "embed": _cmd_embed,
    "cluster": _cmd_cluster,
    "eval": _cmd_eval,
    "enumerate-opt": _cmd_enumerate_opt,
}


def cli_main(argv: Sequence[str]) -> int:
    """Entry point: 0 on success, 1 on usage errors, 2 on data errors."""
    parser = _build_cli()
    try:
        args = parser.parse_args(list(argv))
        if args.command == "experiment":
            handler = _cmd_table1 if args.experiment == "table1" else _cmd_random_bad
        else:
            handler = _COMMANDS[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (DataError, TreeParseError, ValueError, TypeError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
