"""Command-line driver: ``macrocluster <subcommand> ...``.

Settings resolve in three layers: built-in defaults, then a ``key=value``
file given with ``--config``, then explicit flags. Every output file is
UTF-8 with LF line endings and is fully determined by inputs and seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import InputError, InsufficientDataError, MacroClusterError
from .factorgraph import (
    FactorGraph,
    build_factor_graph,
    clusters_to_csv,
    default_subsets,
    enumerate_clusters,
)
from .hierarchy import build_chain, build_lmst, build_mst, export_dot
from .mamlp import (
    MLP_MODES,
    MlpTable,
    augment_average,
    cluster_partition,
    cluster_report_json,
    mamlp_tree,
    mlp_table,
    movement_correlations,
    sensitivity,
    strong_links,
)
from .metrics import STATISTICAL, CorrelationMatrix, DistanceMatrix, distance_matrix, parse_metric
from .panel import GROWTH, GROWTH_METHODS, LEVELS, GrowthPanel, load_panel, to_growth_rates, windows
from .robustness import (
    MODES as SHUFFLE_MODES,
    distance_stack,
    mlp_shuffle_report,
    randomization_summary,
    reports_to_csv,
    shuffle_distance_stack,
)
from .trendstats import fit_exp_decay, moments_series, trend_series

TREE_KINDS = ("mst", "lmst", "umlp", "bmlp", "mamlp")


@dataclass(frozen=True)
class RunConfig:
    indicator: str = ""
    window: int = 5
    step: int = 1
    metric: str = STATISTICAL
    mlp_mode: str = "max-edge"
    pos_thr: float = 0.9
    neg_thr: float = -0.5
    boot_level: float = 0.9
    boot_n: int = 1000
    seed: int = 0
    out: str = "."
    growth_method: str = "pct-change"

    def validate(self) -> "RunConfig":
        if self.window < 2:
            raise InputError(f"window must be >= 2, got {self.window}")
        if self.step < 1:
            raise InputError(f"step must be >= 1, got {self.step}")
        if not self.pos_thr > self.neg_thr:
            raise InputError(f"pos-thr {self.pos_thr} must exceed neg-thr {self.neg_thr}")
        if self.boot_n < 100:
            raise InputError(f"boot-n must be >= 100, got {self.boot_n}")
        if not 0 <= self.boot_level < 1:
            raise InputError("boot-level must lie in [0, 1); 0 disables the bootstrap")
        if self.mlp_mode not in MLP_MODES:
            raise InputError(f"unknown mlp-mode {self.mlp_mode!r}")
        if self.growth_method not in GROWTH_METHODS:
            raise InputError(f"unknown growth-method {self.growth_method!r}")
        parse_metric(self.metric)
        return self

    def dump(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in asdict(self).items())


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    try:
        return {"int": int, "float": float}.get(kind, str)(raw)
    except ValueError:
        raise InputError(f"config value for {name} must be {kind}, got {raw!r}") from None


def read_config_file(path) -> dict:
    """Parse a ``key=value`` file; ``#`` starts a comment."""
    known = {f.name for f in fields(RunConfig)}
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise InputError(f"{path}:{n}: unknown config key {key!r}")
        out[key] = _coerce(key, value)
    return out


def resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = replace(cfg, **read_config_file(args.config))
    flags = {f.name: getattr(args, f.name, None) for f in fields(RunConfig)}
    cfg = replace(cfg, **{k: v for k, v in flags.items() if v is not None})
    return cfg.validate()


# ---------------------------------------------------------------- helpers


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_bytes(text.encode("utf-8"))
    print(path)
    return path


def _tag(cfg: RunConfig, source) -> str:
    """Output name prefix: the indicator label, else the input file's stem."""
    return cfg.indicator or Path(source).stem


def _read_panel(args, cfg: RunConfig) -> GrowthPanel:
    kind = LEVELS if args.levels else GROWTH
    panel = load_panel(args.panel, kind, cfg.indicator)
    return to_growth_rates(panel, cfg.growth_method) if args.levels else panel


def _is_panel_file(path) -> bool:
    with open(path, encoding="utf-8-sig") as fh:
        header = fh.readline().strip().split(",")
    try:
        [int(c) for c in header[1:]]
    except ValueError:
        return False
    return len(header) > 1


# ------------------------------------------------------------ subcommands


def cmd_ingest(args, cfg: RunConfig) -> int:
    levels = load_panel(args.panel, LEVELS, cfg.indicator)
    growth = to_growth_rates(levels, cfg.growth_method)
    tag = _tag(cfg, args.panel)
    _write(Path(cfg.out), f"{tag}_growth_{growth.years[0]}-{growth.years[-1]}.csv", growth.to_csv())
    return 0


def cmd_distances(args, cfg: RunConfig) -> int:
    panel = _read_panel(args, cfg)
    tag = _tag(cfg, args.panel)
    out = Path(cfg.out)
    for w in windows(panel, cfg.window, cfg.step):
        m = distance_matrix(w, cfg.metric)
        _write(out, f"{tag}_{w.label}_dist.csv", m.to_csv())
        if m.correlation is not None:
            _write(out, f"{tag}_{w.label}_corr.csv", m.correlation.to_csv())
    return 0


def cmd_trend(args, cfg: RunConfig) -> int:
    panel = _read_panel(args, cfg)
    tag = _tag(cfg, args.panel)
    out = Path(cfg.out)
    level = cfg.boot_level or None
    series = trend_series(panel, cfg.window, cfg.step, cfg.metric, level, cfg.boot_n, cfg.seed)
    _write(out, f"{tag}_trend.csv", series.to_csv())

    lines = ["window_label,mean,sigma,variance,skewness,kurtosis,excess_kurtosis"]
    for label, mom in moments_series(panel, cfg.window, cfg.step, cfg.metric):
        vals = (mom.mean, mom.sigma, mom.variance, mom.skewness, mom.kurtosis, mom.excess_kurtosis)
        lines.append(label + "," + ",".join(f"{v:.6f}" for v in vals))
    _write(out, f"{tag}_moments.csv", "\n".join(lines) + "\n")

    values = series.values[-args.fit_last:] if args.fit_last else series.values
    try:
        fit = fit_exp_decay(values)
    except (InputError, InsufficientDataError) as exc:
        print(f"warning: exponential fit skipped: {exc}", file=sys.stderr)
        return 0
    _write(out, f"{tag}_fit.json", fit.to_json(cfg.step))
    return 0


def cmd_mamlp(args, cfg: RunConfig) -> int:
    if args.from_mlp_table:
        table = MlpTable.from_csv(args.from_mlp_table)
        tag = _tag(cfg, args.from_mlp_table)
    elif args.panel:
        panel = _read_panel(args, cfg)
        table = mlp_table(panel, cfg.window, cfg.step, cfg.mlp_mode, cfg.metric, args.average)
        tag = _tag(cfg, args.panel)
    else:
        raise InputError("give a panel file or --from-mlp-table")
    corr = movement_correlations(table, skip_degenerate=args.skip_degenerate)
    links = strong_links(corr, cfg.pos_thr, cfg.neg_thr)
    report = cluster_partition(links, corr.entities)
    sens = sensitivity(corr)

    out = Path(cfg.out)
    _write(out, f"{tag}_mlp.csv", table.to_csv())
    _write(out, f"{tag}_movement_corr.csv", corr.to_csv())
    _write(out, f"{tag}_clusters.json", cluster_report_json(tag, links, report, sens))
    _write(out, f"{tag}_sensitivity.csv", "entity,chi\n" + "".join(f"{e},{v:.6f}\n" for e, v in sens))
    return 0


def _tree_matrix(args, cfg: RunConfig):
    """Distance matrix for ``tree`` plus a label for file names."""
    if _is_panel_file(args.input):
        args.panel = args.input
        panel = _read_panel(args, cfg)
        wins = windows(panel, cfg.window, cfg.step)
        if args.start is None:
            win = wins[0]
        else:
            match = [w for w in wins if w.start_year == args.start]
            if not match:
                raise InputError(f"no window starts in {args.start}")
            win = match[0]
        if args.kind == "mamlp":
            win = augment_average(win, args.average)
        return distance_matrix(win, cfg.metric), _tag(cfg, args.panel), win.label

    if args.correlation:
        m = DistanceMatrix.from_correlation(CorrelationMatrix.from_csv(args.input))
    else:
        m = DistanceMatrix.from_csv(args.input, cfg.metric)
    return m, _tag(cfg, args.input), ""


def cmd_tree(args, cfg: RunConfig) -> int:
    m, tag, label = _tree_matrix(args, cfg)
    if args.kind == "mst":
        tree = build_mst(m)
    elif args.kind == "lmst":
        tree = build_lmst(m)
    elif args.kind == "umlp":
        tree = build_chain(m, "unidirectional", args.root)
    elif args.kind == "bmlp":
        tree = build_chain(m, "bidirectional", args.root)
    else:
        tree = mamlp_tree(m)
    stem = f"{tag}_{label}_{args.kind}" if label else f"{tag}_{args.kind}"
    out = Path(cfg.out)
    _write(out, f"{stem}.dot", export_dot(tree))
    _write(out, f"{stem}.json", tree.to_json())
    return 0


def cmd_shuffle(args, cfg: RunConfig) -> int:
    if args.n_seeds < 1:
        raise InputError("n-seeds must be >= 1")
    seeds = [cfg.seed + i for i in range(args.n_seeds)]
    if args.mode == SHUFFLE_MODES[0]:
        if not args.panel:
            raise InputError(f"mode {args.mode} needs a panel file")
        panel = _read_panel(args, cfg)
        tag = _tag(cfg, args.panel)
        _, stack = distance_stack(panel, cfg.window, cfg.step, cfg.metric)
        if stack.shape[0] < 2:
            raise InsufficientDataError(f"shuffling needs >= 2 windows, got {stack.shape[0]}")
        reports = [shuffle_distance_stack(stack, s)[1] for s in seeds]
    else:
        if args.from_mlp_table:
            table = MlpTable.from_csv(args.from_mlp_table)
            tag = _tag(cfg, args.from_mlp_table)
        elif args.panel:
            panel = _read_panel(args, cfg)
            table = mlp_table(panel, cfg.window, cfg.step, cfg.mlp_mode, cfg.metric)
            tag = _tag(cfg, args.panel)
        else:
            raise InputError("give a panel file or --from-mlp-table")
        if len(table.windows) < 3:
            raise InsufficientDataError(f"MLP shuffles need >= 3 windows, got {len(table.windows)}")
        runs = [mlp_shuffle_report(table, args.mode, s, cfg.pos_thr, cfg.neg_thr) for s in seeds]
        reports = [r for _, r in runs]
        real = movement_correlations(table, skip_degenerate=True)
        summary = randomization_summary(real, [c for c, _ in runs], cfg.pos_thr, cfg.neg_thr)
        c_max, c_min = summary.median_extremes
        print(
            f"real: {summary.real_count} strong links, extremes "
            f"{summary.real_extremes[0]:.3f}/{summary.real_extremes[1]:.3f}; "
            f"shuffled: median {summary.median_count:g} links, "
            f"median extremes {c_max:.3f}/{c_min:.3f}, "
            f"{summary.zero_fraction:.0%} of runs without strong links",
            file=sys.stderr,
        )
    _write(Path(cfg.out), f"{tag}_shuffle.csv", reports_to_csv(reports))
    return 0


def _parse_named(items, flag):
    named = {}
    for item in items:
        if "=" not in item:
            raise InputError(f"{flag} expects NAME=path, got {item!r}")
        name, path = item.split("=", 1)
        if name in named:
            raise InputError(f"{flag}: duplicate name {name!r}")
        named[name] = path
    return named


def cmd_factor_graph(args, cfg: RunConfig) -> int:
    if args.edges:
        g = FactorGraph.from_edge_csv(args.edges)
    elif args.matrix:
        named = _parse_named(args.matrix, "--matrix")
        mats = {name: CorrelationMatrix.from_csv(path) for name, path in named.items()}
        g = build_factor_graph(mats, args.threshold)
    else:
        raise InputError("give --matrix NAME=path (repeatable) or --edges")
    if args.subsets:
        subsets = [tuple(s.split("-")) for s in args.subsets.split(",")]
    else:
        subsets = default_subsets(g)
    clusters = enumerate_clusters(g, subsets)
    tag = cfg.indicator or "factor_graph"
    out = Path(cfg.out)
    _write(out, f"{tag}.json", g.to_json())
    _write(out, f"{tag}_clusters.csv", clusters_to_csv(clusters))
    return 0


# ------------------------------------------------------------------ parser


def _common(p: argparse.ArgumentParser, panel: bool = True) -> None:
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="key=value file (flags override it)")
    g.add_argument("--print-config", action="store_true", help="print effective settings and exit")
    g.add_argument("--indicator", help="label used in output names")
    g.add_argument("--window", type=int, help="window size T in years (default 5)")
    g.add_argument("--step", type=int, help="window step in years (default 1)")
    g.add_argument("--metric", help="statistical, euclidean, manhattan or power:p:r")
    g.add_argument("--mlp-mode", choices=MLP_MODES)
    g.add_argument("--pos-thr", type=float, help="strong positive link threshold (default 0.9)")
    g.add_argument("--neg-thr", type=float, help="strong negative link threshold (default -0.5)")
    g.add_argument("--boot-level", type=float, help="bootstrap CI level, 0 disables (default 0.9)")
    g.add_argument("--boot-n", type=int, help="bootstrap resamples (default 1000)")
    g.add_argument("--seed", type=int, help="top-level random seed (default 0)")
    g.add_argument("--out", help="output directory (default .)")
    g.add_argument("--growth-method", choices=GROWTH_METHODS)
    if panel:
        p.add_argument("--levels", action="store_true", help="input panel holds levels, convert first")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macrocluster", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert a levels panel to growth rates")
    p.add_argument("panel")
    _common(p, panel=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("distances", help="per-window distance and correlation matrices")
    p.add_argument("panel")
    _common(p)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("trend", help="standardized mean distance series, moments and decay fit")
    p.add_argument("panel")
    p.add_argument("--fit-last", type=int, default=0, metavar="K", help="fit only the last K points")
    _common(p)
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("mamlp", help="MLP table, movement correlations, clusters, sensitivity")
    p.add_argument("panel", nargs="?")
    p.add_argument("--from-mlp-table", metavar="CSV", help="start from an MLP-distance table")
    p.add_argument("--average", choices=("mean", "sum"), default="mean")
    p.add_argument("--skip-degenerate", action="store_true", help="leave constant MLP rows out")
    _common(p)
    p.set_defaults(func=cmd_mamlp)

    p = sub.add_parser("tree", help="MST, LMST, chain or MAMLP tree as DOT and JSON")
    p.add_argument("input", help="panel CSV or square distance-matrix CSV")
    p.add_argument("--kind", choices=TREE_KINDS, default="mst")
    p.add_argument("--root", default="min-pair", help="chain root entity (default: closest pair)")
    p.add_argument("--start", type=int, help="start year of the window (panel input)")
    p.add_argument("--average", choices=("mean", "sum"), default="mean")
    p.add_argument("--correlation", action="store_true", help="matrix input holds correlations")
    _common(p)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("shuffle", help="permutation baselines")
    p.add_argument("panel", nargs="?")
    p.add_argument("--mode", choices=SHUFFLE_MODES, default="mlp-columns-rows")
    p.add_argument("--from-mlp-table", metavar="CSV")
    p.add_argument("--n-seeds", type=int, default=200, help="number of seeds, starting at --seed")
    _common(p)
    p.set_defaults(func=cmd_shuffle)

    p = sub.add_parser("factor-graph", help="indicator/entity factor graph and cluster table")
    p.add_argument("--matrix", action="append", default=[], metavar="NAME=CSV",
                   help="movement-correlation matrix for one indicator (repeat)")
    p.add_argument("--edges", metavar="CSV", help="entity,variable edge list instead of matrices")
    p.add_argument("--threshold", type=float, default=0.9, help="|C| link threshold (default 0.9)")
    p.add_argument("--subsets", help="comma-separated subsets like GDP-FCE-GCF,FCE-GCF-NEX")
    _common(p, panel=False)
    p.set_defaults(func=cmd_factor_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.print_config:
            sys.stdout.write(cfg.dump())
            return 0
        return args.func(args, cfg)
    except MacroClusterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
