"""Command line interface.

Subcommands: sample, explore, components, batch, compare, sweep, exponent,
figures. Exit codes: 0 success, 2 bad configuration or usage, 3 resource cap
exceeded, 4 a requested statistical assertion failed.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .components import (component_csv, components_bipartite, components_rig,
                         components_simple)
from .exploration import excursion_csv, excursions, explore, trace_csv
from .experiments.compare import compare_to_errg
from .experiments.config import (ConfigError, ExperimentConfig,
                                 parse_config_file)
from .experiments.figures import emit_figures
from .experiments.runner import replica_seed, run_batch
from .experiments.sweep import exponent_study, phase_sweep
from .graphs import (Params, ResourceCapError, _rng, community_size_stats,
                     errg_match, resolve_p, sample_bipartite, sample_errg)
from .scaling import exponent_fit, time_index


class StatisticalFailure(RuntimeError):
    """A requested distributional assertion failed (exit code 4)."""


# ---------------------------------------------------------------------------
# shared argument groups

def _add_common(sub) -> None:
    sub.add_argument("--out-dir", dest="out_dir", default=None,
                     help="output directory (default: current directory)")
    sub.add_argument("--seed", "--master-seed", dest="master_seed", type=int,
                     default=None, help="master seed (default 0)")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker processes (default 1)")


def _add_model(sub, with_p: bool = True) -> None:
    sub.add_argument("--n", type=int, required=True,
                     help="number of individuals")
    sub.add_argument("--m", type=int, default=None,
                     help="number of communities")
    sub.add_argument("--alpha", type=float, default=None,
                     help="community exponent: m = round(n^alpha)")
    if with_p:
        sub.add_argument("--p", type=float, default=None,
                         help="edge probability, given directly")
    sub.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="position inside the critical window")
    sub.add_argument("--mu", type=float, default=None,
                     help="multiplier of the critical probability")
    sub.add_argument("--regime", choices=["alpha_gt_1", "alpha_lt_1"],
                     default=None, help="window scale override")


def _params(args) -> Params:
    if (args.m is None) == (args.alpha is None):
        raise ConfigError("exactly one of --m, --alpha must be set")
    kwargs = {"p": getattr(args, "p", None), "lam": args.lam, "mu": args.mu}
    if args.alpha is not None:
        return Params.from_alpha(args.n, args.alpha, **kwargs)
    return Params(n=args.n, m=args.m, **kwargs)


def _out_dir(args) -> Path:
    out = Path(args.out_dir if args.out_dir is not None else ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _seed(args) -> int:
    return args.master_seed if args.master_seed is not None else 0


# ---------------------------------------------------------------------------
# quick-look subcommands (flag-driven)

def cmd_sample(args) -> int:
    params = _params(args)
    p = resolve_p(params, args.regime)
    rng = _rng(replica_seed(_seed(args), 0, 0))
    g = sample_bipartite(Params(n=params.n, m=params.m, p=p), rng,
                         min_members=args.min_members)
    out = _out_dir(args) / "graph.txt"
    with open(out, "w") as fh:
        g.dump(fh)
    stats = community_size_stats(g)
    print(f"n={g.n} m={g.m} p={p:.6g} edges={g.edge_count} -> {out}")
    print(f"largest community {stats.max_w}, busiest individual {stats.max_u}")
    return 0


def cmd_explore(args) -> int:
    params = _params(args)
    p = resolve_p(params, args.regime)
    rng = _rng(replica_seed(_seed(args), 0, 0))
    g = sample_bipartite(Params(n=params.n, m=params.m, p=p), rng)
    scale = params.n if args.start_side == "U" else params.m
    if args.steps is not None:
        budget = args.steps
    else:
        budget = max(1, time_index(args.budget_T, scale))
    trace = explore(g, p, start_side=args.start_side, step_budget=budget,
                    seed=rng,
                    stop_when_opposite_exhausted=args.until_opposite_exhausted)
    out = _out_dir(args)
    tpath = out / "trace.csv"
    with open(tpath, "w") as fh:
        trace_csv(trace, fh)
    recs = excursions(trace)
    epath = out / "excursions.csv"
    with open(epath, "w") as fh:
        excursion_csv(recs, fh)
    print(f"steps={trace.steps} restarts={len(trace.start_vertices)} "
          f"completed_excursions={len(recs)} truncated={trace.truncated}")
    print(f"trace -> {tpath}")
    print(f"excursions -> {epath}")
    return 0


def cmd_components(args) -> int:
    rng = _rng(replica_seed(_seed(args), 0, 0))
    if args.graph == "errg":
        if args.p is not None:
            p = args.p
        elif args.lam is not None:
            p = errg_match(args.n, args.lam)
        else:
            raise ConfigError("errg components need --p or --lambda")
        g = sample_errg(args.n, p, rng)
        clist = components_simple(g)
    else:
        params = _params(args)
        p = resolve_p(params, args.regime)
        g = sample_bipartite(Params(n=params.n, m=params.m, p=p), rng)
        if args.graph == "rig":
            clist = components_rig(g, count_edges=args.count_edges)
        else:
            clist = components_bipartite(g)
    out = _out_dir(args) / "components.csv"
    with open(out, "w") as fh:
        component_csv(clist, fh)
    shown = ", ".join(str(int(s)) for s in clist.sizes()[:5].tolist())
    print(f"{len(clist)} components (largest: {shown}) -> {out}")
    return 0


# ---------------------------------------------------------------------------
# experiment subcommands (config-file driven, flags override)

_BATCH_KEYS = ["model", "task", "n", "m", "alpha", "lambda", "mu", "regime",
               "start_side", "replicas", "master_seed", "step_budget_T",
               "ds", "ranks", "count_edges", "sampler", "out_dir", "threads",
               "max_expected_edges", "pair_cap"]


def _add_batch_flags(sub, model_choices=("rig", "bipartite", "errg")) -> None:
    sub.add_argument("--config", default=None,
                     help="key=value file; explicit flags override it")
    sub.add_argument("--model", choices=list(model_choices), default=None)
    sub.add_argument("--task", choices=["components", "explore"], default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--m", type=int, default=None)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--lambda", dest="lam", type=float, default=None)
    sub.add_argument("--mu", type=float, default=None)
    sub.add_argument("--regime", choices=["alpha_gt_1", "alpha_lt_1"],
                     default=None)
    sub.add_argument("--start-side", dest="start_side", choices=["U", "W"],
                     default=None)
    sub.add_argument("--replicas", type=int, default=None)
    sub.add_argument("--step-budget-T", dest="step_budget_T", type=float,
                     default=None, help="exploration horizon in rescaled time")
    sub.add_argument("--ds", type=float, default=None,
                     help="rescaled-time grid spacing")
    sub.add_argument("--ranks", type=int, default=None,
                     help="component ranks compared or reported")
    sub.add_argument("--count-edges", dest="count_edges",
                     action=argparse.BooleanOptionalAction, default=None)
    sub.add_argument("--sampler", choices=["auto", "full", "min2"],
                     default=None)
    sub.add_argument("--max-expected-edges", dest="max_expected_edges",
                     type=float, default=None)
    sub.add_argument("--pair-cap", dest="pair_cap", type=float, default=None)


def _experiment_mapping(args) -> dict:
    mapping = dict(parse_config_file(args.config)) if args.config else {}
    for key in _BATCH_KEYS:
        attr = "lam" if key == "lambda" else key
        if hasattr(args, attr):
            value = getattr(args, attr)
            if value is not None:
                mapping[key] = value
    mapping.setdefault("out_dir", ".")
    return mapping


def cmd_batch(args) -> int:
    mapping = _experiment_mapping(args)
    cfg = ExperimentConfig.from_mapping(mapping)
    result = run_batch(cfg)
    print(f"{cfg.model}/{cfg.task}: {cfg.replicas} replicas, "
          f"wall {result.wall_time_s:.1f}s")
    for name, path in sorted(result.paths.items()):
        print(f"{name} -> {path}")
    return 0


def cmd_compare(args) -> int:
    mapping = _experiment_mapping(args)
    mapping.setdefault("model", "rig")
    cfg = ExperimentConfig.from_mapping(mapping)
    report = compare_to_errg(cfg)
    print(f"regime {report.regime}: reference on {report.errg_n} vertices "
          f"at p={report.errg_p:.6g}")
    for rc in report.ranks:
        print(f"rank {rc.rank}: KS={rc.ks_stat:.4f} p={rc.p_value:.4f} "
              f"(means {rc.rig_mean:.4f} vs {rc.errg_mean:.4f})")
    if report.edge_ratio_mean is not None:
        print(f"rank-1 edge/size ratio {report.edge_ratio_mean:.4f}; "
              f"KS vs size/2 p={report.edge_ks[1]:.4f}")
    for name, path in sorted(report.paths.items()):
        print(f"{name} -> {path}")
    if args.check and not report.passed(args.p_threshold, args.allow_fail):
        raise StatisticalFailure(
            f"more than {args.allow_fail} rank(s) reject at "
            f"p<{args.p_threshold}")
    return 0


def cmd_sweep(args) -> int:
    mapping = _experiment_mapping(args)
    if args.mu_grid is not None:
        mapping["mu_grid"] = [float(t) for t in args.mu_grid.replace(",", " ").split()]
    for key in ("n", "alpha", "mu_grid"):
        if key not in mapping:
            raise ConfigError(f"sweep needs {key}")
    rows = phase_sweep(int(mapping["n"]), float(mapping["alpha"]),
                       mapping["mu_grid"],
                       replicas=int(mapping.get("replicas", 20)),
                       master_seed=int(mapping.get("master_seed", 0)),
                       threads=int(mapping.get("threads", 1)),
                       out_dir=mapping["out_dir"])
    for row in rows:
        print(f"mu={row['mu']:g}: median |C1|={row['median_C1']:g} "
              f"(/log n {row['over_log_n']:.3g}, /n^(2/3) {row['over_n23']:.3g}, "
              f"/n {row['over_n']:.3g})")
    print(f"sweep -> {Path(mapping['out_dir']) / 'sweep.csv'}")
    return 0


def cmd_exponent(args) -> int:
    mapping = _experiment_mapping(args)
    if args.n_grid is not None:
        mapping["n_grid"] = [float(t) for t in args.n_grid.replace(",", " ").split()]
    for key in ("alpha", "n_grid"):
        if key not in mapping:
            raise ConfigError(f"exponent needs {key}")
    rows, fit = exponent_study(float(mapping["alpha"]), mapping["n_grid"],
                               replicas=int(mapping.get("replicas", 20)),
                               lam=float(mapping.get("lambda", 0.0)),
                               master_seed=int(mapping.get("master_seed", 0)),
                               threads=int(mapping.get("threads", 1)),
                               out_dir=mapping["out_dir"])
    for n, med, q05, q95 in rows:
        print(f"n={n}: median |C1|={med:g} [{q05:g}, {q95:g}]")
    print(f"rho_hat={fit.rho_hat:.4f} +- {fit.stderr:.4f} "
          f"(R^2={fit.r_squared:.4f})")
    print(f"table -> {Path(mapping['out_dir']) / 'exponent.csv'}")
    if args.expect is not None:
        lo, hi = (float(t) for t in args.expect.split(","))
        if not lo <= fit.rho_hat <= hi:
            raise StatisticalFailure(
                f"rho_hat={fit.rho_hat:.4f} outside [{lo}, {hi}]")
    return 0


# ---------------------------------------------------------------------------
# figures

def _read_walk_csv(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return {}
    out = {"grid": [float(r["s"]) for r in rows],
           "mean": [float(r["mean"]) for r in rows]}
    if "q05" in rows[0] and "q95" in rows[0]:
        out["lo"] = [float(r["q05"]) for r in rows]
        out["hi"] = [float(r["q95"]) for r in rows]
    return out


def _read_exponent_csv(path):
    with open(path) as fh:
        rows = [(int(r["n"]), float(r["median_C1"]), float(r["q05"]),
                 float(r["q95"])) for r in csv.DictReader(fh)]
    fit = None
    if len(rows) >= 4:
        fit = exponent_fit([(r[0], r[1]) for r in rows])
    return {"rows": rows, "fit": fit}


def _read_samples_csv(path):
    rig, errg = {}, {}
    with open(path) as fh:
        for row in csv.DictReader(fh):
            dest = rig if row["model"] == "rig" else errg
            dest.setdefault(int(row["rank"]), []).append(float(row["value"]))
    return {"rig": rig, "errg": errg}


def cmd_figures(args) -> int:
    walk = exponent = ks = None
    if args.walk_csv is not None:
        walk = _read_walk_csv(args.walk_csv)
        walk["lam"] = args.lam if args.lam is not None else 0.0
    if args.exponent_csv is not None:
        exponent = _read_exponent_csv(args.exponent_csv)
    if args.samples_csv is not None:
        ks = _read_samples_csv(args.samples_csv)
    if walk is None and exponent is None and ks is None:
        raise ConfigError("figures needs at least one of --walk-csv, "
                          "--exponent-csv, --samples-csv")
    paths = emit_figures(_out_dir(args), walk=walk, exponent=exponent, ks=ks)
    for p in paths:
        print(f"figure -> {p}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riglab",
        description="Simulation laboratory for random intersection graphs "
                    "in the critical window.")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("sample", help="sample one bipartite graph and dump it")
    _add_model(s)
    s.add_argument("--min-members", dest="min_members", type=int, default=0,
                   choices=[0, 2],
                   help="2 drops communities with fewer than two members")
    _add_common(s)
    s.set_defaults(func=cmd_sample)

    s = subs.add_parser("explore", help="run the two-step exploration "
                                        "and write its trace")
    _add_model(s)
    s.add_argument("--start-side", dest="start_side", choices=["U", "W"],
                   default="U")
    s.add_argument("--steps", type=int, default=None,
                   help="explicit step budget")
    s.add_argument("--budget-T", dest="budget_T", type=float, default=2.0,
                   help="step budget as a rescaled horizon")
    s.add_argument("--until-opposite-exhausted",
                   dest="until_opposite_exhausted", action="store_true",
                   help="stop once every opposite-side vertex is discovered")
    _add_common(s)
    s.set_defaults(func=cmd_explore)

    s = subs.add_parser("components", help="component census of one sample")
    _add_model(s)
    s.add_argument("--graph", choices=["rig", "bipartite", "errg"],
                   default="rig")
    s.add_argument("--count-edges", dest="count_edges",
                   action=argparse.BooleanOptionalAction, default=True)
    _add_common(s)
    s.set_defaults(func=cmd_components)

    s = subs.add_parser("batch", help="replica batch with CSV + manifest")
    _add_batch_flags(s)
    _add_common(s)
    s.set_defaults(func=cmd_batch)

    s = subs.add_parser("compare", help="KS-compare window components "
                                        "against the matched reference")
    _add_batch_flags(s, model_choices=("rig",))
    s.add_argument("--p-threshold", dest="p_threshold", type=float,
                   default=0.01)
    s.add_argument("--allow-fail", dest="allow_fail", type=int, default=0)
    s.add_argument("--assert", dest="check", action="store_true",
                   help="exit 4 unless the comparison passes")
    _add_common(s)
    s.set_defaults(func=cmd_compare)

    s = subs.add_parser("sweep", help="phase portrait over the critical "
                                      "multiplier mu")
    _add_batch_flags(s)
    s.add_argument("--mu-grid", dest="mu_grid", default=None,
                   help="comma-separated mu values")
    _add_common(s)
    s.set_defaults(func=cmd_sweep)

    s = subs.add_parser("exponent", help="largest-component size exponent "
                                         "over an n grid")
    _add_batch_flags(s)
    s.add_argument("--n-grid", dest="n_grid", default=None,
                   help="comma-separated n values")
    s.add_argument("--expect", default=None,
                   help="lo,hi acceptance range for the fitted exponent")
    _add_common(s)
    s.set_defaults(func=cmd_exponent)

    s = subs.add_parser("figures", help="render SVG figures from CSV outputs")
    s.add_argument("--walk-csv", dest="walk_csv", default=None)
    s.add_argument("--lambda", dest="lam", type=float, default=None)
    s.add_argument("--exponent-csv", dest="exponent_csv", default=None)
    s.add_argument("--samples-csv", dest="samples_csv", default=None)
    _add_common(s)
    s.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except StatisticalFailure as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
