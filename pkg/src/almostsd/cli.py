"""``almostsd`` command line.

Subcommands::

    index     2DSD index and cone classification of two samples
    mvr       MVR estimates in both directions (optionally a bootstrap CI)
    test      bootstrap test of almost stochastic dominance
    simulate  Monte Carlo power curve for a scenario
    oracle    population MVR of a scenario by quadrature
    diagnose  ingestion report, tail constants and truncation warnings

Errors are reported on stderr as ``{"error": {"category": ..., "message": ...}}``
with a nonzero exit code per category.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io as aio
from .bootstrap import BootstrapConfig, case1_mvr_distribution
from .dominance import classify, index, mvr, tail_diagnostics
from .empirical import OrderKind, Sample, targets
from .errors import AlmostSDError, InputError, ParameterError
from .scenarios import builtin_scenarios, get_scenario, oracle_index, power_curve, scenario_oracle
from .testing import TestSpec, confidence_interval, run_test

EXIT_CODES = {
    "error": 1,
    "parameter": 2,
    "input": 3,
    "precondition": 4,
    "domain": 5,
    "kind_mismatch": 5,
    "computation": 6,
    "io": 7,
}

DEFAULT_EPSILONS = (0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1, 0.12, 0.15, 0.2)
TARGET_POINTS = 1001


# --------------------------------------------------------------------------
# argument parsing


def _workers(text: str):
    if text == "auto":
        return "auto"
    try:
        w = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"workers must be a positive integer or 'auto', got {text!r}")
    if w < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return w


def _epsilons(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"epsilons must be a comma-separated list of numbers, got {text!r}")


def _order(text: str) -> str:
    try:
        return OrderKind.parse(text).value
    except AlmostSDError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_inputs(p):
    p.add_argument("inputs", nargs="+", metavar="FILE",
                   help="two CSV/TSV files (one sample each), or one file with --columns")
    p.add_argument("--column", default=None, help="column name or 0-based index used in each file (default: first)")
    p.add_argument("--columns", default=None, metavar="A,B", help="two columns of a single input file")
    p.add_argument("--order", type=_order, default="first",
                   help="first | second | stoploss | lorenz (default: first)")


def _add_output(p, formats=("json",)):
    p.add_argument("--out", default="-", help="output path (default: stdout)")
    p.add_argument("--format", choices=formats, default="json")
    p.add_argument("--plot-data", default=None, metavar="DIR", help="write CSV plot tables into DIR")
    p.add_argument("--figures", action="store_true", help="also render PNG figures into the --plot-data DIR")


def _add_bootstrap(p, B_default=2000):
    p.add_argument("--B", type=int, default=B_default, help=f"bootstrap replicates (default: {B_default})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_workers, default=1, help="worker processes or 'auto' (default: 1)")
    p.add_argument("--alpha", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="almostsd", description=__doc__.split("\n\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="2DSD index of two samples")
    _add_inputs(p)
    p.add_argument("--epsilon", type=float, default=0.0, help="cone used for classification")
    _add_output(p)

    p = sub.add_parser("mvr", help="MVR estimate in both directions")
    _add_inputs(p)
    _add_bootstrap(p, B_default=0)
    _add_output(p)

    p = sub.add_parser("test", help="bootstrap test of almost stochastic dominance")
    _add_inputs(p)
    p.add_argument("--variant", choices=("a", "b", "c"), default="a")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--method", choices=("case1", "case2"), default="case1")
    p.add_argument("--c", type=float, default=0.01, help="contact-set constant for case2 (default: 0.01)")
    p.add_argument("--direction", choices=("12", "21", "both"), default="12",
                   help="12: sample 1 dominated by sample 2; 21: the reverse")
    _add_bootstrap(p)
    _add_output(p)

    p = sub.add_parser("simulate", help="Monte Carlo power curve")
    p.add_argument("--scenario", default="2", help="1 | 2 | 3 | 4sub | path to a scenario JSON file")
    p.add_argument("--n", type=int, default=None, help="sample size per population (default 5000; 1000 for 4sub)")
    p.add_argument("--N", type=int, default=None, help="Monte Carlo runs (default 100, 500 with --full)")
    p.add_argument("--B", type=int, default=None, help="bootstrap replicates (default 500, 2000 with --full)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--epsilons", type=_epsilons, default=None, metavar="E1,E2,...")
    p.add_argument("--method", choices=("case1", "case2"), default="case1")
    p.add_argument("--c", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_workers, default="auto")
    p.add_argument("--full", action="store_true", help="full-scale N = 500, B = 2000")
    _add_output(p, formats=("json", "csv"))

    p = sub.add_parser("oracle", help="population MVR by quadrature")
    p.add_argument("--scenario", default="all", help="1 | 2 | 3 | 4sub | all | path to a scenario JSON file")
    _add_output(p, formats=("json", "csv"))

    p = sub.add_parser("diagnose", help="ingestion report and tail diagnostics")
    _add_inputs(p)
    p.add_argument("--threshold", type=float, default=0.01, help="truncation warning threshold")
    _add_output(p)
    return parser


# --------------------------------------------------------------------------
# helpers


def load_pair(args):
    if len(args.inputs) == 1:
        if not args.columns:
            raise ParameterError("a single input file needs --columns A,B")
        cols = [c.strip() for c in args.columns.split(",")]
        if len(cols) != 2:
            raise ParameterError(f"--columns needs exactly two columns, got {args.columns!r}")
        (x1, r1), (x2, r2) = aio.read_columns(args.inputs[0], cols)
    elif len(args.inputs) == 2:
        if args.columns:
            raise ParameterError("--columns applies to a single input file")
        (x1, r1), = aio.read_columns(args.inputs[0], [args.column])
        (x2, r2), = aio.read_columns(args.inputs[1], [args.column])
    else:
        raise ParameterError(f"expected one or two input files, got {len(args.inputs)}")
    return Sample.from_values(x1, "1"), Sample.from_values(x2, "2"), [r1.to_dict(), r2.to_dict()]


def _check_plot_flags(args):
    if getattr(args, "figures", False) and not args.plot_data:
        raise ParameterError("--figures needs --plot-data DIR")


def _check_unit(name, value):
    if not 0.0 < value < 1.0:
        raise ParameterError(f"{name} out of range: {value!r}")


def _plot_dir(args) -> Path | None:
    if not args.plot_data:
        return None
    d = Path(args.plot_data)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create {d}: {exc}") from None
    return d


def _log_hint(s1, s2, order) -> bool:
    if OrderKind.parse(order) is OrderKind.LORENZ:
        return False
    lo = min(s1.min, s2.min)
    hi = max(s1.max, s2.max)
    return lo > 0 and hi / lo > 100.0


def _index_dict(idx):
    return {"signed": idx.signed, "abs": idx.abs, "order": idx.order.value, "domain": list(idx.domain)}


def _write_targets(d: Path, s1, s2, order, figures: bool, log_x: bool) -> list[str]:
    order = OrderKind.parse(order)
    if order is OrderKind.LORENZ:
        x = np.linspace(0.0, 1.0, TARGET_POINTS)
        t1, t2 = targets(s1, order).s_hat, targets(s2, order).s_hat
    else:
        pooled = np.union1d(s1.support, s2.support)
        x = np.unique(np.quantile(pooled, np.linspace(0.0, 1.0, TARGET_POINTS)))
        upper = float(pooled[-1]) if order is not OrderKind.FIRST else None
        t1, t2 = targets(s1, order, upper).s_hat, targets(s2, order, upper).s_hat
    y1, y2 = t1(x), t2(x)
    aio.write_table(d / "targets.csv", ["x", "s1", "s2"], {"x": x.tolist(), "s1": y1.tolist(), "s2": y2.tolist()})
    files = ["targets.csv"]
    if figures:
        from .plotting import targets_figure
        targets_figure(x, y1, y2, d / "targets.png", log_x=log_x, ylabel=f"{order.value} target",
                       step=order is OrderKind.FIRST)
        files.append("targets.png")
    return files


def _write_meta(d: Path, meta: dict):
    aio.write_text(aio.dumps(meta), d / "plot_meta.json")


def _emit(args, command, config, result):
    aio.write_text(aio.dumps(aio.envelope(command, config, result)), args.out)


# --------------------------------------------------------------------------
# subcommands


def cmd_index(args):
    _check_plot_flags(args)
    if not 0.0 <= args.epsilon < 0.5:
        raise ParameterError(f"epsilon must lie in [0, 0.5), got {args.epsilon!r}")
    s1, s2, reports = load_pair(args)
    idx = index(s1, s2, args.order)
    est = mvr(idx)
    result = {"index": _index_dict(idx), "epsilon_hat0": est.epsilon0, "degenerate": est.degenerate,
              "region": classify(idx, args.epsilon).region.value, "ingest": reports}
    config = {"order": args.order, "epsilon": args.epsilon, "inputs": args.inputs,
              "column": args.column, "columns": args.columns, "seed": None}
    d = _plot_dir(args)
    if d:
        log_x = _log_hint(s1, s2, args.order)
        files = _write_targets(d, s1, s2, args.order, args.figures, log_x)
        _write_meta(d, {"files": files, "log_scale_hint": {"x": log_x}, "order": args.order})
    _emit(args, "index", config, result)


def cmd_mvr(args):
    _check_plot_flags(args)
    _check_unit("alpha", args.alpha)
    if args.B < 0:
        raise ParameterError("B must be >= 0")
    s1, s2, reports = load_pair(args)
    idx = index(s1, s2, args.order)
    result = {"index": _index_dict(idx), "ingest": reports, "directions": {}}
    for direction, (a, b) in (("12", (s1, s2)), ("21", (s2, s1))):
        est = mvr(idx if direction == "12" else idx.reversed(), direction)
        entry = {"epsilon_hat0": est.epsilon0, "degenerate": est.degenerate}
        if args.B > 0:
            cfg = BootstrapConfig(B=args.B, seed=args.seed, parallelism=args.workers)
            dist = case1_mvr_distribution(a, b, args.order, cfg)
            entry["ci"] = list(confidence_interval(dist, args.alpha))
            entry["degenerate_replicates"] = dist.degenerate_count
        result["directions"][direction] = entry
    config = {"order": args.order, "B": args.B, "alpha": args.alpha, "seed": args.seed,
              "inputs": args.inputs, "column": args.column, "columns": args.columns}
    d = _plot_dir(args)
    if d:
        log_x = _log_hint(s1, s2, args.order)
        files = _write_targets(d, s1, s2, args.order, args.figures, log_x)
        _write_meta(d, {"files": files, "log_scale_hint": {"x": log_x}, "order": args.order})
    _emit(args, "mvr", config, result)


def _test_entry(res):
    cls = classify(res.index, res.spec.epsilon).region.value
    return {"reject": res.reject, "epsilon_hat0": res.epsilon_hat0, "index": _index_dict(res.index),
            "quantiles": res.boot_quantiles, "ci": list(res.ci) if res.ci else None,
            "statistic": res.statistic, "region": cls, "direction": res.spec.direction,
            "diagnostics": res.diagnostics}


def cmd_test(args):
    _check_plot_flags(args)
    directions = ("12", "21") if args.direction == "both" else (args.direction,)
    specs = [TestSpec(args.variant, args.epsilon, args.alpha, args.method, args.order, d) for d in directions]
    cfg = BootstrapConfig(B=args.B, seed=args.seed, case2_c=args.c, parallelism=args.workers)
    s1, s2, reports = load_pair(args)
    results = {spec.direction: run_test(s1, s2, spec, cfg) for spec in specs}
    if len(results) == 1:
        result = _test_entry(next(iter(results.values())))
    else:
        result = {"by_direction": {d: _test_entry(r) for d, r in results.items()}}
    result["ingest"] = reports
    config = {"order": args.order, "variant": args.variant, "epsilon": args.epsilon, "alpha": args.alpha,
              "method": args.method, "c": args.c if args.method == "case2" else None, "B": args.B,
              "seed": args.seed, "direction": args.direction, "inputs": args.inputs,
              "column": args.column, "columns": args.columns}
    d = _plot_dir(args)
    if d:
        _test_plot_data(d, args, s1, s2, results)
    _emit(args, "test", config, result)


def _test_plot_data(d: Path, args, s1, s2, results):
    log_x = _log_hint(s1, s2, args.order)
    files = _write_targets(d, s1, s2, args.order, args.figures, log_x)
    for direction, res in results.items():
        dist = res.distribution
        tag = f"_{direction}"
        aio.write_table(d / f"index_point{tag}.csv", ["signed", "abs", "epsilon_hat0"],
                        {"signed": [res.index.signed], "abs": [res.index.abs],
                         "epsilon_hat0": [res.epsilon_hat0]})
        files.append(f"index_point{tag}.csv")
        if dist.statistic_kind == "mvr":
            aio.write_table(d / f"index_cloud{tag}.csv", ["replicate", "signed", "abs", "mvr"],
                            {"replicate": list(range(dist.B)), "signed": dist.signed.tolist(),
                             "abs": dist.absolute.tolist(), "mvr": dist.values.tolist()})
            files.append(f"index_cloud{tag}.csv")
            if args.figures:
                from .plotting import index_cloud_figure
                index_cloud_figure(dist.signed, dist.absolute, res.index.as_tuple(),
                                   d / f"index_cloud{tag}.png", epsilon=args.epsilon,
                                   title=f"direction {direction}")
                files.append(f"index_cloud{tag}.png")
        else:
            aio.write_table(d / f"bootstrap_statistic{tag}.csv", ["replicate", "linear", "delta", "value"],
                            {"replicate": list(range(dist.B)), "linear": dist.linear.tolist(),
                             "delta": dist.delta.tolist(), "value": dist.values.tolist()})
            files.append(f"bootstrap_statistic{tag}.csv")
    _write_meta(d, {"files": files, "log_scale_hint": {"x": log_x}, "order": args.order,
                    "epsilon": args.epsilon})


def cmd_simulate(args):
    _check_plot_flags(args)
    scenario = get_scenario(args.scenario)
    n = args.n if args.n is not None else (1000 if scenario.id == "4sub" else 5000)
    N = args.N if args.N is not None else (500 if args.full else 100)
    B = args.B if args.B is not None else (2000 if args.full else 500)
    eps = args.epsilons if args.epsilons is not None else list(DEFAULT_EPSILONS)
    _check_unit("alpha", args.alpha)
    for name, v in (("n", n), ("N", N), ("B", B)):
        if v < 1:
            raise ParameterError(f"{name} must be >= 1, got {v}")
    if args.method == "case2" and args.c <= 0:
        raise ParameterError("--c must be positive")
    pc = power_curve(scenario, n, N, B, args.alpha, eps, args.method,
                     args.c if args.method == "case2" else None, args.seed, args.workers)
    rows = pc.to_rows()
    config = {"scenario": scenario.to_dict(), "n": n, "N": N, "B": B, "alpha": args.alpha,
              "epsilons": list(pc.epsilon_grid.tolist()), "method": args.method,
              "c": args.c if args.method == "case2" else None, "seed": args.seed, "full": args.full}
    if args.format == "csv":
        aio.write_text(aio.csv_text(rows, ["epsilon", "rejection_rate"]), args.out)
    else:
        result = {"power_curve": rows,
                  "epsilon_hat0": {"mean": float(np.mean(pc.epsilon_hat0)),
                                   "median": float(np.median(pc.epsilon_hat0))}}
        if args.method == "case1":
            result["critical_value_mean"] = float(np.mean(pc.critical))
        _emit(args, "simulate", config, result)
    d = _plot_dir(args)
    if d:
        aio.write_text(aio.csv_text(rows, ["epsilon", "rejection_rate"]), d / "power_curve.csv")
        files = ["power_curve.csv"]
        if args.figures:
            from .plotting import power_curve_figure
            power_curve_figure(pc.epsilon_grid, pc.rejection_rate, d / "power_curve.png", alpha=args.alpha,
                               title=f"scenario {scenario.id}, n = {n}")
            files.append("power_curve.png")
        _write_meta(d, {"files": files, "log_scale_hint": {"x": False}, "scenario": scenario.id})


def cmd_oracle(args):
    _check_plot_flags(args)
    if args.scenario == "all":
        scenarios = list(builtin_scenarios().values())
    else:
        scenarios = [get_scenario(args.scenario)]
    rows = []
    for sc in scenarios:
        t0 = time.perf_counter()
        r = scenario_oracle(sc)
        a, b = sc.oriented()
        rev = oracle_index(b, a, sc.order)
        row = {"scenario": sc.id, "order": sc.order.value, "direction": sc.direction,
               "epsilon0": r.epsilon0, "epsilon0_reverse": rev.epsilon0, "signed": r.signed, "abs": r.abs,
               "crossings": list(r.crossings), "truncation_bound": r.truncation_bound,
               "degenerate": r.degenerate, "reference_mvr": sc.reference_mvr,
               "abs_error": None if sc.reference_mvr is None else abs(r.epsilon0 - sc.reference_mvr)}
        rows.append((row, time.perf_counter() - t0))
    if args.format == "csv":
        cols = ["scenario", "order", "direction", "epsilon0", "epsilon0_reverse", "reference_mvr", "abs_error"]
        aio.write_text(aio.csv_text([r for r, _ in rows], cols), args.out)
    else:
        # timings are left out of the document to keep it reproducible
        _emit(args, "oracle", {"scenario": args.scenario, "seed": None},
              {"scenarios": [r for r, _ in rows]})


def cmd_diagnose(args):
    _check_plot_flags(args)
    s1, s2, reports = load_pair(args)
    diag = tail_diagnostics(s1, s2, None, args.threshold)
    orders = {}
    for o in OrderKind:
        try:
            idx = index(s1, s2, o)
        except AlmostSDError as exc:
            orders[o.value] = {"error": {"category": exc.category, "message": str(exc)}}
            continue
        est = mvr(idx)
        orders[o.value] = {"index": _index_dict(idx), "epsilon_hat0": est.epsilon0, "degenerate": est.degenerate}
    result = {"ingest": reports,
              "tail": {"lambda21": list(diag.lambda21), "lambda42": list(diag.lambda42),
                       "tail_constant": diag.tail_constant, "truncation_ratio": diag.truncation_ratio,
                       "warnings": list(diag.warnings)},
              "orders": orders, "log_scale_hint": {"x": _log_hint(s1, s2, "first")}}
    config = {"threshold": args.threshold, "inputs": args.inputs, "column": args.column,
              "columns": args.columns, "order": args.order, "seed": None}
    _emit(args, "diagnose", config, result)


COMMANDS = {"index": cmd_index, "mvr": cmd_mvr, "test": cmd_test, "simulate": cmd_simulate,
            "oracle": cmd_oracle, "diagnose": cmd_diagnose}


def _fail(category: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": {"category": category, "message": message}}, sort_keys=True) + "\n")
    return EXIT_CODES.get(category, 1)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except AlmostSDError as exc:
        return _fail(exc.category, str(exc))
    except OSError as exc:
        return _fail("io", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
