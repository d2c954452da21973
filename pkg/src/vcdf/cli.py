"""Command-line experiment harness: generation, discovery, evaluation, benchmarks.

Every run is reproducible from a single master seed: each task derives its own
seed as the first 8 bytes of sha256("<seed>:<task name>"), and realization i
within a task adds i to the task seed.

Exit codes: 0 success, 2 usage or input parsing failure, 3 computation failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .consensus import VcdfConfig, run_vcdf, stability_report_to_json
from .discovery import DISCOVERERS, DiscovererConfig, make_discoverer
from .evaluation import F1Result, aggregate, summary_f1, window_f1
from .series import (
    MultivariateSeries,
    WindowGraph,
    graph_to_json,
    read_graph_json,
    read_series_csv,
    write_graph_json,
    write_series_csv,
)
from .synthetic import (
    DEFAULT_BURN_IN,
    DEFAULT_DENSITY,
    DEFAULT_MAX_LAG,
    SETTINGS,
    benchmark_suite,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTE = 3

BENCH_PRESETS = ("characteristics", "lengths", "runtime")
METHOD_IDS = ("varlingam", "lagreg", "vcdf-varlingam", "vcdf-lagreg")

PAPER_SCALE_N = 15


class UsageError(Exception):
    """Bad arguments, configs or unreadable/malformed inputs (exit code 2)."""


def derive_seed(master: int, task: str) -> int:
    digest = hashlib.sha256(f"{master}:{task}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _load_config_file(path: str, allowed: set[str]) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path}: malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError(f"config file {path}: top level must be an object")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise UsageError(f"config file {path}: unknown keys: {', '.join(unknown)}")
    return doc


def _resolve(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config and config[key] is not None:
        return config[key]
    return default


def _discoverer_config(args, config: dict) -> DiscovererConfig:
    sub = config.get("discoverer", {})
    if not isinstance(sub, dict):
        raise UsageError("config key 'discoverer' must be an object")
    try:
        return DiscovererConfig(
            max_lag=int(_resolve(args.max_lag, sub, "max_lag", DEFAULT_MAX_LAG)),
            prune_threshold=float(_resolve(args.prune, sub, "prune_threshold", 0.05)),
            alpha=float(_resolve(getattr(args, "alpha", None), sub, "alpha", 0.01)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _vcdf_config(args, config: dict) -> VcdfConfig:
    sub = config.get("vcdf", {})
    if not isinstance(sub, dict):
        raise UsageError("config key 'vcdf' must be an object")
    try:
        return VcdfConfig(
            k=int(_resolve(args.k, sub, "k", 5)),
            tau_c=float(_resolve(args.tau_c, sub, "tau_c", 0.4)),
            tau_v=float(_resolve(args.tau_v, sub, "tau_v", 0.4)),
            w=float(_resolve(args.w, sub, "w", 0.0)),
            epsilon=float(_resolve(getattr(args, "epsilon", None), sub, "epsilon", 1e-8)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    config = _load_config_file(args.config, {"setting", "n", "T", "realizations", "seed", "out",
                                             "max_lag", "density", "burn_in"}) if args.config else {}
    setting = _resolve(args.setting, config, "setting", None)
    if setting is None:
        raise UsageError("generate requires --setting (or 'setting' in --config)")
    if setting not in SETTINGS:
        raise UsageError(f"unknown setting {setting!r}, expected one of {', '.join(SETTINGS)}")
    n = int(_resolve(args.n, config, "n", PAPER_SCALE_N))
    T = int(_resolve(args.T, config, "T", 1000))
    realizations = int(_resolve(args.realizations, config, "realizations", 10))
    seed = int(_resolve(args.seed, config, "seed", 0))
    out = _resolve(args.out, config, "out", None)
    if out is None:
        raise UsageError("generate requires --out (or 'out' in --config)")
    max_lag = int(_resolve(args.max_lag, config, "max_lag", DEFAULT_MAX_LAG))
    density = float(_resolve(args.density, config, "density", DEFAULT_DENSITY))
    burn_in = int(_resolve(args.burn_in, config, "burn_in", DEFAULT_BURN_IN))

    task = f"generate:{setting}"
    suite_seed = derive_seed(seed, task)
    try:
        suite = benchmark_suite(setting, n, T, realizations, suite_seed,
                                max_lag=max_lag, density=density, burn_in=burn_in)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, ds in enumerate(suite):
        series_name = f"series_{i:03d}.csv"
        truth_name = f"truth_{i:03d}.json"
        write_series_csv(ds.series, out_dir / series_name)
        write_graph_json(ds.truth, out_dir / truth_name)
        entries.append({"index": i, "scm_seed": suite_seed + i,
                        "series_csv": series_name, "truth_json": truth_name})
    manifest = {
        "setting": setting, "n": n, "T": T, "realizations": realizations,
        "seed": seed, "task": task, "suite_seed": suite_seed,
        "max_lag": max_lag, "density": density, "burn_in": burn_in,
        "datasets": entries,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")
    print(f"wrote {len(suite)} datasets to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# discover
# ---------------------------------------------------------------------------

def cmd_discover(args) -> int:
    config = _load_config_file(args.config, {"method", "vcdf", "discoverer", "out"}) if args.config else {}
    method = _resolve(args.method, config, "method", "varlingam")
    if method not in DISCOVERERS:
        raise UsageError(f"unknown method {method!r}, expected one of {', '.join(sorted(DISCOVERERS))}")
    disc_config = _discoverer_config(args, config)
    use_vcdf = bool(args.vcdf or config.get("vcdf"))
    vcdf_config = _vcdf_config(args, config) if use_vcdf else None
    out = _resolve(args.out, config, "out", None)
    if out is None:
        raise UsageError("discover requires --out (or 'out' in --config)")

    # Load and validate every input before producing any output file.
    try:
        series = read_series_csv(args.series)
    except FileNotFoundError:
        raise UsageError(f"series file not found: {args.series}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    truth = None
    if args.truth:
        try:
            truth = read_graph_json(args.truth)
        except FileNotFoundError:
            raise UsageError(f"truth file not found: {args.truth}") from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    base = make_discoverer(method, disc_config)
    started = time.perf_counter()
    try:
        if vcdf_config is not None:
            graph, report = run_vcdf(series, base, vcdf_config)
        else:
            graph, report = base.discover(series), None
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    seconds = time.perf_counter() - started

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.series).stem
    write_graph_json(graph, out_dir / f"{stem}.graph.json")
    written = [f"{stem}.graph.json"]
    if report is not None:
        (out_dir / f"{stem}.stability.json").write_text(
            stability_report_to_json(report) + "\n", encoding="utf-8")
        written.append(f"{stem}.stability.json")
    if truth is not None:
        metrics = _metrics_doc(graph, truth)
        (out_dir / f"{stem}.metrics.json").write_text(
            json.dumps(metrics, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(f"{stem}.metrics.json")
    meta = {
        "input": str(args.series),
        "method": method,
        "vcdf": asdict(vcdf_config) if vcdf_config is not None else None,
        "discoverer": asdict(disc_config),
        "seconds": seconds,
        "edges": len(graph.edges),
    }
    (out_dir / f"{stem}.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(f"{stem}.meta.json")
    print(f"wrote {', '.join(written)} to {out_dir}")
    return EXIT_OK


def _f1_doc(result: F1Result) -> dict:
    return {
        "p": result.precision, "r": result.recall, "f1": result.f1,
        "tp": result.true_positives, "fp": result.false_positives, "fn": result.false_negatives,
    }


def _metrics_doc(predicted: WindowGraph, truth: WindowGraph) -> dict:
    truth_has_lag0 = any(e.lag == 0 for e in truth.edges)
    return {
        "window": _f1_doc(window_f1(predicted, truth)),
        "summary": _f1_doc(summary_f1(predicted, truth)),
        "window_counts_lag0": truth_has_lag0,
    }


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def cmd_evaluate(args) -> int:
    try:
        predicted = read_graph_json(args.graph)
        truth = read_graph_json(args.truth)
    except FileNotFoundError as exc:
        raise UsageError(f"graph file not found: {exc.filename}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        metrics = _metrics_doc(predicted, truth)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = json.dumps(metrics, indent=2, sort_keys=True)
    print(text)
    if args.out:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _bench_grid(preset: str, setting_override: str | None) -> list[tuple[str, int, str]]:
    """(setting, T, method) cells; datasets are shared between methods of a cell."""
    if preset == "characteristics":
        settings = [setting_override] if setting_override else list(SETTINGS)
        return [(s, 1000, m) for s in settings
                for m in ("varlingam", "vcdf-varlingam", "lagreg", "vcdf-lagreg")]
    if preset == "lengths":
        setting = setting_override or "trended"
        return [(setting, T, m) for T in (250, 1000, 2000)
                for m in ("varlingam", "vcdf-varlingam", "lagreg", "vcdf-lagreg")]
    if preset == "runtime":
        setting = setting_override or "linear"
        return [(setting, T, m) for T in (250, 500, 1000, 2000)
                for m in ("varlingam", "vcdf-varlingam")]
    raise UsageError(f"unknown preset {preset!r}, expected one of {', '.join(BENCH_PRESETS)}")


def _split_method(method: str) -> tuple[str, bool]:
    if method.startswith("vcdf-"):
        return method[len("vcdf-"):], True
    return method, False


def cmd_bench(args) -> int:
    if args.preset not in BENCH_PRESETS:
        raise UsageError(f"unknown preset {args.preset!r}, expected one of {', '.join(BENCH_PRESETS)}")
    n = args.n if args.n is not None else PAPER_SCALE_N
    if n != PAPER_SCALE_N:
        print(f"warning: running with n={n} instead of the reference scale n={PAPER_SCALE_N}; "
              f"absolute levels will not be comparable", file=sys.stderr)
    realizations = args.realizations if args.realizations is not None else (5 if args.preset == "runtime" else 10)
    disc_config = _discoverer_config(args, {})
    vcdf_config = _vcdf_config(args, {})
    grid = _bench_grid(args.preset, args.setting)

    suites: dict[tuple[str, int], list] = {}
    rows = []
    try:
        for setting, T, method in grid:
            cell = (setting, T)
            if cell not in suites:
                task_seed = derive_seed(args.seed, f"bench:{args.preset}:{setting}:T={T}")
                suites[cell] = (task_seed, benchmark_suite(setting, n, T, realizations, task_seed))
            suite_seed, suite = suites[cell]
            base_id, wrapped = _split_method(method)
            base = make_discoverer(base_id, disc_config)
            window_results, summary_results, seconds = [], [], []
            for ds in suite:
                t0 = time.perf_counter()
                if wrapped:
                    graph, _ = run_vcdf(ds.series, base, vcdf_config)
                else:
                    graph = base.discover(ds.series)
                seconds.append(time.perf_counter() - t0)
                window_results.append(window_f1(graph, ds.truth))
                summary_results.append(summary_f1(graph, ds.truth))
            window_stats = aggregate(window_results)
            summary_stats = aggregate(summary_results)
            rows.append({
                "setting": setting, "T": T, "method": method,
                "window": _stats_doc(window_stats), "summary": _stats_doc(summary_stats),
                "seconds_mean": sum(seconds) / len(seconds),
                "suite_seed": suite_seed,
            })
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    report = {
        "preset": args.preset, "n": n, "realizations": realizations, "seed": args.seed,
        "discoverer": asdict(disc_config), "vcdf": asdict(vcdf_config),
        "rows": rows,
    }
    table = render_bench_table(report)
    print(table, end="")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                             encoding="utf-8")
        (out_dir / "table.txt").write_text(table, encoding="utf-8")
        print(f"wrote report.json, table.txt to {out_dir}")
    return EXIT_OK


def _stats_doc(stats) -> dict:
    return {
        "precision_mean": stats.precision_mean, "precision_std": stats.precision_std,
        "recall_mean": stats.recall_mean, "recall_std": stats.recall_std,
        "f1_mean": stats.f1_mean, "f1_std": stats.f1_std,
        "count": stats.count,
    }


def render_bench_table(report: dict) -> str:
    """Fixed-width table derived purely from the report document."""
    headers = ["setting", "T", "method", "window F1", "summary F1", "seconds"]
    lines = []
    for row in report["rows"]:
        lines.append([
            str(row["setting"]),
            str(row["T"]),
            str(row["method"]),
            "%.3f +- %.3f" % (row["window"]["f1_mean"], row["window"]["f1_std"]),
            "%.3f +- %.3f" % (row["summary"]["f1_mean"], row["summary"]["f1_std"]),
            "%.3f" % row["seconds_mean"],
        ])
    widths = [max(len(headers[c]), max((len(line[c]) for line in lines), default=0))
              for c in range(len(headers))]
    def fmt(cells):
        return "  ".join(cell.ljust(widths[c]) for c, cell in enumerate(cells)).rstrip()
    out = [fmt(headers), fmt(["-" * w for w in widths])]
    out.extend(fmt(line) for line in lines)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vcdf",
        description="Consensus-validated time-series causal discovery experiments.",
        epilog="Per-task seeds derive as sha256('<seed>:<task>')[:8]; realization i adds i.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a labeled synthetic dataset suite")
    gen.add_argument("--config", help="JSON experiment config; flags override its values")
    gen.add_argument("--setting", choices=SETTINGS)
    gen.add_argument("--n", type=int, help="number of variables (default 15)")
    gen.add_argument("--T", type=int, help="steps per series (default 1000)")
    gen.add_argument("--realizations", type=int, help="independent systems (default 10)")
    gen.add_argument("--seed", type=int, help="master seed (default 0)")
    gen.add_argument("--out", help="output directory")
    gen.add_argument("--max-lag", type=int, dest="max_lag")
    gen.add_argument("--density", type=float)
    gen.add_argument("--burn-in", type=int, dest="burn_in")
    gen.set_defaults(handler=cmd_generate)

    dis = sub.add_parser("discover", help="estimate a causal graph from a series CSV")
    dis.add_argument("series", help="input series CSV")
    dis.add_argument("--config", help="JSON experiment config; flags override its values")
    dis.add_argument("--method", choices=sorted(DISCOVERERS))
    dis.add_argument("--max-lag", type=int, dest="max_lag")
    dis.add_argument("--prune", type=float, help="absolute weight threshold (default 0.05)")
    dis.add_argument("--alpha", type=float, help="lagreg significance level (default 0.01)")
    dis.add_argument("--vcdf", action="store_true", help="wrap the method in stability filtering")
    dis.add_argument("--k", type=int, help="fold count (default 5)")
    dis.add_argument("--tau-c", type=float, dest="tau_c", help="consistency threshold (default 0.4)")
    dis.add_argument("--tau-v", type=float, dest="tau_v", help="variability threshold (default 0.4)")
    dis.add_argument("--w", type=float, help="fold-mean refinement weight (default 0)")
    dis.add_argument("--epsilon", type=float, help="variability regularizer (default 1e-8)")
    dis.add_argument("--truth", help="truth graph JSON; adds a metrics file")
    dis.add_argument("--out", help="output directory")
    dis.set_defaults(handler=cmd_discover)

    ev = sub.add_parser("evaluate", help="score a predicted graph against a truth graph")
    ev.add_argument("graph", help="predicted graph JSON")
    ev.add_argument("truth", help="truth graph JSON")
    ev.add_argument("--out", help="also write the metrics JSON here")
    ev.set_defaults(handler=cmd_evaluate)

    ben = sub.add_parser("bench", help="run a preset benchmark grid")
    ben.add_argument("preset", choices=BENCH_PRESETS)
    ben.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    ben.add_argument("--out", help="directory for report.json and table.txt")
    ben.add_argument("--n", type=int, help="variables per system (warns when not 15)")
    ben.add_argument("--realizations", type=int, help="datasets per cell (default 10; runtime preset 5)")
    ben.add_argument("--setting", choices=SETTINGS, help="override the preset's setting")
    ben.add_argument("--max-lag", type=int, dest="max_lag")
    ben.add_argument("--prune", type=float)
    ben.add_argument("--alpha", type=float)
    ben.add_argument("--k", type=int)
    ben.add_argument("--tau-c", type=float, dest="tau_c")
    ben.add_argument("--tau-v", type=float, dest="tau_v")
    ben.add_argument("--w", type=float)
    ben.add_argument("--epsilon", type=float)
    ben.set_defaults(handler=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
