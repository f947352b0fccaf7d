"""Command-line front end: ``bobw-graphs {graph-info,run,sweep,validate,export}``.

Exit codes: 0 success, 2 unparseable input, 3 policy/graph incompatibility,
4 runtime failure inside a policy or solver.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

from . import config as cfgmod
from .errors import BadParameterError, BobwError, PolicyGraphMismatchError
from .graph import (
    DEFAULT_ALPHA_CAP,
    DominationDefinition,
    Observability,
    analyze_graph,
    classify_observability,
    independence_number,
    load_graph,
    weakly_dominating_set_exact,
    weakly_dominating_set_greedy,
)
from .harness import run_episode, sweep
from .harness.io import read_csv_rows, rows_to_csv, write_json, write_rows_csv, atomic_write_text
from .harness.sweep import ROW_COLUMNS, SUMMARY_COLUMNS, summarize_trace

EXIT_OK, EXIT_PARSE, EXIT_COMPAT, EXIT_RUNTIME = 0, 2, 3, 4
DELTA_CAP = 16


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _fail(exc: Exception) -> CliError:
    if isinstance(exc, PolicyGraphMismatchError):
        return CliError(f"incompatible policy and graph: {exc}", EXIT_COMPAT)
    if isinstance(exc, BadParameterError):
        return CliError(f"invalid input: {exc}", EXIT_PARSE)
    return CliError(f"runtime error ({type(exc).__name__}): {exc}", EXIT_RUNTIME)


# ---------------------------------------------------------------------------
# graph-info


def graph_report(spec, policy=None) -> dict:
    g = load_graph(spec)
    obs = classify_observability(g)
    report = {
        "spec": spec if isinstance(spec, str) else "custom",
        "num_arms": g.num_arms,
        "observability": obs.tag.value,
    }
    if not obs.is_observable:
        mode = "exact" if g.num_arms <= DEFAULT_ALPHA_CAP else "greedy"
        lo, hi = independence_number(g, mode)
        report.update(
            alpha={"lower": lo, "upper": hi, "exact": lo if mode == "exact" else None},
            unobserved=sorted(obs.unobserved_vertices),
        )
        if policy is not None:
            raise PolicyGraphMismatchError(f"graph is unobservable: {sorted(obs.unobserved_vertices)} are never observed")
        return report
    analysis = analyze_graph(g)
    report["alpha"] = {"lower": analysis.alpha_lower, "upper": analysis.alpha_upper, "exact": analysis.alpha_exact}
    if obs.tag is Observability.WEAKLY_OBSERVABLE:
        deltas = {}
        for definition in DominationDefinition:
            if g.num_arms <= DELTA_CAP:
                d = weakly_dominating_set_exact(g, definition, max_k=DELTA_CAP)
                deltas[definition.value] = {"delta": len(d), "exact": True, "set": sorted(d)}
            else:
                d = weakly_dominating_set_greedy(g, definition)
                deltas[definition.value] = {"delta": len(d), "exact": False, "set": sorted(d)}
        report.update(
            delta=deltas,
            dominating_set=sorted(analysis.dominating_set),
            v1=sorted(analysis.v1),
            v2=sorted(analysis.v2),
            k_prime=analysis.k_prime,
            alpha2=analysis.alpha2,
        )
    else:
        report.update(dominating_set=[], delta_targets=sorted(obs.weakly_observable_vertices))
    if policy is not None:
        _, resolved = cfgmod.make_policy(g, {"name": policy}, max(g.num_arms**3, 2))
        report["policy"] = resolved
    return report


def cmd_graph_info(args) -> int:
    try:
        report = graph_report(args.spec, args.policy)
    except BobwError as exc:
        raise _fail(exc) from exc
    text = json.dumps(report, indent=2)
    if args.out:
        atomic_write_text(Path(args.out), text + "\n")
    print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate / run / sweep


def _load_cells(args) -> list:
    doc = cfgmod.load_document(args.config)
    overrides = list(args.set or [])
    if getattr(args, "trace", None):
        overrides.append(f"run.trace={args.trace}")
    if getattr(args, "seed", None) is not None:
        overrides.append(f"run.seeds=[{args.seed}]")
    doc = cfgmod.apply_overrides(doc, overrides)
    return cfgmod.expand_document(doc), doc


def _resolve(cells) -> list:
    resolved = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for cell in cells:
            resolved.append(cfgmod.validate_config(cell))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return resolved


def cmd_validate(args) -> int:
    try:
        cells, _ = _load_cells(args)
        resolved = _resolve(cells)
    except BobwError as exc:
        raise _fail(exc) from exc
    out = [
        {"config_id": i, "label": c.label, "T": c.horizon, "seeds": list(c.seeds), "policy": r}
        for i, (c, r) in enumerate(zip(cells, resolved))
    ]
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _out_dir(args, cell) -> Path:
    return Path(args.out or cell.out or "results")


def _trace_rows(trace, level):
    cols = trace.columns()
    names = list(cols)
    if level == "full":
        for j in range(trace.num_arms):
            cols[f"q{j + 1}"] = trace.q[:, j]
            names.append(f"q{j + 1}")
        if trace.p is not None:
            for j in range(trace.num_arms):
                cols[f"p{j + 1}"] = trace.p[:, j]
                names.append(f"p{j + 1}")
    return names, [{n: cols[n][i] for n in names} for i in range(trace.horizon)]


def cmd_run(args) -> int:
    try:
        cells, doc = _load_cells(args)
        if len(cells) != 1:
            raise cfgmod.ConfigError(f"run expects one configuration; this one expands to {len(cells)} (use sweep)")
        resolved = _resolve(cells)[0]
    except BobwError as exc:
        raise _fail(exc) from exc
    cell = cells[0]
    out = _out_dir(args, cell)
    rows, traces = [], []
    try:
        for seed in cell.seeds:
            trace = run_episode(cell, seed)
            row = {"config_id": 0, "label": cell.label, "graph": cell.graph_spec, "policy": resolved["name"], "group": 0, "error": ""}
            row.update(summarize_trace(cell, trace))
            rows.append(row)
            traces.append(trace)
    except BobwError as exc:
        raise _fail(exc) from exc
    write_rows_csv(out / "results.csv", rows, ROW_COLUMNS)
    if cell.trace != "none":
        for trace in traces:
            names, trows = _trace_rows(trace, cell.trace)
            write_rows_csv(out / f"trace_seed{trace.seed}.csv", trows, names)
    summary = {
        "config": doc,
        "resolved_policy": resolved,
        "T": cell.horizon,
        "below_cubic_horizon": cell.below_cubic_horizon,
        "rows": rows,
    }
    write_json(out / "summary.json", summary)
    for row in rows:
        print(f"seed {row['seed']}: final_regret={row['final_regret']:.6g} ({row['regret_kind']}) Q={row['final_Q']:.6g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        cells, doc = _load_cells(args)
        resolved = _resolve(cells)
    except BobwError as exc:
        raise _fail(exc) from exc
    out = _out_dir(args, cells[0])
    result = sweep(cells, parallelism=max(1, args.jobs))
    write_rows_csv(out / "results.csv", result.rows, ROW_COLUMNS)
    summary = result.summary()
    write_rows_csv(out / "summary.csv", summary, SUMMARY_COLUMNS)
    write_json(out / "summary.json", {"config": doc, "resolved_policies": resolved, "summary": summary, "fits": result.fits})
    for s in summary:
        print(f"[{s['config_id']}] {s['label'] or s['graph']} T={s['T']}: {s['mean_regret']:.6g} +/- {s['stderr_regret']:.3g} (n={s['n']}, failed={s['n_failed']})")
    for g, fit in result.fits.items():
        print(f"slope[{fit['label'] or g}] = {fit['slope']:.4f}")
    failed = sum(1 for r in result.rows if r["error"])
    if failed:
        print(f"{failed} cell(s) failed; see the error column", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# export

PLOT_TEMPLATE = '''"""Regret against T with standard-error bars, read from {source}."""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

SOURCE = {source!r}
OUTPUT = sys.argv[1] if len(sys.argv) > 1 else "regret_vs_T.png"

series = defaultdict(list)
with open(SOURCE, newline="") as fh:
    for row in csv.DictReader(fh):
        series[row[{group!r}] or row[{graph!r}]].append(
            (float(row[{t!r}]), float(row[{mean!r}]), float(row[{err!r}] or 0.0))
        )

fig, ax = plt.subplots()
for name, pts in sorted(series.items()):
    pts.sort()
    xs, ys, es = zip(*pts)
    ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3, label=name)
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlabel("T")
ax.set_ylabel("mean regret")
ax.legend()
fig.savefig(OUTPUT, dpi=150)
'''


def _summary_from_rows(rows) -> list:
    from .harness.sweep import SweepResult

    typed = []
    for r in rows:
        typed.append(
            {
                **r,
                "config_id": int(r["config_id"]),
                "T": int(r["T"]),
                "final_regret": float(r["final_regret"]) if r["final_regret"] else math.nan,
                "final_Q": float(r["final_Q"]) if r["final_Q"] else math.nan,
                "error": r.get("error", ""),
            }
        )
    return SweepResult(typed).summary()


def cmd_export(args) -> int:
    path = Path(args.results)
    try:
        columns, rows = read_csv_rows(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from exc
    if not rows:
        raise CliError(f"{path} has no result rows; nothing to export", EXIT_PARSE)
    is_summary = "mean_regret" in columns
    needed = set(SUMMARY_COLUMNS[:6]) if is_summary else {"config_id", "seed", "T", "final_regret", "final_Q", "error"}
    missing = sorted(needed - set(columns))
    if missing:
        raise CliError(f"{path} lacks required column(s) {missing}", EXIT_PARSE)
    out = Path(args.out or path.parent)
    if args.format == "csv":
        summary = rows if is_summary else _summary_from_rows(rows)
        text = rows_to_csv(summary, SUMMARY_COLUMNS) if not is_summary else rows_to_csv(rows, columns)
        target = atomic_write_text(out / "summary_export.csv", text)
    else:
        source = path if is_summary else out / "summary_export.csv"
        if not is_summary:
            atomic_write_text(source, rows_to_csv(_summary_from_rows(rows), SUMMARY_COLUMNS))
        script = PLOT_TEMPLATE.format(
            source=str(source), group="label", graph="graph", t="T", mean="mean_regret", err="stderr_regret"
        )
        target = atomic_write_text(out / "plot_regret.py", script)
    print(f"wrote {target}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bobw-graphs", description="Best-of-both-worlds policies for online learning with feedback graphs.", epilog="exit codes: 0 ok, 2 parse error, 3 policy/graph incompatibility, 4 runtime failure")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph-info", help="observability, alpha, delta, D, V1, V2 of a graph")
    p.add_argument("spec", help='"family:K", "random:K:p:seed" or a JSON file')
    p.add_argument("--policy", choices=cfgmod.POLICY_NAMES, help="also resolve this policy's auto parameters")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_graph_info)

    def common(p, seed=True, trace=True):
        p.add_argument("--config", required=True, help="JSON configuration")
        p.add_argument("--set", action="append", metavar="PATH=VALUE", help="override a config entry (repeatable)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel episodes")
        if seed:
            p.add_argument("--seed", type=int, help="run only this seed")
        if trace:
            p.add_argument("--trace", choices=cfgmod.TRACE_LEVELS, help="per-round trace detail")

    p = sub.add_parser("run", help="run one configuration over its seeds")
    common(p)
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("sweep", help="run every cell of a configuration grid")
    common(p)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("validate", help="parse a configuration and resolve auto parameters")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("export", help="aggregate a results CSV or emit a plot script")
    p.add_argument("results", help="results.csv or summary.csv")
    p.add_argument("--format", choices=("csv", "plot-script"), default="csv")
    p.add_argument("--out", help="output directory (defaults to the results directory)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
