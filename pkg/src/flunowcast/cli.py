"""Command-line front end for the nowcasting pipeline.

Exit codes: 0 success, 1 data error (structured error name printed),
2 usage error (argparse prints the grammar). Files are written only to
paths named in flags; stdout carries human-readable summaries.
"""

from __future__ import annotations

import argparse
import sys

from . import report, selection, synth
from .errors import DataError
from .ingest import parse_cases_csv, parse_trends_csv, write_cases_csv, write_trends_csv
from .regress import NowcastMode, evaluate, fit_ols, predict, rolling_weekly_fit
from .stats import SignificanceConfig
from .timeseries import ShiftSpec, WeekStamp


def _parse_shift_range(text: str) -> list[int]:
    """Parse '-2..2' (inclusive) or a comma list '-2,-1,0,1,2'."""
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
        if lo > hi:
            raise argparse.ArgumentTypeError(f"empty shift range {text!r}")
        return list(range(lo, hi + 1))
    return [int(p) for p in text.split(",")]


def _parse_triples(text: str) -> tuple[tuple[float, float, float], ...]:
    """Parse 'a:b:c[,a:b:c...]' into float triples."""
    out = []
    for part in text.split(","):
        a, b, c = part.split(":")
        out.append((float(a), float(b), float(c)))
    return tuple(out)


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def _load_inputs(args):
    cases = parse_cases_csv(_read(args.cases))
    panel = parse_trends_csv(_read(args.panel))
    return cases, panel


def _add_common(p, shift=False, shifts=False):
    p.add_argument("--cases", required=True, help="case-count CSV (week,cases)")
    p.add_argument("--panel", required=True, help="search-volume panel CSV")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    if shift:
        p.add_argument("--shift", type=int, default=0, help="week shift, -2..2")
    if shifts:
        p.add_argument("--shifts", type=_parse_shift_range, default=[-2, -1, 0, 1, 2],
                       help="shift range, e.g. -2..2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flunowcast",
        description="Search-query influenza nowcasting pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlate", help="per-query overall and annual correlations")
    _add_common(p, shift=True)
    p.add_argument("--out", required=True, help="output table CSV")
    p.add_argument("--sidecar", help="optional JSON sidecar with p-values and NA reasons")

    p = sub.add_parser("shift-scan", help="year x shift x query correlation grid")
    _add_common(p, shifts=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sidecar")

    p = sub.add_parser("select", help="greedy query-subset selection across shifts")
    _add_common(p, shifts=True)
    p.add_argument("--out", required=True, help="selection result JSON")

    p = sub.add_parser("fit", help="fit the model and report coefficient statistics")
    _add_common(p, shift=True)
    p.add_argument("--queries", help="comma-separated query subset (default: whole panel)")
    p.add_argument("--out", required=True, help="coefficient table CSV")

    p = sub.add_parser("nowcast", help="model estimates plus objective-by-shift table")
    _add_common(p, shifts=True)
    p.add_argument("--mode", choices=["full", "rolling"], default="full")
    p.add_argument("--warmup", type=int, help="rolling warmup weeks (default: queries + 4)")
    p.add_argument("--clamp", action="store_true", help="clamp negative estimates to zero")
    p.add_argument("--out-estimates", required=True, help="estimates + actual figure CSV")
    p.add_argument("--out-table", required=True, help="objective-by-shift table CSV")

    p = sub.add_parser("synth", help="generate a synthetic scenario as CSV fixtures")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--weeks", type=int, required=True)
    p.add_argument("--peaks", type=_parse_triples, required=True,
                   help="center:height:width[,center:height:width...]")
    p.add_argument("--lead", type=int, default=2)
    p.add_argument("--spikes", type=_parse_triples, default=(),
                   help="week:magnitude:decay[,...]")
    p.add_argument("--decay", type=float, default=1.0)
    p.add_argument("--noise-sd", type=float, default=0.0)
    p.add_argument("--signal-queries", type=int, default=3)
    p.add_argument("--noise-queries", type=int, default=0)
    p.add_argument("--start", type=WeekStamp.parse, default=synth.DEFAULT_START)
    p.add_argument("--out-cases", required=True)
    p.add_argument("--out-panel", required=True)

    p = sub.add_parser("report-fig", help="long-format figure data for cases + panel")
    p.add_argument("--cases", required=True)
    p.add_argument("--panel", required=True)
    p.add_argument("--out", required=True)

    return parser


def _cmd_correlate(args) -> int:
    cases, panel = _load_inputs(args)
    cfg = SignificanceConfig(args.alpha)
    table = report.table_overall_annual(panel, cases, cfg, ShiftSpec(args.shift))
    _write(args.out, table.to_csv())
    if args.sidecar:
        _write(args.sidecar, table.to_sidecar_json())
    print(f"correlate: {len(panel)} queries x {len(cases)} weeks -> {args.out}")
    return 0


def _cmd_shift_scan(args) -> int:
    cases, panel = _load_inputs(args)
    cfg = SignificanceConfig(args.alpha)
    table = report.table_shift_scan(panel, cases, tuple(args.shifts), cfg)
    _write(args.out, table.to_csv())
    if args.sidecar:
        _write(args.sidecar, table.to_sidecar_json())
    print(f"shift-scan: shifts {args.shifts} -> {args.out}")
    return 0


def _cmd_select(args) -> int:
    import json

    cases, panel = _load_inputs(args)
    cfg = SignificanceConfig(args.alpha)
    result = selection.greedy_select(panel, cases, [ShiftSpec(k) for k in args.shifts], cfg)
    payload = {
        "chosen": list(result.chosen_labels),
        "shift": result.best_shift.weeks,
        "objective": result.objective,
        "trace": [{"step": s, "added": l, "objective": o} for s, l, o in result.trace],
    }
    _write(args.out, (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8"))
    print(f"select: {len(result.chosen_labels)} queries at shift {result.best_shift.weeks:+d}, "
          f"objective {result.objective:.4f}")
    return 0


def _cmd_fit(args) -> int:
    cases, panel = _load_inputs(args)
    if args.queries:
        panel = panel.subset(args.queries.split(","))
    fit = fit_ols(panel, cases, ShiftSpec(args.shift), args.alpha)
    lines = ["term,estimate,std_error,ci_low,ci_high,p_value"]
    for name, c in [("(intercept)", fit.intercept)] + list(fit.coefficients):
        lines.append(f"{name},{c.estimate:.6g},{c.std_error:.6g},"
                     f"{c.ci_low:.6g},{c.ci_high:.6g},{c.p_value:.6g}")
    lines.append(f"# r_squared={fit.r_squared:.4f} residual_dof={fit.residual_dof} "
                 f"shift={fit.shift.weeks:+d}")
    _write(args.out, ("\n".join(lines) + "\n").encode("utf-8"))
    print(f"fit: {len(panel)} queries, r^2 {fit.r_squared:.4f} -> {args.out}")
    return 0


def _cmd_nowcast(args) -> int:
    cases, panel = _load_inputs(args)
    cfg = SignificanceConfig(args.alpha)
    sel = selection.greedy_select(panel, cases, [ShiftSpec(k) for k in args.shifts], cfg)
    sub = panel.subset(list(sel.chosen_labels))
    if args.mode == "rolling":
        estimates = rolling_weekly_fit(sub, cases, sel.best_shift,
                                       warmup=args.warmup, alpha=args.alpha,
                                       clamp_nonnegative=args.clamp)
    else:
        fit = fit_ols(sub, cases, sel.best_shift, args.alpha)
        estimates = predict(fit, sub, clamp_nonnegative=args.clamp,
                            mode=NowcastMode.FULL_PERIOD)
    ev = evaluate(estimates, cases, cfg)
    valid = estimates.valid_items()
    est_series = None
    if valid:
        from .timeseries import WeeklySeries

        est_series = WeeklySeries(valid[0][0], tuple(v for _, v in valid), "estimates")
    _write(args.out_estimates,
           report.figure_data(([est_series] if est_series else []) + [cases]))
    table = report.table_model_by_shift(panel, cases, sel, cfg, tuple(args.shifts))
    _write(args.out_table, table.to_csv())
    overall = "NA" if ev.overall.na else f"{ev.overall.r:.2f}"
    print(f"nowcast ({args.mode}): queries {','.join(sel.chosen_labels)} "
          f"shift {sel.best_shift.weeks:+d} overall r {overall}")
    return 0


def _cmd_synth(args) -> int:
    cfg = synth.ScenarioConfig(
        seed=args.seed,
        weeks=args.weeks,
        epidemic_peaks=args.peaks,
        lead_weeks=args.lead,
        media_spikes=tuple((int(w), m, d) for w, m, d in args.spikes),
        attention_decay=args.decay,
        noise_sd=args.noise_sd,
        n_signal_queries=args.signal_queries,
        n_noise_queries=args.noise_queries,
        start=args.start,
    )
    cases, panel = synth.generate(cfg)
    _write(args.out_cases, write_cases_csv(cases))
    _write(args.out_panel, write_trends_csv(panel))
    print(f"synth: seed {args.seed}, {args.weeks} weeks, "
          f"{len(panel)} queries -> {args.out_cases}, {args.out_panel}")
    return 0


def _cmd_report_fig(args) -> int:
    cases = parse_cases_csv(_read(args.cases))
    panel = parse_trends_csv(_read(args.panel))
    _write(args.out, report.figure_data([cases] + list(panel.series)))
    print(f"report-fig: {1 + len(panel)} series -> {args.out}")
    return 0


_COMMANDS = {
    "correlate": _cmd_correlate,
    "shift-scan": _cmd_shift_scan,
    "select": _cmd_select,
    "fit": _cmd_fit,
    "nowcast": _cmd_nowcast,
    "synth": _cmd_synth,
    "report-fig": _cmd_report_fig,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except (DataError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
