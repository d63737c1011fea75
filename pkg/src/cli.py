"""Command-line experiment runner"""
import argparse
import json
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .config import (
    DEFAULT_PADDING,
    DEFAULT_PICARD_STEPS,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    LOG_FORMAT,
    LOG_LEVEL,
    OUTPUT_DIR,
)
from .coeff_io import read_coeffs, write_coeffs
from .database import get_run_records, resolve_url, save_run_manifest
from .ensembles import make_rng, random_field
from .extremals import extremizer_ratio_closed_form, make_phi, phi_l4_exact_sum, strichartz_ratio
from .lattice import count_A_0, count_A_l_table, divisor_count, gamma_diag_counts, max_A_l
from .models import (
    Dealias,
    Ensemble,
    NumericalFailure,
    PicardConfig,
    RunManifest,
    SolverConfig,
    SymbolKind,
)
from .nls import evolve
from .picard import diagonal_quadrature_check, growth_experiment
from .plotting import plot_loglog, plot_trace
from .resonance import bilinear_sweep, galilean_check, resonance_decomposition, strichartz_sweep
from .result_formatter import (
    BILINEAR_COLUMNS,
    GALILEAN_COLUMNS,
    GROWTH_COLUMNS,
    LATTICE_COLUMNS,
    STRICHARTZ_COLUMNS,
    TRACE_COLUMNS,
    build_report_json,
    format_error,
    format_validation_errors,
    rows_as_dicts,
    write_csv,
    write_json,
)
from .validation import (
    sanity_check_agreement,
    sanity_check_growth,
    sanity_check_quadrature,
    sanity_check_trace,
    validate_lattice,
    validate_picard,
    validate_solver_config,
    validate_sweep,
)

logger = logging.getLogger(__name__)

# (summary, output paths, sanity check)
CommandResult = Tuple[Dict[str, Any], List[str], Optional[Dict[str, Any]]]


def parse_n_list(text: str) -> List[int]:
    """
    '8,16,32' -> [8, 16, 32]; '8..12' -> every integer 8..12; '8..512:x2' -> 8, 16, ..., 512
    """
    text = text.strip()
    try:
        if ".." in text:
            bounds, _, step = text.partition(":")
            lo, hi = (int(b) for b in bounds.split("..", 1))
            if lo < 1 or hi < lo:
                raise ValueError
            if not step:
                return list(range(lo, hi + 1))
            if step != "x2":
                raise ValueError
            values = []
            while lo <= hi:
                values.append(lo)
                lo *= 2
            return values
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid N list {text!r}; use 'a..b', 'a..b:x2' or 'a,b,c'")


def _require_valid(validation_result: Dict[str, Any]) -> None:
    for warning in validation_result.get("warnings", []):
        logger.warning(f"Validation warning: {warning}")
    if not validation_result["valid"]:
        print(json.dumps(format_validation_errors(validation_result), indent=2))
        raise ValueError("; ".join(validation_result["errors"]))


def _emit(args, name: str, rows: List[Dict[str, Any]], columns: List[str], summary: Dict[str, Any]) -> List[str]:
    """CSV plus JSON summary, or a single JSON holding the rows too"""
    if args.format == "csv":
        return [write_csv(os.path.join(args.run_dir, f"{name}.csv"), rows, columns)]
    summary["rows"] = rows
    return []


# -- commands -------------------------------------------------------------

def cmd_lattice(args) -> CommandResult:
    method = args.method
    bound = args.bound if args.bound is not None else min(args.n * args.n, 64)
    _require_valid(validate_lattice(args.n, bound, method))

    methods = ["brute", "divisor"] if method == "both" else [method]
    tables = {m: count_A_l_table(args.n, bound, m) for m in methods}
    levels = sorted(tables[methods[0]].counts)
    rows = [{"N": args.n, "l": l, "count": tables[m].counts[l], "method": m}
            for l in levels for m in methods]
    if method == "both":
        mismatched = [l for l in levels if tables["brute"].counts[l] != tables["divisor"].counts[l]]
        if mismatched:
            raise NumericalFailure(f"Brute and divisor counts disagree at levels {mismatched[:10]}")

    report = tables[methods[0]]
    summary: Dict[str, Any] = {
        "N": args.n,
        "level_bound": bound,
        "count_A_0": count_A_0(args.n),
        "argmax_level": report.argmax_level,
        "max_count": report.max_count,
        "oracles_agree": True if method == "both" else None,
    }
    if bound >= 1:
        level, count = max_A_l(args.n, args.n * args.n)
        summary["max_A_l_full_range"] = {
            "level": level,
            "count": count,
            "divisor_bound": 2 * divisor_count(level),
            "ratio_to_2d_4N2": count / (2 * divisor_count(4 * args.n * args.n)),
        }
    q = np.arange(-(args.n // 2), args.n // 2 + 1)
    summary["min_gamma_diag_half_range"] = int(gamma_diag_counts(args.n, q).min())

    outputs = _emit(args, "lattice", rows, LATTICE_COLUMNS, summary)
    return summary, outputs, None


def cmd_strichartz(args) -> CommandResult:
    _require_valid(validate_sweep(args.n, args.trials))
    report = strichartz_sweep(args.n, args.trials, args.seed, args.ensemble, args.symbol, args.threads)
    rows = rows_as_dicts(report.rows)
    summary = {
        "symbol": report.symbol.value,
        "slope": report.slope,
        "residual": report.residual,
        "extremizer_slope": report.extremizer_slope,
        "max_excess_over_extremizer": max(r.max_ratio / r.extremizer_ratio for r in report.rows),
    }
    outputs = _emit(args, "strichartz", rows, STRICHARTZ_COLUMNS, summary)
    outputs.append(plot_loglog(
        os.path.join(args.run_dir, "strichartz.svg"), [r.N for r in report.rows],
        {"max ratio": [r.max_ratio for r in report.rows],
         "extremizer": [r.extremizer_ratio for r in report.rows]},
        title=f"L4 Strichartz ratio ({report.symbol.value})", ylabel="ratio"))
    return summary, outputs, None


def cmd_bilinear(args) -> CommandResult:
    _require_valid(validate_sweep(args.n2, args.trials, needs_fit=False))
    report = bilinear_sweep(args.n1, args.n2, args.trials, args.seed, args.threads)
    summary = {"N1": args.n1, "max_ratio": report.max_ratio,
               "max_ratio_by_N2": {str(k): v for k, v in report.max_ratio_by_N2.items()}}
    outputs = _emit(args, "bilinear", rows_as_dicts(report.rows), BILINEAR_COLUMNS, summary)
    outputs.append(plot_loglog(
        os.path.join(args.run_dir, "bilinear.svg"), list(report.max_ratio_by_N2),
        {"max ratio": list(report.max_ratio_by_N2.values())},
        title=f"Bilinear ratio, N1={args.n1}", xlabel="N2", ylabel="ratio"))
    return summary, outputs, None


def cmd_extremizer(args) -> CommandResult:
    if args.n < 1:
        raise ValueError(f"N must be positive, got {args.n}")
    phi = make_phi(args.n)
    ratio = strichartz_ratio(phi, args.symbol, args.threads)
    closed = extremizer_ratio_closed_form(args.n)
    summary: Dict[str, Any] = {
        "N": args.n,
        "symbol": args.symbol.value,
        "ratio": ratio,
        "closed_form_ratio": closed,
        "l4_fourth_power": phi_l4_exact_sum(args.n),
    }
    sanity = None
    if args.symbol is SymbolKind.HYPERBOLIC:
        summary["relative_difference"] = abs(ratio - closed) / closed
        sanity = sanity_check_agreement(summary["relative_difference"], "Exact and closed-form extremizer ratio")
    if args.decompose:
        summary["decomposition"] = resonance_decomposition(phi, args.threads).model_dump()
    rows = [{k: summary[k] for k in ("N", "ratio", "closed_form_ratio")}]
    outputs = _emit(args, "extremizer", rows, ["N", "ratio", "closed_form_ratio"], summary)
    return summary, outputs, sanity


def cmd_picard(args) -> CommandResult:
    cfg = PicardConfig(mu=args.mu, t=args.t, s=args.s, quadrature_steps=args.steps)
    _require_valid(validate_picard(args.n, cfg))
    report = growth_experiment(args.n, cfg)
    sanity = sanity_check_growth(report)
    summary: Dict[str, Any] = {
        "slopes": report.slopes,
        "residuals": report.residuals,
        "expected_slope": 1.0 + args.s,
        "threshold_half": report.threshold_half,
        "threshold_quarter": report.threshold_quarter,
    }
    if args.quadrature_check:
        summary["quadrature_relative_gap"] = diagonal_quadrature_check(args.quadrature_check, cfg, args.threads)
        summary["quadrature_check"] = sanity_check_quadrature(summary["quadrature_relative_gap"])
    outputs = _emit(args, "picard", rows_as_dicts(report.rows), GROWTH_COLUMNS, summary)
    outputs.append(plot_loglog(
        os.path.join(args.run_dir, "picard.svg"), [r.N for r in report.rows],
        {"||A||_Hs": [r.hs_norm for r in report.rows],
         "||P_low A||_Hs": [r.projected_hs_norm for r in report.rows]},
        title=f"Picard iterate growth, s={args.s:g}, t={args.t:g}", ylabel="norm"))
    return summary, outputs, sanity


def cmd_nls(args) -> CommandResult:
    if args.input:
        u0 = read_coeffs(args.input)
    else:
        u0 = random_field(args.demo_n, Ensemble.UNIMODULAR, make_rng(args.seed, args.demo_n)).scaled(args.amplitude)
    cfg = SolverConfig(M=args.M, dt=args.dt, T_end=args.t_end, mu=args.mu, symbol=args.symbol,
                       record_every=args.record_every, s=args.s, dealias=args.dealias, padding=args.padding)
    _require_valid(validate_solver_config(cfg, u0))

    final, trace = evolve(u0, cfg)
    sanity = sanity_check_trace(trace, cfg)
    first, last = trace.records[0], trace.records[-1]
    summary = {
        "M": cfg.M,
        "steps": cfg.n_steps,
        "initial_mass": first.mass,
        "final_mass": last.mass,
        "initial_energy": first.energy,
        "final_energy": last.energy,
        "truncated_mass": last.truncated_mass,
    }
    outputs = _emit(args, "trace", rows_as_dicts(trace.records), TRACE_COLUMNS, summary)
    outputs.append(write_coeffs(os.path.join(args.run_dir, "final_state.txt"), final,
                                comment=f"nls final state at t={cfg.T_end:g}"))
    outputs.append(plot_trace(os.path.join(args.run_dir, "trace.svg"), trace))
    return summary, outputs, sanity


def cmd_galilean(args) -> CommandResult:
    rows = galilean_check(args.n, args.pairs, args.seed, args.shift_range, args.threads)
    summary = {"N": args.n, "pairs": args.pairs,
               "max_relative_difference": max((r.relative_difference for r in rows), default=0.0)}
    outputs = _emit(args, "galilean", rows_as_dicts(rows), GALILEAN_COLUMNS, summary)
    return summary, outputs, sanity_check_agreement(summary["max_relative_difference"], "Original and recentred L^4 norms")


def cmd_runs(args) -> int:
    result = get_run_records(resolve_url(args.out), args.page, args.per_page, args.command_filter)
    print(json.dumps(result, indent=2))
    return EXIT_OK


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyplab", description="Hyperbolic Schrödinger laboratory on T^2")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--threads", type=int, default=DEFAULT_THREADS)
    common.add_argument("--out", default=OUTPUT_DIR, help="output directory")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", parents=[common], help="count A_l by brute force and divisors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=int, default=None, help="levels |l| <= bound (default min(N^2, 64))")
    p.add_argument("--method", choices=["brute", "divisor", "both"], default="both")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("strichartz", parents=[common], help="L4 Strichartz ratio sweep")
    p.add_argument("--n", type=parse_n_list, default=parse_n_list("8..64"))
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--ensemble", type=Ensemble, choices=list(Ensemble), default=Ensemble.UNIMODULAR)
    p.add_argument("--symbol", type=SymbolKind, choices=list(SymbolKind), default=SymbolKind.HYPERBOLIC)
    p.set_defaults(func=cmd_strichartz)

    p = sub.add_parser("bilinear", parents=[common], help="dyadic bilinear estimate sweep")
    p.add_argument("--n1", type=int, default=64)
    p.add_argument("--n2", type=parse_n_list, default=parse_n_list("2..32:x2"))
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_bilinear)

    p = sub.add_parser("extremizer", parents=[common], help="Strichartz ratio of the diagonal family")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--symbol", type=SymbolKind, choices=list(SymbolKind), default=SymbolKind.HYPERBOLIC)
    p.add_argument("--decompose", action="store_true", help="also report the resonant/off-resonant split")
    p.set_defaults(func=cmd_extremizer)

    p = sub.add_parser("picard", parents=[common], help="H^s growth of the first Picard iterate")
    p.add_argument("--n", type=parse_n_list, default=parse_n_list("8..512"))
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=DEFAULT_PICARD_STEPS)
    p.add_argument("--quadrature-check", type=int, default=0, metavar="N",
                   help="compare quadrature and closed form on phi_N")
    p.set_defaults(func=cmd_picard)

    p = sub.add_parser("nls", parents=[common], help="split-step evolution of the cubic NLS")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--input", help="coefficient file with the initial data")
    source.add_argument("--demo-n", type=int, default=4)
    p.add_argument("--amplitude", type=float, default=0.1)
    p.add_argument("--M", type=int, default=64)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--symbol", type=SymbolKind, choices=list(SymbolKind), default=SymbolKind.HYPERBOLIC)
    p.add_argument("--record-every", type=int, default=10)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--dealias", type=Dealias, choices=list(Dealias), default=Dealias.PADDED)
    p.add_argument("--padding", type=float, default=DEFAULT_PADDING)
    p.set_defaults(func=cmd_nls)

    p = sub.add_parser("galilean-check", parents=[common], help="L4 invariance under recentering")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--shift-range", type=int, default=64)
    p.set_defaults(func=cmd_galilean)

    p = sub.add_parser("runs", help="list recorded runs")
    p.add_argument("--out", default=OUTPUT_DIR)
    p.add_argument("--page", type=int, default=1)
    p.add_argument("--per-page", type=int, default=20)
    p.add_argument("--command", dest="command_filter", default=None)
    p.set_defaults(func=None)
    return parser


def _parameters(args) -> Dict[str, Any]:
    skip = {"func", "run_dir", "command"}
    return {k: (v.value if hasattr(v, "value") else v) for k, v in vars(args).items() if k not in skip}


def run_command(args, func: Callable[[Any], CommandResult]) -> int:
    """Run one command, write summary and manifest, record the run; returns the exit code"""
    logger.info(f"Command '{args.command}' called")
    args.run_dir = os.path.join(args.out, args.command)
    manifest = RunManifest(command=args.command, parameters=_parameters(args), seed=args.seed)
    exit_code = EXIT_OK

    try:
        summary, outputs, sanity = func(args)
        report = build_report_json(args.command, summary, manifest, sanity)
        outputs.insert(0, write_json(os.path.join(args.run_dir, f"{args.command}_summary.json"), report))
        manifest.outputs = outputs
        if sanity:
            logger.info(f"Sanity check: {sanity['status']} - {sanity['diagnostic']}")
    except NumericalFailure as e:
        logger.error(f"Numerical failure: {e}", exc_info=True)
        print(json.dumps(format_error(str(e), "numerical_error"), indent=2))
        manifest.status, exit_code = "numerical_failure", EXIT_NUMERICAL
    except (ValueError, OSError) as e:
        logger.error(f"Validation error: {e}", exc_info=True)
        print(json.dumps(format_error(str(e), "validation_error"), indent=2))
        manifest.status, exit_code = "validation_error", EXIT_VALIDATION

    manifest.outputs.append(write_json(os.path.join(args.run_dir, "manifest.json"), manifest.model_dump(mode="json")))

    # Don't fail the run if the ledger is unavailable
    try:
        save_run_manifest(manifest, resolve_url(args.out))
    except Exception as db_error:
        logger.error(f"Failed to record run in ledger: {db_error}")

    logger.info(f"Command '{args.command}' finished with status {manifest.status}")
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
    args = build_parser().parse_args(argv)
    if args.command == "runs":
        try:
            return cmd_runs(args)
        except ValueError as e:
            print(json.dumps(format_error(str(e), "validation_error"), indent=2))
            return EXIT_VALIDATION
    return run_command(args, args.func)


if __name__ == "__main__":
    sys.exit(main())
