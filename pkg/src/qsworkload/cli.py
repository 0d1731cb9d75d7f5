"""Command-line interface.

Exit codes: 0 success/pass, 1 input error, 2 assumption violation,
3 capability (method unavailable for the model), 4 verification failure,
5 insufficient data.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .closed_forms import closed_form_table
from .errors import AssumptionViolation, CapabilityError, InsufficientDataWarning, QsError
from .exponent_analysis import critical_points, resolve_side
from .laplace_inversion import InversionSpec, invert
from .levy_models import LevyModel, load_model, stationary_law
from .manifest import RunManifest
from .qs_transforms import (
    brownian_exact_tail,
    busy_period_tail,
    master_transform,
    qs_transform,
    tail_constant,
)
from .simulator import MIN_SURVIVORS, SimulationConfig, simulate
from .tables import DensityTable, parse_grid
from .verification import inverted_tail, refinement_study, verification_checks

EXIT_OK, EXIT_INPUT, EXIT_ASSUMPTION, EXIT_CAPABILITY, EXIT_VERIFY, EXIT_DATA = 0, 1, 2, 3, 4, 5

ANALYTICITY_NOTE = (
    "note: analytic continuation of the exponent around its minimum is assumed for the "
    "supported families, not checked numerically"
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _u64(text: str) -> int:
    value = int(text, 10)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(float(text)) if "e" in text.lower() else int(text, 10)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=float))
    else:
        print("\n".join(lines))


def _model_doc(model: LevyModel) -> dict:
    return model.to_dict()


def cmd_analyze(args) -> int:
    model = load_model(args.model)
    side = resolve_side(model, args.side)
    cp = critical_points(model, side)
    law = stationary_law(model)
    payload = {
        "model": _model_doc(model),
        "side": side.value,
        "theta_star": cp.theta_star,
        "zeta_star": cp.zeta_star,
        "k_star": cp.k_star,
        "phi_zero": cp.phi_zero,
        "psi_prime_zero": cp.psi_prime_zero,
        "mean_drift": model.mean_drift,
        "stationary": {"representation": law.representation, "rate": law.rate, "rho": law.rho},
        "checks": {"stability E X(1) < 0": True, "strictly negative minimum": True},
        "note": ANALYTICITY_NOTE,
    }
    lines = [
        f"model            {model.describe()}",
        f"side             {side.value}",
        f"theta*           {cp.theta_star:.12g}",
        f"zeta*            {cp.zeta_star:.12g}",
        f"k*               {cp.k_star:.12g}",
        f"Phi(0)           {cp.phi_zero:.12g}",
        f"psi'(0+)         {cp.psi_prime_zero:.12g}",
        f"E X(1)           {model.mean_drift:.12g}  (< 0: ok)",
        f"minimum < 0      ok",
        ANALYTICITY_NOTE,
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_transform(args) -> int:
    model = load_model(args.model)
    side = resolve_side(model, args.side)
    vt = complex(args.vartheta)
    vt = vt.real if vt.imag == 0 else vt
    value = complex(master_transform(model, vt, args.alpha, args.beta, side))
    pair = qs_transform(model, side)
    a, b = float(pair.a_factor(args.alpha)), float(pair.b_factor(args.beta))
    payload = {
        "model": _model_doc(model),
        "vartheta": [vt.real, vt.imag] if isinstance(vt, complex) else vt,
        "alpha": args.alpha,
        "beta": args.beta,
        "L": {"re": value.real, "im": value.imag},
        "qs_left": a,
        "qs_right": b,
        "qs_joint": a * b,
    }
    lines = [
        f"L({args.vartheta}; {args.alpha:g}, {args.beta:g}) = {value.real:.15g}{value.imag:+.15g}j",
        f"A(alpha={args.alpha:g}) = {a:.15g}",
        f"B(beta={args.beta:g})  = {b:.15g}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_tail(args) -> int:
    model = load_model(args.model)
    ts = _float_list(args.t)
    if not ts or any(not (math.isfinite(t) and t > 0) for t in ts):
        raise ValueError("--t needs positive times")
    side = resolve_side(model, args.side)
    asym = np.atleast_1d(busy_period_tail(model, ts, side))
    inv = inverted_tail(model, ts)
    exact = None
    if model.kind.value == "LinearBrownian" and model.drift == -1.0:
        exact = np.atleast_1d(brownian_exact_tail(model.sigma, ts))
    rows = []
    lines = [f"tail constant C = {tail_constant(model, side):.12g}", f"{'t':>8} {'asymptote':>16} {'inversion':>16} {'exact':>16}"]
    for i, t in enumerate(ts):
        ex = None if exact is None else float(exact[i])
        rows.append({"t": t, "asymptote": float(asym[i]), "inversion": float(inv[i]), "exact": ex})
        lines.append(f"{t:>8g} {asym[i]:>16.9e} {inv[i]:>16.9e} {'-' if ex is None else format(ex, '16.9e'):>16}")
    _emit(args, {"model": _model_doc(model), "rows": rows}, lines)
    return EXIT_OK


def _density_table(model: LevyModel, marginal: str, method: str, grid: np.ndarray) -> DensityTable:
    if method == "closed_form":
        return closed_form_table(model, marginal, grid)
    if marginal == "stationary":
        law = stationary_law(model)
        if law.atom > 0:
            raise CapabilityError("stationary law has an atom at 0 and no density")
        transform = law.transform
    else:
        pair = qs_transform(model)
        transform = pair.a_factor if marginal == "QS_left" else pair.b_factor
    meta = {"model": _model_doc(model), "marginal": marginal}
    return invert(InversionSpec(transform, 0.0, grid, meta=meta))


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def cmd_density(args) -> int:
    model = load_model(args.model)
    grid = parse_grid(args.grid)
    table = _density_table(model, args.marginal, args.method, grid)
    params = {"marginal": args.marginal, "method": args.method, "grid": args.grid}
    if args.out:
        out = Path(args.out)
        table.write_csv(out)
        man = RunManifest("density", _model_doc(model), params)
        man.add_output(out)
        man.write(_manifest_path(out))
    else:
        sys.stdout.write(table.to_csv())
    return EXIT_OK


def _sim_config(args, model: LevyModel) -> SimulationConfig:
    return SimulationConfig(model, args.t, args.paths, args.seed, args.dt, args.workers)


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    cfg = _sim_config(args, model)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InsufficientDataWarning)
        res = simulate(cfg)
    summary = res.summary()
    if args.out:
        out = Path(args.out)
        res.write_csv(out)
        side = res.write_summary(out.with_name(out.name + ".summary.json"))
        man = RunManifest("simulate", _model_doc(model), {"t": args.t, "paths": args.paths, "dt": args.dt}, args.seed)
        man.add_output(out)
        man.add_output(side)
        man.write(_manifest_path(out))
    lines = [f"{k:<18} {v}" for k, v in summary.items() if k != "model"]
    _emit(args, summary, lines)
    if res.n_survivors < MIN_SURVIVORS:
        print(f"warning: only {res.n_survivors} survivors (< {MIN_SURVIVORS})", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    model = load_model(args.model)
    cfg = _sim_config(args, model)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InsufficientDataWarning)
        res = simulate(cfg)
    summary = res.summary()
    if res.n_survivors < MIN_SURVIVORS:
        print(
            f"warning: insufficient data: {res.n_survivors} survivors of {res.n_total} paths "
            f"(need >= {MIN_SURVIVORS}); increase --paths or lower --t",
            file=sys.stderr,
        )
        if args.json:
            print(json.dumps({"summary": summary, "status": "insufficient_data"}, indent=2, default=float))
        return EXIT_DATA
    checks = verification_checks(res)
    ok = all(c.passed for c in checks)
    payload = {"summary": summary, "checks": [c.__dict__ for c in checks], "status": "pass" if ok else "fail"}
    lines = [
        f"survivors {res.n_survivors}/{res.n_total}  P(T>t)={res.survival_estimate:.6g} +- {res.std_error:.2g}",
        f"{'check':<34} {'value':>14}  {'target':<26} verdict",
    ]
    lines += [c.row() for c in checks]
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")
        man = RunManifest("verify", _model_doc(model), {"t": args.t, "paths": args.paths, "dt": args.dt}, args.seed)
        man.add_output(out)
        man.write(_manifest_path(out))
    _emit(args, payload, lines)
    if not ok:
        for c in checks:
            if not c.passed:
                print(f"FAILED: {c.row()}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_refine(args) -> int:
    model = load_model(args.model)
    ts = _float_list(args.t)
    if not ts:
        raise ValueError("--t needs at least one horizon")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InsufficientDataWarning)
        rows = refinement_study(model, ts, args.paths, args.seed, args.dt, args.workers)
    lines = [
        f"{'t':>6} {'survivors':>10} {'P(T>t)':>12} {'P dt/2':>12} {'KS Q0':>8} {'KS Qt':>8} {'corr':>8} {'mean Q0':>8} {'mean Qt':>8}"
    ]
    for r in rows:
        half = "-" if r.survival_half_dt is None else f"{r.survival_half_dt:.6g}"
        lines.append(
            f"{r.t:>6g} {r.n_survivors:>10d} {r.survival:>12.6g} {half:>12} {r.ks_q0:>8.4f} "
            f"{r.ks_qt:>8.4f} {r.corr:>8.4f} {r.mean_q0:>8.4f} {r.mean_qt:>8.4f}"
        )
    payload = {"model": _model_doc(model), "rows": [r.as_dict() for r in rows]}
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")
        man = RunManifest("refine", _model_doc(model), {"t": ts, "paths": args.paths, "dt": args.dt}, args.seed)
        man.add_output(out)
        man.write(_manifest_path(out))
    _emit(args, payload, lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qsworkload", description="Quasi-stationary workload toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, side=True):
        sp.add_argument("--model", required=True, help="JSON model document")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if side:
            sp.add_argument("--side", choices=("positive", "negative"), default=None)

    def sim(sp, t_type=float):
        sp.add_argument("--t", required=True, type=t_type)
        sp.add_argument("--paths", type=_positive_int, default=1_000_000)
        sp.add_argument("--seed", type=_u64, default=0)
        sp.add_argument("--dt", type=float, default=0.01)
        sp.add_argument("--workers", type=_positive_int, default=1)
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("analyze", help="critical points and assumption checks")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("transform", help="master and QS transforms at a point")
    common(sp)
    sp.add_argument("--vartheta", required=True, help="real or complex, e.g. 1 or 1+2j")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--beta", type=float, default=0.0)
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("tail", help="busy-period tail: asymptote, inversion, exact")
    common(sp)
    sp.add_argument("--t", required=True, help="comma-separated times")
    sp.set_defaults(func=cmd_tail)

    sp = sub.add_parser("density", help="tabulate a QS or stationary density")
    common(sp, side=False)
    sp.add_argument("--marginal", choices=("QS_left", "QS_right", "stationary"), required=True)
    sp.add_argument("--method", choices=("closed_form", "inversion"), required=True)
    sp.add_argument("--grid", required=True, help="lo:hi:n")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("simulate", help="conditioned Monte Carlo sample")
    common(sp, side=False)
    sim(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="simulation vs theory pass/fail table")
    common(sp, side=False)
    sim(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("refine", help="refinement study over horizons (and dt/2)")
    common(sp, side=False)
    sim(sp, t_type=str)
    sp.set_defaults(func=cmd_refine)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"error: {args.model}:{exc.lineno}:{exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_INPUT
    except AssumptionViolation as exc:
        print(f"assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except CapabilityError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (QsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
