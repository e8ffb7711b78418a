"""Command-line harness: coefficient dumps, symbol certificates, runs, sweeps.

    fracsav coeffs       --alpha 0.5 --n-max 512 --out coeffs.csv
    fracsav symbol-check --alpha 0.05:1.0:0.05 --grid 8192 --out certs.json
    fracsav solve        --alpha 0.8 --tau 0.01 --t-final 1 --mode unforced --out run/
    fracsav convergence  --alpha 0.4,0.6,0.8 --tau 1/200,1/300,1/400,1/500 --out sweep/

Exit codes: 0 success, 1 usage error, 2 numerical failure (relaxation
breakdown or a failed stability/positivity verdict).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .allen_cahn import manufactured_problem, unforced_problem
from .cq_weights import frac_weights
from .legendre import build_space, eval_at_nodes
from .multipliers import q_weights, verify_positive_real
from .reporting import (
    emit_plot_script,
    render_convergence_figure,
    render_solution_figure,
    write_certificates_json,
    write_convergence_csv,
    write_csv,
    write_diagnostics_csv,
    write_field_csv,
)
from .stepper import RelaxationBreakdownError, run

__all__ = ["ConvergenceReport", "RunConfig", "main"]

USAGE_ERROR = 1
NUMERICAL_ERROR = 2

MODES = ("unforced", "manufactured")
CONFIG_KEYS = ("alpha", "n_modes", "tau", "t_final", "mode", "c0_shift")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """One solver run; command-line values win over config-file values."""

    alpha: float
    tau: float
    t_final: float = 1.0
    n_modes: int = 50
    mode: str = "unforced"
    c0_shift: float = 0.0
    output_dir: Path = Path(".")

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise UsageError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.tau <= 0.0:
            raise UsageError(f"tau must be positive, got {self.tau}")
        if self.t_final < self.tau:
            raise UsageError(
                f"t_final ({self.t_final}) must be at least tau ({self.tau})"
            )
        if self.n_modes < 1:
            raise UsageError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.c0_shift < 0.0:
            raise UsageError(f"c0_shift must be >= 0, got {self.c0_shift}")

    def build_problem(self):
        space = build_space(self.n_modes)
        if self.mode == "manufactured":
            return manufactured_problem(space, self.alpha, self.c0_shift)
        return unforced_problem(space, self.alpha, self.c0_shift)


@dataclass(frozen=True)
class ConvergenceReport:
    """Rows (tau, linf_error, linf_rate, l2_error, l2_rate) for one alpha."""

    alpha: float
    rows: tuple


def observed_rates(taus, errors):
    """rate_i = log(e_{i-1}/e_i) / log(tau_{i-1}/tau_i); None for the first row."""
    rates = [None]
    for i in range(1, len(errors)):
        rates.append(
            math.log(errors[i - 1] / errors[i]) / math.log(taus[i - 1] / taus[i])
        )
    return rates


def _parse_float(token):
    """Accept plain floats and fractions such as 1/200."""
    token = token.strip()
    if "/" in token:
        num, den = token.split("/", 1)
        return float(num) / float(den)
    return float(token)


def _parse_float_list(text):
    """Comma list of floats, or start:stop:step expansions like 0.05:1.0:0.05."""
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token:
            start, stop, step = (float(t) for t in token.split(":"))
            count = int(round((stop - start) / step))
            values.extend(round(start + i * step, 12) for i in range(count + 1))
        else:
            values.append(_parse_float(token))
    if not values:
        raise UsageError(f"empty value list: {text!r}")
    return values


def read_config_file(path):
    """Flat key = value file; # starts a comment, unknown keys are rejected."""
    entries = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        entries[key] = value
    return entries


def _resolve_config(args):
    file_entries = read_config_file(args.config) if args.config else {}

    def pick(cli_value, key, cast, default):
        if cli_value is not None:
            return cli_value
        if key in file_entries:
            try:
                return cast(file_entries[key])
            except ValueError as exc:
                raise UsageError(f"bad config value for {key}: {exc}") from exc
        return default

    alpha = pick(args.alpha, "alpha", _parse_float, None)
    tau = pick(args.tau, "tau", _parse_float, None)
    if alpha is None or tau is None:
        raise UsageError("alpha and tau are required (flag or config file)")
    return RunConfig(
        alpha=alpha,
        tau=tau,
        t_final=pick(args.t_final, "t_final", _parse_float, 1.0),
        n_modes=pick(args.modes, "n_modes", int, 50),
        mode=pick(args.mode, "mode", str, "unforced"),
        c0_shift=pick(args.c0_shift, "c0_shift", _parse_float, 0.0),
        output_dir=Path(args.out),
    )


def cmd_coeffs(args):
    alpha = _parse_float(args.alpha)
    weights = frac_weights(alpha, args.n_max)
    screened = q_weights(alpha, args.n_max, weights)
    out = Path(args.out)
    write_csv(
        out,
        ["j", "g_j", "q_j"],
        zip(range(args.n_max + 1), weights.g.tolist(), screened.q.tolist()),
    )
    print(f"wrote {args.n_max + 1} weight rows to {out}")
    return 0


def cmd_symbol_check(args):
    alphas = _parse_float_list(args.alpha)
    certificates = [verify_positive_real(a, args.grid) for a in alphas]
    out = Path(args.out)
    write_certificates_json(out, certificates)
    for cert in certificates:
        status = "PASS" if cert.passed else "FAIL"
        print(
            f"alpha={cert.alpha:.4g}: min Re={cert.min_real_part:+.3e} "
            f"max delta={cert.max_delta:.6f} at x={cert.argmax_x:.6f} [{status}]"
        )
    print(f"wrote {len(certificates)} certificates to {out}")
    if not all(c.passed for c in certificates):
        return NUMERICAL_ERROR
    return 0


def _stability_verdict(diagnostics):
    slack = 1e-14
    r_values = [d.r for d in diagnostics]
    negative_k_steps = [d.n for d in diagnostics if d.K_bar < 0.0]
    monotone = True
    previous = None
    for d in diagnostics:
        if d.K_bar >= 0.0 and previous is not None and d.r > previous * (1 + slack) + slack:
            monotone = False
        previous = d.r
    verdict = {
        "r_nonnegative": all(r >= 0.0 for r in r_values),
        "xi_nonnegative": all(d.xi >= 0.0 for d in diagnostics),
        "r_monotone_on_dissipative_steps": monotone,
        "negative_K_steps": negative_k_steps,
    }
    verdict["pass"] = (
        verdict["r_nonnegative"]
        and verdict["xi_nonnegative"]
        and verdict["r_monotone_on_dissipative_steps"]
    )
    return verdict


def _run_config(config):
    problem = config.build_problem()
    state, report = run(problem, config.tau, config.t_final)
    return problem, state, report


def cmd_solve(args):
    config = _resolve_config(args)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    try:
        problem, state, error_report = _run_config(config)
    except RelaxationBreakdownError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR

    write_diagnostics_csv(out / "diagnostics.csv", state.diagnostics)
    nodes = problem.space.quad_nodes
    values = eval_at_nodes(state.u_field())
    write_field_csv(out / "field.csv", nodes, values)

    summary = {
        "alpha": config.alpha,
        "tau": config.tau,
        "t_final": config.t_final,
        "n_modes": config.n_modes,
        "mode": config.mode,
        "c0_shift": config.c0_shift,
        "n_steps": state.n,
        "max_solve_residual": max(state.residuals) if state.residuals else 0.0,
    }
    exact_values = None
    failed = False
    if config.mode == "manufactured":
        summary["linf_error"] = error_report.linf_error
        summary["l2_error"] = error_report.l2_error
        exact_values = problem.exact(nodes, config.t_final)
        print(
            f"alpha={config.alpha} tau={config.tau}: "
            f"linf={error_report.linf_error:.4e} l2={error_report.l2_error:.4e}"
        )
    else:
        verdict = _stability_verdict(state.diagnostics)
        summary["stability"] = verdict
        status = "PASS" if verdict["pass"] else "FAIL"
        print(
            f"alpha={config.alpha} tau={config.tau}: stability verdict {status} "
            f"({len(verdict['negative_K_steps'])} steps with K < 0)"
        )
        failed = not verdict["pass"]

    (out / "report.json").write_text(json.dumps(summary, indent=2) + "\n")
    render_solution_figure(
        out / "solution.png",
        nodes,
        values,
        [d.t for d in state.diagnostics],
        [d.r for d in state.diagnostics],
        [d.energy_bar for d in state.diagnostics],
        exact_values=exact_values,
    )
    print(f"wrote diagnostics.csv, field.csv, report.json, solution.png in {out}")
    return NUMERICAL_ERROR if failed else 0


def cmd_convergence(args):
    file_entries = read_config_file(args.config) if args.config else {}

    def pick(cli_value, key, cast, default):
        if cli_value is not None:
            return cli_value
        if key in file_entries:
            return cast(file_entries[key])
        return default

    alphas = _parse_float_list(args.alpha)
    taus = [_parse_float(t) for t in args.tau.split(",")]
    if any(t2 >= t1 for t1, t2 in zip(taus, taus[1:])):
        raise UsageError("tau list must be strictly decreasing")
    mode = pick(args.mode, "mode", str, "manufactured")
    if mode != "manufactured":
        raise UsageError("convergence study requires the manufactured mode")

    configs = {}
    for alpha in alphas:
        for tau in taus:
            configs[(alpha, tau)] = RunConfig(
                alpha=alpha,
                tau=tau,
                t_final=pick(args.t_final, "t_final", _parse_float, 1.0),
                n_modes=pick(args.modes, "n_modes", int, 50),
                mode="manufactured",
                c0_shift=pick(args.c0_shift, "c0_shift", _parse_float, 0.0),
                output_dir=Path(args.out),
            )

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        futures = {key: pool.submit(_run_config, cfg) for key, cfg in configs.items()}
        results = {key: future.result() for key, future in futures.items()}

    reports = []
    max_residual = 0.0
    for alpha in alphas:
        linf = [results[(alpha, tau)][2].linf_error for tau in taus]
        l2 = [results[(alpha, tau)][2].l2_error for tau in taus]
        max_residual = max(
            max_residual,
            *(max(results[(alpha, tau)][1].residuals) for tau in taus),
        )
        linf_rates = observed_rates(taus, linf)
        l2_rates = observed_rates(taus, l2)
        rows = tuple(
            (taus[i], linf[i], linf_rates[i], l2[i], l2_rates[i])
            for i in range(len(taus))
        )
        reports.append(ConvergenceReport(alpha=alpha, rows=rows))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_convergence_csv(out / "convergence.csv", reports)
    emit_plot_script(out / "plot_convergence.py")
    render_convergence_figure(out / "convergence.png", reports)

    for report in reports:
        print(f"alpha = {report.alpha}")
        print(f"  {'tau':>12} {'linf':>12} {'rate':>8} {'l2':>12} {'rate':>8}")
        for tau, linf, linf_rate, l2, l2_rate in report.rows:
            linf_rate = "" if linf_rate is None else f"{linf_rate:.4f}"
            l2_rate = "" if l2_rate is None else f"{l2_rate:.4f}"
            print(f"  {tau:>12.6g} {linf:>12.4e} {linf_rate:>8} {l2:>12.4e} {l2_rate:>8}")
    print(f"max per-step solve residual: {max_residual:.3e}")
    print(f"wrote convergence.csv, plot_convergence.py, convergence.png in {out}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(
        prog="fracsav",
        description="Fractional BDF6 SAV solver for the Allen-Cahn flow on (-1, 1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_coeffs = sub.add_parser("coeffs", help="dump quadrature and screened weights")
    p_coeffs.add_argument("--alpha", required=True)
    p_coeffs.add_argument("--n-max", type=int, default=512)
    p_coeffs.add_argument("--out", default="coeffs.csv")
    p_coeffs.set_defaults(func=cmd_coeffs)

    p_sym = sub.add_parser("symbol-check", help="grid certificates of symbol positivity")
    p_sym.add_argument("--alpha", default="0.05:1.0:0.05")
    p_sym.add_argument("--grid", type=int, default=8192)
    p_sym.add_argument("--out", default="certificates.json")
    p_sym.set_defaults(func=cmd_symbol_check)

    p_solve = sub.add_parser("solve", help="one time-stepping run")
    p_solve.add_argument("--config", help="flat key = value file")
    p_solve.add_argument("--alpha", type=_parse_float)
    p_solve.add_argument("--tau", type=_parse_float)
    p_solve.add_argument("--t-final", type=_parse_float)
    p_solve.add_argument("--modes", type=int)
    p_solve.add_argument("--mode", choices=MODES)
    p_solve.add_argument("--c0-shift", type=_parse_float)
    p_solve.add_argument("--out", default="run")
    p_solve.set_defaults(func=cmd_solve)

    p_conv = sub.add_parser("convergence", help="error/rate sweep over alpha and tau")
    p_conv.add_argument("--config", help="flat key = value file")
    p_conv.add_argument("--alpha", default="0.4,0.6,0.8")
    p_conv.add_argument("--tau", default="1/200,1/300,1/400,1/500")
    p_conv.add_argument("--t-final", type=_parse_float)
    p_conv.add_argument("--modes", type=int)
    p_conv.add_argument("--mode", choices=MODES)
    p_conv.add_argument("--c0-shift", type=_parse_float)
    p_conv.add_argument("--jobs", type=int, default=4)
    p_conv.add_argument("--out", default="sweep")
    p_conv.set_defaults(func=cmd_convergence)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except RelaxationBreakdownError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
