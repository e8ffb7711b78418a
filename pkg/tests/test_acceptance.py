"""Acceptance gate: every shipped claim at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion.
"""

import math
import time

import numpy as np
import pytest

from fracsav.allen_cahn import energy, manufactured_problem, unforced_problem
from fracsav.cq_weights import BDF6_COEFFS, frac_weights
from fracsav.multipliers import (
    MULTIPLIERS,
    q_weights,
    toeplitz_generating_function,
    toeplitz_min,
    verify_positive_real,
)
from fracsav.stepper import run

TABLE_TAUS = [1 / 200, 1 / 300, 1 / 400, 1 / 500]
TABLE_ERRORS = {
    ("linf", 0.4): [5.2278e-10, 4.7257e-11, 8.5294e-12, 2.2387e-12],
    ("linf", 0.6): [3.4894e-10, 3.1804e-11, 5.7445e-12, 1.5159e-12],
    ("linf", 0.8): [2.2080e-10, 2.0415e-11, 3.7070e-12, 9.7833e-13],
    ("l2", 0.4): [4.7254e-10, 4.2775e-11, 7.7276e-12, 2.0296e-12],
    ("l2", 0.6): [3.0054e-10, 2.7482e-11, 4.9696e-12, 1.3156e-12],
    ("l2", 0.8): [1.7967e-10, 1.6721e-11, 3.0464e-12, 8.0648e-13],
}
TABLE_ALPHAS = (0.4, 0.6, 0.8)

TOEPLITZ_REFERENCE = 0.009321552602567
BUDGET_MAXIMISER = math.acos((97.0 - math.sqrt(2011.0)) / 108.0)  # ~1.0668


def announce(number, name, passed, detail):
    status = "PASS" if passed else "FAIL"
    print(f"[{status}] criterion {number} ({name}): {detail}")


@pytest.fixture(scope="module")
def table1_runs(space50):
    """All twelve manufactured runs of the benchmark table, shared between
    the convergence criterion and the residual criterion."""
    start = time.monotonic()
    results = {}
    for alpha in TABLE_ALPHAS:
        for tau in TABLE_TAUS:
            problem = manufactured_problem(space50, alpha)
            state, report = run(problem, tau, 1.0)
            results[(alpha, tau)] = {
                "linf": report.linf_error,
                "l2": report.l2_error,
                "max_residual": max(state.residuals),
            }
    elapsed = time.monotonic() - start
    return results, elapsed


def test_criterion_1_weight_oracle_equivalence(fft_weight_oracle):
    start = time.monotonic()
    worst = 0.0
    for alpha in (0.1, 0.3, 0.5, 0.7, 0.9):
        g = frac_weights(alpha, 512).g
        reference = fft_weight_oracle(alpha, 512)
        worst = max(worst, np.max(np.abs(g - reference)) / np.max(np.abs(reference)))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-10 and elapsed < 1.0
    announce(1, "weight oracle equivalence",
             ok, f"max rel deviation {worst:.2e} (tol 1e-10), {elapsed:.2f} s")
    assert worst <= 1e-10
    assert elapsed < 1.0


def test_criterion_2_classical_reduction():
    g = frac_weights(1.0, 512).g
    c = np.array([float(x) for x in BDF6_COEFFS])
    head = np.max(np.abs(g[:7] - c))
    tail = np.max(np.abs(g[7:]))
    ok = head <= 1e-14 and tail <= 1e-14
    announce(2, "classical alpha = 1 reduction",
             ok, f"head dev {head:.2e}, tail dev {tail:.2e} (tol 1e-14)")
    assert head <= 1e-14
    assert tail <= 1e-14


def test_criterion_3_screened_weights_and_telescoping():
    worst = 0.0
    for alpha in (0.1, 0.3, 0.5, 0.7, 0.9):
        weights = frac_weights(alpha, 512)
        q = q_weights(alpha, 512, weights).q
        k = np.arange(513)
        division = np.convolve(
            np.convolve(weights.g, (k + 1) * 0.5**k)[:513], (4.0 / 9.0) ** k
        )[:513]
        worst = max(worst, np.max(np.abs(q - division)) / np.max(np.abs(division)))

    rng = np.random.default_rng(2026)
    mu = [float(m) for m in MULTIPLIERS[:3]]
    worst_tel = 0.0
    for n in (1, 2, 3, 7, 16, 33, 64):
        alpha = float(rng.uniform(0.1, 1.0))
        weights = frac_weights(alpha, n)
        q = q_weights(alpha, n, weights).q
        w = np.zeros(n + 4)
        w[4:] = rng.standard_normal(n)
        lhs = sum(weights.g[j] * w[n - j + 3] for j in range(n + 1))
        v = [0.0] * (n + 1)
        for level in range(1, n + 1):
            v[level] = (w[level + 3] - mu[0] * w[level + 2]
                        - mu[1] * w[level + 1] - mu[2] * w[level])
        rhs = sum(q[j] * v[n - j] for j in range(n))
        worst_tel = max(worst_tel, abs(lhs - rhs))

    ok = worst <= 1e-10 and worst_tel <= 1e-11
    announce(3, "screened weights vs series division + telescoping",
             ok, f"series dev {worst:.2e} (tol 1e-10), "
                 f"telescoping dev {worst_tel:.2e} (tol 1e-11)")
    assert worst <= 1e-10
    assert worst_tel <= 1e-11


def test_criterion_4_positive_real_certificates():
    start = time.monotonic()
    alphas = [round(0.05 * k, 2) for k in range(1, 21)]
    certificates = [verify_positive_real(a, 8192) for a in alphas]
    elapsed = time.monotonic() - start

    min_real = min(c.min_real_part for c in certificates)
    max_delta = max(c.max_delta for c in certificates)
    argmax_dev = max(abs(c.argmax_x - BUDGET_MAXIMISER) for c in certificates)
    argmax_dev_paper = max(abs(c.argmax_x - 1.0668) for c in certificates)
    ok = (
        all(c.passed for c in certificates)
        and min_real >= -1e-12
        and max_delta < 1.51
        and argmax_dev <= 1e-3
        and argmax_dev_paper <= 1e-3
        and elapsed < 5.0
    )
    announce(4, "positive-real symbol certificates",
             ok, f"min Re {min_real:.2e} (tol -1e-12), max delta {max_delta:.6f} "
                 f"(< 1.51), argmax within {argmax_dev:.2e} of {BUDGET_MAXIMISER:.4f}, "
                 f"{elapsed:.2f} s")
    assert all(c.passed for c in certificates)
    assert min_real >= -1e-12
    assert max_delta < 1.51
    assert argmax_dev <= 1e-3
    assert argmax_dev_paper <= 1e-3
    assert elapsed < 5.0


def test_criterion_5_toeplitz_minimum():
    value = toeplitz_min()
    s_star = (25.0 - math.sqrt(145.0)) / 24.0
    x = np.linspace(0.0, 2 * np.pi, 100001)
    sampled_min = float(toeplitz_generating_function(x).min())
    ok = (
        abs(value - TOEPLITZ_REFERENCE) <= 1e-12
        and 0.0 < s_star < 1.0
        and sampled_min >= value - 1e-12
    )
    announce(5, "coercivity constant",
             ok, f"p(s*) = {value:.15f} vs {TOEPLITZ_REFERENCE} "
                 f"(dev {abs(value - TOEPLITZ_REFERENCE):.1e}, tol 1e-12), "
                 f"sampled h min {sampled_min:.15f}")
    assert abs(value - TOEPLITZ_REFERENCE) <= 1e-12
    assert 0.0 < s_star < 1.0
    assert sampled_min >= value - 1e-12


def test_criterion_6_stability(space50):
    start = time.monotonic()
    flips = {}
    worst_identity = 0.0
    ok = True
    for alpha in (0.4, 0.8):
        problem = unforced_problem(space50, alpha)
        state, _ = run(problem, 1 / 100, 1.0)
        diag = state.diagnostics
        ok &= all(d.r >= 0.0 for d in diag)
        ok &= all(d.xi >= 0.0 for d in diag)
        r_prev = energy(problem.u0, problem.c0_shift)
        for d in diag:
            lhs = d.r - r_prev
            rhs = -state.tau * d.xi * d.K_bar
            dev = abs(lhs - rhs) / max(abs(d.r), 1e-300)
            worst_identity = max(worst_identity, dev)
            ok &= dev <= 1e-12
            if d.K_bar >= 0.0:
                ok &= d.r <= r_prev * (1 + 1e-14)
            r_prev = d.r
        flips[alpha] = [d.n for d in diag if d.K_bar < 0.0]
    elapsed = time.monotonic() - start
    ok &= elapsed < 1.0
    announce(6, "unconditional stability",
             ok, f"identity dev {worst_identity:.2e} (tol 1e-12 rel); "
                 f"K<0 steps logged: alpha=0.4 -> {len(flips[0.4])}, "
                 f"alpha=0.8 -> {len(flips[0.8])} "
                 f"(startup layer is only C^alpha); {elapsed:.2f} s")
    assert ok
    assert elapsed < 1.0


def test_criterion_7_benchmark_table(table1_runs):
    results, elapsed = table1_runs
    rate_window = (5.7, 6.1)
    all_rates_ok = True
    all_magnitudes_ok = True
    worst_ratio = 1.0
    rate_span = [math.inf, -math.inf]
    for alpha in TABLE_ALPHAS:
        for norm in ("linf", "l2"):
            errors = [results[(alpha, tau)][norm] for tau in TABLE_TAUS]
            for i in range(1, len(errors)):
                rate = math.log(errors[i - 1] / errors[i]) / math.log(
                    TABLE_TAUS[i - 1] / TABLE_TAUS[i]
                )
                rate_span = [min(rate_span[0], rate), max(rate_span[1], rate)]
                all_rates_ok &= rate_window[0] <= rate <= rate_window[1]
            for err, ref in zip(errors, TABLE_ERRORS[(norm, alpha)]):
                ratio = err / ref
                worst_ratio = max(worst_ratio, ratio, 1.0 / ratio)
                all_magnitudes_ok &= 0.1 <= ratio <= 10.0
    ok = all_rates_ok and all_magnitudes_ok and elapsed < 120.0
    announce(7, "benchmark table reproduction",
             ok, f"rates in [{rate_span[0]:.4f}, {rate_span[1]:.4f}] "
                 f"(window [5.7, 6.1]), worst error ratio {worst_ratio:.2f}x "
                 f"(tol 10x), {elapsed:.1f} s (< 120 s)")
    assert all_rates_ok
    assert all_magnitudes_ok
    assert elapsed < 120.0


def test_criterion_8_weak_form_residuals(table1_runs):
    results, _ = table1_runs
    worst = max(entry["max_residual"] for entry in results.values())
    ok = worst <= 1e-10
    announce(8, "per-step weak-form residual",
             ok, f"max over all benchmark runs {worst:.2e} (tol 1e-10)")
    assert worst <= 1e-10
