"""Six-step multiplier machinery and numerical positivity certificates.

The history sum of the six-step scheme can be rewritten through the
multipliers (mu_1, mu_2, mu_3) = (13/9, -25/36, 1/9) as a convolution with
the screened weights

    q_j = sum_{l=0}^{j} d_l * g_{j-l},
    d_l = (9**(l+1) * (l - 7) + 8**(l+2)) / 18**l,

whose generating function is the symbol divided by
(1 - z/2)^2 (1 - 4z/9) = 1 - (13/9) z + (25/36) z^2 - (1/9) z^3.

Two facts make this useful and are certified numerically here:

* the screened symbol has nonnegative real part on the unit circle, so the
  associated quadratic form is nonnegative (checked on a dense grid,
  together with the phase budget delta(x) that stays below pi/2);
* the symmetrised lower-triangular multiplier Toeplitz matrix has a strictly
  positive generating function h(x) = p(cos x), whose exact minimum
  p(s*) with s* = (25 - sqrt(145))/24 is about 9.3e-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cq_weights import frac_weights, symbol_eval_many

__all__ = [
    "MULTIPLIERS",
    "MultiplierSeries",
    "MultiplierSet",
    "SymbolCertificate",
    "angle_budget",
    "multiplier_set",
    "q_weights",
    "screened_symbol_many",
    "toeplitz_cubic",
    "toeplitz_generating_function",
    "toeplitz_min",
    "verify_positive_real",
]

#: Exact multipliers (mu_1..mu_6); only the first three are nonzero.
MULTIPLIERS = (
    Fraction(13, 9),
    Fraction(-25, 36),
    Fraction(1, 9),
    Fraction(0),
    Fraction(0),
    Fraction(0),
)


@dataclass(frozen=True)
class MultiplierSet:
    mu: tuple = MULTIPLIERS


def multiplier_set():
    return MultiplierSet()


@dataclass(frozen=True)
class MultiplierSeries:
    """Screened weights q_0..q_{n_max} for one fractional order."""

    alpha: float
    q: np.ndarray


@dataclass(frozen=True)
class SymbolCertificate:
    """Outcome of the grid check of the screened symbol's positivity.

    ``passed`` means the minimum real part on the grid stayed above the
    -1e-12 rounding allowance.
    """

    alpha: float
    grid_size: int
    min_real_part: float
    max_delta: float
    argmax_x: float
    toeplitz_min: float
    passed: bool

    def as_dict(self):
        return {
            "alpha": self.alpha,
            "grid_size": self.grid_size,
            "min_real_part": self.min_real_part,
            "max_delta": self.max_delta,
            "argmax_x": self.argmax_x,
            "toeplitz_min": self.toeplitz_min,
            "pass": self.passed,
        }


def _screen_coefficients(n_max):
    """d_l = 9(l-7)(1/2)^l + 64(4/9)^l, built by iterated scaling.

    This is the overflow-free form of (9**(l+1) (l-7) + 8**(l+2)) / 18**l.
    """
    d = np.empty(n_max + 1)
    half_pow = 1.0
    four_ninths_pow = 1.0
    for l in range(n_max + 1):
        d[l] = 9.0 * (l - 7) * half_pow + 64.0 * four_ninths_pow
        half_pow *= 0.5
        four_ninths_pow *= 4.0 / 9.0
    return d


def q_weights(alpha, n_max, weights=None):
    """Screened weights by the finite convolution q_j = sum_l d_l g_{j-l}."""
    if weights is None:
        weights = frac_weights(alpha, n_max)
    if weights.n_max < n_max:
        raise ValueError(f"weights only cover n <= {weights.n_max}, need {n_max}")
    d = _screen_coefficients(n_max)
    q = np.convolve(d, weights.g[:n_max + 1])[:n_max + 1]
    q.setflags(write=False)
    return MultiplierSeries(alpha=alpha, q=q)


def screened_symbol_many(alpha, zetas):
    """g(zeta)**... divided by the multiplier factors, vectorised."""
    zetas = np.asarray(zetas, dtype=complex)
    numerator = symbol_eval_many(alpha, zetas)
    return numerator / ((1.0 - 0.5 * zetas) ** 2 * (1.0 - (4.0 / 9.0) * zetas))


def angle_budget(x):
    """Phase contributions (theta1..theta4, delta) of the screened symbol.

    theta1 is the phase of (1 - e^{ix}); theta2 the phase of the residual
    quintic factor (branch arctan or arctan - pi by the sign of its real
    part a_6); theta3 and theta4 the phases of the inverted multiplier
    factors.  delta = theta3 + theta4 is the positive part of the budget.
    Accepts scalars or arrays with entries in (0, pi).
    """
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= np.pi)):
        raise ValueError("angle budget is defined on the open interval (0, pi)")
    # arctan(-sin x / (1 - cos x)), written division-free: the denominator
    # rounds to zero for x below ~1e-8 while the limit value is -pi/2
    theta1 = -np.arctan2(np.sin(x), 1.0 - np.cos(x))
    a6 = (
        147.0
        - 213.0 * np.cos(x)
        + 237.0 * np.cos(2 * x)
        - 163.0 * np.cos(3 * x)
        + 62.0 * np.cos(4 * x)
        - 10.0 * np.cos(5 * x)
    ) / 60.0
    b6 = (
        213.0 * np.sin(x)
        - 237.0 * np.sin(2 * x)
        + 163.0 * np.sin(3 * x)
        - 62.0 * np.sin(4 * x)
        + 10.0 * np.sin(5 * x)
    ) / 60.0
    # -atan2(b6, a6) is arctan(-b6/a6) for a6 > 0 and arctan(-b6/a6) - pi
    # for a6 < 0 (b6 >= 0 on (0, pi)), including the a6 = 0 limit.
    theta2 = -np.arctan2(b6, a6)
    theta3 = 2.0 * np.arctan(0.5 * np.sin(x) / (1.0 - 0.5 * np.cos(x)))
    theta4 = np.arctan((4.0 / 9.0) * np.sin(x) / (1.0 - (4.0 / 9.0) * np.cos(x)))
    delta = theta3 + theta4
    return theta1, theta2, theta3, theta4, delta


def toeplitz_generating_function(x):
    """Generating function h(x) of the symmetrised multiplier Toeplitz matrix."""
    x = np.asarray(x, dtype=float)
    return (
        31.0 / 32.0
        - (13.0 / 9.0) * np.cos(x)
        + (25.0 / 36.0) * np.cos(2 * x)
        - (1.0 / 9.0) * np.cos(3 * x)
    )


def toeplitz_cubic(s):
    """h(x) rewritten as a cubic in s = cos x."""
    s = np.asarray(s, dtype=float)
    return -(4.0 / 9.0) * s**3 + (25.0 / 18.0) * s**2 - (10.0 / 9.0) * s + 79.0 / 288.0


def toeplitz_min():
    """Exact minimum of h over the reals: p(s*) at s* = (25 - sqrt(145))/24.

    The cubic's only stationary point inside [-1, 1] is s*, and the boundary
    values are larger, so this is the global minimum of the generating
    function.
    """
    s_star = (25.0 - math.sqrt(145.0)) / 24.0
    return float(toeplitz_cubic(s_star))


def verify_positive_real(alpha, grid_size=8192):
    """Grid certificate for the screened symbol's nonnegative real part.

    Evaluates Re q(e^{ix}) on a uniform grid of [0, pi] and records the
    minimum, the phase-budget maximum and its location, and the Toeplitz
    minimum.  Passes iff the minimum real part is >= -1e-12.
    """
    if grid_size < 1024:
        raise ValueError(f"grid_size must be >= 1024, got {grid_size}")
    x = np.linspace(0.0, np.pi, grid_size)
    values = screened_symbol_many(alpha, np.exp(1j * x))
    min_real = float(values.real.min())
    interior = x[1:-1]
    *_, delta = angle_budget(interior)
    idx = int(np.argmax(delta))
    certificate = SymbolCertificate(
        alpha=alpha,
        grid_size=grid_size,
        min_real_part=min_real,
        max_delta=float(delta[idx]),
        argmax_x=float(interior[idx]),
        toeplitz_min=toeplitz_min(),
        passed=min_real >= -1e-12,
    )
    return certificate
