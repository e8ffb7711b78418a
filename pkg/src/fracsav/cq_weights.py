"""Convolution-quadrature weights of the fractional-power six-step BDF symbol.

The six-step BDF generating polynomial is

    delta(z) = sum_{j=1}^{6} (1/j) (1 - z)^j
             = 49/20 - 6 z + 15/2 z^2 - 20/3 z^3 + 15/4 z^4 - 6/5 z^5 + 1/6 z^6,

and the order-alpha quadrature weights g_0, g_1, ... are the Taylor
coefficients of delta(z)**alpha.  A fractional derivative of order alpha is
then approximated on a uniform time grid of step tau by

    tau**(-alpha) * sum_{j=0}^{n} g_j * phi^{n-j}.

Weights are generated by the power-of-a-series recurrence, applied after
deflating the root at z = 1:

    delta(z) = (1 - z) * P(z),
    P(z) = (147 - 213 z + 237 z^2 - 163 z^3 + 62 z^4 - 10 z^5) / 60,

so g is the convolution of the exact binomial series of (1 - z)**alpha with
the recurrence-generated coefficients of P(z)**alpha.  P has no roots on the
closed unit disk, so its power's coefficients decay geometrically and every
g_j comes out accurate relative to its own size.  (Running the recurrence on
the full degree-6 polynomial instead leaves systematic tail errors of about
1e-15 relative to g_0, which the tau**(-alpha) scaling in a fine-step solver
amplifies to the 1e-13 level.)  alpha = 1 is admitted as an extension and
reproduces the classical six-step coefficients exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .legendre import Field, _require_shared_space

__all__ = [
    "BDF6_COEFFS",
    "Bdf6Symbol",
    "CQWeights",
    "bdf6_symbol",
    "convolve_tail",
    "frac_weights",
    "history_convolution",
    "symbol_eval",
    "symbol_eval_many",
]

#: Exact coefficients c_0..c_6 of sum_{j=1}^{6} (1 - z)^j / j.
BDF6_COEFFS = (
    Fraction(49, 20),
    Fraction(-6, 1),
    Fraction(15, 2),
    Fraction(-20, 3),
    Fraction(15, 4),
    Fraction(-6, 5),
    Fraction(1, 6),
)

#: Exact coefficients of the deflated factor P(z) = delta(z) / (1 - z).
DEFLATED_COEFFS = (
    Fraction(147, 60),
    Fraction(-213, 60),
    Fraction(237, 60),
    Fraction(-163, 60),
    Fraction(62, 60),
    Fraction(-10, 60),
)

_COEFF_FLOATS = np.array([float(c) for c in BDF6_COEFFS])
_COEFF_FLOATS.setflags(write=False)
_DEFLATED_FLOATS = np.array([float(c) for c in DEFLATED_COEFFS])
_DEFLATED_FLOATS.setflags(write=False)


@dataclass(frozen=True)
class Bdf6Symbol:
    """The degree-6 generating polynomial, constant term first, exact rationals."""

    coeffs: tuple = BDF6_COEFFS

    def __call__(self, zeta):
        acc = 0.0 * zeta
        for c in reversed(self.coeffs):
            acc = acc * zeta + float(c)
        return acc


def bdf6_symbol():
    return Bdf6Symbol()


@dataclass(frozen=True)
class CQWeights:
    """Quadrature weights g_0..g_{n_max} for one fractional order."""

    alpha: float
    n_max: int
    g: np.ndarray


def _series_power(coeffs, alpha, n_max):
    """Taylor coefficients of (sum_k coeffs[k] z^k)**alpha.

    Power-of-a-series recurrence with u = the base polynomial:

        f_0 = u_0**alpha,
        n * u_0 * f_n = sum_{k=1}^{min(n,deg)} (k*(alpha+1) - n) * u_k * f_{n-k}.
    """
    deg = len(coeffs) - 1
    f = np.zeros(n_max + 1)
    f[0] = coeffs[0] ** alpha
    for n in range(1, n_max + 1):
        kmax = min(n, deg)
        k = np.arange(1, kmax + 1)
        f[n] = np.dot((k * (alpha + 1.0) - n) * coeffs[1:kmax + 1], f[n - k]) / (n * coeffs[0])
    return f


def frac_weights(alpha, n_max):
    """Taylor coefficients of the alpha-power of the BDF6 symbol.

    Computed as binomial-series((1-z)**alpha) convolved with the
    recurrence-generated power of the deflated quintic factor.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    binom = np.empty(n_max + 1)
    binom[0] = 1.0
    for j in range(1, n_max + 1):
        binom[j] = binom[j - 1] * (j - 1 - alpha) / j
    deflated_power = _series_power(_DEFLATED_FLOATS, alpha, n_max)
    g = np.convolve(binom, deflated_power)[:n_max + 1]
    g.setflags(write=False)
    return CQWeights(alpha=alpha, n_max=n_max, g=g)


def symbol_eval(alpha, zeta):
    """Principal-branch alpha-power of the symbol at one point, |zeta| <= 1.

    The symbol vanishes like (1 - zeta)**alpha at zeta = 1; that point is
    returned as exactly 0.  It is nonzero everywhere else on the closed disk.
    """
    if zeta == 1:
        return 0j
    return complex(bdf6_symbol()(zeta)) ** alpha


def symbol_eval_many(alpha, zetas):
    """Vectorised :func:`symbol_eval` over an array of points."""
    zetas = np.asarray(zetas, dtype=complex)
    values = bdf6_symbol()(zetas)
    out = np.zeros_like(values)
    interior = zetas != 1
    out[interior] = values[interior] ** alpha
    return out


def convolve_tail(g, coeff_history, n):
    """sum_{j=1}^{n} g[j] * coeff_history[n-j] over the leading axis.

    ``coeff_history`` stacks levels 0..(at least n-1) as rows.
    """
    if n == 0:
        return np.zeros(coeff_history.shape[1])
    return g[1:n + 1] @ coeff_history[n - 1::-1]


def history_convolution(weights, history, n):
    """Tail of the discrete convolution: sum_{j=1}^{n} g_j * history[n-j].

    The j = 0 term is excluded; the stepping scheme applies g_0 to the
    unknown new level.  ``history`` holds Fields for levels 0..n (at least).
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if len(history) < n + 1:
        raise ValueError(f"need at least {n + 1} history levels, got {len(history)}")
    if n > weights.n_max:
        raise ValueError(f"weights only cover n <= {weights.n_max}, got {n}")
    space = _require_shared_space(*history[:n + 1])
    if n == 0:
        return Field(space, np.zeros(space.n_modes))
    stacked = np.stack([f.coeffs for f in history[:n]])
    return Field(space, convolve_tail(weights.g, stacked, n))
