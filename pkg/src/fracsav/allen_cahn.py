"""Allen-Cahn problem data: double-well energy, dissipation rate, forcing.

The flow minimises E(u) = 1/2 (grad u, grad u) + integral of F(u), with the
double-well potential F(u) = (u^2 - 1)^2 / 4 and f = F' = u^3 - u.  The
manufactured problem drives the solution to (t^10 + 0.1)(1 - x^2), whose
time regularity is high enough that no starting corrections are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .legendre import (
    Field,
    SpectralSpace,
    _require_shared_space,
    eval_at_nodes,
    grad_inner,
    project,
)

__all__ = [
    "B6_WEIGHTS",
    "AllenCahnProblem",
    "default_initial_values",
    "discrete_K",
    "energy",
    "extrapolate_B6",
    "manufactured_exact",
    "manufactured_forcing",
    "manufactured_problem",
    "nonlinearity",
    "potential",
    "unforced_problem",
]

#: Explicit sixth-order extrapolation weights, newest history level first.
B6_WEIGHTS = (6.0, -15.0, 20.0, -15.0, 6.0, -1.0)


def potential(u):
    """Double-well density F(u) = (u^2 - 1)^2 / 4."""
    u = np.asarray(u, dtype=float)
    return 0.25 * (u * u - 1.0) ** 2


def nonlinearity(u):
    """f(u) = F'(u) = u^3 - u."""
    u = np.asarray(u, dtype=float)
    return u**3 - u


def energy(v, c0_shift=0.0):
    """E(v) = 1/2 (grad v, grad v) + quadrature of F(v) + shift."""
    well = float(v.space.quad_weights @ potential(eval_at_nodes(v)))
    return 0.5 * grad_inner(v, v) + well + c0_shift


def discrete_K(u_cur, u_prev, tau):
    """Discrete dissipation rate of the energy along one step.

    Returns -[(grad u_cur, grad du) + (f(u_cur), du)] with
    du = (u_cur - u_prev)/tau; the diffusion term is integrated by parts
    against the Dirichlet basis.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    space = _require_shared_space(u_cur, u_prev)
    rate = Field(space, (u_cur.coeffs - u_prev.coeffs) / tau)
    f_vals = nonlinearity(eval_at_nodes(u_cur))
    reaction = float(space.quad_weights @ (f_vals * eval_at_nodes(rate)))
    return -(grad_inner(u_cur, rate) + reaction)


def extrapolate_B6(history):
    """Sixth-order explicit predictor from the six most recent levels.

    ``history`` lists Fields newest first; degree-5 polynomial samples are
    reproduced exactly at the next grid point.
    """
    if len(history) < 6:
        raise ValueError(f"need 6 history levels, got {len(history)}")
    space = _require_shared_space(*history[:6])
    coeffs = np.zeros(space.n_modes)
    for weight, level in zip(B6_WEIGHTS, history):
        coeffs += weight * level.coeffs
    return Field(space, coeffs)


def manufactured_exact(x, t):
    """(t^10 + 0.1)(1 - x^2)."""
    x = np.asarray(x, dtype=float)
    return (t**10 + 0.1) * (1.0 - x * x)


def manufactured_forcing(x, t, alpha):
    """Forcing that makes :func:`manufactured_exact` the solution.

    The fractional time derivative contributes
    Gamma(11)/Gamma(11 - alpha) * t^(10-alpha) * (1 - x^2), the diffusion
    term 2 (t^10 + 0.1), and the reaction f(u).
    """
    x = np.asarray(x, dtype=float)
    u = manufactured_exact(x, t)
    frac = math.gamma(11.0) / math.gamma(11.0 - alpha) * t ** (10.0 - alpha)
    return frac * (1.0 - x * x) + 2.0 * (t**10 + 0.1) + nonlinearity(u)


@dataclass(frozen=True)
class AllenCahnProblem:
    """Immutable problem definition for one run.

    ``forcing`` and ``exact`` take (nodes, t) and are both present
    (manufactured mode) or both absent (unforced mode).
    """

    space: SpectralSpace
    u0: Field
    alpha: float
    c0_shift: float = 0.0
    forcing: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    exact: Optional[Callable[[np.ndarray, float], np.ndarray]] = None

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.c0_shift < 0.0:
            raise ValueError(f"c0_shift must be >= 0, got {self.c0_shift}")
        if self.u0.space is not self.space:
            raise ValueError("u0 does not live in the problem space")
        if (self.forcing is None) != (self.exact is None):
            raise ValueError("manufactured mode is all-or-nothing: "
                             "set both forcing and exact, or neither")

    @property
    def manufactured(self):
        return self.forcing is not None


def default_initial_values(x):
    """The benchmark initial condition 0.1 (1 - x^2)."""
    x = np.asarray(x, dtype=float)
    return 0.1 * (1.0 - x * x)


def unforced_problem(space, alpha, c0_shift=0.0):
    u0 = project(space, default_initial_values(space.quad_nodes))
    return AllenCahnProblem(space=space, u0=u0, alpha=alpha, c0_shift=c0_shift)


def manufactured_problem(space, alpha, c0_shift=0.0):
    u0 = project(space, manufactured_exact(space.quad_nodes, 0.0))

    def forcing(x, t, _alpha=alpha):
        return manufactured_forcing(x, t, _alpha)

    return AllenCahnProblem(
        space=space,
        u0=u0,
        alpha=alpha,
        c0_shift=c0_shift,
        forcing=forcing,
        exact=manufactured_exact,
    )
