"""Six-step SAV time stepper for the time-fractional Allen-Cahn flow.

Each step solves the implicit-explicit spectral system for the auxiliary
level ubar^n,

    (g_0 tau^-alpha M + S) wbar = - tau^-alpha M sum_{j>=1} g_j w^{n-j}
                                  - load(f(B6 predictor)) - S u0 [+ load(force)],

with w = u - u0, then relaxes the new level through the auxiliary scalar:

    r^n  = (r^{n-1} + tau W) / (1 + tau (K + W) / E(ubar)),
    xi^n = r^n / E(ubar),   eta^n = 1 - (1 - xi^n)^8,   u^n = eta^n ubar^n.

K is the discrete dissipation rate of the energy and W the discrete power
injected by the source term (zero for the unforced flow, where the update
reduces to r^n = r^{n-1} / (1 + tau K / E)).  W must appear in the
denominator as well as the numerator: K alone already equals -dE/dt of the
computed trajectory, so feeding only K would make r drift away from E by
the integrated forcing power and the relaxation would corrupt u^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .allen_cahn import (
    AllenCahnProblem,
    discrete_K,
    energy,
    extrapolate_B6,
    nonlinearity,
)
from .cq_weights import CQWeights, convolve_tail, frac_weights
from .legendre import (
    Field,
    ShiftedLaplacianSolver,
    eval_at_nodes,
    load_vector,
)

__all__ = [
    "ErrorReport",
    "RelaxationBreakdownError",
    "SavState",
    "StepDiagnostics",
    "init_state",
    "relaxation_update",
    "run",
    "step",
]


class RelaxationBreakdownError(RuntimeError):
    """The relaxation denominator 1 + tau*(K+W)/E dropped to or below zero."""

    def __init__(self, step_index, denominator):
        super().__init__(
            f"relaxation breakdown at step {step_index}: "
            f"denominator {denominator:.6e} <= 0"
        )
        self.step_index = step_index
        self.denominator = denominator


@dataclass
class StepDiagnostics:
    """Per-step scalars: auxiliary state and stability indicators."""

    n: int
    t: float
    r: float
    xi: float
    eta: float
    energy_bar: float
    K_bar: float
    grad_norm_sq: float


@dataclass
class ErrorReport:
    """Errors of the final level against the manufactured solution."""

    tau: float
    t_final: float
    n_steps: int
    linf_error: float
    l2_error: float


@dataclass
class SavState:
    """Full stepping state: history, auxiliary scalars, diagnostics."""

    problem: AllenCahnProblem
    tau: float
    n_steps: int
    weights: CQWeights
    n: int
    w_hist: np.ndarray          # (n_steps+1, N): modal coefficients of u^j - u^0
    ubar_recent: list           # six most recent ubar coefficient vectors, newest first
    r: float
    xi: float
    eta: float
    diagnostics: list = dc_field(default_factory=list)
    residuals: list = dc_field(default_factory=list)
    _solver: ShiftedLaplacianSolver = dc_field(default=None, repr=False)
    _u0: np.ndarray = dc_field(default=None, repr=False)
    _stiff_u0: np.ndarray = dc_field(default=None, repr=False)

    @property
    def u_coeffs(self):
        return self.w_hist[self.n] + self._u0

    def u_field(self):
        return Field(self.problem.space, self.u_coeffs)

    def ubar_field(self):
        return Field(self.problem.space, self.ubar_recent[0])


def relaxation_update(r_prev, energy_bar, dissipation, forcing_power, tau,
                      step_index=0):
    """Auxiliary-scalar update; returns (r, xi, eta).

    Solves r (1 + tau*(K+W)/E) = r_prev + tau*W for r, then
    xi = r/E and eta = 1 - (1 - xi)^8.  Raises when the denominator is
    not positive (clamping instead would hide the violated hypothesis).
    """
    denominator = 1.0 + tau * (dissipation + forcing_power) / energy_bar
    if denominator <= 0.0:
        raise RelaxationBreakdownError(step_index, denominator)
    r = (r_prev + tau * forcing_power) / denominator
    xi = r / energy_bar
    eta = 1.0 - (1.0 - xi) ** 8
    return r, xi, eta


def init_state(problem, tau, n_steps):
    """Level-0 state: u^0 = ubar^0 = projected data, r^0 = E(u^0).

    Startup policy for the six-step predictor: the missing prehistory
    levels ubar^{-1}..ubar^{-5} are filled with ubar^0.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    space = problem.space
    weights = frac_weights(problem.alpha, max(n_steps, 1))
    u0 = problem.u0.coeffs.copy()
    w_hist = np.zeros((n_steps + 1, space.n_modes))
    sigma = weights.g[0] * tau ** (-problem.alpha)
    return SavState(
        problem=problem,
        tau=tau,
        n_steps=n_steps,
        weights=weights,
        n=0,
        w_hist=w_hist,
        ubar_recent=[u0.copy() for _ in range(6)],
        r=energy(problem.u0, problem.c0_shift),
        xi=1.0,
        eta=1.0,
        _solver=ShiftedLaplacianSolver(space, sigma),
        _u0=u0,
        _stiff_u0=space.stiffness @ u0,
    )


def step(state):
    """Advance the state one level in place and return it."""
    n = state.n + 1
    if n > state.n_steps:
        raise ValueError(f"state already reached its final step {state.n_steps}")
    problem = state.problem
    space = problem.space
    tau = state.tau
    t_n = n * tau
    g = state.weights.g
    tau_neg_alpha = tau ** (-problem.alpha)

    predictor = extrapolate_B6(
        [Field(space, c) for c in state.ubar_recent]
    )
    tail = convolve_tail(g, state.w_hist, n)
    rhs = (
        -tau_neg_alpha * (space.mass @ tail)
        - load_vector(space, nonlinearity(eval_at_nodes(predictor)))
        - state._stiff_u0
    )
    force_vals = None
    if problem.manufactured:
        force_vals = problem.forcing(space.quad_nodes, t_n)
        rhs = rhs + load_vector(space, force_vals)

    wbar = state._solver.solve(rhs)
    state.residuals.append(state._solver.residual_norm(wbar, rhs))

    ubar = wbar + state._u0
    ubar_field = Field(space, ubar)
    ubar_prev_field = Field(space, state.ubar_recent[0])
    K = discrete_K(ubar_field, ubar_prev_field, tau)
    E = energy(ubar_field, problem.c0_shift)

    if problem.manufactured:
        rate_vals = (eval_at_nodes(ubar_field) - eval_at_nodes(ubar_prev_field)) / tau
        W = float(space.quad_weights @ (force_vals * rate_vals))
    else:
        W = 0.0
    r, xi, eta = relaxation_update(state.r, E, K, W, tau, step_index=n)

    u = eta * ubar
    state.w_hist[n] = u - state._u0
    state.ubar_recent = [ubar] + state.ubar_recent[:5]
    state.n = n
    state.r = r
    state.xi = xi
    state.eta = eta
    state.diagnostics.append(
        StepDiagnostics(
            n=n,
            t=t_n,
            r=r,
            xi=xi,
            eta=eta,
            energy_bar=E,
            K_bar=K,
            grad_norm_sq=float(u @ (space.stiffness @ u)),
        )
    )
    return state


def run(problem, tau, t_final):
    """Step from 0 to t_final; error report only in manufactured mode."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if t_final < 0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    ratio = t_final / tau
    n_steps = int(round(ratio))
    if abs(ratio - n_steps) > 1e-12 * max(1.0, ratio):
        raise ValueError(
            f"t_final = {t_final} is not an integer multiple of tau = {tau}"
        )
    state = init_state(problem, tau, n_steps)
    for _ in range(n_steps):
        step(state)

    report = None
    if problem.exact is not None:
        exact_vals = problem.exact(problem.space.quad_nodes, t_final)
        computed = eval_at_nodes(state.u_field())
        diff = computed - exact_vals
        report = ErrorReport(
            tau=tau,
            t_final=t_final,
            n_steps=n_steps,
            linf_error=float(np.max(np.abs(diff))),
            l2_error=float(np.sqrt(problem.space.quad_weights @ diff**2)),
        )
    return state, report
