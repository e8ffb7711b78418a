"""1-D Legendre-Galerkin space on (-1, 1) with homogeneous Dirichlet data.

The basis is the compact combination phi_k = L_k - L_{k+2} of Legendre
polynomials, which vanishes at both endpoints.  In this basis the stiffness
matrix is diagonal,

    S_kk = 4k + 6,

and the mass matrix couples only modes two apart,

    M_kk = 2/(2k+1) + 2/(2k+5),    M_{k,k+2} = M_{k+2,k} = -2/(2k+5).

Quadrature is Legendre-Gauss-Lobatto.  Nonlinear expressions are formed at
the nodes and projected back, so the node count oversamples the modal
resolution (default ceil(3N/2) + 4, and never fewer than N + 8 nodes).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

__all__ = [
    "Field",
    "SpectralSpace",
    "ShiftedLaplacianSolver",
    "build_space",
    "eval_at_nodes",
    "grad_inner",
    "l2_inner",
    "legendre_table",
    "lgl_nodes",
    "linf_nodal",
    "load_vector",
    "project",
    "solve_shifted_laplacian",
]


def legendre_table(x, kmax, nderiv=0):
    """Tabulate L_0..L_kmax (and derivatives) at the points ``x``.

    Returns an array of shape ``(nderiv + 1, kmax + 1, len(x))``.  Values use
    the three-term recurrence; derivatives use L'_{k+1} = L'_{k-1} + (2k+1) L_k,
    differentiated once more for the second derivative.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((nderiv + 1, kmax + 1, x.size))
    out[0, 0] = 1.0
    if kmax >= 1:
        out[0, 1] = x
    for k in range(1, kmax):
        out[0, k + 1] = ((2 * k + 1) * x * out[0, k] - k * out[0, k - 1]) / (k + 1)
    for d in range(1, nderiv + 1):
        if kmax >= 1:
            out[d, 1] = d * out[d - 1, 0]
        for k in range(1, kmax):
            out[d, k + 1] = out[d, k - 1] + (2 * k + 1) * out[d - 1, k]
    return out


def lgl_nodes(n_points, tol=1e-14, max_iter=100):
    """Legendre-Gauss-Lobatto nodes (ascending) and weights on [-1, 1].

    The nodes are the zeros of (1 - x^2) L'_{n-1}(x), located by Newton
    iteration from Chebyshev-Gauss-Lobatto initial guesses; the weights are
    2 / (n (n-1) L_{n-1}(x_q)^2).  The rule integrates polynomials up to
    degree 2n - 3 exactly.
    """
    if n_points < 2:
        raise ValueError(f"need at least 2 quadrature points, got {n_points}")
    m = n_points - 1
    x = np.cos(np.pi * np.arange(n_points) / m)
    values = legendre_table(x, m)[0]
    for _ in range(max_iter):
        dx = (x * values[m] - values[m - 1]) / (n_points * values[m])
        x = x - dx
        values = legendre_table(x, m)[0]
        if np.max(np.abs(dx)) <= tol:
            break
    else:
        raise RuntimeError("Gauss-Lobatto Newton iteration did not converge")
    w = 2.0 / (m * n_points * values[m] ** 2)
    return x[::-1].copy(), w[::-1].copy()


@dataclass(frozen=True)
class SpectralSpace:
    """Immutable Legendre-Galerkin discretisation of (-1, 1)."""

    n_modes: int
    quad_nodes: np.ndarray
    quad_weights: np.ndarray
    basis_at_nodes: np.ndarray  # (Q, N) with entries phi_k(x_q)
    mass: np.ndarray            # (N, N) symmetric pentadiagonal
    stiffness: np.ndarray       # (N, N) diagonal, entries 4k + 6
    _mass_cho: np.ndarray = dc_field(repr=False, compare=False, default=None)

    @property
    def n_quad(self):
        return self.quad_nodes.size


@dataclass(frozen=True)
class Field:
    """One spatial function as a modal coefficient vector."""

    space: SpectralSpace
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (self.space.n_modes,):
            raise ValueError(
                f"coefficient vector has shape {coeffs.shape}, "
                f"expected ({self.space.n_modes},)"
            )
        object.__setattr__(self, "coeffs", coeffs)


def _require_shared_space(*fields):
    space = fields[0].space
    for f in fields[1:]:
        if f.space is not space:
            raise ValueError("fields do not share a SpectralSpace")
    return space


def build_space(n_modes, quad_points=None):
    """Assemble nodes, weights, basis table, and mass/stiffness matrices.

    ``quad_points`` defaults to ceil(3*n_modes/2) + 4 so that the pointwise
    cubic nonlinearity stays essentially alias-free.
    """
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    if quad_points is None:
        quad_points = max(-(-3 * n_modes // 2) + 4, n_modes + 8)
    if quad_points < n_modes + 8:
        raise ValueError(
            f"quad_points must be >= n_modes + 8 = {n_modes + 8}, got {quad_points}"
        )
    nodes, weights = lgl_nodes(quad_points)
    values = legendre_table(nodes, n_modes + 1)[0]
    basis = (values[:n_modes] - values[2:n_modes + 2]).T

    k = np.arange(n_modes)
    mass = np.zeros((n_modes, n_modes))
    mass[k, k] = 2.0 / (2 * k + 1) + 2.0 / (2 * k + 5)
    if n_modes > 2:
        kk = np.arange(n_modes - 2)
        mass[kk, kk + 2] = -2.0 / (2 * kk + 5)
        mass[kk + 2, kk] = -2.0 / (2 * kk + 5)
    stiffness = np.diag(4.0 * k + 6.0)

    mass_cho = cholesky_banded(_upper_banded(mass))
    for arr in (nodes, weights, basis, mass, stiffness):
        arr.setflags(write=False)
    return SpectralSpace(
        n_modes=n_modes,
        quad_nodes=nodes,
        quad_weights=weights,
        basis_at_nodes=basis,
        mass=mass,
        stiffness=stiffness,
        _mass_cho=mass_cho,
    )


def _upper_banded(a, bandwidth=2):
    """Pack a symmetric banded matrix into the LAPACK upper-banded layout."""
    n = a.shape[0]
    ab = np.zeros((bandwidth + 1, n))
    for u in range(bandwidth + 1):
        ab[bandwidth - u, u:] = np.diag(a, u)
    return ab


def load_vector(space, values_at_nodes):
    """Dual-space load: b_k = sum_q w_q phi_k(x_q) v(x_q)."""
    v = np.asarray(values_at_nodes, dtype=float)
    if v.shape != (space.n_quad,):
        raise ValueError(
            f"nodal data has shape {v.shape}, expected ({space.n_quad},)"
        )
    return space.basis_at_nodes.T @ (space.quad_weights * v)


def project(space, values_at_nodes):
    """Discrete Galerkin projection of nodal data: solve M c = b."""
    b = load_vector(space, values_at_nodes)
    coeffs = cho_solve_banded((space._mass_cho, False), b)
    return Field(space, coeffs)


def eval_at_nodes(f):
    """Evaluate a modal Field at the quadrature nodes."""
    return f.space.basis_at_nodes @ f.coeffs


def l2_inner(a, b):
    """(a, b) in L2, computed as a^T M b."""
    _require_shared_space(a, b)
    return float(a.coeffs @ (a.space.mass @ b.coeffs))


def grad_inner(a, b):
    """(grad a, grad b), computed as a^T S b (S is diagonal)."""
    _require_shared_space(a, b)
    return float(a.coeffs @ (a.space.stiffness @ b.coeffs))


def linf_nodal(a):
    """Max absolute nodal value."""
    return float(np.max(np.abs(eval_at_nodes(a))))


class ShiftedLaplacianSolver:
    """Direct banded Cholesky solver for (sigma * M + S), factoring once.

    The shift sigma is fixed for a whole run, so the factorisation is cached
    here and reused every step.  One iterative-refinement pass keeps the
    residual at rounding level.
    """

    def __init__(self, space, sigma):
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        self.space = space
        self.sigma = float(sigma)
        self.matrix = sigma * space.mass + space.stiffness
        self._cho = cholesky_banded(_upper_banded(self.matrix))

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        x = cho_solve_banded((self._cho, False), rhs)
        residual = rhs - self.matrix @ x
        return x + cho_solve_banded((self._cho, False), residual)

    def residual_norm(self, x, rhs):
        """Relative max-norm residual of a candidate solution."""
        scale = np.max(np.abs(rhs))
        if scale == 0.0:
            return float(np.max(np.abs(self.matrix @ x)))
        return float(np.max(np.abs(self.matrix @ x - rhs)) / scale)


def solve_shifted_laplacian(space, sigma, rhs):
    """One-shot solve of (sigma * M + S) c = rhs; rhs is a load vector."""
    solution = ShiftedLaplacianSolver(space, sigma).solve(rhs)
    return Field(space, solution)
