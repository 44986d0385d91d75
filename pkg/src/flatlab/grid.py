"""Polar grids on annuli of the punctured disk, quadrature weights, and the
discrete dbar operator with its minimal-norm least-squares solver.

Radial nodes are geometric (uniform in log r) to resolve the hyperbolic
metric near the puncture; quadrature is composite Simpson in log r (3/8 rule
on the tail when the count is even) times the exact uniform rule in the
angle.  dbar = (e^{i theta}/2) (d_rho + (i/rho) d_theta) with centered
differences inside, one-sided at the radial boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import math

import numpy as np

__all__ = [
    "WeightedGrid",
    "GridField",
    "SolveResult",
    "SingularWeight",
    "SolverDivergence",
    "dbar_apply",
    "dbar_adjoint",
    "dbar_solve",
]

CG_TOL = 1e-10
CG_MAXITER = 100_000


class SingularWeight(ValueError):
    pass


class SolverDivergence(ArithmeticError):
    pass


def _radial_weights(s: np.ndarray) -> np.ndarray:
    """Weights W_i with sum_i W_i f(s_i) ~ int f(s) e^{2s} ds: a product rule
    integrating the piecewise-quadratic interpolant of f against the exact
    e^{2s} measure (panels assembled with Gauss-Legendre).  Constants are
    integrated exactly at any node count."""
    n = len(s)
    if n < 3:
        raise ValueError("need at least three radial nodes")
    gl_x, gl_w = np.polynomial.legendre.leggauss(8)
    w = np.zeros(n)

    def add_panel(idx: Tuple[int, ...]):
        a, b = s[idx[0]], s[idx[-1]]
        x = 0.5 * (b - a) * gl_x + 0.5 * (a + b)
        scale = 0.5 * (b - a)
        for j in idx:
            lag = np.ones_like(x)
            for k in idx:
                if k != j:
                    lag *= (x - s[k]) / (s[j] - s[k])
            w[j] += scale * np.sum(gl_w * np.exp(2 * x) * lag)

    start = 0
    if (n - 1) % 2 == 1:  # odd panel count: open with a linear panel
        add_panel((0, 1))
        start = 1
    for i in range(start, n - 1, 2):
        add_panel((i, i + 1, i + 2))
    return w


@dataclass(frozen=True)
class WeightedGrid:
    """Polar grid on {rho_min <= |w| <= rho_max} with quadrature weights."""

    rho_min: float
    rho_max: float
    n_r: int
    n_t: int
    radii: np.ndarray
    thetas: np.ndarray
    nodes: np.ndarray      # complex, (n_r, n_t)
    area: np.ndarray       # quadrature weights, (n_r, n_t); sums to the annulus area
    d_log_r: float
    d_theta: float
    _radial_diff: np.ndarray = field(repr=False, default=None)

    @staticmethod
    def make(rho_min: float, rho_max: float, n_r: int = 256, n_t: int = 256) -> "WeightedGrid":
        if not (0 < rho_min < rho_max):
            raise ValueError("need 0 < rho_min < rho_max")
        s = np.linspace(math.log(rho_min), math.log(rho_max), n_r)
        ds = s[1] - s[0]
        radii = np.exp(s)
        thetas = np.arange(n_t) * (2 * math.pi / n_t)
        dt = 2 * math.pi / n_t
        nodes = radii[:, None] * np.exp(1j * thetas[None, :])
        # dA = rho drho dtheta = e^{2s} ds dtheta
        area = _radial_weights(s)[:, None] * np.full(n_t, dt)[None, :]
        diff = np.zeros((n_r, n_r))
        for i in range(2, n_r - 2):
            diff[i, i - 2] = 1.0 / (12 * ds)
            diff[i, i - 1] = -8.0 / (12 * ds)
            diff[i, i + 1] = 8.0 / (12 * ds)
            diff[i, i + 2] = -1.0 / (12 * ds)
        for i in (1, n_r - 2):
            diff[i, i - 1] = -0.5 / ds
            diff[i, i] = 0.0
            diff[i, i + 1] = 0.5 / ds
        diff[0, 0] = -1.5 / ds
        diff[0, 1] = 2.0 / ds
        diff[0, 2] = -0.5 / ds
        diff[-1, -3] = 0.5 / ds
        diff[-1, -2] = -2.0 / ds
        diff[-1, -1] = 1.5 / ds
        return WeightedGrid(rho_min, rho_max, n_r, n_t, radii, thetas, nodes, area,
                            ds, dt, diff)

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.area * values))

    def ring_mean(self, values: np.ndarray, ring: int) -> complex:
        return complex(np.mean(values[ring, :]))

    def refine(self, factor: int = 2) -> "WeightedGrid":
        return WeightedGrid.make(self.rho_min, self.rho_max,
                                 (self.n_r - 1) * factor + 1, self.n_t * factor)


@dataclass(frozen=True)
class GridField:
    """Complex node values with a role tag (unknown / data / solution)."""

    values: np.ndarray
    role: str = "data"

    def __post_init__(self):
        if not np.all(np.isfinite(self.values.view(float))):
            raise ValueError("grid field contains non-finite values")


# ============================================================
# The discrete operator
# ============================================================

def _theta_diff(grid: WeightedGrid, u: np.ndarray) -> np.ndarray:
    return (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2 * grid.d_theta)


def _phase(grid: WeightedGrid) -> np.ndarray:
    return np.exp(1j * grid.thetas)[None, :] / (2.0 * grid.radii[:, None])


def dbar_apply(grid: WeightedGrid, u: np.ndarray) -> np.ndarray:
    """dbar u = (e^{i theta}/(2 rho)) (d_s u + i d_theta u) with s = log rho."""
    du = grid._radial_diff @ u
    return _phase(grid) * (du + 1j * _theta_diff(grid, u))


def dbar_adjoint(grid: WeightedGrid, v: np.ndarray) -> np.ndarray:
    """Exact adjoint of dbar_apply for the plain l2 pairing."""
    w = np.conj(_phase(grid)) * v
    return grid._radial_diff.T @ w + 1j * _theta_diff(grid, w)


@dataclass(frozen=True)
class SolveResult:
    u: np.ndarray
    residual_l2: float       # ||dbar u - v|| in the area-weighted l2 norm
    weighted_norm_sq: float  # integral of |u|^2 * sol_weight
    iterations: int
    converged: bool


def _check_solve_inputs(grid: WeightedGrid, v: np.ndarray, sol_weight: np.ndarray):
    if v.shape != grid.nodes.shape:
        raise ValueError("data shape does not match the grid")
    if not np.all(np.isfinite(sol_weight)) or np.any(sol_weight <= 0):
        raise SingularWeight("solution weight must be positive and finite")
    if not np.all(np.isfinite(v.view(float))):
        raise ValueError("data contains non-finite values")
    profile = np.mean(sol_weight, axis=1)
    dev = np.max(np.abs(sol_weight - profile[:, None]) / profile[:, None])
    if dev > 1e-9:
        raise SingularWeight(
            f"solution weight must be radial (theta spread {dev:.1e})")
    return profile


def _finish(grid: WeightedGrid, v, sol_weight, u, iterations, converged) -> SolveResult:
    resid = float(math.sqrt(max(np.sum(grid.area * np.abs(dbar_apply(grid, u) - v) ** 2).real, 0.0)))
    norm_sq = float(np.sum(grid.area * sol_weight * np.abs(u) ** 2).real)
    return SolveResult(u, resid, norm_sq, iterations, converged)


def _solve_direct(grid: WeightedGrid, v: np.ndarray, sol_weight: np.ndarray,
                  pin_inner_rings: int, residual_weight: Optional[np.ndarray]) -> SolveResult:
    """Exact minimal-norm least squares via the angular Fourier transform.

    Multiplication by e^{i theta} shifts discrete Fourier modes by one and the
    centered theta difference acts on mode k as i sin(k dtheta)/dtheta, so
    with radial weights the scaled problem splits into n_t independent
    n_r x n_r systems, each solved by SVD least squares (minimal norm).
    """
    n_r, n_t = grid.nodes.shape
    rw = np.ones(n_r) if residual_weight is None else np.mean(residual_weight, axis=1)
    row = np.sqrt(grid.area[:, 0] * rw)
    col = np.sqrt(grid.area[:, 0] * np.mean(sol_weight, axis=1))
    keep = slice(pin_inner_rings, n_r)
    # fft rows are coefficients of e^{+ik theta}; e^{i theta} shifts k by +1
    v_hat = np.fft.fft(v, axis=1)
    u_hat = np.zeros_like(v_hat)
    half = 1.0 / (2.0 * grid.radii)
    base = grid._radial_diff
    for k in range(n_t):
        mu = math.sin(k * grid.d_theta) / grid.d_theta
        op = half[:, None] * (base - mu * np.eye(n_r))
        b_mat = (row[:, None] * op / col[None, :])[:, keep]
        rhs = row * v_hat[:, (k + 1) % n_t]
        x, *_ = np.linalg.lstsq(b_mat, rhs, rcond=None)
        u_hat[keep, k] = x / col[keep]
    u = np.fft.ifft(u_hat, axis=1)
    return _finish(grid, v, sol_weight, u, n_t, True)


def _solve_cgls(grid: WeightedGrid, v: np.ndarray, sol_weight: np.ndarray,
                pin_inner_rings: int, tol: float, maxiter: int,
                residual_weight: Optional[np.ndarray] = None) -> SolveResult:
    """Conjugate gradient on the weighted normal equations, from zero."""
    rw = np.ones_like(grid.area) if residual_weight is None else residual_weight
    row = np.sqrt(grid.area * rw)
    col = np.sqrt(grid.area * sol_weight)
    mask = np.ones_like(row)
    if pin_inner_rings:
        mask[:pin_inner_rings, :] = 0.0

    def b_apply(x: np.ndarray) -> np.ndarray:
        return row * dbar_apply(grid, mask * x / col)

    def b_adjoint(y: np.ndarray) -> np.ndarray:
        return mask * dbar_adjoint(grid, row * y) / col

    b = row * v
    x = np.zeros_like(v)
    r = b.copy()
    s = b_adjoint(r)
    p = s.copy()
    gamma = float(np.vdot(s, s).real)
    gamma0 = gamma
    it = 0
    converged = False
    while it < maxiter:
        q = b_apply(p)
        qq = float(np.vdot(q, q).real)
        if qq == 0.0:
            converged = True
            break
        alpha = gamma / qq
        x += alpha * p
        r -= alpha * q
        s = b_adjoint(r)
        gamma_new = float(np.vdot(s, s).real)
        it += 1
        if gamma_new <= (tol * tol) * gamma0:
            converged = True
            break
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new
    if not converged and math.sqrt(gamma / gamma0) > 1e-6:
        raise SolverDivergence(
            f"CGLS did not reach tolerance after {it} iterations "
            f"(relative normal residual {math.sqrt(gamma / gamma0):.2e})")
    return _finish(grid, v, sol_weight, mask * x / col, it, converged)


def dbar_solve(grid: WeightedGrid, v: np.ndarray, sol_weight: np.ndarray,
               pin_inner_rings: int = 0, tol: float = CG_TOL,
               maxiter: int = CG_MAXITER, method: str = "direct",
               residual_weight: Optional[np.ndarray] = None) -> SolveResult:
    """Minimal-weighted-norm least-squares solution of dbar u = v.

    Minimizes the area-weighted residual ||dbar u - v||_{L2}; among the
    minimizers the returned u has least integral |u|^2 sol_weight (the weight
    must be radial).  pin_inner_rings constrains u to vanish on the given
    number of innermost rings, the discrete trace of a weight that is
    non-integrable at the puncture.  residual_weight reweights where the
    discrete inconsistency may land (it is irrelevant for consistent data);
    passing the solution weight enforces the equation uniformly down to the
    puncture.

    method "direct" diagonalizes over angular Fourier modes and solves each
    radial system exactly; "cgls" runs conjugate gradient on the weighted
    normal equations (kept as an independent cross-check).
    """
    _check_solve_inputs(grid, v, sol_weight)
    if np.max(np.abs(v)) == 0.0:
        return SolveResult(np.zeros_like(v), 0.0, 0.0, 0, True)
    if method == "direct":
        return _solve_direct(grid, v, sol_weight, pin_inner_rings, residual_weight)
    if method == "cgls":
        return _solve_cgls(grid, v, sol_weight, pin_inner_rings, tol, maxiter, residual_weight)
    raise ValueError("method must be 'direct' or 'cgls'")
