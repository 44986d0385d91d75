"""Hyperbolic cut-offs, blowup weights, the cyclic-cover integral transform,
weighted minimal-norm dbar experiments with the explicit extension constant,
and the smoothed punctured-disk curvature identities.

Numerical conventions, pinned per operation by their reference values:
the cyclic-cover transform uses the form measure i dw ^ dwbar = 2 dx dy,
while plain L2 norms (solver, extension ratios) and the annulus log-integral
use the ordinary area measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import cmath
import math

import numpy as np

from .grid import WeightedGrid, GridField, SolveResult, dbar_apply, dbar_solve

__all__ = [
    "CutoffSpec",
    "TwoWeightSpec",
    "OutOfDomain",
    "QuadratureFailure",
    "OutOfAdmissibleRegion",
    "StencilOutOfDomain",
    "cutoff_eval",
    "dbar_cutoff_eval",
    "cutoff_band",
    "pushforward_integral_check",
    "radial_integral_eval",
    "hyperbolic_power_invariance",
    "ot_constant",
    "ot_constant_optimize",
    "ot_extension_experiment",
    "curvature_identity_check",
    "two_weight_pointwise_check",
    "check_subharmonic",
]

SMOOTHSTEP_SLOPE = 15.0 / 8.0  # max |S'| of the quintic ramp


class OutOfDomain(ValueError):
    pass


class QuadratureFailure(ArithmeticError):
    pass


class OutOfAdmissibleRegion(ValueError):
    pass


class StencilOutOfDomain(ValueError):
    pass


# ============================================================
# Cut-off functions
# ============================================================

def _smoothstep(t: float) -> float:
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_prime(t: float) -> float:
    if t <= 0.0 or t >= 1.0:
        return 0.0
    return 30.0 * t * t * (1.0 - t) ** 2


@dataclass(frozen=True)
class CutoffSpec:
    """Radial ramp in the hyperbolic variable x = log log (1/|w|^{2/m}).

    The profile is the quintic smoothstep rescaled to the band
    [log log(1/r2^2), log log(1/r1^2)], which is the same band for every m;
    the scaled cut-off is then 1 below r1^m and 0 above r2^m.
    """

    r1: float
    r2: float
    m: int = 1

    def __post_init__(self):
        if not (0 < self.r1 < self.r2 < 1):
            raise ValueError("need 0 < r1 < r2 < 1")
        if self.m < 1:
            raise ValueError("m must be a positive integer")

    @property
    def x_lo(self) -> float:
        return math.log(math.log(1.0 / self.r2**2))

    @property
    def x_hi(self) -> float:
        return math.log(math.log(1.0 / self.r1**2))

    @property
    def slope_constant(self) -> float:
        """The eta achieved by the profile: max|ramp'| * (band width)."""
        return SMOOTHSTEP_SLOPE


def _xvar(spec: CutoffSpec, w: complex) -> float:
    a = abs(w)
    if a <= 0.0 or a >= 1.0:
        raise OutOfDomain(f"|w| = {a} outside the punctured unit disk")
    return math.log(math.log(1.0 / a ** (2.0 / spec.m)))


def cutoff_eval(spec: CutoffSpec, w: complex) -> float:
    """Scaled cut-off value in [0, 1]: 1 below r1^m, 0 above r2^m."""
    x = _xvar(spec, w)
    return _smoothstep((x - spec.x_lo) / (spec.x_hi - spec.x_lo))


def dbar_cutoff_eval(spec: CutoffSpec, w: complex) -> complex:
    """Coefficient of dwbar in dbar of the scaled cut-off:
    ramp'(x) * (-1) / (wbar * log(1/|w|^2))."""
    x = _xvar(spec, w)
    width = spec.x_hi - spec.x_lo
    lam_prime = _smoothstep_prime((x - spec.x_lo) / width) / width
    if lam_prime == 0.0:
        return 0j
    return -lam_prime / (w.conjugate() * math.log(1.0 / abs(w) ** 2))


def cutoff_band(spec: CutoffSpec) -> Tuple[float, float]:
    """Support radii of the dbar of the scaled cut-off."""
    return (spec.r1**spec.m, spec.r2**spec.m)


def hyperbolic_power_invariance(radii: Sequence[float], m: float) -> float:
    """Spread of log log(1/r) - log log(1/r^{1/m}) over a radius sweep; the
    difference is the constant log m, so the spread vanishes."""
    vals = [math.log(math.log(1.0 / r)) - math.log(math.log(1.0 / r ** (1.0 / m)))
            for r in radii]
    return max(vals) - min(vals)


# ============================================================
# Cyclic-cover transform and the annulus log-integral
# ============================================================

def _annulus_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                  n_r: int, n_t: int) -> float:
    grid = WeightedGrid.make(a, b, n_r, n_t)
    vals = f(grid.nodes)
    out = float(np.real(grid.integrate(vals)))
    if not math.isfinite(out):
        raise QuadratureFailure("non-finite quadrature value")
    return out


def pushforward_integral_check(u_func: Callable[[np.ndarray], np.ndarray], m: int,
                               a: float, b: float, n_r: int = 257,
                               n_t: int = 64) -> Dict[str, float]:
    """Quadrature check of the cyclic-cover transform
    int |U(w)|^2 |dw|^2/|w|^2 = m * int |U(zeta^m)|^2 |dzeta|^2/|zeta|^2,
    with |d.|^2 the form measure (twice the area).  Returns both sides and
    the ratio lhs / (m * inner)."""
    if a <= 0 or b <= a:
        raise ValueError("need 0 < a < b")
    lhs = 2.0 * _annulus_quad(lambda w: np.abs(u_func(w)) ** 2 / np.abs(w) ** 2,
                              a, b, n_r, n_t)
    inner = 2.0 * _annulus_quad(lambda z: np.abs(u_func(z**m)) ** 2 / np.abs(z) ** 2,
                                a ** (1.0 / m), b ** (1.0 / m), n_r, n_t)
    return {"lhs": lhs, "rhs": m * inner, "inner": inner, "ratio": lhs / (m * inner)}


def radial_integral_eval(r1: float, r2: float, n_r: int = 513, n_t: int = 32) -> Dict[str, float]:
    """Quadrature of int_{r1<|z|<r2} dA / (|z|^2 (log 1/|z|^2)^2), reported
    against the antiderivative value (pi/2)(1/log(1/r2) - 1/log(1/r1)) and
    the same expression without the pi/2 factor."""
    if not (0 < r1 < r2 < 1):
        raise ValueError("need 0 < r1 < r2 < 1")
    quad = _annulus_quad(
        lambda z: 1.0 / (np.abs(z) ** 2 * np.log(1.0 / np.abs(z) ** 2) ** 2),
        r1, r2, n_r, n_t)
    delta = 1.0 / math.log(1.0 / r2) - 1.0 / math.log(1.0 / r1)
    return {
        "quadrature": quad,
        "closed_form_half_pi": 0.5 * math.pi * delta,
        "closed_form_bare": delta,
    }


# ============================================================
# The explicit extension constant
# ============================================================

def _log_factor(r1: float, r2: float, variant: str) -> float:
    if variant == "difference":
        # log log(1/r1^2) - log log(1/r2^2), cancellation-stable near r1 = r2
        val = math.log1p(2.0 * math.log(r2 / r1) / math.log(1.0 / r2**2))
    elif variant == "displayed":
        arg = math.log(r2**2 / r1**2)
        if arg <= 1.0:
            raise OutOfAdmissibleRegion(
                f"log log(r2^2/r1^2) needs r2/r1 > e^(1/2); got {r2/r1:.4f}")
        val = math.log(arg)
    else:
        raise ValueError("variant must be 'difference' or 'displayed'")
    if val <= 0.0:
        raise OutOfAdmissibleRegion("log-log factor is not positive")
    return val


def ot_constant(r1: float, r2: float, variant: str = "difference") -> float:
    """Extension-constant formula
    pi / (r1^2 * L(r1,r2)) * (1/log(1/r2) - 1/log(1/r1)), with L either the
    band width log log(1/r1^2) - log log(1/r2^2) ('difference', always
    admissible) or the collapsed form log log(r2^2/r1^2) ('displayed').

    The difference-variant infimum is approached along r2 -> r1 (limit value
    2 pi e at r = e^{-1/2}); all factors are evaluated in cancellation-stable
    form so the optimizer behaves there.
    """
    if not (0 < r1 < r2 < 1):
        raise OutOfAdmissibleRegion("need 0 < r1 < r2 < 1")
    delta = math.log(r2 / r1) / (math.log(1.0 / r1) * math.log(1.0 / r2))
    return math.pi * delta / (r1**2 * _log_factor(r1, r2, variant))


def ot_constant_optimize(variant: str = "difference",
                         box: Tuple[float, float, float, float] = (0.02, 0.98, 0.02, 0.98),
                         grid_n: int = 60, refinements: int = 14) -> Dict[str, float]:
    """Coordinate-refined grid search for the minimizing (r1, r2)."""
    lo1, hi1, lo2, hi2 = box
    best = (math.inf, 0.0, 0.0)
    for _ in range(refinements):
        r1s = np.linspace(lo1, hi1, grid_n)
        r2s = np.linspace(lo2, hi2, grid_n)
        for r1 in r1s:
            for r2 in r2s:
                if not (0 < r1 < r2 < 1) or r2 - r1 < 1e-9:
                    continue
                try:
                    c = ot_constant(float(r1), float(r2), variant)
                except OutOfAdmissibleRegion:
                    continue
                if c < best[0]:
                    best = (c, float(r1), float(r2))
        span1 = (hi1 - lo1) * 2.5 / grid_n
        span2 = (hi2 - lo2) * 2.5 / grid_n
        lo1, hi1 = max(best[1] - span1, 1e-4), min(best[1] + span1, 1 - 1e-4)
        lo2, hi2 = max(best[2] - span2, 1e-4), min(best[2] + span2, 1 - 1e-4)
    return {"c": best[0], "r1": best[1], "r2": best[2], "variant": variant}


# ============================================================
# The extension experiment
# ============================================================

def check_subharmonic(phi: Callable[[np.ndarray], np.ndarray], nodes: np.ndarray,
                      step: float = 1e-3, tol: float = 1e-8) -> float:
    """Minimum finite-difference Laplacian of phi over the sample nodes."""
    lap = (phi(nodes + step) + phi(nodes - step) + phi(nodes + 1j * step)
           + phi(nodes - 1j * step) - 4.0 * phi(nodes)) / step**2
    worst = float(np.min(np.real(lap)))
    if worst < -tol:
        raise ValueError(f"weight is not subharmonic on the grid (min Laplacian {worst:.2e})")
    return worst


def ot_extension_experiment(phi: Callable[[np.ndarray], np.ndarray], f0: complex,
                            spec: CutoffSpec, rho_min: float = 1e-3,
                            n_r: int = 257, n_t: int = 256,
                            pin_inner_rings: int = 1,
                            constant_variant: str = "difference",
                            method: str = "direct") -> Dict[str, object]:
    """Extension-from-the-puncture pipeline at fixed m.

    Solves dbar u = f0 * dbar(cutoff) with minimal norm against the weight
    e^{-phi} / (|w|^2 (1 + |w|^{2/m})^2), the puncture behavior realized by
    pinning the innermost ring(s); returns F = cutoff * f0 - u with its
    interpolated center value, dbar residual, and the weighted-norm ratio
    against the closed-form constant.
    """
    grid = WeightedGrid.make(rho_min, 1.0 - 1e-9, n_r, n_t)  # open unit disk
    check_subharmonic(phi, grid.nodes[:: max(1, n_r // 16), :: max(1, n_t // 16)])
    lam = np.vectorize(lambda w: cutoff_eval(spec, w))(grid.nodes)
    v = f0 * np.vectorize(lambda w: dbar_cutoff_eval(spec, w))(grid.nodes)
    t = np.abs(grid.nodes) ** 2
    weight = np.exp(-np.real(phi(grid.nodes))) / (t * (1.0 + t ** (1.0 / spec.m)) ** 2)
    sol = dbar_solve(grid, v, weight, pin_inner_rings=pin_inner_rings, method=method,
                     residual_weight=weight)
    f_field = lam * f0 - sol.u
    # interpolate F(0): angular mean on a plateau ring (annihilates w^{+-k})
    inner_r, _ = cutoff_band(spec)
    plateau = max(range(grid.n_r), key=lambda i: (grid.radii[i] < inner_r / 3.0, grid.radii[i]))
    f_center = grid.ring_mean(f_field, plateau)
    dbar_resid = float(np.sqrt(np.real(
        grid.integrate(np.abs(dbar_apply(grid, f_field)) ** 2))))
    weighted = float(np.real(grid.integrate(
        np.abs(f_field) ** 2 * np.exp(-np.real(phi(grid.nodes))))))
    bound = ot_constant(spec.r1, spec.r2, constant_variant)
    return {
        "f_field": GridField(f_field, role="F"),
        "u_field": GridField(sol.u, role="u"),
        "grid": grid,
        "f_center": f_center,
        "center_defect": abs(f_center - f0),
        "dbar_residual": dbar_resid,
        "solver_residual": sol.residual_l2,
        "solution_norm_sq": sol.weighted_norm_sq,
        "weighted_norm": weighted,
        "ratio": weighted / abs(f0) ** 2 if f0 != 0 else 0.0,
        "bound": bound,
        "bound_variant": constant_variant,
        "iterations": sol.iterations,
    }


# ============================================================
# Smoothed curvature identities and the two-weight check
# ============================================================

def _smoothed_log(w: complex, eps: float) -> float:
    return math.log(1.0 / (abs(w) ** 2 + eps**2))


def curvature_identity_check(eps: float, samples: Sequence[complex],
                             step: float = 1e-3) -> float:
    """Max defect of the smoothed identity
    e^{-kappa} * Theta_kappa = eps^2/(t+eps^2)^2 + e^{-kappa} |omega_kappa|^2
    with e^{-kappa} = log(1/(t+eps^2)), t = |w|^2; the curvature side is a
    finite-difference complex Hessian, the right side is closed form."""
    worst = 0.0
    for w in samples:
        t = abs(w) ** 2
        if t + eps**2 >= 1.0:
            raise OutOfDomain(f"sample {w} outside the admissible region")
        for dw in (step, -step, 1j * step, -1j * step):
            z = w + dw
            if abs(z) ** 2 + eps**2 >= 1.0:
                raise StencilOutOfDomain(f"stencil at {w} exits the admissible region")

        def kappa(z: complex) -> float:
            return -math.log(_smoothed_log(z, eps))

        lap = (kappa(w + step) + kappa(w - step) + kappa(w + 1j * step)
               + kappa(w - 1j * step) - 4.0 * kappa(w)) / (4.0 * step**2)
        lhs = _smoothed_log(w, eps) * lap
        denom = (t + eps**2) ** 2
        rhs = eps**2 / denom + t / (denom * _smoothed_log(w, eps))
        worst = max(worst, abs(lhs - rhs))
    return worst


@dataclass(frozen=True)
class TwoWeightSpec:
    """Smoothed hyperbolic weight family: e^{-kappa} = log(1/(t+eps^2)) and
    gamma = 1/(t+eps^2), with the derived alpha and beta factors."""

    eps: float

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def metric(self, w: complex) -> float:
        return _smoothed_log(w, self.eps)

    def gamma(self, w: complex) -> float:
        return 1.0 / (abs(w) ** 2 + self.eps**2)

    def alpha(self, w: complex) -> float:
        return math.sqrt(self.metric(w))

    def beta(self, w: complex) -> float:
        return math.sqrt(self.gamma(w) + self.metric(w))

    def admissible(self, w: complex) -> bool:
        return abs(w) ** 2 + self.eps**2 < 1.0


def two_weight_pointwise_check(spec: TwoWeightSpec,
                               theta_phi: Callable[[complex], float],
                               samples: Sequence[complex],
                               step: float = 1e-3) -> Dict[str, float]:
    """Pointwise verification of the two-weight hypotheses on smoothed data.

    (i)  e^{-kappa} Theta_kappa >= c0 * [eps^2/(t+eps^2)^2 / (2 pi)]
         + e^{-kappa}|omega_kappa|^2, reporting the largest admissible c0
         (the curvature side by finite differences, the rest closed form);
    (ii) |e^{-kappa} omega_kappa|^2 <= gamma * Theta_phi, reporting the
         minimum slack.
    Also reports alpha, beta, and sup |w| beta over the samples.
    """
    eps = spec.eps
    c0_min = math.inf
    slack_min = math.inf
    sup_wbeta = 0.0
    for w in samples:
        if not spec.admissible(w):
            raise OutOfDomain(f"sample {w} outside the admissible region")
        for dw in (step, -step, 1j * step, -1j * step):
            if not spec.admissible(w + dw):
                raise StencilOutOfDomain(f"stencil at {w} exits the admissible region")
        t = abs(w) ** 2
        lw = spec.metric(w)

        def kappa(z: complex) -> float:
            return -math.log(_smoothed_log(z, eps))

        theta_kappa = (kappa(w + step) + kappa(w - step) + kappa(w + 1j * step)
                       + kappa(w - 1j * step) - 4.0 * kappa(w)) / (4.0 * step**2)
        conn_sq = t / ((t + eps**2) ** 2 * lw)  # e^{-kappa} |omega_kappa|^2
        dirac = eps**2 / ((t + eps**2) ** 2 * 2.0 * math.pi)
        c0_min = min(c0_min, (lw * theta_kappa - conn_sq) / dirac)
        lhs_ii = t / (t + eps**2) ** 2  # |e^{-kappa} omega_kappa|^2
        slack_min = min(slack_min, spec.gamma(w) * theta_phi(w) - lhs_ii)
        sup_wbeta = max(sup_wbeta, abs(w) * spec.beta(w))
    return {
        "c0": c0_min,
        "slack_ii": slack_min,
        "sup_w_beta": sup_wbeta,
        "eps": eps,
        "step": step,
    }
