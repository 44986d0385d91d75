"""Riemann theta functions: truncated lattice sums with an analytic tail
bound, the translation laws, three-factor products with shifted arguments,
and least-squares measurement of lattice-translation ratio factors.

Conventions: Theta(zeta) = sum over integer vectors lam of
exp(pi*i*(lam' Z lam + 2 lam' zeta)); the period lattice is generated by the
standard basis u_1..u_l together with m_1 Z u_1, ..., m_l Z u_l.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import cmath
import math

import numpy as np

__all__ = [
    "ThetaParams",
    "LatticePoint",
    "ThetaTriple",
    "TransitionFit",
    "TruncationFailure",
    "NearZeroSample",
    "theta",
    "theta_brute",
    "lattice_shift",
    "theta_multiplier",
    "quasi_periodicity_residual",
    "theta_triple_eval",
    "transition_ratio_fit",
]

HARD_RADIUS_CAP = 200


class TruncationFailure(ArithmeticError):
    pass


class NearZeroSample(ArithmeticError):
    pass


@dataclass(frozen=True)
class ThetaParams:
    """Period matrix data: symmetric Z with positive-definite imaginary part,
    polarization integers, and the truncation tolerance for the series."""

    dimension: int
    period_matrix: Tuple[Tuple[complex, ...], ...]
    polarization: Tuple[int, ...]
    eps: float = 1e-13

    @staticmethod
    def make(period_matrix, polarization=None, eps: float = 1e-13) -> "ThetaParams":
        z = np.asarray(period_matrix, dtype=complex)
        if z.ndim != 2 or z.shape[0] != z.shape[1]:
            raise ValueError("period matrix must be square")
        l = z.shape[0]
        if np.max(np.abs(z - z.T)) > 1e-12:
            raise ValueError("period matrix must be symmetric within 1e-12")
        eigs = np.linalg.eigvalsh(z.imag)
        if eigs.min() <= 0:
            raise ValueError("imaginary part of the period matrix must be positive definite")
        if polarization is None:
            polarization = (1,) * l
        pol = tuple(int(m) for m in polarization)
        if len(pol) != l or any(m < 1 for m in pol):
            raise ValueError("polarization integers must be >= 1, one per dimension")
        return ThetaParams(l, tuple(tuple(complex(v) for v in row) for row in z), pol, float(eps))

    @property
    def z(self) -> np.ndarray:
        return np.asarray(self.period_matrix, dtype=complex)

    @property
    def min_im_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.z.imag).min())

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "period_matrix": [[[v.real, v.imag] for v in row] for row in self.period_matrix],
            "polarization": list(self.polarization),
            "eps": self.eps,
        }

    @staticmethod
    def from_json(obj) -> "ThetaParams":
        z = [[complex(a, b) for a, b in row] for row in obj["period_matrix"]]
        return ThetaParams.make(z, obj.get("polarization"), obj.get("eps", 1e-13))


@dataclass(frozen=True)
class LatticePoint:
    """Lattice vector sum_j p_j u_j + sum_j q_j m_j Z u_j (integer p, q)."""

    integer_part: Tuple[int, ...]
    z_part: Tuple[int, ...]

    @staticmethod
    def make(p: Sequence[int], q: Sequence[int]) -> "LatticePoint":
        return LatticePoint(tuple(int(x) for x in p), tuple(int(x) for x in q))


@dataclass(frozen=True)
class ThetaTriple:
    """Three-factor product Theta(z - v1) Theta(z - v2) Theta(z + v1 + v2)."""

    params: ThetaParams
    v1: Tuple[complex, ...]
    v2: Tuple[complex, ...]

    @staticmethod
    def make(params: ThetaParams, v1, v2) -> "ThetaTriple":
        v1 = tuple(complex(x) for x in np.atleast_1d(v1))
        v2 = tuple(complex(x) for x in np.atleast_1d(v2))
        if len(v1) != params.dimension or len(v2) != params.dimension:
            raise ValueError("shift vectors must match the dimension")
        return ThetaTriple(params, v1, v2)


# ============================================================
# The series
# ============================================================

def _truncation_radius(params: ThetaParams, im_zeta_inf: float, eps: float) -> int:
    """Smallest box radius whose analytic tail bound is below eps.

    Shell |lam|_inf = k contributes at most
    ((2k+1)^l - (2k-1)^l) * exp(-pi*sig*k^2 + 2*pi*l*k*s)
    with sig the least eigenvalue of Im Z and s = |Im zeta|_inf.
    """
    sig = params.min_im_eigenvalue
    l = params.dimension
    s = max(im_zeta_inf, 0.0)

    def shell_bound(k: int) -> float:
        expo = -math.pi * sig * k * k + 2 * math.pi * l * k * s
        if expo > 700:
            return math.inf
        count = (2 * k + 1) ** l - (2 * k - 1) ** l
        return count * math.exp(expo)

    r = max(1, int(2 * l * s / sig) + 1)
    while r <= HARD_RADIUS_CAP:
        tail = 0.0
        k = r + 1
        while True:
            t = shell_bound(k)
            tail += t
            if not math.isfinite(tail) or tail >= eps:
                break
            if t < eps * 1e-8:
                break
            k += 1
            if k > r + 4 * HARD_RADIUS_CAP:
                tail = math.inf
                break
        if tail < eps:
            return r
        r += 1
    raise TruncationFailure(
        f"truncation radius exceeds the cap {HARD_RADIUS_CAP} (|Im zeta|_inf = {s})")


def _lattice_box(l: int, r: int) -> np.ndarray:
    axes = [np.arange(-r, r + 1)] * l
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=-1)


def theta(params: ThetaParams, zeta, radius: Optional[int] = None) -> complex:
    """Theta(zeta) accurate to the params' truncation tolerance."""
    z = params.z
    zv = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if zv.shape != (params.dimension,):
        raise ValueError("zeta must have the period-matrix dimension")
    if radius is None:
        radius = _truncation_radius(params, float(np.max(np.abs(zv.imag))), params.eps)
    lam = _lattice_box(params.dimension, radius)
    quad = np.einsum("ki,ij,kj->k", lam, z, lam)
    lin = lam @ zv
    terms = np.exp(1j * np.pi * (quad + 2.0 * lin))
    return complex(np.sum(terms))


def theta_brute(params: ThetaParams, zeta, extra: int = 5) -> complex:
    """Independent oracle: plain summation over a box padded by `extra`."""
    zv = np.atleast_1d(np.asarray(zeta, dtype=complex))
    r = _truncation_radius(params, float(np.max(np.abs(zv.imag))), params.eps) + extra
    total = 0j
    z = params.z
    for lam in _lattice_box(params.dimension, r):
        lv = lam.astype(complex)
        total += cmath.exp(1j * cmath.pi * (lv @ z @ lv + 2.0 * (lv @ zv)))
    return total


# ============================================================
# Translation laws
# ============================================================

def lattice_shift(params: ThetaParams, point: LatticePoint) -> np.ndarray:
    """Complex vector of the lattice point."""
    p = np.asarray(point.integer_part, dtype=float)
    q = np.asarray(point.z_part, dtype=float)
    if p.shape != (params.dimension,) or q.shape != (params.dimension,):
        raise ValueError("lattice point dimension mismatch")
    mu = np.asarray(params.polarization, dtype=float) * q
    return p.astype(complex) + params.z @ mu


def theta_multiplier(params: ThetaParams, zeta, point: LatticePoint) -> complex:
    """Factor M with Theta(zeta + shift) = M * Theta(zeta): integer translations
    contribute 1, the Z-part mu = polarization * q contributes
    exp(pi*i*(-mu' Z mu - 2 mu' zeta))."""
    zv = np.atleast_1d(np.asarray(zeta, dtype=complex))
    mu = np.asarray(params.polarization, dtype=float) * np.asarray(point.z_part, dtype=float)
    quad = mu @ params.z @ mu
    lin = mu @ zv
    return complex(np.exp(1j * np.pi * (-quad - 2.0 * lin)))


def quasi_periodicity_residual(params: ThetaParams, zeta, point: LatticePoint) -> float:
    """Scaled translation-law defect |Theta(zeta+shift) - M*Theta(zeta)| divided
    by max(1, magnitude of the compared values).

    The scaling keeps the check meaningful when the multiplier is huge; for
    the identity translation the residual is exactly zero.
    """
    zv = np.atleast_1d(np.asarray(zeta, dtype=complex))
    shift = lattice_shift(params, point)
    lhs = theta(params, zv + shift)
    rhs = theta_multiplier(params, zv, point) * theta(params, zv)
    scale = max(1.0, abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale


# ============================================================
# Triples and transition-ratio fits
# ============================================================

def theta_triple_eval(triple: ThetaTriple, zeta) -> complex:
    zv = np.atleast_1d(np.asarray(zeta, dtype=complex))
    v1 = np.asarray(triple.v1, dtype=complex)
    v2 = np.asarray(triple.v2, dtype=complex)
    p = triple.params
    return theta(p, zv - v1) * theta(p, zv - v2) * theta(p, zv + v1 + v2)


@dataclass(frozen=True)
class TransitionFit:
    constant: complex
    linear: Tuple[complex, ...]
    linear_over_2pi_i: Tuple[complex, ...]
    max_residual: float
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "constant": [self.constant.real, self.constant.imag],
            "linear": [[b.real, b.imag] for b in self.linear],
            "linear_over_2pi_i": [[b.real, b.imag] for b in self.linear_over_2pi_i],
            "max_residual": self.max_residual,
            "samples": self.samples,
            "seed": self.seed,
        }


def _parallotope_points(params: ThetaParams, count: int, seed: int) -> List[np.ndarray]:
    """Fixed-seed uniform samples over the unit parallotope spanned by the
    lattice basis u_j and m_j Z u_j."""
    rng = np.random.default_rng(seed)
    l = params.dimension
    m = np.asarray(params.polarization, dtype=float)
    pts = []
    for _ in range(count):
        x = rng.uniform(0.0, 1.0, size=l)
        y = rng.uniform(0.0, 1.0, size=l)
        pts.append(x.astype(complex) + params.z @ (m * y))
    return pts


def transition_ratio_fit(numerator: ThetaTriple, denominator: ThetaTriple,
                         point: LatticePoint, samples: int = 20, seed: int = 0,
                         guard: float = 1e-6, max_draws: int = 400) -> TransitionFit:
    """Measure r(zeta) = F(zeta+shift)/F(zeta) for the quotient F of two
    triples and fit log r ~ c + b' zeta by least squares.

    Sample points are drawn from the unit parallotope (fixed seed) and are
    rejected while any of the four triple values is below the zero guard;
    NearZeroSample is raised when not enough clean samples can be drawn.
    """
    params = numerator.params
    if denominator.params.to_json() != params.to_json():
        raise ValueError("both triples must share the same parameters")
    shift = lattice_shift(params, point)
    pts: List[np.ndarray] = []
    vals: List[complex] = []
    rng_seed = seed
    draws = 0
    while len(pts) < samples:
        batch = _parallotope_points(params, samples, rng_seed + draws)
        for zeta in batch:
            if len(pts) >= samples:
                break
            draws += 1
            if draws > max_draws:
                raise NearZeroSample(
                    f"could not draw {samples} samples clear of the zero guard {guard}")
            n0 = theta_triple_eval(numerator, zeta)
            d0 = theta_triple_eval(denominator, zeta)
            n1 = theta_triple_eval(numerator, zeta + shift)
            d1 = theta_triple_eval(denominator, zeta + shift)
            if min(abs(n0), abs(d0), abs(n1), abs(d1)) < guard:
                continue
            pts.append(zeta)
            vals.append((n1 / d1) / (n0 / d0))
    logs = np.array([cmath.log(v) for v in vals])
    design = np.column_stack([np.ones(len(pts), dtype=complex), np.array(pts)])
    coef, *_ = np.linalg.lstsq(design, logs, rcond=None)
    fitted = design @ coef
    resid = float(np.max(np.abs(logs - fitted)))
    c = complex(coef[0])
    b = tuple(complex(x) for x in coef[1:])
    b_units = tuple(x / (2j * np.pi) for x in b)
    return TransitionFit(c, b, b_units, resid, samples, seed)
