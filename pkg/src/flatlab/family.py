"""Explicit holomorphic family of flat line bundles on an elliptic-curve
model, with its metrics, twisted dbar structure, rank-2 jet bundle, and the
curvature sweep of the divisor-modified family metric.

The curve is C/(Z + tau0*Z) with tau0 = i.  Charts are overlapping rectangles
given by lifted coordinates; the primitive of the chosen holomorphic 1-form
omega = w*dz on chart j is f_j(z) = w*z + s_j in the chart's lift, so the
transition constants c_jk = f_k - f_j pick up lattice vectors on wrap-around
overlaps and the family has honest monodromy.

Sign convention: with exponent_sign = -1 the family transition is
exp(-tau*conj(c_jk))*g0_jk and the fiber metric is h0_j*exp(-2Re(tau*conj(f_j)));
exponent_sign = +1 flips both exponents (the modified-metric form).  Either
choice is internally consistent and is recorded in reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import cmath
import itertools
import math

import numpy as np

from .theta import ThetaParams, theta

__all__ = [
    "Chart",
    "ChartFamily",
    "FamilyMetricSpec",
    "CurvatureReport",
    "NoOverlap",
    "OutOfChart",
    "StencilOutOfChart",
    "StencilOutOfDomain",
    "DivisorTooClose",
    "standard_family",
    "validate_family",
    "family_transition",
    "family_metric",
    "dbar_tau_residual",
    "jet_transition",
    "jet_metric",
    "jet_frame_change",
    "jet_compatibility_residual",
    "curvature_semipositivity",
    "standard_curvature_grid",
]

LATTICE_TAU0 = 1j
DIVISOR_GUARD = 1e-3


class NoOverlap(ValueError):
    pass


class OutOfChart(ValueError):
    pass


class StencilOutOfChart(ValueError):
    pass


class StencilOutOfDomain(ValueError):
    pass


class DivisorTooClose(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    label: str
    x0: float
    y0: float
    width: float
    height: float
    shift: complex = 0j  # additive constant s_j of the primitive

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (self.x0 + margin <= z.real <= self.x0 + self.width - margin and
                self.y0 + margin <= z.imag <= self.y0 + self.height - margin)

    def center(self) -> complex:
        return complex(self.x0 + self.width / 2, self.y0 + self.height / 2)


@dataclass(frozen=True)
class ChartFamily:
    charts: Tuple[Chart, ...]
    form_coefficient: complex = 1.0 + 0j  # omega = (coefficient) dz
    base_metric: Tuple[float, ...] = ()
    exponent_sign: int = -1

    @staticmethod
    def make(charts: Sequence[Chart], form_coefficient: complex = 1.0,
             base_metric: Optional[Sequence[float]] = None,
             exponent_sign: int = -1) -> "ChartFamily":
        charts = tuple(charts)
        if base_metric is None:
            base_metric = (1.0,) * len(charts)
        if len(base_metric) != len(charts):
            raise ValueError("one base metric constant per chart")
        if any(h <= 0 for h in base_metric):
            raise ValueError("base metric constants must be positive")
        if exponent_sign not in (-1, 1):
            raise ValueError("exponent_sign must be -1 or +1")
        return ChartFamily(charts, complex(form_coefficient), tuple(float(h) for h in base_metric),
                           exponent_sign)

    # ---- chart geometry -------------------------------------------------
    def primitive(self, j: int, z: complex) -> complex:
        """f_j(z) = omega-primitive in the chart-j lift."""
        return self.form_coefficient * z + self.charts[j].shift

    def overlap(self, j: int, k: int):
        """Lattice offset and rectangle (in chart-j coordinates) of the
        designated connected overlap of charts j and k."""
        if j == k:
            raise NoOverlap(f"chart {j} with itself")
        a, b = self.charts[j], self.charts[k]
        found = None
        for mx in (-1, 0, 1):
            for my in (-1, 0, 1):
                lam = complex(mx, 0) + LATTICE_TAU0 * my
                x0 = max(a.x0, b.x0 + lam.real)
                x1 = min(a.x0 + a.width, b.x0 + b.width + lam.real)
                y0 = max(a.y0, b.y0 + lam.imag)
                y1 = min(a.y0 + a.height, b.y0 + b.height + lam.imag)
                if x1 > x0 + 1e-12 and y1 > y0 + 1e-12:
                    if found is not None:
                        raise NoOverlap(
                            f"charts {j},{k} overlap along more than one lattice offset")
                    found = (lam, (x0, x1, y0, y1))
        if found is None:
            raise NoOverlap(f"charts {j} and {k} do not overlap")
        return found

    def to_chart(self, j: int, k: int, z: complex) -> complex:
        """Coordinates of the chart-j point z in the chart-k lift."""
        lam, _ = self.overlap(j, k)
        return z - lam

    def transition_constant(self, j: int, k: int) -> complex:
        """c_jk = f_k - f_j, constant on the designated overlap."""
        lam, _ = self.overlap(j, k)
        return self.charts[k].shift - self.charts[j].shift - self.form_coefficient * lam

    def base_transition(self, j: int, k: int) -> complex:
        """g0_jk for the background flat bundle (unit modulus, cocycle)."""
        hj, hk = self.base_metric[j], self.base_metric[k]
        return cmath.sqrt(hj / hk)  # positive real; |g0|^2 = h0_j-compatible

    def overlap_samples(self, j: int, k: int, count: int = 5) -> List[complex]:
        _, (x0, x1, y0, y1) = self.overlap(j, k)
        xs = np.linspace(x0, x1, count + 2)[1:-1]
        ys = np.linspace(y0, y1, count + 2)[1:-1]
        return [complex(x, y) for x, y in zip(xs, ys)]

    def triple_overlap_point(self, j: int, k: int, l: int) -> Optional[complex]:
        """A chart-j point common to all three charts, if any."""
        try:
            _, (ax0, ax1, ay0, ay1) = self.overlap(j, k)
            lam, _ = self.overlap(j, l)
            b = self.charts[l]
            bx0, bx1 = b.x0 + lam.real, b.x0 + b.width + lam.real
            by0, by1 = b.y0 + lam.imag, b.y0 + b.height + lam.imag
        except NoOverlap:
            return None
        x0, x1 = max(ax0, bx0), min(ax1, bx1)
        y0, y1 = max(ay0, by0), min(ay1, by1)
        if x1 > x0 + 1e-12 and y1 > y0 + 1e-12:
            return complex((x0 + x1) / 2, (y0 + y1) / 2)
    # consistency of the three pairwise lattice offsets on the common region
    # is what the triple additivity check below verifies

    def to_json(self) -> dict:
        return {
            "charts": [{"label": c.label, "x0": c.x0, "y0": c.y0, "width": c.width,
                        "height": c.height, "shift": [c.shift.real, c.shift.imag]}
                       for c in self.charts],
            "form_coefficient": [self.form_coefficient.real, self.form_coefficient.imag],
            "base_metric": list(self.base_metric),
            "exponent_sign": self.exponent_sign,
        }

    @staticmethod
    def from_json(obj: Mapping) -> "ChartFamily":
        charts = [Chart(c["label"], c["x0"], c["y0"], c["width"], c["height"],
                        complex(*c.get("shift", [0, 0]))) for c in obj["charts"]]
        fc = obj.get("form_coefficient", [1, 0])
        return ChartFamily.make(charts, complex(*fc), obj.get("base_metric"),
                                obj.get("exponent_sign", -1))


def standard_family(exponent_sign: int = -1, form_coefficient: complex = 1.0) -> ChartFamily:
    """3x3 product-of-arcs atlas of the square torus with connected pairwise
    overlaps; per-chart primitive shifts make the f_j genuinely distinct."""
    arcs = [(-0.05, 0.47), (0.28, 0.47), (0.61, 0.47)]  # (start, length), wraps at 1
    charts = []
    for a, (ax, aw) in enumerate(arcs):
        for b, (bx, bw) in enumerate(arcs):
            shift = complex(0.01 * (3 * a + b), -0.02 * b + 0.005 * a)
            charts.append(Chart(f"U{a}{b}", ax, bx, aw, bw, shift))
    return ChartFamily.make(charts, form_coefficient=form_coefficient,
                            exponent_sign=exponent_sign)


# ============================================================
# Validation
# ============================================================

def validate_family(cf: ChartFamily, samples: int = 5, tol: float = 1e-12) -> ChartFamily:
    """Check constancy of c_jk across overlap samples, additivity on triple
    overlaps, and the base-metric compatibility h0_j |g0_jk|^2 = h0_k."""
    n = len(cf.charts)
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            try:
                lam, _ = cf.overlap(j, k)
            except NoOverlap:
                continue
            values = []
            for z in cf.overlap_samples(j, k, samples):
                zk = z - lam
                values.append(cf.primitive(k, zk) - cf.primitive(j, z))
            spread = max(abs(v - values[0]) for v in values)
            if spread > tol:
                raise ValueError(f"c[{j},{k}] varies across the overlap (spread {spread})")
            if abs(values[0] - cf.transition_constant(j, k)) > tol:
                raise ValueError(f"c[{j},{k}] mismatch with the closed form")
            h_rel = cf.base_metric[j] * abs(cf.base_transition(j, k)) ** 2
            if abs(h_rel - cf.base_metric[k]) > tol * max(1.0, cf.base_metric[k]):
                raise ValueError(f"base metric incompatible across ({j},{k})")
    for j, k, l in itertools.permutations(range(n), 3):
        if cf.triple_overlap_point(j, k, l) is None:
            continue
        c_sum = cf.transition_constant(j, k) + cf.transition_constant(k, l)
        if abs(c_sum - cf.transition_constant(j, l)) > tol:
            raise ValueError(f"c additivity fails on triple ({j},{k},{l})")
    return cf


# ============================================================
# Family transitions, metrics, twisted dbar
# ============================================================

def family_transition(cf: ChartFamily, tau: complex, j: int, k: int) -> complex:
    """Constant transition of the tau-member bundle on the (j,k) overlap."""
    c = cf.transition_constant(j, k)
    return cmath.exp(cf.exponent_sign * tau * c.conjugate()) * cf.base_transition(j, k)


def family_metric(cf: ChartFamily, tau: complex, j: int, z: complex) -> float:
    """Fiber metric weight of the tau-member bundle at z in chart j."""
    if not cf.charts[j].contains(z):
        raise OutOfChart(f"point {z} outside chart {j}")
    f = cf.primitive(j, z)
    return cf.base_metric[j] * math.exp(cf.exponent_sign * 2.0 * (tau * f.conjugate()).real)


def dbar_tau_residual(cf: ChartFamily, tau: complex, j: int, z: complex,
                      step: float = 1e-3) -> float:
    """Defect of the twisted holomorphy equation for the canonical frame
    section s(z) = exp(tau * conj(f_j(z))), measured by central differences:
    |dbar s - tau * s * conj(omega)|."""
    if not cf.charts[j].contains(z, margin=step):
        raise StencilOutOfChart(f"stencil at {z} leaves chart {j}")

    def s(w: complex) -> complex:
        return cmath.exp(tau * cf.primitive(j, w).conjugate())

    dx = (s(z + step) - s(z - step)) / (2 * step)
    dy = (s(z + 1j * step) - s(z - 1j * step)) / (2 * step)
    dbar = 0.5 * (dx + 1j * dy)
    return abs(dbar - tau * s(z) * cf.form_coefficient.conjugate())


# ============================================================
# Jet bundle of order one in the family direction
# ============================================================

def jet_frame_change(cf: ChartFamily, j: int, z: complex) -> np.ndarray:
    """Matrix converting (s, d_tau s) to (s, covariant d_tau s)."""
    f = cf.primitive(j, z)
    return np.array([[1.0, 0.0], [-2.0 * f.conjugate(), 1.0]], dtype=complex)


def jet_transition(cf: ChartFamily, tau: complex, j: int, k: int, z: complex) -> np.ndarray:
    """2x2 transition of the jet bundle from chart k to chart j at the chart-j
    point z: the scalar family transition times the unit lower-triangular
    correction 2(conj f_j - conj f_k)."""
    lam, rect = cf.overlap(j, k)
    x0, x1, y0, y1 = rect
    if not (x0 - 1e-12 <= z.real <= x1 + 1e-12 and y0 - 1e-12 <= z.imag <= y1 + 1e-12):
        raise NoOverlap(f"point {z} outside the ({j},{k}) overlap")
    fj = cf.primitive(j, z)
    fk = cf.primitive(k, z - lam)
    scalar = family_transition(cf, tau, j, k)
    low = 2.0 * (fj.conjugate() - fk.conjugate())
    return scalar * np.array([[1.0, 0.0], [low, 1.0]], dtype=complex)


def jet_metric(cf: ChartFamily, tau: complex, j: int, z: complex) -> np.ndarray:
    """Positive-definite 2x2 metric h_j * [[1+4|f|^2, -2 conj f], [-2 f, 1]]."""
    h = family_metric(cf, tau, j, z)
    f = cf.primitive(j, z)
    a = 1.0 + 4.0 * abs(f) ** 2
    return h * np.array([[a, -2.0 * f.conjugate()], [-2.0 * f, 1.0]], dtype=complex)


def jet_compatibility_residual(cf: ChartFamily, tau: complex, j: int, k: int,
                               z: complex) -> float:
    """Defect of the metric gluing G^T H_j conj(G) = H_k for the displayed
    metric (its pairing is v^T H conj(v))."""
    g = jet_transition(cf, tau, j, k, z)
    hj = jet_metric(cf, tau, j, z)
    lam, _ = cf.overlap(j, k)
    hk = jet_metric(cf, tau, k, z - lam)
    glued = g.T @ hj @ np.conj(g)
    return float(np.max(np.abs(glued - hk)))


# ============================================================
# Divisor data and the curvature sweep
# ============================================================

_THETA_I = ThetaParams.make([[LATTICE_TAU0]])


@dataclass(frozen=True)
class FamilyMetricSpec:
    """Weights of the divisor-modified family metric.

    divisor "theta": the section is the standard theta value in the chart
    lift and the divisor metric potential is chi_j = scale*2*pi*(Im z)^2,
    whose curvature scale*pi dominates 2|omega|^2 for the shipped scale.
    divisor "none": section 1, potential 0 (for degenerate flat checks).
    """

    eta: float
    divisor: str = "theta"
    divisor_scale: float = 1.0
    include_tau_weight: bool = True

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.divisor not in ("theta", "none"):
            raise ValueError("divisor kind must be 'theta' or 'none'")

    def divisor_section(self, cf: ChartFamily, j: int, z: complex) -> complex:
        if self.divisor == "none":
            return 1.0 + 0j
        return theta(_THETA_I, [z])

    def divisor_potential(self, cf: ChartFamily, j: int, z: complex) -> float:
        if self.divisor == "none":
            return 0.0
        return self.divisor_scale * 2.0 * math.pi * z.imag**2

    def to_json(self) -> dict:
        return {"eta": self.eta, "divisor": self.divisor,
                "divisor_scale": self.divisor_scale,
                "include_tau_weight": self.include_tau_weight}


@dataclass(frozen=True)
class CurvatureReport:
    mode: str
    eta: float
    step: float
    exponent_sign: int
    points: int
    min_eigenvalue: float
    tau_margin: Optional[float]
    min_divisor_distance: float

    def to_json(self) -> dict:
        return {
            "mode": self.mode, "eta": self.eta, "step": self.step,
            "exponent_sign": self.exponent_sign, "points": self.points,
            "min_eigenvalue": self.min_eigenvalue, "tau_margin": self.tau_margin,
            "min_divisor_distance": self.min_divisor_distance,
        }


def _neg_log_metric(cf: ChartFamily, spec: FamilyMetricSpec, k_mult: int,
                    j: int, z: complex, tau: complex) -> float:
    """-log of the modified family metric
    (h_D)^{k*eta} h0_j e^{sign*2Re(conj(tau) f_j)} e^{-(|tau|^2-1)/(2 eta)} |s_D|^{2k eta}."""
    keta = k_mult * spec.eta
    f = cf.primitive(j, z)
    val = keta * spec.divisor_potential(cf, j, z)
    val -= math.log(cf.base_metric[j])
    val -= cf.exponent_sign * 2.0 * (tau.conjugate() * f).real
    if spec.include_tau_weight:
        val += (abs(tau) ** 2 - 1.0) / (2.0 * spec.eta)
    s = abs(spec.divisor_section(cf, j, z))
    val -= keta * 2.0 * math.log(s)
    return val


def curvature_semipositivity(cf: ChartFamily, spec: FamilyMetricSpec,
                             grid: Sequence[Tuple[int, complex, complex]],
                             mode: str = "eta", step: float = 1e-3) -> CurvatureReport:
    """Finite-difference complex Hessian of -log(metric) over (chart, z, tau)
    grid points; returns the smallest eigenvalue seen, and in 2eta mode also
    the worst margin of the tau-direction eigenvalue (1/(2 pi) normalized)
    over 1/(4 pi eta).
    """
    if mode not in ("eta", "2eta"):
        raise ValueError("mode must be 'eta' or '2eta'")
    k_mult = 1 if mode == "eta" else 2
    min_eig = math.inf
    tau_margin = math.inf if mode == "2eta" else None
    min_dist = math.inf
    h = step
    for (j, z, tau) in grid:
        sd = abs(spec.divisor_section(cf, j, z))
        min_dist = min(min_dist, sd)
        if sd <= DIVISOR_GUARD:
            raise DivisorTooClose(f"|divisor section| = {sd} at chart {j}, z = {z}")
        if not cf.charts[j].contains(z, margin=h):
            raise StencilOutOfDomain(f"z stencil leaves chart {j} at {z}")

        def phi(dz: complex, dt: complex) -> float:
            return _neg_log_metric(cf, spec, k_mult, j, z + dz, tau + dt)

        p0 = phi(0, 0)
        zz = (phi(h, 0) + phi(-h, 0) + phi(1j * h, 0) + phi(-1j * h, 0) - 4 * p0) / (4 * h * h)
        tt = (phi(0, h) + phi(0, -h) + phi(0, 1j * h) + phi(0, -1j * h) - 4 * p0) / (4 * h * h)

        def mixed(dz_unit: complex, dt_unit: complex) -> float:
            return (phi(h * dz_unit, h * dt_unit) - phi(h * dz_unit, -h * dt_unit)
                    - phi(-h * dz_unit, h * dt_unit) + phi(-h * dz_unit, -h * dt_unit)) / (4 * h * h)

        xa = mixed(1, 1)
        xb = mixed(1, 1j)
        ya = mixed(1j, 1)
        yb = mixed(1j, 1j)
        ztbar = 0.25 * (xa + yb) + 0.25j * (xb - ya)
        hess = np.array([[zz, ztbar], [ztbar.conjugate(), tt]], dtype=complex)
        eigs = np.linalg.eigvalsh(hess)
        min_eig = min(min_eig, float(eigs[0]))
        if mode == "2eta":
            tau_margin = min(tau_margin, tt / (2 * math.pi) - 1.0 / (4 * math.pi * spec.eta))
    return CurvatureReport(mode, spec.eta, step, cf.exponent_sign, len(grid),
                           min_eig, tau_margin, min_dist)


def standard_curvature_grid(cf: ChartFamily, spec: FamilyMetricSpec,
                            z_per_chart: int = 4, tau_count: int = 9,
                            tau_radius: float = 0.8, margin: float = 0.08,
                            guard: float = 0.3) -> List[Tuple[int, complex, complex]]:
    """Deterministic (chart, z, tau) grid staying `margin` inside each chart
    and `guard` away from the divisor zero."""
    taus = []
    side = int(math.isqrt(tau_count))
    for a in np.linspace(-tau_radius, tau_radius, side):
        for b in np.linspace(-tau_radius, tau_radius, side):
            taus.append(complex(a, b))
    grid = []
    for j, chart in enumerate(cf.charts):
        xs = np.linspace(chart.x0 + margin, chart.x0 + chart.width - margin, z_per_chart)
        ys = np.linspace(chart.y0 + margin, chart.y0 + chart.height - margin, z_per_chart)
        pts = [complex(x, y) for x, y in zip(xs, ys)]
        for z in pts:
            if abs(spec.divisor_section(cf, j, z)) < guard:
                continue
            for tau in taus:
                grid.append((j, z, tau))
    return grid
