"""Jump loci of twisted cohomology: minor ideals, membership tests, zero-set
sampling, and torsion detection.

The locus attached to a reference character g0 and degree p is
{g : dim H^p(g) >= dim H^p(g0)}.  Following the local description by ranks,
its generators are the normalized (q+1) x (q+1) minors of the symbolic
coboundary matrices in degrees p-1 and p, where q is the rank at g0.  A rank
that is already maximal contributes no generators (its condition is vacuous);
an empty generator list therefore means the locus is everything, which the
definitional cross-check confirms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import math

import numpy as np

from .cech import (
    CharacterValue,
    TwistedCechDatum,
    all_cohomology_dims,
    coboundary_evaluated,
    coboundary_matrix,
    cohomology_dim,
)
from .exact import BudgetExceeded, LaurentPoly, laurent_minors, numeric_rank

__all__ = [
    "JumpIdeal",
    "TorsionReport",
    "GenericRankReport",
    "generic_rank",
    "jump_ideal",
    "is_in_jump_locus",
    "torsion_order",
    "random_characters",
    "sample_zero_set",
]

DEFAULT_MINOR_BUDGET = 20000
DEFAULT_MEMBER_TOL = 1e-8
TORSION_TOL = 1e-10


@dataclass(frozen=True)
class GenericRankReport:
    nu: int
    rank: int
    sample_ranks: Tuple[int, ...]
    agree: bool


@dataclass(frozen=True)
class JumpIdeal:
    datum: TwistedCechDatum
    degree: int
    threshold: int  # dim H^p at the reference character
    reference: CharacterValue
    ranks: Tuple[int, int]  # (q_{p-1}, q_p) at the reference
    generators: Tuple[LaurentPoly, ...]

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "threshold": self.threshold,
            "ranks": list(self.ranks),
            "generators": [g.to_json() for g in self.generators],
            "generators_str": [str(g) for g in self.generators],
        }


@dataclass(frozen=True)
class TorsionReport:
    character: Tuple[complex, ...]
    order: Optional[int]
    coordinate_orders: Tuple[Optional[int], ...]
    search_bound: int

    def to_json(self) -> dict:
        return {
            "character": [[z.real, z.imag] for z in self.character],
            "order": self.order,
            "coordinate_orders": list(self.coordinate_orders),
            "search_bound": self.search_bound,
        }


# ============================================================
# Generic ranks
# ============================================================

def random_characters(datum: TwistedCechDatum, count: int, seed: int = 0) -> List[CharacterValue]:
    """Random characters with free coordinates of modulus in [0.5, 2] and
    uniform phase; torsion coordinates are random exact roots of unity."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        mod = rng.uniform(0.5, 2.0, size=datum.free_rank)
        arg = rng.uniform(0.0, 2.0 * np.pi, size=datum.free_rank)
        free = tuple(m * np.exp(1j * a) for m, a in zip(mod, arg))
        tors = tuple(
            np.exp(2j * np.pi * rng.integers(0, t) / t) for t in datum.torsion_orders)
        out.append(CharacterValue.numeric(free, tors))
    return out


def generic_rank(datum: TwistedCechDatum, nu: int, seed: int = 0, samples: int = 3,
                 tol: float = 1e-9) -> GenericRankReport:
    """Numeric rank of the degree-nu coboundary at independent random
    characters; the maximum is the generic rank, disagreement is flagged."""
    if nu >= datum.dimension():
        return GenericRankReport(nu, 0, (0,) * samples, True)
    ranks = []
    for gamma in random_characters(datum, samples, seed=seed):
        ranks.append(numeric_rank(coboundary_evaluated(datum, nu, gamma), tol))
    return GenericRankReport(nu, max(ranks), tuple(ranks), len(set(ranks)) == 1)


# ============================================================
# Jump ideals
# ============================================================

def _rank_at_reference(datum: TwistedCechDatum, nu: int, gamma: CharacterValue,
                       tol: float) -> int:
    if nu < 0 or nu >= datum.dimension():
        return 0
    if gamma.is_exact:
        from .exact import exact_rank_monomial
        sym = coboundary_matrix(datum, nu, torsion_exponents=gamma.torsion_exponents or ())
        return exact_rank_monomial(sym, gamma.free_exact)
    return numeric_rank(coboundary_evaluated(datum, nu, gamma), tol)


def jump_ideal(datum: TwistedCechDatum, p: int, reference: CharacterValue,
               budget: int = DEFAULT_MINOR_BUDGET, tol: float = 1e-9) -> JumpIdeal:
    """Minor-ideal description of {dim H^p >= dim H^p at the reference}.

    Raises BudgetExceeded when the minor enumeration would need more
    submatrices than the budget allows.
    """
    reference.check_against(datum)
    q_prev = _rank_at_reference(datum, p - 1, reference, tol)
    q_here = _rank_at_reference(datum, p, reference, tol)
    threshold = cohomology_dim(datum, reference, p,
                               scalars="exact" if reference.is_exact else "numeric", tol=tol)
    gens: Dict[tuple, LaurentPoly] = {}
    required = 0
    for nu, q in ((p - 1, q_prev), (p, q_here)):
        if nu < 0 or nu >= datum.dimension():
            continue
        sym = coboundary_matrix(datum, nu,
                                torsion_exponents=reference.torsion_exponents
                                if reference.torsion_exponents is not None
                                else (1,) * len(datum.torsion_orders))
        size = q + 1
        if size > min(sym.rows, sym.cols):
            continue  # rank is already maximal: the condition is vacuous
        required += math.comb(sym.rows, size) * math.comb(sym.cols, size)
        if required > budget:
            raise BudgetExceeded(required, budget)
        for g in laurent_minors(sym, size, budget=budget):
            gens[g.sort_key()] = g
    generators = tuple(sorted(gens.values(), key=lambda g: g.sort_key()))
    return JumpIdeal(datum, p, threshold, reference, (q_prev, q_here), generators)


def is_in_jump_locus(ideal: JumpIdeal, gamma: CharacterValue,
                     tol: float = DEFAULT_MEMBER_TOL,
                     cross_check: bool = False) -> bool:
    """True iff every generator vanishes at gamma (within tol).

    With cross_check=True the definitional comparison
    dim H^p(gamma) >= dim H^p(reference) is computed as well and a mismatch
    raises, guarding against the minor set cutting the wrong locus globally.
    """
    if len(gamma.free_part) != ideal.datum.free_rank:
        raise ValueError("character dimension mismatch")
    member = all(abs(g.eval(gamma.free_part)) < tol for g in ideal.generators)
    if cross_check:
        dim = cohomology_dim(ideal.datum, gamma, ideal.degree)
        definitional = dim >= ideal.threshold
        if definitional != member:
            raise AssertionError(
                f"minor membership {member} disagrees with definitional {definitional} at {gamma.free_part}")
    return member


# ============================================================
# Torsion detection and zero-set sampling
# ============================================================

def torsion_order(gamma: CharacterValue, n_max: int) -> TorsionReport:
    """Smallest k <= n_max with gamma_i^k = 1 for every coordinate, or none.

    Coordinates off the unit circle short-circuit to none.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    coords = gamma.coordinates()
    if any(abs(abs(z) - 1) > TORSION_TOL for z in coords):
        return TorsionReport(coords, None, (None,) * len(coords), n_max)
    per: List[Optional[int]] = []
    for z in coords:
        order = None
        for k in range(1, n_max + 1):
            if abs(z**k - 1) <= TORSION_TOL:
                order = k
                break
        per.append(order)
    joint = None
    for k in range(1, n_max + 1):
        if all(abs(z**k - 1) <= TORSION_TOL for z in coords):
            joint = k
            break
    return TorsionReport(coords, joint, tuple(per), n_max)


def torsion_candidates(free_rank: int, max_order: int = 6) -> List[CharacterValue]:
    """All characters whose coordinates are roots of unity of order <= max_order."""
    values: List[complex] = []
    seen = set()
    for t in range(1, max_order + 1):
        for k in range(t):
            z = np.exp(2j * np.pi * k / t)
            key = (round(z.real, 12), round(z.imag, 12))
            if key not in seen:
                seen.add(key)
                values.append(z)
    out = []
    import itertools
    for combo in itertools.product(values, repeat=free_rank):
        out.append(CharacterValue.numeric(combo))
    return out


def sample_zero_set(datum: TwistedCechDatum, p: int, reference: CharacterValue,
                    samples: int = 200, seed: int = 0,
                    mode: str = "generators",
                    ideal: Optional[JumpIdeal] = None,
                    torsion_bound: int = 6,
                    tol: float = DEFAULT_MEMBER_TOL) -> dict:
    """Sample the jump locus over random characters plus all torsion
    candidates of order <= torsion_bound, reporting members and their torsion
    orders.

    mode "generators" evaluates the minor ideal; mode "definitional" compares
    cohomology dimensions directly (the only option when the minor budget is
    out of reach).
    """
    if mode not in ("generators", "definitional"):
        raise ValueError("mode must be 'generators' or 'definitional'")
    threshold = cohomology_dim(datum, reference, p,
                               scalars="exact" if reference.is_exact else "numeric")
    if mode == "generators":
        if ideal is None:
            ideal = jump_ideal(datum, p, reference)

        def member(g: CharacterValue) -> bool:
            return is_in_jump_locus(ideal, g, tol=tol)
    else:
        def member(g: CharacterValue) -> bool:
            return cohomology_dim(datum, g, p) >= threshold

    rand = random_characters(datum, samples, seed=seed)
    rand_members = [g for g in rand if member(g)]
    cand = [g for g in torsion_candidates(datum.free_rank, torsion_bound)
            if not datum.torsion_orders]
    cand_members = [g for g in cand if member(g)]
    reports = [torsion_order(g, torsion_bound) for g in cand_members]
    return {
        "mode": mode,
        "threshold": threshold,
        "seed": seed,
        "samples": samples,
        "random_members": [[z.real, z.imag] for g in rand_members for z in g.free_part],
        "random_member_count": len(rand_members),
        "torsion_members": [r.to_json() for r in reports],
    }
