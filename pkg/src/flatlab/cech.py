"""Twisted Cech complexes of rank-one local systems on a finite nerve.

A space is presented abstractly: a nerve (simplicial complex on cover
indices) plus an integer-exponent 1-cocycle giving the monomial transition
function of each edge in the character variables.  Coboundary matrices,
cohomology dimensions, and the shipped example data all live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import cmath
import itertools
import math

import numpy as np

from functools import lru_cache

from .exact import (
    CycloCoeff,
    LaurentPoly,
    MonomialMatrix,
    exact_rank_monomial,
    numeric_rank,
    DEFAULT_RANK_TOL,
    _lcm,
)

__all__ = [
    "TwistedCechDatum",
    "CharacterValue",
    "Violation",
    "DatumValidationError",
    "InvalidDimension",
    "validate_datum",
    "coboundary_matrix",
    "coboundary_evaluated",
    "cohomology_dim",
    "all_cohomology_dims",
    "nerve_euler_characteristic",
    "product_datum",
    "relabel_datum",
    "circle3",
    "torus9",
    "wedge2",
    "genus2",
    "shipped_datum",
]

Simplex = Tuple[int, ...]


class InvalidDimension(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str  # MissingFace | AntisymmetryViolation | CocycleViolation
    simplex: Simplex
    detail: str = ""


class DatumValidationError(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        summary = "; ".join(f"{v.kind} at {v.simplex}" for v in self.violations)
        super().__init__(f"invalid twisted Cech datum: {summary}")


@dataclass(frozen=True)
class TwistedCechDatum:
    """Finite nerve plus integer exponent vectors on its ordered edges.

    Cover indices are 1-based.  `edge_exponents` stores the vector a_{jk} for
    ordered edges; the reverse orientation is implied by antisymmetry when not
    stored explicitly.  Vector length is free_rank + len(torsion_orders).
    """

    cover_size: int
    simplices: Tuple[Simplex, ...]
    free_rank: int
    torsion_orders: Tuple[int, ...]
    edge_exponents: Tuple[Tuple[Tuple[int, int], Tuple[int, ...]], ...]

    @staticmethod
    def make(cover_size: int,
             simplices: Sequence[Sequence[int]],
             free_rank: int,
             torsion_orders: Sequence[int],
             edge_exponents: Mapping[Tuple[int, int], Sequence[int]]) -> "TwistedCechDatum":
        if cover_size < 1:
            raise ValueError("cover_size must be positive")
        if free_rank < 0:
            raise ValueError("free_rank must be nonnegative")
        width = free_rank + len(torsion_orders)
        sset = set()
        for s in simplices:
            t = tuple(int(v) for v in s)
            if not t or any(not (1 <= v <= cover_size) for v in t):
                raise ValueError(f"simplex {t} outside cover range")
            if any(a >= b for a, b in zip(t, t[1:])):
                raise ValueError(f"simplex {t} is not strictly increasing")
            sset.add(t)
        edges_present = {s for s in sset if len(s) == 2}
        exps = {}
        for (j, k), vec in edge_exponents.items():
            v = tuple(int(x) for x in vec)
            if len(v) != width:
                raise ValueError(
                    f"exponent vector on edge ({j},{k}) has length {len(v)}, expected {width}")
            exps[(int(j), int(k))] = v
        for (j, k) in edges_present:
            if (j, k) not in exps and (k, j) not in exps:
                raise ValueError(f"edge ({j},{k}) has no exponent vector")
        ordered = tuple(sorted(sset, key=lambda s: (len(s), s)))
        return TwistedCechDatum(cover_size, ordered, free_rank, tuple(int(t) for t in torsion_orders),
                                tuple(sorted(exps.items())))

    # ---- structure queries ----------------------------------------------
    def simplices_of_dim(self, nu: int) -> List[Simplex]:
        return sorted(s for s in self.simplices if len(s) == nu + 1)

    def dimension(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def counts(self) -> List[int]:
        """I_nu for nu = 0..dimension."""
        return [len(self.simplices_of_dim(nu)) for nu in range(self.dimension() + 1)]

    def exponent(self, j: int, k: int) -> Tuple[int, ...]:
        """Oriented exponent vector a_{jk}; zero on degenerate j == k."""
        width = self.free_rank + len(self.torsion_orders)
        if j == k:
            return (0,) * width
        d = dict(self.edge_exponents)
        if (j, k) in d:
            return d[(j, k)]
        if (k, j) in d:
            return tuple(-x for x in d[(k, j)])
        raise KeyError(f"no exponent stored for edge ({j},{k})")

    # ---- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "cover_size": self.cover_size,
            "simplices": [list(s) for s in self.simplices],
            "free_rank": self.free_rank,
            "torsion_orders": list(self.torsion_orders),
            "edge_exponents": {f"{j},{k}": list(v) for (j, k), v in self.edge_exponents},
        }

    @staticmethod
    def from_json(obj: Mapping) -> "TwistedCechDatum":
        exps = {}
        for key, vec in obj["edge_exponents"].items():
            j, k = key.split(",")
            exps[(int(j), int(k))] = vec
        return TwistedCechDatum.make(
            obj["cover_size"], obj["simplices"], obj["free_rank"],
            obj.get("torsion_orders", []), exps)


@dataclass(frozen=True)
class CharacterValue:
    """A point of the character space: nonzero values for the free generators
    and roots of unity for the torsion generators.

    `free_exact` / `torsion_exponents` are optional exact mirrors: cyclotomic
    field elements for the free part and powers k_j (coordinate j maps to
    zeta_{t_j}^{k_j}) for the torsion part.
    """

    free_part: Tuple[complex, ...]
    torsion_part: Tuple[complex, ...] = ()
    free_exact: Optional[Tuple[CycloCoeff, ...]] = None
    torsion_exponents: Optional[Tuple[int, ...]] = None

    @staticmethod
    def numeric(free: Sequence[complex], torsion: Sequence[complex] = ()) -> "CharacterValue":
        free = tuple(complex(g) for g in free)
        if any(g == 0 for g in free):
            raise ValueError("free character coordinates must be nonzero")
        return CharacterValue(free, tuple(complex(t) for t in torsion))

    @staticmethod
    def exact(free: Sequence[CycloCoeff],
              torsion_exponents: Sequence[int] = (),
              torsion_orders: Sequence[int] = ()) -> "CharacterValue":
        if len(torsion_exponents) != len(torsion_orders):
            raise ValueError("one exponent per torsion order")
        free = tuple(free)
        if any(g.is_zero() for g in free):
            raise ValueError("free character coordinates must be nonzero")
        tor = tuple(
            cmath.exp(2j * cmath.pi * k / t) for k, t in zip(torsion_exponents, torsion_orders))
        return CharacterValue(tuple(complex(g) for g in free), tor,
                              free_exact=free, torsion_exponents=tuple(int(k) for k in torsion_exponents))

    @staticmethod
    def rational(free: Sequence, torsion_exponents: Sequence[int] = (),
                 torsion_orders: Sequence[int] = ()) -> "CharacterValue":
        return CharacterValue.exact(
            [CycloCoeff.rational(Fraction(g)) for g in free], torsion_exponents, torsion_orders)

    @property
    def is_exact(self) -> bool:
        return self.free_exact is not None

    def coordinates(self) -> Tuple[complex, ...]:
        return self.free_part + self.torsion_part

    def check_against(self, datum: TwistedCechDatum, tol: float = 1e-12):
        if len(self.free_part) != datum.free_rank:
            raise ValueError(
                f"character has {len(self.free_part)} free coordinates, datum needs {datum.free_rank}")
        if len(self.torsion_part) != len(datum.torsion_orders):
            raise ValueError("torsion coordinate count mismatch")
        for z, order in zip(self.torsion_part, datum.torsion_orders):
            if abs(z**order - 1) > tol:
                raise ValueError(f"torsion coordinate {z} is not an exact order-{order} root of unity")


# ============================================================
# Validation
# ============================================================

def validate_datum(datum: TwistedCechDatum) -> TwistedCechDatum:
    """Check the three datum invariants; raise a structured error listing all
    violations, or return the datum unchanged."""
    violations: List[Violation] = []
    sset = set(datum.simplices)
    for s in datum.simplices:
        if len(s) == 1:
            continue
        for v in s:
            face = tuple(x for x in s if x != v)
            if face not in sset:
                violations.append(Violation("MissingFace", s, f"face {face} not listed"))
    stored = dict(datum.edge_exponents)
    for (j, k), vec in stored.items():
        if (k, j) in stored and j < k:
            rev = stored[(k, j)]
            if tuple(-x for x in rev) != vec:
                violations.append(Violation("AntisymmetryViolation", (j, k),
                                            f"a[{k},{j}] != -a[{j},{k}]"))
    for tri in datum.simplices_of_dim(2):
        j, k, l = tri
        try:
            lhs = tuple(a + b for a, b in zip(datum.exponent(j, k), datum.exponent(k, l)))
            rhs = datum.exponent(j, l)
        except KeyError as exc:
            violations.append(Violation("MissingFace", tri, str(exc)))
            continue
        if lhs != rhs:
            violations.append(Violation("CocycleViolation", tri,
                                        f"a[{j},{k}] + a[{k},{l}] != a[{j},{l}]"))
    if violations:
        raise DatumValidationError(violations)
    return datum


# ============================================================
# Coboundary matrices
# ============================================================

def _edge_monomial(datum: TwistedCechDatum, j: int, k: int,
                   conductor: int, torsion_exponents: Sequence[int]) -> LaurentPoly:
    """Transition monomial of the ordered edge (j,k) as a Laurent term, with
    torsion generators specialized to roots of unity in Q(zeta_N)."""
    vec = datum.exponent(j, k)
    free = vec[: datum.free_rank]
    tors = vec[datum.free_rank:]
    power = 0
    for a, k_j, order in zip(tors, torsion_exponents, datum.torsion_orders):
        power += a * k_j * (conductor // order)
    coeff = CycloCoeff.root_of_unity(conductor, power) if conductor > 1 else CycloCoeff.one()
    return LaurentPoly.monomial(datum.free_rank, free, coeff)


def field_conductor(datum: TwistedCechDatum) -> int:
    n = 1
    for t in datum.torsion_orders:
        n = _lcm(n, t)
    return n


def coboundary_matrix(datum: TwistedCechDatum, nu: int,
                      torsion_exponents: Optional[Sequence[int]] = None) -> MonomialMatrix:
    """Symbolic I_{nu+1} x I_nu coboundary matrix in the free character
    variables; torsion coordinates are fixed roots of unity (primitive by
    default).  Rows and columns are ordered lexicographically."""
    if nu < 0 or nu > datum.dimension():
        raise InvalidDimension(f"nu={nu} outside nerve dimensions 0..{datum.dimension()}")
    if torsion_exponents is None:
        torsion_exponents = (1,) * len(datum.torsion_orders)
    return _coboundary_cached(datum, nu, tuple(torsion_exponents))


@lru_cache(maxsize=256)
def _coboundary_cached(datum: TwistedCechDatum, nu: int,
                       torsion_exponents: Tuple[int, ...]) -> MonomialMatrix:
    conductor = field_conductor(datum)
    rows = datum.simplices_of_dim(nu + 1)
    cols = datum.simplices_of_dim(nu)
    col_index = {s: i for i, s in enumerate(cols)}
    entries: Dict[Tuple[int, int], LaurentPoly] = {}
    minus_one = CycloCoeff.rational(-1, conductor)
    for r, s in enumerate(rows):
        # face dropping j_0 carries the edge monomial g_{j0 j1}
        face0 = s[1:]
        mono = _edge_monomial(datum, s[0], s[1], conductor, torsion_exponents)
        entries[(r, col_index[face0])] = mono
        for lam in range(1, len(s)):
            face = s[:lam] + s[lam + 1:]
            sign = minus_one if lam % 2 else CycloCoeff.one(conductor)
            key = (r, col_index[face])
            term = LaurentPoly.monomial(datum.free_rank, (0,) * datum.free_rank, sign)
            if key in entries:
                combined = entries[key] + term
                if combined.is_zero():
                    del entries[key]
                else:
                    entries[key] = combined
            else:
                entries[key] = term
    return MonomialMatrix.make(len(rows), len(cols), datum.free_rank, entries, conductor)


def coboundary_evaluated(datum: TwistedCechDatum, nu: int, gamma: CharacterValue) -> np.ndarray:
    """Complex coboundary matrix at a specific character."""
    tor = gamma.torsion_exponents
    sym = coboundary_matrix(datum, nu, torsion_exponents=tor)
    if tor is None and gamma.torsion_part:
        # numeric torsion values: rebuild entries with explicit phases
        conductor = field_conductor(datum)
        rows = datum.simplices_of_dim(nu + 1)
        cols = datum.simplices_of_dim(nu)
        col_index = {s: i for i, s in enumerate(cols)}
        out = np.zeros((len(rows), len(cols)), dtype=complex)
        for r, s in enumerate(rows):
            vec = datum.exponent(s[0], s[1])
            val = 1 + 0j
            for g, a in zip(gamma.free_part, vec[: datum.free_rank]):
                if a:
                    val *= g**a
            for z, a in zip(gamma.torsion_part, vec[datum.free_rank:]):
                if a:
                    val *= z**a
            out[r, col_index[s[1:]]] += val
            for lam in range(1, len(s)):
                out[r, col_index[s[:lam] + s[lam + 1:]]] += (-1) ** lam
        return out
    return sym.evaluate(gamma.free_part)


# ============================================================
# Cohomology dimensions
# ============================================================

def _rank_at(datum: TwistedCechDatum, nu: int, gamma: CharacterValue,
             scalars: str, tol: float) -> int:
    """Rank of the coboundary matrix A_{gamma,nu}; 0 when out of range or empty."""
    if nu < 0 or nu > datum.dimension():
        return 0
    if nu == datum.dimension():
        return 0  # no (nu+1)-simplices: zero map
    if scalars == "exact":
        if not gamma.is_exact:
            raise ValueError("exact scalars requested but character has no exact data")
        sym = coboundary_matrix(datum, nu, torsion_exponents=gamma.torsion_exponents or ())
        return exact_rank_monomial(sym, gamma.free_exact)
    return numeric_rank(coboundary_evaluated(datum, nu, gamma), tol)


def cohomology_dim(datum: TwistedCechDatum, gamma: CharacterValue, p: int,
                   scalars: str = "numeric", tol: float = DEFAULT_RANK_TOL) -> int:
    """dim H^p of the rank-one local system at the character gamma.

    Computed as I_p - rank(A_{gamma,p}) - rank(A_{gamma,p-1}) with the
    (-1)-coboundary taken as the zero map.
    """
    gamma.check_against(datum)
    if p < 0 or p > datum.dimension():
        return 0
    i_p = len(datum.simplices_of_dim(p))
    return i_p - _rank_at(datum, p, gamma, scalars, tol) - _rank_at(datum, p - 1, gamma, scalars, tol)


def all_cohomology_dims(datum: TwistedCechDatum, gamma: CharacterValue,
                        scalars: str = "numeric", tol: float = DEFAULT_RANK_TOL) -> List[int]:
    """dim H^p for p = 0..dimension, computing each rank once."""
    gamma.check_against(datum)
    dim = datum.dimension()
    ranks = [_rank_at(datum, nu, gamma, scalars, tol) for nu in range(dim + 1)]
    dims = []
    for p in range(dim + 1):
        i_p = len(datum.simplices_of_dim(p))
        dims.append(i_p - ranks[p] - (ranks[p - 1] if p > 0 else 0))
    return dims


def nerve_euler_characteristic(datum: TwistedCechDatum) -> int:
    return sum((-1) ** nu * c for nu, c in enumerate(datum.counts()))


# ============================================================
# Product nerves and shipped examples
# ============================================================

def product_datum(d1: TwistedCechDatum, d2: TwistedCechDatum) -> TwistedCechDatum:
    """Nerve of the product cover: simplices are sets of index pairs whose two
    projections are simplices; edge exponent vectors concatenate."""
    n2 = d2.cover_size
    s1 = [set(s) for s in d1.simplices]
    s2 = [set(s) for s in d2.simplices]

    def flat(i: int, j: int) -> int:
        return (i - 1) * n2 + j

    simplices = set()
    for a in s1:
        for b in s2:
            cells = sorted(itertools.product(sorted(a), sorted(b)))
            for size in range(1, len(cells) + 1):
                for sub in itertools.combinations(cells, size):
                    if {p[0] for p in sub} == a and {p[1] for p in sub} == b:
                        simplices.add(tuple(sorted(flat(i, j) for i, j in sub)))
    exps = {}
    width1 = d1.free_rank + len(d1.torsion_orders)
    width2 = d2.free_rank + len(d2.torsion_orders)
    for s in simplices:
        if len(s) != 2:
            continue
        (p, q) = s
        i1, j1 = divmod(p - 1, n2)
        i2, j2 = divmod(q - 1, n2)
        i1, i2 = i1 + 1, i2 + 1
        j1, j2 = j1 + 1, j2 + 1
        a1 = d1.exponent(i1, i2) if i1 != i2 else (0,) * width1
        a2 = d2.exponent(j1, j2) if j1 != j2 else (0,) * width2
        vec = a1[: d1.free_rank] + a2[: d2.free_rank] + a1[d1.free_rank:] + a2[d2.free_rank:]
        exps[(p, q)] = vec
    return TwistedCechDatum.make(
        d1.cover_size * n2, sorted(simplices, key=lambda s: (len(s), s)),
        d1.free_rank + d2.free_rank,
        tuple(d1.torsion_orders) + tuple(d2.torsion_orders), exps)


def circle3() -> TwistedCechDatum:
    """Three arcs around a circle; monodromy enters through the wrap edge."""
    return TwistedCechDatum.make(
        3,
        [[1], [2], [3], [1, 2], [2, 3], [1, 3]],
        1, [],
        {(1, 2): [0], (2, 3): [0], (1, 3): [1]},
    )


def torus9() -> TwistedCechDatum:
    """Product of two circle3 data: a 9-chart cover of the 2-torus."""
    return product_datum(circle3(), circle3())


def wedge2() -> TwistedCechDatum:
    """Two circles sharing one chart (a wedge); two free generators."""
    return TwistedCechDatum.make(
        5,
        [[1], [2], [3], [4], [5],
         [1, 2], [2, 3], [1, 3], [1, 4], [4, 5], [1, 5]],
        2, [],
        {(1, 2): [0, 0], (2, 3): [0, 0], (1, 3): [1, 0],
         (1, 4): [0, 0], (4, 5): [0, 0], (1, 5): [0, 1]},
    )


def genus2() -> TwistedCechDatum:
    """Good-cover nerve of the closed orientable genus-2 surface.

    Built from an octagon with boundary word a b a- b- c d c- d-: the disk is
    triangulated (boundary ring subdivided 4x per side, one interior ring, a
    center), boundary sides are glued in the standard pattern, and the four
    exponent cocycles come from integer potentials on the disk whose
    increments match across glued edges.  Their classes pair with the loops
    a, b, c, d as the identity matrix.
    """
    nb = 32  # boundary vertices; corners at multiples of 4
    boundary = list(range(nb))
    ring = list(range(nb, 2 * nb))
    center = 2 * nb

    triangles = []
    for i in range(nb):
        ip = (i + 1) % nb
        triangles.append((boundary[i], boundary[ip], ring[i]))
        triangles.append((boundary[ip], ring[(i + 1) % nb], ring[i]))
        triangles.append((ring[i], ring[(i + 1) % nb], center))

    # side pairs (forward, reversed partner) per the word a b a- b- c d c- d-
    side_pairs = [(0, 2), (1, 3), (4, 6), (5, 7)]
    parent = list(range(2 * nb + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int):
        parent[find(x)] = find(y)

    for p, q in side_pairs:
        for t in range(5):
            union((4 * p + t) % nb, (4 * q + 4 - t) % nb)

    # potentials: generator g puts +1 on the first edge of its forward side
    # and -1 on the walk-direction image of that edge on the reversed side
    increments = []
    for p, q in side_pairs:
        inc = [0] * nb
        inc[4 * p] = 1
        inc[(4 * q + 3) % nb] = -1
        increments.append(inc)
    potentials = []
    for inc in increments:
        phi = [0] * (2 * nb + 1)
        acc = 0
        for i in range(nb):
            phi[i] = acc
            acc += inc[i]
        if acc != 0:
            raise AssertionError("boundary potential does not close up")
        potentials.append(phi)

    labels: Dict[int, int] = {}
    for v in range(2 * nb + 1):
        r = find(v)
        if r not in labels:
            labels[r] = len(labels) + 1

    def final(v: int) -> int:
        return labels[find(v)]

    edge_vectors: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    simplices = set()
    for tri in triangles:
        img = tuple(sorted({final(v) for v in tri}))
        if len(img) != 3:
            raise AssertionError("gluing degenerated a triangle")
        simplices.add(img)
        for u, v in itertools.combinations(tri, 2):
            fu, fv = final(u), final(v)
            if fu == fv:
                raise AssertionError("gluing degenerated an edge")
            if fu > fv:
                u, v, fu, fv = v, u, fv, fu
            vec = tuple(phi[v] - phi[u] for phi in potentials)
            prev = edge_vectors.get((fu, fv))
            if prev is not None and prev != vec:
                raise AssertionError(f"inconsistent cocycle on edge ({fu},{fv})")
            edge_vectors[(fu, fv)] = vec
            simplices.add((fu, fv))
    for v in range(2 * nb + 1):
        simplices.add((final(v),))

    return TwistedCechDatum.make(len(labels), sorted(simplices, key=lambda s: (len(s), s)),
                                 4, [], edge_vectors)


def relabel_datum(datum: TwistedCechDatum, perm: Mapping[int, int]) -> TwistedCechDatum:
    """Apply a permutation of the cover indices (1-based), reorienting edge
    exponent vectors as needed."""
    if sorted(perm.keys()) != list(range(1, datum.cover_size + 1)) or \
            sorted(perm.values()) != list(range(1, datum.cover_size + 1)):
        raise ValueError("perm must be a bijection on 1..cover_size")
    simplices = [sorted(perm[v] for v in s) for s in datum.simplices]
    exps = {}
    for (j, k), vec in datum.edge_exponents:
        pj, pk = perm[j], perm[k]
        if pj < pk:
            exps[(pj, pk)] = vec
        else:
            exps[(pk, pj)] = tuple(-x for x in vec)
    return TwistedCechDatum.make(datum.cover_size, simplices, datum.free_rank,
                                 datum.torsion_orders, exps)


_SHIPPED = {"circle3": circle3, "torus9": torus9, "wedge2": wedge2, "genus2": genus2}


def shipped_datum(name: str) -> TwistedCechDatum:
    if name not in _SHIPPED:
        raise KeyError(f"unknown shipped datum {name!r}; have {sorted(_SHIPPED)}")
    return validate_datum(_SHIPPED[name]())
