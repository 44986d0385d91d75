"""Exact arithmetic kernel: cyclotomic rationals, Laurent polynomials, and
exact determinant / rank / minor computations for sparse monomial matrices.

Scalars live in Q(zeta_N), represented as vectors of rationals of length
euler_phi(N) modulo the N-th cyclotomic polynomial.  Laurent polynomials in
the character variables carry these scalars as coefficients.  Everything is
immutable value data; all operations return fresh objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import cmath
import math

import numpy as np

__all__ = [
    "euler_phi",
    "cyclotomic_polynomial",
    "CycloCoeff",
    "LaurentPoly",
    "MonomialMatrix",
    "laurent_det",
    "laurent_minors",
    "numeric_rank",
    "exact_rank",
    "exact_rank_monomial",
    "NotSquare",
    "CapExceeded",
    "BudgetExceeded",
    "NonFiniteEntry",
    "DimensionMismatch",
]

DEFAULT_RANK_TOL = 1e-9
DEFAULT_DET_CAP = 10


class NotSquare(ValueError):
    pass


class CapExceeded(ValueError):
    pass


class BudgetExceeded(ValueError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"minor enumeration needs {required} submatrices, budget is {budget}")
        self.required = required
        self.budget = budget


class NonFiniteEntry(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


# ============================================================
# Cyclotomic fields
# ============================================================

def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("conductor must be positive")
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divmod_int(num: List[int], den: List[int]) -> Tuple[List[int], List[int]]:
    """Exact division of integer polynomials (coefficients low-to-high)."""
    num = list(num)
    deg_d = len(den) - 1
    lead = den[-1]
    quot = [0] * (len(num) - deg_d)
    for k in range(len(num) - deg_d - 1, -1, -1):
        c = num[k + deg_d]
        if c % lead != 0:
            raise ArithmeticError("non-exact polynomial division")
        q = c // lead
        quot[k] = q
        for j, d in enumerate(den):
            num[k + j] -= q * d
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


_CYCLO_CACHE: Dict[int, Tuple[int, ...]] = {}


def cyclotomic_polynomial(n: int) -> Tuple[int, ...]:
    """Coefficients (low-to-high) of the n-th cyclotomic polynomial."""
    if n in _CYCLO_CACHE:
        return _CYCLO_CACHE[n]
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod_int(poly, list(cyclotomic_polynomial(d)))
            if rem != [0]:
                raise ArithmeticError("cyclotomic recursion failed")
    _CYCLO_CACHE[n] = tuple(poly)
    return _CYCLO_CACHE[n]


_POWER_TABLE_CACHE: Dict[int, np.ndarray] = {}


def _zeta_power_table(n: int) -> np.ndarray:
    """Integer matrix whose row j is zeta_N^j reduced mod Phi_N, 0 <= j < n."""
    if n in _POWER_TABLE_CACHE:
        return _POWER_TABLE_CACHE[n]
    phi = euler_phi(n)
    cyc = cyclotomic_polynomial(n)
    # x^phi == -(c_0 + c_1 x + ... + c_{phi-1} x^{phi-1}) since Phi_N is monic
    top = [-c for c in cyc[:phi]]
    rows = np.zeros((n, phi), dtype=object)
    cur = [0] * phi
    cur[0] = 1
    for j in range(n):
        rows[j, :] = cur
        overflow = cur[-1]
        nxt = [0] + cur[:-1]
        if overflow:
            nxt = [nxt[k] + overflow * top[k] for k in range(phi)]
        cur = nxt
    _POWER_TABLE_CACHE[n] = rows
    return rows


_MULT_TABLE_CACHE: Dict[int, np.ndarray] = {}


def _mult_table(n: int) -> np.ndarray:
    """Tensor T[s,t,u]: coefficient of basis u in zeta^s * zeta^t (object ints)."""
    if n in _MULT_TABLE_CACHE:
        return _MULT_TABLE_CACHE[n]
    phi = euler_phi(n)
    cyc_top = [-c for c in cyclotomic_polynomial(n)[:phi]]
    ext = np.zeros((2 * phi - 1, phi), dtype=object)
    cur = [0] * phi
    cur[0] = 1
    for j in range(2 * phi - 1):
        ext[j, :] = cur
        overflow = cur[-1]
        cur = [0] + cur[:-1]
        if overflow:
            cur = [cur[k] + overflow * cyc_top[k] for k in range(phi)]
    tab = np.zeros((phi, phi, phi), dtype=object)
    for s in range(phi):
        for t in range(phi):
            tab[s, t, :] = ext[s + t, :]
    _MULT_TABLE_CACHE[n] = tab
    return tab


@dataclass(frozen=True)
class CycloCoeff:
    """Element of Q(zeta_N) as a rational vector of length euler_phi(N)."""

    conductor: int
    vec: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.vec) != euler_phi(self.conductor):
            raise ValueError("coefficient vector length must equal euler_phi(conductor)")

    # ---- constructors -------------------------------------------------
    @staticmethod
    def rational(q, conductor: int = 1) -> "CycloCoeff":
        phi = euler_phi(conductor)
        vec = [Fraction(0)] * phi
        vec[0] = Fraction(q)
        return CycloCoeff(conductor, tuple(vec))

    @staticmethod
    def zero(conductor: int = 1) -> "CycloCoeff":
        return CycloCoeff.rational(0, conductor)

    @staticmethod
    def one(conductor: int = 1) -> "CycloCoeff":
        return CycloCoeff.rational(1, conductor)

    @staticmethod
    def root_of_unity(conductor: int, power: int = 1) -> "CycloCoeff":
        """zeta_N^power as an exact field element."""
        pw = _zeta_power_table(conductor)
        row = pw[power % conductor, :]
        return CycloCoeff(conductor, tuple(Fraction(int(c)) for c in row))

    # ---- ring operations ----------------------------------------------
    def _check(self, other: "CycloCoeff"):
        if self.conductor != other.conductor:
            raise DimensionMismatch(
                f"conductor mismatch: {self.conductor} vs {other.conductor}"
            )

    def __add__(self, other: "CycloCoeff") -> "CycloCoeff":
        self._check(other)
        return CycloCoeff(self.conductor, tuple(a + b for a, b in zip(self.vec, other.vec)))

    def __sub__(self, other: "CycloCoeff") -> "CycloCoeff":
        self._check(other)
        return CycloCoeff(self.conductor, tuple(a - b for a, b in zip(self.vec, other.vec)))

    def __neg__(self) -> "CycloCoeff":
        return CycloCoeff(self.conductor, tuple(-a for a in self.vec))

    def __mul__(self, other: "CycloCoeff") -> "CycloCoeff":
        self._check(other)
        phi = len(self.vec)
        if phi == 1:
            return CycloCoeff(self.conductor, (self.vec[0] * other.vec[0],))
        tab = _mult_table(self.conductor)
        out = [Fraction(0)] * phi
        for s, a in enumerate(self.vec):
            if a == 0:
                continue
            for t, b in enumerate(other.vec):
                if b == 0:
                    continue
                ab = a * b
                row = tab[s, t]
                for u in range(phi):
                    r = row[u]
                    if r:
                        out[u] += ab * r
        return CycloCoeff(self.conductor, tuple(out))

    def inverse(self) -> "CycloCoeff":
        """Field inverse via extended Euclid against Phi_N over Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        phi = len(self.vec)
        if phi == 1:
            return CycloCoeff(self.conductor, (Fraction(1) / self.vec[0],))
        mod = [Fraction(c) for c in cyclotomic_polynomial(self.conductor)]
        a = list(self.vec)
        # extended euclid: find u with a*u = gcd (a unit) mod Phi_N
        r0, r1 = mod, _trim(a)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while _degree(r1) > 0:
            q, rem = _poly_divmod_frac(r0, r1)
            r0, r1 = r1, _trim(rem)
            s0, s1 = s1, _trim(_poly_sub(s0, _poly_mul(q, s1)))
        if _degree(r1) < 0:
            raise ZeroDivisionError("element is a zero divisor (unexpected)")
        c = r1[0]
        inv = [x / c for x in s1]
        _, inv = _poly_divmod_frac(inv, mod) if _degree(inv) >= len(mod) - 1 else (None, inv)
        inv = inv + [Fraction(0)] * (phi - len(inv))
        return CycloCoeff(self.conductor, tuple(inv[:phi]))

    def __truediv__(self, other: "CycloCoeff") -> "CycloCoeff":
        return self * other.inverse()

    # ---- predicates / conversions -------------------------------------
    def is_zero(self) -> bool:
        return all(a == 0 for a in self.vec)

    def is_rational(self) -> bool:
        return all(a == 0 for a in self.vec[1:])

    def __complex__(self) -> complex:
        zeta = cmath.exp(2j * cmath.pi / self.conductor)
        return sum(float(a) * zeta**k for k, a in enumerate(self.vec))

    def lift(self, conductor: int) -> "CycloCoeff":
        """Embed into Q(zeta_M) for a multiple M of the current conductor."""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor != 0:
            raise DimensionMismatch("target conductor must be a multiple")
        step = conductor // self.conductor
        out = CycloCoeff.zero(conductor)
        for k, a in enumerate(self.vec):
            if a != 0:
                term = CycloCoeff.root_of_unity(conductor, k * step)
                out = out + CycloCoeff(conductor, tuple(a * v for v in term.vec))
        return out

    def to_json(self) -> dict:
        return {
            "conductor": self.conductor,
            "rationals": [f"{a.numerator}/{a.denominator}" for a in self.vec],
        }

    @staticmethod
    def from_json(obj: Mapping) -> "CycloCoeff":
        vec = tuple(Fraction(s) for s in obj["rationals"])
        return CycloCoeff(int(obj["conductor"]), vec)


def _trim(p: List[Fraction]) -> List[Fraction]:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _degree(p: List[Fraction]) -> int:
    p = _trim(p)
    if len(p) == 1 and p[0] == 0:
        return -1
    return len(p) - 1


def _poly_mul(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _poly_divmod_frac(num: List[Fraction], den: List[Fraction]):
    num = list(num)
    den = _trim(den)
    dd = len(den) - 1
    lead = den[-1]
    if len(num) - 1 < dd:
        return [Fraction(0)], num
    quot = [Fraction(0)] * (len(num) - dd)
    for k in range(len(num) - dd - 1, -1, -1):
        q = num[k + dd] / lead
        quot[k] = q
        if q != 0:
            for j, d in enumerate(den):
                num[k + j] -= q * d
    return quot, _trim(num)


# ============================================================
# Laurent polynomials in the character variables
# ============================================================

@dataclass(frozen=True)
class LaurentPoly:
    """Laurent polynomial over Q(zeta_N) in nvars character variables.

    terms maps exponent tuples (length nvars, entries in Z) to nonzero
    coefficients; the zero polynomial has an empty term map.
    """

    nvars: int
    conductor: int
    terms: Tuple[Tuple[Tuple[int, ...], CycloCoeff], ...]

    @staticmethod
    def make(nvars: int, terms: Mapping[Tuple[int, ...], CycloCoeff], conductor: int = 1) -> "LaurentPoly":
        target = conductor
        for coeff in terms.values():
            target = _lcm(target, coeff.conductor)
        clean: Dict[Tuple[int, ...], CycloCoeff] = {}
        for expo, coeff in terms.items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != nvars:
                raise DimensionMismatch("exponent vector length must equal nvars")
            coeff = coeff.lift(target)
            if not coeff.is_zero():
                if expo in clean:
                    s = clean[expo] + coeff
                    if s.is_zero():
                        del clean[expo]
                    else:
                        clean[expo] = s
                else:
                    clean[expo] = coeff
        items = tuple(sorted(clean.items(), key=lambda kv: kv[0]))
        return LaurentPoly(nvars, target, items)

    @staticmethod
    def zero(nvars: int, conductor: int = 1) -> "LaurentPoly":
        return LaurentPoly(nvars, conductor, ())

    @staticmethod
    def constant(value: CycloCoeff, nvars: int) -> "LaurentPoly":
        if value.is_zero():
            return LaurentPoly.zero(nvars, value.conductor)
        return LaurentPoly(nvars, value.conductor, (((0,) * nvars, value),))

    @staticmethod
    def monomial(nvars: int, expo: Sequence[int], coeff: CycloCoeff) -> "LaurentPoly":
        return LaurentPoly.make(nvars, {tuple(expo): coeff}, coeff.conductor)

    # ---- ring operations ----------------------------------------------
    def _unify(self, other: "LaurentPoly"):
        target = _lcm(self.conductor, other.conductor)
        if target == self.conductor == other.conductor:
            return self, other, target
        a = LaurentPoly(self.nvars, target, tuple((e, c.lift(target)) for e, c in self.terms))
        b = LaurentPoly(other.nvars, target, tuple((e, c.lift(target)) for e, c in other.terms))
        return a, b, target

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b, target = self._unify(other)
        d = dict(a.terms)
        for expo, coeff in b.terms:
            if expo in d:
                s = d[expo] + coeff
                if s.is_zero():
                    del d[expo]
                else:
                    d[expo] = s
            else:
                d[expo] = coeff
        return LaurentPoly(self.nvars, target, tuple(sorted(d.items(), key=lambda kv: kv[0])))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.nvars, self.conductor, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b, target = self._unify(other)
        out: Dict[Tuple[int, ...], CycloCoeff] = {}
        for e1, c1 in a.terms:
            for e2, c2 in b.terms:
                e = tuple(x + y for x, y in zip(e1, e2))
                p = c1 * c2
                if e in out:
                    s = out[e] + p
                    if s.is_zero():
                        del out[e]
                    else:
                        out[e] = s
                elif not p.is_zero():
                    out[e] = p
        return LaurentPoly(self.nvars, target, tuple(sorted(out.items(), key=lambda kv: kv[0])))

    def scale(self, value: CycloCoeff) -> "LaurentPoly":
        if value.is_zero():
            return LaurentPoly.zero(self.nvars, self.conductor)
        target = _lcm(self.conductor, value.conductor)
        value = value.lift(target)
        return LaurentPoly(self.nvars, target,
                           tuple((e, c.lift(target) * value) for e, c in self.terms))

    # ---- queries -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_single_term(self) -> bool:
        return len(self.terms) == 1

    def eval(self, free_values: Sequence[complex]) -> complex:
        """Numeric specialization of the character variables."""
        if len(free_values) != self.nvars:
            raise DimensionMismatch(
                f"expected {self.nvars} character coordinates, got {len(free_values)}"
            )
        total = 0j
        for expo, coeff in self.terms:
            mono = 1 + 0j
            for g, e in zip(free_values, expo):
                if e:
                    mono *= complex(g) ** e
            total += complex(coeff) * mono
        return total

    def eval_exact(self, free_values: Sequence[CycloCoeff]) -> CycloCoeff:
        if len(free_values) != self.nvars:
            raise DimensionMismatch("character length mismatch")
        conductor = self.conductor
        for g in free_values:
            conductor = _lcm(conductor, g.conductor)
        total = CycloCoeff.zero(conductor)
        for expo, coeff in self.terms:
            mono = coeff.lift(conductor)
            for g, e in zip(free_values, expo):
                g = g.lift(conductor)
                if e > 0:
                    for _ in range(e):
                        mono = mono * g
                elif e < 0:
                    ginv = g.inverse()
                    for _ in range(-e):
                        mono = mono * ginv
            total = total + mono
        return total

    # ---- normalization --------------------------------------------------
    def normalized(self) -> "LaurentPoly":
        """Canonical form up to units: strip the gcd monomial, then make the
        lexicographically-leading coefficient 1."""
        if self.is_zero():
            return self
        mins = [min(e[i] for e, _ in self.terms) for i in range(self.nvars)]
        shifted = {tuple(a - b for a, b in zip(e, mins)): c for e, c in self.terms}
        lead_expo = max(shifted.keys())
        lead = shifted[lead_expo]
        inv = lead.inverse()
        out = {e: c * inv for e, c in shifted.items()}
        return LaurentPoly(self.nvars, self.conductor, tuple(sorted(out.items(), key=lambda kv: kv[0])))

    def sort_key(self):
        return tuple(
            (e, tuple((a.numerator, a.denominator) for a in c.vec)) for e, c in self.terms
        )

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for expo, coeff in self.terms:
            mono = "*".join(
                f"g{i+1}^{e}" if e != 1 else f"g{i+1}" for i, e in enumerate(expo) if e != 0
            )
            cv = str(coeff.vec[0]) if coeff.is_rational() else f"({coeff.vec})"
            parts.append(f"{cv}*{mono}" if mono else cv)
        return " + ".join(parts)

    # ---- serialization --------------------------------------------------
    def to_json(self) -> list:
        return [{"exponents": list(e), "coeff": c.to_json()} for e, c in self.terms]

    @staticmethod
    def from_json(obj: Iterable, nvars: int, conductor: int = 1) -> "LaurentPoly":
        terms = {tuple(t["exponents"]): CycloCoeff.from_json(t["coeff"]) for t in obj}
        return LaurentPoly.make(nvars, terms, conductor)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ============================================================
# Sparse matrices of signed monomials
# ============================================================

@dataclass(frozen=True)
class MonomialMatrix:
    """Sparse matrix whose stored entries are single-term Laurent polynomials
    with coefficient +-(root of unity)."""

    rows: int
    cols: int
    nvars: int
    conductor: int
    entries: Tuple[Tuple[Tuple[int, int], LaurentPoly], ...]

    @staticmethod
    def make(rows: int, cols: int, nvars: int,
             entries: Mapping[Tuple[int, int], LaurentPoly], conductor: int = 1) -> "MonomialMatrix":
        clean = {}
        for (r, c), poly in entries.items():
            if poly.is_zero():
                continue
            if not poly.is_single_term():
                raise ValueError("monomial matrix entries must be single-term")
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError("entry outside matrix")
            clean[(int(r), int(c))] = poly
        return MonomialMatrix(rows, cols, nvars, conductor,
                              tuple(sorted(clean.items(), key=lambda kv: kv[0])))

    def entry(self, r: int, c: int) -> LaurentPoly:
        for (i, j), poly in self.entries:
            if i == r and j == c:
                return poly
        return LaurentPoly.zero(self.nvars, self.conductor)

    def dense(self) -> List[List[LaurentPoly]]:
        zero = LaurentPoly.zero(self.nvars, self.conductor)
        grid = [[zero] * self.cols for _ in range(self.rows)]
        for (r, c), poly in self.entries:
            grid[r][c] = poly
        return grid

    def evaluate(self, free_values: Sequence[complex]) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for (r, c), poly in self.entries:
            out[r, c] = poly.eval(free_values)
        return out

    def evaluate_exact(self, free_values: Sequence[CycloCoeff]) -> List[List[CycloCoeff]]:
        conductor = self.conductor
        for g in free_values:
            conductor = _lcm(conductor, g.conductor)
        zero = CycloCoeff.zero(conductor)
        grid = [[zero] * self.cols for _ in range(self.rows)]
        for (r, c), poly in self.entries:
            grid[r][c] = poly.eval_exact(free_values).lift(conductor)
        return grid

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "MonomialMatrix":
        rpos = {r: i for i, r in enumerate(row_idx)}
        cpos = {c: j for j, c in enumerate(col_idx)}
        sub = {}
        for (r, c), poly in self.entries:
            if r in rpos and c in cpos:
                sub[(rpos[r], cpos[c])] = poly
        return MonomialMatrix.make(len(row_idx), len(col_idx), self.nvars, sub, self.conductor)


# ============================================================
# Determinants
# ============================================================

def _det_cofactor(grid: List[List[LaurentPoly]], nvars: int, conductor: int) -> LaurentPoly:
    n = len(grid)
    if n == 0:
        return LaurentPoly.constant(CycloCoeff.one(conductor), nvars)
    if n == 1:
        return grid[0][0]
    # expand along the sparsest row
    best = min(range(n), key=lambda r: sum(0 if p.is_zero() else 1 for p in grid[r]))
    total = LaurentPoly.zero(nvars, conductor)
    for c in range(n):
        piv = grid[best][c]
        if piv.is_zero():
            continue
        minor = [[grid[r][cc] for cc in range(n) if cc != c] for r in range(n) if r != best]
        term = piv * _det_cofactor(minor, nvars, conductor)
        if (best + c) % 2:
            term = -term
        total = total + term
    return total


def _exponent_box(m: MonomialMatrix) -> List[Tuple[int, int]]:
    """Per-variable [lo, hi] bound for determinant exponents, summed per row."""
    box = []
    for v in range(m.nvars):
        lo = hi = 0
        for r in range(m.rows):
            exps = [e[v] for (i, _), p in m.entries for e, _c in p.terms if i == r]
            if exps:
                lo += min(exps)
                hi += max(exps)
        box.append((lo, hi))
    return box


def _det_by_interpolation(m: MonomialMatrix) -> LaurentPoly:
    """Exact determinant via specialization at rational nodes, one variable at
    a time, with the exponent box inferred from the entries."""
    box = _exponent_box(m)

    def rec(grid: List[List[LaurentPoly]], var: int) -> LaurentPoly:
        if var == m.nvars:
            scalars = [[_constant_coeff(p, m.conductor) for p in row] for row in grid]
            det = _field_det(scalars, m.conductor)
            return LaurentPoly.constant(det, 0)
        lo, hi = box[var]
        npts = hi - lo + 1
        nodes = [Fraction(k + 2) for k in range(npts)]
        samples = []
        for t in nodes:
            tc = CycloCoeff.rational(t, 1)
            spec = [[_specialize_var(p, var, tc) for p in row] for row in grid]
            samples.append(rec(spec, var + 1))
        coeffs = _lagrange_coeffs(nodes, samples, m.conductor)
        out = LaurentPoly.zero(m.nvars - var, m.conductor)
        for k, poly in enumerate(coeffs):
            expo_power = lo + k
            shifted = {}
            for e, c in poly.terms:
                shifted[(expo_power,) + e] = c
            out = out + LaurentPoly(m.nvars - var, m.conductor,
                                    tuple(sorted(shifted.items(), key=lambda kv: kv[0])))
        return out

    return rec(m.dense(), 0)


def _specialize_var(p: LaurentPoly, var: int, value: CycloCoeff) -> LaurentPoly:
    """Substitute variable `var` (index within current poly) by a scalar,
    returning a Laurent polynomial in one fewer variable."""
    out: Dict[Tuple[int, ...], CycloCoeff] = {}
    conductor = _lcm(p.conductor, value.conductor)
    vinv = None
    for e, c in p.terms:
        k = e[0] if var == 0 else e[var]
        rest = e[:var] + e[var + 1:]
        factor = c.lift(conductor)
        if k > 0:
            for _ in range(k):
                factor = factor * value.lift(conductor)
        elif k < 0:
            if vinv is None:
                vinv = value.inverse()
            for _ in range(-k):
                factor = factor * vinv.lift(conductor)
        if rest in out:
            s = out[rest] + factor
            if s.is_zero():
                del out[rest]
            else:
                out[rest] = s
        elif not factor.is_zero():
            out[rest] = factor
    return LaurentPoly(p.nvars - 1, conductor, tuple(sorted(out.items(), key=lambda kv: kv[0])))


def _constant_coeff(p: LaurentPoly, conductor: int) -> CycloCoeff:
    if p.is_zero():
        return CycloCoeff.zero(conductor)
    if p.nvars != 0:
        raise DimensionMismatch("expected fully specialized polynomial")
    return p.terms[0][1]


def _field_det(grid: List[List[CycloCoeff]], conductor: int) -> CycloCoeff:
    """Dense determinant over Q(zeta_N) by Gaussian elimination."""
    n = len(grid)
    if n == 0:
        return CycloCoeff.one(conductor)
    a = [row[:] for row in grid]
    det = CycloCoeff.one(conductor).lift(_lcm(conductor, a[0][0].conductor))
    cond = det.conductor
    a = [[x.lift(cond) for x in row] for row in a]
    sign = 1
    for k in range(n):
        piv = None
        for r in range(k, n):
            if not a[r][k].is_zero():
                piv = r
                break
        if piv is None:
            return CycloCoeff.zero(cond)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        det = det * a[k][k]
        inv = a[k][k].inverse()
        for r in range(k + 1, n):
            if a[r][k].is_zero():
                continue
            f = a[r][k] * inv
            for c in range(k, n):
                a[r][c] = a[r][c] - f * a[k][c]
    if sign < 0:
        det = -det
    return det


def _lagrange_coeffs(nodes: List[Fraction], samples: List[LaurentPoly],
                     conductor: int) -> List[LaurentPoly]:
    """Coefficients of the interpolating polynomial through (node, sample)."""
    npts = len(nodes)
    nv = samples[0].nvars
    coeffs = [LaurentPoly.zero(nv, conductor) for _ in range(npts)]
    for i, (xi, yi) in enumerate(zip(nodes, samples)):
        poly = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(nodes):
            if j == i:
                continue
            poly = _poly_mul(poly, [-xj, Fraction(1)])
            denom *= xi - xj
        for k, b in enumerate(poly):
            if b == 0:
                continue
            w = CycloCoeff.rational(b / denom, 1).lift(yi.conductor)
            coeffs[k] = coeffs[k] + yi.scale(w)
    return coeffs


def laurent_det(m: MonomialMatrix, cap: int = DEFAULT_DET_CAP,
                interpolate: bool = True) -> LaurentPoly:
    """Exact determinant of a monomial matrix.

    Cofactor expansion for sizes up to `cap`; above that, evaluation at
    rational nodes followed by exponent-box interpolation.
    """
    if m.rows != m.cols:
        raise NotSquare(f"matrix is {m.rows}x{m.cols}")
    if m.rows <= cap:
        return _det_cofactor(m.dense(), m.nvars, m.conductor)
    if not interpolate:
        raise CapExceeded(f"size {m.rows} exceeds cofactor cap {cap} and interpolation is disabled")
    return _det_by_interpolation(m)


def laurent_minors(m: MonomialMatrix, q: int, budget: int = 20000,
                   cap: int = DEFAULT_DET_CAP) -> List[LaurentPoly]:
    """All q x q minors, normalized, with zero minors and duplicates removed."""
    if q < 1:
        raise ValueError("minor size must be positive")
    if q > min(m.rows, m.cols):
        raise ValueError("minor size exceeds matrix dimensions")
    count = math.comb(m.rows, q) * math.comb(m.cols, q)
    if count > budget:
        raise BudgetExceeded(count, budget)
    from itertools import combinations

    seen = {}
    for rows in combinations(range(m.rows), q):
        for cols in combinations(range(m.cols), q):
            sub = m.submatrix(rows, cols)
            if len(sub.entries) < q:  # some row or column is empty
                continue
            det = laurent_det(sub, cap=max(cap, q))
            if det.is_zero():
                continue
            norm = det.normalized()
            seen[norm.sort_key()] = norm
    return sorted(seen.values(), key=lambda p: p.sort_key())


# ============================================================
# Ranks
# ============================================================

def numeric_rank(matrix: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    """Count of singular values above tol * (largest singular value)."""
    a = np.asarray(matrix, dtype=complex)
    if a.size == 0:
        return 0
    if not np.all(np.isfinite(a.view(float))):
        raise NonFiniteEntry("matrix contains non-finite entries")
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def exact_rank_monomial(m: "MonomialMatrix", free_values: Sequence[CycloCoeff]) -> int:
    """Exact rank of a monomial matrix specialized at an exact character.

    Rational characters of a conductor-1 matrix take a sparse fast path;
    anything cyclotomic falls through to the dense field elimination.
    """
    if m.conductor == 1 and all(g.conductor == 1 and g.is_rational() for g in free_values):
        vals = [g.vec[0] for g in free_values]
        per_row: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), poly in m.entries:
            (expo, coeff), = poly.terms
            v = coeff.vec[0]
            for g, e in zip(vals, expo):
                if e:
                    v *= g**e
            per_row.setdefault(r, []).append((c, v))
        arr = np.zeros((m.rows, m.cols), dtype=object)
        for r, items in per_row.items():
            den = 1
            for _, v in items:
                den = _lcm(den, v.denominator)
            for c, v in items:
                arr[r, c] = int(v * den)
        try:
            small = arr.astype(np.int64)
            return _rank_int64_scalar(small)
        except (OverflowError, ValueError):
            return _rank_int_vectors(arr[:, :, None], 1)
    return exact_rank(m.evaluate_exact(free_values))


def exact_rank(grid: Sequence[Sequence[CycloCoeff]]) -> int:
    """Exact rank over Q(zeta_N) of a dense matrix of field elements.

    Clears denominators rowwise and runs fraction-free elimination on integer
    coefficient vectors (vectorized when they fit in int64, object fallback
    otherwise).
    """
    nrows = len(grid)
    if nrows == 0:
        return 0
    ncols = len(grid[0])
    if ncols == 0:
        return 0
    conductor = 1
    for row in grid:
        for x in row:
            conductor = _lcm(conductor, x.conductor)
    phi = euler_phi(conductor)
    mat = np.zeros((nrows, ncols, phi), dtype=object)
    for i, row in enumerate(grid):
        denom = 1
        lifted = [x.lift(conductor) for x in row]
        for x in lifted:
            for a in x.vec:
                denom = _lcm(denom, a.denominator)
        for j, x in enumerate(lifted):
            mat[i, j, :] = [int(a * denom) for a in x.vec]
    try:
        small = mat.astype(np.int64)
        if np.array_equal(small.astype(object), mat):
            return _rank_int_vectors(small, conductor)
    except (OverflowError, ValueError):
        pass
    return _rank_int_vectors(mat, conductor)


def _ring_mul(a: np.ndarray, b: np.ndarray, tab: Optional[np.ndarray]) -> np.ndarray:
    """Multiply coefficient vectors in Z[zeta_N]; a is (phi,), b is (..., phi)."""
    if tab is None:  # phi == 1, plain integers
        return a[0] * b
    return np.einsum("s,...t,stu->...u", a, b, tab)


def _rank_int64_scalar(mat: np.ndarray) -> int:
    """Vectorized fraction-free elimination for a plain int64 matrix (the
    conductor-1 case).  Raises OverflowError when growth threatens int64."""
    work = mat.copy()
    nrows, ncols = work.shape
    rank = 0
    row = 0
    for col in range(ncols):
        nz = np.nonzero(work[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            work[[row, piv]] = work[[piv, row]]
        p = int(work[row, col])
        below = work[row + 1:, col]
        act = np.nonzero(below)[0]
        if act.size:
            blk = work[row + 1:][act]
            mx = int(np.abs(blk).max())
            mr = int(np.abs(work[row]).max())
            mf = int(np.abs(below[act]).max())
            if max(abs(p) * mx, mf * mr) > 2**61:
                raise OverflowError("int64 elimination overflow")
            blk = p * blk - np.outer(below[act], work[row])
            g = np.gcd.reduce(np.abs(blk), axis=1)
            np.maximum(g, 1, out=g)
            blk //= g[:, None]
            work[row + 1:][act] = blk
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def _rank_int_vectors(mat: np.ndarray, conductor: int) -> int:
    """Fraction-free elimination on an integer matrix over Z[zeta_N].

    mat has shape (rows, cols, phi).  Row operations use two-term updates
    row_i <- piv*row_i - f*row_piv followed by content reduction, which keeps
    entries small for the sparse incidence-like matrices this kernel sees.
    """
    if mat.shape[2] == 1 and mat.dtype == np.int64:
        try:
            return _rank_int64_scalar(mat[:, :, 0])
        except OverflowError:
            return _rank_int_vectors(mat.astype(object), conductor)
    phi = mat.shape[2]
    tab = _mult_table(conductor) if phi > 1 else None
    if mat.dtype == np.int64 and tab is not None:
        tab = tab.astype(np.int64)
    work = mat.copy()
    nrows, ncols = work.shape[0], work.shape[1]
    rank = 0
    row = 0
    int64 = work.dtype == np.int64
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if np.any(work[r, col] != 0):
                piv = r
                break
        if piv is None:
            continue
        if piv != row:
            work[[row, piv]] = work[[piv, row]]
        pivot = work[row, col].copy()
        for r in range(row + 1, nrows):
            f = work[r, col]
            if not np.any(f != 0):
                continue
            if int64:
                mx = max(int(np.abs(work[r]).max()), int(np.abs(work[row]).max()), 1)
                mp = max(int(np.abs(pivot).max()), int(np.abs(f).max()), 1)
                if mx * mp * (phi * phi + 1) > 2**62:
                    return _rank_int_vectors(mat.astype(object), conductor)
            new = _ring_mul(pivot, work[r], tab) - _ring_mul(f.copy(), work[row][None, :, :], tab)[0]
            g = np.gcd.reduce(np.abs(new).ravel()) if int64 else _object_gcd(new)
            if g > 1:
                new = new // g
            work[r] = new
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def _object_gcd(arr: np.ndarray) -> int:
    g = 0
    for v in arr.ravel():
        g = math.gcd(g, abs(int(v)))
        if g == 1:
            return 1
    return max(g, 1)
