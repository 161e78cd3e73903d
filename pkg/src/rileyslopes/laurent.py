"""Exact arithmetic in Z[t, 1/t][u] and 2x2 matrices over it.

The ring element is :class:`BivarPoly`, stored as a sparse map
``(t_exponent, u_degree) -> int`` with arbitrary-precision integer
coefficients; t exponents may be negative, u degrees may not.  All symbolic
identities are exact; floating arithmetic enters only through the ``eval_*``
functions, which use mpmath at a configurable working precision
(default 50 significant decimal digits).

:func:`word_matrix` evaluates the alternating matrix word

    W = C^{e_1} D^{e_2} ... C^{e_{p-2}} D^{e_{p-1}}

over the generator matrices

    C = [[t, 1], [0, 1/t]],   D = [[t, 0], [-u, 1/t]],

whose entries (a, b, c, d) drive everything downstream: the representation
condition, the slope equation, and the longitude commutation checks.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, NamedTuple, Tuple, Union

import mpmath as mp

from .errors import ZeroT

DEFAULT_DPS = 50

Key = Tuple[int, int]
Scalar = Union[int, float, str, Fraction, mp.mpf]


def to_mpf(x: Scalar) -> mp.mpf:
    """Convert common scalar types to mpf at the ambient precision."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


class UPoly:
    """Univariate integer polynomial in u, sparse map degree -> coefficient."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, int] = ()):  # copies and prunes
        c = {}
        for d, v in dict(coeffs).items():
            if v:
                if d < 0:
                    raise ValueError("u degrees must be nonnegative")
                c[int(d)] = int(v)
        self._coeffs = c

    @property
    def coeffs(self) -> Dict[int, int]:
        return dict(self._coeffs)

    @property
    def degree(self):
        """Max degree, or None for the zero polynomial."""
        return max(self._coeffs) if self._coeffs else None

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, UPoly) and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(frozenset(self._coeffs.items()))

    def __add__(self, other: "UPoly") -> "UPoly":
        c = dict(self._coeffs)
        for d, v in other._coeffs.items():
            c[d] = c.get(d, 0) + v
        return UPoly(c)

    def __neg__(self) -> "UPoly":
        return UPoly({d: -v for d, v in self._coeffs.items()})

    def __sub__(self, other: "UPoly") -> "UPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return UPoly({d: v * other for d, v in self._coeffs.items()})
        r: Dict[int, int] = {}
        for d1, v1 in self._coeffs.items():
            for d2, v2 in other._coeffs.items():
                r[d1 + d2] = r.get(d1 + d2, 0) + v1 * v2
        return UPoly(r)

    __rmul__ = __mul__

    def times_u(self, k: int = 1) -> "UPoly":
        return UPoly({d + k: v for d, v in self._coeffs.items()})

    def derivative(self) -> "UPoly":
        return UPoly({d - 1: d * v for d, v in self._coeffs.items() if d >= 1})

    def to_list(self):
        """Dense coefficient list, low degree first; [] for zero."""
        if not self._coeffs:
            return []
        out = [0] * (max(self._coeffs) + 1)
        for d, v in self._coeffs.items():
            out[d] = v
        return out

    def eval_fraction(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.to_list()):
            acc = acc * x + c
        return acc

    def eval_real(self, u: Scalar) -> mp.mpf:
        uu = to_mpf(u)
        acc = mp.mpf(0)
        for c in reversed(self.to_list()):
            acc = acc * uu + c
        return acc

    def __repr__(self) -> str:
        if not self._coeffs:
            return "UPoly(0)"
        parts = [f"{v}*u^{d}" for d, v in sorted(self._coeffs.items())]
        return "UPoly(" + " + ".join(parts) + ")"


class BivarPoly:
    """Element of Z[t, 1/t][u]: sparse map (t_exponent, u_degree) -> int."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, int] = ()):  # copies and prunes
        t = {}
        for (i, j), v in dict(terms).items():
            if v:
                if j < 0:
                    raise ValueError("u degrees must be nonnegative")
                t[(int(i), int(j))] = int(v)
        self._terms = t

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls) -> "BivarPoly":
        return cls()

    @classmethod
    def const(cls, n: int) -> "BivarPoly":
        return cls({(0, 0): n})

    @classmethod
    def one(cls) -> "BivarPoly":
        return cls.const(1)

    @classmethod
    def t_power(cls, k: int) -> "BivarPoly":
        return cls({(k, 0): 1})

    @classmethod
    def u_power(cls, j: int) -> "BivarPoly":
        return cls({(0, j): 1})

    @classmethod
    def monomial(cls, t_exp: int, u_deg: int, coeff: int = 1) -> "BivarPoly":
        return cls({(t_exp, u_deg): coeff})

    # -- structure -----------------------------------------------------------

    @property
    def terms(self) -> Dict[Key, int]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def u_degree(self):
        """Max u degree, or None for the zero polynomial."""
        return max(j for _, j in self._terms) if self._terms else None

    def t_span(self):
        """(min, max) t exponent, or None for the zero polynomial."""
        if not self._terms:
            return None
        exps = [i for i, _ in self._terms]
        return (min(exps), max(exps))

    def coefficient_of_t(self, t_exp: int) -> UPoly:
        """The u-polynomial multiplying t^t_exp."""
        return UPoly({j: v for (i, j), v in self._terms.items() if i == t_exp})

    def u_coefficients(self) -> Dict[int, "BivarPoly"]:
        """View as a polynomial in u: degree -> Laurent coefficient in t."""
        out: Dict[int, Dict[Key, int]] = {}
        for (i, j), v in self._terms.items():
            out.setdefault(j, {})[(i, 0)] = v
        return {j: BivarPoly(d) for j, d in out.items()}

    # -- ring operations ------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, BivarPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "BivarPoly") -> "BivarPoly":
        t = dict(self._terms)
        for k, v in other._terms.items():
            t[k] = t.get(k, 0) + v
        return BivarPoly(t)

    def __neg__(self) -> "BivarPoly":
        return BivarPoly({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "BivarPoly") -> "BivarPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return BivarPoly({k: v * other for k, v in self._terms.items()})
        r: Dict[Key, int] = {}
        for (i1, j1), v1 in self._terms.items():
            for (i2, j2), v2 in other._terms.items():
                k = (i1 + i2, j1 + j2)
                r[k] = r.get(k, 0) + v1 * v2
        return BivarPoly(r)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BivarPoly":
        if n < 0:
            raise ValueError("negative powers are not defined in this ring")
        result = BivarPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus and substitution --------------------------------------------

    def partial_u(self) -> "BivarPoly":
        return BivarPoly({(i, j - 1): j * v for (i, j), v in self._terms.items() if j >= 1})

    def partial_t(self) -> "BivarPoly":
        return BivarPoly({(i - 1, j): i * v for (i, j), v in self._terms.items() if i != 0})

    def t_partial_t(self) -> "BivarPoly":
        """The degree-preserving derivation t * d/dt."""
        return BivarPoly({(i, j): i * v for (i, j), v in self._terms.items() if i != 0})

    def subs_u(self, value: "BivarPoly") -> "BivarPoly":
        """Substitute u -> value (Horner in u); exact."""
        if not self._terms:
            return BivarPoly.zero()
        by_deg = self.u_coefficients()
        acc = BivarPoly.zero()
        for j in range(max(by_deg), -1, -1):
            acc = acc * value + by_deg.get(j, BivarPoly.zero())
        return acc

    def subs_t_inverse(self) -> "BivarPoly":
        """Substitute t -> 1/t."""
        return BivarPoly({(-i, j): v for (i, j), v in self._terms.items()})

    def at_t_minus_one(self) -> UPoly:
        """Exact substitution t = -1."""
        out: Dict[int, int] = {}
        for (i, j), v in self._terms.items():
            s = v if i % 2 == 0 else -v
            out[j] = out.get(j, 0) + s
        return UPoly(out)

    def at_u(self, value: int) -> "BivarPoly":
        """Exact substitution of an integer for u."""
        return self.subs_u(BivarPoly.const(value))

    # -- magnitude ------------------------------------------------------------

    def log10_magnitude(self, log10_t: float, log10_u: float) -> float:
        """log10 of the largest monomial magnitude |c| * |t|^i * |u|^j.

        Inputs are log10 of the absolute values (log space avoids float
        overflow).  Used to pick a working precision at which an absolute
        residual tolerance remains meaningful.  Returns -inf for zero.
        """
        if not self._terms:
            return float("-inf")
        best = float("-inf")
        for (i, j), v in self._terms.items():
            m = math.log10(abs(v)) + i * log10_t + (j * log10_u if j else 0.0)
            if m > best:
                best = m
        return best

    # -- serialization ----------------------------------------------------------

    def canonical_text(self) -> str:
        """Canonical text form: terms sorted by (t_exponent, u_degree).

        Example: ``t^-2*u^0:1;t^0*u^1:-1``.  The zero polynomial is ``0``.
        """
        if not self._terms:
            return "0"
        parts = [f"t^{i}*u^{j}:{v}" for (i, j), v in sorted(self._terms.items())]
        return ";".join(parts)

    @classmethod
    def from_canonical_text(cls, text: str) -> "BivarPoly":
        text = text.strip()
        if text == "0":
            return cls.zero()
        terms: Dict[Key, int] = {}
        for part in text.split(";"):
            mono, coeff = part.split(":")
            tpart, upart = mono.split("*")
            i = int(tpart[2:])
            j = int(upart[2:])
            terms[(i, j)] = int(coeff)
        return cls(terms)

    def __repr__(self) -> str:
        return f"BivarPoly({self.canonical_text()})"


# -- 2x2 matrices --------------------------------------------------------------

class Mat2:
    """2x2 matrix over Z[t, 1/t][u]."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: BivarPoly, b: BivarPoly, c: BivarPoly, d: BivarPoly):
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls) -> "Mat2":
        one, zero = BivarPoly.one(), BivarPoly.zero()
        return cls(one, zero, zero, one)

    def __mul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a - other.a, self.b - other.b,
                    self.c - other.c, self.d - other.d)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Mat2) and self.a == other.a and self.b == other.b
                and self.c == other.c and self.d == other.d)

    @property
    def is_zero(self) -> bool:
        return self.a.is_zero and self.b.is_zero and self.c.is_zero and self.d.is_zero

    def det(self) -> BivarPoly:
        return self.a * self.d - self.b * self.c

    def entries(self) -> Tuple[BivarPoly, BivarPoly, BivarPoly, BivarPoly]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self) -> str:
        return f"Mat2([{self.a!r}, {self.b!r}], [{self.c!r}, {self.d!r}])"


class BaseMatrices(NamedTuple):
    c: Mat2
    d: Mat2
    x: Mat2
    c_inv: Mat2
    d_inv: Mat2


def base_matrices() -> BaseMatrices:
    """The generator matrices C, D, the intertwiner X, and exact C/D inverses.

    X satisfies X C = D X and X D = C X; det X = u - (t - 1/t)^2, so X is not
    invertible in the ring, while C and D are (unit determinant).
    """
    one, zero = BivarPoly.one(), BivarPoly.zero()
    t, tinv, u = BivarPoly.t_power(1), BivarPoly.t_power(-1), BivarPoly.u_power(1)
    c = Mat2(t, one, zero, tinv)
    c_inv = Mat2(tinv, -one, zero, t)
    d = Mat2(t, zero, -u, tinv)
    d_inv = Mat2(tinv, zero, u, t)
    x = Mat2(t - tinv, one, -u, tinv - t)
    return BaseMatrices(c, d, x, c_inv, d_inv)


@dataclass(frozen=True)
class WordEntries:
    """The four entries of the matrix word W, in reading order a, b, c, d."""

    A: BivarPoly
    B: BivarPoly
    Cc: BivarPoly
    Dd: BivarPoly


def word_matrix(knot, starred: bool = False) -> Mat2:
    """Exact product C^{e_1} D^{e_2} ... in sign order; ``starred`` swaps C and D.

    ``knot`` is a validated TwoBridgeKnot (duck-typed: needs .p and .q).
    """
    from .knotspec import sign_data  # local import to avoid a cycle

    base = base_matrices()
    letters = ((base.d, base.d_inv), (base.c, base.c_inv)) if starred else \
              ((base.c, base.c_inv), (base.d, base.d_inv))
    w = Mat2.identity()
    for idx, e in enumerate(sign_data(knot).signs):
        pos, inv = letters[idx % 2]
        w = w * (pos if e == 1 else inv)
    return w


def word_matrix_balanced(knot, starred: bool = False) -> Mat2:
    """Same product computed by balanced binary splitting (exact equality check)."""
    from .knotspec import sign_data

    base = base_matrices()
    letters = ((base.d, base.d_inv), (base.c, base.c_inv)) if starred else \
              ((base.c, base.c_inv), (base.d, base.d_inv))
    factors = []
    for idx, e in enumerate(sign_data(knot).signs):
        pos, inv = letters[idx % 2]
        factors.append(pos if e == 1 else inv)

    def prod(lo: int, hi: int) -> Mat2:
        if hi - lo == 1:
            return factors[lo]
        mid = (lo + hi) // 2
        return prod(lo, mid) * prod(mid, hi)

    return prod(0, len(factors)) if factors else Mat2.identity()


_entries_cache: Dict[Tuple[int, int], WordEntries] = {}
_entries_lock = threading.Lock()


def entries(knot) -> WordEntries:
    """(a, b, c, d) of W for the knot; cached per (p, q)."""
    key = (knot.p, knot.q)
    hit = _entries_cache.get(key)
    if hit is not None:
        return hit
    w = word_matrix(knot, starred=False)
    result = WordEntries(A=w.a, B=w.b, Cc=w.c, Dd=w.d)
    with _entries_lock:
        _entries_cache.setdefault(key, result)
    return _entries_cache[key]


# -- numeric evaluation ----------------------------------------------------------

def _horner_laurent(coeffs: Dict[int, mp.mpf], t: mp.mpf) -> mp.mpf:
    """Evaluate a Laurent polynomial given exponent -> numeric coefficient."""
    if not coeffs:
        return mp.mpf(0)
    pos = {i: v for i, v in coeffs.items() if i >= 0}
    neg = {-i: v for i, v in coeffs.items() if i < 0}
    acc = mp.mpf(0)
    if pos:
        for i in range(max(pos), -1, -1):
            acc = acc * t + pos.get(i, 0)
    if neg:
        tinv = 1 / t
        acc_n = mp.mpf(0)
        for i in range(max(neg), 0, -1):
            acc_n = acc_n * tinv + neg.get(i, 0)
        acc += acc_n * tinv
    return acc


def _eval_core(poly: BivarPoly, t, u) -> mp.mpf:
    """Horner in u of Horner-in-t Laurent coefficients, at ambient precision."""
    by_deg: Dict[int, Dict[int, int]] = {}
    for (i, j), v in poly._terms.items():
        by_deg.setdefault(j, {})[i] = v
    if not by_deg:
        return mp.mpf(0)
    acc = mp.mpf(0)
    for j in range(max(by_deg), -1, -1):
        cj = by_deg.get(j)
        layer = _horner_laurent({i: mp.mpf(v) for i, v in cj.items()}, t) if cj else mp.mpf(0)
        acc = acc * u + layer
    return acc


def eval_real(poly: BivarPoly, t: Scalar, u: Scalar, dps: int = None) -> mp.mpf:
    """Evaluate poly at real (t, u) with t != 0.

    Integer coefficients are exact; rounding happens only in the mpf
    arithmetic at the working precision (``dps``, default the larger of the
    ambient precision and DEFAULT_DPS).
    """
    work = dps if dps is not None else max(mp.mp.dps, DEFAULT_DPS)
    with mp.workdps(work):
        tt, uu = to_mpf(t), to_mpf(u)
        if tt == 0:
            raise ZeroT("evaluation requires t != 0")
        return _eval_core(poly, tt, uu)


def eval_real_with_bound(poly: BivarPoly, t: Scalar, u: Scalar, dps: int = None):
    """Evaluate and return (value, rounding bound).

    The bound is conservative: (sum of |term| magnitudes) * 2^(3 + ceil(log2 n)
    - precision_bits), covering per-term relative error and accumulation.
    """
    work = dps if dps is not None else max(mp.mp.dps, DEFAULT_DPS)
    with mp.workdps(work):
        tt, uu = to_mpf(t), to_mpf(u)
        if tt == 0:
            raise ZeroT("evaluation requires t != 0")
        value = _eval_core(poly, tt, uu)
        abs_poly = BivarPoly({k: abs(v) for k, v in poly._terms.items()})
        abs_sum = _eval_core(abs_poly, abs(tt), abs(uu))
        n = max(len(poly), 1)
        bound = abs_sum * mp.mpf(2) ** (3 + n.bit_length() - mp.mp.prec)
        return value, bound


def eval_unit_circle(poly: BivarPoly, theta: Scalar, u: Scalar, dps: int = None):
    """Evaluate at t = exp(i*theta) for theta in (0, pi); returns (re, im)."""
    work = dps if dps is not None else max(mp.mp.dps, DEFAULT_DPS)
    with mp.workdps(work):
        th, uu = to_mpf(theta), to_mpf(u)
        t = mp.mpc(mp.cos(th), mp.sin(th))
        by_deg: Dict[int, Dict[int, int]] = {}
        for (i, j), v in poly._terms.items():
            by_deg.setdefault(j, {})[i] = v
        if not by_deg:
            return mp.mpf(0), mp.mpf(0)
        acc = mp.mpc(0)
        for j in range(max(by_deg), -1, -1):
            cj = by_deg.get(j, {})
            layer = mp.mpc(0)
            for i, v in cj.items():
                layer += v * t ** i
            acc = acc * uu + layer
        return acc.real, acc.imag


def eval_dps(poly: BivarPoly, t: Scalar, u: Scalar, base_dps: int, guard: int = 8) -> int:
    """Working precision keeping absolute tolerances meaningful at (t, u).

    Adds the decimal magnitude of the largest monomial bound so that an
    absolute residual target remains below the representable resolution.
    """
    ta, ua = abs(to_mpf(t)), abs(to_mpf(u))
    lt = float(mp.log10(ta)) if ta > 0 else -300.0
    lu = float(mp.log10(ua)) if ua > 0 else -300.0
    m = poly.log10_magnitude(lt, lu)
    bump = max(0, int(math.ceil(m))) if math.isfinite(m) else 0
    return base_dps + bump + guard
