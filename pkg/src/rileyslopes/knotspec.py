"""2-bridge knot parameters, presentation data, and notation conversions.

A 2-bridge knot is specified by coprime odd integers (p, q) with p > 0 and
-p < q < p.  The group presentation data derived here:

    e_i   = (-1)^floor(i*q/p)            for i = 1 .. p-1
    sigma = sum of the e_i
    w     = x^{e_1} y^{e_2} ... x^{e_{p-2}} y^{e_{p-1}}   (w* swaps x and y)

Continued fractions use one fixed convention throughout the package:

    [a_1, ..., a_n]  =  a_1 + 1/(a_2 + 1/(... + 1/a_n))  =  p/q,

pinned by the fixture [3, 1, 2] -> K(11, 3).  When the evaluated denominator
is even it is replaced by the odd representative of its class mod p (Schubert
equivalence is mod p), so constructed knots always carry odd q.  Negative q is
kept, not normalized away: mirroring flips surgery-slope signs, so chirality
is part of the data.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence, Tuple

from .errors import DegenerateEntry, NotAKnot, NotTwoBridge


@dataclass(frozen=True)
class TwoBridgeKnot:
    """Validated (p, q) pair; construct via :func:`validate_knot`."""

    p: int
    q: int
    is_torus: bool

    def __str__(self) -> str:
        return f"K({self.p},{self.q})"


@dataclass(frozen=True)
class SignData:
    """Exponent signs e_1..e_{p-1} of the relator word and their sum sigma."""

    signs: Tuple[int, ...]
    sigma: int


@dataclass(frozen=True)
class RelatorWord:
    """Alternating word in x, y with exponents +-1; ``starred`` swaps roles."""

    letters: Tuple[Tuple[str, int], ...]
    starred: bool

    def __str__(self) -> str:
        def show(gen: str, e: int) -> str:
            return gen if e == 1 else gen + "^-1"

        return " ".join(show(g, e) for g, e in self.letters)


@dataclass(frozen=True)
class ContinuedFraction:
    """Nonempty sequence of nonzero integer entries."""

    entries: Tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(a) for a in self.entries)
        if not entries:
            raise DegenerateEntry("continued fraction must be nonempty")
        if any(a == 0 for a in entries):
            raise DegenerateEntry("continued fraction entries must be nonzero")
        object.__setattr__(self, "entries", entries)

    def value(self) -> Fraction:
        """Evaluate under the package convention a_1 + 1/(a_2 + 1/...)."""
        acc = Fraction(self.entries[-1])
        for a in reversed(self.entries[:-1]):
            if acc == 0:
                raise NotAKnot(f"continued fraction {list(self.entries)} degenerates (division by zero)")
            acc = a + 1 / acc
        return acc


@dataclass(frozen=True)
class WangFamilySpec:
    """Block continued-fraction family over a base expansion.

    ``c`` holds the 2n interleaved twist parameters and ``eps`` the 2n+1
    block signs; ``d`` is the alternating sign sum eps_1 - eps_2 + ... and is
    always odd (hence nonzero).
    """

    base: ContinuedFraction
    c: Tuple[int, ...]
    eps: Tuple[int, ...]
    d: int = field(init=False)

    def __post_init__(self):
        c = tuple(int(x) for x in self.c)
        eps = tuple(int(x) for x in self.eps)
        if len(c) % 2 != 0:
            raise ValueError("c must have even length 2n")
        if len(eps) != len(c) + 1:
            raise ValueError("eps must have length len(c) + 1")
        if any(e not in (1, -1) for e in eps):
            raise ValueError("eps entries must be +1 or -1")
        d = sum(e if i % 2 == 0 else -e for i, e in enumerate(eps))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "d", d)


DEFAULT_WANG_BASE = (3, 1, 2)


def validate_knot(p: int, q: int) -> TwoBridgeKnot:
    """Validate (p, q) and detect the torus case.

    Torus detection scans the equivalence class {+-q^{+-1} mod p} for a
    representative of absolute value 1; needed because the left-orderability
    pipeline applies only to non-torus knots.
    """
    p, q = int(p), int(q)
    if p <= 0 or p % 2 == 0:
        raise NotTwoBridge(f"p must be a positive odd integer, got {p}")
    if q % 2 == 0:
        raise NotTwoBridge(f"q must be odd, got {q}")
    if not (-p < q < p):
        raise NotTwoBridge(f"q must satisfy -p < q < p, got q={q}, p={p}")
    if gcd(p, abs(q)) != 1:
        raise NotTwoBridge(f"gcd(p, |q|) must be 1, got gcd({p}, {abs(q)}) = {gcd(p, abs(q))}")
    return TwoBridgeKnot(p=p, q=q, is_torus=_is_torus(p, q))


def _equivalence_class(p: int, q: int):
    """Residues {q, -q, q^{-1}, -q^{-1}} mod p."""
    qm = q % p
    qi = pow(qm, -1, p)
    return {qm, (-qm) % p, qi, (-qi) % p}


def _is_torus(p: int, q: int) -> bool:
    if p == 1:
        return True
    return any(r == 1 or r == p - 1 for r in _equivalence_class(p, q))


def same_knot(k1: TwoBridgeKnot, k2: TwoBridgeKnot) -> bool:
    """Isotopy test: equal p and q2 = q1^{+-1} (mod p)."""
    if k1.p != k2.p:
        return False
    q1m = k1.q % k1.p
    return k2.q % k1.p in {q1m, pow(q1m, -1, k1.p)}


def mirror_knot(k: TwoBridgeKnot) -> TwoBridgeKnot:
    """The mirror image, parameters K(p, -q)."""
    return validate_knot(k.p, -k.q)


def sign_data(k: TwoBridgeKnot) -> SignData:
    """All e_i = (-1)^floor(i*q/p) and sigma = sum e_i."""
    signs = tuple((-1) ** ((i * k.q) // k.p) for i in range(1, k.p))
    return SignData(signs=signs, sigma=sum(signs))


def relator_words(k: TwoBridgeKnot) -> Tuple[RelatorWord, RelatorWord]:
    """(w, w*): alternating words of length p-1 with exponents e_i."""
    signs = sign_data(k).signs
    w = tuple(("x" if i % 2 == 0 else "y", e) for i, e in enumerate(signs))
    ws = tuple(("y" if i % 2 == 0 else "x", e) for i, e in enumerate(signs))
    return RelatorWord(letters=w, starred=False), RelatorWord(letters=ws, starred=True)


def cf_to_pq(cf: ContinuedFraction) -> TwoBridgeKnot:
    """Convert a continued fraction to K(p, q) under the package convention."""
    v = cf.value()
    p, q = v.numerator, v.denominator
    if p < 0:
        p, q = -p, -q
    if p % 2 == 0:
        raise NotAKnot(f"{list(cf.entries)} evaluates to {v}: even p is a 2-component link")
    if p == 1:
        raise NotAKnot(f"{list(cf.entries)} evaluates to {v}: the unknot is not 2-bridge")
    qm = q % p
    if qm % 2 == 0:
        qm -= p
    return validate_knot(p, qm)


def pq_to_cf(k: TwoBridgeKnot) -> ContinuedFraction:
    """Canonical (floor-based) expansion of p/q; inverse of cf_to_pq on its image."""
    v = Fraction(k.p, k.q)
    entries = []
    while True:
        a = v.numerator // v.denominator  # floor
        rem = v - a
        if rem == 0:
            entries.append(a)
            break
        if a == 0 and not entries:
            raise NotAKnot(f"|p/q| < 1 cannot arise from a valid knot: {v}")
        entries.append(a)
        v = 1 / rem
    return ContinuedFraction(tuple(entries))


def double_twist_to_pq(k: int, m: int) -> TwoBridgeKnot:
    """The double-twist knot C(k, m) with k >= 1 and m even nonzero.

    Four-case closed form (k odd/even, m positive/negative):

        k odd:  C(k, 2n)  = K(-1 + 2nk, k)
                C(k, -2n) = K( 1 + 2nk, k)
        k even: C(k, 2n)  = K(-1 + 2nk,  1 - (2n-1)k)
                C(k, -2n) = K( 1 + 2nk, -1 - (2n-1)k)

    C(2, +-2) is flagged with a warning: the closed form assigns C(2, 2) the
    torus parameters K(3, -1), which contradicts identifying C(2, 2) with a
    twist knot; the formula output is returned as computed.
    """
    k, m = int(k), int(m)
    if k < 1:
        raise NotTwoBridge(f"double-twist parameter k must be >= 1, got {k}")
    if m == 0 or m % 2 != 0:
        raise NotTwoBridge(f"double-twist parameter m must be even and nonzero, got {m}")
    n = abs(m) // 2
    if k % 2 == 1:
        p, q = (-1 + 2 * n * k, k) if m > 0 else (1 + 2 * n * k, k)
    else:
        if m > 0:
            p, q = -1 + 2 * n * k, 1 - (2 * n - 1) * k
        else:
            p, q = 1 + 2 * n * k, -1 - (2 * n - 1) * k
    if k == 2 and abs(m) == 2:
        warnings.warn(
            f"C(2, {m}) maps to K({p}, {q}) under the closed form; "
            "cross-check this parameter pair independently",
            stacklevel=2,
        )
    return validate_knot(p, q)


def wang_family(spec: WangFamilySpec) -> Tuple[ContinuedFraction, int]:
    """Assemble the block continued fraction of the family member and return d.

    Blocks alternate the base expansion and its reversed negation, each
    scaled by eps_i, with single entries 2*c_i interleaved:

        [eps_1*a, 2c_1, eps_2*a^{-1}, 2c_2, eps_3*a, ...]
    """
    a = spec.base.entries
    a_inv = tuple(-x for x in reversed(a))
    entries = []
    for i, e in enumerate(spec.eps):
        block = a if i % 2 == 0 else a_inv
        entries.extend(e * x for x in block)
        if i < len(spec.c):
            entries.append(2 * spec.c[i])
    return ContinuedFraction(tuple(entries)), spec.d
