"""Exact real-root isolation for integer polynomials via Sturm sequences.

Polynomials are dense coefficient lists, low degree first, with exact integer
(or Fraction) coefficients.  Isolation returns disjoint rational intervals
each containing exactly one real root (exact rational roots come back as
degenerate intervals).  Refinement to an mpf uses bisection followed by a
guarded Newton polish at the requested precision.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

import mpmath as mp

Interval = Tuple[Fraction, Fraction]


def strip(coeffs: Sequence) -> List:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(coeffs: Sequence) -> int:
    """Degree, or -1 for the zero polynomial."""
    return len(strip(coeffs)) - 1


def eval_at(coeffs: Sequence, x):
    acc = x * 0
    for c in reversed(list(coeffs)):
        acc = acc * x + c
    return acc


def derivative(coeffs: Sequence) -> List:
    return [i * c for i, c in enumerate(coeffs)][1:]


def primitive(coeffs: Sequence[Fraction]) -> List[int]:
    """Clear denominators and divide by integer content; sign of leading kept."""
    fracs = [Fraction(c) for c in strip(coeffs)]
    if not fracs:
        return []
    denom = 1
    for c in fracs:
        denom = denom * c.denominator // gcd(denom, c.denominator)
    ints = [int(c * denom) for c in fracs]
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    return [c // g for c in ints]


def _divmod_frac(num: Sequence[Fraction], den: Sequence[Fraction]):
    num = [Fraction(c) for c in strip(num)]
    den = [Fraction(c) for c in strip(den)]
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    rem = num[:]
    dlead = den[-1]
    while len(rem) >= len(den):
        shift = len(rem) - len(den)
        factor = rem[-1] / dlead
        quot[shift] = factor
        for i, dc in enumerate(den):
            rem[shift + i] -= factor * dc
        rem = strip(rem)
    return strip(quot), strip(rem)


def poly_gcd(f: Sequence, g: Sequence) -> List[int]:
    """Primitive gcd over Q, as an integer polynomial (monic up to content)."""
    a = [Fraction(c) for c in strip(f)]
    b = [Fraction(c) for c in strip(g)]
    while b:
        _, r = _divmod_frac(a, b)
        a, b = b, r
    if not a:
        return []
    return primitive(a)


def square_free(coeffs: Sequence[int]) -> List[int]:
    f = strip(coeffs)
    if len(f) <= 1:
        return [int(c) for c in f]
    g = poly_gcd(f, derivative(f))
    if degree(g) <= 0:
        return primitive(f)
    q, r = _divmod_frac([Fraction(c) for c in f], [Fraction(c) for c in g])
    assert not strip(r), "square-free division left a remainder"
    return primitive(q)


def sturm_chain(coeffs: Sequence[int]) -> List[List[Fraction]]:
    """Sturm chain of the square-free part, with Fraction coefficients."""
    f = [Fraction(c) for c in square_free(coeffs)]
    if len(f) <= 1:
        return [f] if f else []
    chain = [f, [Fraction(c) for c in derivative(f)]]
    while strip(chain[-1]) and degree(chain[-1]) > 0:
        _, r = _divmod_frac(chain[-2], chain[-1])
        if not strip(r):
            break
        chain.append([-c for c in r])
    return [strip(c) for c in chain if strip(c)]


def _variations(values: Sequence[Fraction]) -> int:
    signs = [1 if v > 0 else -1 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _variations_at(chain, x: Fraction) -> int:
    return _variations([eval_at(c, x) for c in chain])


def _variations_at_inf(chain, positive: bool) -> int:
    vals = []
    for c in chain:
        lead = c[-1]
        d = len(c) - 1
        vals.append(lead if (positive or d % 2 == 0) else -lead)
    return _variations(vals)


def root_bound(coeffs: Sequence[int]) -> Fraction:
    """Cauchy bound: all real roots lie in (-B, B)."""
    f = strip(coeffs)
    lead = abs(f[-1])
    m = max(abs(c) for c in f[:-1]) if len(f) > 1 else 0
    return 1 + Fraction(m, lead)


def count_roots(chain, a: Fraction, b: Fraction) -> int:
    """Distinct real roots in (a, b]; endpoints must not be roots of chain[0]."""
    return _variations_at(chain, a) - _variations_at(chain, b)


def isolate_real_roots(coeffs: Sequence[int],
                       lo: Optional[Fraction] = None,
                       hi: Optional[Fraction] = None) -> List[Interval]:
    """Disjoint isolating intervals for the distinct real roots in (lo, hi).

    Exact rational roots are returned as degenerate intervals (r, r).
    Open at both ends: roots exactly at lo or hi are excluded.
    """
    f = square_free(coeffs)
    if degree(f) <= 0:
        return []
    chain = sturm_chain(f)
    bound = root_bound(f)
    a = Fraction(lo) if lo is not None else -bound
    b = Fraction(hi) if hi is not None else bound

    def nonroot(x: Fraction) -> Fraction:
        # nudge off a root; roots are finitely many and simple
        step = Fraction(1, 2)
        while eval_at(f, x) == 0:
            x = x + step / 10 ** 6
            step /= 2
        return x

    exact: List[Interval] = []
    a0 = a
    b0 = b
    if eval_at(f, a0) == 0:
        a0 = nonroot(a0)
    if eval_at(f, b0) == 0:
        b0 = nonroot(b0 - Fraction(1, 10 ** 9))
    if a0 >= b0:
        return []

    out: List[Interval] = []
    stack = [(a0, b0, count_roots(chain, a0, b0))]
    while stack:
        x, y, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((x, y))
            continue
        m = (x + y) / 2
        if eval_at(f, m) == 0:
            exact.append((m, m))
            m_lo = nonroot(m - Fraction(1, 10 ** 9))
            m_hi = nonroot(m + Fraction(1, 10 ** 9))
            nl = count_roots(chain, x, m_lo)
            nr = count_roots(chain, m_hi, y)
            if nl:
                stack.append((x, m_lo, nl))
            if nr:
                stack.append((m_hi, y, nr))
        else:
            nl = count_roots(chain, x, m)
            stack.append((x, m, nl))
            stack.append((m, y, n - nl))
    roots = sorted(out + exact)
    # clip approximate intervals back inside the requested open range
    return [iv for iv in roots if iv[1] > a and iv[0] < b]


def refine_root(coeffs: Sequence[int], interval: Interval, dps: int) -> mp.mpf:
    """Refine an isolating interval to an mpf root at ~dps digits.

    Bisection narrows until Newton converges from the midpoint; Newton steps
    that leave the bracket fall back to bisection.
    """
    a, b = interval
    if a == b:
        with mp.workdps(dps + 10):
            return mp.mpf(a.numerator) / a.denominator
    f = square_free(coeffs)
    df = derivative(f)
    fa = eval_at(f, a)
    fb = eval_at(f, b)
    if fa == 0 or fb == 0:  # endpoints should be non-roots for a proper bracket
        raise ValueError("isolating interval endpoint is a root")
    assert (fa > 0) != (fb > 0), "interval does not bracket a sign change"
    # exact bisection down to a comfortable Newton basin
    for _ in range(64):
        m = (a + b) / 2
        fm = eval_at(f, m)
        if fm == 0:
            with mp.workdps(dps + 10):
                return mp.mpf(m.numerator) / m.denominator
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
        if b - a < Fraction(1, 10 ** 8):
            break
    with mp.workdps(dps + 10):
        lo = mp.mpf(a.numerator) / a.denominator
        hi = mp.mpf(b.numerator) / b.denominator
        x = (lo + hi) / 2
        target = mp.mpf(10) ** (-(dps + 2))
        for _ in range(200):
            fx = eval_at(f, x)
            dfx = eval_at(df, x)
            if dfx == 0:
                step = (hi - lo) / 2
            else:
                step = fx / dfx
            nxt = x - step
            if not (lo <= nxt <= hi):
                nxt = (lo + hi) / 2
            fn = eval_at(f, nxt)
            if mp.sign(fn) == mp.sign(eval_at(f, lo)):
                lo = nxt
            else:
                hi = nxt
            if abs(nxt - x) <= target * max(1, abs(nxt)):
                x = nxt
                break
            x = nxt
        return +x


def real_roots(coeffs: Sequence[int], dps: int,
               lo: Optional[Fraction] = None,
               hi: Optional[Fraction] = None) -> List[mp.mpf]:
    """Isolate then refine all distinct real roots in (lo, hi)."""
    return [refine_root(coeffs, iv, dps) for iv in isolate_real_roots(coeffs, lo, hi)]
