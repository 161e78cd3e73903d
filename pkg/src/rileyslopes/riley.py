"""The Riley polynomial and the surgery-slope equations.

For a 2-bridge knot with word entries (a, b, c, d):

    P(t, u)  =  A(t, u) - (t - 1/t) * B(t, u)

P = 0 is the representation condition.  A surgery with coefficient r is
realized at a point of {P = 0} when additionally

    t^{r - 2*sigma} * ((t - 1/t)^2 - u) * B(t, u)^2  =  1,

handled here in log form to avoid overflow of the power:

    slope_residual(t, u, r) = (r - 2*sigma)*ln t + ln(((t - 1/t)^2 - u) * B^2)

which vanishes iff the slope equation holds, making

    slope_of_point(t, u) = 2*sigma - ln(((t - 1/t)^2 - u) * B^2) / ln t

the unique real surgery coefficient carried by a curve point.

The special line t = -1 supports solutions only for slope offsets
N = r - 2*sigma with odd numerator and denominator, where the system reduces
to two univariate equations in u, solved by exact root isolation.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import mpmath as mp

from . import laurent, realroots
from .errors import (EvenSlopeComponent, Inadmissible, NonPositiveArgument,
                     ZeroB)
from .knotspec import TwoBridgeKnot, sign_data
from .laurent import BivarPoly, UPoly, Scalar, to_mpf


def _t_minus_tinv() -> BivarPoly:
    return BivarPoly.t_power(1) - BivarPoly.t_power(-1)


def t_minus_tinv_squared() -> BivarPoly:
    """(t - 1/t)^2 = t^2 - 2 + t^-2, the locus where P is identically 1."""
    return BivarPoly({(2, 0): 1, (0, 0): -2, (-2, 0): 1})


@dataclass(frozen=True)
class RileySystem:
    """Per-knot bundle: word entries A, B, Dd, the polynomial P, and sigma."""

    knot: TwoBridgeKnot
    A: BivarPoly
    B: BivarPoly
    Dd: BivarPoly
    P: BivarPoly
    sigma: int


@dataclass(frozen=True)
class MinusOneSystem:
    """Exact t = -1 specializations of the word entries."""

    A_neg1: UPoly
    B_neg1: UPoly
    D_neg1: UPoly


@dataclass(frozen=True)
class MinusOneReport:
    """Common-real-root report for {A(-1,u) = 0, -N*u*B(-1,u) - 2*D(-1,u) = 0}."""

    system: MinusOneSystem
    N: Fraction
    second_equation: UPoly
    common_roots: Tuple[mp.mpf, ...]
    roots_first: int
    roots_second: int

    @property
    def has_solution(self) -> bool:
        return bool(self.common_roots)


_system_cache: Dict[Tuple[int, int], RileySystem] = {}
_system_lock = threading.Lock()


def riley_system(knot: TwoBridgeKnot) -> RileySystem:
    """Build (and cache) the exact Riley system for a knot."""
    key = (knot.p, knot.q)
    hit = _system_cache.get(key)
    if hit is not None:
        return hit
    w = laurent.entries(knot)
    p = w.A - _t_minus_tinv() * w.B
    sys = RileySystem(knot=knot, A=w.A, B=w.B, Dd=w.Dd, P=p,
                      sigma=sign_data(knot).sigma)
    with _system_lock:
        _system_cache.setdefault(key, sys)
    return _system_cache[key]


def _check_real_t(t: mp.mpf) -> None:
    if t <= 0:
        raise Inadmissible(f"slope equation requires t > 0, got {mp.nstr(t, 10)}")
    if t == 1:
        raise Inadmissible("slope equation is degenerate at t = 1 (no solutions there)")


def _log_argument(sys: RileySystem, t: mp.mpf, u: mp.mpf, base_dps: int) -> mp.mpf:
    """((t - 1/t)^2 - u) * B(t, u)^2, validated meaningfully positive.

    The factor (t - 1/t)^2 - u must exceed rounding noise at the caller's
    requested precision, so a u placed on the square locus to that precision
    is rejected rather than slipping through on the sign of the last bit.
    """
    b = laurent.eval_real(sys.B, t, u, dps=mp.mp.dps)
    if b == 0:
        raise ZeroB("B(t, u) = 0: slope equation degenerates (impossible on P = 0)")
    y = (t - 1 / t) ** 2
    diff = y - u
    if diff <= abs(y) * mp.mpf(10) ** (5 - base_dps):
        raise NonPositiveArgument(
            "((t - 1/t)^2 - u) * B^2 <= 0: no real slope exists at this point")
    return diff * b * b


def slope_residual(sys: RileySystem, t: Scalar, u: Scalar,
                   r: Union[Fraction, Scalar], dps: Optional[int] = None) -> mp.mpf:
    """(r - 2*sigma)*ln t + ln(((t - 1/t)^2 - u) * B^2); zero iff r is realized.

    Works at the requested precision raised by B's monomial magnitude:
    far along a branch the monomials of B dwarf its value (catastrophic
    cancellation), so the bump keeps the requested digits meaningful.
    """
    base = dps if dps is not None else max(mp.mp.dps, laurent.DEFAULT_DPS)
    with mp.workdps(laurent.eval_dps(sys.B, t, u, base)):
        tt, uu = to_mpf(t), to_mpf(u)
        _check_real_t(tt)
        n = to_mpf(r) - 2 * sys.sigma
        return n * mp.log(tt) + mp.log(_log_argument(sys, tt, uu, base))


def slope_of_point(sys: RileySystem, t: Scalar, u: Scalar,
                   dps: Optional[int] = None) -> mp.mpf:
    """The surgery coefficient carried by a point of {P = 0}.

    The caller certifies P(t, u) ~ 0; this just solves the slope equation
    for r, which is a closed form in log domain (precision handling as in
    slope_residual).
    """
    base = dps if dps is not None else max(mp.mp.dps, laurent.DEFAULT_DPS)
    with mp.workdps(laurent.eval_dps(sys.B, t, u, base)):
        tt, uu = to_mpf(t), to_mpf(u)
        _check_real_t(tt)
        return 2 * sys.sigma - mp.log(_log_argument(sys, tt, uu, base)) / mp.log(tt)


def minus_one_system(sys: RileySystem, n_offset: Fraction) -> MinusOneReport:
    """Solve the t = -1 system for slope offset N = r - 2*sigma (odd/odd).

    Returns the exact specializations plus the common real roots of

        A(-1, u) = 0    and    -N*u*B(-1, u) - 2*D(-1, u) = 0,

    located by gcd over Q[u] followed by integer Sturm isolation.
    """
    n_offset = Fraction(n_offset)
    if n_offset.numerator % 2 == 0 or n_offset.denominator % 2 == 0:
        raise EvenSlopeComponent(
            f"t = -1 solutions need odd numerator and denominator, got N = {n_offset}")
    mo = MinusOneSystem(A_neg1=sys.A.at_t_minus_one(),
                        B_neg1=sys.B.at_t_minus_one(),
                        D_neg1=sys.Dd.at_t_minus_one())
    # -N*u*B - 2*D = 0, cleared of the denominator of N
    alpha, beta = n_offset.numerator, n_offset.denominator
    second = (-alpha) * mo.B_neg1.times_u(1) + (-2 * beta) * mo.D_neg1
    f1 = mo.A_neg1.to_list()
    f2 = second.to_list()
    dps = max(mp.mp.dps, laurent.DEFAULT_DPS)
    roots1 = realroots.isolate_real_roots(f1) if realroots.degree(f1) > 0 else []
    roots2 = realroots.isolate_real_roots(f2) if realroots.degree(f2) > 0 else []
    g = realroots.poly_gcd(f1, f2) if (realroots.strip(f1) and realroots.strip(f2)) else []
    common: List[mp.mpf] = []
    if realroots.degree(g) > 0:
        common = realroots.real_roots(g, dps)
    return MinusOneReport(system=mo, N=n_offset, second_equation=second,
                          common_roots=tuple(common),
                          roots_first=len(roots1), roots_second=len(roots2))


def elliptic_polynomial(sys: RileySystem, theta: Scalar,
                        dps: Optional[int] = None):
    """Coefficients of u -> P(e^{i*theta}, u) as reals, plus the imaginary residual.

    The t <-> 1/t symmetry of P makes the coefficients real up to rounding;
    the maximum absolute imaginary part observed is returned alongside so a
    violation would be visible rather than silently dropped.
    """
    work = dps if dps is not None else max(mp.mp.dps, laurent.DEFAULT_DPS)
    with mp.workdps(work):
        th = to_mpf(theta)
        t = mp.mpc(mp.cos(th), mp.sin(th))
        by_deg = sys.P.u_coefficients()
        top = max(by_deg) if by_deg else 0
        coeffs: List[mp.mpf] = []
        worst = mp.mpf(0)
        for j in range(top + 1):
            cj = by_deg.get(j)
            if cj is None:
                coeffs.append(mp.mpf(0))
                continue
            acc = mp.mpc(0)
            for (i, _), v in cj.terms.items():
                acc += v * t ** i
            coeffs.append(acc.real)
            worst = max(worst, abs(acc.imag))
        return coeffs, worst


def khoi_elliptic_boundary(theta: Scalar) -> mp.mpf:
    """-4*sin^2(theta): admissible unit-circle u lies below this or above 0."""
    th = to_mpf(theta)
    return -4 * mp.sin(th) ** 2


def verify_exact_identities(knot: TwoBridgeKnot) -> Dict[str, bool]:
    """The exact per-knot identity suite; every value must be True.

    Checks: sign palindrome e_i = e_{p-i}; c = -u*b; det W = 1;
    P(t, (t-1/t)^2) = 1; and the symmetry P(t, u) = P(1/t, u).
    """
    sd = sign_data(knot)
    palindrome = all(sd.signs[i] == sd.signs[knot.p - 2 - i]
                     for i in range(len(sd.signs)))
    w = laurent.entries(knot)
    c_is_minus_ub = (w.Cc + BivarPoly.u_power(1) * w.B).is_zero
    det_one = (w.A * w.Dd - w.B * w.Cc) == BivarPoly.one()
    sys = riley_system(knot)
    on_locus = sys.P.subs_u(t_minus_tinv_squared()) == BivarPoly.one()
    symmetric = (sys.P - sys.P.subs_t_inverse()).is_zero
    return {
        "sign_palindrome": palindrome,
        "c_equals_minus_ub": c_is_minus_ub,
        "det_is_one": det_one,
        "unit_on_square_locus": on_locus,
        "t_inverse_symmetric": symmetric,
    }
