"""Slope certificates, interval reports, and family transfer.

A certificate freezes a solution (t, u) of the representation condition plus
the slope equation, as decimal strings precise enough to revalidate
independently: both residuals are re-evaluated at doubled precision before
emission and must meet the revalidation tolerance.  The tolerance policy is
two-tier and pinned to the working precision d:

    emission      10^(20 - d)          at d digits   (1e-30 at d = 50)
    revalidation  10^(40 - 2d)         at 2d digits  (1e-60 at d = 100)

Admissibility of (t, u) for conjugation into real matrices follows the
trichotomy: real t outside {0, +-1}; unit-circle t = e^{i*theta} with u > 0
or u < -4 sin^2(theta); or the special line t = -1.

Lifting to the universal cover is encoded as checkable hypothesis flags, not
a cohomology computation: the peripheral holonomy is hyperbolic
(|t + 1/t| > 2), the family is a continuous branch (residual and guard
evidence at sampled points), and some slope 1/n lies in the family's span.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath as mp

from . import continuation, laurent, riley
from .continuation import Branch, CurvePoint, slope_span
from .errors import EvenD, Inadmissible, OutOfRange, RecheckFailed, TorusKnot
from .knotspec import TwoBridgeKnot, WangFamilySpec, sign_data
from .laurent import Scalar, to_mpf
from .riley import RileySystem

KHOI_REAL_HYPERBOLIC = "real_hyperbolic"
KHOI_UNIT_CIRCLE_ELLIPTIC = "unit_circle_elliptic"
KHOI_T_MINUS_ONE = "t_minus_one"

IRREDUCIBILITY_NON_TORUS = "non_torus_two_bridge"
IRREDUCIBILITY_NA = "not_applicable"


def emission_tolerance(dps: int) -> mp.mpf:
    return mp.mpf(10) ** (20 - dps)


def revalidation_tolerance(dps: int) -> mp.mpf:
    return mp.mpf(10) ** (40 - 2 * dps)


def classify_khoi(t: Optional[Scalar] = None, u: Scalar = None,
                  theta: Optional[Scalar] = None) -> str:
    """Admissibility class of (t, u) (real mode) or (theta, u) (unit circle).

    Exactly one of ``t`` and ``theta`` must be given.  The boundary strip
    u in [-4 sin^2(theta), 0] on the unit circle is excluded (closed
    exclusion), as are t in {0, 1} on the real line.
    """
    if (t is None) == (theta is None):
        raise ValueError("give exactly one of t and theta")
    if u is None:
        raise ValueError("u is required")
    uu = to_mpf(u)
    if t is not None:
        tt = to_mpf(t)
        if tt == -1:
            return KHOI_T_MINUS_ONE
        if tt == 0 or tt == 1:
            raise Inadmissible(f"t = {mp.nstr(tt, 6)} admits no solutions")
        return KHOI_REAL_HYPERBOLIC
    th = to_mpf(theta)
    if not (0 < th < mp.pi):
        raise Inadmissible(f"theta must lie in (0, pi), got {mp.nstr(th, 8)}")
    boundary = -4 * mp.sin(th) ** 2
    if uu > 0 or uu < boundary:
        return KHOI_UNIT_CIRCLE_ELLIPTIC
    raise Inadmissible(
        f"u = {mp.nstr(uu, 8)} lies in the excluded strip "
        f"[{mp.nstr(boundary, 8)}, 0] at theta = {mp.nstr(th, 8)}")


@dataclass(frozen=True)
class LiftingFlags:
    """Hypotheses under which a certificate lifts to the universal cover."""

    peripheral_hyperbolic: bool
    family_contains_inverse_integer_slope: bool
    family_continuous: bool
    sampled_points: int = 0
    min_abs_guard: str = "0"

    @property
    def lifts_to_universal_cover(self) -> bool:
        return (self.peripheral_hyperbolic
                and self.family_contains_inverse_integer_slope
                and self.family_continuous)

    def to_json_dict(self) -> Dict:
        return {
            "peripheral_hyperbolic": self.peripheral_hyperbolic,
            "family_contains_inverse_integer_slope":
                self.family_contains_inverse_integer_slope,
            "family_continuous": self.family_continuous,
            "lifts_to_universal_cover": self.lifts_to_universal_cover,
            "evidence": {
                "sampled_points": self.sampled_points,
                "min_abs_guard": self.min_abs_guard,
                "claim": "hypotheses verified at sampled points with "
                         "implicit-function-theorem guard bounds",
            },
        }


def _span_contains_inverse_integer(lo: mp.mpf, hi: mp.mpf) -> bool:
    """Whether some 1/n (n a nonzero integer) lies in [lo, hi]."""
    if lo > hi:
        lo, hi = hi, lo
    if hi >= 1 >= lo or hi >= -1 >= lo:
        return True
    if hi > 0:
        n = int(mp.ceil(1 / hi)) if hi < 1 else 1
        if n != 0 and lo <= mp.mpf(1) / n <= hi:
            return True
    if lo < 0:
        n = int(mp.floor(1 / lo)) if lo > -1 else -1
        if n != 0 and lo <= mp.mpf(1) / n <= hi:
            return True
    return False


def lifting_flags(branch: Optional[Branch], t: Scalar) -> LiftingFlags:
    """Flags for a point, with family evidence drawn from its parent branch."""
    tt = to_mpf(t)
    peripheral = abs(tt + 1 / tt) > 2
    if branch is None:
        return LiftingFlags(peripheral_hyperbolic=bool(peripheral),
                            family_contains_inverse_integer_slope=False,
                            family_continuous=False)
    lo, hi, _ = slope_span(branch)
    return LiftingFlags(
        peripheral_hyperbolic=bool(peripheral),
        family_contains_inverse_integer_slope=_span_contains_inverse_integer(lo, hi),
        family_continuous=branch.is_continuous_family(),
        sampled_points=len(branch.points),
        min_abs_guard=mp.nstr(branch.min_abs_guard, 8),
    )


@dataclass(frozen=True)
class SlopeCertificate:
    """Self-contained evidence that one rational slope is realized."""

    knot: TwoBridgeKnot
    slope: Fraction
    t: str                  # decimal strings at revalidation precision
    u: str
    residual_P: str
    residual_slope: str
    khoi_class: str
    lifting: LiftingFlags
    precision_digits: int

    def to_json_dict(self) -> Dict:
        return {
            "knot": {"p": self.knot.p, "q": self.knot.q},
            "slope": {"num": self.slope.numerator, "den": self.slope.denominator},
            "point": {"t": self.t, "u": self.u},
            "residuals": {"P": self.residual_P, "slope": self.residual_slope},
            "khoi_class": self.khoi_class,
            "lifting": self.lifting.to_json_dict(),
            "meta": {
                "precision_digits": self.precision_digits,
                "revalidation_digits": 2 * self.precision_digits,
                "tolerances": {
                    "emission": mp.nstr(emission_tolerance(self.precision_digits), 3),
                    "revalidation": mp.nstr(
                        revalidation_tolerance(self.precision_digits), 3),
                },
            },
        }


def make_certificate(sys: RileySystem, point: CurvePoint, slope: Union[Fraction, int, str],
                     branch: Optional[Branch] = None,
                     precision_digits: int = 50) -> SlopeCertificate:
    """Emit a certificate for a solved point after re-checking at 2x precision.

    The point is taken verbatim (no re-solving): both residuals are
    re-evaluated at doubled precision and must meet the revalidation
    tolerance, so a stale or perturbed point fails instead of being healed.
    """
    slope = Fraction(slope)
    rev_tol = revalidation_tolerance(precision_digits)
    rev_dps = 2 * precision_digits
    if point.slope is not None:
        drift = abs(point.slope - (mp.mpf(slope.numerator) / slope.denominator))
        if drift > mp.mpf(10) ** (-precision_digits // 4):
            raise RecheckFailed(
                f"point carries slope {mp.nstr(point.slope, 12)}, not {slope}")
    work = laurent.eval_dps(sys.P, point.t, point.u, rev_dps)
    with mp.workdps(work):
        res_p = abs(laurent.eval_real(sys.P, point.t, point.u, dps=mp.mp.dps))
        res_s = abs(riley.slope_residual(sys, point.t, point.u, slope, dps=mp.mp.dps))
        if res_p > rev_tol or res_s > rev_tol:
            raise RecheckFailed(
                f"residuals ({mp.nstr(res_p, 5)}, {mp.nstr(res_s, 5)}) exceed "
                f"revalidation tolerance {mp.nstr(rev_tol, 5)} at doubled precision")
        khoi = classify_khoi(t=point.t, u=point.u)
        return SlopeCertificate(
            knot=sys.knot,
            slope=slope,
            t=mp.nstr(point.t, rev_dps),
            u=mp.nstr(point.u, rev_dps),
            residual_P=mp.nstr(res_p, 8),
            residual_slope=mp.nstr(res_s, 8),
            khoi_class=khoi,
            lifting=lifting_flags(branch, point.t),
            precision_digits=precision_digits,
        )


def revalidate(cert: SlopeCertificate) -> bool:
    """Re-check a certificate from its stored decimal strings alone."""
    sys = riley.riley_system(cert.knot)
    rev_tol = revalidation_tolerance(cert.precision_digits)
    rev_dps = 2 * cert.precision_digits
    with mp.workdps(rev_dps + 10):
        t = mp.mpf(cert.t)
        u = mp.mpf(cert.u)
    work = laurent.eval_dps(sys.P, t, u, rev_dps)
    with mp.workdps(work):
        res_p = abs(laurent.eval_real(sys.P, t, u, dps=mp.mp.dps))
        res_s = abs(riley.slope_residual(sys, t, u, cert.slope, dps=mp.mp.dps))
        if res_p > rev_tol or res_s > rev_tol:
            raise RecheckFailed(
                f"stored point fails revalidation: residuals "
                f"({mp.nstr(res_p, 5)}, {mp.nstr(res_s, 5)}) vs {mp.nstr(rev_tol, 5)}")
    return True


# -- rational peripheral matrices -------------------------------------------------

def _mat_mul(a, b):
    return [[a[0][0] * b[0][0] + a[0][1] * b[1][0],
             a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0],
             a[1][0] * b[0][1] + a[1][1] * b[1][1]]]


def _mat_pow(m, n: int):
    if n < 0:
        # unit determinant: inverse is the adjugate
        m = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
        n = -n
    out = [[mp.mpf(1), mp.mpf(0)], [mp.mpf(0), mp.mpf(1)]]
    base = [row[:] for row in m]
    while n:
        if n & 1:
            out = _mat_mul(out, base)
        base = _mat_mul(base, base)
        n >>= 1
    return out


def _mat_norm(m) -> mp.mpf:
    return max(abs(m[i][j]) for i in range(2) for j in range(2))


def _mat_sub(a, b):
    return [[a[i][j] - b[i][j] for j in range(2)] for i in range(2)]


def peripheral_root_matrix(t: mp.mpf, alpha: int, beta: int):
    """The fractional meridian power: diagonal t^{a/b} with the geometric-sum
    upper-right entry (t^{a/b} - t^{-a/b})/(t - 1/t).

    For beta = 1 this is the integer matrix power itself (exactly, not just
    up to rounding).
    """
    if beta == 1:
        return _mat_pow([[t, mp.mpf(1)], [mp.mpf(0), 1 / t]], alpha)
    e = mp.mpf(alpha) / beta
    te = t ** e
    return [[te, (te - 1 / te) / (t - 1 / t)], [mp.mpf(0), 1 / te]]


def rational_peripheral_check(t: Scalar, alpha: int, beta: int,
                              dps: int = 50) -> mp.mpf:
    """Max-entry residual of C_{alpha/beta}^beta = C^alpha at real t > 1."""
    if beta <= 0:
        raise ValueError("beta must be a positive integer")
    if gcd(abs(alpha), beta) != 1:
        raise ValueError("alpha/beta must be in lowest terms")
    with mp.workdps(dps + 10):
        tt = to_mpf(t)
        m = _mat_pow(peripheral_root_matrix(tt, alpha, beta), beta)
        c = [[tt, mp.mpf(1)], [mp.mpf(0), 1 / tt]]
        return _mat_norm(_mat_sub(m, _mat_pow(c, alpha)))


def _word_value(knot: TwoBridgeKnot, t: mp.mpf, u: mp.mpf, starred: bool):
    """Numeric value of the matrix word W (or W*) at (t, u)."""
    c = [[t, mp.mpf(1)], [mp.mpf(0), 1 / t]]
    c_inv = [[1 / t, mp.mpf(-1)], [mp.mpf(0), t]]
    d = [[t, mp.mpf(0)], [-u, 1 / t]]
    d_inv = [[1 / t, mp.mpf(0)], [u, t]]
    pairs = ((d, d_inv), (c, c_inv)) if starred else ((c, c_inv), (d, d_inv))
    out = [[mp.mpf(1), mp.mpf(0)], [mp.mpf(0), mp.mpf(1)]]
    for idx, e in enumerate(sign_data(knot).signs):
        pos, inv = pairs[idx % 2]
        out = _mat_mul(out, pos if e == 1 else inv)
    return out


def longitude_commutator_residual(sys: RileySystem, t: Scalar, u: Scalar,
                                  alpha: int, beta: int,
                                  dps: int = 50) -> mp.mpf:
    """||[C_{alpha/beta}, W* W]|| at (t, u); vanishes on {P = 0}."""
    with mp.workdps(dps + 10):
        tt, uu = to_mpf(t), to_mpf(u)
        longitude_core = _mat_mul(_word_value(sys.knot, tt, uu, starred=True),
                                  _word_value(sys.knot, tt, uu, starred=False))
        k = peripheral_root_matrix(tt, alpha, beta)
        return _mat_norm(_mat_sub(_mat_mul(k, longitude_core),
                                  _mat_mul(longitude_core, k)))


# -- interval reports --------------------------------------------------------------

@dataclass(frozen=True)
class ClaimedInterval:
    """Reported slope interval with openness and asymptotic-end flags."""

    lo: str
    hi: str
    lo_open: bool
    hi_open: bool
    lo_asymptotic: bool
    hi_asymptotic: bool

    def to_json_dict(self) -> Dict:
        return {"lo": self.lo, "hi": self.hi,
                "lo_open": self.lo_open, "hi_open": self.hi_open,
                "lo_asymptotic": self.lo_asymptotic,
                "hi_asymptotic": self.hi_asymptotic}


@dataclass(frozen=True)
class IntervalReport:
    """Certificates for sampled slopes plus the claimed interval evidence."""

    knot: TwoBridgeKnot
    certified_slopes: Tuple[SlopeCertificate, ...]
    claimed_interval: ClaimedInterval
    observed_span: Tuple[str, str]
    irreducibility_basis: str
    zero_slope_note: bool

    def to_json_dict(self) -> Dict:
        certs = [c.to_json_dict() for c in self.certified_slopes]
        slopes = [c.slope for c in self.certified_slopes]
        extremes = {}
        if slopes:
            extremes = {"min_certified": str(min(slopes)),
                        "max_certified": str(max(slopes))}
        return {
            "knot": {"p": self.knot.p, "q": self.knot.q},
            "certificates": certs,
            "claimed_interval": self.claimed_interval.to_json_dict(),
            "observed_span": {"lo": self.observed_span[0],
                              "hi": self.observed_span[1]},
            "certified_extremes": extremes,
            "irreducibility_basis": self.irreducibility_basis,
            "zero_slope_note": self.zero_slope_note,
        }


_ROUNDING_WINDOW = mp.mpf("0.01")


def _claim_endpoint(value: mp.mpf, asymptotic: bool) -> Tuple[str, bool]:
    """(printed endpoint, open flag).

    Asymptotic ends are open; when the observed extreme sits within the
    rounding window of an integer, the integer limit is reported (the
    extreme itself stays available in observed_span).  Attained ends are
    closed and printed as observed.
    """
    if asymptotic:
        nearest = mp.nint(value)
        if abs(value - nearest) < _ROUNDING_WINDOW:
            return str(int(nearest)), True
        return mp.nstr(value, 12), True
    return mp.nstr(value, 12), False


def interval_report(sys: RileySystem, branches: Sequence[Branch],
                    sample_slopes: Sequence[Union[Fraction, int, str]],
                    precision_digits: int = 50) -> IntervalReport:
    """Certify each sampled slope and assemble the interval evidence.

    Slope 0 is handled by the homology note (first homology of the 0-surgery
    is infinite cyclic), not by a representation certificate.  Torus knots
    are refused: this pipeline only ever speaks about non-torus knots.
    """
    if sys.knot.is_torus:
        raise TorusKnot(
            f"{sys.knot} is a torus knot; the representation pipeline does not apply")
    if not branches:
        raise ValueError("at least one traced branch is required")

    spans = []
    for br in branches:
        lo, hi, _ = slope_span(br)
        slopes = [p.slope for p in br.points if p.slope is not None]
        last = slopes[-1]
        lo_asym = br.stopped_at_budget and last == lo
        hi_asym = br.stopped_at_budget and last == hi
        spans.append((lo, hi, lo_asym, hi_asym, br))

    overall_lo = min(s[0] for s in spans)
    overall_hi = max(s[1] for s in spans)
    lo_asym = any(s[2] for s in spans if s[0] == overall_lo)
    hi_asym = any(s[3] for s in spans if s[1] == overall_hi)

    zero_note = False
    certs: List[SlopeCertificate] = []
    for raw in sample_slopes:
        r = Fraction(raw)
        if r == 0:
            zero_note = True
            continue
        r_m = mp.mpf(r.numerator) / r.denominator
        done = False
        last_error: Optional[Exception] = None
        for lo, hi, _, _, br in spans:
            if lo <= r_m <= hi:
                try:
                    point = continuation.solve_slope(br, sys, r)
                except OutOfRange as exc:
                    last_error = exc
                    continue
                certs.append(make_certificate(sys, point, r, branch=br,
                                              precision_digits=precision_digits))
                done = True
                break
        if not done:
            raise last_error or OutOfRange(
                f"slope {r} is outside every traced branch span "
                f"[{mp.nstr(overall_lo, 12)}, {mp.nstr(overall_hi, 12)}]")

    lo_str, lo_open = _claim_endpoint(overall_lo, lo_asym)
    hi_str, hi_open = _claim_endpoint(overall_hi, hi_asym)
    claimed = ClaimedInterval(lo=lo_str, hi=hi_str, lo_open=lo_open,
                              hi_open=hi_open, lo_asymptotic=lo_asym,
                              hi_asymptotic=hi_asym)
    return IntervalReport(
        knot=sys.knot,
        certified_slopes=tuple(certs),
        claimed_interval=claimed,
        observed_span=(mp.nstr(overall_lo, 20), mp.nstr(overall_hi, 20)),
        irreducibility_basis=IRREDUCIBILITY_NON_TORUS,
        zero_slope_note=zero_note,
    )


# -- family transfer ----------------------------------------------------------------

@dataclass(frozen=True)
class TransferCertificate:
    """Interval transfer along a peripheral homomorphism scaling the longitude by d."""

    family: Optional[WangFamilySpec]
    d: int
    source_interval: Tuple[Fraction, Fraction]
    transferred_interval: Tuple[Fraction, Fraction]

    @property
    def slope_map(self) -> str:
        return f"p/q -> p/({self.d}*q)"

    def to_json_dict(self) -> Dict:
        fam = None
        if self.family is not None:
            fam = {"base": list(self.family.base.entries),
                   "c": list(self.family.c),
                   "eps": list(self.family.eps)}
        return {
            "family": fam,
            "d": self.d,
            "source": {"lo": str(self.source_interval[0]),
                       "hi": str(self.source_interval[1])},
            "transferred": {"lo": str(self.transferred_interval[0]),
                            "hi": str(self.transferred_interval[1])},
            "slope_map": self.slope_map,
        }


def transfer_interval(family: Optional[WangFamilySpec] = None,
                      source: Tuple[Union[Fraction, int, str],
                                    Union[Fraction, int, str]] = (-4, 8),
                      d: Optional[int] = None) -> TransferCertificate:
    """Transfer a certified slope interval through the longitude scaling d.

    d > 0 maps (lo, hi) to (lo*d, hi*d); d < 0 reverses the endpoints.
    d is derived from the family spec unless given explicitly; it must be
    odd and nonzero (EvenD otherwise).  Exact rational arithmetic.
    """
    if d is None:
        if family is None:
            raise ValueError("give a family spec or an explicit d")
        d = family.d
    d = int(d)
    if d == 0 or d % 2 == 0:
        raise EvenD(f"longitude scaling must be odd and nonzero, got d = {d}")
    lo, hi = Fraction(source[0]), Fraction(source[1])
    if not lo < hi:
        raise ValueError("source interval must satisfy lo < hi")
    if d > 0:
        transferred = (lo * d, hi * d)
    else:
        transferred = (hi * d, lo * d)
    return TransferCertificate(family=family, d=d, source_interval=(lo, hi),
                               transferred_interval=transferred)


def report_to_json(obj, indent: int = 2) -> str:
    """Deterministic JSON for any of the certificate dataclasses."""
    return json.dumps(obj.to_json_dict(), sort_keys=True, indent=indent) + "\n"
