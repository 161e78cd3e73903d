"""Branch tracing on {P(t, u) = 0} and slope targeting.

A branch is traced by a tangent (Euler) predictor plus a one-dimensional
Newton corrector in the dependent variable, guarded by the implicit function
theorem: the partial derivative of P with respect to the dependent variable
(the "guard") must stay away from zero, and every accepted point must meet an
absolute residual tolerance.  Guard degeneration, band exit, parameter
bounds, and step budgets halt the trace; they are recorded on the branch
rather than guessed through, since a vanishing guard may signal a fold onto a
different parameterization.

Working precision is raised automatically with the monomial magnitude at the
current point so the absolute tolerances stay meaningful far along a branch.

Slope targeting (:func:`solve_slope`) brackets the requested value between
traced points, bisects on the branch parameter, and finally polishes the pair
system (P = 0, slope residual = 0) with a 2x2 Newton iteration at doubled
precision, so returned points revalidate at certificate tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import mpmath as mp

from . import laurent, realroots, riley
from .errors import (CorrectorDiverged, GuardDegenerate, NoRealSeed,
                     OutOfRange, RecheckFailed)
from .laurent import BivarPoly, Scalar, to_mpf
from .riley import RileySystem

BY_T = "by_t"
BY_U = "by_u"


@dataclass(frozen=True)
class CurvePoint:
    """A certified point of {P = 0} with its local data."""

    t: mp.mpf
    u: mp.mpf
    residual: mp.mpf
    dPdt: mp.mpf
    dPdu: mp.mpf
    slope: Optional[mp.mpf] = None


@dataclass(frozen=True)
class Band:
    """Containment bounds for the dependent variable, as a function of the parameter."""

    name: str
    bounds: Callable[[mp.mpf], Tuple[mp.mpf, mp.mpf]]
    closed_lo: bool = False
    closed_hi: bool = False

    def contains(self, param: mp.mpf, dep: mp.mpf) -> bool:
        lo, hi = self.bounds(param)
        ok_lo = dep >= lo if self.closed_lo else dep > lo
        ok_hi = dep <= hi if self.closed_hi else dep < hi
        return ok_lo and ok_hi


def negative_branch_band() -> Band:
    """-t^-4 < u <= 0, the strip housing the negative-slope branch (by t)."""
    return Band(name="negative_u_strip",
                bounds=lambda t: (-t ** -4, mp.mpf(0)),
                closed_hi=True)


def positive_branch_band() -> Band:
    """(sqrt(u)+sqrt(u+4))/2 < t < (sqrt(u+1)+sqrt(u+5))/2 (by u).

    Equivalently 0 < (t - 1/t)^2 - u < 1: the window between the locus where
    P is identically 1 and its unit offset.
    """
    def bounds(u: mp.mpf) -> Tuple[mp.mpf, mp.mpf]:
        return ((mp.sqrt(u) + mp.sqrt(u + 4)) / 2,
                (mp.sqrt(u + 1) + mp.sqrt(u + 5)) / 2)

    return Band(name="unit_offset_window", bounds=bounds)


@dataclass(frozen=True)
class TraceConfig:
    """Tracer knobs; tolerances are absolute and pinned at construction."""

    step: str = "0.05"            # initial parameter step (decimal string)
    tol_residual: str = "1e-30"
    tol_newton: str = "1e-35"     # extra decrease demanded before acceptance
    max_steps: int = 2000
    dps: int = 50
    shrink: float = 0.5           # step adaptation factor in (0, 1)
    grow: float = 1.6
    step_max: str = "1e5"
    min_step_factor: str = "1e-14"  # give up below step * this
    guard_floor: str = "1e-12"
    newton_max_iter: int = 40
    param_limit: Optional[str] = None   # stop once the parameter passes this
    dep_limit: str = "1e9"              # stop once |dependent| exceeds this
    band: Optional[Band] = None

    def __post_init__(self):
        if not (0 < self.shrink < 1):
            raise ValueError("step adaptation factor must lie in (0, 1)")
        for name in ("step", "tol_residual", "tol_newton", "step_max",
                     "min_step_factor", "guard_floor", "dep_limit"):
            if mp.mpf(getattr(self, name)) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Branch:
    """An ordered, certified trace of one analytic branch."""

    points: Tuple[CurvePoint, ...]
    parameterization: str   # BY_T or BY_U
    direction: int
    seed: CurvePoint
    band: Optional[Band]
    min_abs_guard: mp.mpf
    guard_sign: int
    stop_reason: str
    tol_residual: mp.mpf
    dps: int

    def params(self) -> List[mp.mpf]:
        return [p.t if self.parameterization == BY_T else p.u for p in self.points]

    def guard_of(self, point: CurvePoint) -> mp.mpf:
        return point.dPdu if self.parameterization == BY_T else point.dPdt

    @property
    def stopped_at_budget(self) -> bool:
        """True when the trace ended by budget, not by geometry: the extreme
        slope is then an asymptotic estimate, not a boundary of the branch."""
        return self.stop_reason in ("max_steps", "param_limit", "dependent_limit")

    def is_continuous_family(self) -> bool:
        """Evidence for a continuous one-parameter family: at least two
        points, all residuals within tolerance, guard bounded away from 0."""
        return (len(self.points) >= 2
                and self.min_abs_guard > 0
                and all(p.residual <= self.tol_residual for p in self.points))


def _point_at(sys: RileySystem, pt_pu_pt, t: mp.mpf, u: mp.mpf,
              with_slope: bool = True) -> CurvePoint:
    p_t, p_u = pt_pu_pt
    res = laurent.eval_real(sys.P, t, u, dps=mp.mp.dps)
    dpdt = laurent.eval_real(p_t, t, u, dps=mp.mp.dps)
    dpdu = laurent.eval_real(p_u, t, u, dps=mp.mp.dps)
    slope = None
    if with_slope:
        try:
            slope = riley.slope_of_point(sys, t, u, dps=mp.mp.dps)
        except Exception:
            slope = None
    return CurvePoint(t=t, u=u, residual=abs(res), dPdt=dpdt, dPdu=dpdu, slope=slope)


def seed_psi(sys: RileySystem, dps: int = 50) -> CurvePoint:
    """Seed on the axis u = 0: the largest real root t > 1 of P(t, 0).

    Exact Sturm isolation locates the root; bisection plus Newton refine it
    to the working precision.  Raises NoRealSeed when P(t, 0) has no real
    root beyond t = 1.
    """
    p0 = sys.P.subs_u(BivarPoly.zero())
    span = p0.t_span()
    if span is None:
        raise NoRealSeed("P(t, 0) is identically zero")
    shift = -span[0]
    coeffs = [0] * (span[1] - span[0] + 1)
    for (i, _), v in p0.terms.items():
        coeffs[i + shift] = v
    intervals = realroots.isolate_real_roots(coeffs, lo=Fraction(1))
    if not intervals:
        raise NoRealSeed(f"P(t, 0) has no real root with t > 1 for {sys.knot}")
    t0 = realroots.refine_root(coeffs, intervals[-1], dps)
    with mp.workdps(laurent.eval_dps(sys.P, t0, 0, dps)):
        return _point_at(sys, (sys.P.partial_t(), sys.P.partial_u()),
                         +t0, mp.mpf(0))


def seed_candidates(sys: RileySystem, dps: int = 50,
                    rect: Optional[Tuple[float, float, float, float]] = None,
                    grid: int = 24) -> List[CurvePoint]:
    """Seed points from the three discovery strategies.

    1. real roots t > 1 of P(t, 0);
    2. real roots t > 1 of P(t, (t - 1/t)^2 - 1);
    3. optionally, a coarse sign-change scan of P over a (t_lo, t_hi,
       u_lo, u_hi) rectangle with bisection in u at each sign change.
    """
    pts: List[CurvePoint] = []
    partials = (sys.P.partial_t(), sys.P.partial_u())

    def roots_of(poly: BivarPoly) -> List[mp.mpf]:
        span = poly.t_span()
        if span is None:
            return []
        coeffs = [0] * (span[1] - span[0] + 1)
        for (i, _), v in poly.terms.items():
            coeffs[i - span[0]] = v
        out = []
        for iv in realroots.isolate_real_roots(coeffs, lo=Fraction(1)):
            out.append(realroots.refine_root(coeffs, iv, dps))
        return out

    for t0 in roots_of(sys.P.subs_u(BivarPoly.zero())):
        with mp.workdps(laurent.eval_dps(sys.P, t0, 0, dps)):
            pts.append(_point_at(sys, partials, +t0, mp.mpf(0)))
    offset = riley.t_minus_tinv_squared() - BivarPoly.one()
    for t0 in roots_of(sys.P.subs_u(offset)):
        with mp.workdps(laurent.eval_dps(sys.P, t0, 2, dps)):
            tt = +t0
            u0 = (tt - 1 / tt) ** 2 - 1
            pts.append(_point_at(sys, partials, tt, u0))
    if rect is not None:
        t_lo, t_hi, u_lo, u_hi = (mp.mpf(str(x)) for x in rect)
        with mp.workdps(dps + 10):
            for i in range(grid + 1):
                tt = t_lo + (t_hi - t_lo) * i / grid
                if tt <= 0 or tt == 1:
                    continue
                prev_u = None
                prev_v = None
                for j in range(grid + 1):
                    uu = u_lo + (u_hi - u_lo) * j / grid
                    v = laurent.eval_real(sys.P, tt, uu, dps=mp.mp.dps)
                    if prev_v is not None and v * prev_v < 0:
                        a, b, fa = prev_u, uu, prev_v
                        for _ in range(dps * 4):
                            m = (a + b) / 2
                            fm = laurent.eval_real(sys.P, tt, m, dps=mp.mp.dps)
                            if fm == 0 or (fm > 0) == (fa > 0):
                                a, fa = m, fm
                            else:
                                b = m
                        pts.append(_point_at(sys, partials, tt, (a + b) / 2))
                    prev_u, prev_v = uu, v
    # dedupe nearby seeds
    unique: List[CurvePoint] = []
    for p in pts:
        if all(abs(p.t - q.t) + abs(p.u - q.u) > mp.mpf("1e-20") for q in unique):
            unique.append(p)
    return unique


def _work_dps(cfg: TraceConfig, sys: RileySystem, t, u) -> int:
    return laurent.eval_dps(sys.P, t, u, cfg.dps)


def trace_branch(sys: RileySystem, seed: CurvePoint, cfg: TraceConfig,
                 direction: int = 1,
                 parameterization: str = BY_T) -> Branch:
    """Predictor-corrector trace from a certified seed.

    Raises GuardDegenerate when the guard is below the floor at the seed
    itself and CorrectorDiverged when Newton fails at the minimum step.
    Mid-trace guard degeneration, band exit, parameter bounds, and budgets
    halt the trace with the reason recorded on the Branch.
    """
    if parameterization not in (BY_T, BY_U):
        raise ValueError(f"unknown parameterization {parameterization!r}")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    by_t = parameterization == BY_T
    p_t, p_u = sys.P.partial_t(), sys.P.partial_u()

    # outer context: parameter arithmetic at (at least) the working precision;
    # evaluation and correction re-raise it per point as magnitudes grow
    with mp.workdps(cfg.dps + 10):
        tol = mp.mpf(cfg.tol_residual)
        tol_newton = mp.mpf(cfg.tol_newton)
        guard_floor = mp.mpf(cfg.guard_floor)
        band = cfg.band
        param_limit = mp.mpf(cfg.param_limit) if cfg.param_limit is not None else None
        dep_limit = mp.mpf(cfg.dep_limit)

        with mp.workdps(_work_dps(cfg, sys, seed.t, seed.u)):
            res0 = abs(laurent.eval_real(sys.P, seed.t, seed.u, dps=mp.mp.dps))
            if res0 > tol:
                raise ValueError(
                    f"seed residual {mp.nstr(res0, 5)} exceeds tolerance "
                    f"{mp.nstr(tol, 5)}")
            seed = _point_at(sys, (p_t, p_u), seed.t, seed.u)
            g0 = seed.dPdu if by_t else seed.dPdt
            if abs(g0) < guard_floor:
                raise GuardDegenerate(
                    f"guard derivative {mp.nstr(g0, 5)} below floor at seed "
                    f"(possible fold; switch parameterization)")
            guard_sign = 1 if g0 > 0 else -1

        points: List[CurvePoint] = [seed]
        min_guard = abs(g0)
        step = mp.mpf(cfg.step)
        step_max = mp.mpf(cfg.step_max)
        min_step = mp.mpf(cfg.step) * mp.mpf(cfg.min_step_factor)
        stop = "max_steps"
        current = seed

        for _ in range(cfg.max_steps):
            x0 = current.t if by_t else current.u
            if param_limit is not None and (x0 - param_limit) * direction >= 0:
                stop = "param_limit"
                break
            accepted = None
            while True:
                x1 = x0 + direction * step
                clipped = False
                if param_limit is not None and (x1 - param_limit) * direction > 0:
                    x1 = param_limit
                    clipped = True
                with mp.workdps(_work_dps(cfg, sys,
                                          x1 if by_t else current.t,
                                          current.u if by_t else x1)):
                    dx = x1 - x0
                    gx = current.dPdt if by_t else current.dPdu
                    gv = current.dPdu if by_t else current.dPdt
                    v = (current.u if by_t else current.t) - dx * gx / gv
                    ok = False
                    for _ in range(cfg.newton_max_iter):
                        tt = x1 if by_t else v
                        uu = v if by_t else x1
                        f = laurent.eval_real(sys.P, tt, uu, dps=mp.mp.dps)
                        if abs(f) <= tol_newton:
                            ok = True
                            break
                        df = laurent.eval_real(p_u if by_t else p_t, tt, uu,
                                               dps=mp.mp.dps)
                        if df == 0:
                            break
                        v = v - f / df
                    if ok:
                        tt = x1 if by_t else v
                        uu = v if by_t else x1
                        accepted = _point_at(sys, (p_t, p_u), tt, uu)
                        if accepted.residual > tol:
                            ok = False
                if ok:
                    break
                step = step * mp.mpf(cfg.shrink)
                if step < min_step:
                    raise CorrectorDiverged(
                        f"corrector failed near parameter {mp.nstr(x0, 12)} "
                        f"even at minimum step")
            guard = accepted.dPdu if by_t else accepted.dPdt
            if abs(guard) < guard_floor or (1 if guard > 0 else -1) != guard_sign:
                stop = "guard_degenerate"
                break
            if band is not None and not band.contains(
                    accepted.t if by_t else accepted.u,
                    accepted.u if by_t else accepted.t):
                stop = "band_exit"
                break
            points.append(accepted)
            current = accepted
            min_guard = min(min_guard, abs(guard))
            dep_val = accepted.u if by_t else accepted.t
            if abs(dep_val) > dep_limit:
                stop = "dependent_limit"
                break
            if clipped:
                stop = "param_limit"
                break
            step = min(step * mp.mpf(cfg.grow), step_max)

    return Branch(points=tuple(points), parameterization=parameterization,
                  direction=direction, seed=seed, band=band,
                  min_abs_guard=min_guard, guard_sign=guard_sign,
                  stop_reason=stop, tol_residual=tol, dps=cfg.dps)


def slope_span(branch: Branch):
    """(inf, sup, monotonic) of the slopes observed along the branch.

    Monotonicity is reported from the sampled sequence, never assumed.
    """
    slopes = [p.slope for p in branch.points if p.slope is not None]
    if not slopes:
        raise ValueError("branch has no points with computed slopes")
    lo, hi = min(slopes), max(slopes)
    non_dec = all(a <= b for a, b in zip(slopes, slopes[1:]))
    non_inc = all(a >= b for a, b in zip(slopes, slopes[1:]))
    return lo, hi, (non_dec or non_inc)


def _pair_newton(sys: RileySystem, t: mp.mpf, u: mp.mpf, r: Fraction,
                 dps: int, tol: mp.mpf) -> CurvePoint:
    """Newton on (P = 0, slope_residual = 0) at high precision."""
    p_t, p_u = sys.P.partial_t(), sys.P.partial_u()
    b_t, b_u = sys.B.partial_t(), sys.B.partial_u()
    work = laurent.eval_dps(sys.P, t, u, dps)
    with mp.workdps(work):
        tt, uu = +t, +u
        n = mp.mpf(Fraction(r).numerator) / Fraction(r).denominator - 2 * sys.sigma
        for _ in range(80):
            f1 = laurent.eval_real(sys.P, tt, uu, dps=mp.mp.dps)
            b = laurent.eval_real(sys.B, tt, uu, dps=mp.mp.dps)
            y = (tt - 1 / tt) ** 2
            arg = (y - uu) * b * b
            if b == 0 or arg <= 0:
                raise RecheckFailed("pair Newton left the admissible region")
            f2 = n * mp.log(tt) + mp.log(arg)
            j11 = laurent.eval_real(p_t, tt, uu, dps=mp.mp.dps)
            j12 = laurent.eval_real(p_u, tt, uu, dps=mp.mp.dps)
            bt = laurent.eval_real(b_t, tt, uu, dps=mp.mp.dps)
            bu = laurent.eval_real(b_u, tt, uu, dps=mp.mp.dps)
            yp = 2 * (tt - 1 / tt) * (1 + tt ** -2)
            j21 = n / tt + yp / (y - uu) + 2 * bt / b
            j22 = -1 / (y - uu) + 2 * bu / b
            det = j11 * j22 - j12 * j21
            if det == 0:
                raise RecheckFailed("singular Jacobian in pair Newton")
            dt = (f1 * j22 - f2 * j12) / det
            du = (j11 * f2 - j21 * f1) / det
            tt, uu = tt - dt, uu - du
            if abs(f1) <= tol and abs(f2) <= tol and \
               max(abs(dt), abs(du)) <= mp.mpf(10) ** (5 - mp.mp.dps):
                break
        point = _point_at(sys, (p_t, p_u), tt, uu)
        res_slope = abs(riley.slope_residual(sys, tt, uu, r, dps=mp.mp.dps))
        if point.residual > tol or res_slope > tol:
            raise RecheckFailed(
                f"pair Newton residuals ({mp.nstr(point.residual, 5)}, "
                f"{mp.nstr(res_slope, 5)}) exceed {mp.nstr(tol, 5)}")
        return point


def solve_slope(branch: Branch, sys: RileySystem, r: Union[Fraction, int, str],
                cfg: Optional[TraceConfig] = None) -> CurvePoint:
    """A certified point on the branch realizing slope r.

    r must lie within the slope span observed along the trace (the span
    endpoints themselves are attainable only when an actual traced point
    attains them; asymptotic extremes are not).  The result is polished at
    doubled precision on the pair system and revalidates at the certificate
    tolerance - see :mod:`rileyslopes.certify`.
    """
    cfg = cfg or TraceConfig(dps=branch.dps)
    r = Fraction(r)
    with mp.workdps(cfg.dps + 10):
        r_m = mp.mpf(r.numerator) / r.denominator
        cert_tol = mp.mpf(10) ** (40 - 2 * cfg.dps)
    cert_dps = 2 * cfg.dps

    pts = [p for p in branch.points if p.slope is not None]
    if not pts:
        raise OutOfRange("branch has no slope data")
    by_t = branch.parameterization == BY_T
    # hit on a traced point (e.g. the seed at an attained endpoint)
    for p in pts:
        if abs(p.slope - r_m) <= mp.mpf(10) ** (-cfg.dps // 2):
            return _pair_newton(sys, p.t, p.u, r, cert_dps, cert_tol)
    slopes = [p.slope for p in pts]
    lo, hi = min(slopes), max(slopes)
    if r_m < lo or r_m > hi:
        raise OutOfRange(
            f"slope {r} outside the observed span "
            f"[{mp.nstr(lo, 12)}, {mp.nstr(hi, 12)}] "
            "(asymptotic endpoints are never attained)")

    bracket = None
    for a, b in zip(pts, pts[1:]):
        if (a.slope - r_m) * (b.slope - r_m) <= 0:
            bracket = (a, b)
            break
    if bracket is None:
        raise OutOfRange(f"slope {r} is not bracketed by consecutive traced points")

    a, b = bracket
    p_t, p_u = sys.P.partial_t(), sys.P.partial_u()
    xa, xb = (a.t, b.t) if by_t else (a.u, b.u)
    va, vb = (a.u, b.u) if by_t else (a.t, b.t)
    sa = a.slope
    with mp.workdps(laurent.eval_dps(sys.P, max(abs(a.t), abs(b.t)),
                                     max(abs(a.u), abs(b.u)), cfg.dps)):
        tol_n = mp.mpf(cfg.tol_newton)
        for _ in range(4 * cfg.dps):
            xm = (xa + xb) / 2
            vm = (va + vb) / 2
            for _ in range(cfg.newton_max_iter):
                tt = xm if by_t else vm
                uu = vm if by_t else xm
                f = laurent.eval_real(sys.P, tt, uu, dps=mp.mp.dps)
                if abs(f) <= tol_n:
                    break
                df = laurent.eval_real(p_u if by_t else p_t, tt, uu, dps=mp.mp.dps)
                vm = vm - f / df
            tt = xm if by_t else vm
            uu = vm if by_t else xm
            sm = riley.slope_of_point(sys, tt, uu, dps=mp.mp.dps)
            if abs(sm - r_m) <= mp.mpf(10) ** (4 - cfg.dps):
                break
            if (sa - r_m) * (sm - r_m) <= 0:
                xb, vb = xm, vm
            else:
                xa, va, sa = xm, vm, sm
        t0 = xm if by_t else vm
        u0 = vm if by_t else xm
    return _pair_newton(sys, t0, u0, r, cert_dps, cert_tol)


def csv_text(branch: Branch) -> str:
    """Branch CSV: t, u, residual, slope, dPdu, dPdt at full printed precision."""
    digits = branch.dps
    lines = ["t,u,residual,slope,dPdu,dPdt"]
    for p in branch.points:
        slope = mp.nstr(p.slope, digits) if p.slope is not None else ""
        lines.append(",".join([
            mp.nstr(p.t, digits), mp.nstr(p.u, digits),
            mp.nstr(p.residual, 8), slope,
            mp.nstr(p.dPdu, digits), mp.nstr(p.dPdt, digits),
        ]))
    return "\n".join(lines) + "\n"


def export_csv(branch: Branch, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(csv_text(branch))


def trace_slope_branches(sys: RileySystem, dps: int = 50,
                         max_steps: int = 2000) -> List[Branch]:
    """The standard slope-carrying branches for a knot.

    For K(11, 3) these are the two banded branches meeting at the seed on
    u = 0: the negative-slope branch parameterized by t (traced to t = 1e3)
    and the positive-slope branch parameterized by u (traced to u = 1e6).
    For other knots, every discovered seed is traced by u in both directions
    and by t in both directions where the guard allows, without bands.
    """
    branches: List[Branch] = []
    if (sys.knot.p, sys.knot.q) == (11, 3):
        seed = seed_psi(sys, dps=dps)
        cfg_t = TraceConfig(dps=dps, max_steps=max_steps, param_limit="1e3",
                            band=negative_branch_band())
        branches.append(trace_branch(sys, seed, cfg_t, direction=1,
                                     parameterization=BY_T))
        cfg_u = TraceConfig(dps=dps, max_steps=max_steps, param_limit="1e6",
                            band=positive_branch_band())
        branches.append(trace_branch(sys, seed, cfg_u, direction=1,
                                     parameterization=BY_U))
        return branches
    for seed in seed_candidates(sys, dps=dps):
        for parameterization in (BY_U, BY_T):
            for direction in (1, -1):
                limit = "1e6" if parameterization == BY_U else "1e3"
                sign = "" if direction == 1 else "-"
                cfg = TraceConfig(dps=dps, max_steps=max_steps,
                                  param_limit=sign + limit, dep_limit="1e6")
                try:
                    br = trace_branch(sys, seed, cfg, direction=direction,
                                      parameterization=parameterization)
                except GuardDegenerate:
                    continue
                except CorrectorDiverged:
                    continue
                if len(br.points) >= 2:
                    branches.append(br)
    return branches
