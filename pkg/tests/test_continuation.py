from fractions import Fraction

import mpmath as mp
import pytest

import rileyslopes as rs
from rileyslopes.continuation import BY_T, BY_U, Band, TraceConfig
from rileyslopes.errors import (CorrectorDiverged, GuardDegenerate,
                                NoRealSeed, OutOfRange)


def closed_form_tmin(dps=60):
    with mp.workdps(dps):
        return (mp.sqrt((mp.sqrt(5) - 1) / 2) + mp.sqrt((mp.sqrt(5) + 7) / 2)) / 2


class TestSeeds:
    def test_k113_seed_matches_closed_form(self, sys113):
        seed = rs.seed_psi(sys113, dps=50)
        assert abs(seed.t - closed_form_tmin()) < mp.mpf("1e-45")
        assert seed.u == 0
        assert seed.residual <= mp.mpf("1e-30")

    def test_trefoil_has_no_real_seed(self, sys31):
        with pytest.raises(NoRealSeed):
            rs.seed_psi(sys31)

    def test_figure_eight_seed_is_golden_ratio(self, sys53):
        seed = rs.seed_psi(sys53, dps=50)
        with mp.workdps(60):
            golden = (1 + mp.sqrt(5)) / 2
        assert abs(seed.t - golden) < mp.mpf("1e-45")

    def test_seed_candidates_dedupe(self, sys53):
        # both axis and offset loci give the same golden-ratio point
        seeds = rs.seed_candidates(sys53, dps=50)
        assert len(seeds) == 1

    def test_seed_candidates_grid_scan(self, sys53):
        seeds = rs.seed_candidates(sys53, dps=50, rect=(1.9, 2.1, -1.0, 2.0),
                                   grid=12)
        # grid finds points on both the upper and lower arcs
        assert len(seeds) >= 3


class TestTraceBranch:
    def test_zero_steps_returns_seed_only(self, sys113):
        seed = rs.seed_psi(sys113, dps=50)
        br = rs.trace_branch(sys113, seed, TraceConfig(dps=50, max_steps=0))
        assert len(br.points) == 1
        assert br.points[0].t == seed.t

    def test_negative_branch_band_containment(self, branches113):
        neg = branches113[0]
        assert neg.parameterization == BY_T
        for p in neg.points:
            assert -p.t ** -4 < p.u <= 0
            assert p.residual <= neg.tol_residual

    def test_positive_branch_band_containment(self, branches113):
        pos = branches113[1]
        assert pos.parameterization == BY_U
        for p in pos.points:
            lo = (mp.sqrt(p.u) + mp.sqrt(p.u + 4)) / 2
            hi = (mp.sqrt(p.u + 1) + mp.sqrt(p.u + 5)) / 2
            assert lo < p.t < hi
            assert p.residual <= pos.tol_residual

    def test_guards_never_cross_zero(self, branches113):
        for br in branches113:
            assert br.min_abs_guard > 0
            for p in br.points:
                g = br.guard_of(p)
                assert g != 0 and (1 if g > 0 else -1) == br.guard_sign

    def test_negative_branch_guard_is_negative(self, branches113):
        # the dependent-variable partial stays negative along u <= 0
        neg = branches113[0]
        assert neg.guard_sign == -1
        assert all(p.dPdu < 0 for p in neg.points)

    def test_axis_sign_fence(self, sys113, branches113):
        # P(t, 0) <= 0 and P(t, -t^-4) > 0 for sampled t along the branch
        with mp.workdps(60):
            for p in branches113[0].points:
                assert rs.eval_real(sys113.P, p.t, 0) <= 0
                assert rs.eval_real(sys113.P, p.t, -p.t ** -4) > 0

    def test_spans(self, branches113):
        lo, hi, mono = rs.slope_span(branches113[0])
        assert mono
        assert lo < mp.mpf("-3.99")
        assert hi >= 0 or abs(hi) < mp.mpf("1e-25")
        lo, hi, mono = rs.slope_span(branches113[1])
        assert mono
        assert hi > mp.mpf("7.9")
        assert lo <= 0 or abs(lo) < mp.mpf("1e-25")

    def test_single_point_span(self, sys113):
        seed = rs.seed_psi(sys113, dps=50)
        br = rs.trace_branch(sys113, seed, TraceConfig(dps=50, max_steps=0))
        lo, hi, mono = rs.slope_span(br)
        assert lo == hi and mono

    def test_guard_degenerate_at_fold_seed(self, sys53):
        # the F8 axis seed is a by-t fold: dP/du vanishes there
        seed = rs.seed_psi(sys53, dps=50)
        with pytest.raises(GuardDegenerate):
            rs.trace_branch(sys53, seed, TraceConfig(dps=50),
                            parameterization=BY_T)

    def test_band_exit_stops(self, sys113):
        seed = rs.seed_psi(sys113, dps=50)
        tight = Band(name="tight", bounds=lambda t: (mp.mpf("-1e-6"), mp.mpf(0)),
                     closed_hi=True)
        br = rs.trace_branch(sys113, seed,
                             TraceConfig(dps=50, band=tight, param_limit="1e3"))
        assert br.stop_reason == "band_exit"
        assert len(br.points) == 1

    def test_corrector_diverged_past_endpoint(self, sys53):
        # forcing the parameter past u = -1 (no real t beyond) must fail loudly
        seed = rs.seed_psi(sys53, dps=50)
        cfg = TraceConfig(dps=50, step="0.5", min_step_factor="1e-3",
                          param_limit="-2", dep_limit="1e300", max_steps=400)
        with pytest.raises(CorrectorDiverged):
            rs.trace_branch(sys53, seed, cfg, direction=-1,
                            parameterization=BY_U)

    def test_dependent_limit_stop(self, sys53):
        seed = rs.seed_psi(sys53, dps=50)
        cfg = TraceConfig(dps=50, param_limit="-1e6", dep_limit="1e6",
                          max_steps=600)
        br = rs.trace_branch(sys53, seed, cfg, direction=-1,
                             parameterization=BY_U)
        assert br.stop_reason == "dependent_limit"
        assert br.points[-1].t > mp.mpf("1e6")

    def test_step_halving_stability(self, sys113):
        # fixed-step traces at h and h/2 agree at matched parameters
        seed = rs.seed_psi(sys113, dps=50)
        cfg_a = TraceConfig(dps=50, step="0.05", grow=1.0, max_steps=40)
        cfg_b = TraceConfig(dps=50, step="0.025", grow=1.0, max_steps=80)
        br_a = rs.trace_branch(sys113, seed, cfg_a)
        br_b = rs.trace_branch(sys113, seed, cfg_b)
        tol = mp.mpf(cfg_a.tol_residual)
        for k in range(1, min(len(br_a.points), (len(br_b.points) + 1) // 2)):
            pa, pb = br_a.points[k], br_b.points[2 * k]
            assert abs(pa.t - pb.t) < mp.mpf("1e-40")
            assert abs(pa.slope - pb.slope) < 10 * tol

    def test_bad_arguments(self, sys113):
        seed = rs.seed_psi(sys113, dps=50)
        with pytest.raises(ValueError):
            rs.trace_branch(sys113, seed, TraceConfig(dps=50), direction=0)
        with pytest.raises(ValueError):
            rs.trace_branch(sys113, seed, TraceConfig(dps=50),
                            parameterization="by_x")
        with pytest.raises(ValueError):
            TraceConfig(shrink=1.5)
        with pytest.raises(ValueError):
            TraceConfig(step="-1")


class TestSolveSlope:
    def test_round_trip(self, sys113, branches113):
        for r, br in ((Fraction(-1), branches113[0]),
                      (Fraction(5, 2), branches113[1])):
            pt = rs.solve_slope(br, sys113, r)
            got = rs.slope_of_point(sys113, pt.t, pt.u, dps=100)
            assert abs(got - mp.mpf(r.numerator) / r.denominator) < mp.mpf("1e-50")

    def test_zero_returns_seed_point(self, sys113, branches113):
        pt = rs.solve_slope(branches113[0], sys113, Fraction(0))
        assert abs(pt.t - closed_form_tmin()) < mp.mpf("1e-45")
        assert abs(pt.u) < mp.mpf("1e-50")

    def test_asymptotic_endpoints_out_of_range(self, sys113, branches113):
        with pytest.raises(OutOfRange):
            rs.solve_slope(branches113[0], sys113, Fraction(-4))
        with pytest.raises(OutOfRange):
            rs.solve_slope(branches113[1], sys113, Fraction(8))

    def test_far_out_of_range(self, sys113, branches113):
        with pytest.raises(OutOfRange):
            rs.solve_slope(branches113[0], sys113, Fraction(3))


class TestCsvExport:
    def test_csv_round_trip(self, branches113, tmp_path):
        path = tmp_path / "branch.csv"
        rs.continuation.export_csv(branches113[0], str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t,u,residual,slope,dPdu,dPdt"
        assert len(lines) == len(branches113[0].points) + 1
        cells = lines[1].split(",")
        assert float(cells[0]) > 1  # parseable decimals at full precision


class TestStandardBranches:
    def test_k113_layout(self, branches113):
        assert len(branches113) == 2
        assert branches113[0].band is not None
        assert branches113[1].band is not None
        assert branches113[0].stop_reason == "param_limit"
        assert branches113[1].stop_reason == "param_limit"

    def test_figure_eight_layout(self, branches53):
        assert len(branches53) == 2
        spans = [rs.slope_span(b)[:2] for b in branches53]
        lo = min(s[0] for s in spans)
        hi = max(s[1] for s in spans)
        assert lo < mp.mpf("-3.9")
        assert hi > mp.mpf("3.9")
