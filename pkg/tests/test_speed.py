import numpy as np
import pytest

from scwde.scalar import UncoupledEnsemble, landscape, potential
from scwde.speed import (
    SpeedReport,
    bound_a1,
    bound_th2,
    detect_steady_state,
    slope_margin_check,
    measure_speed,
)
from scwde.window import CoupledSpec, DEState, WindowSchedule, run_wd

ENS36 = UncoupledEnsemble.regular(3, 6)


@pytest.fixture(scope="module")
def fig3_traj():
    spec = CoupledSpec(ens=ENS36, N=100, w=3, epsilon=0.42)
    sched = WindowSchedule(W=11, T=6)
    _, traj = run_wd(spec, sched, record="per-window")
    return spec, sched, traj


class TestDetectSteadyState:
    def test_translating_profile_detected(self, fig3_traj):
        spec, sched, traj = fig3_traj
        ss = detect_steady_state(traj)
        assert ss.c_prime is not None
        assert ss.residual <= 1e-9
        # regression: onset of 1e-9 steadiness for this configuration
        assert ss.c_prime == 28

    def test_looser_tolerance_detects_earlier(self, fig3_traj):
        spec, sched, traj = fig3_traj
        loose = detect_steady_state(traj, tol=1e-6)
        tight = detect_steady_state(traj, tol=1e-9)
        assert loose.c_prime == 20
        assert loose.c_prime <= tight.c_prime

    def test_shift_residual_attached(self, fig3_traj):
        _, _, traj = fig3_traj
        ss = detect_steady_state(traj)
        assert 0.0 <= ss.residual <= ss.tol

    def test_zero_channel_profile_translates_trivially(self):
        # with eps = 0 every window clears instantly and the 0/1 step
        # profile translates exactly; the trajectory bound is then
        # rejected for having a flat in-window profile
        spec = CoupledSpec(ens=ENS36, N=30, w=3, epsilon=0.0)
        sched = WindowSchedule(W=8, T=2)
        _, traj = run_wd(spec, sched, record="per-window")
        ss = detect_steady_state(traj)
        assert ss.c_prime is not None
        with pytest.raises(ZeroDivisionError):
            bound_a1(traj, ss.c_prime)


class TestBoundA1:
    def test_speed_bounded_on_steady_run(self, fig3_traj):
        spec, sched, traj = fig3_traj
        ss = detect_steady_state(traj)
        a1 = bound_a1(traj, ss.c_prime)
        assert 1.0 / sched.T <= a1

    def test_deterministic_recomputation(self, fig3_traj):
        spec, sched, traj = fig3_traj
        ss = detect_steady_state(traj)
        a1 = bound_a1(traj, ss.c_prime)
        _, traj2 = run_wd(spec, sched, record="per-window")
        assert bound_a1(traj2, ss.c_prime) == a1

    def test_missing_window_rejected(self, fig3_traj):
        _, _, traj = fig3_traj
        with pytest.raises(ValueError):
            bound_a1(traj, max(traj.windows()) + 5)


@pytest.fixture(scope="module")
def land465():
    return landscape(0.465, ENS36)


class TestBoundTh2:
    def spec465(self):
        return CoupledSpec(ens=ENS36, N=100, w=4, epsilon=0.465)

    def test_numerator_matches_closed_form(self, land465):
        # U(1; eps) = 1/R'(1) - eps/L'(1) for the (3,6) ensemble
        th2 = bound_th2(self.spec465(), 15, land465)
        expected = 4 * 1.0 * (1.0 / 6.0 - 0.465 / 3.0)
        assert th2.numerator_finite == pytest.approx(expected, rel=1e-12)

    def test_b1_b2_identity(self, land465):
        th2 = bound_th2(self.spec465(), 15, land465)
        assert th2.B1 == pytest.approx(
            th2.B2 - land465.D * land465.x_d / 4, abs=1e-12
        )

    def test_b_terms_increase_with_window(self, land465):
        b_prev = None
        for W in (10, 15, 20, 30):
            th2 = bound_th2(self.spec465(), W, land465)
            if b_prev is not None:
                assert th2.B1 > b_prev
            b_prev = th2.B1

    def test_nonpositive_denominator_flagged_vacuous(self, land465):
        th2 = bound_th2(self.spec465(), 15, land465)
        if th2.B1 <= 0:
            assert th2.finite_w is None
        if th2.B2 > 0:
            assert th2.infinite_w is not None and th2.infinite_w > 0

    def test_curvature_variant_and_subtrahend(self, land465):
        spec = self.spec465()
        scaled = bound_th2(spec, 15, land465, variant="w_scaled")
        inverse = bound_th2(spec, 15, land465, variant="w_inverse")
        # the w_inverse form divides the curvature terms by 2 D W instead
        # of multiplying by W, so its B terms are strictly smaller here
        assert inverse.B1 < scaled.B1
        with_sub = bound_th2(spec, 15, land465, infinite_subtrahend="x_e")
        u_xe = potential(land465.x_e, 0.465, ENS36)
        assert with_sub.numerator_infinite == pytest.approx(
            scaled.numerator_infinite - 4 * u_xe, rel=1e-12
        )

    def test_missing_landscape_points_rejected(self):
        land_low = landscape(0.3, ENS36)
        with pytest.raises(ValueError, match="lacks"):
            bound_th2(CoupledSpec(ens=ENS36, N=100, w=4, epsilon=0.3), 15, land_low)

    def test_epsilon_mismatch_rejected(self, land465):
        with pytest.raises(ValueError, match="does not match"):
            bound_th2(CoupledSpec(ens=ENS36, N=100, w=4, epsilon=0.42), 15, land465)


class TestSlopeMargin:
    def test_steady_profile_satisfies_bound(self, fig3_traj):
        spec, sched, traj = fig3_traj
        ss = detect_steady_state(traj)
        rep = slope_margin_check(traj.state(ss.c_prime, 0), spec, sched)
        assert rep.holds
        assert rep.min_margin >= -1e-9

    def test_constant_profile_fails(self):
        spec = CoupledSpec(ens=ENS36, N=100, w=3, epsilon=0.0)
        sched = WindowSchedule(W=11, T=6)
        state = DEState(x=np.full(spec.chain_len, 0.3), c=40, t=0)
        rep = slope_margin_check(state, spec, sched)
        assert not rep.holds
        assert rep.min_margin == pytest.approx(-0.3 / 3, rel=1e-12)

    def test_margin_shortfall_scales_inversely_with_coupling_width(self):
        x = np.full(120, 0.3)
        state = DEState(x=x, c=40, t=0)
        sched = WindowSchedule(W=11, T=6)
        margins = {}
        for w in (2, 4):
            spec = CoupledSpec(ens=ENS36, N=121 - w, w=w, epsilon=0.0)
            margins[w] = slope_margin_check(state, spec, sched).min_margin
        assert margins[4] == pytest.approx(margins[2] / 2, rel=1e-12)


class TestMeasureSpeed:
    def test_fast_channel_reports_minimum(self):
        spec = CoupledSpec(ens=ENS36, N=30, w=2, epsilon=0.30)
        rep = measure_speed(spec, W=8, T_max=30, schedule_variant="extended")
        assert rep.T_min is not None
        assert rep.v == 1.0 / rep.T_min
        # linear scan: every smaller T fails
        sched = WindowSchedule(W=8, T=rep.T_min - 1, variant="extended")
        if rep.T_min > 1:
            from scwde.window import decode_success

            final, _ = run_wd(spec, sched)
            assert not decode_success(final, spec).success

    def test_budget_exhaustion_reports_best_average(self):
        spec = CoupledSpec(ens=ENS36, N=40, w=4, epsilon=0.487)
        rep = measure_speed(spec, W=12, T_max=3, schedule_variant="extended")
        assert rep.T_min is None and rep.v is None
        assert rep.best_avg is not None and rep.best_avg > 1e-6

    def test_report_carries_bounds_when_landscape_given(self):
        spec = CoupledSpec(ens=ENS36, N=40, w=3, epsilon=0.45)
        land = landscape(0.45, ENS36)
        rep = measure_speed(spec, W=10, T_max=60, schedule_variant="extended", land=land)
        assert rep.T_min is not None
        assert rep.th2_B1 is not None
        if rep.c_prime is not None:
            assert rep.A1 is not None
            assert rep.v <= rep.A1 + 1e-9
        # left-of-window decodedness diagnostic: the literal schedule leaves
        # a small positive residual there, reported rather than asserted
        assert rep.th2_hypothesis_residual is not None
        assert 0.0 <= rep.th2_hypothesis_residual <= 1.0

    def test_budget_exhausts_close_to_map_threshold(self):
        # the wave speed collapses approaching the potential threshold:
        # 0.002 below it, even 200 iterations per window cannot decode
        from scwde.scalar import map_threshold
        from scwde.window import decode_success

        eps = round(map_threshold(ENS36) - 0.002, 6)
        spec = CoupledSpec(ens=ENS36, N=100, w=4, epsilon=eps)
        sched = WindowSchedule(W=15, T=200, variant="extended")
        final, _ = run_wd(spec, sched, validate=False)
        assert not decode_success(final, spec).success

    def test_csv_row_layout(self):
        rep = SpeedReport(
            epsilon=0.4,
            W=10,
            T_min=5,
            c_prime=7,
            A1=0.3,
            th2_finite=None,
            th2_infinite=1.2,
            alpha=1.0,
            success_policy="average",
            N=40,
            w=3,
            schedule="extended",
            T_max=60,
        )
        row = rep.csv_values()
        assert len(row) == len(SpeedReport.CSV_COLUMNS)
        assert row[0] == 0.4 and row[2] == 5 and row[3] == 0.2
