"""Comparison ODE pair: normalization, integration, and PDE containment."""

import math

import numpy as np
import pytest

from chemostab import (
    GridDomain,
    InitSpec,
    RectangleParams,
    StepConfig,
    Trajectory,
    equilibrium,
    init_state,
    integrate_rectangle,
    normalize,
    run,
    verify_sandwich,
)
from chemostab.rectangle import (
    MinimalModelUnsupported,
    OrderViolation,
    TimeGridMismatch,
    contraction_tail,
    rectangle_rhs,
    tau_grid_for,
)
from conftest import make_params


def logistic_exact(u0: float, t: float) -> float:
    return u0 / (u0 + (1.0 - u0) * math.exp(-t))


class TestNormalize:
    def test_raw_coupling_oracle(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        assert rp.kappa0 == pytest.approx(0.3, rel=1e-15)
        assert rp.kappa == rp.kappa0
        assert rp.quad == 0.0
        assert rp.contraction  # 0.3 * 2 < 1
        assert rp.a == 1.0

    def test_quadratic_coefficient(self):
        p = make_params(chi0=0.2, beta=1.0)
        rp = normalize(p, equilibrium(p), m0=2.0)
        assert rp.quad == pytest.approx(4.0, rel=1e-15)  # beta v* m0^2
        assert not rp.contraction  # 0.2 * (2 + 4) > 1

    def test_signal_floor_divides_coupling(self):
        # v_lb = sqrt(1/2); kappa and quad shrink by (1+v_lb)^beta and (1+v_lb).
        p = make_params(chi0=0.35, beta=1.0, alpha=2.0)
        rp = normalize(p, equilibrium(p), m0=1.0, mode="signal-floor")
        floor = math.sqrt(0.5)
        assert rp.kappa == pytest.approx(0.35 / (1.0 + floor), rel=1e-14)
        assert rp.quad == pytest.approx(1.0 / (1.0 + floor), rel=1e-14)
        assert rp.kappa0 == pytest.approx(0.35, rel=1e-15)

    def test_minimal_model_rejected(self):
        p = make_params(a=0.0, b=0.0)
        with pytest.raises(MinimalModelUnsupported):
            normalize(p, equilibrium(p, u_star=1.0), m0=0.0)

    def test_input_validation(self, reference_eq):
        with pytest.raises(ValueError, match="mode"):
            normalize(make_params(), reference_eq, m0=0.0, mode="fancy")
        with pytest.raises(ValueError, match="m0"):
            normalize(make_params(), reference_eq, m0=-1.0)


class TestRhs:
    def test_equilibrium_is_fixed_point(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        assert np.all(rectangle_rhs(np.array([1.0, 1.0]), rp) == 0.0)

    def test_coupling_widens_gap(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        dbar, dlow = rectangle_rhs(np.array([1.0, 0.5]), rp)
        # At ubar = 1 the logistic term vanishes; coupling pushes up/down.
        assert dbar > 0.0
        assert dlow < 0.3 * 0.5 * 0.5 + 0.5 * (1.0 - 0.5)  # logistic minus pull


class TestIntegration:
    def test_decoupled_pair_matches_logistic(self, reference_eq):
        rp = normalize(make_params(chi0=0.0), reference_eq, m0=0.0)
        traj = integrate_rectangle(rp, ubar0=1.4, ulow0=0.5, tau_end=2.0, dt=1e-3)
        assert traj.ubar[-1] == pytest.approx(logistic_exact(1.4, 2.0), abs=1e-10)
        assert traj.ulow[-1] == pytest.approx(logistic_exact(0.5, 2.0), abs=1e-10)

    def test_time_grid(self, reference_eq):
        rp = normalize(make_params(chi0=0.0), reference_eq, m0=0.0)
        traj = integrate_rectangle(rp, 1.2, 0.8, tau_end=1.0, dt=0.25)
        assert traj.tau == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
        assert traj.dt == 0.25

    def test_ordering_preserved_under_contraction(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        traj = integrate_rectangle(rp, 1.25, 0.75, tau_end=40.0, dt=1e-3)
        assert np.all(traj.ubar >= 1.0 - 1e-9)
        assert np.all(traj.ulow <= 1.0 + 1e-9)
        assert np.all(traj.ulow > 0.0)
        final, increase, monotone = contraction_tail(traj)
        assert final < 1e-6
        assert monotone
        assert increase <= 1e-9

    def test_log_gap_definition(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        traj = integrate_rectangle(rp, 1.25, 0.75, tau_end=0.5, dt=1e-2)
        gap = traj.log_gap()
        assert gap[0] == pytest.approx(math.log(1.25) - math.log(0.75), rel=1e-14)

    def test_initial_ordering_enforced(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        with pytest.raises(OrderViolation):
            integrate_rectangle(rp, ubar0=0.9, ulow0=0.5, tau_end=1.0)
        with pytest.raises(OrderViolation):
            integrate_rectangle(rp, ubar0=1.2, ulow0=1.5, tau_end=1.0)
        with pytest.raises(OrderViolation):
            integrate_rectangle(rp, ubar0=1.2, ulow0=-0.1, tau_end=1.0)

    def test_noncontractive_coupling_breaks_order(self, reference_eq):
        # Far outside the contraction region the upper branch runs away
        # faster than fixed-step RK4 can follow; the guard must trip.
        rp = normalize(make_params(chi0=5.0), reference_eq, m0=0.0)
        assert not rp.contraction
        with pytest.raises(OrderViolation):
            integrate_rectangle(rp, 1.25, 0.75, tau_end=40.0, dt=1e-3)

    def test_parameter_validation(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        with pytest.raises(ValueError):
            integrate_rectangle(rp, 1.2, 0.8, tau_end=0.0)
        with pytest.raises(ValueError):
            integrate_rectangle(rp, 1.2, 0.8, tau_end=1.0, dt=-1e-3)


class TestSandwich:
    def test_pde_run_stays_inside_envelope(self, interval_pi):
        p = make_params(chi0=0.3)
        eq = equilibrium(p)
        spec = InitSpec.perturbation(u_star=1.0, amplitude=0.2)
        state = init_state(interval_pi, spec, p)
        cfg = StepConfig(t_end=2.0, dt=1e-3, output_stride=100)
        traj = run(p, interval_pi, state, cfg)

        rp = normalize(p, eq, m0=0.0)
        tau_end = tau_grid_for(traj.times, rp.a, 1e-3)
        rect = integrate_rectangle(rp, 1.25, 0.75, tau_end=tau_end, dt=1e-3)
        h = interval_pi.spacing[0]
        report = verify_sandwich(rect, traj, eq, slack=5.0 * h**2 + 1e-8)
        assert report.ok
        assert report.n_times == len(traj)

    def test_violation_is_reported_not_hidden(self, interval_pi):
        # An envelope started inside the PDE range must be flagged.
        p = make_params(chi0=0.3)
        eq = equilibrium(p)
        spec = InitSpec.perturbation(u_star=1.0, amplitude=0.2)
        state = init_state(interval_pi, spec, p)
        traj = run(p, interval_pi, state, StepConfig(t_end=0.5, dt=1e-3, output_stride=100))
        rp = normalize(p, eq, m0=0.0)
        rect = integrate_rectangle(rp, 1.05, 0.95, tau_end=1.0, dt=1e-3)
        report = verify_sandwich(rect, traj, eq, slack=1e-8)
        assert not report.ok
        assert report.max_upper_excess > 0.0

    def _mock_traj(self, times):
        p = make_params(chi0=0.3)
        g = GridDomain.interval(math.pi, 8)
        n = len(times)
        return Trajectory(
            params=p, grid=g, eq=equilibrium(p),
            times=np.asarray(times, dtype=float),
            u_min=np.full(n, 0.9), u_max=np.full(n, 1.1),
        )

    def test_offgrid_times_rejected(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        rect = integrate_rectangle(rp, 1.25, 0.75, tau_end=1.0, dt=1e-3)
        with pytest.raises(TimeGridMismatch):
            verify_sandwich(rect, self._mock_traj([0.0, 0.00053]), reference_eq, 1e-8)

    def test_times_beyond_grid_rejected(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        rect = integrate_rectangle(rp, 1.25, 0.75, tau_end=1.0, dt=1e-3)
        with pytest.raises(TimeGridMismatch):
            verify_sandwich(rect, self._mock_traj([0.0, 2.0]), reference_eq, 1e-8)

    def test_tau_grid_covers_samples(self):
        times = np.array([0.0, 0.5, 1.9996])
        tau_end = tau_grid_for(times, a=1.0, dt=1e-3)
        assert tau_end == pytest.approx(2.0)
        assert tau_end >= times[-1]
        # Exact landings are not inflated by a full extra step.
        assert tau_grid_for(np.array([2.0]), 1.0, 1e-3) == pytest.approx(2.0)

    def test_rescaled_time_mapping(self, interval_pi):
        # a = 2 maps PDE time 0.5 to tau = 1; samples land on the ODE grid.
        p = make_params(chi0=0.15, a=2.0, b=2.0)
        eq = equilibrium(p)
        spec = InitSpec.perturbation(u_star=1.0, amplitude=0.1)
        state = init_state(interval_pi, spec, p)
        traj = run(p, interval_pi, state, StepConfig(t_end=0.5, dt=5e-4, output_stride=100))
        rp = normalize(p, eq, m0=0.0)
        tau_end = tau_grid_for(traj.times, rp.a, 1e-3)
        assert tau_end == pytest.approx(1.0)
        rect = integrate_rectangle(rp, 1.15, 0.85, tau_end=tau_end, dt=1e-3)
        report = verify_sandwich(rect, traj, eq, slack=5.0 * interval_pi.spacing[0] ** 2 + 1e-8)
        assert report.ok


class TestRectangleParamsShape:
    def test_fields(self, reference_eq):
        rp = normalize(make_params(chi0=0.3), reference_eq, m0=0.0)
        assert isinstance(rp, RectangleParams)
        assert rp.mode == "plain"
        assert rp.m == 1.0 and rp.gamma == 1.0 and rp.alpha == 1.0
