import dataclasses

import numpy as np
import pytest

import cyclepulse as cp
from cyclepulse import grid as g
from cyclepulse import lagrangian as lag
from cyclepulse import profiles
from cyclepulse.errors import HNearOne


def sine_state(amp=0.1, n=256, augmented=False):
    init = cp.initial_data(profiles.sine(amp), n)
    return init, cp.build_initial_lagrangian(init, n, augmented=augmented)


class TestComputeH:
    def test_zero(self):
        assert lag.compute_h(np.zeros(64)) == 0.0

    def test_sine_closed_form(self):
        a = 0.1
        x = g.grid_points(256)
        h = lag.compute_h(a * 2 * np.pi * np.cos(2 * np.pi * x))
        assert h == pytest.approx(2 * np.pi ** 2 * a ** 2, abs=1e-10)

    def test_h_near_one_rejected(self):
        a = 1.0 / (np.pi * np.sqrt(2.0))  # closed form gives h = 1
        x = g.grid_points(256)
        with pytest.raises(HNearOne):
            lag.compute_h(a * 2 * np.pi * np.cos(2 * np.pi * x))


class TestTheoremCondition:
    def test_zero(self):
        f0, flag = lag.check_theorem_condition(np.zeros(64), np.zeros(64))
        assert f0 == 0.0 and flag

    def test_sine_in_scope(self):
        init = cp.initial_data(profiles.sine(0.1), 256)
        assert abs(init.F0) < 1e-12
        assert init.theorem_scope

    def test_constant_out_of_scope(self):
        init = cp.initial_data(profiles.constant(0.4), 64)
        assert init.F0 == pytest.approx(0.4, abs=1e-14)
        assert not init.theorem_scope


class TestBuildInitial:
    def test_zero_profile(self):
        init = cp.initial_data(profiles.zero(), 64)
        s = cp.build_initial_lagrangian(init, 64)
        assert np.max(np.abs(s.y.samples - g.grid_points(64))) < 1e-14
        assert np.max(np.abs(s.U)) == 0.0
        assert np.max(np.abs(s.V - 1.0)) == 0.0
        assert np.max(np.abs(s.W)) == 0.0
        assert np.max(np.abs(s.Q - 1.0)) == 0.0

    def test_density_is_exactly_constant(self):
        init, s = sine_state()
        assert np.all(s.Q == 1.0 + init.h)

    def test_slope_identity_exact(self):
        _, s = sine_state()
        assert np.max(np.abs(s.W ** 2 + s.V ** 2 - s.V)) <= 1e-12

    def test_map_starts_at_zero(self):
        _, s = sine_state()
        assert s.y.samples[0] == 0.0

    def test_construction_residuals(self):
        # finite-difference derivatives of the constructed state sit at the
        # stencil truncation floor, well under the run budget
        _, s = sine_state()
        rec = cp.invariant_residuals(s)
        assert rec.wv <= 1e-12
        assert rec.yxi <= 1e-6
        assert rec.uxi <= 1e-6

    def test_augmented_construction_exact(self):
        _, s = sine_state(augmented=True)
        rec = cp.invariant_residuals(s)
        assert rec.wv <= 1e-10
        assert rec.yxi <= 1e-10
        assert rec.uxi <= 1e-10


class TestNonlocalTerms:
    def test_zero_field(self):
        init = cp.initial_data(profiles.zero(), 64)
        s = cp.build_initial_lagrangian(init, 64)
        p1, K, xi0 = cp.nonlocal_terms(s)
        assert p1 == 0.0
        assert np.max(np.abs(K)) == 0.0
        assert xi0 == 0.0

    def test_constant_fields_hand_values(self):
        n, c = 64, 0.35
        xi = g.grid_points(n)
        s = lag.LagrangianState(
            t=0.0, y=g.MonotoneMap(xi, 1.0), U=np.full(n, c),
            V=np.ones(n), W=np.zeros(n), Q=np.ones(n), h=0.0)
        p1, K, xi0 = cp.nonlocal_terms(s)
        assert p1 == pytest.approx(c, abs=1e-15)
        assert xi0 == 0.0
        assert np.max(np.abs(K - c * xi)) < 1e-14

    def test_periodicity_of_value_integrand(self, small_case):
        # tile a state over two periods: K - P1*y must repeat within 1e-12
        s = small_case.traj.states[-1]
        n = s.n
        tiled = lag.LagrangianState(
            t=s.t,
            y=g.MonotoneMap(np.concatenate([s.y.samples, s.y.samples + 1.0]),
                            2.0, tol=s.y.tol),
            U=np.tile(s.U, 2), V=np.tile(s.V, 2), W=np.tile(s.W, 2),
            Q=np.tile(s.Q, 2), h=s.h)
        # winding 2 over n' = 2n nodes plays the role of one unit period twice
        p1t, Kt, _ = cp.nonlocal_terms(tiled)
        k_field = Kt - (2.0 * p1t) * tiled.y.samples
        assert np.max(np.abs(k_field[n:] - k_field[:n])) < 1e-12


class TestRhs:
    def test_zero_state_stationary(self):
        init = cp.initial_data(profiles.zero(), 64)
        s = cp.build_initial_lagrangian(init, 64)
        d = cp.rhs(s)
        for f in (d.dy, d.dU, d.dV, d.dW, d.dQ):
            assert np.max(np.abs(f)) == 0.0

    def test_constant_state_stationary(self):
        init = cp.initial_data(profiles.constant(0.35), 64)
        s = cp.build_initial_lagrangian(init, 64)
        d = cp.rhs(s)
        assert np.max(np.abs(d.dy + 0.35 ** 2)) == 0.0
        for f in (d.dU, d.dV, d.dW, d.dQ):
            assert np.max(np.abs(f)) <= 1e-12

    def test_pointwise_slope_conservation(self):
        # 2 W dW + (2V - 1) dV cancels algebraically for any state
        _, s = sine_state()
        d = cp.rhs(s)
        resid = 2.0 * s.W * d.dW + (2.0 * s.V - 1.0) * d.dV
        assert np.max(np.abs(resid)) <= 1e-12

    def test_rejects_h_near_one(self):
        _, s = sine_state()
        bad = dataclasses.replace(s, h=1.0 + 1e-10)
        with pytest.raises(HNearOne):
            cp.rhs(bad)

    def test_linear_pair_identities_off_manifold(self):
        # perturb the label-derivative fields away from VQ / WQ and check
        # the deviation odes produced by the vector field:
        #   d/dt (Uxi - WQ) = P1 (VQ - yxi)
        #   d/dt (VQ - yxi) = 2 U (Uxi - WQ)
        init, s = sine_state(augmented=True)
        rng = np.random.RandomState(5)
        s = dataclasses.replace(
            s, yxi=s.yxi + 0.01 * rng.randn(s.n), Uxi=s.Uxi + 0.01 * rng.randn(s.n))
        d = cp.rhs(s)
        d_uxi_minus_wq = d.dUxi - (d.dW * s.Q + s.W * d.dQ)
        d_vq_minus_yxi = (d.dV * s.Q + s.V * d.dQ) - d.dyxi
        assert np.max(np.abs(d_uxi_minus_wq - d.P1 * (s.V * s.Q - s.yxi))) < 1e-12
        assert np.max(np.abs(d_vq_minus_yxi - 2.0 * s.U * (s.Uxi - s.W * s.Q))) < 1e-12


class TestConserved:
    def test_zero(self):
        init = cp.initial_data(profiles.zero(), 64)
        s = cp.build_initial_lagrangian(init, 64)
        assert cp.conserved(s) == (0.0, 0.0)

    def test_initial_energy_matches_h(self):
        init, s = sine_state()
        et, ft = cp.conserved(s)
        assert abs(et - init.h) <= 1e-10
        assert abs(ft) <= 1e-10

    def test_ftilde_equals_p1(self):
        _, s = sine_state()
        et, ft = cp.conserved(s)
        assert ft == cp.rhs(s).P1


class TestInvariantResiduals:
    def test_perturbed_v_arithmetic(self):
        n = 32
        s = lag.LagrangianState(
            t=0.0, y=g.MonotoneMap(g.grid_points(n), 1.0), U=np.zeros(n),
            V=np.full(n, 1.1), W=np.zeros(n), Q=np.ones(n), h=0.0)
        rec = cp.invariant_residuals(s)
        assert rec.wv == pytest.approx(0.11, abs=1e-14)

    def test_evolved_residuals_stay_small(self, small_case):
        log = small_case.traj.conserved_log
        assert log[:, 3].max() <= 1e-6
        assert log[:, 4].max() <= 1e-6
        assert log[:, 5].max() <= 1e-6
