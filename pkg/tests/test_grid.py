import numpy as np
import pytest

from cyclepulse import grid as g
from cyclepulse.errors import NonMonotone


def nodes(n):
    return g.grid_points(n)


class TestQuadPeriod:
    def test_constant(self):
        assert g.quad_period(np.ones(64)) == 1.0

    def test_single_harmonic_vanishes(self):
        x = nodes(64)
        assert abs(g.quad_period(np.sin(2 * np.pi * x))) < 1e-15

    def test_cos_squared(self):
        x = nodes(64)
        assert g.quad_period(np.cos(2 * np.pi * x) ** 2) == pytest.approx(0.5, abs=1e-14)

    def test_exact_for_low_harmonics(self):
        # every harmonic below n/2 integrates to zero on the uniform grid
        n = 64
        x = nodes(n)
        for k in range(1, n // 2):
            assert abs(g.quad_period(np.sin(2 * np.pi * k * x))) <= 1e-14
            assert abs(g.quad_period(np.cos(2 * np.pi * k * x))) <= 1e-14


class TestInvDeriv:
    def test_constant_projects_to_zero(self):
        out = g.inv_deriv(np.full(32, 3.7))
        assert np.max(np.abs(out)) == 0.0

    def test_cos_antiderivative(self):
        n = 64
        x = nodes(n)
        out = g.inv_deriv(np.cos(2 * np.pi * x))
        exact = np.sin(2 * np.pi * x) / (2 * np.pi)
        # cumulative-trapezoid error bound ~ (dx^2/12) * max|w'|
        assert np.max(np.abs(out - exact)) < 2e-4

    def test_mean_removal_equivalence(self):
        x = nodes(64)
        a = g.inv_deriv(np.cos(2 * np.pi * x))
        b = g.inv_deriv(1.0 + np.cos(2 * np.pi * x))
        assert np.max(np.abs(a - b)) < 1e-14

    def test_starts_at_zero_and_periodic(self):
        rng = np.random.RandomState(7)
        for _ in range(5):
            f = rng.randn(128)
            out = g.inv_deriv(f)
            assert out[0] == 0.0
            assert abs(g.inv_deriv_closure(f)) <= 1e-12


class TestDiff:
    def test_constant_is_zero(self):
        assert np.max(np.abs(g.diff(np.full(64, 3.0)))) == 0.0

    def test_sine_derivative_fd4(self):
        # fd4 truncation for sin(2 pi x) at n=128 is (2 pi)^5/(30 n^4) ~ 1.22e-6
        n = 128
        x = nodes(n)
        err = np.max(np.abs(g.diff(np.sin(2 * np.pi * x))
                            - 2 * np.pi * np.cos(2 * np.pi * x)))
        assert err < 1.3e-6

    def test_sine_derivative_spectral(self):
        n = 128
        x = nodes(n)
        err = np.max(np.abs(g.diff(np.sin(2 * np.pi * x), method="spectral")
                            - 2 * np.pi * np.cos(2 * np.pi * x)))
        assert err < 1e-12

    @pytest.mark.parametrize("n", [64, 128])
    def test_composition_with_inv_deriv(self, n):
        x = nodes(n)
        f = np.exp(np.sin(2 * np.pi * x))
        comp = g.diff(g.inv_deriv(f)) - (f - g.quad_period(f))
        assert np.max(np.abs(comp)) < 10.0 / n ** 2


class TestMonotoneMap:
    def test_identity_inversion(self):
        m = g.MonotoneMap(nodes(64), 1.0)
        assert g.invert_monotone(m, 0.3) == pytest.approx(0.3, abs=1e-14)

    def test_affine_inversion(self):
        h = 0.37
        m = g.MonotoneMap((1.0 + h) * nodes(64), 1.0 + h)
        assert g.invert_monotone(m, (1.0 + h) * 0.25) == pytest.approx(0.25, abs=1e-14)

    def test_plateau_midpoint(self):
        # flat on [0.4, 0.6]: the plateau value inverts to the midpoint 0.5
        n = 160
        x = nodes(n)
        samples = np.where(x < 0.4, x, np.where(x <= 0.6, 0.4, x - 0.2))
        m = g.MonotoneMap(samples, 0.8)
        assert g.invert_monotone(m, 0.4) == pytest.approx(0.5, abs=1e-14)

    def test_rejects_decreasing(self):
        samples = nodes(32).copy()
        samples[10] += 0.1  # creates a negative increment after it
        with pytest.raises(NonMonotone):
            g.MonotoneMap(samples, 1.0)

    def test_winding_must_be_positive(self):
        with pytest.raises(NonMonotone):
            g.MonotoneMap(nodes(16), 0.0)

    def test_roundtrip_on_random_targets(self):
        n = 256
        x = nodes(n)
        m = g.MonotoneMap(x + 0.1 * np.sin(2 * np.pi * x), 1.0)
        rng = np.random.RandomState(3)
        targets = rng.uniform(-1.0, 2.0, 100)
        xi = g.invert_monotone(m, targets)
        back = g.eval_monotone(m, xi)
        assert np.max(np.abs(back - targets)) < 1e-10

    def test_unwrapped_branches(self):
        m = g.MonotoneMap(nodes(64), 1.0)
        assert g.invert_monotone(m, 2.3) == pytest.approx(2.3, abs=1e-12)
        assert g.invert_monotone(m, -0.7) == pytest.approx(-0.7, abs=1e-12)


class TestInterp:
    def test_constant(self):
        assert g.interp(np.full(32, 5.0), 0.123) == 5.0

    def test_node_values_exact(self):
        rng = np.random.RandomState(11)
        f = rng.randn(64)
        for j in (0, 1, 17, 63):
            assert g.interp(f, j / 64) == f[j]

    def test_sine_accuracy(self):
        n = 256
        f = np.sin(2 * np.pi * nodes(n))
        got = g.interp(f, 0.127)
        assert got == pytest.approx(np.sin(2 * np.pi * 0.127), abs=1e-7)

    def test_periodic_wrap(self):
        f = np.sin(2 * np.pi * nodes(64))
        assert g.interp(f, 1.25) == pytest.approx(g.interp(f, 0.25), abs=1e-15)

    def test_trig_interp_bandlimited_exact(self):
        n = 64
        f = 0.3 * np.sin(2 * np.pi * nodes(n)) + 0.1 * np.cos(6 * np.pi * nodes(n))
        q = np.array([0.111, 0.456, 0.987])
        exact = 0.3 * np.sin(2 * np.pi * q) + 0.1 * np.cos(6 * np.pi * q)
        assert np.max(np.abs(g.trig_interp(f, q) - exact)) < 1e-13
