import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.special import exp1

from aahbath.bath import (BathSpec, memory_kernel, self_energy, self_energy_derivative, self_energy_slope,
                          spectral_density)
from aahbath.errors import DomainError
from aahbath.oracle import kernel_by_quadrature


class TestBathSpec:
    def test_defaults(self):
        b = BathSpec()
        assert (b.eta, b.s, b.omega_c) == (0.1, 1.0, 10.0)

    @pytest.mark.parametrize("kw", [dict(eta=-0.1), dict(s=0), dict(omega_c=-1), dict(eta=np.inf)])
    def test_rejects(self, kw):
        with pytest.raises(DomainError):
            BathSpec(**kw)

    def test_zero_coupling_allowed(self):
        assert self_energy(-3.0, BathSpec(eta=0.0)) == 0.0


class TestSpectralDensity:
    def test_origin(self):
        for s in (0.5, 1, 3):
            assert spectral_density(0.0, BathSpec(s=s)) == 0.0

    def test_value(self):
        assert spectral_density(10.0, BathSpec()) == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_peak_position(self):
        b = BathSpec(s=3)
        w = np.linspace(1, 60, 59001)
        assert w[np.argmax(spectral_density(w, b))] == pytest.approx(30.0, abs=1e-3)

    def test_linear_in_eta(self):
        w = np.linspace(0, 100, 11)
        assert np.allclose(spectral_density(w, BathSpec(eta=0.2)), 2 * spectral_density(w, BathSpec(eta=0.1)))

    def test_negative(self):
        with pytest.raises(DomainError):
            spectral_density(-1.0, BathSpec())

    @given(st.floats(0, 1e3), st.floats(0.1, 4))
    def test_nonnegative(self, w, s):
        assert spectral_density(w, BathSpec(s=s)) >= 0


class TestSelfEnergy:
    def test_far_tail(self, default_bath):
        assert abs(self_energy(-1e6, default_bath)) <= 1e-4

    def test_origin_limit(self, default_bath):
        # omega/(E - omega) = -1 + E/(E - omega) gives Sigma(0-) = -eta*wc
        assert self_energy(-1e-6, default_bath, "quad") == pytest.approx(-1.0, abs=1e-5)

    def test_exponential_integral_form(self, default_bath):
        # the E1 form with the correct exponent sign, checked against quadrature
        E, eta, wc = -1.0, 0.1, 10.0
        closed = eta * (-wc - E * np.exp(-E / wc) * exp1(-E / wc))
        assert self_energy(E, default_bath, "quad") == pytest.approx(closed, abs=1e-8)
        assert self_energy(E, default_bath, "closed") == pytest.approx(closed, abs=1e-12)

    @pytest.mark.parametrize("s", [1, 2, 3])
    @pytest.mark.parametrize("E", [-120.0, -23.0, -5.0, -0.01, 0.01, 0.8, 2.3, 9.9, 10.0, 55.0])
    def test_closed_form_matches_quadrature(self, s, E):
        b = BathSpec(s=s)
        assert self_energy(E, b, "closed") == pytest.approx(self_energy(E, b, "quad"), abs=1e-9)

    @pytest.mark.parametrize("E", [0.3, 2.5, 14.0])
    def test_principal_value_by_symmetric_subtraction(self, default_bath, E):
        # pairing w = E - x with w = E + x cancels the pole:
        # PV int_0^{2E} J/(E - w) = int_0^E [J(E - x) - J(E + x)] / x dx
        J = lambda w: spectral_density(w, default_bath)
        core = integrate.quad(lambda x: (J(E - x) - J(E + x)) / x, 0, E, limit=400, epsabs=1e-13)[0]
        tail = integrate.quad(lambda w: J(w) / (E - w), 2 * E, np.inf, limit=400, epsabs=1e-13)[0]
        assert self_energy(E, default_bath, "quad") == pytest.approx(core + tail, abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-300, -1e-3))
    def test_negative_axis_sign(self, E):
        b = BathSpec()
        assert self_energy(E, b) < 0
        assert self_energy_derivative(E, b) < 0

    def test_decreasing(self, default_bath):
        E = -np.geomspace(1e-4, 1e4, 60)[::-1]
        assert np.all(np.diff(self_energy(E, default_bath)) < 0)

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    def test_finite_over_s(self, s):
        assert np.isfinite(self_energy(-5.0, BathSpec(s=s)))

    def test_zero_energy(self, default_bath):
        with pytest.raises(DomainError):
            self_energy(0.0, default_bath)
        with pytest.raises(DomainError):
            self_energy(np.array([-1.0, 0.0]), default_bath)

    def test_vectorized_equals_scalar(self, default_bath):
        E = np.array([-700.0, -3.0, 1.5, 800.0])
        assert np.allclose(self_energy(E, default_bath), [self_energy(e, default_bath) for e in E], atol=1e-14)

    @pytest.mark.parametrize("s", [0.5, 2.5])
    def test_vectorized_non_integer_s(self, s):
        bath = BathSpec(s=s)
        E = np.array([-30.0, -2.0, 4.0])
        assert np.allclose(self_energy(E, bath), [self_energy(e, bath) for e in E], atol=1e-14)

    def test_unknown_method(self, default_bath):
        with pytest.raises(DomainError):
            self_energy(-1.0, default_bath, "magic")
        with pytest.raises(DomainError):
            self_energy(-1.0, BathSpec(s=0.5), "closed")


class TestSlope:
    def test_positive(self, default_bath):
        assert np.all(self_energy_slope(np.array([-50.0, -1.0, -0.01]), default_bath) > 0)

    @pytest.mark.parametrize("method", ["quad", "closed"])
    def test_finite_difference(self, default_bath, method):
        h = 1e-4
        fd = -(self_energy(-5 + h, default_bath, "quad") - self_energy(-5 - h, default_bath, "quad")) / (2 * h)
        assert self_energy_slope(-5.0, default_bath, method) == pytest.approx(fd, rel=1e-6)

    def test_far_tail(self, default_bath):
        assert self_energy_slope(-1e6, default_bath) <= 1e-9

    def test_requires_negative(self, default_bath):
        with pytest.raises(DomainError):
            self_energy_slope(1.0, default_bath)

    def test_positive_axis_derivative_paths(self):
        b = BathSpec(s=2)
        assert self_energy_derivative(3.3, b, "quad") == pytest.approx(self_energy_derivative(3.3, b, "closed"),
                                                                       abs=1e-8)


class TestMemoryKernel:
    def test_origin(self, default_bath):
        assert memory_kernel(0.0, default_bath) == pytest.approx(10.0 + 0j)

    def test_fourier_bridge(self, default_bath):
        for t in np.linspace(0, 50, 11):
            assert abs(memory_kernel(t, default_bath) - kernel_by_quadrature(t, default_bath)) <= 1e-6

    @pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
    def test_asymptotic(self, s):
        b = BathSpec(s=s)
        from scipy.special import gamma
        t = 1e3
        ref = b.eta * gamma(s + 1) * b.omega_c ** (1 - s) * t ** (-(s + 1))
        assert abs(memory_kernel(t, b)) / ref == pytest.approx(1.0, abs=0.01)

    def test_negative_time(self, default_bath):
        with pytest.raises(DomainError):
            memory_kernel(-0.1, default_bath)
