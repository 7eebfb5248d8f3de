"""Unit conversions: round trips and dimensional sanity."""

import pytest
from scipy.constants import c, epsilon_0, hbar, k as k_B

from spinrad import DomainError, UnitSystem, si_conductivity_to_gaussian


class TestRoundTrip:
    def setup_method(self):
        self.u = UnitSystem.from_omega_si(2.0e6)  # 2 Mrad/s anchor

    @pytest.mark.parametrize(
        "fwd,back,value",
        [
            ("frequency", "frequency_si", 3.7e5),
            ("time", "time_si", 4.4e-3),
            ("length", "length_si", 0.12),
            ("temperature", "temperature_si", 310.0),
            ("inertia", "inertia_si", 1e-33),
        ],
    )
    def test_roundtrip_identity(self, fwd, back, value):
        u = self.u
        assert getattr(u, back)(getattr(u, fwd)(value)) == pytest.approx(value, rel=1e-12)

    def test_anchor_normalizes_omega(self):
        assert self.u.frequency(2.0e6) == pytest.approx(1.0, rel=1e-15)

    def test_bad_anchor(self):
        with pytest.raises(DomainError):
            UnitSystem.from_omega_si(0.0)


class TestDimensionalAnchors:
    def test_power_conversion(self):
        # P_SI = P_nat * hbar / t*^2
        u = UnitSystem(1.0e-6)
        assert u.power_si(1.0) == pytest.approx(hbar / 1e-12, rel=1e-15)

    def test_torque_is_energy(self):
        u = UnitSystem(1.0e-6)
        assert u.torque_si(2.0) == pytest.approx(2.0 * hbar / 1e-6, rel=1e-15)

    def test_temperature_scale(self):
        # k_B T ~ hbar / t* when T_nat = 1
        u = UnitSystem(1.0e-11)
        T_si = u.temperature_si(1.0)
        assert k_B * T_si == pytest.approx(hbar / 1e-11, rel=1e-15)

    def test_length_uses_c(self):
        u = UnitSystem(1.0)
        assert u.length(c) == pytest.approx(1.0, rel=1e-15)

    def test_entropy_rate(self):
        u = UnitSystem(2.0)
        assert u.entropy_rate_si(3.0) == pytest.approx(3.0 * k_B / 2.0, rel=1e-15)


def test_gaussian_conductivity():
    sigma_si = 5.96e7  # copper, S/m
    sigma_g = si_conductivity_to_gaussian(sigma_si)
    assert sigma_g == pytest.approx(sigma_si / (4 * 3.141592653589793 * epsilon_0), rel=1e-12)
    assert 1e17 < sigma_g < 1e19  # ~5e17 1/s
