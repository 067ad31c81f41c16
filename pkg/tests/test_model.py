import math

import numpy as np
import pytest

from optokerr import DriveParams, SystemParams, rabi_from_power, thermal_occupancy

import _frozen as frozen

TWO_PI = 2.0 * math.pi


class TestRabiFromPower:
    def test_zero_power(self):
        assert rabi_from_power(0.0, TWO_PI * 1e5, TWO_PI * 1.3e9) == 0.0

    def test_square_root_law(self):
        base = rabi_from_power(2.4e-9, TWO_PI * 1e5, TWO_PI * 1.3e9)
        quad = rabi_from_power(4 * 2.4e-9, TWO_PI * 1e5, TWO_PI * 1.3e9)
        assert quad == pytest.approx(2.0 * base, rel=1e-14)

    def test_reference_point_regression(self):
        got = rabi_from_power(9.6e-9, TWO_PI * 0.1e6, TWO_PI * 1.3e9)
        assert got == pytest.approx(frozen.RABI_96NW_OMEGA_A, rel=1e-12)

    def test_square_is_linear_over_ten_decades(self):
        kappa, omega = TWO_PI * 1e5, TWO_PI * 1.3e9
        slope = rabi_from_power(1.0, kappa, omega) ** 2
        for p in np.logspace(-12, -2, 21):
            assert rabi_from_power(p, kappa, omega) ** 2 == pytest.approx(
                slope * p, rel=1e-12)

    @pytest.mark.parametrize("bad", [(-1e-9, 1.0, 1.0), (1e-9, -1.0, 1.0),
                                     (1e-9, 1.0, 0.0), (float("nan"), 1.0, 1.0),
                                     (float("inf"), 1.0, 1.0)])
    def test_rejects_bad_inputs(self, bad):
        with pytest.raises(ValueError):
            rabi_from_power(*bad)


class TestThermalOccupancy:
    def test_zero_temperature(self):
        assert thermal_occupancy(TWO_PI * 6.3e6, 0.0) == 0.0

    def test_high_temperature_asymptote(self):
        from optokerr import HBAR, K_B
        omega = TWO_PI * 6.3e6
        for ratio in (50, 200, 1000):
            temp = ratio * HBAR * omega / K_B
            classical = K_B * temp / (HBAR * omega)
            assert thermal_occupancy(omega, temp) == pytest.approx(
                classical, rel=0.02)

    def test_reference_point_regression(self):
        got = thermal_occupancy(TWO_PI * 6.3e6, 0.010)
        assert got == pytest.approx(frozen.NTH_10MK, rel=1e-12)
        assert 10 < got < 100  # order 30 phonons

    def test_monotone_in_temperature(self):
        omega = TWO_PI * 6.3e6
        for temp in np.logspace(-4, 2, 25):
            assert thermal_occupancy(omega, 2 * temp) > thermal_occupancy(omega, temp)

    def test_rejects_negative_temperature(self):
        with pytest.raises(ValueError):
            thermal_occupancy(TWO_PI * 6.3e6, -0.1)


class TestParams:
    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SystemParams(omega_a=float("nan"), omega_m=1.0, g0=0.0, g_ck=0.0,
                         kappa=1.0, gamma=1.0)
        with pytest.raises(ValueError):
            DriveParams(delta_a=float("inf"), eps_c=0.0)

    @pytest.mark.parametrize("field,value", [
        ("omega_a", -1.0), ("omega_m", 0.0), ("kappa", 0.0), ("gamma", -2.0),
        ("g0", -1.0), ("g_ck", -0.1),
    ])
    def test_rejects_invalid_ranges(self, field, value):
        kwargs = dict(omega_a=1.0, omega_m=1.0, g0=0.0, g_ck=0.0, kappa=1.0,
                      gamma=1.0)
        kwargs[field] = value
        with pytest.raises(ValueError):
            SystemParams(**kwargs)

    def test_resolved_sideband_flag(self, reference_system):
        assert reference_system.resolved_sideband
        tele = SystemParams(omega_a=1e9, omega_m=1e3, g0=0.0, g_ck=0.0,
                            kappa=1e5, gamma=1.0)
        assert not tele.resolved_sideband

    def test_strong_probe_warns(self):
        with pytest.warns(UserWarning):
            DriveParams(delta_a=1.0, eps_c=1.0, eps_p=0.5)

    def test_weak_probe_silent(self, recwarn):
        DriveParams(delta_a=1.0, eps_c=1.0, eps_p=0.01)
        assert len(recwarn) == 0

    def test_immutable(self, reference_system):
        with pytest.raises(AttributeError):
            reference_system.kappa = 1.0
