import numpy as np
import pytest

from optokerr import DriveParams, SystemParams, rabi_from_power

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def reference_system():
    """Resolved-sideband device set used throughout: bare values are angular."""
    return SystemParams(
        omega_a=TWO_PI * 1.3e9,
        omega_m=TWO_PI * 6.3e6,
        g0=250.0,
        g_ck=1e-3 * 250.0,
        kappa=TWO_PI * 0.1e6,
        gamma=40.0,
    )


@pytest.fixture(scope="session")
def reference_system_nock(reference_system):
    from dataclasses import replace
    return replace(reference_system, g_ck=0.0)


@pytest.fixture(scope="session")
def eps_c_96nw(reference_system):
    s = reference_system
    return rabi_from_power(9.6e-9, s.kappa, s.omega_a - s.omega_m)


@pytest.fixture(scope="session")
def drive_96nw(reference_system, eps_c_96nw):
    return DriveParams(delta_a=reference_system.omega_m, eps_c=eps_c_96nw)
