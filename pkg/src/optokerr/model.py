"""Physical parameters and unit conventions for the driven cavity-resonator system.

Unit convention: every frequency, coupling and decay rate in this package is an
angular frequency in rad/s.  Configuration files may carry values as ordinary
frequencies (Hz) via the ``*_over_2pi_hz`` key suffix, which multiplies by 2*pi
at parse time; see :mod:`optokerr.cli`.  Decay rates are amplitude decay rates:
the cavity field decays as exp(-kappa*t), its energy as exp(-2*kappa*t).

``HBAR`` and ``K_B`` are fixed CODATA values, not configurable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J/K


def _require_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Static device parameters, all in rad/s.

    omega_a   cavity resonance
    omega_m   mechanical resonance
    g0        radiation-pressure coupling
    g_ck      cross-Kerr photon-phonon coupling (>= 0 here)
    kappa     cavity amplitude decay rate
    gamma     mechanical amplitude decay rate
    """

    omega_a: float
    omega_m: float
    g0: float
    g_ck: float
    kappa: float
    gamma: float

    def __post_init__(self):
        _require_finite(omega_a=self.omega_a, omega_m=self.omega_m, g0=self.g0,
                        g_ck=self.g_ck, kappa=self.kappa, gamma=self.gamma)
        if self.omega_a <= 0 or self.omega_m <= 0:
            raise ValueError("omega_a and omega_m must be positive")
        if self.kappa <= 0 or self.gamma <= 0:
            raise ValueError("kappa and gamma must be positive")
        if self.g0 < 0:
            raise ValueError("g0 must be nonnegative")
        if self.g_ck < 0:
            raise ValueError("g_ck must be nonnegative (sign-flipped coupling is out of scope)")

    @property
    def resolved_sideband(self) -> bool:
        """True when the mechanical sideband is spectrally resolved (omega_m > kappa)."""
        return self.omega_m > self.kappa


@dataclass(frozen=True)
class DriveParams:
    """Two-tone drive settings, all in rad/s.

    delta_a   control-cavity detuning  omega_a - omega_c
    eps_c     control Rabi amplitude
    eps_p     probe Rabi amplitude
    delta_p   probe-control detuning   omega_p - omega_c
    """

    delta_a: float
    eps_c: float
    eps_p: float = 0.0
    delta_p: float = 0.0

    def __post_init__(self):
        _require_finite(delta_a=self.delta_a, eps_c=self.eps_c,
                        eps_p=self.eps_p, delta_p=self.delta_p)
        if self.eps_c < 0 or self.eps_p < 0:
            raise ValueError("drive amplitudes must be nonnegative")
        if self.eps_p > 0.1 * self.eps_c:
            warnings.warn(
                "probe amplitude exceeds 10% of the control amplitude; the "
                "first-order (weak-probe) response is no longer controlled",
                stacklevel=2,
            )


def rabi_from_power(power: float, kappa: float, omega_field: float) -> float:
    """Convert optical drive power [W] to a Rabi amplitude [rad/s].

    eps = sqrt(2*kappa*P / (hbar*omega_field)); eps**2 is exactly linear in P.
    """
    _require_finite(power=power, kappa=kappa, omega_field=omega_field)
    if power < 0:
        raise ValueError("power must be nonnegative")
    if kappa <= 0 or omega_field <= 0:
        raise ValueError("kappa and omega_field must be positive")
    return math.sqrt(2.0 * kappa * power / (HBAR * omega_field))


def thermal_occupancy(omega_m: float, temperature: float) -> float:
    """Mean phonon number of a bath at ``temperature`` [K] for a mode at ``omega_m`` [rad/s].

    n = 1 / (exp(hbar*omega_m / (k_B*T)) - 1); zero at T = 0 and strictly
    increasing in T, approaching k_B*T/(hbar*omega_m) at high temperature.
    """
    _require_finite(omega_m=omega_m, temperature=temperature)
    if omega_m <= 0:
        raise ValueError("omega_m must be positive")
    if temperature < 0:
        raise ValueError("temperature must be nonnegative")
    if temperature == 0.0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega_m / (K_B * temperature))
