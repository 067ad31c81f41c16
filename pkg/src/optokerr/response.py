"""Weak-probe optical response: sideband amplitudes, output field, absorption.

To first order in the probe, the intracavity field is A0 + A_plus*exp(-i*Dp*t)
+ A_minus*exp(+i*Dp*t) (likewise B for the mechanical mode) and the four
sideband amplitudes satisfy a linear system

    (kappa + i*Delta_minus) A+        = i*(conj(g) B+ + g conj(B-)) A0 + eps_p
    (kappa + i*Delta_plus)  A-        = i*(g conj(B+) + conj(g) B-) A0 [+ eps_p]
    (gamma + i*omega_minus) B+        = i*g*(conj(A0) A+ + A0 conj(A-))
    (gamma + i*omega_plus)  B-        = i*g*(A0 conj(A+) + conj(A0) A-)

with Delta_pm = Delta +- Dp and omega_pm = Omega_m +- Dp.  The bracketed probe
source in the A- line is kept by default (``aminus_probe_term=True``); passing
False drops it, which reproduces the closed-form A+ of ``closed_form_aplus``
exactly and corresponds to expanding the mean-field equations to first order
(the probe tone only sources the co-rotating sideband).  The 4x4 solve is the
authoritative computation; the closed form is a cross-check, and
``aplus_discrepancy_report`` quantifies their disagreement machine-readably.

The reduced output field is eps_T = 2*kappa*A+/eps_p; its real part is the
probe absorption and its imaginary part the dispersion.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BranchUnavailableError, SingularResponseError, ZeroCrossingNotFoundError
from .model import DriveParams, SystemParams
from .stability import classify
from .steadystate import SteadyState, all_steady_states

_PIVOT_NAMES = ("kappa+i*Delta_-", "kappa-i*Delta_+", "gamma+i*omega_-", "gamma-i*omega_+")


@dataclass(frozen=True)
class SidebandAmplitudes:
    """First-order probe sidebands of the cavity (A) and mechanical (B) modes.

    All four amplitudes are exactly linear in eps_p.  ``residual`` is the
    relative back-substitution residual of the solved linear system.
    """

    A_plus: complex
    A_minus: complex
    B_plus: complex
    B_minus: complex
    Delta_plus: float
    Delta_minus: float
    omega_plus: float
    omega_minus: float
    residual: float


def _assemble(ss: SteadyState, sys: SystemParams, drive: DriveParams,
              eps_p: float, aminus_probe_term: bool):
    """Build (M, rhs) for the unknowns (A+, conj(A-), B+, conj(B-))."""
    dp = drive.delta_p
    d_minus, d_plus = ss.Delta - dp, ss.Delta + dp
    w_minus, w_plus = ss.Omega_m - dp, ss.Omega_m + dp
    a0, g = ss.A0, ss.g
    a0c, gc = np.conj(a0), np.conj(g)
    m = np.array([
        [sys.kappa + 1j * d_minus, 0.0, -1j * a0 * gc, -1j * a0 * g],
        [0.0, sys.kappa - 1j * d_plus, 1j * a0c * gc, 1j * a0c * g],
        [-1j * g * a0c, -1j * g * a0, sys.gamma + 1j * w_minus, 0.0],
        [1j * gc * a0c, 1j * gc * a0, 0.0, sys.gamma - 1j * w_plus],
    ])
    rhs = np.array([eps_p, eps_p if aminus_probe_term else 0.0, 0.0, 0.0],
                   dtype=complex)
    return m, rhs, (d_plus, d_minus, w_plus, w_minus)


def linear_response(ss: SteadyState, sys: SystemParams, drive: DriveParams,
                    aminus_probe_term: bool = True,
                    check_stability: bool = True) -> SidebandAmplitudes:
    """Solve the first-order sideband system around ``ss``.

    Warns (but still solves) when the operating point is unstable; the
    response around an unstable state is formal.
    """
    if check_stability and classify(ss, sys).verdict != "stable":
        warnings.warn(
            "computing weak-probe response around a non-stable steady state",
            stacklevel=2,
        )
    m, rhs, (d_plus, d_minus, w_plus, w_minus) = _assemble(
        ss, sys, drive, drive.eps_p, aminus_probe_term)
    diag = np.abs(np.diag(m))
    scale = max(sys.kappa, sys.gamma, abs(ss.Delta), abs(ss.Omega_m))
    if np.min(diag) < 1e-14 * scale:
        k = int(np.argmin(diag))
        raise SingularResponseError(
            f"response system is resonantly degenerate: pivot {_PIVOT_NAMES[k]} "
            f"vanishes ({diag[k]:.3e})",
            pivot_name=_PIVOT_NAMES[k], pivot_value=diag[k],
        )
    try:
        sol = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        k = int(np.argmin(diag))
        raise SingularResponseError(
            f"response system is singular near pivot {_PIVOT_NAMES[k]}",
            pivot_name=_PIVOT_NAMES[k], pivot_value=diag[k],
        ) from exc
    denom = max(np.max(np.abs(rhs)), np.max(np.abs(m) @ np.abs(sol)), 1e-300)
    residual = float(np.max(np.abs(m @ sol - rhs)) / denom)
    return SidebandAmplitudes(
        A_plus=complex(sol[0]), A_minus=complex(np.conj(sol[1])),
        B_plus=complex(sol[2]), B_minus=complex(np.conj(sol[3])),
        Delta_plus=d_plus, Delta_minus=d_minus,
        omega_plus=w_plus, omega_minus=w_minus,
        residual=residual,
    )


def closed_form_aplus(ss: SteadyState, sys: SystemParams, drive: DriveParams) -> complex:
    """Closed-form A+ used as a cross-check against the linear system.

    A+ = [s/(kappa+i*Delta_-) + i|g|^2|A0|^2(omega_+ + omega_-)] * eps_p
         / [s - |g|^2|A0|^2(omega_+ + omega_-)(Delta_+ + Delta_-)]
    with s = (gamma+i*omega_-)(gamma-i*omega_+)(kappa+i*Delta_-)(kappa-i*Delta_+).
    """
    dp = drive.delta_p
    d_minus, d_plus = ss.Delta - dp, ss.Delta + dp
    w_minus, w_plus = ss.Omega_m - dp, ss.Omega_m + dp
    s = ((sys.gamma + 1j * w_minus) * (sys.gamma - 1j * w_plus)
         * (sys.kappa + 1j * d_minus) * (sys.kappa - 1j * d_plus))
    g2x = abs(ss.g) ** 2 * ss.n_photon
    num = s / (sys.kappa + 1j * d_minus) + 1j * g2x * (w_plus + w_minus)
    den = s - g2x * (w_plus + w_minus) * (d_plus + d_minus)
    return complex(num / den * drive.eps_p)


def output_amplitudes(ss: SteadyState, amps: SidebandAmplitudes,
                      drive: DriveParams, kappa: float):
    """Output-field amplitudes (A_out, A_out_plus, A_out_minus).

    A_out is the component at the control frequency, A_out_plus at the probe
    (Stokes) frequency, A_out_minus at the anti-Stokes frequency.
    """
    root = np.sqrt(2.0 * kappa)
    a_out = root * ss.A0 - drive.eps_c / root
    a_out_plus = root * amps.A_plus - drive.eps_p / root
    a_out_minus = root * amps.A_minus
    return complex(a_out), complex(a_out_plus), complex(a_out_minus)


def epsilon_T(ss: SteadyState, sys: SystemParams, drive: DriveParams,
              aminus_probe_term: bool = True,
              check_stability: bool = True) -> complex:
    """Reduced probe-frequency output eps_T = 2*kappa*A_plus/eps_p.

    Computed as a ratio, so the result is independent of the probe amplitude;
    a unit probe is substituted when drive.eps_p == 0.
    """
    eps_p = drive.eps_p if drive.eps_p > 0 else 1.0
    probe = drive if drive.eps_p > 0 else replace(drive, eps_p=eps_p)
    amps = linear_response(ss, sys, probe, aminus_probe_term=aminus_probe_term,
                           check_stability=check_stability)
    return 2.0 * sys.kappa * amps.A_plus / eps_p


@dataclass(frozen=True)
class ResponsePoint:
    """One probe detuning of an absorption/dispersion spectrum."""

    delta_p_reduced: float  # delta_p / omega_m, with delta_p = Delta_p - omega_m
    eps_T: complex

    @property
    def absorption(self) -> float:
        return self.eps_T.real

    @property
    def dispersion(self) -> float:
        return self.eps_T.imag


def select_branch(sys: SystemParams, drive: DriveParams, branch="lowest") -> SteadyState:
    """Resolve a stable steady-state branch for response calculations.

    ``branch`` is "lowest" (the lowest-photon-number stable state, the one
    prepared adiabatically from zero drive) or an integer index into the
    ascending root list, which must refer to a stable state.
    """
    states = all_steady_states(sys, drive.delta_a, drive.eps_c)
    verdicts = [classify(ss, sys).verdict for ss in states]
    stable = [i for i, v in enumerate(verdicts) if v == "stable"]
    if branch == "lowest":
        if not stable:
            raise BranchUnavailableError(
                f"no stable branch at this drive (verdicts {verdicts})",
                available=stable,
            )
        return states[stable[0]]
    idx = int(branch)
    if idx < 0 or idx >= len(states):
        raise BranchUnavailableError(
            f"branch index {idx} out of range; {len(states)} roots present, "
            f"stable branches {stable}",
            available=stable,
        )
    if idx not in stable:
        raise BranchUnavailableError(
            f"branch {idx} is {verdicts[idx]}; stable branches {stable}",
            available=stable,
        )
    return states[idx]


def absorption_spectrum(sys: SystemParams, drive: DriveParams, delta_p_grid,
                        branch="lowest", aminus_probe_term: bool = True):
    """Probe response on a grid of detunings delta_p = Delta_p - omega_m [rad/s].

    The steady state is resolved once from the selected branch and held fixed
    across the grid (the control drive does not change with the probe tone).
    """
    grid = np.asarray(delta_p_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("delta_p grid must be a nonempty 1-D array")
    if not np.all(np.isfinite(grid)):
        raise ValueError("delta_p grid must be finite")
    if np.any(np.diff(grid) < 0):
        raise ValueError("delta_p grid must be sorted ascending")
    ss = select_branch(sys, drive, branch)
    points = []
    for dp in grid:
        probe = replace(drive, delta_p=sys.omega_m + dp)
        et = epsilon_T(ss, sys, probe, aminus_probe_term=aminus_probe_term,
                       check_stability=False)
        points.append(ResponsePoint(delta_p_reduced=dp / sys.omega_m, eps_T=et))
    return points


@dataclass(frozen=True)
class DiscrepancyReport:
    """Machine-readable comparison of the linear-system and closed-form A+.

    ``agree`` is True when the worst relative difference over the grid is at
    or below ``tolerance``.  Emitted (never silently dropped) whenever the two
    routes disagree; the linear system is the authority.
    """

    agree: bool
    tolerance: float
    max_rel_diff: float
    worst_delta_p_reduced: float
    n_points: int
    aminus_probe_term: bool

    def to_json(self) -> str:
        return json.dumps({
            "agree": self.agree,
            "tolerance": self.tolerance,
            "max_rel_diff": self.max_rel_diff,
            "worst_delta_p_reduced": self.worst_delta_p_reduced,
            "n_points": self.n_points,
            "aminus_probe_term": self.aminus_probe_term,
        }, indent=2, sort_keys=True)


def aplus_discrepancy_report(sys: SystemParams, drive: DriveParams, delta_p_grid,
                             branch="lowest", aminus_probe_term: bool = True,
                             tolerance: float = 1e-9) -> DiscrepancyReport:
    """Compare linear-system A+ with the closed form across a spectrum."""
    grid = np.asarray(delta_p_grid, dtype=float)
    ss = select_branch(sys, drive, branch)
    eps_p = drive.eps_p if drive.eps_p > 0 else 1.0
    worst = -1.0
    worst_dp = float(grid[0])
    for dp in grid:
        probe = replace(drive, delta_p=sys.omega_m + dp, eps_p=eps_p)
        a_sys = linear_response(ss, sys, probe, aminus_probe_term=aminus_probe_term,
                                check_stability=False).A_plus
        a_cf = closed_form_aplus(ss, sys, probe)
        rel = abs(a_sys - a_cf) / max(abs(a_sys), abs(a_cf), 1e-300)
        if rel > worst:
            worst, worst_dp = rel, float(dp)
    return DiscrepancyReport(
        agree=bool(worst <= tolerance),
        tolerance=tolerance,
        max_rel_diff=float(worst),
        worst_delta_p_reduced=worst_dp / sys.omega_m,
        n_points=int(grid.size),
        aminus_probe_term=aminus_probe_term,
    )


@dataclass(frozen=True)
class AbsorptionPeak:
    """One local maximum of the absorption with its full width at half height."""

    delta_p: float  # [rad/s]
    height: float
    full_width: float  # [rad/s]


def absorption_peaks(sys: SystemParams, drive: DriveParams, delta_p_grid,
                     branch="lowest", aminus_probe_term: bool = True,
                     min_height_frac: float = 0.5):
    """Locate absorption maxima on the grid and measure their widths.

    Grid maxima above ``min_height_frac`` of the global maximum are refined by
    golden-section search, then the half-height crossings on both flanks are
    bisected to give each peak's full width.  This turns the qualitative
    narrow-vs-broad comparison of the two-peak profile into a number.
    """
    grid = np.asarray(delta_p_grid, dtype=float)
    ss = select_branch(sys, drive, branch)

    def absorption(dp):
        probe = replace(drive, delta_p=sys.omega_m + dp)
        return epsilon_T(ss, sys, probe, aminus_probe_term=aminus_probe_term,
                         check_stability=False).real

    vals = np.array([absorption(d) for d in grid])
    floor = min_height_frac * vals.max()
    peaks = []
    for i in range(1, len(grid) - 1):
        if not (vals[i] > vals[i - 1] and vals[i] > vals[i + 1] and vals[i] > floor):
            continue
        res = minimize_scalar(lambda d: -absorption(d),
                              bracket=(grid[i - 1], grid[i], grid[i + 1]),
                              method="golden",
                              options={"xtol": 1e-12})
        d_peak, height = float(res.x), float(-res.fun)
        half = 0.5 * height

        def _flank(direction):
            j = i
            while 0 < j < len(grid) - 1 and vals[j] > half:
                j += direction
            if vals[j] > half:
                return None  # flank leaves the grid before dropping to half
            a, b = grid[j], d_peak
            fa = vals[j] - half
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = absorption(mid) - half
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            return 0.5 * (a + b)

        left, right = _flank(-1), _flank(+1)
        if left is None or right is None:
            continue
        peaks.append(AbsorptionPeak(delta_p=d_peak, height=height,
                                    full_width=abs(right - left)))
    return peaks


def zero_absorption_point(sys: SystemParams, drive: DriveParams, branch="lowest",
                          window=None, n_scan: int = 2001, tol: float = None,
                          aminus_probe_term: bool = True) -> float:
    """Probe detuning delta_p0 [rad/s] where the absorption crosses zero.

    Scans ``n_scan`` points over ``window`` (default +-0.5*omega_m around
    delta_p = 0), bisects every sign-change bracket until it is narrower than
    ``tol`` (default 1e-12*omega_m), and returns the crossing closest to
    delta_p = 0.  The crossing shifts monotonically with the cross-Kerr
    coupling, which is what makes it a usable probe of that coupling.
    """
    if window is None:
        window = (-0.5 * sys.omega_m, 0.5 * sys.omega_m)
    if tol is None:
        tol = 1e-12 * sys.omega_m
    lo, hi = float(window[0]), float(window[1])
    ss = select_branch(sys, drive, branch)

    def absorption(dp):
        probe = replace(drive, delta_p=sys.omega_m + dp)
        return epsilon_T(ss, sys, probe, aminus_probe_term=aminus_probe_term,
                         check_stability=False).real

    grid = np.linspace(lo, hi, n_scan)
    vals = np.array([absorption(d) for d in grid])
    signs = np.sign(vals)
    brackets = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if brackets.size == 0:
        raise ZeroCrossingNotFoundError(
            "absorption does not change sign inside the scan window",
            scan_summary={
                "window": (lo, hi), "n_points": int(n_scan),
                "min": float(vals.min()), "max": float(vals.max()),
            },
        )
    crossings = []
    for i in brackets:
        a, b = grid[i], grid[i + 1]
        fa = vals[i]
        while (b - a) > tol:
            mid = 0.5 * (a + b)
            fm = absorption(mid)
            if fa * fm <= 0.0:
                b = mid
            else:
                a, fa = mid, fm
        crossings.append(0.5 * (a + b))
    crossings = np.asarray(crossings)
    return float(crossings[np.argmin(np.abs(crossings))])
