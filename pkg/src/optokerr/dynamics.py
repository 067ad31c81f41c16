"""Deterministic mean-field time integration of the coupled amplitude equations.

This is the independent dynamical oracle for the static solvers: trajectories

    da/dt = -(i*delta_a + kappa) a + i*g0*a*(b + conj(b)) + i*g_ck*a*|b|^2
            + eps_c + eps_p*exp(-i*delta_p*t)
    db/dt = -(i*omega_m + gamma) b + i*g0*|a|^2 + i*g_ck*|a|^2*b

are integrated with an adaptive embedded Dormand-Prince 5(4) stepper (numba
compiled; time is nondimensionalized by 1/omega_m internally because the rates
span many decades).  Noise terms have zero mean and are dropped; only the
deterministic mean-field flow is integrated.

``settle`` runs the flow until quiescence and identifies the steady state
reached.  Quiescence is assessed per window of ``window_periods`` mechanical
periods as the net relative drift of each amplitude over the window,
max(|a_end - a_start|/(|a_end| + eps_a), |b_end - b_start|/(|b_end| + eps_b)).
An instantaneous-derivative criterion normalized by gamma*|b| is not usable
here: mechanical perturbations rotate at Omega_m, so its attainable floor is
(Omega_m/gamma)*rtol, orders of magnitude above any useful threshold.  A
quiescent endpoint must additionally match a residual-verified steady-state
root within ``match_tol``; otherwise integration continues, so slow creep and
limit cycles are never misreported as convergence.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .errors import StiffnessError
from .model import DriveParams, SystemParams
from .steadystate import SteadyState, all_steady_states

_STATUS_OK = 0
_STATUS_STIFF = 1

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1 = 35.0 / 384.0 - 5179.0 / 57600.0
_E3 = 500.0 / 1113.0 - 7571.0 / 16695.0
_E4 = 125.0 / 192.0 - 393.0 / 640.0
_E5 = -2187.0 / 6784.0 + 92097.0 / 339200.0
_E6 = 11.0 / 84.0 - 187.0 / 2100.0
_E7 = -1.0 / 40.0


@njit(cache=True)
def _rhs(tau, a, b, da, km, gm, g0m, gckm, ecm, epm, dpm):
    fa = (-(1j * da + km) * a + 1j * g0m * a * (b + np.conj(b))
          + 1j * gckm * a * b * np.conj(b) + ecm)
    if epm != 0.0:
        fa += epm * np.exp(-1j * dpm * tau)
    fb = -(1j + gm) * b + 1j * g0m * a * np.conj(a) + 1j * gckm * a * np.conj(a) * b
    return fa, fb


@njit(cache=True)
def _advance(a, b, tau0, tau1, da, km, gm, g0m, gckm, ecm, epm, dpm,
             rtol, scale_a, scale_b, sample_taus, out_a, out_b):
    """Advance (a, b) from tau0 to tau1, recording states at sample_taus.

    Steps are clamped to land exactly on each requested sample time and on
    tau1.  Returns (a, b, n_recorded, n_steps, status).
    """
    direction = 1.0 if tau1 >= tau0 else -1.0
    span = abs(tau1 - tau0)
    if span == 0.0:
        return a, b, tau0, 0, 0, _STATUS_OK
    tau = tau0
    h_ctrl = direction * min(0.1, span)
    isample = 0
    nsample = sample_taus.shape[0]
    nsteps = 0
    while direction * (tau1 - tau) > 0.0:
        # Samples at or behind the current time are the caller's to fill.
        while isample < nsample and direction * (sample_taus[isample] - tau) <= 0.0:
            isample += 1
        target = tau1
        clamp_sample = False
        if isample < nsample and direction * (sample_taus[isample] - tau1) < 0.0:
            target = sample_taus[isample]
            clamp_sample = True
        clamped = False
        h = h_ctrl
        if direction * (tau + h - target) >= 0.0:
            h = target - tau
            clamped = True
        f1a, f1b = _rhs(tau, a, b, da, km, gm, g0m, gckm, ecm, epm, dpm)
        at = a + h * _A21 * f1a
        bt = b + h * _A21 * f1b
        f2a, f2b = _rhs(tau + _C2 * h, at, bt, da, km, gm, g0m, gckm, ecm, epm, dpm)
        at = a + h * (_A31 * f1a + _A32 * f2a)
        bt = b + h * (_A31 * f1b + _A32 * f2b)
        f3a, f3b = _rhs(tau + _C3 * h, at, bt, da, km, gm, g0m, gckm, ecm, epm, dpm)
        at = a + h * (_A41 * f1a + _A42 * f2a + _A43 * f3a)
        bt = b + h * (_A41 * f1b + _A42 * f2b + _A43 * f3b)
        f4a, f4b = _rhs(tau + _C4 * h, at, bt, da, km, gm, g0m, gckm, ecm, epm, dpm)
        at = a + h * (_A51 * f1a + _A52 * f2a + _A53 * f3a + _A54 * f4a)
        bt = b + h * (_A51 * f1b + _A52 * f2b + _A53 * f3b + _A54 * f4b)
        f5a, f5b = _rhs(tau + _C5 * h, at, bt, da, km, gm, g0m, gckm, ecm, epm, dpm)
        at = a + h * (_A61 * f1a + _A62 * f2a + _A63 * f3a + _A64 * f4a + _A65 * f5a)
        bt = b + h * (_A61 * f1b + _A62 * f2b + _A63 * f3b + _A64 * f4b + _A65 * f5b)
        f6a, f6b = _rhs(tau + h, at, bt, da, km, gm, g0m, gckm, ecm, epm, dpm)
        a5 = a + h * (_B1 * f1a + _B3 * f3a + _B4 * f4a + _B5 * f5a + _B6 * f6a)
        b5 = b + h * (_B1 * f1b + _B3 * f3b + _B4 * f4b + _B5 * f5b + _B6 * f6b)
        f7a, f7b = _rhs(tau + h, a5, b5, da, km, gm, g0m, gckm, ecm, epm, dpm)
        err_a = h * (_E1 * f1a + _E3 * f3a + _E4 * f4a + _E5 * f5a + _E6 * f6a + _E7 * f7a)
        err_b = h * (_E1 * f1b + _E3 * f3b + _E4 * f4b + _E5 * f5b + _E6 * f6b + _E7 * f7b)
        sc_a = rtol * (scale_a + abs(a5))
        sc_b = rtol * (scale_b + abs(b5))
        err = max(abs(err_a) / sc_a, abs(err_b) / sc_b)
        accepted = err <= 1.0
        if accepted:
            tau = target if clamped else tau + h
            a, b = a5, b5
            nsteps += 1
            if clamped and clamp_sample:
                out_a[isample] = a
                out_b[isample] = b
                isample += 1
        if err > 0.0:
            fac = 0.9 * err ** -0.2
        else:
            fac = 5.0
        if fac > 5.0:
            fac = 5.0
        if fac < 0.2:
            fac = 0.2
        if accepted and clamped:
            # The truncation to land on a boundary is not an error-controlled
            # shrink; never let it reduce the controller step.
            if abs(h) * fac > abs(h_ctrl):
                h_ctrl = direction * abs(h) * fac
        else:
            h_ctrl = h * fac
        # Stiffness = the controller can no longer make numerical progress.
        if direction * (tau1 - tau) > 0.0 and tau + h_ctrl == tau:
            return a, b, tau, isample, nsteps, _STATUS_STIFF
    return a, b, tau, isample, nsteps, _STATUS_OK


def _scaled_params(sys: SystemParams, drive: DriveParams):
    wm = sys.omega_m
    return (drive.delta_a / wm, sys.kappa / wm, sys.gamma / wm, sys.g0 / wm,
            sys.g_ck / wm, drive.eps_c / wm, drive.eps_p / wm, drive.delta_p / wm)


def _amplitude_scales(sys, drive, initial, states=None):
    """Absolute-error floors for the step controller.

    The controller weights errors by rtol*(scale + |y|); ``scale`` only
    matters while an amplitude transits near zero, so it is a small fraction
    of the characteristic amplitude.  An inflated floor lets the integrator
    random-walk the small mode and stalls the settle drift criterion, so when
    steady states are known their amplitudes set the characteristic scale.
    """
    a0, b0 = initial
    if states:
        char_a = max(abs(a0), max(abs(ss.A0) for ss in states))
        char_b = max(abs(b0), max(abs(ss.B0) for ss in states))
    else:
        char_a = max(abs(a0), drive.eps_c / sys.kappa)
        char_b = max(abs(b0), sys.g0 * char_a**2 / sys.omega_m)
    return 1e-3 * char_a + 1e-30, 1e-3 * char_b + 1e-30


@dataclass(frozen=True)
class Trajectory:
    """Sampled mean-field trajectory.

    ``times`` in seconds; ``a`` and ``b`` complex amplitudes per sample;
    ``converged`` is set by :func:`settle` when a steady state was reached
    within its run; ``final_state`` is (a, b) at the last integrated time.
    """

    times: np.ndarray
    a: np.ndarray
    b: np.ndarray
    converged: bool
    final_state: tuple

    def write_csv(self, path):
        with open(path, "w", encoding="ascii") as fh:
            fh.write("t_s,re_a,im_a,re_b,im_b\n")
            for t, av, bv in zip(self.times, self.a, self.b):
                fh.write(f"{t:.17g},{av.real:.17g},{av.imag:.17g},"
                         f"{bv.real:.17g},{bv.imag:.17g}\n")


def integrate_mean_field(sys: SystemParams, drive: DriveParams, initial=(0j, 0j),
                         t_end: float = None, t_eval=None, n_samples: int = 1000,
                         rtol: float = 1e-10, t_span=None) -> Trajectory:
    """Integrate the mean-field equations and sample the trajectory.

    Samples are taken at ``t_eval`` [s] if given, else on ``n_samples`` points
    uniformly spanning ``t_span`` (default (0, t_end)).  The probe tone is
    included in the drive exactly when drive.eps_p > 0.  Raises
    :class:`StiffnessError` on step-size underflow.
    """
    a0, b0 = complex(initial[0]), complex(initial[1])
    if not (cmath.isfinite(a0) and cmath.isfinite(b0)):
        raise ValueError("initial state must be finite")
    if t_span is None:
        if t_end is None or not np.isfinite(t_end) or t_end <= 0:
            raise ValueError("t_end must be positive and finite")
        t_span = (0.0, float(t_end))
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t_eval is None:
        t_eval = np.linspace(t0, t1, n_samples)
    times = np.asarray(t_eval, dtype=float)
    wm = sys.omega_m
    taus = times * wm
    # Sample times must lie along the integration direction.
    direction = 1.0 if t1 >= t0 else -1.0
    if np.any(direction * np.diff(taus) < 0):
        raise ValueError("t_eval must be sorted along the integration direction")
    out_a = np.empty(taus.shape, dtype=complex)
    out_b = np.empty(taus.shape, dtype=complex)
    scale_a, scale_b = _amplitude_scales(sys, drive, (a0, b0))
    pars = _scaled_params(sys, drive)
    a, b, tau_final, _, nsteps, status = _advance(
        a0, b0, t0 * wm, t1 * wm, *pars, rtol, scale_a, scale_b, taus, out_a, out_b)
    if status == _STATUS_STIFF:
        raise StiffnessError(
            f"step size underflow at t={tau_final / wm:.3e} s after {nsteps} steps",
            t=tau_final / wm, state=(a, b),
        )
    # Interior samples are recorded by step clamping; the endpoints are not
    # crossed by any step and are filled here (as are duplicate sample times).
    for k, tk in enumerate(taus):
        if tk == t0 * wm:
            out_a[k], out_b[k] = a0, b0
        elif tk == tau_final:
            out_a[k], out_b[k] = a, b
        elif k > 0 and tk == taus[k - 1]:
            out_a[k], out_b[k] = out_a[k - 1], out_b[k - 1]
    return Trajectory(times=times, a=out_a, b=out_b, converged=False,
                      final_state=(a, b))


@dataclass(frozen=True)
class SettleResult:
    """Outcome of :func:`settle`.

    On convergence ``steady_state`` holds the residual-verified root matched
    by the endpoint.  Otherwise it is None and ``drift`` carries the last
    windowed drift criterion so the caller can see how far from quiescence
    the run ended (limit cycles plateau at a finite drift).
    """

    converged: bool
    steady_state: Optional[SteadyState]
    final_state: tuple
    t_final: float
    drift: float
    n_steps: int
    trajectory: Optional[Trajectory] = None


def _match_steady_state(a, b, states, scale_a, scale_b):
    """(best distance, state) over candidate steady states."""
    best, best_ss = np.inf, None
    for ss in states:
        dist = max(abs(a - ss.A0) / (abs(ss.A0) + scale_a),
                   abs(b - ss.B0) / (abs(ss.B0) + scale_b))
        if dist < best:
            best, best_ss = dist, ss
    return best, best_ss


def settle(sys: SystemParams, drive: DriveParams, initial=(0j, 0j),
           t_end: float = None, rtol: float = 1e-10, drift_tol: float = 1e-8,
           match_tol: float = 1e-6, window_periods: int = 10,
           record: bool = False) -> SettleResult:
    """Run the probe-free flow to quiescence and identify the steady state.

    Convergence requires both the windowed drift criterion (net relative
    change of each amplitude over ``window_periods`` mechanical periods below
    ``drift_tol``) and an endpoint within ``match_tol`` of a residual-verified
    steady-state root.  Returns a non-converged result carrying the last state
    and drift value when ``t_end`` (default 1000/kappa) is exhausted first.
    With ``record`` the per-window endpoints are kept as a trajectory.
    """
    if drive.eps_p != 0.0:
        raise ValueError("settle requires a probe-free drive (eps_p = 0)")
    a, b = complex(initial[0]), complex(initial[1])
    if not (cmath.isfinite(a) and cmath.isfinite(b)):
        raise ValueError("initial state must be finite")
    if t_end is None:
        t_end = 1e3 / sys.kappa
    states = all_steady_states(sys, drive.delta_a, drive.eps_c)
    scale_a, scale_b = _amplitude_scales(sys, drive, (a, b), states)
    pars = _scaled_params(sys, drive)
    wm = sys.omega_m
    tau_end = t_end * wm
    tau_w = 2.0 * np.pi * window_periods
    no_samples = np.empty(0, dtype=float)
    dump_a = np.empty(0, dtype=complex)
    dump_b = np.empty(0, dtype=complex)
    tau = 0.0
    drift = np.inf
    total_steps = 0
    rec_t, rec_a, rec_b = [0.0], [a], [b]

    def result(converged, ss):
        traj = None
        if record:
            traj = Trajectory(times=np.array(rec_t), a=np.array(rec_a, dtype=complex),
                              b=np.array(rec_b, dtype=complex), converged=converged,
                              final_state=(a, b))
        return SettleResult(converged=converged, steady_state=ss,
                            final_state=(a, b), t_final=tau / wm, drift=drift,
                            n_steps=total_steps, trajectory=traj)

    while tau < tau_end:
        # A fractional tail window would dilute the drift criterion; merge it.
        tau_next = tau_end if tau_end - tau < 1.5 * tau_w else tau + tau_w
        a_prev, b_prev = a, b
        a, b, _, _, nsteps, status = _advance(
            a, b, tau, tau_next, *pars, rtol, scale_a, scale_b,
            no_samples, dump_a, dump_b)
        total_steps += nsteps
        tau = tau_next
        if record:
            rec_t.append(tau / wm)
            rec_a.append(a)
            rec_b.append(b)
        if status == _STATUS_STIFF:
            raise StiffnessError(
                f"step size underflow at t={tau / wm:.3e} s", t=tau / wm,
                state=(a, b),
            )
        drift = max(abs(a - a_prev) / (abs(a) + 1e-12 * scale_a),
                    abs(b - b_prev) / (abs(b) + 1e-12 * scale_b))
        if drift < drift_tol:
            dist, ss = _match_steady_state(a, b, states, scale_a, scale_b)
            if dist <= match_tol:
                return result(True, ss)
    return result(False, None)


def random_initial_states(sys: SystemParams, delta_a: float, eps_c: float,
                          n: int, seed: int = 1234):
    """Reproducible random initial conditions for basin sampling.

    Amplitudes are drawn uniformly in modulus, |a| over [0, 2*sqrt(max root)]
    and |b| over [0, 2*max |B0|], with uniform phases, from a seeded generator.
    """
    states = all_steady_states(sys, delta_a, eps_c)
    a_max = 2.0 * np.sqrt(max(ss.n_photon for ss in states))
    b_max = 2.0 * max(abs(ss.B0) for ss in states)
    if a_max == 0.0:
        a_max = 1.0
    if b_max == 0.0:
        b_max = 1.0
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        ra = rng.uniform(0.0, a_max)
        pa = rng.uniform(0.0, 2.0 * np.pi)
        rb = rng.uniform(0.0, b_max)
        pb = rng.uniform(0.0, 2.0 * np.pi)
        out.append((ra * np.exp(1j * pa), rb * np.exp(1j * pb)))
    return out
