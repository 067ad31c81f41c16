"""Independent oracles used to generate and defend expected test values.

Everything here is written directly from the governing equations with plain
numpy, deliberately avoiding the library's companion-matrix, drift-matrix and
linear-solver code paths so the two routes stay independent.
"""

from __future__ import annotations

import numpy as np

HBAR = 1.054571817e-34
K_B = 1.380649e-23


def delta_of_x(x, omega_m, g0, g_ck, gamma, delta_a):
    """Dressed detuning Delta(x) entering the photon-number equation."""
    om = omega_m - g_ck * x
    w = gamma**2 + om**2
    return delta_a - g0**2 * x * (g_ck * x + 2.0 * om) / w


def photon_equation_residual(x, omega_m, g0, g_ck, kappa, gamma, delta_a, eps_c):
    """LHS - RHS of x*[kappa^2 + Delta(x)^2] = eps_c^2."""
    d = delta_of_x(x, omega_m, g0, g_ck, gamma, delta_a)
    return x * (kappa**2 + d**2) - eps_c**2


def brute_force_photon_roots(omega_m, g0, g_ck, kappa, gamma, delta_a, eps_c,
                             n_grid=2_000_001, n_bisect=200):
    """Positive roots by sign-scan over [0, eps_c^2/kappa^2] plus bisection.

    x <= eps_c^2/kappa^2 holds for every root, so the scan interval is a
    guaranteed bracket of all of them.
    """
    if eps_c == 0.0:
        return np.array([0.0])

    def f(x):
        return photon_equation_residual(x, omega_m, g0, g_ck, kappa, gamma,
                                        delta_a, eps_c)

    xs = np.linspace(0.0, 1.05 * eps_c**2 / kappa**2, n_grid)
    fs = f(xs)
    signs = np.sign(fs)
    roots = []
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        lo, hi = xs[i], xs[i + 1]
        flo = f(lo)
        for _ in range(n_bisect):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if flo * fm <= 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
            if hi - lo <= 1e-15 * hi:
                break
        roots.append(0.5 * (lo + hi))
    return np.array(roots)


def steady_amplitudes(x, omega_m, g0, g_ck, kappa, gamma, delta_a, eps_c):
    """(A0, B0) for a photon-number root, straight from the defining relations."""
    om = omega_m - g_ck * x
    b0 = 1j * g0 * x / (gamma + 1j * om)
    d = delta_a - g_ck * abs(b0) ** 2 - 2.0 * g0**2 * x * om / (gamma**2 + om**2)
    a0 = eps_c / (kappa + 1j * d)
    return a0, b0


def mean_field_rhs(a, b, omega_m, g0, g_ck, kappa, gamma, delta_a, eps_c):
    """Probe-free mean-field derivatives (da/dt, db/dt)."""
    da = (-(1j * delta_a + kappa) * a + 1j * g0 * a * (b + np.conj(b))
          + 1j * g_ck * a * b * np.conj(b) + eps_c)
    db = (-(1j * omega_m + gamma) * b + 1j * g0 * a * np.conj(a)
          + 1j * g_ck * a * np.conj(a) * b)
    return da, db


def fd_jacobian(a0, b0, omega_m, g0, g_ck, kappa, gamma, delta_a, eps_c):
    """Real 4x4 Jacobian of the mean-field flow over (Re a, Im a, Re b, Im b).

    Finite differences around (a0, b0); independent of any analytic drift
    matrix, so it can arbitrate the fluctuation linearization.
    """
    def flow(v):
        a = v[0] + 1j * v[1]
        b = v[2] + 1j * v[3]
        da, db = mean_field_rhs(a, b, omega_m, g0, g_ck, kappa, gamma,
                                delta_a, eps_c)
        return np.array([da.real, da.imag, db.real, db.imag])

    v0 = np.array([a0.real, a0.imag, b0.real, b0.imag])
    jac = np.zeros((4, 4))
    for k in range(4):
        h = 1e-6 * max(1.0, abs(v0[k]))
        vp = v0.copy()
        vm = v0.copy()
        vp[k] += h
        vm[k] -= h
        jac[:, k] = (flow(vp) - flow(vm)) / (2.0 * h)
    return jac


def fd_stability(x, omega_m, g0, g_ck, kappa, gamma, delta_a, eps_c):
    """(stable?, eigenvalues) of the finite-difference linearization at root x."""
    a0, b0 = steady_amplitudes(x, omega_m, g0, g_ck, kappa, gamma, delta_a, eps_c)
    eig = np.linalg.eigvals(fd_jacobian(a0, b0, omega_m, g0, g_ck, kappa, gamma,
                                        delta_a, eps_c))
    return bool(np.all(eig.real < 0.0)), eig


def polyval_ascending(coeffs, x):
    """Evaluate a polynomial given ascending coefficients, by Horner."""
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc
