"""Steady states of the two-tone-driven cavity with cross-Kerr coupling.

With the probe off, the mean photon number x = |A0|**2 obeys

    x * [kappa**2 + Delta(x)**2] = eps_c**2,
    Delta(x) = delta_a - g0**2 * x * (g_ck*x + 2*Omega_m) / (gamma**2 + Omega_m**2),
    Omega_m  = omega_m - g_ck*x,

which clears to a degree-5 polynomial in x (degree 3 when g_ck = 0).  The raw
coefficients span tens of decades for realistic parameters, so root finding is
done on a nondimensionalized polynomial: rates are divided by omega_m and x is
rescaled to u = x/x_scale with x_scale = omega_m/g_ck (or eps_c**2/kappa**2 in
the Kerr-free case).  Roots come from the companion-matrix eigenvalues of the
scaled polynomial, one Newton polish step each, then a residual gate against
the physical equation above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResidualError, RootFindingError
from .model import SystemParams

# Companion eigenvalues of near-degenerate roots pick up small imaginary parts.
_REAL_ROOT_IMAG_TOL = 1e-8
# Leading scaled coefficients below this (relative) are treated as zero and the
# polynomial degree is reduced, so g_ck -> 0 degrades gracefully to the cubic.
_DEFLATION_TOL = 1e-14
# Two roots closer than this (relative) are flagged marginal (fold tangency).
_TANGENCY_TOL = 1e-6


@dataclass(frozen=True)
class QuinticCoefficients:
    """Polynomial coefficients of the steady-state photon-number equation.

    ``coeffs`` are the physical coefficients (a0..a5, ascending powers of x);
    ``scaled`` are the nondimensional coefficients of u = x/x_scale, normalized
    to unit maximum magnitude.  The physical polynomial is recovered as

        P(x) = value_scale * sum_k scaled[k] * (x/x_scale)**k

    and equals (gamma**2 + Omega_m**2)**2 * (x*[kappa**2 + Delta**2] - eps_c**2).
    ``effective_degree`` is the degree after deflating negligible leading terms.
    """

    coeffs: tuple
    scaled: tuple
    x_scale: float
    value_scale: float
    effective_degree: int

    def evaluate(self, x):
        """Physical polynomial value at photon number ``x`` (scalar or array)."""
        u = np.asarray(x, dtype=float) / self.x_scale
        acc = np.zeros_like(u)
        for c in self.scaled[::-1]:
            acc = acc * u + c
        out = self.value_scale * acc
        return out if out.ndim else float(out)

    def signs(self) -> str:
        """Sign string read from the highest-degree coefficient down to a0."""
        return "".join(
            "+" if c > 0 else ("-" if c < 0 else "0") for c in self.coeffs[::-1]
        )


def raw_coefficients(omega_m, g0, g_ck, kappa, gamma, delta_a, eps_c):
    """Coefficients (a0..a5) of the cleared photon-number polynomial.

    Takes bare scalars so that sign studies (e.g. a flipped-sign cross-Kerr
    coupling) can be run outside the ``SystemParams`` domain.
    """
    w2 = gamma**2 + omega_m**2
    q = delta_a * (g0**2 + delta_a * g_ck) + g_ck * kappa**2
    a0 = -(eps_c**2) * w2**2
    a1 = w2 * (4 * eps_c**2 * g_ck * omega_m + (delta_a**2 + kappa**2) * w2)
    a2 = -2 * (2 * q * omega_m * w2 + eps_c**2 * g_ck**2 * (gamma**2 + 3 * omega_m**2))
    a3 = (2 * g_ck * q * gamma**2 + 4 * eps_c**2 * g_ck**3 * omega_m
          + 2 * (2 * g0**4 + 5 * delta_a * g0**2 * g_ck
                 + 3 * g_ck**2 * (delta_a**2 + kappa**2)) * omega_m**2)
    a4 = -g_ck * (eps_c**2 * g_ck**3
                  + 4 * ((g0**2 + delta_a * g_ck) ** 2 + g_ck**2 * kappa**2) * omega_m)
    a5 = g_ck**2 * (g0**2 + delta_a * g_ck) ** 2 + g_ck**4 * kappa**2
    return (a0, a1, a2, a3, a4, a5)


def quintic_coefficients(sys: SystemParams, delta_a: float, eps_c: float) -> QuinticCoefficients:
    """Build the photon-number polynomial for ``sys`` at the given drive."""
    if not np.isfinite(delta_a) or not np.isfinite(eps_c):
        raise ValueError("delta_a and eps_c must be finite")
    if eps_c < 0:
        raise ValueError("eps_c must be nonnegative")
    wm = sys.omega_m
    phys = raw_coefficients(wm, sys.g0, sys.g_ck, sys.kappa, sys.gamma, delta_a, eps_c)
    # Same formula on omega_m-scaled inputs gives a_k / omega_m**6 exactly.
    nd = raw_coefficients(1.0, sys.g0 / wm, sys.g_ck / wm, sys.kappa / wm,
                          sys.gamma / wm, delta_a / wm, eps_c / wm)
    if sys.g_ck > 0:
        x_scale = wm / sys.g_ck
    elif eps_c > 0:
        x_scale = eps_c**2 / sys.kappa**2
    else:
        x_scale = 1.0
    scaled = np.array([c * x_scale**k for k, c in enumerate(nd)])
    norm = np.max(np.abs(scaled))
    if norm == 0.0:
        norm = 1.0
    scaled /= norm
    # Deflation: a5/a4 may be dropped when negligible (the g_ck -> 0 cubic
    # limit), and exactly-zero leading terms always; the cubic coefficient is
    # structural (4*g0^4*omega_m^2 > 0 whenever g0 > 0) and dropping it when
    # merely small manufactures spurious real roots out of complex pairs.
    degree = 5
    while degree > 3 and abs(scaled[degree]) < _DEFLATION_TOL:
        degree -= 1
    while degree > 0 and scaled[degree] == 0.0:
        degree -= 1
    return QuinticCoefficients(
        coeffs=phys,
        scaled=tuple(scaled),
        x_scale=x_scale,
        value_scale=wm**6 * norm,
        effective_degree=degree,
    )


def photon_residual(sys: SystemParams, delta_a: float, eps_c: float, x: float) -> float:
    """Relative residual of x*[kappa**2 + Delta(x)**2] = eps_c**2 at ``x``."""
    om = sys.omega_m - sys.g_ck * x
    w = sys.gamma**2 + om**2
    delta = delta_a - sys.g0**2 * x * (sys.g_ck * x + 2.0 * om) / w
    lhs = x * (sys.kappa**2 + delta**2)
    scale = max(abs(lhs), eps_c**2)
    if scale == 0.0:
        return 0.0
    return abs(lhs - eps_c**2) / scale


def _companion_real_roots(scaled, degree):
    """Positive real roots (in u) of the scaled polynomial via its companion matrix."""
    c = np.asarray(scaled[: degree + 1], dtype=float)
    monic = c / c[degree]
    comp = np.zeros((degree, degree))
    comp[1:, :-1] = np.eye(degree - 1)
    comp[:, -1] = -monic[:degree]
    eig = np.linalg.eigvals(comp)
    real = eig[np.abs(eig.imag) < _REAL_ROOT_IMAG_TOL * np.maximum(1.0, np.abs(eig.real))]
    return np.sort(real.real[real.real > 0.0])


def _poly_and_derivative(u, scaled):
    p = 0.0
    dp = 0.0
    for c in scaled[::-1]:
        dp = dp * u + p
        p = p * u + c
    return p, dp


def _newton_polish(u, scaled):
    """One guarded Newton step on the full (non-deflated) scaled polynomial."""
    p, dp = _poly_and_derivative(u, scaled)
    if dp == 0.0:
        return u
    u_new = u - p / dp
    p_new, _ = _poly_and_derivative(u_new, scaled)
    return u_new if abs(p_new) <= abs(p) else u


def steady_photon_numbers(sys: SystemParams, delta_a: float, eps_c: float,
                          residual_tol: float = 1e-9) -> np.ndarray:
    """All physical steady-state photon numbers, ascending.

    Returns the positive real roots of the photon-number polynomial; for an
    undriven cavity (eps_c = 0) the unique steady state x = 0 is returned.
    Root counts are generically odd: 1, 3 or 5 (1 or 3 for g_ck = 0).
    """
    if eps_c == 0.0:
        return np.array([0.0])
    q = quintic_coefficients(sys, delta_a, eps_c)
    if q.effective_degree < 1:
        raise RootFindingError(
            "photon-number polynomial degenerated to a nonzero constant",
            coefficients=q.coeffs,
        )
    u_roots = _companion_real_roots(q.scaled, q.effective_degree)
    # Every true root obeys x*kappa^2 <= eps_c^2; candidates beyond that bound
    # are deflation or roundoff artifacts and are discarded outright.
    x_bound = (1.0 + 1e-9) * eps_c**2 / sys.kappa**2
    roots = []
    for u in u_roots:
        u = _newton_polish(u, q.scaled)
        if u <= 0.0 or u * q.x_scale > x_bound:
            continue
        x = u * q.x_scale
        res = photon_residual(sys, delta_a, eps_c, x)
        if res > residual_tol:
            raise RootFindingError(
                f"root x={x:.6e} failed the steady-state residual gate "
                f"({res:.3e} > {residual_tol:.1e})",
                coefficients=q.coeffs,
            )
        roots.append(x)
    if not roots:
        raise RootFindingError(
            "no positive real root found for a driven cavity; the scan "
            "bracketing must have failed",
            coefficients=q.coeffs,
        )
    return np.sort(np.array(roots))


def tangency_flags(roots, rel_tol: float = _TANGENCY_TOL):
    """Mark roots that form a near-degenerate pair (fold tangency).

    Coincident roots are reported individually rather than merged so that
    sweep code sees fold points; both members of a close pair are flagged.
    """
    roots = np.asarray(roots, dtype=float)
    flags = np.zeros(roots.shape, dtype=bool)
    for i in range(len(roots) - 1):
        denom = max(abs(roots[i]), abs(roots[i + 1]), 1e-300)
        if abs(roots[i + 1] - roots[i]) / denom < rel_tol:
            flags[i] = flags[i + 1] = True
    return flags


@dataclass(frozen=True)
class SteadyState:
    """One self-consistent operating point of the probe-free system.

    A0, B0 are the complex cavity and mechanical amplitudes; Delta the dressed
    cavity-control detuning; Omega_m the Kerr-shifted mechanical frequency
    omega_m - g_ck*|A0|**2; g = g0 + g_ck*B0 the dressed coupling entering the
    probe response and G the coupling entering the fluctuation dynamics (the
    two coincide analytically; both are stored as computed).
    """

    A0: complex
    B0: complex
    n_photon: float
    n_phonon: float
    Delta: float
    Omega_m: float
    g: complex
    G: complex


def steady_state_from_photon(x: float, sys: SystemParams, delta_a: float,
                             eps_c: float, residual_tol: float = 1e-9) -> SteadyState:
    """Construct the full steady state for a validated photon-number root."""
    res = photon_residual(sys, delta_a, eps_c, x)
    if res > residual_tol:
        raise ResidualError(
            f"x={x:.6e} is not a steady-state root (residual {res:.3e})",
            residual=res,
        )
    om = sys.omega_m - sys.g_ck * x
    b0 = 1j * sys.g0 * x / (sys.gamma + 1j * om)
    n_phonon = abs(b0) ** 2
    delta = delta_a - sys.g_ck * n_phonon - 2.0 * sys.g0**2 * x * om / (sys.gamma**2 + om**2)
    a0 = eps_c / (sys.kappa + 1j * delta)
    g = sys.g0 + sys.g_ck * b0
    big_g = sys.g0 * (1.0 + 1j * sys.g_ck * x / (sys.gamma + 1j * om))
    return SteadyState(A0=a0, B0=b0, n_photon=x, n_phonon=n_phonon,
                       Delta=delta, Omega_m=om, g=g, G=big_g)


def all_steady_states(sys: SystemParams, delta_a: float, eps_c: float):
    """Every steady state at this drive, ascending in photon number."""
    return [steady_state_from_photon(x, sys, delta_a, eps_c)
            for x in steady_photon_numbers(sys, delta_a, eps_c)]


def phonon_of_photon(x, sys: SystemParams):
    """Mean phonon number as a function of the mean photon number.

    n_b = g0**2 * x**2 / (gamma**2 + (omega_m - g_ck*x)**2).  Monotone in x for
    g_ck = 0; for g_ck > 0 it peaks where omega_m - g_ck*x = -gamma**2/omega_m,
    i.e. within O(gamma**2/(omega_m*g_ck)) of x = omega_m/g_ck, then falls.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("photon number must be nonnegative")
    om = sys.omega_m - sys.g_ck * x
    out = sys.g0**2 * x**2 / (sys.gamma**2 + om**2)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DescartesReport:
    """Sign pattern of the polynomial and the positive-root bound it implies."""

    signs: str  # highest-degree coefficient first, '0' where a coefficient vanishes
    sign_changes: int

    @property
    def max_positive_roots(self) -> int:
        return self.sign_changes


def descartes_check(coeffs) -> DescartesReport:
    """Sign sequence and positive-root bound by the rule of signs.

    ``coeffs`` may be a :class:`QuinticCoefficients` or any ascending-order
    coefficient sequence.  Zero coefficients are skipped when counting sign
    alternations.  All-positive physical parameters with g_ck > 0 give the
    sign sequence ``+-+-+-`` and a bound of five positive roots; the Kerr-free
    cubic gives ``+-+-`` with a bound of three.
    """
    if isinstance(coeffs, QuinticCoefficients):
        seq = coeffs.coeffs
    else:
        seq = tuple(float(c) for c in coeffs)
    if not all(np.isfinite(seq)):
        raise ValueError("coefficients must be finite")
    signs = "".join("+" if c > 0 else ("-" if c < 0 else "0") for c in seq[::-1])
    nonzero = [c for c in seq if c != 0.0]
    changes = sum(1 for p, n in zip(nonzero, nonzero[1:]) if p * n < 0)
    return DescartesReport(signs=signs, sign_changes=changes)
