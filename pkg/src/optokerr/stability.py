"""Linear stability of steady states via the 4x4 fluctuation drift matrix.

Fluctuations (da, da+, db, db+) around a steady state obey dv/dt = C v + noise
with

    da/dt = -(i*Delta + kappa) da + i*A0*(conj(G) db + G db+)
    db/dt = -(i*Omega_m + gamma) db + i*G*(conj(A0) da + A0 da+)

and the remaining two rows fixed by conjugation, which gives C the structure
row2[j] = conj(row1[swap(j)]) (swap: 1<->2, 3<->4) and likewise rows 3/4; its
spectrum is closed under complex conjugation.  A state is stable when every
eigenvalue has a negative real part, equivalently when the quartic
characteristic polynomial lambda**4 + C3 lambda**3 + C2 lambda**2 + C1 lambda
+ C0 satisfies the full Routh-Hurwitz set

    C3 > 0,  C3*C2 - C1 > 0,  C3*C2*C1 - (C1**2 + C3**2*C0) > 0,  C0 > 0.

The C0 > 0 condition is required for completeness: without it a spectrum with
a sign-symmetric or odd count of positive real roots passes the first three
tests.  ``classify`` computes both the Routh-Hurwitz and the direct eigenvalue
verdict and demands agreement outside a marginal band around the imaginary
axis, where double-precision eigenvalue signs are unreliable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructuralError
from .model import SystemParams
from .steadystate import SteadyState, all_steady_states

# |min -Re(lambda)| below this multiple of (kappa+gamma) counts as marginal.
_MARGINAL_BAND = 1e-8
# Characteristic coefficients of a physical matrix must be real to this level.
_IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class DriftMatrix:
    """Fluctuation drift matrix over (da, da+, db, db+)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("drift matrix must be 4x4")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def conjugate_structure_residual(self) -> float:
        """Max deviation from the paired-row conjugation structure (relative)."""
        m = self.matrix
        swap = (1, 0, 3, 2)
        scale = np.max(np.abs(m)) or 1.0
        res = 0.0
        for r, rc in ((0, 1), (2, 3)):
            for j in range(4):
                res = max(res, abs(m[rc, j] - np.conj(m[r, swap[j]])))
        return res / scale


def drift_matrix(ss: SteadyState, sys: SystemParams) -> DriftMatrix:
    """Assemble the drift matrix from a steady state."""
    a0, g = ss.A0, ss.G
    row_a = np.array([-1j * ss.Delta - sys.kappa, 0.0,
                      1j * a0 * np.conj(g), 1j * a0 * g])
    row_b = np.array([1j * np.conj(a0) * g, 1j * a0 * g,
                      -1j * ss.Omega_m - sys.gamma, 0.0])
    swap = (1, 0, 3, 2)
    m = np.array([row_a,
                  np.conj(row_a[list(swap)]),
                  row_b,
                  np.conj(row_b[list(swap)])])
    return DriftMatrix(matrix=m)


def characteristic_coefficients(c: DriftMatrix):
    """(C3, C2, C1, C0) of det(lambda*I - C) by the trace-power recurrence."""
    m = np.asarray(c.matrix if isinstance(c, DriftMatrix) else c, dtype=complex)
    m2 = m @ m
    m3 = m2 @ m
    m4 = m3 @ m
    t1, t2, t3, t4 = (np.trace(m), np.trace(m2), np.trace(m3), np.trace(m4))
    c3 = -t1
    c2 = -(t2 + c3 * t1) / 2.0
    c1 = -(t3 + c3 * t2 + c2 * t1) / 3.0
    c0 = -(t4 + c3 * t3 + c2 * t2 + c1 * t1) / 4.0
    coeffs = np.array([c3, c2, c1, c0])
    scale = np.max(np.abs(coeffs)) or 1.0
    residue = np.max(np.abs(coeffs.imag)) / scale
    if residue > _IMAG_RESIDUE_TOL:
        raise StructuralError(
            f"characteristic coefficients have imaginary residue {residue:.3e}; "
            "the matrix does not have the physical conjugation structure"
        )
    return tuple(coeffs.real)


def routh_hurwitz_conditions(c3: float, c2: float, c1: float, c0: float):
    """The four Routh-Hurwitz test quantities; stability iff all positive."""
    return (c3, c3 * c2 - c1, c3 * c2 * c1 - (c1**2 + c3**2 * c0), c0)


def routh_hurwitz_stable(c3: float, c2: float, c1: float, c0: float) -> bool:
    """True iff the quartic with these coefficients is Hurwitz stable."""
    for v in (c3, c2, c1, c0):
        if not np.isfinite(v):
            raise ValueError("characteristic coefficients must be finite")
    return all(v > 0.0 for v in routh_hurwitz_conditions(c3, c2, c1, c0))


@dataclass(frozen=True)
class StabilityReport:
    """Stability classification of one steady state.

    ``margin`` is min over eigenvalues of -Re(lambda) [rad/s]: positive for a
    stable state, negative for an unstable one.  ``verdict`` is "stable",
    "unstable", or "marginal" when |margin| sits inside the numerical band
    where the two methods may legitimately disagree.
    """

    char_coeffs: tuple
    eigenvalues: tuple
    rh_verdict: bool
    eig_verdict: bool
    margin: float
    verdict: str


def classify(ss: SteadyState, sys: SystemParams) -> StabilityReport:
    """Classify a steady state by Routh-Hurwitz and eigenvalues, cross-checked."""
    c = drift_matrix(ss, sys)
    coeffs = characteristic_coefficients(c)
    try:
        eig = np.linalg.eigvals(c.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise StructuralError(f"eigenvalue solver failed: {exc}") from exc
    margin = float(np.min(-eig.real))
    rh = routh_hurwitz_stable(*coeffs)
    eig_stable = bool(np.all(eig.real < 0.0))
    band = _MARGINAL_BAND * (sys.kappa + sys.gamma)
    if abs(margin) < band:
        verdict = "marginal"
    else:
        if rh != eig_stable:
            raise StructuralError(
                f"Routh-Hurwitz verdict {rh} contradicts eigenvalue verdict "
                f"{eig_stable} outside the marginal band (margin {margin:.3e})"
            )
        verdict = "stable" if eig_stable else "unstable"
    return StabilityReport(
        char_coeffs=coeffs,
        eigenvalues=tuple(eig),
        rh_verdict=rh,
        eig_verdict=eig_stable,
        margin=margin,
        verdict=verdict,
    )


def classify_roots(sys: SystemParams, delta_a: float, eps_c: float):
    """Steady states at this drive with their stability reports, ascending in x."""
    states = all_steady_states(sys, delta_a, eps_c)
    return [(ss, classify(ss, sys)) for ss in states]


def stability_pattern(reports) -> str:
    """Pattern string like "SUS" along ascending roots (M for marginal)."""
    letter = {"stable": "S", "unstable": "U", "marginal": "M"}
    return "".join(letter[r.verdict] for r in reports)


def pattern_is_generic(pattern: str) -> bool:
    """True for the generic fold structure: S, alternating, ending in S.

    Deviations are physical (e.g. oscillatory instability of a slope-stable
    branch) and must be surfaced to the caller rather than silently accepted.
    """
    if not pattern:
        return False
    expected = "".join("S" if i % 2 == 0 else "U" for i in range(len(pattern)))
    return pattern == expected and pattern[-1] == "S"
