"""Parameter sweeps and branch tracking for figure-ready datasets.

``power_sweep`` solves the steady-state roots with stability at every control
power and links them across the sweep into branches by nearest relative
distance.  Fold points, where the root count changes, are localized by
bisection on the count.  Linking is direction-independent; hysteresis is a
statement about the time-domain dynamics, not about this static geometry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import FoldNotFoundError
from .model import DriveParams, SystemParams, rabi_from_power
from .response import zero_absorption_point
from .stability import classify
from .steadystate import all_steady_states, phonon_of_photon, steady_photon_numbers

# Roots further apart than this (relative) are never linked into one branch.
_LINK_TOL = 0.10
# Fold powers are bisected to this relative width.
_FOLD_REFINE_TOL = 1e-4


@dataclass(frozen=True)
class PhononCurves:
    """Phonon-vs-photon curves with and without the cross-Kerr coupling."""

    x: np.ndarray
    without_ck: np.ndarray
    with_ck: np.ndarray


def phonon_photon_curve(sys: SystemParams, x_grid) -> PhononCurves:
    """Mean phonon number over a photon-number grid, for g_ck = 0 and g_ck."""
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("x grid must be a nonempty 1-D array")
    if np.any(np.diff(x) < 0) or np.any(x < 0):
        raise ValueError("x grid must be sorted and nonnegative")
    return PhononCurves(
        x=x,
        without_ck=np.asarray(phonon_of_photon(x, replace(sys, g_ck=0.0))),
        with_ck=np.asarray(phonon_of_photon(x, sys)),
    )


@dataclass(frozen=True)
class SweepBranch:
    """One linked branch of steady-state roots along the sweep axis."""

    branch_id: int
    sweep_values: np.ndarray
    x: np.ndarray
    stable: np.ndarray


@dataclass(frozen=True)
class FoldPoint:
    """Sweep value where the root count changes (branches born or dying)."""

    sweep_value: float
    count_before: int
    count_after: int


@dataclass(frozen=True)
class PowerSweepResult:
    powers: np.ndarray
    root_counts: np.ndarray
    branches: tuple
    folds: tuple


def _link_roots(sweep_values, roots_per_point, stable_per_point):
    """Greedy nearest-relative-distance linking of roots into branches."""
    branches = []
    active = {}  # branch index -> last x
    for value, roots, stabs in zip(sweep_values, roots_per_point, stable_per_point):
        pairs = []
        for bi, last_x in active.items():
            for ri, x in enumerate(roots):
                denom = max(abs(x), abs(last_x), 1e-300)
                rel = abs(x - last_x) / denom
                if rel < _LINK_TOL:
                    pairs.append((rel, bi, ri))
        pairs.sort()
        used_b, used_r = set(), set()
        assign = {}
        for rel, bi, ri in pairs:
            if bi in used_b or ri in used_r:
                continue
            used_b.add(bi)
            used_r.add(ri)
            assign[ri] = bi
        next_active = {}
        for ri, x in enumerate(roots):
            bi = assign.get(ri)
            if bi is None:
                bi = len(branches)
                branches.append({"values": [], "x": [], "stable": []})
            branches[bi]["values"].append(value)
            branches[bi]["x"].append(x)
            branches[bi]["stable"].append(stabs[ri])
            next_active[bi] = x
        active = next_active
    return tuple(
        SweepBranch(
            branch_id=i,
            sweep_values=np.array(b["values"]),
            x=np.array(b["x"]),
            stable=np.array(b["stable"], dtype=bool),
        )
        for i, b in enumerate(branches)
    )


def _root_count(sys, delta_a, power, omega_c):
    eps_c = rabi_from_power(power, sys.kappa, omega_c)
    return len(steady_photon_numbers(sys, delta_a, eps_c))


def _bisect_fold(sys, delta_a, omega_c, p_lo, p_hi, count_lo):
    """Power where the root count leaves ``count_lo``, to 1e-4 relative."""
    while (p_hi - p_lo) > _FOLD_REFINE_TOL * p_hi:
        mid = 0.5 * (p_lo + p_hi)
        if _root_count(sys, delta_a, mid, omega_c) == count_lo:
            p_lo = mid
        else:
            p_hi = mid
    return 0.5 * (p_lo + p_hi)


def power_sweep(sys: SystemParams, delta_a: float, powers, omega_c: float,
                refine_folds: bool = True) -> PowerSweepResult:
    """Roots, stability and branch structure over a control-power scan [W]."""
    powers = np.asarray(powers, dtype=float)
    if powers.ndim != 1 or powers.size == 0:
        raise ValueError("powers must be a nonempty 1-D array")
    if np.any(np.diff(powers) < 0) or np.any(powers < 0):
        raise ValueError("powers must be sorted ascending and nonnegative")
    roots_per_point, stable_per_point, counts = [], [], []
    for p in powers:
        eps_c = rabi_from_power(p, sys.kappa, omega_c)
        states = all_steady_states(sys, delta_a, eps_c)
        roots_per_point.append([ss.n_photon for ss in states])
        stable_per_point.append([classify(ss, sys).verdict == "stable" for ss in states])
        counts.append(len(states))
    counts = np.array(counts, dtype=int)
    branches = _link_roots(powers, roots_per_point, stable_per_point)
    folds = []
    for i in np.nonzero(np.diff(counts))[0]:
        value = 0.5 * (powers[i] + powers[i + 1])
        if refine_folds and powers[i] > 0:
            value = _bisect_fold(sys, delta_a, omega_c, powers[i], powers[i + 1],
                                 counts[i])
        folds.append(FoldPoint(sweep_value=float(value),
                               count_before=int(counts[i]),
                               count_after=int(counts[i + 1])))
    return PowerSweepResult(powers=powers, root_counts=counts,
                            branches=branches, folds=tuple(folds))


def write_branches_csv(result: PowerSweepResult, path):
    """One row per (sweep value, branch id, root, stability flag)."""
    rows = []
    for br in result.branches:
        for v, x, s in zip(br.sweep_values, br.x, br.stable):
            rows.append((v, br.branch_id, x, s))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("power_w,branch_id,n_photon,stable\n")
        for v, bid, x, s in rows:
            fh.write(f"{v:.17g},{bid},{x:.17g},{int(s)}\n")


def folds_json(result: PowerSweepResult) -> str:
    return json.dumps({
        "folds": [
            {"power_w": f.sweep_value, "count_before": f.count_before,
             "count_after": f.count_after}
            for f in result.folds
        ],
        "max_root_count": int(result.root_counts.max()),
    }, indent=2, sort_keys=True)


@dataclass(frozen=True)
class FoldShift:
    """Displacement of the topmost branch's birth fold between two detunings."""

    delta_a_pair: tuple
    fold_powers: tuple  # [W]
    fold_photons: tuple
    power_shift_rel: float
    photon_shift_rel: float


@dataclass(frozen=True)
class DetuningRobustness:
    with_ck: FoldShift
    without_ck: FoldShift
    ck_more_robust: bool


def _topmost_birth_fold(sys, delta_a, powers):
    """(fold power, tangency photon number) where the topmost branch is born."""
    omega_c = sys.omega_a - delta_a
    counts = np.array([_root_count(sys, delta_a, p, omega_c) for p in powers])
    cmax = counts.max()
    if cmax < 3:
        raise FoldNotFoundError(
            f"no multistability inside the scanned power range at "
            f"delta_a={delta_a:.6e} (max root count {cmax})"
        )
    onset = np.nonzero(counts == cmax)[0][0]
    if onset == 0:
        raise FoldNotFoundError("scan must start below the multistable window")
    p_fold = _bisect_fold(sys, delta_a, omega_c, powers[onset - 1], powers[onset],
                          counts[onset - 1])
    # Just above the fold the newborn pair is the closest adjacent root pair.
    eps_c = rabi_from_power(p_fold * (1.0 + 1e-3), sys.kappa, omega_c)
    roots = steady_photon_numbers(sys, delta_a, eps_c)
    gaps = np.diff(roots) / roots[1:]
    k = int(np.argmin(gaps))
    return p_fold, 0.5 * (roots[k] + roots[k + 1])


def detuning_robustness(sys: SystemParams, powers, delta_a_pair) -> DetuningRobustness:
    """Compare the fold displacement under a detuning change, with/without CK.

    For each coupling case the birth fold of the topmost branch is located at
    both detunings; the reported displacements are relative shifts of the fold
    power and of the fold photon number.  The control frequency is tied to the
    detuning as omega_c = omega_a - delta_a.
    """
    powers = np.asarray(powers, dtype=float)
    d1, d2 = float(delta_a_pair[0]), float(delta_a_pair[1])
    shifts = {}
    for label, system in (("with", sys), ("without", replace(sys, g_ck=0.0))):
        p1, x1 = _topmost_birth_fold(system, d1, powers)
        p2, x2 = _topmost_birth_fold(system, d2, powers)
        shifts[label] = FoldShift(
            delta_a_pair=(d1, d2),
            fold_powers=(p1, p2),
            fold_photons=(x1, x2),
            power_shift_rel=abs(p2 - p1) / p1,
            photon_shift_rel=abs(x2 - x1) / x1,
        )
    return DetuningRobustness(
        with_ck=shifts["with"],
        without_ck=shifts["without"],
        ck_more_robust=shifts["with"].photon_shift_rel < shifts["without"].photon_shift_rel,
    )


@dataclass(frozen=True)
class CkShiftScan:
    """Zero-absorption point as a function of the cross-Kerr coupling."""

    g_ck_values: np.ndarray
    delta_p0: np.ndarray
    monotone: bool

    def rows(self):
        return list(zip(self.g_ck_values, self.delta_p0))


def ck_shift_scan(sys: SystemParams, drive: DriveParams, g_ck_values,
                  branch="lowest", aminus_probe_term: bool = True) -> CkShiftScan:
    """Zero-absorption point per cross-Kerr coupling value [rad/s]."""
    values = np.asarray(g_ck_values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("g_ck values must be a nonempty 1-D array")
    if np.any(np.diff(values) < 0):
        raise ValueError("g_ck values must be sorted ascending")
    points = []
    for g_ck in values:
        system = replace(sys, g_ck=float(g_ck))
        points.append(zero_absorption_point(system, drive, branch=branch,
                                            aminus_probe_term=aminus_probe_term))
    points = np.array(points)
    deltas = np.diff(points)
    # Duplicate couplings contribute zero steps and do not break monotonicity.
    keep = np.diff(values) > 0
    deltas = deltas[keep]
    monotone = bool(np.all(deltas > 0) or np.all(deltas < 0)) if deltas.size else True
    return CkShiftScan(g_ck_values=values, delta_p0=points, monotone=monotone)
