"""Command-line front end: config parsing, dispatch, figure-ready datasets.

Config files are flat ``key = value`` INI text with bracketed sections.  Every
frequency-like key is stored internally in rad/s and may be written either
bare (already angular) or with the ``_over_2pi_hz`` suffix, which multiplies
by 2*pi at parse time; supplying both spellings of one key is an error, as is
any unknown key or section.  Outputs are written atomically (temp file +
rename), contain no timestamps, and format floats with ``%.17g`` so identical
configs produce byte-identical files.

Exit codes: 0 success, 2 config error, 3 solver error, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys as _sys
import tempfile
from dataclasses import dataclass, field, replace

import numpy as np

from . import dynamics, response, stability, sweep
from .errors import ConfigError, OptokerrError
from .model import DriveParams, SystemParams, rabi_from_power

_TWO_PI = 2.0 * math.pi


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Section:
    """One config section with marker-aware reads and unknown-key rejection."""

    def __init__(self, name, items):
        self.name = name
        self.items = dict(items)
        self.seen = set()

    def freq(self, base, default=None):
        """Frequency-like value in rad/s; accepts ``base`` or ``base_over_2pi_hz``."""
        marker = base + "_over_2pi_hz"
        if base in self.items and marker in self.items:
            raise ConfigError(
                f"[{self.name}] defines both '{base}' and '{marker}'; pick one"
            )
        if marker in self.items:
            self.seen.add(marker)
            return _TWO_PI * self._float(marker)
        if base in self.items:
            self.seen.add(base)
            return self._float(base)
        if default is None:
            raise ConfigError(f"[{self.name}] is missing required key '{base}'")
        return default

    def _float(self, key):
        raw = self.items[key]
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key} = {raw!r} is not a number") from exc

    def value(self, key, cast=float, default=None):
        if key not in self.items:
            if default is None:
                raise ConfigError(f"[{self.name}] is missing required key '{key}'")
            return default
        self.seen.add(key)
        raw = self.items[key]
        try:
            if cast is bool:
                low = raw.strip().lower()
                if low in ("on", "true", "yes", "1"):
                    return True
                if low in ("off", "false", "no", "0"):
                    return False
                raise ValueError(raw)
            return cast(raw)
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key} = {raw!r} is invalid") from exc

    def reject_unknown(self):
        unknown = set(self.items) - self.seen
        if unknown:
            raise ConfigError(
                f"[{self.name}] has unknown key(s): {', '.join(sorted(unknown))}"
            )


@dataclass(frozen=True)
class SpectrumConfig:
    delta_p_min_over_omega_m: float = -0.5
    delta_p_max_over_omega_m: float = 0.5
    n_points: int = 1001
    branch: str = "lowest"
    aminus_probe_term: bool = True


@dataclass(frozen=True)
class SweepConfig:
    mode: str = "power"
    power_min_w: float = 1e-12
    power_max_w: float = 5e-8
    n_points: int = 2001
    g_ck_values: tuple = ()
    delta_a_pair_over_omega_m: tuple = (1.0, 0.8)


@dataclass(frozen=True)
class SettleConfig:
    t_end_s: float = 0.0  # 0 -> library default
    rtol: float = 1e-10
    n_ensemble: int = 0
    seed: int = 1234
    a0: complex = 0j
    b0: complex = 0j


@dataclass(frozen=True)
class RunConfig:
    """Parsed run configuration; all frequencies in rad/s."""

    system: SystemParams
    drive: DriveParams
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    settle: SettleConfig = field(default_factory=SettleConfig)

    @property
    def omega_c(self) -> float:
        return self.system.omega_a - self.drive.delta_a

    def to_text(self) -> str:
        """Canonical serialization; parsing it reproduces this config."""
        s, d = self.system, self.drive
        sp, sw, st = self.spectrum, self.sweep, self.settle
        lines = [
            "[system]",
            f"omega_a = {_fmt(s.omega_a)}",
            f"omega_m = {_fmt(s.omega_m)}",
            f"g0 = {_fmt(s.g0)}",
            f"g_ck = {_fmt(s.g_ck)}",
            f"kappa = {_fmt(s.kappa)}",
            f"gamma = {_fmt(s.gamma)}",
            "",
            "[drive]",
            f"delta_a = {_fmt(d.delta_a)}",
            f"eps_c = {_fmt(d.eps_c)}",
            f"eps_p = {_fmt(d.eps_p)}",
            f"delta_p = {_fmt(d.delta_p)}",
            "",
            "[spectrum]",
            f"delta_p_min_over_omega_m = {_fmt(sp.delta_p_min_over_omega_m)}",
            f"delta_p_max_over_omega_m = {_fmt(sp.delta_p_max_over_omega_m)}",
            f"n_points = {sp.n_points}",
            f"branch = {sp.branch}",
            f"aminus_probe_term = {'on' if sp.aminus_probe_term else 'off'}",
            "",
            "[sweep]",
            f"mode = {sw.mode}",
            f"power_min_w = {_fmt(sw.power_min_w)}",
            f"power_max_w = {_fmt(sw.power_max_w)}",
            f"n_points = {sw.n_points}",
        ]
        if sw.g_ck_values:
            lines.append("g_ck_values = " + ",".join(_fmt(v) for v in sw.g_ck_values))
        lines.append("delta_a_pair_over_omega_m = "
                     + ",".join(_fmt(v) for v in sw.delta_a_pair_over_omega_m))
        lines += [
            "",
            "[settle]",
            f"t_end_s = {_fmt(st.t_end_s)}",
            f"rtol = {_fmt(st.rtol)}",
            f"n_ensemble = {st.n_ensemble}",
            f"seed = {st.seed}",
            f"a0_re = {_fmt(st.a0.real)}",
            f"a0_im = {_fmt(st.a0.imag)}",
            f"b0_re = {_fmt(st.b0.real)}",
            f"b0_im = {_fmt(st.b0.imag)}",
            "",
        ]
        return "\n".join(lines)


_KNOWN_SECTIONS = ("system", "drive", "spectrum", "sweep", "settle")


def parse_config(text: str) -> RunConfig:
    """Parse INI config text into a :class:`RunConfig`.

    Raises :class:`ConfigError` with a line diagnostic for malformed text and
    with the offending key for unknown or contradictory entries.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    unknown_sections = set(parser.sections()) - set(_KNOWN_SECTIONS)
    if unknown_sections:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown_sections))}")
    if "system" not in parser or "drive" not in parser:
        raise ConfigError("config requires [system] and [drive] sections")

    sec = _Section("system", parser.items("system"))
    try:
        system = SystemParams(
            omega_a=sec.freq("omega_a"),
            omega_m=sec.freq("omega_m"),
            g0=sec.freq("g0"),
            g_ck=sec.freq("g_ck", default=0.0),
            kappa=sec.freq("kappa"),
            gamma=sec.freq("gamma"),
        )
    except ValueError as exc:
        raise ConfigError(f"[system] invalid parameters: {exc}") from exc
    sec.reject_unknown()

    dsec = _Section("drive", parser.items("drive"))
    delta_a = dsec.freq("delta_a")
    omega_c = system.omega_a - delta_a
    if omega_c <= 0:
        raise ConfigError("delta_a implies a nonpositive control frequency")
    has_eps_c = "eps_c" in dsec.items or "eps_c_over_2pi_hz" in dsec.items
    has_pc = "power_c_w" in dsec.items
    if has_eps_c and has_pc:
        raise ConfigError("[drive] defines both eps_c and power_c_w; pick one")
    if has_pc:
        eps_c = rabi_from_power(dsec.value("power_c_w"), system.kappa, omega_c)
    elif has_eps_c:
        eps_c = dsec.freq("eps_c")
    else:
        raise ConfigError("[drive] needs eps_c or power_c_w")
    has_eps_p = "eps_p" in dsec.items or "eps_p_over_2pi_hz" in dsec.items
    has_pp = "power_p_w" in dsec.items
    if has_eps_p and has_pp:
        raise ConfigError("[drive] defines both eps_p and power_p_w; pick one")
    if has_pp:
        eps_p = rabi_from_power(dsec.value("power_p_w"), system.kappa, omega_c)
    else:
        eps_p = dsec.freq("eps_p", default=0.0)
    try:
        drive = DriveParams(delta_a=delta_a, eps_c=eps_c, eps_p=eps_p,
                            delta_p=dsec.freq("delta_p", default=0.0))
    except ValueError as exc:
        raise ConfigError(f"[drive] invalid parameters: {exc}") from exc
    dsec.reject_unknown()

    spectrum = SpectrumConfig()
    if "spectrum" in parser:
        ssec = _Section("spectrum", parser.items("spectrum"))
        branch = ssec.value("branch", cast=str, default="lowest")
        if branch != "lowest":
            try:
                int(branch)
            except ValueError:
                raise ConfigError("[spectrum] branch must be 'lowest' or an integer")
        spectrum = SpectrumConfig(
            delta_p_min_over_omega_m=ssec.value("delta_p_min_over_omega_m", default=-0.5),
            delta_p_max_over_omega_m=ssec.value("delta_p_max_over_omega_m", default=0.5),
            n_points=ssec.value("n_points", cast=int, default=1001),
            branch=branch,
            aminus_probe_term=ssec.value("aminus_probe_term", cast=bool, default=True),
        )
        ssec.reject_unknown()
        if spectrum.n_points < 1:
            raise ConfigError("[spectrum] n_points must be positive")

    sweep_cfg = SweepConfig()
    if "sweep" in parser:
        wsec = _Section("sweep", parser.items("sweep"))
        mode = wsec.value("mode", cast=str, default="power")
        if mode not in ("power", "ck_shift", "detuning_robustness"):
            raise ConfigError(f"[sweep] unknown mode {mode!r}")
        g_ck_values = ()
        if "g_ck_values" in wsec.items:
            raw = wsec.value("g_ck_values", cast=str)
            try:
                g_ck_values = tuple(float(v) for v in raw.split(","))
            except ValueError:
                raise ConfigError("[sweep] g_ck_values must be comma-separated numbers")
        pair = (1.0, 0.8)
        if "delta_a_pair_over_omega_m" in wsec.items:
            raw = wsec.value("delta_a_pair_over_omega_m", cast=str)
            parts = raw.split(",")
            if len(parts) != 2:
                raise ConfigError("[sweep] delta_a_pair_over_omega_m needs two values")
            try:
                pair = (float(parts[0]), float(parts[1]))
            except ValueError:
                raise ConfigError("[sweep] delta_a_pair_over_omega_m must be numeric")
        sweep_cfg = SweepConfig(
            mode=mode,
            power_min_w=wsec.value("power_min_w", default=1e-12),
            power_max_w=wsec.value("power_max_w", default=5e-8),
            n_points=wsec.value("n_points", cast=int, default=2001),
            g_ck_values=g_ck_values,
            delta_a_pair_over_omega_m=pair,
        )
        wsec.reject_unknown()
        if sweep_cfg.n_points < 2:
            raise ConfigError("[sweep] n_points must be at least 2")

    settle_cfg = SettleConfig()
    if "settle" in parser:
        tsec = _Section("settle", parser.items("settle"))
        settle_cfg = SettleConfig(
            t_end_s=tsec.value("t_end_s", default=0.0),
            rtol=tsec.value("rtol", default=1e-10),
            n_ensemble=tsec.value("n_ensemble", cast=int, default=0),
            seed=tsec.value("seed", cast=int, default=1234),
            a0=complex(tsec.value("a0_re", default=0.0), tsec.value("a0_im", default=0.0)),
            b0=complex(tsec.value("b0_re", default=0.0), tsec.value("b0_im", default=0.0)),
        )
        tsec.reject_unknown()

    return RunConfig(system=system, drive=drive, spectrum=spectrum,
                     sweep=sweep_cfg, settle=settle_cfg)


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def cmd_roots(config: RunConfig, out_dir: str, fmt: str = "csv") -> int:
    """Solve and classify all steady states; write a roots table."""
    pairs = stability.classify_roots(config.system, config.drive.delta_a,
                                     config.drive.eps_c)
    pattern = stability.stability_pattern([r for _, r in pairs])
    rows = []
    for ss, rep in pairs:
        rows.append({
            "n_photon": ss.n_photon,
            "n_phonon": ss.n_phonon,
            "delta_rad_s": ss.Delta,
            "verdict": rep.verdict,
            "margin_rad_s": rep.margin,
        })
        print(f"x = {_fmt(ss.n_photon)}  n_b = {_fmt(ss.n_phonon)}  "
              f"Delta = {_fmt(ss.Delta)}  {rep.verdict}  margin = {_fmt(rep.margin)}")
    if not stability.pattern_is_generic(pattern):
        print(f"note: stability pattern {pattern!r} deviates from the generic "
              "alternating fold structure")
    if fmt == "json":
        _write_atomic(os.path.join(out_dir, "roots.json"),
                      json.dumps({"pattern": pattern, "roots": rows},
                                 indent=2, sort_keys=True) + "\n")
    else:
        lines = ["n_photon,n_phonon,delta_rad_s,verdict,margin_rad_s"]
        for r in rows:
            lines.append(f"{_fmt(r['n_photon'])},{_fmt(r['n_phonon'])},"
                         f"{_fmt(r['delta_rad_s'])},{r['verdict']},{_fmt(r['margin_rad_s'])}")
        _write_atomic(os.path.join(out_dir, "roots.csv"), "\n".join(lines) + "\n")
    return 0


def cmd_spectrum(config: RunConfig, out_dir: str, fmt: str = "csv") -> int:
    """Absorption/dispersion spectrum plus a JSON sidecar with the zero crossing."""
    sp = config.spectrum
    branch = sp.branch if sp.branch == "lowest" else int(sp.branch)
    wm = config.system.omega_m
    grid = np.linspace(sp.delta_p_min_over_omega_m * wm,
                       sp.delta_p_max_over_omega_m * wm, sp.n_points)
    points = response.absorption_spectrum(config.system, config.drive, grid,
                                          branch=branch,
                                          aminus_probe_term=sp.aminus_probe_term)
    lines = ["delta_p_over_omega_m,re_eps_t,im_eps_t"]
    for pt in points:
        lines.append(f"{_fmt(pt.delta_p_reduced)},{_fmt(pt.absorption)},"
                     f"{_fmt(pt.dispersion)}")
    _write_atomic(os.path.join(out_dir, "spectrum.csv"), "\n".join(lines) + "\n")

    summary = {"n_points": sp.n_points, "aminus_probe_term": sp.aminus_probe_term}
    try:
        dp0 = response.zero_absorption_point(config.system, config.drive,
                                             branch=branch,
                                             aminus_probe_term=sp.aminus_probe_term)
        summary["delta_p0_rad_s"] = dp0
        summary["delta_p0_over_omega_m"] = dp0 / wm
    except OptokerrError as exc:
        summary["delta_p0_rad_s"] = None
        summary["delta_p0_error"] = str(exc)
    report = response.aplus_discrepancy_report(
        config.system, config.drive, grid, branch=branch,
        aminus_probe_term=sp.aminus_probe_term)
    summary["aplus_closed_form_agree"] = report.agree
    summary["aplus_closed_form_max_rel_diff"] = report.max_rel_diff
    _write_atomic(os.path.join(out_dir, "spectrum_summary.json"),
                  json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_sweep(config: RunConfig, out_dir: str, fmt: str = "csv") -> int:
    """Power sweep, cross-Kerr shift scan, or detuning-robustness comparison."""
    sw = config.sweep
    if sw.mode == "power":
        powers = np.linspace(sw.power_min_w, sw.power_max_w, sw.n_points)
        result = sweep.power_sweep(config.system, config.drive.delta_a, powers,
                                   config.omega_c)
        sweep.write_branches_csv(result, os.path.join(out_dir, "sweep_branches.csv"))
        _write_atomic(os.path.join(out_dir, "sweep_folds.json"),
                      sweep.folds_json(result) + "\n")
    elif sw.mode == "ck_shift":
        values = sw.g_ck_values or (config.system.g_ck,)
        scan = sweep.ck_shift_scan(config.system, config.drive,
                                   np.asarray(values, dtype=float),
                                   aminus_probe_term=config.spectrum.aminus_probe_term)
        lines = ["g_ck_rad_s,delta_p0_rad_s"]
        for g, d in scan.rows():
            lines.append(f"{_fmt(g)},{_fmt(d)}")
        _write_atomic(os.path.join(out_dir, "ck_shift.csv"), "\n".join(lines) + "\n")
        _write_atomic(os.path.join(out_dir, "ck_shift_summary.json"),
                      json.dumps({"monotone": scan.monotone}, indent=2) + "\n")
    else:
        wm = config.system.omega_m
        pair = tuple(v * wm for v in sw.delta_a_pair_over_omega_m)
        powers = np.linspace(sw.power_min_w, sw.power_max_w, sw.n_points)
        rep = sweep.detuning_robustness(config.system, powers, pair)
        _write_atomic(
            os.path.join(out_dir, "detuning_robustness.json"),
            json.dumps({
                "delta_a_pair_rad_s": list(pair),
                "with_ck": {
                    "fold_powers_w": list(rep.with_ck.fold_powers),
                    "fold_photons": list(rep.with_ck.fold_photons),
                    "power_shift_rel": rep.with_ck.power_shift_rel,
                    "photon_shift_rel": rep.with_ck.photon_shift_rel,
                },
                "without_ck": {
                    "fold_powers_w": list(rep.without_ck.fold_powers),
                    "fold_photons": list(rep.without_ck.fold_photons),
                    "power_shift_rel": rep.without_ck.power_shift_rel,
                    "photon_shift_rel": rep.without_ck.photon_shift_rel,
                },
                "ck_more_robust": rep.ck_more_robust,
            }, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_settle(config: RunConfig, out_dir: str, fmt: str = "csv") -> int:
    """Time-domain relaxation run(s); trajectory CSV plus an endpoint report."""
    st = config.settle
    t_end = st.t_end_s if st.t_end_s > 0 else None
    if st.n_ensemble > 0:
        initials = dynamics.random_initial_states(
            config.system, config.drive.delta_a, config.drive.eps_c,
            st.n_ensemble, seed=st.seed)
    else:
        initials = [(st.a0, st.b0)]
    runs = []
    any_unconverged = False
    for k, initial in enumerate(initials):
        res = dynamics.settle(config.system, config.drive, initial=initial,
                              t_end=t_end, rtol=st.rtol, record=(k == 0))
        if k == 0 and res.trajectory is not None:
            res.trajectory.write_csv(os.path.join(out_dir, "trajectory.csv"))
        entry = {
            "run": k,
            "converged": res.converged,
            "t_final_s": res.t_final,
            "final_n_photon": abs(res.final_state[0]) ** 2,
            "drift": res.drift,
        }
        if res.converged:
            entry["matched_n_photon"] = res.steady_state.n_photon
        else:
            any_unconverged = True
        runs.append(entry)
    histogram = {}
    for entry in runs:
        if entry["converged"]:
            key = _fmt(entry["matched_n_photon"])
            histogram[key] = histogram.get(key, 0) + 1
    _write_atomic(os.path.join(out_dir, "settle_report.json"),
                  json.dumps({"runs": runs, "endpoint_histogram": histogram},
                             indent=2, sort_keys=True) + "\n")
    if any_unconverged:
        print("settle: one or more runs did not converge within t_end")
        return 4
    return 0


_COMMANDS = {
    "roots": cmd_roots,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "settle": cmd_settle,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="optokerr",
        description="Steady states, stability and weak-probe response of a "
                    "two-tone-driven optomechanical cavity with cross-Kerr "
                    "coupling.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="path to an INI run config")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    try:
        return _COMMANDS[args.command](config, args.out, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    except OptokerrError as exc:
        print(f"solver error: {exc}", file=_sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
