"""Command-line front end.

All numerical inputs are dimensionless multiples of the mass scale:
energies and the inverse lengths ``a, b, c, d`` in units of ``m``, the
couplings ``cs, cv`` in units of ``m^2``.  Outputs are reported the same way,
so changing ``--mass`` must leave every table unchanged.

Settings come from defaults, then an optional flat ``key = value`` file
(``--config``), then flags.  Every run echoes its resolved settings as
``# key = value`` comment lines, which ``load_config`` reads back.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from .bound_states import (detm_bound, find_bound_states, solve_scalar_strength,
                           solve_vector_strength)
from .errors import PoleProximityError, PTDiracError
from .kernel import Geometry, PotentialSpec, Yamaguchi
from .kinematics import make_scattering_kinematics
from .nonrel import NRCase, nr_scatter
from .scattering import (determinant_identity_residual, dual_path_residual, parity_flip_check,
                         scatter, unitarity_residual)

CHECK_TOL = 1e-8


class ConfigError(ValueError):
    """Invalid or inconsistent settings."""


def _parse_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_floats(text) -> tuple[float, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(repr(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class Option:
    type: Callable
    default: object
    help: str
    choices: tuple | None = None


OPTIONS: dict[str, Option] = {
    "cs": Option(float, 0.0, "scalar coupling, units of m^2"),
    "cv": Option(float, 0.0, "vector coupling, units of m^2"),
    "a": Option(float, 0.0, "phase of the x factor, units of m"),
    "b": Option(float, 0.0, "phase of the y factor, units of m"),
    "c": Option(float, 1.0, "decay of g, units of m"),
    "d": Option(float, 1.0, "decay of h, units of m"),
    "mass": Option(float, 1.0, "mass scale m"),
    "format": Option(str, "csv", "output format", ("csv", "json")),
    "emin": Option(float, -5.0, "lowest energy, units of m"),
    "emax": Option(float, 5.0, "highest energy, units of m"),
    "points": Option(int, 400, "number of grid points"),
    "mode": Option(str, "relativistic", "sweep engine",
                   ("relativistic", "nr-spin", "nr-pseudospin")),
    "exclude_gap": Option(_parse_bool, True, "drop energies in (-m-delta, m+delta)"),
    "gap_delta": Option(float, 1e-6, "half-width margin of the excluded band, units of m"),
    "edge_inset": Option(float, 1e-6, "distance kept from E = +-m in bound searches, units of m"),
    "grid_points": Option(int, 2048, "scan points for the bound-state search"),
    "tol": Option(float, 1e-12, "root tolerance in energy, units of m"),
    "energy": Option(float, None, "energy, units of m"),
    "case": Option(str, "spin", "decoupling case", ("spin", "pseudospin")),
    "solve_for": Option(str, "cv", "coupling to solve for; the other stays fixed", ("cv", "cs")),
    "k": Option(_parse_floats, (0.2, 0.1, 0.05), "comma-separated momenta, units of m"),
}

SPEC_KEYS = ("cs", "cv", "a", "b", "c", "d", "mass")
COMMAND_KEYS = {
    "sweep": SPEC_KEYS + ("emin", "emax", "points", "mode", "exclude_gap", "gap_delta", "format"),
    "bound": SPEC_KEYS + ("edge_inset", "grid_points", "tol", "format"),
    "solve-strength": SPEC_KEYS + ("energy", "solve_for", "format"),
    "check": SPEC_KEYS + ("energy", "format"),
    "detscan": SPEC_KEYS + ("points", "edge_inset", "format"),
    "nrlimit": ("cv", "a", "b", "c", "d", "mass", "case", "k", "format"),
}


def _coerce(key: str, raw):
    opt = OPTIONS[key]
    try:
        value = opt.type(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from None
    if opt.choices and value not in opt.choices:
        raise ConfigError(f"{key}: {value!r} not in {', '.join(opt.choices)}")
    if isinstance(value, float) and not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    return value


# free-text notes in an echoed header ("1 state: E=...") are not settings
_SETTING_LINE = re.compile(r"^\s*[A-Za-z_][A-Za-z0-9_-]*\s*=")


def load_config(source: str | TextIO) -> dict:
    """Read a flat ``key = value`` file; ``#``-prefixed header echoes are accepted too."""
    text = source.read() if hasattr(source, "read") else open(source, encoding="utf-8").read()
    lines = []
    for line in text.splitlines():
        stripped = line.lstrip("#").strip() if line.startswith("#") else line
        if _SETTING_LINE.match(stripped):
            lines.append(stripped)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read_string("[ptdirac]\n" + "\n".join(lines))
    out = {}
    for key, raw in parser["ptdirac"].items():
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError(f"unknown config key {key!r}")
        out[key] = _coerce(key, raw)
    return out


def resolve_settings(command: str, flags: dict, file_values: dict | None = None) -> dict:
    """Merge defaults, file values and flags for one command, in that precedence."""
    settings = {}
    for key in COMMAND_KEYS[command]:
        value = OPTIONS[key].default
        if file_values and key in file_values:
            value = file_values[key]
        if flags.get(key) is not None:
            value = _coerce(key, flags[key])
        if value is None:
            raise ConfigError(f"{command}: --{key.replace('_', '-')} is required")
        settings[key] = value
    if settings["mass"] <= 0:
        raise ConfigError("mass must be positive")
    for key in ("c", "d"):
        if key in settings and settings[key] <= 0:
            raise ConfigError(f"{key} must be positive (decay of the form factor)")
    return settings


def spec_from_settings(settings: dict) -> PotentialSpec:
    """Physical ``PotentialSpec`` from dimensionless settings."""
    m = settings["mass"]
    return PotentialSpec(settings.get("cs", 0.0) * m * m, settings.get("cv", 0.0) * m * m,
                         settings["a"] * m, settings["b"] * m,
                         Yamaguchi(settings["c"] * m), Yamaguchi(settings["d"] * m))


@dataclass(frozen=True)
class SweepConfig:
    """Energy-sweep settings; ``spec`` is in physical units."""

    spec: PotentialSpec
    e_min: float
    e_max: float
    points: int
    exclude_gap: bool = True
    output: str = "csv"
    mode: str = "relativistic"
    gap_delta: float = 1e-6
    mass: float = 1.0

    def __post_init__(self):
        if self.points < 2:
            raise ConfigError(f"points must be >= 2, got {self.points}")
        if not self.e_min < self.e_max:
            raise ConfigError(f"emin ({self.e_min}) must be below emax ({self.e_max})")
        if self.gap_delta <= 0:
            raise ConfigError("gap_delta must be positive")
        if self.mode == "nr-spin" and self.spec.cv != self.spec.cs:
            raise ConfigError("nr-spin requires cv == cs")
        if self.mode == "nr-pseudospin" and self.spec.cv != -self.spec.cs:
            raise ConfigError("nr-pseudospin requires cv == -cs")
        if not self.exclude_gap:
            grid = self.energies()
            if np.any(np.abs(grid) < 1 + self.gap_delta):
                raise ConfigError(
                    "grid meets the band |E| < m + gap_delta; enable exclude_gap "
                    "or choose emin/emax outside it")

    @classmethod
    def from_settings(cls, settings: dict) -> "SweepConfig":
        return cls(spec_from_settings(settings), settings["emin"], settings["emax"],
                   settings["points"], settings["exclude_gap"], settings["format"],
                   settings["mode"], settings["gap_delta"], settings["mass"])

    def to_settings(self) -> dict:
        m = self.mass
        sp = self.spec
        return {"cs": sp.cs / m ** 2, "cv": sp.cv / m ** 2, "a": sp.a / m, "b": sp.b / m,
                "c": sp.g.decay / m, "d": sp.h.decay / m, "mass": m,
                "emin": self.e_min, "emax": self.e_max, "points": self.points,
                "mode": self.mode, "exclude_gap": self.exclude_gap,
                "gap_delta": self.gap_delta, "format": self.output}

    def energies(self) -> np.ndarray:
        """Grid in units of m."""
        return np.linspace(self.e_min, self.e_max, self.points)


# ---------------------------------------------------------------------------
# Table emission
# ---------------------------------------------------------------------------

class Table:
    """Rows plus comment lines, rendered as CSV or JSON."""

    def __init__(self, command: str, settings: dict, columns: list[str]):
        self.command, self.settings, self.columns = command, settings, columns
        self.rows, self.comments = [], []

    def comment(self, text: str) -> None:
        self.comments.append(text)

    def add(self, *values) -> None:
        self.rows.append(list(values))

    @staticmethod
    def _cell(v) -> str:
        if isinstance(v, (float, np.floating)):
            return f"{float(v):.12e}"
        return str(v)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            payload = {
                "command": self.command,
                "config": {k: _fmt_value(v) for k, v in self.settings.items()},
                "comments": self.comments,
                "columns": self.columns,
                "rows": [[self._cell(v) if isinstance(v, (float, np.floating)) else v
                          for v in row] for row in self.rows],
            }
            return json.dumps(payload, indent=1) + "\n"
        buf = io.StringIO()
        buf.write(f"# ptdirac {self.command}\n")
        for key, value in self.settings.items():
            buf.write(f"# {key} = {_fmt_value(value)}\n")
        for text in self.comments:
            buf.write(f"# {text}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(self._cell(v) for v in row) + "\n")
        return buf.getvalue()


def _emit(table: Table, out: TextIO) -> None:
    out.write(table.render(table.settings["format"]))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = ["E_over_m", "T_sq", "R_LR_sq", "R_RL_sq", "LR_sum", "RL_sum", "abs_det_S",
                 "pt_det_S", "pt_T_gap", "pt_R_phase"]


def _sweep_row(cfg: SweepConfig, e: float):
    m = cfg.mass
    if cfg.mode == "relativistic":
        res = scatter(cfg.spec, make_scattering_kinematics(e * m, m))
    else:
        if e < 0:
            return None
        k = math.sqrt((e * m - m) * (e * m + m))
        case = NRCase("spin" if cfg.mode == "nr-spin" else "pseudospin", cfg.spec.cv)
        res = nr_scatter(case, cfg.spec.geometry, k, m)
    diag = res.diagnostics
    t2 = abs(res.t_lr) ** 2
    rl2, rr2 = abs(res.r_lr) ** 2, abs(res.r_rl) ** 2
    return [e, t2, rl2, rr2, t2 + rl2, abs(res.t_rl) ** 2 + rr2,
            abs(np.linalg.det(res.s_matrix)), diag.det_s_modulus_minus_one,
            diag.t_modulus_gap, diag.reflection_phase_residual]


def run_sweep(cfg: SweepConfig, out: TextIO) -> int:
    """Scattering observables on an energy grid; the band around the gap is skipped."""
    table = Table("sweep", cfg.to_settings(), SWEEP_COLUMNS)
    grid = cfg.energies()
    band = np.abs(grid) < 1 + cfg.gap_delta
    if np.any(band):
        table.comment(f"skipped {int(band.sum())} energies in the band "
                      f"|E| < (1 + {cfg.gap_delta!r}) m")
    negative = 0
    for e, skip in zip(grid, band):
        if skip:
            continue
        row = _sweep_row(cfg, float(e))
        if row is None:
            negative += 1
            continue
        table.add(*row)
    if negative:
        table.comment(f"skipped {negative} energies below -m: no non-relativistic limit there")
    _emit(table, out)
    return 0


def run_bound(spec: PotentialSpec, settings: dict, out: TextIO) -> int:
    m = settings["mass"]
    states = find_bound_states(spec, settings["grid_points"], settings["tol"] * m,
                               settings["edge_inset"], m)
    table = Table("bound", settings,
                  ["E_over_m", "kbar_over_m", "det_residual", "pt_residual", "i_plus_ratio"])
    energies = ", ".join(f"E={s.energy / m:.6f}m" for s in states)
    table.comment(f"{len(states)} state{'s' if len(states) != 1 else ''}"
                  + (f": {energies}" if states else ""))
    for s in states:
        table.add(s.energy / m, s.kbar / m, s.det_residual, s.pt_residual, s.i_plus_ratio)
    _emit(table, out)
    return 0


def run_solve_strength(geom: Geometry, settings: dict, out: TextIO) -> int:
    """Both couplings binding at the requested energy, with round-trip residuals."""
    m = settings["mass"]
    E = settings["energy"] * m
    unknown = settings["solve_for"]
    if unknown == "cv":
        fixed = settings["cs"] * m * m
        roots = solve_vector_strength(geom, E, m, cs=fixed)
    else:
        fixed = settings["cv"] * m * m
        roots = solve_scalar_strength(geom, E, m, cv=fixed)
    table = Table("solve-strength", settings, ["root", f"{unknown}_over_m2", "det_residual"])
    if not roots.is_real:
        z = roots.plus / m ** 2
        table.comment(f"complex-roots: {unknown}/m^2 = {z.real:.12e} +- {abs(z.imag):.12e}i")
    for name, value in (("plus", roots.plus), ("minus", roots.minus)):
        if not roots.is_real:
            break
        c = value.real
        cs, cv = (fixed, c) if unknown == "cv" else (c, fixed)
        spec = PotentialSpec.from_geometry(geom, cs, cv)
        table.add(name, c / m ** 2, abs(detm_bound(spec, E, m)))
    _emit(table, out)
    return 0


def run_check(spec: PotentialSpec, settings: dict, out: TextIO, tol: float = CHECK_TOL) -> int:
    """PT relations, parity, dual-path and determinant identities at one energy.

    Exit code 1 if any residual exceeds ``tol``.
    """
    m = settings["mass"]
    kin = make_scattering_kinematics(settings["energy"] * m, m)
    res = scatter(spec, kin)
    diag = res.diagnostics
    checks = [("det_S_modulus", diag.det_s_modulus_minus_one),
              ("T_modulus_gap", diag.t_modulus_gap),
              ("R_phase", diag.reflection_phase_residual),
              ("parity_flip", parity_flip_check(spec, kin)),
              ("det_identity", determinant_identity_residual(spec, kin)),
              ("dual_path", dual_path_residual(spec, kin))]
    if spec.is_hermitian:
        checks.append(("unitarity", unitarity_residual(res)))
    table = Table("check", settings, ["check", "residual", "status"])
    failed = 0
    for name, value in checks:
        ok = bool(abs(value) <= tol)
        failed += not ok
        table.add(name, float(abs(value)), "pass" if ok else "FAIL")
    table.comment(f"{len(checks) - failed}/{len(checks)} checks within {tol:g}")
    _emit(table, out)
    return 1 if failed else 0


def _det_or_nan(spec: PotentialSpec, E: float, m: float) -> float:
    try:
        return float(detm_bound(spec, E, m))
    except PoleProximityError:
        return math.nan


def run_detscan(spec: PotentialSpec, settings: dict, out: TextIO) -> int:
    m = settings["mass"]
    inset = settings["edge_inset"]
    if settings["points"] < 2:
        raise ConfigError("points must be >= 2")
    grid = np.linspace(-1 + inset, 1 - inset, settings["points"])
    table = Table("detscan", settings, ["E_over_m", "det_M_plus"])
    try:
        values = detm_bound(spec, grid * m, m)
    except PoleProximityError:
        # a = 0 (or b = 0) puts a kernel pole on the grid; evaluate pointwise around it
        values = np.array([_det_or_nan(spec, e * m, m) for e in grid])
        table.comment(f"{int(np.isnan(values).sum())} grid point(s) on a kernel pole: nan")
    for e, v in zip(grid, values):
        table.add(float(e), float(v))
    _emit(table, out)
    return 0


def run_nrlimit(settings: dict, out: TextIO) -> int:
    """Coefficient-wise gap between the relativistic and non-relativistic engines."""
    m = settings["mass"]
    case = NRCase(settings["case"], settings["cv"] * m * m)
    cs, cv = case.couplings()
    spec = spec_from_settings({**settings, "cs": cs / m ** 2, "cv": cv / m ** 2})
    table = Table("nrlimit", settings,
                  ["k_over_m", "E_over_m", "gap_T_LR", "gap_R_LR", "gap_T_RL", "gap_R_RL",
                   "max_gap"])
    for k in settings["k"]:
        km = k * m
        E = math.sqrt(km * km + m * m)
        rel = scatter(spec, make_scattering_kinematics(E, m))
        nr = nr_scatter(case, spec.geometry, km, m)
        gaps = [abs(getattr(rel, f) - getattr(nr, f)) for f in ("t_lr", "r_lr", "t_rl", "r_rl")]
        table.add(k, E / m, *gaps, max(gaps))
    _emit(table, out)
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptdirac",
        description="Scattering and bound states of the 1+1 Dirac equation with a "
                    "separable PT-symmetric kernel.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sweep": "transmission/reflection over an energy grid",
        "bound": "real bound-state energies",
        "solve-strength": "vector couplings binding at a given energy",
        "check": "PT and consistency residuals at one energy",
        "detscan": "det M+ across the gap",
        "nrlimit": "relativistic vs non-relativistic amplitudes at small k",
    }
    for command, keys in COMMAND_KEYS.items():
        p = sub.add_parser(command, help=helps[command])
        for key in keys:
            opt = OPTIONS[key]
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                           help=f"{opt.help} (default: {_fmt_value(opt.default)})")
        p.add_argument("--config", help="flat key = value settings file")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
    return parser


def dispatch(command: str, settings: dict, out: TextIO) -> int:
    if command == "sweep":
        return run_sweep(SweepConfig.from_settings(settings), out)
    if command == "nrlimit":
        return run_nrlimit(settings, out)
    if command == "solve-strength":
        return run_solve_strength(spec_from_settings(settings).geometry, settings, out)
    spec = spec_from_settings(settings)
    runner = {"bound": run_bound, "check": run_check, "detscan": run_detscan}[command]
    return runner(spec, settings, out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = vars(args)
    try:
        file_values = load_config(args.config) if args.config else None
        settings = resolve_settings(args.command, flags, file_values)
        if args.out == "-":
            return dispatch(args.command, settings, sys.stdout)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            return dispatch(args.command, settings, fh)
    except (ConfigError, PTDiracError, OSError) as exc:
        print(f"ptdirac {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
