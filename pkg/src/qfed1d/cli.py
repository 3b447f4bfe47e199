"""Configuration parsing, command dispatch, and tabular output.

One INI-style config file describes a simulation: the layer stack, the
(position x photon energy) grid, quadrature and solver controls, and which
observables to compute. Every command writes delimiter-separated-values
files (one per observable, ``%.10e`` numbers, LF endings) plus a
``metadata.json`` with the interface positions and the detected LDOS
resonance energies, so a figure renderer needs no physics. Outputs are
byte-deterministic for a given config and package version.

The canonical schema is documented in the README; unknown sections or keys
are rejected to prevent silent misconfiguration.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .constants import CONSTANTS
from .materials import Layer, LayerStack, Material, SpectralGrid
from .observables import OBSERVABLE_NAMES, field_map, ldos_profile, local_maxima
from .quadrature import QuadratureSpec
from .selfconsistent import SolverSpec, solve_cavity_temperatures
from .greens import GreenSolver

__all__ = [
    "ConfigError",
    "LayerConfig",
    "SimulationConfig",
    "parse_config",
    "serialize_config",
    "load_config",
    "run",
    "main",
]

SCHEMA_VERSION = 1

COMMANDS = ("ldos", "temperature", "poynting", "net-emission", "solve-cavity", "all")

_COMMAND_OBSERVABLE = {
    "ldos": "ldos",
    "temperature": "temperature",
    "poynting": "poynting",
    "net-emission": "net_emission",
}

_KNOWN_KEYS = {
    "simulation": {"schema_version", "observables", "output_dir"},
    "stack": {
        "left_index",
        "left_temperature_K",
        "right_index",
        "right_temperature_K",
    },
    "layer": {"index", "thickness_um", "temperature_K"},
    "grid": {
        "x_min_um",
        "x_max_um",
        "x_points",
        "energy_min_eV",
        "energy_max_eV",
        "energy_points",
    },
    "quadrature": {"rel_tol", "abs_floor", "tail_truncation_eps", "max_subdivisions"},
    "solver": {
        "n_cells",
        "q_tol",
        "t_tol_K",
        "max_outer_iterations",
        "underrelaxation",
        "energy_band_eV",
    },
}


class ConfigError(ValueError):
    """Config file failed to parse or validate; message names the field."""


@dataclass(frozen=True)
class LayerConfig:
    index: complex
    thickness_um: float
    temperature_K: float


@dataclass(frozen=True)
class SimulationConfig:
    """Validated simulation description in file units (um, eV, K)."""

    schema_version: int
    observables: tuple[str, ...]
    output_dir: str
    left_index: complex
    left_temperature_K: float
    right_index: complex
    right_temperature_K: float
    layers: tuple[LayerConfig, ...]
    x_min_um: float
    x_max_um: float
    x_points: int
    energy_min_eV: float
    energy_max_eV: float
    energy_points: int
    quadrature: QuadratureSpec
    solver: SolverSpec

    def stack(self) -> LayerStack:
        try:
            layers = tuple(
                Layer(
                    Material.constant(lc.index),
                    lc.thickness_um * 1e-6,
                    lc.temperature_K,
                )
                for lc in self.layers
            )
            return LayerStack(
                Material.constant(self.left_index),
                self.left_temperature_K,
                layers,
                Material.constant(self.right_index),
                self.right_temperature_K,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self) -> SpectralGrid:
        xs = _axis(self.x_min_um, self.x_max_um, self.x_points, "[grid] x") * 1e-6
        es = _axis(
            self.energy_min_eV, self.energy_max_eV, self.energy_points, "[grid] energy"
        )
        try:
            return SpectralGrid(tuple(xs), tuple(es))
        except ValueError as exc:
            raise ConfigError(f"[grid] {exc}") from exc


def _axis(lo: float, hi: float, count: int, label: str) -> np.ndarray:
    if count < 1:
        raise ConfigError(f"{label}_points must be at least 1 (got {count})")
    if count == 1:
        if lo != hi:
            raise ConfigError(f"{label} range must collapse to one value when points = 1")
        return np.array([lo])
    if not hi > lo:
        raise ConfigError(f"{label} range is empty: [{lo}, {hi}]")
    return np.linspace(lo, hi, count)


def _parse_complex(text: str, where: str) -> complex:
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise ConfigError(f"{where}: not a complex number: {text!r}") from exc


def _fmt_complex(z: complex) -> str:
    return f"{z.real!r}{z.imag:+}j".replace("+-", "-") if z.imag else f"{z.real!r}+0j"


class _Section:
    """Typed, strict accessor over one config section."""

    def __init__(self, name: str, items: dict[str, str], known: set[str]):
        self.name = name
        self.items = items
        unknown = set(items) - known
        if unknown:
            raise ConfigError(
                f"[{name}] unknown key(s): {', '.join(sorted(unknown))} "
                f"(known: {', '.join(sorted(known))})"
            )

    def _raw(self, key: str, default=None, required=False) -> str | None:
        if key not in self.items or self.items[key].strip() == "":
            if required:
                raise ConfigError(f"[{self.name}] missing required key {key!r}")
            return default
        return self.items[key].strip()

    def get_float(self, key: str, default=None, required=False) -> float | None:
        raw = self._raw(key, required=required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: not a number: {raw!r}") from exc

    def get_int(self, key: str, default=None, required=False) -> int | None:
        raw = self._raw(key, required=required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: not an integer: {raw!r}") from exc

    def get_complex(self, key: str, required=False) -> complex:
        raw = self._raw(key, required=required)
        return _parse_complex(raw, f"[{self.name}] {key}")

    def get_str(self, key: str, default=None, required=False) -> str | None:
        return self._raw(key, default=default, required=required)


def parse_config(text: str) -> SimulationConfig:
    """Parse and fully validate a config document; defaults applied."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    layer_names = sorted(n for n in sections if n.startswith("layer."))
    known_sections = {"simulation", "stack", "grid", "quadrature", "solver", *layer_names}
    unknown = set(sections) - known_sections
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    for required in ("simulation", "stack", "grid"):
        if required not in sections:
            raise ConfigError(f"missing required section [{required}]")

    sim = _Section("simulation", sections["simulation"], _KNOWN_KEYS["simulation"])
    version = sim.get_int("schema_version", required=True)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"[simulation] schema_version: expected {SCHEMA_VERSION}, got {version}"
        )
    obs_raw = sim.get_str("observables", default="ldos, temperature, poynting, net_emission")
    observables = tuple(o.strip() for o in obs_raw.split(",") if o.strip())
    for o in observables:
        if o not in OBSERVABLE_NAMES:
            raise ConfigError(
                f"[simulation] observables: unknown observable {o!r} "
                f"(expected a subset of {', '.join(OBSERVABLE_NAMES)})"
            )
    if not observables:
        raise ConfigError("[simulation] observables: list is empty")
    output_dir = sim.get_str("output_dir", default="out")

    stack_sec = _Section("stack", sections["stack"], _KNOWN_KEYS["stack"])
    left_index = stack_sec.get_complex("left_index", required=True)
    right_index = stack_sec.get_complex("right_index", required=True)
    left_t = stack_sec.get_float("left_temperature_K", required=True)
    right_t = stack_sec.get_float("right_temperature_K", required=True)

    expected = [f"layer.{i}" for i in range(1, len(layer_names) + 1)]
    if layer_names != sorted(expected):
        raise ConfigError(
            f"layer sections must be numbered consecutively from 1; got {layer_names}"
        )
    layers = []
    for name in expected:
        sec = _Section(name, sections[name], _KNOWN_KEYS["layer"])
        idx = sec.get_complex("index", required=True)
        thick = sec.get_float("thickness_um", required=True)
        temp = sec.get_float("temperature_K", required=True)
        if not thick > 0.0:
            raise ConfigError(f"[{name}] thickness_um: must be strictly positive (got {thick})")
        if not temp > 0.0:
            raise ConfigError(f"[{name}] temperature_K: must be strictly positive (got {temp})")
        if not idx.real > 0.0 or idx.imag < 0.0:
            raise ConfigError(f"[{name}] index: require Re > 0 and Im >= 0 (got {idx})")
        layers.append(LayerConfig(idx, thick, temp))

    for label, t in (("left_temperature_K", left_t), ("right_temperature_K", right_t)):
        if not t > 0.0:
            raise ConfigError(f"[stack] {label}: must be strictly positive (got {t})")
    for label, idx in (("left_index", left_index), ("right_index", right_index)):
        if not idx.real > 0.0 or idx.imag < 0.0:
            raise ConfigError(f"[stack] {label}: require Re > 0 and Im >= 0 (got {idx})")

    grid_sec = _Section("grid", sections["grid"], _KNOWN_KEYS["grid"])
    x_min = grid_sec.get_float("x_min_um", required=True)
    x_max = grid_sec.get_float("x_max_um", required=True)
    x_points = grid_sec.get_int("x_points", required=True)
    e_min = grid_sec.get_float("energy_min_eV", required=True)
    e_max = grid_sec.get_float("energy_max_eV", required=True)
    e_points = grid_sec.get_int("energy_points", required=True)

    quad_sec = _Section("quadrature", sections.get("quadrature", {}), _KNOWN_KEYS["quadrature"])
    defaults = QuadratureSpec()
    try:
        quadrature = QuadratureSpec(
            rel_tol=quad_sec.get_float("rel_tol", defaults.rel_tol),
            abs_floor=quad_sec.get_float("abs_floor", defaults.abs_floor),
            tail_truncation_eps=quad_sec.get_float(
                "tail_truncation_eps", defaults.tail_truncation_eps
            ),
            max_subdivisions=quad_sec.get_int("max_subdivisions", defaults.max_subdivisions),
        )
    except ValueError as exc:
        raise ConfigError(f"[quadrature] {exc}") from exc

    solver_sec = _Section("solver", sections.get("solver", {}), _KNOWN_KEYS["solver"])
    sdef = SolverSpec()
    band_raw = solver_sec.get_str("energy_band_eV")
    if band_raw is None:
        band = sdef.omega_band
    else:
        parts = [p.strip() for p in band_raw.split(",")]
        if len(parts) != 2:
            raise ConfigError("[solver] energy_band_eV: expected two comma-separated values")
        try:
            lo_ev, hi_ev = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise ConfigError(f"[solver] energy_band_eV: not numbers: {band_raw!r}") from exc
        band = (CONSTANTS.omega_from_ev(lo_ev), CONSTANTS.omega_from_ev(hi_ev))
    try:
        solver = SolverSpec(
            n_cells=solver_sec.get_int("n_cells", sdef.n_cells),
            q_tol=solver_sec.get_float("q_tol", None),
            t_tol=solver_sec.get_float("t_tol_K", sdef.t_tol),
            max_outer_iterations=solver_sec.get_int(
                "max_outer_iterations", sdef.max_outer_iterations
            ),
            underrelaxation=solver_sec.get_float("underrelaxation", sdef.underrelaxation),
            omega_band=band,
        )
    except ValueError as exc:
        raise ConfigError(f"[solver] {exc}") from exc

    config = SimulationConfig(
        schema_version=version,
        observables=observables,
        output_dir=output_dir,
        left_index=left_index,
        left_temperature_K=left_t,
        right_index=right_index,
        right_temperature_K=right_t,
        layers=tuple(layers),
        x_min_um=x_min,
        x_max_um=x_max,
        x_points=x_points,
        energy_min_eV=e_min,
        energy_max_eV=e_max,
        energy_points=e_points,
        quadrature=quadrature,
        solver=solver,
    )
    config.stack()
    config.grid()
    return config


def serialize_config(config: SimulationConfig) -> str:
    """Canonical text form; ``parse_config`` of the result is identical."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser["simulation"] = {
        "schema_version": str(config.schema_version),
        "observables": ", ".join(config.observables),
        "output_dir": config.output_dir,
    }
    parser["stack"] = {
        "left_index": _fmt_complex(config.left_index),
        "left_temperature_K": repr(config.left_temperature_K),
        "right_index": _fmt_complex(config.right_index),
        "right_temperature_K": repr(config.right_temperature_K),
    }
    for i, lc in enumerate(config.layers, start=1):
        parser[f"layer.{i}"] = {
            "index": _fmt_complex(lc.index),
            "thickness_um": repr(lc.thickness_um),
            "temperature_K": repr(lc.temperature_K),
        }
    parser["grid"] = {
        "x_min_um": repr(config.x_min_um),
        "x_max_um": repr(config.x_max_um),
        "x_points": str(config.x_points),
        "energy_min_eV": repr(config.energy_min_eV),
        "energy_max_eV": repr(config.energy_max_eV),
        "energy_points": str(config.energy_points),
    }
    parser["quadrature"] = {
        "rel_tol": repr(config.quadrature.rel_tol),
        "abs_floor": repr(config.quadrature.abs_floor),
        "tail_truncation_eps": repr(config.quadrature.tail_truncation_eps),
        "max_subdivisions": str(config.quadrature.max_subdivisions),
    }
    band = config.solver.omega_band
    parser["solver"] = {
        "n_cells": str(config.solver.n_cells),
        "q_tol": "" if config.solver.q_tol is None else repr(config.solver.q_tol),
        "t_tol_K": repr(config.solver.t_tol),
        "max_outer_iterations": str(config.solver.max_outer_iterations),
        "underrelaxation": repr(config.solver.underrelaxation),
        "energy_band_eV": f"{CONSTANTS.ev_from_omega(band[0])!r}, "
        f"{CONSTANTS.ev_from_omega(band[1])!r}",
    }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def load_config(path: str | Path) -> SimulationConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------

def _write_field_csv(path: Path, fm) -> None:
    lines = ["x_um,energy_eV,value,units"]
    for i, x in enumerate(fm.grid.positions):
        for j, e in enumerate(fm.grid.energies_ev):
            lines.append(f"{x * 1e6:.10e},{e:.10e},{fm.values[i, j]:.10e},{fm.units}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_cells_csv(path: Path, solution) -> None:
    lines = ["cell_x_um,T_K,residual"]
    for x, t, r in zip(solution.cell_centers, solution.temperatures, solution.residuals):
        lines.append(f"{x * 1e6:.10e},{t:.10e},{r:.10e}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def detect_resonances(stack: LayerStack, energies_ev, constants=CONSTANTS) -> list[float]:
    """Peak energies of the cavity LDOS envelope (max over interior positions).

    Tracks the strongest standing-wave enhancement regardless of where its
    antinodes sit, so every resonance order is detected from a single curve.
    """
    if not stack.layers:
        return []
    b = stack.boundaries
    width = b[-1] - b[0]
    xs = np.linspace(b[0] + 0.02 * width, b[-1] - 0.02 * width, 33)
    envelope = np.empty(len(energies_ev))
    for k, e in enumerate(energies_ev):
        omega = constants.omega_from_ev(e)
        solver = GreenSolver(stack, omega, constants)
        envelope[k] = ldos_profile(stack, xs, omega, constants, solver).max()
    idx = local_maxima(envelope, prominence_rel=0.02)
    return [float(energies_ev[i]) for i in idx]


def _write_metadata(path: Path, config: SimulationConfig, command: str, written) -> None:
    stack = config.stack()
    meta = {
        "schema_version": SCHEMA_VERSION,
        "generator": f"qfed1d {__version__}",
        "command": command,
        "interfaces_um": [b * 1e6 for b in stack.boundaries],
        "resonance_energies_eV": detect_resonances(
            stack, config.grid().energies_ev
        ),
        "grid": {
            "x_um": [config.x_min_um, config.x_max_um, config.x_points],
            "energy_eV": [config.energy_min_eV, config.energy_max_eV, config.energy_points],
        },
        "files": sorted(written),
    }
    path.write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8", newline="\n"
    )


def run(
    config: SimulationConfig,
    command: str,
    out_dir: str | Path | None = None,
    workers: int = 1,
) -> int:
    """Execute one command; returns the process exit status.

    Writes one DSV file per observable (plus ``cavity_cells.csv`` for
    ``solve-cavity``) and ``metadata.json`` into the output directory.
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; expected one of {COMMANDS}")
    out = Path(out_dir) if out_dir is not None else Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    stack = config.stack()
    grid = config.grid()
    written: list[str] = []

    if command == "solve-cavity":
        solution = solve_cavity_temperatures(
            stack, config.solver, config.quadrature
        )
        _write_cells_csv(out / "cavity_cells.csv", solution)
        written.append("cavity_cells.csv")
        if not solution.converged:
            _write_metadata(out / "metadata.json", config, command, written)
            print(
                "qfed1d-error: solver: cavity solve did not converge "
                f"(iterations={solution.iterations}, "
                f"max residual={np.abs(solution.residuals).max():.3e}, "
                f"q_tol={solution.q_tol:.3e})",
                file=sys.stderr,
            )
            return 3
        stack = solution.stack  # evaluate observables on the converged profile
        names = config.observables
    elif command == "all":
        names = config.observables
    else:
        names = (_COMMAND_OBSERVABLE[command],)

    for name in names:
        fm = field_map(stack, grid, name, config.quadrature, workers=workers)
        fname = f"{name}.csv"
        _write_field_csv(out / fname, fm)
        written.append(fname)

    _write_metadata(out / "metadata.json", config, command, written)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qfed1d",
        description=(
            "Local observables of thermal electromagnetic fields in 1D layered "
            "structures, with a self-consistent cavity temperature solver."
        ),
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the .cfg simulation file")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument(
        "--threads", type=int, default=1, help="worker processes for grid evaluation"
    )
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        return run(config, args.command, out_dir=args.out, workers=args.threads)
    except ConfigError as exc:
        print(f"qfed1d-error: config: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"qfed1d-error: io: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - single diagnostic line, nonzero exit
        print(f"qfed1d-error: runtime: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
