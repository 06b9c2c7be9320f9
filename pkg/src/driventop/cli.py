"""Command-line front end for every figure-class experiment.

Each subcommand resolves its parameters from CLI flags layered over an
optional JSON config file, runs the corresponding library operation, and
writes CSV data plus a JSON manifest that echoes every parameter
(including defaults), the tolerances in effect, and derived quantities.
Identical (config, seed) runs produce byte-identical CSV regardless of the
worker count.

Exit codes: 0 success, 1 configuration error (message on stderr),
2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .classical import (
    ChaosConfig,
    ClassicalParams,
    chaotic_fraction,
    exponent_map,
)
from .errors import ConfigError, DrivenTopError
from .presets import DONOR_NAMES, donor_presets
from .quantum import (
    DonorSpec,
    FluctuationSpec,
    floquet,
    overlap_trace,
    purity_map,
    tunneling_frequency,
)
from .spectro import (
    DEFAULT_INTENSITY_FLOOR,
    nmr_spectrum,
    scan_field_orientation,
    trace_branches,
)
from .spinops import (
    SphereDirection,
    SpinQuantumNumber,
    husimi_grid,
    spin_coherent_state,
)
from . import stateprep

__all__ = [
    "RunConfig",
    "RunManifest",
    "EXPERIMENT_NAMES",
    "donor_presets",
    "run",
    "main",
]

SCHEMA_VERSION = 1

#: Config-file keys that are not experiment parameters.
_SPECIAL_KEYS = ("seed", "workers", "output")


def _artifact_version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "unknown"


# ---------------------------------------------------------------------------
# configuration plumbing


class _REQUIRED:  # sentinel for parameters with no default
    pass


def _to_float(value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"expected a finite number, got {value!r}")
    return out


def _to_int(value) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"expected an integer, got {value!r}")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected an integer, got {value!r}") from None
    if out != int(out):
        raise ConfigError(f"expected an integer, got {value!r}")
    return int(out)


def _to_str(value) -> str:
    return str(value)


def _comma_floats(value) -> Tuple[float, ...]:
    """Comma-separated list of numbers, or a JSON array of numbers."""
    if isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [p for p in str(value).split(",") if p.strip()]
    if not items:
        raise ConfigError(f"expected at least one number, got {value!r}")
    return tuple(_to_float(p) for p in items)


@dataclass(frozen=True)
class _Param:
    name: str
    convert: Callable
    default: object
    help: str
    choices: Optional[Tuple] = None

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


@dataclass(frozen=True)
class _Experiment:
    name: str
    description: str
    params: Tuple[_Param, ...]
    runner: Callable
    output_default: str
    output_is_dir: bool = False


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved experiment invocation."""

    experiment: str
    parameters: dict
    seed: int
    workers: int
    output_path: str

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; valid: "
                + ", ".join(EXPERIMENTS)
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        missing = [
            p.name
            for p in EXPERIMENTS[self.experiment].params
            if p.name not in self.parameters
        ]
        if missing:
            raise ConfigError(
                f"missing parameters for {self.experiment}: {', '.join(missing)}"
            )


@dataclass(frozen=True)
class RunManifest:
    """Run record written atomically alongside every data file."""

    experiment: str
    parameters: dict
    seed: int
    workers: int
    artifact_version: str
    wall_time_seconds: float
    tolerances: dict
    derived: dict
    outputs: Tuple[str, ...]
    schema_version: int = SCHEMA_VERSION

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "artifact_version": self.artifact_version,
            "seed": self.seed,
            "workers": self.workers,
            "parameters": _jsonify(self.parameters),
            "tolerances": _jsonify(self.tolerances),
            "derived": _jsonify(self.derived),
            "outputs": list(self.outputs),
            "wall_time_seconds": self.wall_time_seconds,
        }


def _jsonify(value):
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


# ---------------------------------------------------------------------------
# deterministic file output


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: Sequence[str], rows) -> None:
    """UTF-8, LF-terminated CSV with 17-significant-digit floats."""
    lines = [",".join(header)]
    lines.extend(",".join(_format_cell(cell) for cell in row) for row in rows)
    _atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# shared spec construction


_SPIN_PARAMS = (
    _Param("donor", _to_str, None, "donor preset name", choices=DONOR_NAMES),
    _Param("two_i", _to_int, None, "twice the nuclear spin (overrides preset)"),
    _Param("gamma_n", _to_float, None, "gyromagnetic ratio in Hz/T (overrides preset)"),
)


def _resolve_spin(params: dict) -> Tuple[SpinQuantumNumber, float]:
    two_i = params.get("two_i")
    gamma_n = params.get("gamma_n")
    if params.get("donor") is not None:
        preset = donor_presets(params["donor"])
        if two_i is None:
            two_i = preset.spin.two_i
        if gamma_n is None:
            gamma_n = preset.gamma_n
    if two_i is None or gamma_n is None:
        raise ConfigError(
            "spin system underspecified: pass --donor or both --two-i and --gamma-n"
        )
    return SpinQuantumNumber(two_i), float(gamma_n)


def _driven_spec(params: dict) -> DonorSpec:
    spin, gamma_n = _resolve_spin(params)
    return DonorSpec(
        spin,
        gamma_n,
        params["b0"],
        q=params["q"],
        b1=params["b1"],
        drive_freq=params["freq"],
    )


def _island_direction(
    spin: SpinQuantumNumber, gamma_n: float, b0: float, q: float
) -> SphereDirection:
    """Center of a tilted potential well of the undriven quadrupole top."""
    if q <= 0.0:
        raise ConfigError(
            "no default seed direction without a quadrupole term; pass --theta/--phi"
        )
    cosine = gamma_n * b0 / (2.0 * q * spin.i)
    if cosine >= 1.0:
        raise ConfigError(
            "the static field exceeds the well-tilting bound for these "
            "parameters; pass --theta/--phi explicitly"
        )
    return SphereDirection(math.acos(cosine), 0.0)


def _seed_direction(params: dict, spec: DonorSpec) -> SphereDirection:
    theta, phi = params.get("theta"), params.get("phi")
    if theta is None and phi is None:
        return _island_direction(spec.spin, spec.gamma_n, spec.b0, spec.q)
    if theta is None or phi is None:
        raise ConfigError("pass both --theta and --phi, or neither")
    return SphereDirection(theta, phi)


# ---------------------------------------------------------------------------
# experiment runners; each returns (outputs, derived, tolerances) where
# outputs is a list of (name, header, rows) and name "" denotes the main file


def _run_classical_map(params: dict, seed: int, workers: int):
    p = ClassicalParams(params["beta"], params["gamma"], params["freq"])
    cfg = ChaosConfig(duration=params["duration"], threshold=params["threshold"])
    emap = exponent_map(p, (params["n_theta"], params["n_phi"]), cfg, workers)
    flags = emap.chaotic
    rows = [
        (theta, phi, emap.values[i, j], int(flags[i, j]))
        for i, theta in enumerate(emap.thetas)
        for j, phi in enumerate(emap.phis)
    ]
    outputs = [("", ("theta", "phi", "exponent", "chaotic"), rows)]
    derived = {
        "threshold": emap.threshold,
        "grid_chaotic_fraction": float(flags.mean()),
    }
    tolerances = {
        "ode_rtol": cfg.rtol,
        "ode_atol": cfg.atol,
        "fit_duration": cfg.duration,
    }
    return outputs, derived, tolerances


def _run_chaos_fraction(params: dict, seed: int, workers: int):
    p = ClassicalParams(params["beta"], params["gamma"], params["freq"])
    cfg = ChaosConfig(duration=params["duration"], threshold=params["threshold"])
    result = chaotic_fraction(p, params["samples"], cfg, seed=seed, workers=workers)
    header = ("beta", "gamma", "freq", "fraction", "n_chaotic", "n_samples")
    rows = [
        (p.beta, p.gamma, p.freq, result.fraction, result.n_chaotic, result.n_samples)
    ]
    derived = {"threshold": result.threshold, "percent_chaotic": result.percent}
    tolerances = {"ode_rtol": cfg.rtol, "ode_atol": cfg.atol}
    return [("", header, rows)], derived, tolerances


def _run_purity_map(params: dict, seed: int, workers: int):
    spec = _driven_spec(params)
    parameter = params["parameter"]
    mean = params["mean"]
    if mean is None:
        mean = {"Q": spec.q, "B0": spec.b0, "B1": spec.b1}[parameter]
    fluct = FluctuationSpec(
        parameter=parameter,
        mean=mean,
        sigma=params["sigma"],
        n_periods=params["periods"],
        n_sequences=params["members"],
        n_levels=params["levels"],
        rng_seed=seed,
    )
    pmap = purity_map(
        spec,
        fluct,
        (params["n_theta"], params["n_phi"]),
        params["segments"],
        workers,
    )
    rows = [
        (theta, phi, pmap.values[i, j])
        for i, theta in enumerate(pmap.thetas)
        for j, phi in enumerate(pmap.phis)
    ]
    derived = {
        "fluctuation_mean": mean,
        "area_weighted_mean_purity": pmap.area_weighted_mean(),
    }
    tolerances = {"n_segments": params["segments"]}
    return [("", ("theta", "phi", "purity"), rows)], derived, tolerances


def _run_tunneling(params: dict, seed: int, workers: int):
    spec = _driven_spec(params)
    direction = _seed_direction(params, spec)
    psi0 = spin_coherent_state(spec.spin, direction)
    frequency = tunneling_frequency(
        spec, psi0, params["segments"], params["min_weight"]
    )
    period = 1.0 / frequency if frequency > 0 else math.inf
    header = ("theta", "phi", "frequency", "period")
    rows = [(direction.theta, direction.phi, frequency, period)]
    derived = {
        "seed_theta": direction.theta,
        "seed_phi": direction.phi,
        "tunneling_frequency_hz": frequency,
        "tunneling_period_s": period,
    }
    tolerances = {"n_segments": params["segments"], "min_weight": params["min_weight"]}
    return [("", header, rows)], derived, tolerances


def _run_overlap_trace(params: dict, seed: int, workers: int):
    spec = _driven_spec(params)
    direction = _seed_direction(params, spec)
    psi0 = spin_coherent_state(spec.spin, direction)
    trace = overlap_trace(spec, psi0, params["periods"], params["segments"])
    header = ("period", "time", "amplitude", "squared")
    rows = [
        (k, trace.times[k], trace.amplitude[k], trace.squared[k])
        for k in range(len(trace.times))
    ]
    revival = float(trace.amplitude[1:].max()) if len(trace.amplitude) > 1 else 1.0
    derived = {
        "seed_theta": direction.theta,
        "seed_phi": direction.phi,
        "max_revival_amplitude": revival,
        "min_amplitude": float(trace.amplitude.min()),
    }
    tolerances = {"n_segments": params["segments"]}
    return [("", header, rows)], derived, tolerances


def _spectroscopy_spec(params: dict, b0: float) -> DonorSpec:
    spin, gamma_n = _resolve_spin(params)
    kwargs = {"q": params["q"], "eta": params["eta"]}
    if params["geometry"] == "parallel":
        kwargs["quad_axes"] = np.eye(3)
    return DonorSpec(spin, gamma_n, b0, **kwargs)


def _run_spectrum(params: dict, seed: int, workers: int):
    header = ("b0", "frequency", "intensity", "level_low", "level_high")
    rows = []
    line_counts = []
    for b0 in params["b0"]:
        lines = nmr_spectrum(
            _spectroscopy_spec(params, b0), intensity_floor=params["floor"]
        )
        line_counts.append([b0, len(lines)])
        rows.extend(
            (b0, line.frequency, line.intensity, *line.level_pair) for line in lines
        )
    derived = {"lines_per_b0": line_counts}
    tolerances = {"intensity_floor": params["floor"]}
    return [("", header, rows)], derived, tolerances


_PLANES = {
    "zx": ((0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
    "zy": ((0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)),
    "xy": ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
}


def _run_orientation_scan(params: dict, seed: int, workers: int):
    u, v, coil = _PLANES[params["plane"]]
    spin, gamma_n = _resolve_spin(params)
    spec = DonorSpec(
        spin,
        gamma_n,
        params["b0"],
        q=params["q"],
        eta=params["eta"],
        quad_axes=np.eye(3),
        b1_dir=SphereDirection.from_vector(np.array(coil)),
    )
    angles = np.linspace(params["start"], params["stop"], params["n_angles"])
    scan = scan_field_orientation(spec, (u, v), angles, params["floor"])
    header = ("angle", "frequency", "intensity", "level_low", "level_high")
    rows = []
    for angle, spectrum in zip(scan.angles, scan.spectra):
        rows.extend(
            (angle, line.frequency, line.intensity, *line.level_pair)
            for line in spectrum
        )
    branches = trace_branches(scan)
    branch_header = ("branch", "angle", "frequency", "intensity")
    branch_rows = [
        (b, scan.angles[j], branches.frequencies[b, j], branches.intensities[b, j])
        for b in range(branches.frequencies.shape[0])
        for j in range(branches.frequencies.shape[1])
    ]
    outputs = [("", header, rows), ("branches", branch_header, branch_rows)]
    derived = {"n_branches": int(branches.frequencies.shape[0])}
    tolerances = {"intensity_floor": params["floor"]}
    return outputs, derived, tolerances


def _run_stateprep(params: dict, seed: int, workers: int):
    spin, gamma_n = _resolve_spin(params)
    spec = DonorSpec(spin, gamma_n, params["b0"], q=params["q"], eta=params["eta"])
    target = spin_coherent_state(
        spin, SphereDirection(params["target_theta"], params["target_phi"])
    )
    sequence, report = stateprep.compile(
        target, spec, params["b1"], params["max_duration"]
    )
    header = (
        "pulse",
        "frequency",
        "duration",
        "phase",
        "amplitude",
        "level_low",
        "level_high",
    )
    rows = [
        (k, p.frequency, p.duration, p.phase, p.amplitude, *p.level_pair)
        for k, p in enumerate(sequence.pulses)
    ]
    derived = {
        "predicted_fidelity": report.predicted_fidelity,
        "n_pulses": len(sequence.pulses),
        "total_duration_s": sequence.total_duration,
        "per_step_populations": [list(row) for row in report.per_step_populations],
        "sequence": sequence.to_json_dict(),
    }
    tolerances = {"propagator_unitarity": 1e-9}
    return [("", header, rows)], derived, tolerances


def _run_husimi_frames(params: dict, seed: int, workers: int):
    spec = _driven_spec(params)
    direction = _seed_direction(params, spec)
    op = floquet(spec, params["segments"])
    n_theta, n_phi = params["n_theta"], params["n_phi"]
    thetas = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    phis = (np.arange(n_phi) + 0.5) * 2.0 * math.pi / n_phi
    psi = spin_coherent_state(spec.spin, direction)
    header = ("theta", "phi", "husimi")
    outputs = []
    times = []
    stride = params["stride"]
    if stride < 1:
        raise ConfigError(f"stride must be >= 1, got {stride}")
    for frame in range(params["frames"]):
        if frame > 0:
            for _ in range(stride):
                psi = op.matrix @ psi
        rho = np.outer(psi, psi.conj())
        grid = husimi_grid(rho, thetas, phis)
        rows = [
            (theta, phi, grid[i, j])
            for i, theta in enumerate(thetas)
            for j, phi in enumerate(phis)
        ]
        outputs.append((f"frame_{frame:04d}", header, rows))
        times.append(frame * stride * op.period)
    derived = {
        "seed_theta": direction.theta,
        "seed_phi": direction.phi,
        "drive_period_s": op.period,
        "periods_per_frame": stride,
        "frame_times_s": times,
    }
    tolerances = {"n_segments": params["segments"]}
    return outputs, derived, tolerances


# ---------------------------------------------------------------------------
# experiment registry


def _classical_params() -> Tuple[_Param, ...]:
    return (
        _Param("beta", _to_float, _REQUIRED, "quadrupole coefficient (alpha units)"),
        _Param("gamma", _to_float, _REQUIRED, "drive coefficient (alpha units)"),
        _Param("freq", _to_float, _REQUIRED, "drive frequency (alpha units)"),
        _Param("duration", _to_float, 100.0, "divergence-fit window (alpha-unit time)"),
        _Param("threshold", _to_float, None, "chaos threshold override"),
    )


def _driven_params() -> Tuple[_Param, ...]:
    return _SPIN_PARAMS + (
        _Param("b0", _to_float, _REQUIRED, "static field in T"),
        _Param("q", _to_float, _REQUIRED, "quadrupole strength in Hz"),
        _Param("b1", _to_float, _REQUIRED, "drive amplitude in T"),
        _Param("freq", _to_float, _REQUIRED, "drive frequency in Hz"),
        _Param("segments", _to_int, 1000, "integration segments per period"),
    )


EXPERIMENTS = {
    "classical-map": _Experiment(
        name="classical-map",
        description="divergence-exponent map over a coherent-state seed grid",
        params=_classical_params()
        + (
            _Param("n_theta", _to_int, 48, "polar grid cells"),
            _Param("n_phi", _to_int, 96, "azimuthal grid cells"),
        ),
        runner=_run_classical_map,
        output_default="classical-map.csv",
    ),
    "chaos-fraction": _Experiment(
        name="chaos-fraction",
        description="chaotic fraction of random seeds at one parameter point",
        params=_classical_params()
        + (_Param("samples", _to_int, 500, "number of random seeds"),),
        runner=_run_chaos_fraction,
        output_default="chaos-fraction.csv",
    ),
    "purity-map": _Experiment(
        name="purity-map",
        description="ensemble-averaged purity per seed direction under noise",
        params=_driven_params()
        + (
            _Param("parameter", _to_str, _REQUIRED, "fluctuating parameter",
                   choices=("Q", "B0", "B1")),
            _Param("sigma", _to_float, _REQUIRED, "noise standard deviation"),
            _Param("mean", _to_float, None,
                   "noise mean (defaults to the nominal parameter value)"),
            _Param("periods", _to_int, 1000, "drive periods per member"),
            _Param("members", _to_int, 50, "ensemble members"),
            _Param("levels", _to_int, 30, "precomputed noise levels"),
            _Param("n_theta", _to_int, 24, "polar grid cells"),
            _Param("n_phi", _to_int, 48, "azimuthal grid cells"),
        ),
        runner=_run_purity_map,
        output_default="purity-map.csv",
    ),
    "tunneling": _Experiment(
        name="tunneling",
        description="island-to-island oscillation frequency of a coherent seed",
        params=_driven_params()
        + (
            _Param("theta", _to_float, None, "seed polar angle (default: island)"),
            _Param("phi", _to_float, None, "seed azimuth (default: island)"),
            _Param("min_weight", _to_float, 0.8, "required two-mode weight"),
        ),
        runner=_run_tunneling,
        output_default="tunneling.csv",
    ),
    "overlap-trace": _Experiment(
        name="overlap-trace",
        description="per-period overlap of an evolving seed with itself",
        params=_driven_params()
        + (
            _Param("theta", _to_float, None, "seed polar angle (default: island)"),
            _Param("phi", _to_float, None, "seed azimuth (default: island)"),
            _Param("periods", _to_int, 200, "drive periods to trace"),
        ),
        runner=_run_overlap_trace,
        output_default="overlap-trace.csv",
    ),
    "spectrum": _Experiment(
        name="spectrum",
        description="static transition lines at one or more field magnitudes",
        params=_SPIN_PARAMS
        + (
            _Param("b0", _comma_floats, _REQUIRED, "field magnitude(s) in T, comma-separated"),
            _Param("q", _to_float, 0.0, "quadrupole strength in Hz"),
            _Param("eta", _to_float, 0.0, "field-gradient asymmetry"),
            _Param("geometry", _to_str, "parallel",
                   "field direction relative to the quadrupole axis",
                   choices=("parallel", "perpendicular")),
            _Param("floor", _to_float, DEFAULT_INTENSITY_FLOOR,
                   "minimum normalized line intensity"),
        ),
        runner=_run_spectrum,
        output_default="spectrum.csv",
    ),
    "orientation-scan": _Experiment(
        name="orientation-scan",
        description="spectra versus field direction rotated in a plane",
        params=_SPIN_PARAMS
        + (
            _Param("b0", _to_float, _REQUIRED, "field magnitude in T"),
            _Param("q", _to_float, _REQUIRED, "quadrupole strength in Hz"),
            _Param("eta", _to_float, 0.0, "field-gradient asymmetry"),
            _Param("plane", _to_str, "zx", "rotation plane (quad axis first)",
                   choices=tuple(_PLANES)),
            _Param("start", _to_float, 0.0, "first angle in rad"),
            _Param("stop", _to_float, math.pi, "last angle in rad"),
            _Param("n_angles", _to_int, 73, "number of angles"),
            _Param("floor", _to_float, DEFAULT_INTENSITY_FLOOR,
                   "minimum normalized line intensity"),
        ),
        runner=_run_orientation_scan,
        output_default="orientation-scan.csv",
    ),
    "stateprep": _Experiment(
        name="stateprep",
        description="compile a pulse sequence preparing a coherent-state target",
        params=_SPIN_PARAMS
        + (
            _Param("b0", _to_float, _REQUIRED, "static field in T"),
            _Param("q", _to_float, _REQUIRED, "quadrupole strength in Hz"),
            _Param("eta", _to_float, 0.0, "field-gradient asymmetry"),
            _Param("b1", _to_float, _REQUIRED, "pulse amplitude in T"),
            _Param("target_theta", _to_float, _REQUIRED, "target polar angle"),
            _Param("target_phi", _to_float, _REQUIRED, "target azimuth"),
            _Param("max_duration", _to_float, stateprep.MAX_SEQUENCE_DURATION,
                   "total-duration budget in s"),
        ),
        runner=_run_stateprep,
        output_default="stateprep.csv",
    ),
    "husimi-frames": _Experiment(
        name="husimi-frames",
        description="per-period phase-space distributions of an evolving seed",
        params=_driven_params()
        + (
            _Param("theta", _to_float, None, "seed polar angle (default: island)"),
            _Param("phi", _to_float, None, "seed azimuth (default: island)"),
            _Param("frames", _to_int, 40, "number of frames"),
            _Param("stride", _to_int, 1, "drive periods between frames"),
            _Param("n_theta", _to_int, 60, "polar grid cells"),
            _Param("n_phi", _to_int, 120, "azimuthal grid cells"),
        ),
        runner=_run_husimi_frames,
        output_default="husimi-frames",
        output_is_dir=True,
    ),
}

EXPERIMENT_NAMES = tuple(EXPERIMENTS)


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config errors are exit 1
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="driventop",
        description="simulations of a periodically driven nuclear-spin top",
    )
    subparsers = parser.add_subparsers(dest="experiment", metavar="experiment")
    for experiment in EXPERIMENTS.values():
        sub = subparsers.add_parser(
            experiment.name, help=experiment.description, description=experiment.description
        )
        sub.add_argument("--config", help="JSON config file; flags override its keys")
        sub.add_argument("--output", help=f"output path (default {experiment.output_default})")
        sub.add_argument("--seed", type=_to_int, help="RNG seed (default 0)")
        sub.add_argument(
            "--workers",
            type=_to_int,
            help="parallel workers (default $DRIVENTOP_WORKERS or 1)",
        )
        for param in experiment.params:
            kwargs = {"type": param.convert, "help": param.help, "default": None}
            if param.choices is not None:
                kwargs["choices"] = param.choices
            sub.add_argument(param.flag, **kwargs)
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


def _default_workers() -> int:
    raw = os.environ.get("DRIVENTOP_WORKERS")
    if raw is None:
        return 1
    try:
        workers = _to_int(raw)
    except ConfigError:
        raise ConfigError(
            f"DRIVENTOP_WORKERS must be a positive integer, got {raw!r}"
        ) from None
    if workers < 1:
        raise ConfigError(f"DRIVENTOP_WORKERS must be >= 1, got {workers}")
    return workers


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Layer CLI flags over the config file over defaults."""
    if not args.experiment:
        raise ConfigError("no experiment selected; see driventop --help")
    experiment = EXPERIMENTS[args.experiment]
    file_values = _load_config_file(args.config) if args.config else {}
    known = {p.name for p in experiment.params} | set(_SPECIAL_KEYS)
    unknown = set(file_values) - known
    if unknown:
        raise ConfigError(
            f"unknown config keys for {experiment.name}: {', '.join(sorted(unknown))}"
        )
    parameters = {}
    for param in experiment.params:
        value = getattr(args, param.name)
        if value is None and param.name in file_values:
            raw = file_values[param.name]
            value = param.convert(raw) if raw is not None else None
            if param.choices is not None and value not in param.choices:
                raise ConfigError(
                    f"{param.name} must be one of {param.choices}, got {value!r}"
                )
        if value is None:
            if param.default is _REQUIRED:
                raise ConfigError(f"missing required parameter {param.flag}")
            value = param.default
        parameters[param.name] = value
    seed = args.seed if args.seed is not None else _to_int(file_values.get("seed", 0))
    if args.workers is not None:
        workers = args.workers
    elif "workers" in file_values:
        workers = _to_int(file_values["workers"])
    else:
        workers = _default_workers()
    output = args.output or file_values.get("output") or experiment.output_default
    return RunConfig(
        experiment=experiment.name,
        parameters=parameters,
        seed=seed,
        workers=workers,
        output_path=str(output),
    )


# ---------------------------------------------------------------------------
# execution


def _output_paths(config: RunConfig, names) -> Tuple[dict, str]:
    experiment = EXPERIMENTS[config.experiment]
    paths = {}
    if experiment.output_is_dir:
        for name in names:
            paths[name] = os.path.join(config.output_path, f"{name}.csv")
        manifest = os.path.join(config.output_path, "manifest.json")
    else:
        stem, ext = os.path.splitext(config.output_path)
        for name in names:
            paths[name] = config.output_path if name == "" else f"{stem}.{name}{ext or '.csv'}"
        manifest = f"{stem}.manifest.json"
    return paths, manifest


def run(config: RunConfig) -> int:
    """Execute one experiment; returns the process exit code."""
    experiment = EXPERIMENTS[config.experiment]
    start = time.perf_counter()
    try:
        outputs, derived, tolerances = experiment.runner(
            config.parameters, config.seed, config.workers
        )
        paths, manifest_path = _output_paths(config, [name for name, _, _ in outputs])
        for name, header, rows in outputs:
            write_csv(paths[name], header, rows)
        manifest = RunManifest(
            experiment=config.experiment,
            parameters=config.parameters,
            seed=config.seed,
            workers=config.workers,
            artifact_version=_artifact_version(),
            wall_time_seconds=time.perf_counter() - start,
            tolerances=tolerances,
            derived=derived,
            outputs=tuple(paths[name] for name, _, _ in outputs),
        )
        _atomic_write_text(
            manifest_path, json.dumps(manifest.to_json_dict(), indent=2) + "\n"
        )
    except ConfigError as exc:
        print(f"driventop: configuration error: {exc}", file=sys.stderr)
        return 1
    except DrivenTopError as exc:
        print(f"driventop: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"driventop: configuration error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
