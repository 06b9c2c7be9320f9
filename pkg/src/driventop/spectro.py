"""Stationary spectroscopy of the donor spin.

Computes transition lines of the static Hamiltonian for the bare nucleus and
for the coupled electron-nucleus system, runs field-magnitude and
field-orientation scans with continuous branch tracing for plotting, and
estimates the quadrupole strength from an aligned-field spectrum by a
least-squares fit of the line ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence, Tuple

import numpy as np

from .errors import ConfigError, LineResolutionError
from .quantum import DonorSpec, build_hamiltonian, quadrupole_operator
from .spinops import (
    SphereDirection,
    SpinOperators,
    SpinQuantumNumber,
    hermitian_eigensystem,
    make_spin_operators,
)

__all__ = [
    "DEFAULT_INTENSITY_FLOOR",
    "SpectrumLine",
    "OrientationScan",
    "ScanBranches",
    "QuadrupoleEstimate",
    "NeutralDonorSpectrum",
    "nmr_spectrum",
    "scan_field_magnitude",
    "scan_field_orientation",
    "trace_branches",
    "estimate_quadrupole",
    "neutral_donor_spectrum",
]

#: Default intensity below which a level pair is not reported as a line.
DEFAULT_INTENSITY_FLOOR = 1e-4

#: Roundoff headroom accepted above the theoretical intensity bound of 1.
_INTENSITY_SLACK = 1e-9


@dataclass(frozen=True)
class SpectrumLine:
    """One transition line: frequency in Hz, normalized intensity, level pair.

    ``level_pair`` holds the ascending-energy indices (k, k') with k < k' of
    the two stationary states connected by the line. Intensity is the squared
    drive-operator matrix element between them, normalized so the strongest
    bare-ladder transition for the same spin value equals 1; values inside
    roundoff of that bound are clamped to it.
    """

    frequency: float
    intensity: float
    level_pair: Tuple[int, int]

    def __post_init__(self) -> None:
        if not math.isfinite(self.frequency) or self.frequency < 0.0:
            raise ConfigError(f"line frequency must be >= 0, got {self.frequency}")
        if not 0.0 <= self.intensity <= 1.0 + _INTENSITY_SLACK:
            raise ConfigError(f"line intensity must lie in [0, 1], got {self.intensity}")
        if self.intensity > 1.0:
            object.__setattr__(self, "intensity", 1.0)
        k, kp = self.level_pair
        if not (isinstance(k, int) and isinstance(kp, int) and 0 <= k < kp):
            raise ConfigError(f"level_pair must be ascending indices, got {self.level_pair}")
        object.__setattr__(self, "level_pair", (k, kp))


@dataclass(frozen=True)
class OrientationScan:
    """Spectra sampled along one scan coordinate.

    ``axis`` describes the scan in words; ``angles`` holds the strictly
    increasing scan coordinate (radians for rotations, tesla for
    field-magnitude scans); ``spectra[j]`` is the line set at ``angles[j]``.
    """

    axis: str
    angles: Tuple[float, ...]
    spectra: Tuple[Tuple[SpectrumLine, ...], ...]

    def __post_init__(self) -> None:
        angles = tuple(float(a) for a in self.angles)
        if len(angles) == 0:
            raise ConfigError("scan needs at least one point")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise ConfigError("scan coordinates must be strictly increasing")
        if len(self.spectra) != len(angles):
            raise ConfigError(
                f"got {len(self.spectra)} spectra for {len(angles)} scan points"
            )
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "spectra", tuple(tuple(s) for s in self.spectra))


@dataclass(frozen=True)
class ScanBranches:
    """Continuous line branches traced through a scan, NaN where absent.

    Both arrays have shape (n_branches, n_steps); row b follows one spectral
    line across the scan, with NaN before the branch appears and after it
    dies.
    """

    frequencies: np.ndarray
    intensities: np.ndarray


@dataclass(frozen=True)
class QuadrupoleEstimate:
    """Quadrupole strength inferred from an evenly spaced line ladder.

    ``q`` is half the fitted ladder spacing in Hz, ``residual`` the rms
    deviation of the resolved line frequencies from the fitted ladder, and
    ``n_lines`` the number of resolved lines used.
    """

    q: float
    residual: float
    n_lines: int


@dataclass(frozen=True)
class NeutralDonorSpectrum:
    """Line sets of the coupled electron-nucleus system.

    ``esr_lines`` are the electron-flip transitions that preserve the nuclear
    projection (one per nuclear level); ``nmr_lines_down`` and
    ``nmr_lines_up`` are the nuclear-flip transitions within the electron
    spin-down and spin-up manifolds. ``max_deviation`` is the largest
    frequency shift, in Hz, between the full isotropic electron-nucleus
    coupling and its secular (field-axis) approximation, maximized over all
    three line groups.
    """

    esr_lines: Tuple[SpectrumLine, ...]
    nmr_lines_down: Tuple[SpectrumLine, ...]
    nmr_lines_up: Tuple[SpectrumLine, ...]
    max_deviation: float


def _axis_operator(ops: SpinOperators, direction: np.ndarray) -> np.ndarray:
    return direction[0] * ops.ix + direction[1] * ops.iy + direction[2] * ops.iz


def _max_ladder_intensity(spin: SpinQuantumNumber) -> float:
    """Largest |<m+1|I_perp|m>|^2 over the bare ladder: ((2I+1)/4)^2."""
    return ((spin.two_i + 1) / 4.0) ** 2


def _lines_from_eigensystem(
    energies: np.ndarray,
    states: np.ndarray,
    drive_op: np.ndarray,
    norm: float,
    intensity_floor: float,
) -> Tuple[SpectrumLine, ...]:
    """Emit every level pair whose normalized intensity exceeds the floor.

    Strong quadrupole mixing of the field-quantized levels can push a squared
    matrix element slightly above the bare-ladder bound used for
    normalization; such lines are reported saturated at intensity 1.
    """
    amplitude = states.conj().T @ drive_op @ states
    intensity = np.abs(amplitude) ** 2 / norm
    lines = []
    dim = len(energies)
    for k in range(dim):
        for kp in range(k + 1, dim):
            if intensity[kp, k] > intensity_floor:
                lines.append(
                    SpectrumLine(
                        frequency=float(energies[kp] - energies[k]),
                        intensity=min(float(intensity[kp, k]), 1.0),
                        level_pair=(k, kp),
                    )
                )
    lines.sort(key=lambda ln: (ln.frequency, ln.level_pair))
    return tuple(lines)


def nmr_spectrum(
    spec: DonorSpec, intensity_floor: float = DEFAULT_INTENSITY_FLOOR
) -> Tuple[SpectrumLine, ...]:
    """Transition lines of the static Hamiltonian, ignoring the drive term.

    Diagonalizes the lab-frame Hamiltonian with the oscillating field removed
    and reports every level pair with frequency |E_k' - E_k| whose intensity
    |<e_k'|n1 . I|e_k>|^2, normalized by the strongest bare-ladder element
    for this spin, exceeds ``intensity_floor``. The probe operator points
    along the drive direction ``spec.b1_dir`` (the transverse coil axis).
    """
    if spec.frame != "lab":
        raise ConfigError(f"spectroscopy needs a lab-frame spec, got {spec.frame!r}")
    h = build_hamiltonian(replace(spec, b1=0.0), 0.0)
    energies, states = hermitian_eigensystem(h)
    drive_op = _axis_operator(spec.operators, spec.b1_dir.unit_vector)
    return _lines_from_eigensystem(
        energies, states, drive_op, _max_ladder_intensity(spec.spin), intensity_floor
    )


def scan_field_magnitude(
    spec: DonorSpec,
    b0_values: Sequence[float],
    intensity_floor: float = DEFAULT_INTENSITY_FLOOR,
) -> OrientationScan:
    """Spectra versus static-field magnitude at fixed orientation.

    Returns an :class:`OrientationScan` whose coordinate slots carry the
    strictly increasing field magnitudes in tesla.
    """
    values = tuple(float(b) for b in b0_values)
    spectra = tuple(
        nmr_spectrum(replace(spec, b0=b), intensity_floor=intensity_floor)
        for b in values
    )
    return OrientationScan(axis="b0-magnitude (T)", angles=values, spectra=spectra)


def _validated_plane(plane: Sequence[Sequence[float]]) -> Tuple[np.ndarray, np.ndarray]:
    try:
        u, v = (np.asarray(p, dtype=float).reshape(3) for p in plane)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"rotation plane must be two 3-vectors: {exc}") from None
    if abs(np.linalg.norm(u) - 1.0) > 1e-9 or abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ConfigError("rotation-plane vectors must be unit length")
    if abs(float(u @ v)) > 1e-9:
        raise ConfigError("rotation-plane vectors must be orthogonal")
    return u, v


def scan_field_orientation(
    spec: DonorSpec,
    plane: Sequence[Sequence[float]],
    angles: Sequence[float],
    intensity_floor: float = DEFAULT_INTENSITY_FLOOR,
) -> OrientationScan:
    """Spectra versus static-field direction rotated in a fixed plane.

    ``plane`` is an orthonormal pair (u, v) of lab-frame vectors; the field
    direction at scan angle chi is cos(chi) u + sin(chi) v, so the scan
    starts along u and reaches v at chi = pi/2. Spectra are even under
    chi -> chi + pi because reversing the field direction conjugates the
    static Hamiltonian by an antiunitary symmetry.
    """
    u, v = _validated_plane(plane)
    chis = tuple(float(a) for a in angles)
    spectra = []
    for chi in chis:
        direction = math.cos(chi) * u + math.sin(chi) * v
        rotated = replace(spec, b0_dir=SphereDirection.from_vector(direction))
        spectra.append(nmr_spectrum(rotated, intensity_floor=intensity_floor))
    axis = (
        f"b0 rotation in the plane spanned by {u.tolist()} and {v.tolist()}"
    )
    return OrientationScan(axis=axis, angles=chis, spectra=tuple(spectra))


def trace_branches(scan: OrientationScan) -> ScanBranches:
    """Trace continuous line branches through a scan for plotting.

    Lines at successive scan steps are joined greedily by nearest frequency,
    with ties broken by the most similar intensity. A line with no
    predecessor starts a new branch; a branch with no successor ends and is
    never revived. Entries outside a branch's lifetime are NaN.
    """
    n_steps = len(scan.angles)
    freq_rows: list[list[float]] = []
    inten_rows: list[list[float]] = []
    alive: dict[int, Tuple[float, float]] = {}  # branch index -> last (freq, inten)
    for step, lines in enumerate(scan.spectra):
        step_vals = [(ln.frequency, ln.intensity) for ln in lines]
        if step == 0:
            for f, w in step_vals:
                freq_rows.append([f])
                inten_rows.append([w])
                alive[len(freq_rows) - 1] = (f, w)
            continue
        for row in freq_rows:
            row.append(math.nan)
        for row in inten_rows:
            row.append(math.nan)
        candidates = sorted(
            (abs(f - last_f), abs(w - last_w), branch, j)
            for branch, (last_f, last_w) in alive.items()
            for j, (f, w) in enumerate(step_vals)
        )
        used_branches: set[int] = set()
        used_lines: set[int] = set()
        survivors: dict[int, Tuple[float, float]] = {}
        for _, _, branch, j in candidates:
            if branch in used_branches or j in used_lines:
                continue
            used_branches.add(branch)
            used_lines.add(j)
            f, w = step_vals[j]
            freq_rows[branch][step] = f
            inten_rows[branch][step] = w
            survivors[branch] = (f, w)
        for j, (f, w) in enumerate(step_vals):
            if j in used_lines:
                continue
            freq_rows.append([math.nan] * step + [f])
            inten_rows.append([math.nan] * step + [w])
            survivors[len(freq_rows) - 1] = (f, w)
        alive = survivors
    frequencies = np.full((len(freq_rows), n_steps), math.nan)
    intensities = np.full((len(freq_rows), n_steps), math.nan)
    for b, (fr, ir) in enumerate(zip(freq_rows, inten_rows)):
        frequencies[b, : len(fr)] = fr
        intensities[b, : len(ir)] = ir
    frequencies.setflags(write=False)
    intensities.setflags(write=False)
    return ScanBranches(frequencies=frequencies, intensities=intensities)


def estimate_quadrupole(
    lines: Sequence[SpectrumLine],
    min_intensity: float = 0.1,
    resolution: float = 1.0,
) -> QuadrupoleEstimate:
    """Infer the quadrupole strength from an aligned-field line ladder.

    Takes one spectrum measured with the static field along the quadrupole
    axis (or in the high-field regime), keeps the lines stronger than
    ``min_intensity``, and merges lines closer than ``resolution`` Hz into a
    single unresolved line. The resolved frequencies are fit against their
    ascending index by least squares; successive ladder lines are spaced by
    twice the quadrupole strength, so the estimate is slope / 2.

    Raises :class:`LineResolutionError` when fewer than 3 resolved lines
    remain, which also covers the zero-quadrupole case where the whole
    ladder collapses onto one frequency.
    """
    if resolution < 0.0:
        raise ConfigError(f"resolution must be >= 0, got {resolution}")
    freqs = sorted(ln.frequency for ln in lines if ln.intensity > min_intensity)
    clusters: list[list[float]] = []
    for f in freqs:
        if clusters and f - clusters[-1][-1] <= resolution:
            clusters[-1].append(f)
        else:
            clusters.append([f])
    resolved = np.array([sum(c) / len(c) for c in clusters])
    if len(resolved) < 3:
        raise LineResolutionError(
            f"insufficient resolved lines: need at least 3, got {len(resolved)}"
        )
    index = np.arange(len(resolved), dtype=float)
    slope, intercept = np.polyfit(index, resolved, 1)
    fit_residual = resolved - (slope * index + intercept)
    rms = float(np.sqrt(np.mean(fit_residual**2)))
    return QuadrupoleEstimate(q=float(slope) / 2.0, residual=rms, n_lines=len(resolved))


def _neutral_hamiltonians(spec: DonorSpec) -> Tuple[np.ndarray, np.ndarray, dict]:
    """Full and secular-coupling Hamiltonians on the electron x nucleus space."""
    electron = make_spin_operators(SpinQuantumNumber(1))
    nucleus = spec.operators
    dim_n = spec.dim
    eye_e = np.eye(2)
    eye_n = np.eye(dim_n)
    s_ops = [np.kron(op, eye_n) for op in electron]
    i_ops = [np.kron(eye_e, op) for op in nucleus]
    n0 = spec.b0_dir.unit_vector
    n1 = spec.b1_dir.unit_vector
    s0 = sum(c * op for c, op in zip(n0, s_ops))
    i0 = sum(c * op for c, op in zip(n0, i_ops))
    zeeman = spec.gamma_e * spec.b0 * s0 - spec.gamma_n * spec.b0 * i0
    quad = np.kron(eye_e, quadrupole_operator(spec))
    isotropic = sum(s @ i for s, i in zip(s_ops, i_ops))
    h_full = zeeman + spec.hyperfine_a * isotropic + quad
    h_secular = zeeman + spec.hyperfine_a * (s0 @ i0) + quad
    probes = {
        "electron": sum(c * op for c, op in zip(n1, s_ops)),
        "nucleus": sum(c * op for c, op in zip(n1, i_ops)),
        "s0": s0,
        "i0": i0,
    }
    return h_full, h_secular, probes


def _classified_lines(
    h: np.ndarray, probes: dict, spin: SpinQuantumNumber, intensity_floor: float
) -> dict:
    """Split the coupled-system lines into ESR and per-manifold NMR groups.

    A transition counts as an electron-flip (ESR) line when the two states
    sit in opposite electron manifolds, the nuclear projection along the
    field is preserved to better than 1/2, and the electron-probe intensity
    exceeds the floor. Nuclear-flip lines connect states within one electron
    manifold through the nuclear probe.
    """
    energies, states = hermitian_eigensystem(h)
    s_proj = np.real(np.einsum("ik,ij,jk->k", states.conj(), probes["s0"], states))
    i_proj = np.real(np.einsum("ik,ij,jk->k", states.conj(), probes["i0"], states))
    amp_e = states.conj().T @ probes["electron"] @ states
    amp_n = states.conj().T @ probes["nucleus"] @ states
    inten_e = np.abs(amp_e) ** 2 / 0.25
    inten_n = np.abs(amp_n) ** 2 / _max_ladder_intensity(spin)
    groups: dict = {"esr": [], "nmr_down": [], "nmr_up": []}
    dim = len(energies)
    for k in range(dim):
        for kp in range(k + 1, dim):
            freq = float(energies[kp] - energies[k])
            same_manifold = s_proj[k] * s_proj[kp] > 0.0
            if same_manifold:
                if inten_n[kp, k] > intensity_floor:
                    key = "nmr_down" if s_proj[k] < 0.0 else "nmr_up"
                    groups[key].append(
                        SpectrumLine(freq, float(inten_n[kp, k]), (k, kp))
                    )
            else:
                nuclear_preserved = abs(i_proj[kp] - i_proj[k]) < 0.5
                if nuclear_preserved and inten_e[kp, k] > intensity_floor:
                    groups["esr"].append(
                        SpectrumLine(freq, float(inten_e[kp, k]), (k, kp))
                    )
    for key, lines in groups.items():
        lines.sort(key=lambda ln: (ln.frequency, ln.level_pair))
        groups[key] = tuple(lines)
    return groups


def _group_deviation(
    full: Tuple[SpectrumLine, ...], secular: Tuple[SpectrumLine, ...]
) -> float:
    """Largest frequency shift between a full line and its nearest secular line."""
    if not full or not secular:
        return 0.0
    secular_freqs = np.array([ln.frequency for ln in secular])
    return max(
        float(np.min(np.abs(secular_freqs - ln.frequency))) for ln in full
    )


def neutral_donor_spectrum(
    spec: DonorSpec, intensity_floor: float = DEFAULT_INTENSITY_FLOOR
) -> NeutralDonorSpectrum:
    """Spectrum of the coupled electron-nucleus system in the neutral state.

    Builds the static Hamiltonian on the product space with the electron
    Zeeman term, the nuclear Zeeman term of opposite sign, the isotropic
    electron-nucleus coupling, and the quadrupole term, then classifies its
    transition lines into electron-flip lines (one per nuclear level, spaced
    by roughly the coupling strength) and nuclear-flip lines within each
    electron manifold. The same classification applied to the secular
    approximation, which keeps only the field-axis part of the coupling,
    yields ``max_deviation``: the largest line-frequency shift between the
    two treatments. With zero coupling the nuclear-flip groups reduce to the
    bare-nucleus spectrum.

    Requires the high-field regime (electron Zeeman at least five times the
    coupling strength) so the electron manifolds stay well separated.
    """
    if spec.frame != "lab":
        raise ConfigError(f"spectroscopy needs a lab-frame spec, got {spec.frame!r}")
    if spec.hyperfine_a < 0:
        raise ConfigError("hyperfine coupling must be non-negative")
    if spec.gamma_e * spec.b0 < 5.0 * spec.hyperfine_a:
        raise ConfigError(
            "neutral-donor spectroscopy needs the high-field regime "
            "(electron Zeeman >= 5x the hyperfine coupling)"
        )
    h_full, h_secular, probes = _neutral_hamiltonians(spec)
    full = _classified_lines(h_full, probes, spec.spin, intensity_floor)
    secular = _classified_lines(h_secular, probes, spec.spin, intensity_floor)
    deviation = max(
        _group_deviation(full[key], secular[key])
        for key in ("esr", "nmr_down", "nmr_up")
    )
    return NeutralDonorSpectrum(
        esr_lines=full["esr"],
        nmr_lines_down=full["nmr_down"],
        nmr_lines_up=full["nmr_up"],
        max_deviation=deviation,
    )
