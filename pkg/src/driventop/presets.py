"""Nuclear constants of the group-V donor isotopes in silicon.

Each preset carries the constants needed to build a spin Hamiltonian for
one isotope: nuclear spin, gyromagnetic ratio, hyperfine coupling to the
donor electron, the neutral-donor 1s binding energy, and the literature
bracket for the bare nuclear quadrupole moment (spin-1/2 nuclei have none).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import ConfigError
from .quantum import DonorSpec
from .spinops import SpinQuantumNumber

__all__ = ["DonorPreset", "DONOR_NAMES", "donor_presets"]


@dataclass(frozen=True)
class DonorPreset:
    """Constants of one donor isotope.

    gamma_n is in Hz/T, hyperfine_a in Hz, binding_energy_mev in meV, and
    qn_range in m^2 as a (first, second) literature bracket — collapsed to
    a repeated value when only a single measurement is quoted, None for
    spin-1/2 nuclei whose symmetry forbids a quadrupole moment.
    """

    name: str
    spin: SpinQuantumNumber
    binding_energy_mev: float
    hyperfine_a: float
    gamma_n: float
    qn_range: Optional[Tuple[float, float]]

    def spec(self, b0: float, **overrides) -> DonorSpec:
        """Bare-nucleus (ionized donor) spec at static field b0, in tesla."""
        return DonorSpec(self.spin, self.gamma_n, b0, **overrides)


_PRESETS = {
    "P31": DonorPreset(
        name="P31",
        spin=SpinQuantumNumber(1),
        binding_energy_mev=45.59,
        hyperfine_a=117.53e6,
        gamma_n=17.26e6,
        qn_range=None,
    ),
    "As75": DonorPreset(
        name="As75",
        spin=SpinQuantumNumber(3),
        binding_energy_mev=53.76,
        hyperfine_a=198.35e6,
        gamma_n=7.31e6,
        qn_range=(0.314e-28, 0.314e-28),
    ),
    "Sb121": DonorPreset(
        name="Sb121",
        spin=SpinQuantumNumber(5),
        binding_energy_mev=42.74,
        hyperfine_a=186.80e6,
        gamma_n=10.26e6,
        qn_range=(-0.36e-28, -0.54e-28),
    ),
    "Sb123": DonorPreset(
        name="Sb123",
        spin=SpinQuantumNumber(7),
        binding_energy_mev=42.74,
        hyperfine_a=101.52e6,
        gamma_n=5.55e6,
        qn_range=(-0.49e-28, -0.69e-28),
    ),
    "Bi209": DonorPreset(
        name="Bi209",
        spin=SpinQuantumNumber(9),
        binding_energy_mev=70.98,
        hyperfine_a=1475.4e6,
        gamma_n=6.96e6,
        qn_range=(-0.37e-28, -0.77e-28),
    ),
}

DONOR_NAMES = tuple(_PRESETS)


def donor_presets(name: str) -> DonorPreset:
    """Look up one isotope's constants by name (e.g. "Sb123")."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown donor {name!r}; valid names: {', '.join(DONOR_NAMES)}"
        ) from None
