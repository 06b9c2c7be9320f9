"""Simulation library for a periodically driven top.

The top is realized twice: classically as an angular-momentum ODE on the
unit sphere, and quantum-mechanically as a large nuclear spin with a
quadrupole interaction under a transverse oscillating drive. The package
computes stroboscopic chaos maps, divergence-exponent classifications,
Floquet quasienergies, dynamical-tunneling frequencies, purity maps under
parameter fluctuations, NMR/ESR spectra, and state-preparation pulse
sequences, with a deterministic CLI front end.
"""

from __future__ import annotations

from driventop.classical import (
    AngularMomentumState,
    ChaosConfig,
    ClassicalParams,
    ExponentMap,
    FractionResult,
    StroboscopicMap,
    chaotic_fraction,
    classical_to_dimensionless,
    classify_chaotic,
    exponent_map,
    hammer_inverse,
    hammer_projection,
    integrate,
    quantum_to_dimensionless,
    regular_island_centers,
    stroboscopic_map,
)
from driventop.errors import (
    AddressabilityError,
    ConfigError,
    DrivenTopError,
    IntegrationError,
    LineResolutionError,
    NumericalError,
    StateDecompositionError,
)
from driventop.presets import donor_presets
from driventop.quantum import (
    DonorSpec,
    FloquetEigensystem,
    FloquetOperator,
    FluctuationSpec,
    OverlapTrace,
    PurityMap,
    RfFields,
    RwaSystem,
    build_hamiltonian,
    build_rf_hamiltonian,
    evolve,
    floquet,
    floquet_eigensystem,
    overlap_trace,
    purity_map,
    quadrupole_operator,
    quadrupole_strength,
    rwa_reduce,
    tunneling_frequency,
)
from driventop.spectro import (
    OrientationScan,
    QuadrupoleEstimate,
    SpectrumLine,
    estimate_quadrupole,
    neutral_donor_spectrum,
    nmr_spectrum,
    scan_field_magnitude,
    scan_field_orientation,
)
from driventop.spinops import (
    SphereDirection,
    SpinQuantumNumber,
    hermitian_eigensystem,
    husimi_grid,
    husimi_q,
    make_spin_operators,
    purity,
    rotation_operator,
    spin_coherent_state,
    unitary_exp,
)
from driventop.stateprep import (
    CompileReport,
    Pulse,
    PulseSequence,
    fidelity,
)
from driventop.stateprep import compile as compile_pulses
from driventop.stateprep import simulate as simulate_pulses

__version__ = "0.1.0"

__all__ = [
    "AddressabilityError",
    "AngularMomentumState",
    "ChaosConfig",
    "ClassicalParams",
    "CompileReport",
    "ConfigError",
    "DonorSpec",
    "DrivenTopError",
    "ExponentMap",
    "FloquetEigensystem",
    "FloquetOperator",
    "FluctuationSpec",
    "FractionResult",
    "IntegrationError",
    "LineResolutionError",
    "NumericalError",
    "OrientationScan",
    "OverlapTrace",
    "Pulse",
    "PulseSequence",
    "PurityMap",
    "QuadrupoleEstimate",
    "RfFields",
    "RwaSystem",
    "SpectrumLine",
    "SphereDirection",
    "SpinQuantumNumber",
    "StateDecompositionError",
    "StroboscopicMap",
    "build_hamiltonian",
    "build_rf_hamiltonian",
    "chaotic_fraction",
    "classical_to_dimensionless",
    "classify_chaotic",
    "compile_pulses",
    "donor_presets",
    "estimate_quadrupole",
    "evolve",
    "exponent_map",
    "fidelity",
    "floquet",
    "floquet_eigensystem",
    "hammer_inverse",
    "hammer_projection",
    "hermitian_eigensystem",
    "husimi_grid",
    "husimi_q",
    "integrate",
    "make_spin_operators",
    "neutral_donor_spectrum",
    "nmr_spectrum",
    "overlap_trace",
    "purity",
    "purity_map",
    "quadrupole_operator",
    "quadrupole_strength",
    "quantum_to_dimensionless",
    "regular_island_centers",
    "rotation_operator",
    "rwa_reduce",
    "scan_field_magnitude",
    "scan_field_orientation",
    "simulate_pulses",
    "spin_coherent_state",
    "stroboscopic_map",
    "tunneling_frequency",
    "unitary_exp",
    "__version__",
]
