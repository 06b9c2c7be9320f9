"""Pulse compilation for pure-state preparation: resonant-transfer duration
and phase rules, addressability failures on degenerate or uncoupled spectra,
the duration budget, JSON serialization, and the time-dependent playback
simulator that verifies compiled sequences."""

import dataclasses
import json
from dataclasses import replace

import numpy as np
import pytest

from driventop.errors import AddressabilityError, ConfigError, IntegrationError
from driventop.quantum import DonorSpec, RfFields, build_hamiltonian
from driventop.spinops import (
    SphereDirection,
    SpinQuantumNumber,
    hermitian_eigensystem,
    spin_coherent_state,
)
from driventop.stateprep import (
    MAX_SEQUENCE_DURATION,
    CompileReport,
    Pulse,
    PulseSequence,
    compile,
    fidelity,
    simulate,
)

GAMMA_N = 5.55e6
I72 = SpinQuantumNumber(7)
HALF = SpinQuantumNumber(1)
REFERENCE = DonorSpec(I72, GAMMA_N, 0.7, q=1e6)
REFERENCE_HALF = DonorSpec(HALF, GAMMA_N, 0.7)


def reference_target() -> np.ndarray:
    return spin_coherent_state(I72, SphereDirection(4 * np.pi / 5, np.pi / 2))


def static_eigensystem(spec: DonorSpec):
    return hermitian_eigensystem(build_hamiltonian(replace(spec, b1=0.0), 0.0))


def haar_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


@pytest.fixture(scope="module")
def reference_compiled():
    return compile(reference_target(), REFERENCE, 1e-3)


@pytest.fixture(scope="module")
def two_level_compiled():
    _, states = static_eigensystem(REFERENCE_HALF)
    sequence, report = compile(states[:, 1], REFERENCE_HALF, 1e-3)
    return sequence, report, states


def valid_pulse(**overrides) -> Pulse:
    fields = dict(
        frequency=1e6, duration=1e-5, phase=0.0, amplitude=1e-3, level_pair=(0, 1)
    )
    fields.update(overrides)
    return Pulse(**fields)


class TestPulse:
    def test_rejects_negative_frequency(self):
        with pytest.raises(ConfigError):
            valid_pulse(frequency=-1.0)

    def test_rejects_nonpositive_duration(self):
        for duration in (0.0, -1e-6):
            with pytest.raises(ConfigError):
                valid_pulse(duration=duration)

    def test_rejects_nonpositive_amplitude(self):
        for amplitude in (0.0, -1e-3):
            with pytest.raises(ConfigError):
                valid_pulse(amplitude=amplitude)

    def test_is_immutable(self):
        pulse = valid_pulse()
        with pytest.raises(dataclasses.FrozenInstanceError):
            pulse.frequency = 2e6


class TestPulseSequence:
    def test_total_duration_sums_pulses(self):
        _, states = static_eigensystem(REFERENCE_HALF)
        seq = PulseSequence(
            pulses=(valid_pulse(duration=1e-5), valid_pulse(duration=3e-5)),
            spec=REFERENCE_HALF,
            target=states[:, 1],
        )
        assert seq.total_duration == pytest.approx(4e-5, rel=1e-15)

    def test_rejects_overlong_sequence(self):
        _, states = static_eigensystem(REFERENCE_HALF)
        with pytest.raises(ConfigError):
            PulseSequence(
                pulses=(valid_pulse(duration=2 * MAX_SEQUENCE_DURATION),),
                spec=REFERENCE_HALF,
                target=states[:, 1],
            )

    def test_rejects_unnormalized_target(self):
        with pytest.raises(ConfigError):
            PulseSequence(
                pulses=(), spec=REFERENCE_HALF, target=np.array([2.0, 0.0])
            )

    def test_empty_sequence_has_zero_duration(self):
        _, states = static_eigensystem(REFERENCE_HALF)
        seq = PulseSequence(pulses=(), spec=REFERENCE_HALF, target=states[:, 0])
        assert seq.total_duration == 0.0

    def test_json_dict_schema(self, reference_compiled):
        sequence, _ = reference_compiled
        payload = sequence.to_json_dict()
        assert set(payload) == {"pulses", "total_duration"}
        assert payload["total_duration"] == pytest.approx(sequence.total_duration)
        assert len(payload["pulses"]) == len(sequence.pulses)
        for entry, pulse in zip(payload["pulses"], sequence.pulses):
            assert set(entry) == {
                "frequency",
                "duration",
                "phase",
                "amplitude",
                "level_pair",
            }
            assert entry["frequency"] == pulse.frequency
            assert entry["duration"] == pulse.duration
            assert entry["phase"] == pulse.phase
            assert entry["amplitude"] == pulse.amplitude
            assert tuple(entry["level_pair"]) == pulse.level_pair
        round_trip = json.loads(json.dumps(payload))
        assert round_trip == payload


class TestCompileReport:
    def test_rejects_out_of_range_fidelity(self):
        for bad in (-0.1, 1.1):
            with pytest.raises(ConfigError):
                CompileReport(predicted_fidelity=bad, per_step_populations=())

    def test_clamps_roundoff_above_one(self):
        report = CompileReport(
            predicted_fidelity=1.0 + 1e-12, per_step_populations=()
        )
        assert report.predicted_fidelity == 1.0


class TestFidelity:
    def test_identical_states_give_one(self):
        psi = spin_coherent_state(I72, SphereDirection(1.0, 2.0))
        assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_states_give_zero(self):
        _, states = static_eigensystem(REFERENCE)
        assert fidelity(states[:, 0], states[:, 3]) == pytest.approx(0.0, abs=1e-12)

    def test_coherent_pair_overlap_law(self):
        phi = 0.2
        for theta_a, theta_b in ((0.3, 1.1), (0.0, 2.0), (1.4, 1.9)):
            a = spin_coherent_state(I72, SphereDirection(theta_a, phi))
            b = spin_coherent_state(I72, SphereDirection(theta_b, phi))
            law = np.cos((theta_b - theta_a) / 2.0) ** I72.two_i
            assert fidelity(a, b) == pytest.approx(law, abs=1e-12)

    def test_dimension_mismatch_rejected(self):
        _, big = static_eigensystem(REFERENCE)
        _, small = static_eigensystem(REFERENCE_HALF)
        with pytest.raises(ConfigError):
            fidelity(big[:, 0], small[:, 0])


class TestCompileStructure:
    def test_ground_target_compiles_to_empty_sequence(self):
        _, states = static_eigensystem(REFERENCE)
        sequence, report = compile(states[:, 0], REFERENCE, 1e-3)
        assert sequence.pulses == ()
        assert report.predicted_fidelity == pytest.approx(1.0, abs=1e-12)
        assert len(report.per_step_populations) == 1
        assert report.per_step_populations[0][0] == pytest.approx(1.0, abs=1e-12)

    def test_pulse_count_bounded_by_dimension(self, reference_compiled):
        sequence, _ = reference_compiled
        assert 0 < len(sequence.pulses) <= REFERENCE.dim - 1

    def test_stays_within_duration_budget(self, reference_compiled):
        sequence, _ = reference_compiled
        assert sequence.total_duration < MAX_SEQUENCE_DURATION
        assert 1.0e-4 < sequence.total_duration < 2.0e-4

    def test_pulse_frequencies_match_level_gaps(self, reference_compiled):
        sequence, _ = reference_compiled
        energies, _ = static_eigensystem(REFERENCE)
        for pulse in sequence.pulses:
            low, high = pulse.level_pair
            assert low < high
            gap = energies[high] - energies[low]
            assert pulse.frequency == pytest.approx(gap, rel=1e-12)

    def test_pulses_carry_requested_amplitude(self, reference_compiled):
        sequence, _ = reference_compiled
        assert all(p.amplitude == 1e-3 for p in sequence.pulses)

    def test_per_step_populations_form_a_staircase(self, reference_compiled):
        sequence, report = reference_compiled
        table = np.array(report.per_step_populations)
        assert table.shape == (len(sequence.pulses) + 1, REFERENCE.dim)
        np.testing.assert_allclose(table.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(
            table[0], np.eye(REFERENCE.dim)[0], atol=1e-12
        )
        _, states = static_eigensystem(REFERENCE)
        target_pops = np.abs(states.conj().T @ reference_target()) ** 2
        np.testing.assert_allclose(table[-1], target_pops, atol=1e-12)


class TestCompileFidelity:
    def test_reference_target_fidelity(self, reference_compiled):
        _, report = reference_compiled
        assert abs(report.predicted_fidelity - 0.9989) <= 0.003

    def test_haar_targets_reach_high_fidelity(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            _, report = compile(haar_state(rng, REFERENCE.dim), REFERENCE, 1e-3)
            assert report.predicted_fidelity >= 0.99

    def test_fidelity_monotone_in_inverse_drive_amplitude(self):
        targets = [
            reference_target(),
            haar_state(np.random.default_rng(7), REFERENCE.dim),
        ]
        for target in targets:
            fids = [
                compile(target, REFERENCE, b1)[1].predicted_fidelity
                for b1 in (2e-3, 1e-3, 0.5e-3)
            ]
            assert fids[0] < fids[1] < fids[2]

    def test_report_matches_fresh_simulation(self, reference_compiled):
        sequence, report = reference_compiled
        _, states = static_eigensystem(REFERENCE)
        final = simulate(sequence, REFERENCE, states[:, 0])
        assert fidelity(final, reference_target()) == pytest.approx(
            report.predicted_fidelity, abs=1e-3
        )


class TestTwoLevelPulseConvention:
    def test_full_transfer_duration_is_inverse_rabi_rate(self, two_level_compiled):
        sequence, _, _ = two_level_compiled
        assert len(sequence.pulses) == 1
        pulse = sequence.pulses[0]
        assert pulse.duration == pytest.approx(1.0 / (GAMMA_N * 1e-3), rel=1e-12)
        assert pulse.frequency == pytest.approx(GAMMA_N * 0.7, rel=1e-12)

    def test_full_transfer_leakage_below_one_percent(self, two_level_compiled):
        sequence, _, states = two_level_compiled
        final = simulate(sequence, REFERENCE_HALF, states[:, 0])
        leakage = 1.0 - abs(np.vdot(final, states[:, 1])) ** 2
        assert leakage < 1e-2

    def test_half_duration_pulse_splits_population_evenly(self, two_level_compiled):
        sequence, _, states = two_level_compiled
        full = sequence.pulses[0]
        half_pulse = Pulse(
            frequency=full.frequency,
            duration=full.duration / 2.0,
            phase=full.phase,
            amplitude=full.amplitude,
            level_pair=full.level_pair,
        )
        half_seq = PulseSequence(
            pulses=(half_pulse,), spec=REFERENCE_HALF, target=states[:, 1]
        )
        out = simulate(half_seq, REFERENCE_HALF, states[:, 0])
        populations = np.abs(states.conj().T @ out) ** 2
        np.testing.assert_allclose(populations, [0.5, 0.5], atol=1e-2)


class TestAddressability:
    def test_degenerate_ladder_rejected(self):
        degenerate = DonorSpec(I72, GAMMA_N, 0.7, q=0.0)
        with pytest.raises(AddressabilityError, match="addressability violated"):
            compile(reference_target(), degenerate, 1e-3)

    def test_strong_drive_rejected(self):
        with pytest.raises(AddressabilityError, match="addressability violated"):
            compile(reference_target(), REFERENCE, 20e-3)

    def test_uncoupled_target_rejected(self):
        longitudinal = DonorSpec(
            HALF, GAMMA_N, 0.7, b1_dir=SphereDirection(0.0, 0.0)
        )
        _, states = static_eigensystem(longitudinal)
        with pytest.raises(AddressabilityError, match="no allowed transition"):
            compile(states[:, 1], longitudinal, 1e-3)


class TestCompileValidation:
    def test_rejects_nonpositive_drive_amplitude(self):
        for b1 in (0.0, -1e-3):
            with pytest.raises(ConfigError):
                compile(reference_target(), REFERENCE, b1)

    def test_rejects_wrong_target_dimension(self):
        _, states = static_eigensystem(REFERENCE_HALF)
        with pytest.raises(ConfigError):
            compile(states[:, 0], REFERENCE, 1e-3)

    def test_rejects_non_lab_frame(self):
        rf_spec = replace(
            REFERENCE, frame="rf", rf_fields=RfFields(1e-3, 0.0, 3.885e6)
        )
        with pytest.raises(ConfigError):
            compile(reference_target(), rf_spec, 1e-3)

    def test_budget_parameter_caps_total_duration(self):
        with pytest.raises(ConfigError):
            compile(reference_target(), REFERENCE, 1e-3, max_duration=5e-5)


class TestSimulate:
    def test_empty_sequence_returns_state_unchanged(self):
        _, states = static_eigensystem(REFERENCE)
        seq = PulseSequence(pulses=(), spec=REFERENCE, target=states[:, 0])
        psi0 = spin_coherent_state(I72, SphereDirection(0.7, 0.1))
        out = simulate(seq, REFERENCE, psi0)
        np.testing.assert_array_equal(out, psi0)

    def test_norm_preserved(self, reference_compiled):
        sequence, _ = reference_compiled
        _, states = static_eigensystem(REFERENCE)
        final = simulate(sequence, REFERENCE, states[:, 0])
        assert abs(np.linalg.norm(final) - 1.0) < 1e-12

    def test_zero_frequency_pulse_rejected(self):
        _, states = static_eigensystem(REFERENCE_HALF)
        seq = PulseSequence(
            pulses=(valid_pulse(frequency=0.0),),
            spec=REFERENCE_HALF,
            target=states[:, 1],
        )
        with pytest.raises(IntegrationError, match="segmentation underflow"):
            simulate(seq, REFERENCE_HALF, states[:, 0])

    def test_dimension_mismatch_rejected(self, reference_compiled):
        sequence, _ = reference_compiled
        _, states = static_eigensystem(REFERENCE_HALF)
        with pytest.raises(ConfigError):
            simulate(sequence, REFERENCE, states[:, 0])
