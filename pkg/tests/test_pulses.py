"""Pulse creation, propagation, absorption and whole-circuit symmetry maps."""

import math

import numpy as np
import pytest

from oracles import (
    gate_dense,
    kron_chain,
    naive_unitary,
    phase_mismatch,
    rotation_dense,
    unitary_fidelity,
    word_dense,
)
from sigmapulse import (
    BUFFER_NONE,
    BUFFER_RY,
    BUFFER_RYRX,
    BindingConflictError,
    BufferedCircuit,
    CapacityError,
    Cnot,
    FixedClifford,
    ParameterVector,
    PauliRotation,
    PauliWord,
    Pulse,
    SlotBinding,
    SymmetryTransform,
    UnabsorbablePulseError,
    absorb_in_buffer,
    apply_transform,
    commute_through_cnot,
    commute_through_fixed_clifford,
    commute_through_rotation,
    create_pulse,
    enumerate_transforms,
    random_buffered_circuit,
    reduce_domain,
    transform_fidelity,
)


def _rotation(n, letters_on, slot, multiplier=1, offset=0.0):
    letters = ["I"] * n
    for qubit, letter in letters_on:
        letters[qubit] = letter
    return PauliRotation(
        axis=PauliWord.from_letters("".join(letters)),
        binding=SlotBinding(slot=slot, multiplier=multiplier, offset=offset),
    )


def _buffer_dense(buffer, gamma, n):
    shell = BufferedCircuit(n=n, layers=(), buffer=buffer)
    return naive_unitary(shell, ParameterVector(theta=(), gamma=tuple(gamma)))


@pytest.mark.parametrize("letters", ["X", "Y", "Z", "XZ", "YY"])
def test_pi_shift_extracts_i_times_the_axis(letters):
    theta = 0.7
    shifted = (1j * kron_chain(letters)) @ rotation_dense(letters, theta + math.pi)
    assert np.allclose(shifted, rotation_dense(letters, theta), atol=1e-12)


def test_create_pulse_factors_the_unitary_around_the_generating_gate():
    layers = (
        (_rotation(2, [(0, "Y")], 0),),
        (Cnot(0, 1),),
        (_rotation(2, [(1, "Z")], 1),),
    )
    circuit = BufferedCircuit(n=2, layers=layers, buffer=BUFFER_RYRX)
    rng = np.random.default_rng(5)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    new_params, pulse, phase = create_pulse(circuit, params, 0)
    assert pulse.word == PauliWord.from_letters("YI").times_i(1)
    assert pulse.location == 1
    assert new_params.theta[0] == pytest.approx((params.theta[0] + math.pi) % (2 * math.pi))
    assert new_params.theta[1] == params.theta[1]
    assert new_params.gamma == params.gamma
    prefix = np.eye(4, dtype=complex)
    suffix = np.eye(4, dtype=complex)
    for layer_idx, _, gate in circuit.iter_gates():
        if layer_idx < pulse.location:
            prefix = gate_dense(gate, 2, new_params.theta) @ prefix
        else:
            suffix = gate_dense(gate, 2, params.theta) @ suffix
    suffix = _buffer_dense(BUFFER_RYRX, params.gamma, 2) @ suffix
    factored = (1j**phase) * suffix @ word_dense(pulse.word) @ prefix
    assert np.allclose(naive_unitary(circuit, params), factored, atol=1e-12)


def test_create_pulse_handles_negative_multipliers_and_wrapping():
    layers = ((_rotation(1, [(0, "X")], 0, multiplier=-1, offset=0.5 * math.pi),),)
    circuit = BufferedCircuit(n=1, layers=layers, buffer=BUFFER_RYRX)
    params = ParameterVector(theta=(5.5,), gamma=(0.3, 0.4))
    new_params, pulse, phase = create_pulse(circuit, params, 0)
    assert new_params.theta[0] == pytest.approx((5.5 + math.pi) % (2 * math.pi))
    before = gate_dense(circuit.layers[0][0], 1, params.theta)
    after = gate_dense(circuit.layers[0][0], 1, new_params.theta)
    assert np.allclose(before, (1j**phase) * word_dense(pulse.word) @ after, atol=1e-12)


def test_create_pulse_rejects_unknown_slots():
    circuit = BufferedCircuit(n=1, layers=((_rotation(1, [(0, "X")], 0),),))
    params = ParameterVector.zeros(circuit)
    with pytest.raises(ValueError, match="slot 7 has no bound gates"):
        create_pulse(circuit, params, 7)


@pytest.mark.parametrize(
    "word_text,axis,flips",
    [
        ("XI", "ZI", True),
        ("XI", "XI", False),
        ("iYI", "ZZ", True),
        ("ZI", "XZ", True),
        ("ZZ", "XX", False),
        ("-IX", "ZI", False),
    ],
)
def test_commuting_through_a_rotation_flips_exactly_on_anticommutation(
    word_text, axis, flips
):
    word = PauliWord.from_text(word_text)
    gate = PauliRotation(axis=PauliWord.from_letters(axis), binding=SlotBinding(slot=0))
    assert commute_through_rotation(word, gate) is flips
    theta = 0.9
    lhs = word_dense(word) @ rotation_dense(axis, theta)
    rhs = rotation_dense(axis, -theta if flips else theta) @ word_dense(word)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_identity_pulses_never_flip_rotations():
    gate = PauliRotation(axis=PauliWord.from_letters("XY"), binding=SlotBinding(slot=0))
    assert commute_through_rotation(PauliWord.identity(2).times_i(2), gate) is False


def test_commuting_through_a_cnot_conjugates_the_word():
    rng = np.random.default_rng(23)
    for _ in range(20):
        n = int(rng.integers(2, 4))
        x = int(rng.integers(0, 1 << n))
        z = int(rng.integers(0, 1 << n))
        word = PauliWord(n=n, x_bits=x, z_bits=z, phase_pow=int(rng.integers(0, 4)))
        control = int(rng.integers(0, n))
        target = int((control + 1 + rng.integers(0, n - 1)) % n)
        gate = Cnot(control, target)
        moved, phase = commute_through_cnot(word, gate)
        assert phase == 0
        cnot = gate_dense(gate, n, ())
        assert np.allclose(word_dense(moved), cnot @ word_dense(word) @ cnot, atol=1e-12)
        pulse_moved, _ = commute_through_cnot(Pulse(word=word, location=3), gate)
        assert pulse_moved.word == moved and pulse_moved.location == 3


@pytest.mark.parametrize("axis", ["x", "y", "z"])
@pytest.mark.parametrize("sign", [1, -1])
def test_commuting_through_a_fixed_clifford_matches_dense_conjugation(axis, sign):
    rng = np.random.default_rng(31)
    gate = FixedClifford(axis=axis, qubit=1, sign=sign)
    dense = gate_dense(gate, 2, ())
    for _ in range(12):
        word = PauliWord(
            n=2,
            x_bits=int(rng.integers(0, 4)),
            z_bits=int(rng.integers(0, 4)),
            phase_pow=int(rng.integers(0, 4)),
        )
        moved, phase = commute_through_fixed_clifford(word, gate)
        assert phase == 0
        assert np.allclose(
            word_dense(moved), dense @ word_dense(word) @ dense.conj().T, atol=1e-12
        )


@pytest.mark.parametrize(
    "text", ["XI", "YI", "ZI", "IX", "iYI", "-ZX", "YY", "-iXZ", "II", "iII"]
)
def test_absorbing_into_the_ryrx_buffer_reproduces_the_dense_identity(text):
    word = PauliWord.from_text(text)
    rng = np.random.default_rng(41)
    gamma = tuple(rng.uniform(0.0, 2.0 * math.pi, size=4))
    new_gamma, phase = absorb_in_buffer(word, gamma, BUFFER_RYRX)
    assert all(0.0 <= v < 2.0 * math.pi for v in new_gamma)
    lhs = _buffer_dense(BUFFER_RYRX, gamma, 2) @ word_dense(word)
    rhs = (1j**phase) * _buffer_dense(BUFFER_RYRX, new_gamma, 2)
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_absorbing_into_the_ry_buffer_takes_y_components_only():
    rng = np.random.default_rng(43)
    gamma = tuple(rng.uniform(0.0, 2.0 * math.pi, size=2))
    word = PauliWord.from_text("iYY")
    new_gamma, phase = absorb_in_buffer(word, gamma, BUFFER_RY)
    lhs = _buffer_dense(BUFFER_RY, gamma, 2) @ word_dense(word)
    rhs = (1j**phase) * _buffer_dense(BUFFER_RY, new_gamma, 2)
    assert np.allclose(lhs, rhs, atol=1e-10)
    with pytest.raises(UnabsorbablePulseError, match="cannot fold into a Ry buffer"):
        absorb_in_buffer(PauliWord.from_letters("XY"), gamma, BUFFER_RY)


def test_absorbing_into_no_buffer_only_accepts_phased_identities():
    new_gamma, phase = absorb_in_buffer(PauliWord.identity(2).times_i(3), (), BUFFER_NONE)
    assert new_gamma == () and phase == 3
    with pytest.raises(UnabsorbablePulseError, match="bufferless circuit"):
        absorb_in_buffer(PauliWord.from_letters("XI"), (), BUFFER_NONE)


def test_absorb_accepts_pulse_objects():
    gamma = (0.2, 0.3)
    pulse = Pulse(word=PauliWord.from_text("iY"), location=2)
    assert absorb_in_buffer(pulse, gamma[:2], BUFFER_RY) == absorb_in_buffer(
        pulse.word, gamma[:2], BUFFER_RY
    )


def test_apply_transform_reproduces_the_unitary_up_to_the_recorded_phase():
    rng = np.random.default_rng(101)
    checked = 0
    for trial in range(60):
        buffer = (BUFFER_RYRX, BUFFER_RY, BUFFER_RYRX)[trial % 3]
        circuit = random_buffered_circuit(
            rng,
            n=int(rng.integers(1, 5)),
            num_slots=int(rng.integers(1, 7)),
            buffer=buffer,
            multi_gate_prob=0.4 if trial % 2 else 0.0,
        )
        params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        subset = tuple(
            s for s in range(circuit.num_theta_slots) if rng.random() < 0.5
        )
        try:
            moved, transform = apply_transform(circuit, params, subset)
        except (BindingConflictError, UnabsorbablePulseError):
            # Shared slots with mixed flips, or non-Y words at a Ry buffer;
            # both are expected refusals, not symmetry failures.
            continue
        checked += 1
        before = naive_unitary(circuit, params)
        after = naive_unitary(circuit, moved)
        assert phase_mismatch(after, before, transform.global_phase_pow) <= 1e-9
        assert transform.apply(params) == moved
        assert transform.generators == tuple(sorted(set(subset)))
    assert checked >= 35


def test_transform_bits_do_not_depend_on_the_parameters():
    rng = np.random.default_rng(103)
    for _ in range(10):
        circuit = random_buffered_circuit(rng, n=3, num_slots=4, multi_gate_prob=0.0)
        subset = tuple(s for s in range(4) if rng.random() < 0.5)
        params_a = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        params_b = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        _, t_a = apply_transform(circuit, params_a, subset)
        _, t_b = apply_transform(circuit, params_b, subset)
        assert t_a.theta_bits == t_b.theta_bits
        assert t_a.gamma_bits == t_b.gamma_bits


def test_apply_transform_rejects_unknown_generator_slots():
    circuit = random_buffered_circuit(np.random.default_rng(0), n=2, num_slots=2)
    params = ParameterVector.zeros(circuit)
    with pytest.raises(ValueError, match="unknown theta slots \\[5\\]"):
        apply_transform(circuit, params, (0, 5))


def _conflict_circuit():
    layers = (
        (_rotation(1, [(0, "X")], 0),),
        (_rotation(1, [(0, "Z")], 1),),
        (_rotation(1, [(0, "X")], 0),),
    )
    return BufferedCircuit(n=1, layers=layers, buffer=BUFFER_RYRX)


def test_shared_slots_with_mixed_flips_raise_a_binding_conflict():
    circuit = _conflict_circuit()
    params = ParameterVector(theta=(0.7, 1.1), gamma=(0.2, 0.4))
    with pytest.raises(BindingConflictError, match="incompatible angle updates"):
        apply_transform(circuit, params, (1,))
    moved, transform = apply_transform(circuit, params, (0,))
    after = naive_unitary(circuit, moved)
    before = naive_unitary(circuit, params)
    assert phase_mismatch(after, before, transform.global_phase_pow) <= 1e-9


def test_flipped_folds_need_half_turn_offsets():
    def circuit_with(offset):
        layers = (
            (_rotation(1, [(0, "Z")], 0),),
            (_rotation(1, [(0, "X")], 1, offset=offset),),
        )
        return BufferedCircuit(n=1, layers=layers, buffer=BUFFER_RYRX)

    params = ParameterVector(theta=(0.7, 1.1), gamma=(0.2, 0.4))
    with pytest.raises(BindingConflictError, match="incompatible angle updates"):
        apply_transform(circuit_with(0.3), params, (0,))
    moved, transform = apply_transform(circuit_with(0.5 * math.pi), params, (0,))
    before = naive_unitary(circuit_with(0.5 * math.pi), params)
    after = naive_unitary(circuit_with(0.5 * math.pi), moved)
    assert phase_mismatch(after, before, transform.global_phase_pow) <= 1e-9


def test_enumerate_transforms_walks_every_subset_with_the_identity_first():
    layers = (
        (_rotation(2, [(0, "Y")], 0),),
        (Cnot(0, 1),),
        (_rotation(2, [(1, "X")], 1),),
        (_rotation(2, [(0, "Z")], 2),),
    )
    circuit = BufferedCircuit(n=2, layers=layers, buffer=BUFFER_RYRX)
    rng = np.random.default_rng(7)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    walked = list(enumerate_transforms(circuit, params))
    assert len(walked) == 8
    assert [subset for subset, _, _ in walked][:4] == [(), (0,), (1,), (0, 1)]
    assert {subset for subset, _, _ in walked} == {
        tuple(s for s in range(3) if mask >> s & 1) for mask in range(8)
    }
    empty_subset, moved, transform = walked[0]
    assert empty_subset == () and transform.is_identity
    assert moved == params.normalized()
    before = naive_unitary(circuit, params)
    for _, moved, transform in walked:
        after = naive_unitary(circuit, moved)
        assert phase_mismatch(after, before, transform.global_phase_pow) <= 1e-9


def test_enumerate_transforms_refuses_oversized_sweeps_unless_sampling():
    from sigmapulse import hardware_efficient_ansatz

    circuit = hardware_efficient_ansatz(3, 7, "y", buffer=BUFFER_RYRX)
    assert circuit.num_theta_slots == 21
    params = ParameterVector.zeros(circuit)
    with pytest.raises(CapacityError, match="cap is 20"):
        list(enumerate_transforms(circuit, params))
    sampled = list(
        enumerate_transforms(circuit, params, sample=5, rng=np.random.default_rng(1))
    )
    assert len(sampled) == 5
    with pytest.raises(ValueError, match="sample must be positive"):
        list(enumerate_transforms(circuit, params, sample=0))


def test_enumerate_transforms_can_skip_conflicting_subsets():
    circuit = _conflict_circuit()
    params = ParameterVector(theta=(0.7, 1.1), gamma=(0.2, 0.4))
    with pytest.raises(BindingConflictError):
        list(enumerate_transforms(circuit, params))
    kept = list(enumerate_transforms(circuit, params, skip_conflicts=True))
    assert [subset for subset, _, _ in kept] == [(), (0,)]


def test_reduce_domain_lands_every_theta_in_the_half_interval():
    rng = np.random.default_rng(211)
    for trial in range(30):
        circuit = random_buffered_circuit(
            rng,
            n=int(rng.integers(1, 5)),
            num_slots=int(rng.integers(1, 6)),
            multi_gate_prob=0.0,
        )
        params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        reduced = reduce_domain(circuit, params)
        assert all(0.0 <= v < math.pi for v in reduced.theta)
        fidelity = unitary_fidelity(
            naive_unitary(circuit, params), naive_unitary(circuit, reduced)
        )
        assert fidelity >= 1.0 - 1e-10
        assert reduce_domain(circuit, reduced) == reduced


def test_transform_fidelity_accepts_transforms_and_raw_parameters():
    rng = np.random.default_rng(17)
    circuit = random_buffered_circuit(rng, n=2, num_slots=3, multi_gate_prob=0.0)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    moved, transform = apply_transform(circuit, params, (1,))
    via_transform = transform_fidelity(circuit, params, transform)
    via_params = transform_fidelity(circuit, params, moved)
    assert via_transform == pytest.approx(1.0, abs=1e-12)
    assert via_params == pytest.approx(via_transform, abs=1e-12)
    oracle = unitary_fidelity(
        naive_unitary(circuit, params), naive_unitary(circuit, moved)
    )
    assert via_params == pytest.approx(oracle, abs=1e-10)


def test_beta_flags_transformed_angles_in_the_upper_half_interval():
    transform = SymmetryTransform(
        generators=(0,), theta_bits=((0, 1), (0, 0)), gamma_bits=()
    )
    params = ParameterVector(theta=(0.4, 2.0), gamma=())
    moved = transform.apply(params)
    assert moved.theta[0] == pytest.approx(0.4 + math.pi)
    assert transform.beta(params) == (1, 0)


def test_symmetry_transform_json_round_trip_and_validation():
    transform = SymmetryTransform(
        generators=(0, 2),
        theta_bits=((1, 0), (0, 1), (0, 0)),
        gamma_bits=((0, 1),),
        global_phase_pow=7,
    )
    assert transform.global_phase_pow == 3
    rebuilt = SymmetryTransform.from_json(transform.to_json())
    assert rebuilt == transform
    with pytest.raises(ValueError, match="bits must be 0 or 1"):
        SymmetryTransform(generators=(), theta_bits=((0, 2),), gamma_bits=())
    with pytest.raises(ValueError, match="expected 3 thetas"):
        transform.apply(ParameterVector(theta=(0.1,), gamma=(0.2,)))
    with pytest.raises(ValueError, match="expected 1 gammas"):
        transform.apply(ParameterVector(theta=(0.1, 0.2, 0.3), gamma=()))
