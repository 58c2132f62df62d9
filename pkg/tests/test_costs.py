"""Hamiltonians, target states and the compile/expectation cost functions."""

import math

import numpy as np
import pytest

from oracles import ground_state, singlet_product, xxx_dense
from sigmapulse import (
    CapacityError,
    CompileOverlap,
    DensityMatrix,
    Dephasing,
    DimensionError,
    Expectation,
    Hamiltonian,
    NoiseModel,
    ParameterVector,
    PauliWord,
    compile_cost,
    expectation_cost,
    hamiltonian_from_text,
    hamiltonian_to_text,
    hardware_efficient_ansatz,
    hva_xxx_ansatz,
    improvement_pct,
    run_noisy,
    w_state,
    xxx_bond_hamiltonians,
    xxx_hamiltonian,
)


def test_xxx_hamiltonian_lists_three_terms_per_ring_bond():
    ham = xxx_hamiltonian(4)
    assert len(ham.terms) == 12
    assert all(coeff == 1.0 for coeff, _ in ham.terms)
    assert all(word.weight == 2 for _, word in ham.terms)
    assert ham.n == 4
    with pytest.raises(DimensionError, match="at least 2"):
        xxx_hamiltonian(1)


@pytest.mark.parametrize(
    "n,ground,top",
    [(2, -6.0, 2.0), (4, -8.0, 4.0), (6, -11.211102550928, 6.0)],
)
def test_xxx_spectrum_anchors(n, ground, top):
    low, high = xxx_hamiltonian(n).eigen_extremes()
    assert low == pytest.approx(ground, abs=1e-9)
    assert high == pytest.approx(top, abs=1e-9)
    assert xxx_hamiltonian(n).ground_energy() == pytest.approx(ground, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_xxx_matrix_matches_the_dense_oracle(n):
    assert np.allclose(xxx_hamiltonian(n).matrix, xxx_dense(n), atol=1e-12)


def test_bond_split_partitions_the_ring():
    odd, even = xxx_bond_hamiltonians(4)
    assert len(odd.terms) == 6 and len(even.terms) == 6
    assert {tuple(sorted(word.support)) for _, word in even.terms} == {(0, 1), (2, 3)}
    assert {tuple(sorted(word.support)) for _, word in odd.terms} == {(1, 2), (0, 3)}
    assert np.allclose(odd.matrix + even.matrix, xxx_hamiltonian(4).matrix, atol=1e-12)
    with pytest.raises(DimensionError, match="even qubit count"):
        xxx_bond_hamiltonians(3)


def test_w_state_is_the_uniform_weight_one_superposition():
    vec = w_state(3)
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)
    assert vec[0] == 0.0
    for index in (4, 2, 1):
        assert vec[index] == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-12)
    assert sum(1 for v in vec if v != 0) == 3
    with pytest.raises(DimensionError, match="at least one qubit"):
        w_state(0)


@pytest.mark.parametrize("n,energy", [(4, -6.0), (6, -9.0)])
def test_singlet_products_hit_the_even_bond_energy(n, energy):
    value = xxx_hamiltonian(n).expectation(singlet_product(n))
    assert value == pytest.approx(energy, abs=1e-9)


def test_hamiltonian_expectation_accepts_density_matrices():
    ham = xxx_hamiltonian(2)
    vec = singlet_product(2)
    dense = DensityMatrix.from_state(vec)
    assert ham.expectation(dense) == pytest.approx(ham.expectation(vec), abs=1e-12)


def test_hamiltonian_validation():
    with pytest.raises(ValueError, match="at least one term"):
        Hamiltonian(terms=())
    with pytest.raises(DimensionError, match="mixed qubit counts"):
        Hamiltonian(
            terms=(
                (1.0, PauliWord.from_letters("X")),
                (1.0, PauliWord.from_letters("XX")),
            )
        )
    with pytest.raises(ValueError, match="is not Hermitian"):
        Hamiltonian(terms=((1.0, PauliWord.from_letters("X").times_i(1)),))
    with pytest.raises(ValueError, match="finite"):
        Hamiltonian(terms=((math.inf, PauliWord.from_letters("X")),))
    with pytest.raises(CapacityError, match="12 qubits"):
        xxx_hamiltonian(13).to_matrix()


def test_hamiltonian_text_round_trip():
    text = "1.0 XX  # coupling\n\n-0.5 ZI\n# full comment line\n2 -YY\n"
    ham = hamiltonian_from_text(text)
    assert len(ham.terms) == 3
    assert ham.terms[1] == (-0.5, PauliWord.from_letters("ZI"))
    assert ham.terms[2] == (2.0, PauliWord.from_text("-YY"))
    round_tripped = hamiltonian_from_text(hamiltonian_to_text(ham))
    assert round_tripped == ham
    with pytest.raises(ValueError, match="line 2: expected 'coeff word'"):
        hamiltonian_from_text("1.0 XX\nbogus\n")


def test_improvement_pct_follows_the_reference_formula():
    assert improvement_pct(-7.0, -6.3, -8.0) == pytest.approx(8.75, abs=1e-12)
    assert improvement_pct(-6.3, -7.0, -8.0) == pytest.approx(-8.75, abs=1e-12)
    with pytest.raises(ValueError, match="nonzero"):
        improvement_pct(-1.0, -2.0, 0.0)


def test_compile_overlap_requires_normalized_targets_of_matching_size():
    with pytest.raises(ValueError, match="must be normalized"):
        CompileOverlap(target=np.ones(4))
    overlap = CompileOverlap(target=w_state(3))
    assert overlap.n == 3
    with pytest.raises(DimensionError, match="target is on 3 qubits"):
        overlap.bind(hardware_efficient_ansatz(2, 1, "y"))


def test_compile_overlap_costs_against_known_states():
    circuit = hardware_efficient_ansatz(3, 2, "y")
    zeros = ParameterVector.zeros(circuit)
    overlap = CompileOverlap(target=w_state(3))
    # At zero angles the circuit leaves |000>, orthogonal to the W state.
    assert overlap.evaluate(circuit, zeros) == pytest.approx(1.0, abs=1e-12)
    rng = np.random.default_rng(7)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    from sigmapulse import CircuitEvaluator

    produced = CircuitEvaluator(circuit).state(params)
    matching = CompileOverlap(target=produced)
    assert matching.evaluate(circuit, params) == pytest.approx(0.0, abs=1e-12)
    assert overlap.bind(circuit)(params) == overlap.evaluate(circuit, params)


def test_compile_overlap_noisy_path_matches_a_manual_trace():
    circuit = hardware_efficient_ansatz(3, 1, "y")
    rng = np.random.default_rng(11)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    target = w_state(3)
    empty = NoiseModel.none(3, circuit.num_layers + 2)
    noiseless = CompileOverlap(target=target).evaluate(circuit, params)
    via_empty = CompileOverlap(target=target).evaluate(circuit, params, empty)
    assert via_empty == pytest.approx(noiseless, abs=1e-12)
    model = NoiseModel.uniform(3, circuit.num_layers + 2, Dephasing(q=0.1))
    rho = run_noisy(circuit, params, model)
    manual = 1.0 - float(np.real(target.conj() @ rho.data @ target))
    noisy = CompileOverlap(target=target).evaluate(circuit, params, model)
    assert noisy == pytest.approx(manual, abs=1e-12)
    assert noisy > noiseless - 1e-12


def test_expectation_cost_reproduces_the_singlet_energy_at_zero_angles():
    circuit, start = hva_xxx_ansatz(4, 1)
    zeros = ParameterVector.zeros(circuit)
    cost = Expectation(hamiltonian=xxx_hamiltonian(4), input_state=start)
    assert cost.evaluate(circuit, zeros) == pytest.approx(-6.0, abs=1e-9)
    with pytest.raises(DimensionError, match="Hamiltonian is on 4 qubits"):
        cost.bind(hardware_efficient_ansatz(3, 1, "y"))


def test_expectation_noisy_path_matches_a_manual_trace():
    circuit, start = hva_xxx_ansatz(4, 1)
    rng = np.random.default_rng(13)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    model = NoiseModel.uniform(4, circuit.num_layers + 2, Dephasing(q=0.05))
    cost = Expectation(hamiltonian=xxx_hamiltonian(4), input_state=start)
    rho = run_noisy(circuit, params, model, input_state=start)
    manual = float(np.trace(xxx_hamiltonian(4).matrix @ rho.data).real)
    assert cost.evaluate(circuit, params, model) == pytest.approx(manual, abs=1e-10)


def test_cost_conveniences_match_the_class_paths():
    circuit = hardware_efficient_ansatz(3, 1, "y")
    rng = np.random.default_rng(17)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    target = w_state(3)
    assert compile_cost(circuit, params, None, target) == pytest.approx(
        CompileOverlap(target=target).evaluate(circuit, params), abs=1e-15
    )
    circuit, start = hva_xxx_ansatz(4, 1)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    ham = xxx_hamiltonian(4)
    assert expectation_cost(circuit, params, None, ham, start) == pytest.approx(
        Expectation(hamiltonian=ham, input_state=start).evaluate(circuit, params),
        abs=1e-15,
    )


def test_ground_energies_agree_with_the_independent_eigensolver():
    for n in (2, 3, 4):
        ham = xxx_hamiltonian(n)
        energy, _ = ground_state(xxx_dense(n))
        assert ham.ground_energy() == pytest.approx(energy, abs=1e-9)
