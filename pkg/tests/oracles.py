"""Independent dense oracles for cross-checking the fast implementations.

Everything here is built the slow, literal way: explicit Kronecker products,
matrix exponentials and basis-index embeddings.  None of the evaluation code
is shared with the package, so agreement between the two is evidence, not
tautology.  Qubit 0 is the most significant bit of a basis index.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def kron_chain(letters: str) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for letter in letters:
        out = np.kron(out, PAULI[letter])
    return out


def word_dense(word) -> np.ndarray:
    """Dense matrix of a PauliWord built from its bits, X factor before Z."""
    out = np.array([[1.0 + 0.0j]])
    for qubit in range(word.n):
        x, z = word.bits_at(qubit)
        block = np.eye(2, dtype=complex)
        if x:
            block = block @ PAULI["X"]
        if z:
            block = block @ PAULI["Z"]
        out = np.kron(out, block)
    return (1j**word.phase_pow) * out


def embed(op: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Embed a k-qubit operator on the given qubits of an n-qubit register.

    Index bookkeeping only: full[i, j] = op[sub_i, sub_j] when the remaining
    bits agree, with qubits[0] the most significant bit of the sub index.
    """
    dim = 1 << n
    k = len(qubits)
    idx = np.arange(dim)
    sub = np.zeros(dim, dtype=int)
    for pos, qubit in enumerate(qubits):
        sub |= ((idx >> (n - 1 - qubit)) & 1) << (k - 1 - pos)
    rest = np.zeros(dim, dtype=int)
    pos = 0
    for qubit in range(n):
        if qubit in qubits:
            continue
        rest |= ((idx >> (n - 1 - qubit)) & 1) << pos
        pos += 1
    return op[sub[:, None], sub[None, :]] * (rest[:, None] == rest[None, :])


def cnot_dense(control: int, target: int, n: int) -> np.ndarray:
    small = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        c, t = i >> 1 & 1, i & 1
        small[(c << 1) | (t ^ c), i] = 1.0
    return embed(small, (control, target), n)


def rotation_dense(letters: str, angle: float) -> np.ndarray:
    """exp(-i * angle * P / 2) via the matrix exponential."""
    return expm(-0.5j * angle * kron_chain(letters))


def gate_dense(gate, n: int, theta: tuple[float, ...]) -> np.ndarray:
    """Full-register dense matrix of one circuit gate."""
    from sigmapulse import Cnot, FixedClifford, PauliRotation

    if isinstance(gate, PauliRotation):
        full = kron_chain("".join(gate.axis.letter_at(q) for q in range(n)))
        return expm(-0.5j * gate.binding.angle(theta) * full)
    if isinstance(gate, Cnot):
        return cnot_dense(gate.control, gate.target, n)
    if isinstance(gate, FixedClifford):
        half_turn = gate.sign * np.pi / 2.0
        return embed(rotation_dense(gate.axis.upper(), half_turn), (gate.qubit,), n)
    raise TypeError(f"unknown gate {gate!r}")


def naive_unitary(circuit, params) -> np.ndarray:
    """Multiply out every gate and buffer rotation as a full dense matrix."""
    n = circuit.n
    out = np.eye(1 << n, dtype=complex)
    for _, _, gate in circuit.iter_gates():
        out = gate_dense(gate, n, params.theta) @ out
    for qubit, letter, index in circuit.buffer_rotations():
        small = rotation_dense(letter, params.gamma[index])
        out = embed(small, (qubit,), n) @ out
    return out


def phase_mismatch(after: np.ndarray, before: np.ndarray, phase_pow: int) -> float:
    """Entrywise distance of ``after`` from ``i**phase_pow * before``."""
    return float(np.max(np.abs(after - (1j**phase_pow) * before)))


def unitary_fidelity(left: np.ndarray, right: np.ndarray) -> float:
    return float(abs(np.trace(left.conj().T @ right)) / left.shape[0])


def apply_channel_dense(
    rho: np.ndarray, kraus: list[np.ndarray], qubits: tuple[int, ...], n: int
) -> np.ndarray:
    """sum_K K rho K^dag with every Kraus operator embedded to the register."""
    out = np.zeros_like(rho)
    for k in kraus:
        full = embed(k, qubits, n)
        out += full @ rho @ full.conj().T
    return out


def naive_noisy_run(circuit, params, noise, rho: np.ndarray | None = None) -> np.ndarray:
    """Density-matrix evolution with literal per-gate matrix conjugation."""
    n = circuit.n
    dim = 1 << n
    if rho is None:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0

    def boundary(state: np.ndarray, index: int) -> np.ndarray:
        if noise is None:
            return state
        for qubits, channel in noise.boundaries[index]:
            state = apply_channel_dense(state, channel.kraus(), tuple(qubits), n)
        return state

    rho = boundary(rho, 0)
    for layer_idx, layer in enumerate(circuit.layers):
        for gate in layer:
            full = gate_dense(gate, n, params.theta)
            rho = full @ rho @ full.conj().T
        rho = boundary(rho, layer_idx + 1)
    for qubit, letter, index in circuit.buffer_rotations():
        full = embed(rotation_dense(letter, params.gamma[index]), (qubit,), n)
        rho = full @ rho @ full.conj().T
    return boundary(rho, circuit.num_layers + 1)


def superop_row(kraus: list[np.ndarray]) -> np.ndarray:
    """Row-stacking superoperator sum of K kron conj(K)."""
    dim = kraus[0].shape[0]
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in kraus:
        out += np.kron(k, k.conj())
    return out


def commutator_norm_row(kraus: list[np.ndarray], word_matrix: np.ndarray) -> float:
    """Frobenius commutator norm in the row-stacking convention.

    The norm is invariant under the (unitary) change between stacking
    conventions, so this checks the package value through a different basis.
    """
    a = superop_row(kraus)
    b = superop_row([word_matrix])
    return float(np.linalg.norm(a @ b - b @ a))


def xxx_dense(n: int) -> np.ndarray:
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(n):
        k = (j + 1) % n
        for letter in "XYZ":
            letters = ["I"] * n
            letters[j] = letter
            letters[k] = letter
            out += kron_chain("".join(letters))
    return out


def singlet_product(n: int) -> np.ndarray:
    singlet = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
    state = np.array([1.0 + 0.0j])
    for _ in range(n // 2):
        state = np.kron(state, singlet)
    return state


def ground_state(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    values, vectors = np.linalg.eigh(matrix)
    return float(values[0]), vectors[:, 0]
