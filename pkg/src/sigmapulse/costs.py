"""Hamiltonians, target states and the two experiment cost functions.

Costs are written so lower is better: infidelity against a target state for
compiling, and the energy expectation for ground-state search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .circuit import BufferedCircuit, CircuitEvaluator, ParameterVector
from .errors import CapacityError, DimensionError
from .noise import DensityMatrix, NoiseModel, NoisyRunner
from .pauli import DENSE_QUBIT_LIMIT, PauliWord


@dataclass(frozen=True)
class Hamiltonian:
    """A real combination of Hermitian Pauli words."""

    terms: tuple[tuple[float, PauliWord], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("Hamiltonian needs at least one term")
        sizes = {word.n for _, word in self.terms}
        if len(sizes) != 1:
            raise DimensionError(f"terms act on mixed qubit counts {sorted(sizes)}")
        for coeff, word in self.terms:
            if not math.isfinite(coeff):
                raise ValueError("coefficients must be finite")
            if not word.is_hermitian:
                raise ValueError(f"term {word.to_text()} is not Hermitian")

    @property
    def n(self) -> int:
        return self.terms[0][1].n

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense Hermitian matrix; refuses more than 12 qubits."""
        if self.n > DENSE_QUBIT_LIMIT:
            raise CapacityError(
                f"dense form limited to {DENSE_QUBIT_LIMIT} qubits, got {self.n}"
            )
        dim = 2**self.n
        out = np.zeros((dim, dim), dtype=complex)
        for coeff, word in self.terms:
            out += coeff * word.to_matrix()
        return out

    def to_matrix(self) -> np.ndarray:
        """Dense Hermitian matrix; refuses more than 12 qubits."""
        return self.matrix

    def eigen_extremes(self) -> tuple[float, float]:
        """Return the smallest and largest eigenvalue."""
        values = np.linalg.eigvalsh(self.matrix)
        return float(values[0]), float(values[-1])

    def ground_energy(self) -> float:
        """Return the smallest eigenvalue."""
        return self.eigen_extremes()[0]

    def expectation(self, state: "np.ndarray | DensityMatrix") -> float:
        """Energy of a state vector or density matrix."""
        if isinstance(state, DensityMatrix):
            return state.expectation(self.matrix)
        vec = np.asarray(state, dtype=complex).reshape(-1)
        return float(np.real(vec.conj() @ (self.matrix @ vec)))


def xxx_hamiltonian(n: int) -> Hamiltonian:
    """Isotropic Heisenberg ring: XX + YY + ZZ on every bond (j, j+1 mod n)."""
    if n < 2:
        raise DimensionError(f"ring needs at least 2 qubits, got {n}")
    terms = []
    for j in range(n):
        k = (j + 1) % n
        for letter in "XYZ":
            letters = ["I"] * n
            letters[j] = letter
            letters[k] = letter
            terms.append((1.0, PauliWord.from_letters("".join(letters))))
    return Hamiltonian(terms=tuple(terms))


def xxx_bond_hamiltonians(n: int) -> tuple[Hamiltonian, Hamiltonian]:
    """Split the ring into the odd-start and even-start bond halves."""
    if n < 2 or n % 2:
        raise DimensionError(f"split needs an even qubit count, got {n}")
    odd_terms = []
    even_terms = []
    for j in range(n):
        k = (j + 1) % n
        bucket = odd_terms if j % 2 else even_terms
        for letter in "XYZ":
            letters = ["I"] * n
            letters[j] = letter
            letters[k] = letter
            bucket.append((1.0, PauliWord.from_letters("".join(letters))))
    return Hamiltonian(terms=tuple(odd_terms)), Hamiltonian(terms=tuple(even_terms))


def w_state(n: int = 3) -> np.ndarray:
    """Uniform superposition of all weight-one computational states."""
    if n < 1:
        raise DimensionError(f"need at least one qubit, got {n}")
    vec = np.zeros(2**n, dtype=complex)
    for qubit in range(n):
        vec[1 << (n - 1 - qubit)] = 1.0
    return vec / math.sqrt(n)


def hamiltonian_from_text(text: str) -> Hamiltonian:
    """Parse "coeff word" lines (e.g. ``1.0 XXII``); ``#`` starts a comment."""
    terms = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        pieces = line.split(None, 1)
        if len(pieces) != 2:
            raise ValueError(f"line {number}: expected 'coeff word', got {raw!r}")
        coeff_text, word_text = pieces
        terms.append((float(coeff_text), PauliWord.from_text(word_text.strip())))
    return Hamiltonian(terms=tuple(terms))


def hamiltonian_to_text(hamiltonian: Hamiltonian) -> str:
    """Serialize to one "coeff word" line per term."""
    return "".join(
        f"{format(coeff, '.17g')} {word.to_text()}\n"
        for coeff, word in hamiltonian.terms
    )


def improvement_pct(e_final: float, e_reference: float, e_ground: float) -> float:
    """Energy improvement over a reference, as a percentage of |ground|.

    Follows ``100 * (e_final - e_reference) / e_ground``; with a negative
    ground energy, lower final energies give larger positive values.
    """
    if e_ground == 0:
        raise ValueError("ground energy must be nonzero")
    return 100.0 * (e_final - e_reference) / e_ground


@dataclass(frozen=True, eq=False)
class CompileOverlap:
    """Cost ``1 - <target| rho |target>`` for compiling a target state."""

    target: np.ndarray

    def __post_init__(self) -> None:
        vec = np.asarray(self.target, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"target must be normalized, norm is {norm}")
        object.__setattr__(self, "target", vec)

    @property
    def n(self) -> int:
        return int(round(math.log2(self.target.size)))

    def bind(
        self,
        circuit: BufferedCircuit,
        noise: NoiseModel | None = None,
        input_state: np.ndarray | None = None,
    ) -> Callable[[ParameterVector], float]:
        """Return a fast parameters-to-cost callable for one circuit."""
        if circuit.n != self.n:
            raise DimensionError(
                f"target is on {self.n} qubits, circuit has {circuit.n}"
            )
        target = self.target
        if noise is None:
            evaluator = CircuitEvaluator(circuit)

            def cost(params: ParameterVector) -> float:
                psi = evaluator.state(params, input_state)
                return 1.0 - abs(np.vdot(target, psi)) ** 2

            return cost
        runner = NoisyRunner(circuit, noise)

        def noisy_cost(params: ParameterVector) -> float:
            rho = runner.run(params, input_state)
            overlap = np.real(target.conj() @ (rho.data @ target))
            return 1.0 - float(overlap)

        return noisy_cost

    def evaluate(
        self,
        circuit: BufferedCircuit,
        params: ParameterVector,
        noise: NoiseModel | None = None,
        input_state: np.ndarray | None = None,
    ) -> float:
        return self.bind(circuit, noise, input_state)(params)


@dataclass(frozen=True, eq=False)
class Expectation:
    """Cost ``Tr[H rho]`` for variational ground-state search."""

    hamiltonian: Hamiltonian
    input_state: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.hamiltonian.n

    def bind(
        self,
        circuit: BufferedCircuit,
        noise: NoiseModel | None = None,
    ) -> Callable[[ParameterVector], float]:
        """Return a fast parameters-to-cost callable for one circuit."""
        if circuit.n != self.n:
            raise DimensionError(
                f"Hamiltonian is on {self.n} qubits, circuit has {circuit.n}"
            )
        matrix = self.hamiltonian.matrix
        input_state = self.input_state
        if noise is None:
            evaluator = CircuitEvaluator(circuit)

            def cost(params: ParameterVector) -> float:
                psi = evaluator.state(params, input_state)
                return float(np.real(psi.conj() @ (matrix @ psi)))

            return cost
        runner = NoisyRunner(circuit, noise)

        def noisy_cost(params: ParameterVector) -> float:
            rho = runner.run(params, input_state)
            return float(np.trace(matrix @ rho.data).real)

        return noisy_cost

    def evaluate(
        self,
        circuit: BufferedCircuit,
        params: ParameterVector,
        noise: NoiseModel | None = None,
    ) -> float:
        return self.bind(circuit, noise)(params)


CostFunction = Union[CompileOverlap, Expectation]


def compile_cost(
    circuit: BufferedCircuit,
    params: ParameterVector,
    noise: NoiseModel | None,
    target: np.ndarray,
) -> float:
    """Infidelity of the circuit output against a target state."""
    return CompileOverlap(target=target).evaluate(circuit, params, noise)


def expectation_cost(
    circuit: BufferedCircuit,
    params: ParameterVector,
    noise: NoiseModel | None,
    hamiltonian: Hamiltonian,
    input_state: np.ndarray | None = None,
) -> float:
    """Energy of the circuit output under a Hamiltonian."""
    return Expectation(hamiltonian=hamiltonian, input_state=input_state).evaluate(
        circuit, params, noise
    )
