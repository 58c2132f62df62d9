"""Kraus channels, layered noise placement and the noisy circuit simulator.

Noise attaches to layer boundaries: boundary 0 acts on the input state,
boundary l (1-based) after parallel layer l-1, and one final boundary after
the buffer.  A circuit with L parallel layers therefore has L + 2
boundaries.  Channels are given per boundary as (qubits, channel) entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import (
    BUFFER_NONE,
    BufferedCircuit,
    CircuitEvaluator,
    ParameterVector,
    apply_op_to_tensor,
    check_parameters,
    gate_support,
    rotation_matrix,
)
from .errors import DimensionError
from .pauli import PauliWord

DEFAULT_T1 = 50e-6
DEFAULT_T2 = 50e-6
DEFAULT_DURATION_1Q = 50e-9
DEFAULT_DURATION_2Q = 300e-9


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A density operator on n qubits."""

    n: int
    data: np.ndarray

    def __post_init__(self) -> None:
        dim = 2**self.n
        array = np.asarray(self.data, dtype=complex)
        if array.shape != (dim, dim):
            raise DimensionError(f"expected shape ({dim}, {dim}), got {array.shape}")
        object.__setattr__(self, "data", array)

    @classmethod
    def ground(cls, n: int) -> "DensityMatrix":
        """Return |0...0><0...0|."""
        dim = 2**n
        data = np.zeros((dim, dim), dtype=complex)
        data[0, 0] = 1.0
        return cls(n=n, data=data)

    @classmethod
    def from_state(cls, state: np.ndarray) -> "DensityMatrix":
        """Return the pure-state density matrix of a state vector."""
        vec = np.asarray(state, dtype=complex).reshape(-1)
        n = int(round(math.log2(vec.size)))
        if 2**n != vec.size:
            raise DimensionError(f"state length {vec.size} is not a power of two")
        return cls(n=n, data=np.outer(vec, vec.conj()))

    def validate(self, tol: float = 1e-9) -> None:
        """Check hermiticity, unit trace and positivity within a tolerance."""
        if not np.allclose(self.data, self.data.conj().T, atol=tol):
            raise ValueError("density matrix is not Hermitian")
        trace = np.trace(self.data).real
        if abs(trace - 1.0) > tol:
            raise ValueError(f"trace is {trace}, expected 1")
        smallest = float(np.linalg.eigvalsh(self.data)[0])
        if smallest < -tol:
            raise ValueError(f"negative eigenvalue {smallest}")

    def expectation(self, observable: np.ndarray) -> float:
        """Return the real part of Tr[observable @ rho]."""
        return float(np.trace(observable @ self.data).real)


class QuantumChannel:
    """Base class for completely positive trace-preserving maps."""

    @property
    def num_qubits(self) -> int:
        raise NotImplementedError

    def kraus(self) -> list[np.ndarray]:
        raise NotImplementedError

    @property
    def is_pauli_mix(self) -> bool:
        """Whether the channel is a probabilistic mix of Pauli conjugations."""
        return False


@dataclass(frozen=True)
class Depolarizing(QuantumChannel):
    """Single-qubit depolarizing noise: rho -> (1-q) rho + q I/2."""

    q: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must be in [0, 1], got {self.q}")

    @property
    def num_qubits(self) -> int:
        return 1

    def kraus(self) -> list[np.ndarray]:
        stay = math.sqrt(1.0 - 0.75 * self.q)
        move = math.sqrt(0.25 * self.q)
        return [
            stay * PauliWord.from_letters("I").to_matrix(),
            move * PauliWord.from_letters("X").to_matrix(),
            move * PauliWord.from_letters("Y").to_matrix(),
            move * PauliWord.from_letters("Z").to_matrix(),
        ]

    @property
    def is_pauli_mix(self) -> bool:
        return True


@dataclass(frozen=True)
class Dephasing(QuantumChannel):
    """Single-qubit phase flip with probability q."""

    q: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must be in [0, 1], got {self.q}")

    @property
    def num_qubits(self) -> int:
        return 1

    def kraus(self) -> list[np.ndarray]:
        return [
            math.sqrt(1.0 - self.q) * PauliWord.from_letters("I").to_matrix(),
            math.sqrt(self.q) * PauliWord.from_letters("Z").to_matrix(),
        ]

    @property
    def is_pauli_mix(self) -> bool:
        return True


@dataclass(frozen=True)
class AmplitudeDamping(QuantumChannel):
    """Single-qubit energy relaxation toward |0> with strength gamma."""

    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")

    @property
    def num_qubits(self) -> int:
        return 1

    def kraus(self) -> list[np.ndarray]:
        keep = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - self.gamma)]], dtype=complex)
        decay = np.array([[0.0, math.sqrt(self.gamma)], [0.0, 0.0]], dtype=complex)
        return [keep, decay]


@dataclass(frozen=True)
class CoherentDrift(QuantumChannel):
    """Unitary over-rotation ``exp(-i * angle * sigma_axis / 2)``."""

    axis: str
    angle: float

    def __post_init__(self) -> None:
        if self.axis not in ("x", "y", "z"):
            raise ValueError(f"axis must be x, y or z, got {self.axis!r}")
        if not math.isfinite(self.angle):
            raise ValueError("angle must be finite")

    @property
    def num_qubits(self) -> int:
        return 1

    def kraus(self) -> list[np.ndarray]:
        return [rotation_matrix(self.axis.upper(), self.angle)]


@dataclass(frozen=True)
class UnitalPauli(QuantumChannel):
    """Probabilistic mix of Pauli-word conjugations.

    ``probs`` maps letter strings (all the same length) to probabilities
    summing to 1.
    """

    probs: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        if not self.probs:
            raise ValueError("need at least one Pauli term")
        lengths = {len(letters) for letters, _ in self.probs}
        if len(lengths) != 1:
            raise DimensionError(f"mixed word lengths {sorted(lengths)}")
        total = sum(p for _, p in self.probs)
        if any(p < 0 for _, p in self.probs) or abs(total - 1.0) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1")

    @property
    def num_qubits(self) -> int:
        return len(self.probs[0][0])

    def kraus(self) -> list[np.ndarray]:
        return [
            math.sqrt(p) * PauliWord.from_letters(letters).to_matrix()
            for letters, p in self.probs
            if p > 0.0
        ]

    @property
    def is_pauli_mix(self) -> bool:
        return True


@dataclass(frozen=True)
class Compose(QuantumChannel):
    """Sequential composition; the first listed channel acts first."""

    channels: tuple[QuantumChannel, ...]

    def __post_init__(self) -> None:
        if not self.channels:
            raise ValueError("need at least one channel")
        sizes = {ch.num_qubits for ch in self.channels}
        if len(sizes) != 1:
            raise DimensionError(f"mixed channel sizes {sorted(sizes)}")

    @property
    def num_qubits(self) -> int:
        return self.channels[0].num_qubits

    def kraus(self) -> list[np.ndarray]:
        ops = [np.eye(2**self.num_qubits, dtype=complex)]
        for channel in self.channels:
            ops = [k @ op for op in ops for k in channel.kraus()]
        return ops

    @property
    def is_pauli_mix(self) -> bool:
        return all(ch.is_pauli_mix for ch in self.channels)


def validate_channel(channel: QuantumChannel, tol: float = 1e-9) -> None:
    """Check the Kraus completeness relation sum K^dag K = I."""
    dim = 2**channel.num_qubits
    total = np.zeros((dim, dim), dtype=complex)
    for k in channel.kraus():
        total += k.conj().T @ k
    if not np.allclose(total, np.eye(dim), atol=tol):
        raise ValueError("Kraus operators do not satisfy the completeness relation")


def relaxation_channel(
    t1: float = DEFAULT_T1,
    t2: float = DEFAULT_T2,
    duration: float = 0.0,
) -> QuantumChannel:
    """Thermal relaxation for one idle period: damping plus extra dephasing.

    Requires t2 <= 2 * t1.  Zero duration gives the identity channel.
    """
    if t1 <= 0 or t2 <= 0:
        raise ValueError("t1 and t2 must be positive")
    if t2 > 2.0 * t1 + 1e-15 * t1:
        raise ValueError(f"t2 must not exceed 2*t1, got t1={t1} t2={t2}")
    if duration < 0:
        raise ValueError("duration must be non-negative")
    gamma = 1.0 - math.exp(-duration / t1)
    pure_rate = 1.0 / t2 - 1.0 / (2.0 * t1)
    factor = math.exp(-duration * pure_rate)
    q = (1.0 - factor) / 2.0
    return Compose((AmplitudeDamping(gamma=gamma), Dephasing(q=q)))


def _apply_kraus_to_density_tensor(
    tensor: np.ndarray, channel: QuantumChannel, qubits: Sequence[int], n: int
) -> np.ndarray:
    col_axes = [q + n for q in qubits]
    out = None
    for k in channel.kraus():
        branch = apply_op_to_tensor(tensor, k, qubits)
        branch = apply_op_to_tensor(branch, k.conj(), col_axes)
        out = branch if out is None else out + branch
    return out


def apply_channel(
    rho: "DensityMatrix | np.ndarray",
    channel: QuantumChannel,
    qubits: Sequence[int] | None = None,
) -> "DensityMatrix | np.ndarray":
    """Apply a channel to (a subset of) the qubits of a density matrix."""
    if isinstance(rho, DensityMatrix):
        matrix = rho.data
        n = rho.n
    else:
        matrix = np.asarray(rho, dtype=complex)
        n = int(round(math.log2(matrix.shape[0])))
        if matrix.shape != (2**n, 2**n):
            raise DimensionError(f"bad density matrix shape {matrix.shape}")
    if qubits is None:
        if channel.num_qubits != n:
            raise DimensionError(
                f"channel acts on {channel.num_qubits} qubits, state has {n};"
                " pass qubits= to target a subset"
            )
        qubits = tuple(range(n))
    if len(qubits) != channel.num_qubits:
        raise DimensionError(
            f"channel acts on {channel.num_qubits} qubits, got {len(qubits)} targets"
        )
    tensor = matrix.reshape((2,) * (2 * n))
    tensor = _apply_kraus_to_density_tensor(tensor, channel, tuple(qubits), n)
    result = tensor.reshape(2**n, 2**n)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(n=n, data=result)
    return result


def pauli_transfer(channel: QuantumChannel, word: "PauliWord | str") -> float:
    """Return the diagonal Pauli-transfer coefficient Tr[W Ch(W)] / 2**n."""
    if isinstance(word, str):
        word = PauliWord.from_letters(word)
    if word.n != channel.num_qubits:
        raise DimensionError(
            f"word has {word.n} qubits, channel acts on {channel.num_qubits}"
        )
    dense = word.hermitian().to_matrix()
    moved = np.zeros_like(dense)
    for k in channel.kraus():
        moved += k @ dense @ k.conj().T
    return float(np.trace(dense @ moved).real / dense.shape[0])


def channel_superoperator(channel: QuantumChannel) -> np.ndarray:
    """Column-stacking superoperator sum of conj(K) kron K."""
    dim = 2**channel.num_qubits
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in channel.kraus():
        out += np.kron(k.conj(), k)
    return out


def conjugation_superoperator(word: PauliWord) -> np.ndarray:
    """Superoperator of rho -> W rho W^dag for a Pauli word."""
    dense = word.to_matrix()
    return np.kron(dense.conj(), dense)


def commutator_norm(channel: QuantumChannel, word: PauliWord) -> float:
    """Frobenius norm of the superoperator commutator with a conjugation."""
    if word.n != channel.num_qubits:
        raise DimensionError(
            f"word has {word.n} qubits, channel acts on {channel.num_qubits}"
        )
    s_ch = channel_superoperator(channel)
    s_w = conjugation_superoperator(word)
    return float(np.linalg.norm(s_ch @ s_w - s_w @ s_ch))


Boundary = tuple[tuple[tuple[int, ...], QuantumChannel], ...]


@dataclass(frozen=True)
class NoiseModel:
    """Channels attached to the layer boundaries of one circuit shape.

    ``boundaries[i]`` lists (qubits, channel) entries applied in order at
    boundary i.  A circuit with L parallel layers needs L + 2 boundaries.
    """

    n: int
    boundaries: tuple[Boundary, ...]

    def __post_init__(self) -> None:
        for boundary in self.boundaries:
            for qubits, channel in boundary:
                if len(qubits) != channel.num_qubits:
                    raise DimensionError(
                        f"channel on {channel.num_qubits} qubits given {len(qubits)} targets"
                    )
                if any(not 0 <= q < self.n for q in qubits):
                    raise DimensionError(f"qubits {qubits} outside [0, {self.n})")

    @property
    def num_boundaries(self) -> int:
        return len(self.boundaries)

    @property
    def is_pauli_mix(self) -> bool:
        """Whether every attached channel is a Pauli mix (unital)."""
        return all(
            channel.is_pauli_mix
            for boundary in self.boundaries
            for _, channel in boundary
        )

    @classmethod
    def none(cls, n: int, num_boundaries: int) -> "NoiseModel":
        """Return a noise model with no channels at all."""
        return cls(n=n, boundaries=((),) * num_boundaries)

    @classmethod
    def uniform(
        cls, n: int, num_boundaries: int, channel: QuantumChannel
    ) -> "NoiseModel":
        """Attach one single-qubit channel to every qubit at every boundary."""
        if channel.num_qubits != 1:
            raise DimensionError("uniform placement needs a single-qubit channel")
        boundary = tuple(((q,), channel) for q in range(n))
        return cls(n=n, boundaries=(boundary,) * num_boundaries)

    @classmethod
    def from_relaxation(
        cls,
        circuit: BufferedCircuit,
        t1: float = DEFAULT_T1,
        t2: float = DEFAULT_T2,
        duration_1q: float = DEFAULT_DURATION_1Q,
        duration_2q: float = DEFAULT_DURATION_2Q,
        per_gate: bool = False,
    ) -> "NoiseModel":
        """Thermal relaxation sized by the slowest gate of each layer.

        Boundary 0 has zero duration (no channel).  After each layer every
        qubit relaxes for the layer's longest gate duration; with
        ``per_gate`` only the qubits a gate touches relax, each for its own
        gate's duration.  The buffer boundary uses the single-qubit duration.
        """
        boundaries: list[Boundary] = [()]
        for layer in circuit.layers:
            durations = {}
            longest = 0.0
            for gate in layer:
                span = len(gate_support(gate))
                gate_time = duration_1q if span == 1 else duration_2q
                longest = max(longest, gate_time)
                for qubit in gate_support(gate):
                    durations[qubit] = gate_time
            if per_gate:
                entries = tuple(
                    ((qubit,), relaxation_channel(t1, t2, durations[qubit]))
                    for qubit in sorted(durations)
                )
            else:
                entries = tuple(
                    ((qubit,), relaxation_channel(t1, t2, longest))
                    for qubit in range(circuit.n)
                )
            boundaries.append(entries if longest > 0 else ())
        if circuit.buffer == BUFFER_NONE:
            boundaries.append(())
        else:
            boundaries.append(
                tuple(
                    ((qubit,), relaxation_channel(t1, t2, duration_1q))
                    for qubit in range(circuit.n)
                )
            )
        return cls(n=circuit.n, boundaries=tuple(boundaries))


def _embed_operator(op: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    dim = 2**n
    tensor = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    return apply_op_to_tensor(tensor, op, qubits).reshape(dim, dim)


def _boundary_superoperator(boundary: Boundary, n: int) -> np.ndarray:
    dim = 2**n
    total = np.eye(dim * dim, dtype=complex)
    for qubits, channel in boundary:
        entry = np.zeros((dim * dim, dim * dim), dtype=complex)
        for k in channel.kraus():
            embedded = _embed_operator(k, qubits, n)
            entry += np.kron(embedded.conj(), embedded)
        total = entry @ total
    return total


_SUPEROP_QUBIT_LIMIT = 4


class NoisyRunner:
    """Reusable noisy evolution for one circuit and noise model.

    On up to four qubits each noisy boundary is precomputed as a dense
    superoperator, which makes repeated cost evaluations cheap; larger
    registers fall back to per-channel Kraus application.
    """

    def __init__(self, circuit: BufferedCircuit, noise: NoiseModel | None = None):
        self.circuit = circuit
        self.noise = noise
        self.n = circuit.n
        if noise is not None:
            if noise.n != circuit.n:
                raise DimensionError(
                    f"noise model is for {noise.n} qubits, circuit has {circuit.n}"
                )
            expected = circuit.num_layers + 2
            if noise.num_boundaries != expected:
                raise DimensionError(
                    f"noise model has {noise.num_boundaries} boundaries,"
                    f" circuit needs {expected}"
                )
        self.evaluator = CircuitEvaluator(circuit)
        self._superops: list[np.ndarray | None] | None = None
        if noise is not None and circuit.n <= _SUPEROP_QUBIT_LIMIT:
            self._superops = [
                _boundary_superoperator(b, circuit.n) if b else None
                for b in noise.boundaries
            ]

    def _boundary(self, tensor: np.ndarray, index: int) -> np.ndarray:
        if self.noise is None:
            return tensor
        boundary = self.noise.boundaries[index]
        if not boundary:
            return tensor
        if self._superops is not None:
            dim = 2**self.n
            matrix = tensor.reshape(dim, dim)
            vec = matrix.reshape(-1, order="F")
            moved = self._superops[index] @ vec
            return moved.reshape(dim, dim, order="F").reshape((2,) * (2 * self.n))
        for qubits, channel in boundary:
            tensor = _apply_kraus_to_density_tensor(tensor, channel, qubits, self.n)
        return tensor

    def run(
        self,
        params: ParameterVector,
        input_state: "np.ndarray | DensityMatrix | None" = None,
    ) -> DensityMatrix:
        """Evolve an input through the circuit with boundary noise."""
        n = self.n
        check_parameters(self.circuit, params)
        if input_state is None:
            rho = DensityMatrix.ground(n)
        elif isinstance(input_state, DensityMatrix):
            rho = input_state
        else:
            array = np.asarray(input_state, dtype=complex)
            if array.ndim == 1:
                rho = DensityMatrix.from_state(array)
            else:
                rho = DensityMatrix(n=n, data=array)
        if rho.n != n:
            raise DimensionError(f"input state is on {rho.n} qubits, circuit has {n}")
        tensor = rho.data.reshape((2,) * (2 * n))
        tensor = self._boundary(tensor, 0)
        for layer_idx in range(self.circuit.num_layers):
            for qubits, op in self.evaluator.resolved_layer(layer_idx, params):
                tensor = apply_op_to_tensor(tensor, op, qubits)
                tensor = apply_op_to_tensor(tensor, op.conj(), [q + n for q in qubits])
            tensor = self._boundary(tensor, layer_idx + 1)
        for qubits, op in self.evaluator.resolved_buffer(params):
            tensor = apply_op_to_tensor(tensor, op, qubits)
            tensor = apply_op_to_tensor(tensor, op.conj(), [q + n for q in qubits])
        tensor = self._boundary(tensor, self.circuit.num_layers + 1)
        return DensityMatrix(n=n, data=tensor.reshape(2**n, 2**n))


def run_noisy(
    circuit: BufferedCircuit,
    params: ParameterVector,
    noise: NoiseModel | None = None,
    input_state: "np.ndarray | DensityMatrix | None" = None,
) -> DensityMatrix:
    """Evolve a density matrix through the circuit with boundary noise.

    The input may be a state vector, a density matrix or None for the
    all-zeros state.  With ``noise=None`` the evolution is noiseless but
    still returns a density matrix.  For repeated evaluation of one circuit
    build a NoisyRunner once instead.
    """
    return NoisyRunner(circuit, noise).run(params, input_state)


def channel_from_json(data: dict) -> QuantumChannel:
    """Build one channel from a config dict keyed by ``type``.

    Types: depolarizing {q}, dephasing {q}, amplitude_damping {gamma},
    drift {axis, angle}, unital {probs: {letters: p}}, relaxation
    {t1, t2, duration}, compose {channels: [...]}.
    """
    kind = data.get("type")
    if kind == "depolarizing":
        return Depolarizing(q=float(data["q"]))
    if kind == "dephasing":
        return Dephasing(q=float(data["q"]))
    if kind == "amplitude_damping":
        return AmplitudeDamping(gamma=float(data["gamma"]))
    if kind == "drift":
        return CoherentDrift(axis=data.get("axis", "z"), angle=float(data["angle"]))
    if kind == "unital":
        return UnitalPauli(
            probs=tuple(sorted((k, float(p)) for k, p in data["probs"].items()))
        )
    if kind == "relaxation":
        return relaxation_channel(
            t1=float(data.get("t1", DEFAULT_T1)),
            t2=float(data.get("t2", DEFAULT_T2)),
            duration=float(data.get("duration", DEFAULT_DURATION_1Q)),
        )
    if kind == "compose":
        return Compose(tuple(channel_from_json(c) for c in data["channels"]))
    raise ValueError(f"unknown channel type {kind!r}")


def noise_model_from_json(
    data: dict | None, circuit: BufferedCircuit
) -> NoiseModel | None:
    """Build a boundary noise model for one circuit from a config dict.

    ``None`` or ``{"type": "none"}`` gives no noise.  ``relaxation`` sizes
    channels from the circuit's layer durations; any single-qubit channel
    type is placed uniformly at every boundary.
    """
    if data is None or data.get("type") == "none":
        return None
    if data.get("type") == "relaxation":
        return NoiseModel.from_relaxation(
            circuit,
            t1=float(data.get("t1", DEFAULT_T1)),
            t2=float(data.get("t2", DEFAULT_T2)),
            duration_1q=float(data.get("duration_1q", DEFAULT_DURATION_1Q)),
            duration_2q=float(data.get("duration_2q", DEFAULT_DURATION_2Q)),
            per_gate=bool(data.get("per_gate", False)),
        )
    channel = channel_from_json(data)
    if channel.num_qubits != 1:
        raise DimensionError("uniform noise placement needs a single-qubit channel")
    return NoiseModel.uniform(circuit.n, circuit.num_layers + 2, channel)
