"""Layered circuit IR with shared parameter slots and a single-qubit buffer.

A circuit is a sequence of parallel layers (gates within a layer act on
disjoint qubits) followed by an optional buffer of single-qubit rotations.
Every Pauli rotation gate reads its angle from a shared slot through an
affine binding ``multiplier * theta[slot] + offset``.  All rotations use the
half-angle convention ``exp(-i * angle * P / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import CapacityError, DimensionError
from .pauli import DENSE_QUBIT_LIMIT, PauliWord

BUFFER_RYRX = "ryrx"
BUFFER_RY = "ry"
BUFFER_NONE = "none"
_BUFFERS = (BUFFER_RYRX, BUFFER_RY, BUFFER_NONE)

_HERM_BLOCKS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class SlotBinding:
    """Affine map from a shared slot to a gate angle.

    The realized gate angle is ``multiplier * theta[slot] + offset`` with
    multiplier restricted to +1 or -1.
    """

    slot: int
    multiplier: int = 1
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.slot < 0:
            raise ValueError(f"slot must be non-negative, got {self.slot}")
        if self.multiplier not in (1, -1):
            raise ValueError(f"multiplier must be +1 or -1, got {self.multiplier}")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")

    def angle(self, theta: Sequence[float]) -> float:
        """Return the realized gate angle for a slot value vector."""
        return self.multiplier * theta[self.slot] + self.offset


@dataclass(frozen=True)
class PauliRotation:
    """Rotation ``exp(-i * angle * P / 2)`` about a Hermitian Pauli word."""

    axis: PauliWord
    binding: SlotBinding

    def __post_init__(self) -> None:
        if self.axis.is_identity:
            raise ValueError("rotation axis must be a non-identity word")
        if self.axis.phase_pow != self.axis.y_count % 4:
            raise ValueError("rotation axis must be in Hermitian canonical form")


@dataclass(frozen=True)
class Cnot:
    """Controlled-X gate."""

    control: int
    target: int

    def __post_init__(self) -> None:
        if self.control == self.target:
            raise ValueError("control and target must differ")
        if self.control < 0 or self.target < 0:
            raise ValueError("qubit indices must be non-negative")


@dataclass(frozen=True)
class FixedClifford:
    """Single-qubit quarter-turn ``exp(-i * sign * (pi/2) * sigma_axis / 2)``."""

    axis: str
    qubit: int
    sign: int = 1

    def __post_init__(self) -> None:
        if self.axis not in ("x", "y", "z"):
            raise ValueError(f"axis must be one of x/y/z, got {self.axis!r}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.qubit < 0:
            raise ValueError("qubit index must be non-negative")


Gate = Union[PauliRotation, Cnot, FixedClifford]


def gate_support(gate: Gate) -> tuple[int, ...]:
    """Return the qubits a gate acts on, ascending."""
    if isinstance(gate, PauliRotation):
        return gate.axis.support
    if isinstance(gate, Cnot):
        return tuple(sorted((gate.control, gate.target)))
    if isinstance(gate, FixedClifford):
        return (gate.qubit,)
    raise TypeError(f"unknown gate type {type(gate).__name__}")


@dataclass(frozen=True)
class BufferedCircuit:
    """Parallel gate layers plus an optional trailing single-qubit buffer.

    Attributes:
        n: Number of qubits.
        layers: Tuple of layers; each layer is a tuple of gates acting on
            pairwise disjoint qubits.
        buffer: One of ``"ryrx"`` (Ry then Rx per qubit), ``"ry"``
            (Ry per qubit) or ``"none"``.
    """

    n: int
    layers: tuple[tuple[Gate, ...], ...]
    buffer: str = BUFFER_RYRX

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError(f"circuit needs at least one qubit, got n={self.n}")
        if self.buffer not in _BUFFERS:
            raise ValueError(f"buffer must be one of {_BUFFERS}, got {self.buffer!r}")
        slots: set[int] = set()
        for layer_idx, layer in enumerate(self.layers):
            seen: set[int] = set()
            for gate in layer:
                support = gate_support(gate)
                if max(support) >= self.n:
                    raise DimensionError(
                        f"gate on qubits {support} exceeds {self.n} qubits"
                    )
                if isinstance(gate, PauliRotation) and gate.axis.n != self.n:
                    raise DimensionError(
                        f"rotation axis has {gate.axis.n} qubits, circuit has {self.n}"
                    )
                overlap = seen.intersection(support)
                if overlap:
                    raise ValueError(
                        f"layer {layer_idx} gates overlap on qubits {sorted(overlap)}"
                    )
                seen.update(support)
                if isinstance(gate, PauliRotation):
                    slots.add(gate.binding.slot)
        if slots and slots != set(range(max(slots) + 1)):
            raise ValueError(f"slots must be contiguous from 0, got {sorted(slots)}")

    @property
    def num_theta_slots(self) -> int:
        """Number of distinct rotation slots."""
        best = -1
        for layer in self.layers:
            for gate in layer:
                if isinstance(gate, PauliRotation):
                    best = max(best, gate.binding.slot)
        return best + 1

    @property
    def num_gamma_slots(self) -> int:
        """Number of buffer angles."""
        if self.buffer == BUFFER_RYRX:
            return 2 * self.n
        if self.buffer == BUFFER_RY:
            return self.n
        return 0

    @property
    def num_layers(self) -> int:
        """Number of parallel layers, excluding the buffer."""
        return len(self.layers)

    def iter_gates(self) -> Iterator[tuple[int, int, Gate]]:
        """Yield (layer index, position in layer, gate) in time order."""
        for layer_idx, layer in enumerate(self.layers):
            for gate_idx, gate in enumerate(layer):
                yield layer_idx, gate_idx, gate

    def slot_gates(self, slot: int) -> tuple[tuple[int, int, PauliRotation], ...]:
        """Return every rotation bound to a slot, in time order."""
        found = []
        for layer_idx, gate_idx, gate in self.iter_gates():
            if isinstance(gate, PauliRotation) and gate.binding.slot == slot:
                found.append((layer_idx, gate_idx, gate))
        return tuple(found)

    def slots_in_time_order(self) -> tuple[int, ...]:
        """Return slot indices ordered by their first bound gate."""
        first: dict[int, tuple[int, int]] = {}
        for layer_idx, gate_idx, gate in self.iter_gates():
            if isinstance(gate, PauliRotation):
                first.setdefault(gate.binding.slot, (layer_idx, gate_idx))
        return tuple(sorted(first, key=first.__getitem__))

    def buffer_rotations(self) -> tuple[tuple[int, str, int], ...]:
        """Return (qubit, axis letter, gamma index) triples in time order."""
        if self.buffer == BUFFER_NONE:
            return ()
        out = []
        for qubit in range(self.n):
            if self.buffer == BUFFER_RYRX:
                out.append((qubit, "Y", 2 * qubit))
                out.append((qubit, "X", 2 * qubit + 1))
            else:
                out.append((qubit, "Y", qubit))
        return tuple(out)


@dataclass(frozen=True)
class ParameterVector:
    """Slot values for a circuit: rotation thetas and buffer gammas."""

    theta: tuple[float, ...] = ()
    gamma: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        for value in (*self.theta, *self.gamma):
            if not math.isfinite(value):
                raise ValueError("parameters must be finite")
        object.__setattr__(self, "theta", tuple(float(v) for v in self.theta))
        object.__setattr__(self, "gamma", tuple(float(v) for v in self.gamma))

    @classmethod
    def zeros(cls, circuit: BufferedCircuit) -> "ParameterVector":
        """Return the all-zero parameter vector for a circuit."""
        return cls(
            theta=(0.0,) * circuit.num_theta_slots,
            gamma=(0.0,) * circuit.num_gamma_slots,
        )

    @classmethod
    def random(
        cls,
        circuit: BufferedCircuit,
        rng: np.random.Generator,
        gamma_mode: str = "zero",
    ) -> "ParameterVector":
        """Draw thetas uniformly from [0, 2pi); gammas zero or uniform."""
        theta = tuple(rng.uniform(0.0, 2.0 * math.pi, circuit.num_theta_slots))
        if gamma_mode == "zero":
            gamma = (0.0,) * circuit.num_gamma_slots
        elif gamma_mode == "uniform":
            gamma = tuple(rng.uniform(0.0, 2.0 * math.pi, circuit.num_gamma_slots))
        else:
            raise ValueError(f"gamma_mode must be zero or uniform, got {gamma_mode!r}")
        return cls(theta=theta, gamma=gamma)

    def normalized(self) -> "ParameterVector":
        """Return a copy with every value reduced to [0, 2pi)."""
        two_pi = 2.0 * math.pi
        return ParameterVector(
            theta=tuple(v % two_pi for v in self.theta),
            gamma=tuple(v % two_pi for v in self.gamma),
        )

    def with_theta(self, slot: int, value: float) -> "ParameterVector":
        """Return a copy with one theta slot replaced."""
        theta = list(self.theta)
        theta[slot] = value
        return ParameterVector(theta=tuple(theta), gamma=self.gamma)

    def as_flat(self) -> np.ndarray:
        """Return thetas followed by gammas as one float vector."""
        return np.array(self.theta + self.gamma, dtype=float)

    @classmethod
    def from_flat(cls, circuit: BufferedCircuit, flat: Sequence[float]) -> "ParameterVector":
        """Split a flat vector back into thetas and gammas for a circuit."""
        m = circuit.num_theta_slots
        k = circuit.num_gamma_slots
        if len(flat) != m + k:
            raise DimensionError(f"expected {m + k} values, got {len(flat)}")
        return cls(theta=tuple(flat[:m]), gamma=tuple(flat[m:]))


def check_parameters(circuit: BufferedCircuit, params: ParameterVector) -> None:
    """Raise DimensionError when slot counts do not match the circuit."""
    if len(params.theta) != circuit.num_theta_slots:
        raise DimensionError(
            f"expected {circuit.num_theta_slots} theta values, got {len(params.theta)}"
        )
    if len(params.gamma) != circuit.num_gamma_slots:
        raise DimensionError(
            f"expected {circuit.num_gamma_slots} gamma values, got {len(params.gamma)}"
        )


@lru_cache(maxsize=None)
def _letters_matrix(letters: str) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for letter in letters:
        out = np.kron(out, _HERM_BLOCKS[letter])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _identity_matrix(dim: int) -> np.ndarray:
    out = np.eye(dim, dtype=complex)
    out.setflags(write=False)
    return out


def rotation_matrix(letters: str, angle: float) -> np.ndarray:
    """Dense ``exp(-i * angle * P / 2)`` for a Pauli letter string."""
    pauli = _letters_matrix(letters)
    half = angle / 2.0
    return math.cos(half) * _identity_matrix(pauli.shape[0]) - (
        1j * math.sin(half)
    ) * pauli


_CNOT_SMALL = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ],
    dtype=complex,
)


def apply_op_to_tensor(
    tensor: np.ndarray, op: np.ndarray, qubits: Sequence[int]
) -> np.ndarray:
    """Apply a small operator to the given leading qubit axes of a tensor.

    The tensor must have one axis of size 2 per qubit first; any batch axes
    trail.  Used for state vectors, unitaries and density-matrix sides.
    """
    k = len(qubits)
    op_t = op.reshape((2,) * (2 * k))
    moved = np.tensordot(op_t, tensor, axes=(tuple(range(k, 2 * k)), tuple(qubits)))
    return np.moveaxis(moved, tuple(range(k)), tuple(qubits))


class CircuitEvaluator:
    """Precomputed dense gate data for repeated evaluation of one circuit.

    Rotation axes are reduced to their support so gate application scales
    with the support size rather than the full register.
    """

    def __init__(self, circuit: BufferedCircuit):
        self.circuit = circuit
        self._layers: list[list[tuple[tuple[int, ...], object]]] = []
        for layer in circuit.layers:
            ops: list[tuple[tuple[int, ...], object]] = []
            for gate in layer:
                if isinstance(gate, PauliRotation):
                    support = gate.axis.support
                    letters = "".join(gate.axis.letter_at(q) for q in support)
                    ops.append((support, (letters, gate.binding)))
                elif isinstance(gate, Cnot):
                    ops.append(((gate.control, gate.target), _CNOT_SMALL))
                else:
                    half_turn = gate.sign * math.pi / 2.0
                    ops.append(
                        ((gate.qubit,), rotation_matrix(gate.axis.upper(), half_turn))
                    )
            self._layers.append(ops)
        self._buffer = circuit.buffer_rotations()

    def resolved_layer(
        self, layer_idx: int, params: ParameterVector
    ) -> list[tuple[tuple[int, ...], np.ndarray]]:
        """Return (qubits, dense matrix) pairs for one layer at given angles."""
        out = []
        for qubits, payload in self._layers[layer_idx]:
            if isinstance(payload, tuple):
                letters, binding = payload
                out.append((qubits, rotation_matrix(letters, binding.angle(params.theta))))
            else:
                out.append((qubits, payload))
        return out

    def resolved_buffer(
        self, params: ParameterVector
    ) -> list[tuple[tuple[int, ...], np.ndarray]]:
        """Return (qubits, dense matrix) pairs for the buffer in time order."""
        return [
            ((qubit,), rotation_matrix(letter, params.gamma[index]))
            for qubit, letter, index in self._buffer
        ]

    def apply(self, tensor: np.ndarray, params: ParameterVector) -> np.ndarray:
        """Apply all layers then the buffer to a qubit-indexed tensor."""
        check_parameters(self.circuit, params)
        for layer_idx in range(len(self._layers)):
            for qubits, op in self.resolved_layer(layer_idx, params):
                tensor = apply_op_to_tensor(tensor, op, qubits)
        for qubits, op in self.resolved_buffer(params):
            tensor = apply_op_to_tensor(tensor, op, qubits)
        return tensor

    def state(
        self, params: ParameterVector, state: np.ndarray | None = None
    ) -> np.ndarray:
        """Return the output state vector; default input is the all-zeros state."""
        n = self.circuit.n
        dim = 2**n
        if state is None:
            psi = np.zeros(dim, dtype=complex)
            psi[0] = 1.0
        else:
            psi = np.asarray(state, dtype=complex)
            if psi.shape != (dim,):
                raise DimensionError(f"state must have shape ({dim},), got {psi.shape}")
        tensor = psi.reshape((2,) * n)
        return self.apply(tensor, params).reshape(dim)

    def unitary(self, params: ParameterVector) -> np.ndarray:
        """Return the dense circuit unitary; refuses more than 12 qubits."""
        n = self.circuit.n
        if n > DENSE_QUBIT_LIMIT:
            raise CapacityError(
                f"dense unitary limited to {DENSE_QUBIT_LIMIT} qubits, got {n}"
            )
        dim = 2**n
        tensor = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
        return self.apply(tensor, params).reshape(dim, dim)


def build_unitary(circuit: BufferedCircuit, params: ParameterVector) -> np.ndarray:
    """Return the dense unitary of a circuit at given parameters."""
    return CircuitEvaluator(circuit).unitary(params)


def apply_to_state(
    circuit: BufferedCircuit,
    params: ParameterVector,
    state: np.ndarray | None = None,
) -> np.ndarray:
    """Apply the circuit to a state vector (default all-zeros input)."""
    return CircuitEvaluator(circuit).state(params, state)


def unbind(circuit: BufferedCircuit) -> tuple[BufferedCircuit, dict[int, tuple[int, ...]]]:
    """Give every rotation its own slot with a trivial binding.

    Returns the rebuilt circuit and a map from each old slot to the new slots
    of its gates in time order.  Together with expand_parameters this
    preserves the circuit unitary pointwise.
    """
    mapping: dict[int, list[int]] = {}
    counter = 0
    new_layers = []
    for layer in circuit.layers:
        new_layer: list[Gate] = []
        for gate in layer:
            if isinstance(gate, PauliRotation):
                mapping.setdefault(gate.binding.slot, []).append(counter)
                new_layer.append(
                    PauliRotation(axis=gate.axis, binding=SlotBinding(slot=counter))
                )
                counter += 1
            else:
                new_layer.append(gate)
        new_layers.append(tuple(new_layer))
    rebuilt = BufferedCircuit(n=circuit.n, layers=tuple(new_layers), buffer=circuit.buffer)
    return rebuilt, {slot: tuple(slots) for slot, slots in mapping.items()}


def expand_parameters(
    circuit: BufferedCircuit,
    params: ParameterVector,
    mapping: dict[int, tuple[int, ...]],
) -> ParameterVector:
    """Translate shared-slot values to the unbound circuit of ``unbind``.

    Each new slot receives the realized angle of its gate, so the unbound
    circuit reproduces the original unitary exactly.
    """
    check_parameters(circuit, params)
    total = sum(len(v) for v in mapping.values())
    theta = [0.0] * total
    counter = 0
    for _, _, gate in circuit.iter_gates():
        if isinstance(gate, PauliRotation):
            old = gate.binding.slot
            if counter not in mapping.get(old, ()):
                raise ValueError(f"mapping does not place gate {counter} under slot {old}")
            theta[counter] = gate.binding.angle(params.theta)
            counter += 1
    return ParameterVector(theta=tuple(theta), gamma=params.gamma)


def _pack_pairs(pairs: Sequence[tuple[int, int]]) -> list[list[Cnot]]:
    sublayers: list[list[Cnot]] = []
    used: list[set[int]] = []
    for control, target in pairs:
        support = {control, target}
        for idx, busy in enumerate(used):
            if not busy & support:
                sublayers[idx].append(Cnot(control, target))
                busy.update(support)
                break
        else:
            sublayers.append([Cnot(control, target)])
            used.append(set(support))
    return sublayers


def hardware_efficient_ansatz(
    n: int,
    num_layers: int,
    rotation_axis: str = "y",
    topology: str = "line",
    buffer: str | None = None,
) -> BufferedCircuit:
    """Build the rotation-plus-CNOT-ladder ansatz.

    Each layer holds one single-qubit rotation per qubit (each with its own
    slot, numbered layer by layer) followed by a CNOT ladder packed into
    parallel sub-layers.  The default buffer is ``"ry"`` for y rotations and
    ``"ryrx"`` otherwise; pass ``buffer`` to override.
    """
    if n < 2:
        raise DimensionError(f"ansatz needs at least 2 qubits, got {n}")
    if num_layers < 1:
        raise ValueError(f"need at least one layer, got {num_layers}")
    axis = rotation_axis.lower()
    if axis not in ("x", "y", "z"):
        raise ValueError(f"rotation_axis must be x, y or z, got {rotation_axis!r}")
    if topology not in ("line", "ring"):
        raise ValueError(f"topology must be line or ring, got {topology!r}")
    pairs = [(j, j + 1) for j in range(n - 1)]
    if topology == "ring" and n > 2:
        pairs.append((n - 1, 0))
    if buffer is None:
        buffer = BUFFER_RY if axis == "y" else BUFFER_RYRX
    layers: list[tuple[Gate, ...]] = []
    for layer_idx in range(num_layers):
        rotations = tuple(
            PauliRotation(
                axis=PauliWord.single(n, qubit, axis.upper()),
                binding=SlotBinding(slot=layer_idx * n + qubit),
            )
            for qubit in range(n)
        )
        layers.append(rotations)
        for sublayer in _pack_pairs(pairs):
            layers.append(tuple(sublayer))
    return BufferedCircuit(n=n, layers=tuple(layers), buffer=buffer)


def _bond_word(n: int, bond: tuple[int, int], letter: str) -> PauliWord:
    letters = ["I"] * n
    letters[bond[0]] = letter
    letters[bond[1]] = letter
    return PauliWord.from_letters("".join(letters))


def hva_xxx_ansatz(
    n: int,
    num_layers: int,
    shared_halves: bool = False,
) -> tuple[BufferedCircuit, np.ndarray]:
    """Build the Heisenberg-chain variational ansatz and its input state.

    Qubits form a ring of bonds (j, j+1 mod n).  Each layer applies XX, YY
    and ZZ rotations on the odd-start bonds first, then on the even-start
    bonds; every rotation in a half shares that half's slot (layer ``l`` uses
    slots ``2l`` and ``2l+1``, or one slot ``l`` if ``shared_halves``).  The
    returned input state is the singlet product on pairs (0,1), (2,3), ...,
    the ground state of the even-start half.
    """
    if n < 2 or n % 2:
        raise DimensionError(f"ansatz needs an even number of qubits, got n={n}")
    if num_layers < 1:
        raise ValueError(f"need at least one layer, got {num_layers}")
    odd_bonds = [(j, (j + 1) % n) for j in range(1, n, 2)]
    even_bonds = [(j, j + 1) for j in range(0, n, 2)]
    layers: list[tuple[Gate, ...]] = []
    for layer_idx in range(num_layers):
        for half, bonds in ((0, odd_bonds), (1, even_bonds)):
            slot = layer_idx if shared_halves else 2 * layer_idx + half
            for letter in "XYZ":
                layers.append(
                    tuple(
                        PauliRotation(
                            axis=_bond_word(n, bond, letter),
                            binding=SlotBinding(slot=slot),
                        )
                        for bond in bonds
                    )
                )
    circuit = BufferedCircuit(n=n, layers=tuple(layers), buffer=BUFFER_RYRX)
    singlet = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)
    state = np.array([1.0 + 0.0j])
    for _ in range(n // 2):
        state = np.kron(state, singlet)
    return circuit, state


def gate_to_json(gate: Gate) -> dict:
    """Serialize one gate to a plain dict."""
    if isinstance(gate, PauliRotation):
        support = gate.axis.support
        return {
            "rot": "".join(gate.axis.letter_at(q) for q in support),
            "qubits": list(support),
            "slot": gate.binding.slot,
            "mult": gate.binding.multiplier,
            "offset": gate.binding.offset,
        }
    if isinstance(gate, Cnot):
        return {"cnot": [gate.control, gate.target]}
    return {"clifford": {"axis": gate.axis, "sign": gate.sign, "qubit": gate.qubit}}


def gate_from_json(data: dict, n: int) -> Gate:
    """Rebuild one gate from its dict form."""
    if "rot" in data:
        letters = ["I"] * n
        for letter, qubit in zip(data["rot"], data["qubits"]):
            letters[qubit] = letter
        return PauliRotation(
            axis=PauliWord.from_letters("".join(letters)),
            binding=SlotBinding(
                slot=data["slot"],
                multiplier=data.get("mult", 1),
                offset=data.get("offset", 0.0),
            ),
        )
    if "cnot" in data:
        control, target = data["cnot"]
        return Cnot(control=control, target=target)
    if "clifford" in data:
        inner = data["clifford"]
        return FixedClifford(axis=inner["axis"], qubit=inner["qubit"], sign=inner["sign"])
    raise ValueError(f"unknown gate record {data!r}")


def circuit_to_json(circuit: BufferedCircuit) -> dict:
    """Serialize a circuit to a plain dict."""
    return {
        "n": circuit.n,
        "buffer": circuit.buffer,
        "layers": [[gate_to_json(g) for g in layer] for layer in circuit.layers],
    }


def circuit_from_json(data: dict) -> BufferedCircuit:
    """Rebuild a circuit from its dict form."""
    n = data["n"]
    layers = tuple(
        tuple(gate_from_json(g, n) for g in layer) for layer in data["layers"]
    )
    return BufferedCircuit(n=n, layers=layers, buffer=data.get("buffer", BUFFER_RYRX))


def pretty(circuit: BufferedCircuit) -> str:
    """Render a circuit as one text line per layer."""
    lines = [f"n={circuit.n} buffer={circuit.buffer}"]
    for layer_idx, layer in enumerate(circuit.layers):
        parts = []
        for gate in layer:
            if isinstance(gate, PauliRotation):
                support = gate.axis.support
                letters = "".join(gate.axis.letter_at(q) for q in support)
                b = gate.binding
                suffix = "" if b.multiplier == 1 else "*-1"
                if b.offset:
                    suffix += f"{b.offset:+g}"
                qubits = ",".join(str(q) for q in support)
                parts.append(f"R{letters}[{qubits}](t{b.slot}{suffix})")
            elif isinstance(gate, Cnot):
                parts.append(f"CX[{gate.control},{gate.target}]")
            else:
                parts.append(f"C{gate.axis.upper()}[{gate.qubit}]({gate.sign:+d})")
        lines.append(f"L{layer_idx}: " + " ".join(parts))
    return "\n".join(lines)
