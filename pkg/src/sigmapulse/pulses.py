"""Symmetry pulse calculus for buffered circuits.

A pulse is a phased Pauli word created by shifting a rotation angle by pi:
``R_P(a) = (iP) R_P(a + pi)``.  Pulses commute through later gates (possibly
flipping rotation angles or changing letters at CNOTs) until they reach the
buffer, where they fold into new buffer angles.  The net effect is an exact
parameter-space map: each slot value goes to ``(-1)**p * value + q * pi`` for
per-slot bits (p, q), with an overall power of i on the unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .circuit import (
    BUFFER_NONE,
    BUFFER_RY,
    BUFFER_RYRX,
    BufferedCircuit,
    Cnot,
    FixedClifford,
    ParameterVector,
    PauliRotation,
    build_unitary,
    check_parameters,
)
from .errors import BindingConflictError, CapacityError, UnabsorbablePulseError
from .pauli import PauliWord

ENUMERATION_CAP = 20

_TWO_PI = 2.0 * math.pi
_FOLD_TOL = 1e-9


@dataclass(frozen=True)
class Pulse:
    """A phased Pauli word sitting at a layer boundary.

    Attributes:
        word: The full dragged operator, phase included (for a creation on a
            Hermitian axis P this is iP).
        location: Boundary index; 0 is the circuit input, k sits after
            layer k-1.
    """

    word: PauliWord
    location: int


@dataclass(frozen=True)
class SymmetryTransform:
    """Per-slot sign/shift bits plus the global phase of one symmetry.

    Each theta slot j maps to ``(-1)**p * theta_j + q * pi`` (reduced to
    [0, 2pi)), and likewise for gamma slots.  ``global_phase_pow`` is the
    power of i relating the circuit unitaries at the parameters the
    transform was constructed from; the bit maps themselves are
    parameter independent.
    """

    generators: tuple[int, ...]
    theta_bits: tuple[tuple[int, int], ...]
    gamma_bits: tuple[tuple[int, int], ...]
    global_phase_pow: int = 0

    def __post_init__(self) -> None:
        for bits in (*self.theta_bits, *self.gamma_bits):
            if bits[0] not in (0, 1) or bits[1] not in (0, 1):
                raise ValueError(f"bits must be 0 or 1, got {bits}")
        object.__setattr__(self, "global_phase_pow", self.global_phase_pow % 4)

    @property
    def is_identity(self) -> bool:
        """Whether every slot keeps its value (up to range reduction)."""
        return all(b == (0, 0) for b in (*self.theta_bits, *self.gamma_bits))

    def apply(self, params: ParameterVector) -> ParameterVector:
        """Map a parameter vector through the bit formulas, range reduced."""
        if len(params.theta) != len(self.theta_bits):
            raise ValueError(
                f"expected {len(self.theta_bits)} thetas, got {len(params.theta)}"
            )
        if len(params.gamma) != len(self.gamma_bits):
            raise ValueError(
                f"expected {len(self.gamma_bits)} gammas, got {len(params.gamma)}"
            )
        return ParameterVector(
            theta=_apply_bits(self.theta_bits, params.theta),
            gamma=_apply_bits(self.gamma_bits, params.gamma),
        )

    def beta(self, params: ParameterVector) -> tuple[int, ...]:
        """Return the half-domain indicator of each transformed theta."""
        moved = self.apply(params)
        return tuple(1 if value >= math.pi else 0 for value in moved.theta)

    def to_json(self) -> dict:
        """Serialize to a plain dict."""
        return {
            "generators": list(self.generators),
            "theta_bits": [list(b) for b in self.theta_bits],
            "gamma_bits": [list(b) for b in self.gamma_bits],
            "phase_pow": self.global_phase_pow,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SymmetryTransform":
        """Rebuild from the dict form."""
        return cls(
            generators=tuple(data["generators"]),
            theta_bits=tuple((b[0], b[1]) for b in data["theta_bits"]),
            gamma_bits=tuple((b[0], b[1]) for b in data["gamma_bits"]),
            global_phase_pow=data.get("phase_pow", 0),
        )


def _apply_bits(
    bits: Sequence[tuple[int, int]], values: Sequence[float]
) -> tuple[float, ...]:
    out = []
    for (p, q), value in zip(bits, values):
        moved = (-value if p else value) + q * math.pi
        out.append(moved % _TWO_PI)
    return tuple(out)


def _word_of(pulse: "Pulse | PauliWord") -> PauliWord:
    return pulse.word if isinstance(pulse, Pulse) else pulse


def create_pulse(
    circuit: BufferedCircuit, params: ParameterVector, slot: int
) -> tuple[ParameterVector, Pulse, int]:
    """Shift one slot by pi and emit the pulse of its first bound gate.

    Returns ``(new_params, pulse, phase_pow)`` where, writing the circuit as
    Suffix . R(angle) . Prefix around the generating gate, the original
    unitary factors as ``i**phase_pow`` times Suffix times the pulse word
    times the same gates evaluated at the new parameters.
    """
    check_parameters(circuit, params)
    gates = circuit.slot_gates(slot)
    if not gates:
        raise ValueError(f"slot {slot} has no bound gates")
    layer_idx, _, gate = gates[0]
    binding = gate.binding
    theta = params.theta[slot]
    target = binding.multiplier * ((theta + binding.multiplier * math.pi)) + binding.offset
    new_value = (theta + math.pi) % _TWO_PI
    realized = binding.multiplier * new_value + binding.offset
    wraps = round((realized - target) / _TWO_PI)
    if abs(realized - target - wraps * _TWO_PI) > _FOLD_TOL:
        raise BindingConflictError(f"slot {slot} shift is not a half-turn multiple")
    new_params = params.with_theta(slot, new_value)
    pulse = Pulse(word=gate.axis.times_i(1), location=layer_idx + 1)
    return new_params, pulse, (-2 * wraps) % 4


def commute_through_rotation(
    pulse: "Pulse | PauliWord", gate: PauliRotation
) -> bool:
    """Whether dragging the pulse past the rotation flips its angle."""
    word = _word_of(pulse)
    if word.is_identity:
        return False
    return not word.commutes_with(gate.axis)


def commute_through_cnot(
    pulse: "Pulse | PauliWord", gate: Cnot
) -> tuple["Pulse | PauliWord", int]:
    """Conjugate the pulse word by a CNOT; the bit update is phase free."""
    word = _word_of(pulse).conjugate_by_cnot(gate.control, gate.target)
    if isinstance(pulse, Pulse):
        return Pulse(word=word, location=pulse.location), 0
    return word, 0


def commute_through_fixed_clifford(
    pulse: "Pulse | PauliWord", gate: FixedClifford
) -> tuple["Pulse | PauliWord", int]:
    """Conjugate the pulse word by a fixed quarter-turn rotation."""
    word = _word_of(pulse)
    sigma = PauliWord.single(word.n, gate.qubit, gate.axis.upper())
    if not word.commutes_with(sigma):
        word = word.multiply(sigma.times_i(1 if gate.sign > 0 else 3))
    if isinstance(pulse, Pulse):
        return Pulse(word=word, location=pulse.location), 0
    return word, 0


def _absorption_updates(
    word: PauliWord, gamma: Sequence[float], buffer: str
) -> tuple[list[float], list[tuple[int, int]], int]:
    """Exact new buffer angles, per-slot bits and the extraction phase.

    The returned angles are unreduced targets; callers reduce them to
    [0, 2pi) and account each 2pi wrap as a factor -1 on the unitary.
    """
    if buffer == BUFFER_NONE:
        if not word.is_identity:
            raise UnabsorbablePulseError(
                f"pulse {word.to_text()} reaches the end of a bufferless circuit"
            )
        return list(gamma), [], word.phase_pow
    targets = [float(v) for v in gamma]
    bits = [(0, 0)] * len(targets)
    phase = (word.phase_pow + 3 * word.y_count + 3 * word.weight) % 4
    for qubit in word.support:
        letter = word.letter_at(qubit)
        if buffer == BUFFER_RY:
            if letter != "Y":
                raise UnabsorbablePulseError(
                    f"component {letter} on qubit {qubit} cannot fold into a Ry buffer"
                )
            targets[qubit] -= math.pi
            bits[qubit] = (0, 1)
            continue
        gy, gx = 2 * qubit, 2 * qubit + 1
        if letter == "X":
            targets[gy] = -targets[gy]
            targets[gx] -= math.pi
            bits[gy] = (1, 0)
            bits[gx] = (0, 1)
        elif letter == "Y":
            targets[gy] -= math.pi
            bits[gy] = (0, 1)
        else:
            targets[gy] = math.pi - targets[gy]
            targets[gx] -= math.pi
            bits[gy] = (1, 1)
            bits[gx] = (0, 1)
    return targets, bits, phase


def absorb_in_buffer(
    pulse: "Pulse | PauliWord", gamma: Sequence[float], buffer: str
) -> tuple[tuple[float, ...], int]:
    """Fold a pulse word into the buffer angles.

    Returns ``(gamma', phase_pow)`` with every angle reduced to [0, 2pi)
    such that Buffer(gamma) . word equals ``i**phase_pow`` Buffer(gamma').
    """
    word = _word_of(pulse)
    targets, _, extraction = _absorption_updates(word, gamma, buffer)
    phase = extraction
    out = []
    for target in targets:
        reduced = target % _TWO_PI
        wraps = round((reduced - target) / _TWO_PI)
        phase += 2 * wraps
        out.append(reduced)
    return tuple(out), phase % 4


def _walk(
    circuit: BufferedCircuit, generators: frozenset[int]
) -> tuple[dict[tuple[int, int], tuple[int, int]], PauliWord]:
    """Drag pulses from every generator gate to the buffer.

    Returns per-gate (flip sign, created count) events for each rotation and
    the accumulated word arriving at the buffer.
    """
    word = PauliWord.identity(circuit.n)
    events: dict[tuple[int, int], tuple[int, int]] = {}
    for layer_idx, gate_idx, gate in circuit.iter_gates():
        if isinstance(gate, PauliRotation):
            flip = -1 if commute_through_rotation(word, gate) else 1
            created = 0
            if gate.binding.slot in generators:
                created = 1
                word = word.multiply(gate.axis.times_i(1))
            events[(layer_idx, gate_idx)] = (flip, created)
        elif isinstance(gate, Cnot):
            word = word.conjugate_by_cnot(gate.control, gate.target)
        else:
            word, _ = commute_through_fixed_clifford(word, gate)
    return events, word


def _fold_slot(
    circuit: BufferedCircuit,
    slot: int,
    theta: Sequence[float],
    events: dict[tuple[int, int], tuple[int, int]],
) -> tuple[tuple[int, int], float, int]:
    """Find slot bits realizing every bound gate's required new angle.

    Returns ``((p, q), new_value, phase_pow)`` or raises when the gates
    sharing the slot disagree.
    """
    entries = circuit.slot_gates(slot)
    value = theta[slot]
    for p_bit, q_bit in ((0, 0), (0, 1), (1, 0), (1, 1)):
        raw = (-value if p_bit else value) + q_bit * math.pi
        new_value = raw % _TWO_PI
        phase = 0
        ok = True
        for layer_idx, gate_idx, gate in entries:
            flip, created = events[(layer_idx, gate_idx)]
            binding = gate.binding
            target = flip * binding.angle(theta) + created * math.pi
            realized = binding.multiplier * new_value + binding.offset
            wraps = round((realized - target) / _TWO_PI)
            if abs(realized - target - wraps * _TWO_PI) > _FOLD_TOL:
                ok = False
                break
            phase += 2 * wraps
        if ok:
            return (p_bit, q_bit), new_value, phase
    flips = sorted({events[(l, g)][0] for l, g, _ in entries})
    raise BindingConflictError(
        f"gates sharing slot {slot} need incompatible angle updates"
        f" (flip signs {flips}); the transform is not slot-expressible"
    )


def apply_transform(
    circuit: BufferedCircuit,
    params: ParameterVector,
    generators: Iterable[int],
) -> tuple[ParameterVector, SymmetryTransform]:
    """Create pulses on the generator slots and fold them through the circuit.

    Every bound gate of a generator slot emits its pulse; the accumulated
    word is dragged through the remaining gates and absorbed by the buffer.
    Returns the transformed parameters (all values reduced to [0, 2pi)) and
    the slot-bit record.  The recorded phase makes the unitaries satisfy
    ``U(new) = i**phase_pow U(old)`` at the given parameters.
    """
    check_parameters(circuit, params)
    gens = frozenset(int(s) for s in generators)
    num_slots = circuit.num_theta_slots
    bad = [s for s in gens if not 0 <= s < num_slots]
    if bad:
        raise ValueError(f"unknown theta slots {sorted(bad)}")
    events, word = _walk(circuit, gens)
    phase = 0
    theta_bits: list[tuple[int, int]] = []
    new_theta: list[float] = []
    for slot in range(num_slots):
        bits, new_value, slot_phase = _fold_slot(circuit, slot, params.theta, events)
        theta_bits.append(bits)
        new_theta.append(new_value)
        phase += slot_phase
    targets, raw_bits, extraction = _absorption_updates(
        word, params.gamma, circuit.buffer
    )
    phase -= extraction
    gamma_bits = list(raw_bits) + [(0, 0)] * (len(params.gamma) - len(raw_bits))
    new_gamma: list[float] = []
    for idx, target in enumerate(targets):
        p_bit, q_bit = gamma_bits[idx]
        raw = (-params.gamma[idx] if p_bit else params.gamma[idx]) + q_bit * math.pi
        new_value = raw % _TWO_PI
        wraps = round((new_value - target) / _TWO_PI)
        if abs(new_value - target - wraps * _TWO_PI) > _FOLD_TOL:
            raise BindingConflictError(
                f"buffer angle {idx} target is not a half-turn multiple"
            )
        phase += 2 * wraps
        new_gamma.append(new_value)
    transform = SymmetryTransform(
        generators=tuple(sorted(gens)),
        theta_bits=tuple(theta_bits),
        gamma_bits=tuple(gamma_bits),
        global_phase_pow=phase % 4,
    )
    new_params = ParameterVector(theta=tuple(new_theta), gamma=tuple(new_gamma))
    return new_params, transform


def enumerate_transforms(
    circuit: BufferedCircuit,
    params: ParameterVector,
    cap: int = ENUMERATION_CAP,
    sample: int | None = None,
    rng: np.random.Generator | None = None,
    skip_conflicts: bool = False,
) -> Iterator[tuple[tuple[int, ...], ParameterVector, SymmetryTransform]]:
    """Yield the transform of every generator subset, lazily.

    With M slots there are 2**M subsets (the empty set gives the identity
    transform).  Beyond ``cap`` slots a full sweep is refused; pass
    ``sample`` to draw that many subsets uniformly (with replacement)
    instead.  With ``skip_conflicts`` subsets whose pulses cannot be folded
    back onto the shared slots are dropped instead of raising.
    """
    num_slots = circuit.num_theta_slots
    if sample is None:
        if num_slots > cap:
            raise CapacityError(
                f"{num_slots} slots give 2**{num_slots} subsets; cap is {cap}"
                " (pass sample= to draw a subset sample)"
            )
        subsets: Iterable[tuple[int, ...]] = (
            tuple(s for s in range(num_slots) if mask >> s & 1)
            for mask in range(1 << num_slots)
        )
    else:
        if sample < 1:
            raise ValueError(f"sample must be positive, got {sample}")
        generator = rng if rng is not None else np.random.default_rng(0)

        def _draw() -> Iterator[tuple[int, ...]]:
            for _ in range(sample):
                yield tuple(
                    s for s in range(num_slots) if generator.random() < 0.5
                )

        subsets = _draw()
    for subset in subsets:
        try:
            moved, transform = apply_transform(circuit, params, subset)
        except BindingConflictError:
            if skip_conflicts:
                continue
            raise
        yield subset, moved, transform


def reduce_domain(
    circuit: BufferedCircuit, params: ParameterVector
) -> ParameterVector:
    """Pulse slots whose value lies in [pi, 2pi) until all sit in [0, pi).

    Slots are swept in the time order of their first bound gate, so each
    created pulse only disturbs slots not yet visited.  The result is a
    fixed point: reducing again changes nothing.
    """
    current = params.normalized()
    order = circuit.slots_in_time_order()
    for _ in range(len(order) + 1):
        changed = False
        for slot in order:
            if current.theta[slot] >= math.pi:
                current, _ = apply_transform(circuit, current, (slot,))
                changed = True
        if not changed:
            return current
    raise BindingConflictError("domain reduction did not reach a fixed point")


def transform_fidelity(
    circuit: BufferedCircuit,
    params: ParameterVector,
    transform: "SymmetryTransform | ParameterVector",
) -> float:
    """Phase-insensitive overlap of the unitaries before and after a map.

    The third argument is either a transform (applied to ``params``) or an
    already transformed parameter vector.  Returns
    ``|Tr(U(p)^dag U(p'))| / 2**n``; 1 means the two parameter sets realize
    the same unitary up to global phase.
    """
    if isinstance(transform, SymmetryTransform):
        moved = transform.apply(params)
    else:
        moved = transform
    before = build_unitary(circuit, params)
    after = build_unitary(circuit, moved)
    dim = before.shape[0]
    return float(abs(np.trace(before.conj().T @ after)) / dim)
