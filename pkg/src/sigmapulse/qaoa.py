"""Slot-shift symmetry templates for alternating-operator circuits.

The circuit alternates problem layers (Z-type word rotations, one shared
slot per layer) with mixing layers (an X rotation per qubit, one shared
slot per layer) and has no buffer, so a created pulse must annihilate
against a partner pulse before the end of the circuit.  Two template
families arise:

  - mixing pairs: shift two mixing slots by pi; valid when every problem
    term has the same Z-count parity (odd parities also negate the problem
    slots in between),
  - problem shifts: shift problem slots by pi; valid when every qubit
    appears in the same number d of problem terms (a single slot for even
    d, a pair with mixing-slot negation in between for odd d).
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import (
    BUFFER_NONE,
    BufferedCircuit,
    ParameterVector,
    PauliRotation,
    SlotBinding,
)
from .errors import DimensionError
from .pauli import PauliWord
from .pulses import SymmetryTransform, apply_transform

KIND_MIXING_PAIR = "mixing_pair"
KIND_PROBLEM_SINGLE = "problem_single"
KIND_PROBLEM_PAIR = "problem_pair"


def problem_slot(layer: int) -> int:
    """Slot index of the problem half of one layer."""
    return 2 * layer


def mixing_slot(layer: int) -> int:
    """Slot index of the mixing half of one layer."""
    return 2 * layer + 1


def _pack_rotations(rotations: list[PauliRotation]) -> list[tuple[PauliRotation, ...]]:
    sublayers: list[list[PauliRotation]] = []
    used: list[set[int]] = []
    for rotation in rotations:
        support = set(rotation.axis.support)
        for idx, busy in enumerate(used):
            if not busy & support:
                sublayers[idx].append(rotation)
                busy.update(support)
                break
        else:
            sublayers.append([rotation])
            used.append(set(support))
    return [tuple(s) for s in sublayers]


def qaoa_circuit(
    terms: list[tuple[float, PauliWord]], num_layers: int
) -> BufferedCircuit:
    """Build the alternating circuit for unit-weight Z-type problem terms.

    Layer k applies every problem term as a rotation bound to slot 2k (with
    the term's sign as multiplier), then an X rotation on each qubit bound
    to slot 2k+1.  The parameters are half-angle slot values.
    """
    if not terms:
        raise ValueError("need at least one problem term")
    if num_layers < 1:
        raise ValueError(f"need at least one layer, got {num_layers}")
    n = terms[0][1].n
    for weight, word in terms:
        if word.n != n:
            raise DimensionError("problem terms act on mixed qubit counts")
        if word.x_bits or word.is_identity:
            raise ValueError(f"problem terms must be non-identity Z-type, got {word.to_text()}")
        if abs(abs(weight) - 1.0) > 1e-12:
            raise ValueError(f"slot bindings support unit weights only, got {weight}")
    layers: list[tuple[PauliRotation, ...]] = []
    for layer_idx in range(num_layers):
        problem_rotations = [
            PauliRotation(
                axis=word,
                binding=SlotBinding(
                    slot=problem_slot(layer_idx),
                    multiplier=1 if weight > 0 else -1,
                ),
            )
            for weight, word in terms
        ]
        layers.extend(_pack_rotations(problem_rotations))
        layers.append(
            tuple(
                PauliRotation(
                    axis=PauliWord.single(n, qubit, "X"),
                    binding=SlotBinding(slot=mixing_slot(layer_idx)),
                )
                for qubit in range(n)
            )
        )
    return BufferedCircuit(n=n, layers=tuple(layers), buffer=BUFFER_NONE)


@dataclass(frozen=True)
class QaoaTemplate:
    """One shift-rule instance together with its folded transform."""

    kind: str
    layers: tuple[int, ...]
    transform: SymmetryTransform


MIXING_RULE_NONE = "none"
MIXING_RULE_PAIR = "pair"
MIXING_RULE_PAIR_NEGATING = "pair_negating"
PROBLEM_RULE_NONE = "none"
PROBLEM_RULE_SINGLE = "single"
PROBLEM_RULE_PAIR = "pair"


@dataclass(frozen=True, eq=False)
class QaoaReport:
    """Applicable shift rules for one problem, with diagnostics.

    ``mixing_rule`` reports whether mixing-slot pi pairs apply (and whether
    they negate the problem slots in between); ``problem_rule`` reports the
    problem-slot family selected by the common Z degree, or ``none`` when
    the degrees differ.
    """

    circuit: BufferedCircuit
    num_layers: int
    z_degrees: tuple[int, ...]
    term_parities: tuple[int, ...]
    mixing_rule: str
    problem_rule: str
    templates: tuple[QaoaTemplate, ...]
    diagnostics: tuple[str, ...]

    @property
    def verdict(self) -> str:
        """Summary: which template families were found, or ``none``."""
        kinds = sorted({t.kind for t in self.templates})
        return "+".join(kinds) if kinds else "none"


def qaoa_symmetries(
    terms: list[tuple[float, PauliWord]], num_layers: int
) -> QaoaReport:
    """Enumerate the shift templates the two rule families admit.

    Both rules are checked on the literal structural conditions (uniform
    term parity, equal per-qubit Z degree); each emitted template's
    transform is produced by folding actual pulses through the circuit, so
    it is exact by construction.
    """
    circuit = qaoa_circuit(terms, num_layers)
    n = circuit.n
    degrees = [0] * n
    for _, word in terms:
        for qubit in word.support:
            degrees[qubit] += 1
    parities = tuple(word.weight % 2 for _, word in terms)
    # Fold at a generic angle: at multiples of pi/2 a sign flip and a shift
    # coincide, which would freeze the wrong parameter-independent bits.
    generic = ParameterVector(
        theta=(0.7,) * circuit.num_theta_slots,
        gamma=(0.0,) * circuit.num_gamma_slots,
    )
    templates: list[QaoaTemplate] = []
    diagnostics: list[str] = []
    if len(set(parities)) > 1:
        mixing_rule = MIXING_RULE_NONE
        diagnostics.append(
            "mixing pairs need a uniform problem-term Z-count parity; "
            f"parities are {list(parities)}"
        )
    else:
        mixing_rule = MIXING_RULE_PAIR if parities[0] == 0 else MIXING_RULE_PAIR_NEGATING
        for i in range(num_layers):
            for j in range(i + 1, num_layers):
                generators = (mixing_slot(i), mixing_slot(j))
                _, transform = apply_transform(circuit, generic, generators)
                templates.append(
                    QaoaTemplate(kind=KIND_MIXING_PAIR, layers=(i, j), transform=transform)
                )
        if num_layers < 2:
            diagnostics.append("mixing pairs need at least two layers")
    if len(set(degrees)) > 1:
        problem_rule = PROBLEM_RULE_NONE
        diagnostics.append(
            "problem shifts need every qubit in the same number of terms; "
            f"Z degrees are {degrees}"
        )
    elif degrees[0] % 2 == 0:
        problem_rule = PROBLEM_RULE_SINGLE
        for i in range(num_layers):
            _, transform = apply_transform(circuit, generic, (problem_slot(i),))
            templates.append(
                QaoaTemplate(kind=KIND_PROBLEM_SINGLE, layers=(i,), transform=transform)
            )
    else:
        problem_rule = PROBLEM_RULE_PAIR
        for i in range(num_layers):
            for j in range(i + 1, num_layers):
                generators = (problem_slot(i), problem_slot(j))
                _, transform = apply_transform(circuit, generic, generators)
                templates.append(
                    QaoaTemplate(kind=KIND_PROBLEM_PAIR, layers=(i, j), transform=transform)
                )
        if num_layers < 2:
            diagnostics.append(
                "problem shifts at odd Z degree need at least two layers"
            )
    return QaoaReport(
        circuit=circuit,
        num_layers=num_layers,
        z_degrees=tuple(degrees),
        term_parities=parities,
        mixing_rule=mixing_rule,
        problem_rule=problem_rule,
        templates=tuple(templates),
        diagnostics=tuple(diagnostics),
    )


def ring_graph_terms(n: int) -> list[tuple[float, PauliWord]]:
    """ZZ terms on the edges of an n-cycle."""
    if n < 3:
        raise DimensionError(f"cycle needs at least 3 vertices, got {n}")
    return [_zz_term(n, j, (j + 1) % n) for j in range(n)]


def complete_graph_terms(n: int) -> list[tuple[float, PauliWord]]:
    """ZZ terms on the edges of the complete graph on n vertices."""
    if n < 2:
        raise DimensionError(f"graph needs at least 2 vertices, got {n}")
    return [_zz_term(n, a, b) for a in range(n) for b in range(a + 1, n)]


def star_graph_terms(n: int) -> list[tuple[float, PauliWord]]:
    """ZZ terms from vertex 0 to every other vertex."""
    if n < 2:
        raise DimensionError(f"star needs at least 2 vertices, got {n}")
    return [_zz_term(n, 0, b) for b in range(1, n)]


def _zz_term(n: int, a: int, b: int) -> tuple[float, PauliWord]:
    letters = ["I"] * n
    letters[a] = "Z"
    letters[b] = "Z"
    return (1.0, PauliWord.from_letters("".join(letters)))
