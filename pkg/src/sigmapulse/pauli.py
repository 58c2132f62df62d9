"""Phase-tracked n-qubit Pauli words in symplectic (bit mask) form.

A word is stored as two integer bit masks ``x_bits`` and ``z_bits`` (bit j
refers to qubit j) together with an integer power of ``i`` taken mod 4.  The
dense operator it denotes is::

    i**phase_pow * kron_{j=0..n-1}( X**a_j @ Z**b_j )

where ``a_j``/``b_j`` are the bits of ``x_bits``/``z_bits`` and qubit 0 is the
leftmost Kronecker factor.  With ``phase_pow`` equal to the number of qubits
carrying both bits (the Y count), the word is Hermitian and its dense form is
the plain tensor product of I/X/Y/Z letters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError

DENSE_QUBIT_LIMIT = 12

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}

_XZ_BLOCKS = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    (0, 1): np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    (1, 1): np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex),
}


@dataclass(frozen=True)
class PauliWord:
    """An n-qubit Pauli operator ``i**phase_pow * X^a Z^b`` in bit form.

    Attributes:
        n: Number of qubits the word acts on.
        x_bits: Bit mask of X components (bit j set means X on qubit j).
        z_bits: Bit mask of Z components.
        phase_pow: Power of i multiplying the X-then-Z product, mod 4.
    """

    n: int
    x_bits: int
    z_bits: int
    phase_pow: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError(f"word needs at least one qubit, got n={self.n}")
        mask = (1 << self.n) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise DimensionError(
                f"bit masks exceed {self.n} qubits: x={self.x_bits:#x} z={self.z_bits:#x}"
            )
        if self.x_bits < 0 or self.z_bits < 0:
            raise DimensionError("bit masks must be non-negative")
        object.__setattr__(self, "phase_pow", self.phase_pow % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliWord":
        """Return the identity word on n qubits."""
        return cls(n=n, x_bits=0, z_bits=0, phase_pow=0)

    @classmethod
    def from_letters(cls, letters: str) -> "PauliWord":
        """Build the Hermitian word for a letter string such as ``"XIZ"``.

        Qubit 0 is the first letter.  The phase power is set to the Y count so
        the dense form equals the plain tensor product of the letters.
        """
        if not letters:
            raise DimensionError("letter string must be non-empty")
        x_bits = 0
        z_bits = 0
        for j, letter in enumerate(letters):
            try:
                a, b = _LETTER_BITS[letter]
            except KeyError:
                raise ValueError(f"unknown Pauli letter {letter!r}") from None
            x_bits |= a << j
            z_bits |= b << j
        y_count = (x_bits & z_bits).bit_count()
        return cls(n=len(letters), x_bits=x_bits, z_bits=z_bits, phase_pow=y_count % 4)

    @classmethod
    def from_text(cls, text: str) -> "PauliWord":
        """Parse a signed word such as ``"+XZI"``, ``"-iYZ"`` or ``"ZZ"``."""
        body = text
        power = 0
        if body.startswith("+"):
            body = body[1:]
        elif body.startswith("-"):
            power = 2
            body = body[1:]
        if body.startswith("i"):
            power += 1
            body = body[1:]
        word = cls.from_letters(body)
        return cls(
            n=word.n,
            x_bits=word.x_bits,
            z_bits=word.z_bits,
            phase_pow=(word.phase_pow + power) % 4,
        )

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliWord":
        """Return the Hermitian single-letter word on one qubit of n."""
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} outside [0, {n})")
        letters = ["I"] * n
        letters[qubit] = letter
        return cls.from_letters("".join(letters))

    @property
    def y_count(self) -> int:
        """Number of qubits carrying both an X and a Z bit."""
        return (self.x_bits & self.z_bits).bit_count()

    @property
    def weight(self) -> int:
        """Number of qubits with a non-identity letter."""
        return (self.x_bits | self.z_bits).bit_count()

    @property
    def is_identity(self) -> bool:
        """Whether the word is the identity operator up to phase."""
        return self.x_bits == 0 and self.z_bits == 0

    @property
    def is_hermitian(self) -> bool:
        """Whether the dense operator is Hermitian."""
        return (self.phase_pow - self.y_count) % 2 == 0

    @property
    def support(self) -> tuple[int, ...]:
        """Qubit indices with a non-identity letter, ascending."""
        bits = self.x_bits | self.z_bits
        return tuple(j for j in range(self.n) if bits >> j & 1)

    def bits_at(self, qubit: int) -> tuple[int, int]:
        """Return the (x, z) bit pair on one qubit."""
        return (self.x_bits >> qubit & 1, self.z_bits >> qubit & 1)

    def letter_at(self, qubit: int) -> str:
        """Return the Hermitian letter I/X/Y/Z on one qubit."""
        return _BITS_LETTER[self.bits_at(qubit)]

    def times_i(self, power: int) -> "PauliWord":
        """Return the word multiplied by ``i**power``."""
        return PauliWord(
            n=self.n,
            x_bits=self.x_bits,
            z_bits=self.z_bits,
            phase_pow=(self.phase_pow + power) % 4,
        )

    def hermitian(self) -> "PauliWord":
        """Return the Hermitian representative with the same letters."""
        return PauliWord(
            n=self.n,
            x_bits=self.x_bits,
            z_bits=self.z_bits,
            phase_pow=self.y_count % 4,
        )

    def multiply(self, other: "PauliWord") -> "PauliWord":
        """Return the operator product self @ other with exact phase."""
        if self.n != other.n:
            raise DimensionError(f"qubit counts differ: {self.n} vs {other.n}")
        swap_parity = (self.z_bits & other.x_bits).bit_count()
        return PauliWord(
            n=self.n,
            x_bits=self.x_bits ^ other.x_bits,
            z_bits=self.z_bits ^ other.z_bits,
            phase_pow=(self.phase_pow + other.phase_pow + 2 * swap_parity) % 4,
        )

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        return self.multiply(other)

    def commutes_with(self, other: "PauliWord") -> bool:
        """Whether the two words commute as operators."""
        if self.n != other.n:
            raise DimensionError(f"qubit counts differ: {self.n} vs {other.n}")
        anti = (self.x_bits & other.z_bits).bit_count() + (self.z_bits & other.x_bits).bit_count()
        return anti % 2 == 0

    def conjugate_by_cnot(self, control: int, target: int) -> "PauliWord":
        """Return CNOT @ self @ CNOT for a CNOT on (control, target).

        In the X-then-Z bit convention the update is phase free: the control's
        X bit toggles the target's X bit and the target's Z bit toggles the
        control's Z bit.
        """
        for qubit in (control, target):
            if not 0 <= qubit < self.n:
                raise DimensionError(f"qubit {qubit} outside [0, {self.n})")
        if control == target:
            raise DimensionError("control and target must differ")
        x_bits = self.x_bits
        z_bits = self.z_bits
        if x_bits >> control & 1:
            x_bits ^= 1 << target
        if z_bits >> target & 1:
            z_bits ^= 1 << control
        return PauliWord(n=self.n, x_bits=x_bits, z_bits=z_bits, phase_pow=self.phase_pow)

    def to_text(self) -> str:
        """Render as a signed letter string such as ``"-iXZI"``."""
        letters = "".join(self.letter_at(j) for j in range(self.n))
        prefix = _PHASE_PREFIX[(self.phase_pow - self.y_count) % 4]
        return prefix + letters

    def to_matrix(self) -> np.ndarray:
        """Return the dense complex matrix; refuses more than 12 qubits."""
        if self.n > DENSE_QUBIT_LIMIT:
            raise CapacityError(
                f"dense form limited to {DENSE_QUBIT_LIMIT} qubits, got {self.n}"
            )
        out = np.array([[1.0 + 0.0j]])
        for j in range(self.n):
            out = np.kron(out, _XZ_BLOCKS[self.bits_at(j)])
        return (1j ** self.phase_pow) * out

    def __str__(self) -> str:
        return self.to_text()


def multiply(left: PauliWord, right: PauliWord) -> PauliWord:
    """Return the operator product left @ right with exact phase."""
    return left.multiply(right)


def commutes(left: PauliWord, right: PauliWord) -> bool:
    """Whether two Pauli words commute as operators."""
    return left.commutes_with(right)


def to_matrix(word: PauliWord) -> np.ndarray:
    """Return the dense matrix of a word; refuses more than 12 qubits."""
    return word.to_matrix()
