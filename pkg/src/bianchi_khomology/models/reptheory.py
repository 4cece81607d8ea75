"""Representation-ring data: group types, cyclotomic character values, tables, embeddings."""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field

from .algebra import IntMatrix


class GroupType(StrEnum):
    """Finite stabilizer types occurring in Bianchi groups (V4 is the Klein four group)."""

    TRIVIAL = "Trivial"
    C2 = "C2"
    C3 = "C3"
    V4 = "V4"
    S3 = "S3"
    A4 = "A4"


class CyclotomicInt:
    """Element a + b·ζ₃ of Z[ζ₃], with ζ₃² = −1 − ζ₃.

    Example:
        >>> zeta = CyclotomicInt(0, 1)
        >>> zeta * zeta
        CyclotomicInt(-1, -1)
        >>> zeta * zeta * zeta == 1
        True
        >>> zeta.conjugate() == zeta * zeta
        True
    """

    __slots__ = ("_a", "_b")

    def __init__(self, a: int, b: int = 0) -> None:
        self._a = a
        self._b = b

    @property
    def a(self) -> int:
        return self._a

    @property
    def b(self) -> int:
        return self._b

    @classmethod
    def from_int(cls, x: int) -> "CyclotomicInt":
        return cls(x, 0)

    def __repr__(self) -> str:
        return f"CyclotomicInt({self._a}, {self._b})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        return f"{self._a}{self._b:+}ζ"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self._a == other and self._b == 0
        if isinstance(other, CyclotomicInt):
            return self._a == other.a and self._b == other.b
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._a, self._b))

    def __add__(self, other: "int | CyclotomicInt") -> "CyclotomicInt":
        if isinstance(other, int):
            other = self.from_int(other)
        if isinstance(other, CyclotomicInt):
            return CyclotomicInt(self._a + other.a, self._b + other.b)
        return NotImplemented

    def __radd__(self, other: int) -> "CyclotomicInt":
        return self + other

    def __neg__(self) -> "CyclotomicInt":
        return CyclotomicInt(-self._a, -self._b)

    def __sub__(self, other: "int | CyclotomicInt") -> "CyclotomicInt":
        return self + (-other)

    def __mul__(self, other: "int | CyclotomicInt") -> "CyclotomicInt":
        if isinstance(other, int):
            return CyclotomicInt(self._a * other, self._b * other)
        if isinstance(other, CyclotomicInt):
            bd = self._b * other.b
            return CyclotomicInt(
                self._a * other.a - bd,
                self._a * other.b + self._b * other.a - bd,
            )
        return NotImplemented

    def __rmul__(self, other: int) -> "CyclotomicInt":
        return self * other

    def conjugate(self) -> "CyclotomicInt":
        """Complex conjugate; sends ζ to ζ² = −1 − ζ."""
        return CyclotomicInt(self._a - self._b, -self._b)

    def exact_div(self, n: int) -> "CyclotomicInt":
        """Divide by a rational integer, requiring an exact quotient."""
        if self._a % n or self._b % n:
            raise ArithmeticError(f"{self} is not divisible by {n}")
        return CyclotomicInt(self._a // n, self._b // n)


class CharacterTable(BaseModel):
    """Character table of one group type.

    Rows are irreducible characters in the fixed order, columns are conjugacy
    classes; the identity class comes first.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    group: GroupType
    class_sizes: tuple[int, ...]
    class_orders: tuple[int, ...]
    irreducible_names: tuple[str, ...]
    chars: tuple[tuple[CyclotomicInt, ...], ...]

    @property
    def order(self) -> int:
        return sum(self.class_sizes)

    @property
    def dims(self) -> list[int]:
        """Degrees of the irreducibles, read off the identity class."""
        return [row[0].a for row in self.chars]

    @property
    def n_irreducibles(self) -> int:
        return len(self.chars)


class EmbeddingSpec(BaseModel):
    """Inclusion sub ↪ sup given by where each conjugacy class of sub lands in sup."""

    model_config = ConfigDict(frozen=True)

    sub: GroupType
    sup: GroupType
    class_map: tuple[int, ...] = Field(..., description="Index of the sup class receiving each sub class")
    name: str | None = Field(default=None, description="Canonical registry name, if any")


class InductionMatrix(BaseModel):
    """Induction R(sub) → R(sup); rows indexed by irr(sup), columns by irr(sub)."""

    model_config = ConfigDict(frozen=True)

    sub: GroupType
    sup: GroupType
    matrix: IntMatrix


class EmbeddingReport(BaseModel):
    """Outcome of validating an embedding or an explicit induction matrix."""

    model_config = ConfigDict(frozen=True)

    problems: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.problems
