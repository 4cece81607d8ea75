"""Imaginary quadratic fields, their integers, and boundary points."""

from fractions import Fraction
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

# a + b·ω in the integral basis (1, ω)
QuadInt = tuple[int, int]


class ImagQuadField(BaseModel):
    """Q(√−m) with ring of integers Z[ω].

    ω = √−m, or ω = (1 + √−m)/2 when m ≡ 3 mod 4.

    Example:
        >>> ImagQuadField(m=5).disc
        -20
        >>> ImagQuadField(m=7).disc
        -7
        >>> ImagQuadField(m=5).norm((1, 1))
        6
    """

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1, description="Squarefree positive integer")

    @property
    def half_integral(self) -> bool:
        """True when ω = (1 + √−m)/2."""
        return self.m % 4 == 3

    @property
    def disc(self) -> int:
        return -self.m if self.half_integral else -4 * self.m

    def norm(self, x: QuadInt) -> int:
        a, b = x
        if self.half_integral:
            return a * a + a * b + b * b * ((1 + self.m) // 4)
        return a * a + self.m * b * b

    def mul(self, x: QuadInt, y: QuadInt) -> QuadInt:
        a, b = x
        c, d = y
        bd = b * d
        if self.half_integral:
            # ω² = ω − (1 + m)/4
            return (a * c - bd * ((1 + self.m) // 4), a * d + b * c + bd)
        return (a * c - self.m * bd, a * d + b * c)

    def sub(self, x: QuadInt, y: QuadInt) -> QuadInt:
        return (x[0] - y[0], x[1] - y[1])

    def units(self) -> list[QuadInt]:
        """Elements of norm one, which have coordinates in {−1, 0, 1}."""
        return [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if self.norm((a, b)) == 1]

    def render(self, x: QuadInt) -> str:
        a, b = x
        if b == 0:
            return str(a)
        unit = "w" if b == 1 else "-w" if b == -1 else f"{b}*w"
        if a == 0:
            return unit
        return f"{a}{unit}" if unit.startswith("-") else f"{a}+{unit}"


class QuadPoint(BaseModel):
    """Boundary point λ/μ of the upper half-space, with λ, μ in the ring of integers."""

    model_config = ConfigDict(frozen=True)

    field: ImagQuadField
    numerator: tuple[int, int]
    denominator: tuple[int, int]

    @model_validator(mode="after")
    def check_denominator(self) -> Self:
        if self.denominator == (0, 0):
            raise ValueError("denominator must be nonzero")
        return self

    def abs_squared(self) -> Fraction:
        """|λ/μ|² as an exact rational."""
        return Fraction(self.field.norm(self.numerator), self.field.norm(self.denominator))


class SingularWitness(BaseModel):
    """A coprime pair (c, d), c ≠ 0, with |c·D − d|² < 1."""

    model_config = ConfigDict(frozen=True)

    c: tuple[int, int]
    d: tuple[int, int]
    distance_squared_num: int
    distance_squared_den: int

    @property
    def distance_squared(self) -> Fraction:
        return Fraction(self.distance_squared_num, self.distance_squared_den)
