"""Exact integer value types: matrices, Smith decompositions, abelian groups."""

import re
from itertools import groupby
from math import gcd
from typing import Any, Self

from pydantic import BaseModel, ConfigDict, Field, model_serializer, model_validator

_GROUP_TERM = re.compile(r"^Z(?:\^(?P<rank>\d+)|/(?P<order>\d+))?$")


class IntMatrix(BaseModel):
    """Arbitrary-precision integer matrix stored row-major.

    Empty shapes (0 rows or 0 columns) are legal and denote zero maps.

    Example:
        >>> m = IntMatrix.from_rows([[1, 2], [3, 4]])
        >>> m.rows, m.cols, m[1, 0]
        (2, 2, 3)
        >>> IntMatrix.from_rows([[]]).cols
        0
    """

    model_config = ConfigDict(frozen=True)

    rows: int = Field(..., ge=0, description="Number of rows")
    cols: int = Field(..., ge=0, description="Number of columns")
    entries: tuple[int, ...] = Field(default=(), description="Entries in row-major order")

    @model_validator(mode="after")
    def check_shape(self) -> Self:
        """Reject entry tuples that do not match rows × cols."""
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"IntMatrix of shape {self.rows}x{self.cols} needs "
                f"{self.rows * self.cols} entries, got {len(self.entries)}"
            )
        return self

    @classmethod
    def from_rows(cls, rows: list[list[int]] | tuple[tuple[int, ...], ...], cols: int | None = None) -> "IntMatrix":
        """Build a matrix from nested rows.

        Args:
            rows: Row lists; all rows must share one length
            cols: Column count, required only when there are no rows

        Raises:
            ValueError: If rows are ragged or disagree with cols
        """
        row_list = [list(r) for r in rows]
        width = len(row_list[0]) if row_list else (cols or 0)
        if cols is not None and row_list and cols != width:
            raise ValueError(f"rows have {width} columns, expected {cols}")
        if any(len(r) != width for r in row_list):
            raise ValueError("ragged rows")
        return cls(
            rows=len(row_list),
            cols=width,
            entries=tuple(int(x) for r in row_list for x in r),
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        """Zero matrix of the given shape."""
        return cls(rows=rows, cols=cols, entries=(0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        """n × n identity matrix."""
        return cls(
            rows=n,
            cols=n,
            entries=tuple(1 if i == j else 0 for i in range(n) for j in range(n)),
        )

    @classmethod
    def diagonal(cls, values: list[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        """Rectangular matrix with the given leading diagonal."""
        r = len(values) if rows is None else rows
        c = len(values) if cols is None else cols
        grid = [[0] * c for _ in range(r)]
        for i, v in enumerate(values):
            grid[i][i] = v
        return cls.from_rows(grid, cols=c)

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        """Nested mutable copy of the entries."""
        return [list(self.entries[i * self.cols : (i + 1) * self.cols]) for i in range(self.rows)]

    def column(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            rows=self.cols,
            cols=self.rows,
            entries=tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        a, b = self.to_rows(), other.to_rows()
        product = [
            [sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return IntMatrix.from_rows(product, cols=other.cols)

    def scaled(self, factor: int) -> "IntMatrix":
        return IntMatrix(rows=self.rows, cols=self.cols, entries=tuple(factor * x for x in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)


class SnfResult(BaseModel):
    """Smith decomposition U·M·V = D of an integer matrix M."""

    model_config = ConfigDict(frozen=True)

    U: IntMatrix = Field(..., description="Unimodular row transform (rows × rows)")
    D: IntMatrix = Field(..., description="Diagonal Smith form (rows × cols)")
    V: IntMatrix = Field(..., description="Unimodular column transform (cols × cols)")

    @property
    def diagonal(self) -> list[int]:
        """Full diagonal d₁, d₂, … including trailing zeros."""
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def divisors(self) -> list[int]:
        """Nonzero diagonal entries, the elementary divisors."""
        return [d for d in self.diagonal if d != 0]

    @property
    def rank(self) -> int:
        return len(self.divisors)


class FgAbelianGroup(BaseModel):
    """Finitely generated abelian group Z^r ⊕ Z/t₁ ⊕ … ⊕ Z/tₙ with t₁ | t₂ | … | tₙ.

    The invariant-factor form is canonical, so model equality is group isomorphism.
    Wherever a model field expects a group, its rendering is accepted as input.

    Example:
        >>> g = FgAbelianGroup.from_cyclic_orders(0, 0, 0, 0, 0, 2)
        >>> g.render()
        'Z^5 + Z/2'
        >>> FgAbelianGroup.parse("Z^5 + Z/2") == g
        True
        >>> FgAbelianGroup.from_cyclic_orders(4, 6).torsion
        (2, 12)
    """

    model_config = ConfigDict(frozen=True)

    free_rank: int = Field(default=0, ge=0, description="Rank of the free part")
    torsion: tuple[int, ...] = Field(default=(), description="Invariant factors, each dividing the next")

    @model_validator(mode="before")
    @classmethod
    def accept_rendering(cls, data: Any) -> Any:
        """Let documents spell groups as strings such as 'Z^6 + Z/2'."""
        if isinstance(data, str):
            return _parse_group_text(data)
        return data

    @model_validator(mode="after")
    def check_canonical(self) -> Self:
        """Enforce the invariant-factor chain."""
        for t in self.torsion:
            if t < 2:
                raise ValueError(f"invariant factors must be >= 2, got {t}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError(f"invariant factors must divide each other, {a} does not divide {b}")
        return self

    @classmethod
    def from_cyclic_orders(cls, *orders: int) -> "FgAbelianGroup":
        """Canonical form of ⊕ Z/nᵢ, where nᵢ = 0 contributes Z and nᵢ = 1 nothing."""
        free_rank = sum(1 for n in orders if n == 0)
        finite = [abs(n) for n in orders if abs(n) > 1]
        # pairwise (gcd, lcm) sweep leaves a divisibility chain
        for i in range(len(finite)):
            for j in range(i + 1, len(finite)):
                g = gcd(finite[i], finite[j])
                finite[i], finite[j] = g, finite[i] * finite[j] // g
        return cls(free_rank=free_rank, torsion=tuple(n for n in finite if n > 1))

    @classmethod
    def free(cls, rank: int) -> "FgAbelianGroup":
        return cls(free_rank=rank)

    @classmethod
    def zero(cls) -> "FgAbelianGroup":
        return cls()

    @classmethod
    def parse(cls, text: str) -> "FgAbelianGroup":
        return cls.model_validate(text)

    def direct_sum(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        return FgAbelianGroup.from_cyclic_orders(
            *([0] * (self.free_rank + other.free_rank)), *self.torsion, *other.torsion
        )

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def is_free(self) -> bool:
        return not self.torsion

    def torsion_order(self) -> int:
        order = 1
        for t in self.torsion:
            order *= t
        return order

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (self.free_rank, self.torsion)

    def render(self) -> str:
        """Canonical text 'Z^r + Z/d1 + …'; the zero group renders as '0'."""
        parts: list[str] = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    @model_serializer
    def dump_rendering(self) -> str:
        """Serialise as the canonical rendering, which the before-validator reads back."""
        return self.render()

    def __str__(self) -> str:
        return self.render()


def _parse_group_text(text: str) -> dict[str, Any]:
    stripped = text.strip()
    if stripped in ("0", ""):
        return {"free_rank": 0, "torsion": ()}
    free_rank = 0
    orders: list[int] = []
    for term in (t.strip() for t in stripped.split("+")):
        match = _GROUP_TERM.match(term)
        if match is None:
            raise ValueError(f"cannot parse group term {term!r} in {text!r}")
        if match.group("order") is not None:
            orders.append(int(match.group("order")))
        else:
            free_rank += int(match.group("rank") or 1)
    canonical = FgAbelianGroup.from_cyclic_orders(*([0] * free_rank), *orders)
    return {"free_rank": canonical.free_rank, "torsion": canonical.torsion}


def format_divisors(divisors: list[int]) -> str:
    """Run-length rendering of an elementary-divisor list.

    Example:
        >>> format_divisors([1, 1, 1, 1, 1, 1, 1, 2])
        '(1×7, 2×1)'
        >>> format_divisors([])
        '()'
    """
    runs = [f"{value}×{len(list(group))}" for value, group in groupby(divisors)]
    return "(" + ", ".join(runs) + ")"
