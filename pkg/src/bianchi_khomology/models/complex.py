"""Pruned Floege complex: cell orbits, incidences, and validation reports.

PrunedComplex doubles as the JSON complex document: field names and the
"class_number" alias are the external contract, and unknown keys are rejected.
"""

from typing import Any, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .algebra import IntMatrix
from .reptheory import GroupType


class CanonicalEmbeddingRef(BaseModel):
    """Embedding given by its registry name, e.g. {"canonical": "C2-in-S3"}."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    canonical: str


class ExplicitMatrixRef(BaseModel):
    """Embedding given by its induction matrix verbatim (rows irr(face), columns irr(cell))."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    matrix: tuple[tuple[int, ...], ...]


class ClassMapSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    sub: GroupType
    sup: GroupType
    classes: tuple[int, ...]


class ClassMapRef(BaseModel):
    """Embedding given by an explicit class map."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    class_map: ClassMapSpec


EmbeddingRef = CanonicalEmbeddingRef | ExplicitMatrixRef | ClassMapRef


class CellOrbit(BaseModel):
    """Orbit representative of one cell of the pruned complex.

    Example:
        >>> CellOrbit(id="a", dim=0, stabilizer="C2").name
        'a'
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(..., min_length=1, description="Identifier referenced by incidences")
    name: str = Field(default="", description="Display name; defaults to the id")
    dim: int = Field(..., ge=0, description="Cell dimension, 0..2")
    stabilizer: GroupType = Field(..., description="Stabilizer type of the representative")
    touches_singular: bool = Field(default=False, description="Cell touches a singular point (dim >= 1 only)")

    @model_validator(mode="before")
    @classmethod
    def default_name(cls, data: Any) -> Any:
        """Display name falls back to the id."""
        if isinstance(data, dict) and not data.get("name") and data.get("id"):
            return {**data, "name": data["id"]}
        return data


class IncidenceEntry(BaseModel):
    """One (cell, face) incidence with its coefficient and stabilizer embedding."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    cell: str = Field(..., description="Id of the p-cell")
    face: str = Field(..., description="Id of the (p-1)-cell")
    coefficient: int = Field(..., description="Signed incidence multiplicity")
    embedding: EmbeddingRef = Field(..., description="Stabilizer(cell) into stabilizer(face)")


class PrunedComplex(BaseModel):
    """Orbit-level combinatorial data of the pruned complex X∘."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    m: int | None = Field(default=None, ge=1, description="Field parameter of Q(sqrt(-m)), if known")
    class_number_k: int = Field(..., alias="class_number", description="Class number k of the field")
    cells: tuple[CellOrbit, ...] = Field(default=())
    incidences: tuple[IncidenceEntry, ...] = Field(default=())

    def cells_of_dim(self, dim: int) -> list[CellOrbit]:
        """Cells of one dimension in declaration order."""
        return [c for c in self.cells if c.dim == dim]

    def cell_by_id(self) -> dict[str, CellOrbit]:
        return {c.id: c for c in self.cells}


class Violation(BaseModel):
    """One violated invariant, naming the cells involved."""

    model_config = ConfigDict(frozen=True)

    code: str
    cells: tuple[str, ...] = ()
    message: str


class ValidationReport(BaseModel):
    """Every violated invariant of a document; empty means valid."""

    model_config = ConfigDict(frozen=True)

    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations


class MatrixDocument(BaseModel):
    """Differentials given directly as integer matrices.

    d2 may be supplied as printed transposed (3 rows for three face orbits);
    it is un-transposed by differentials(). Blank table cells are zeros.

    Example:
        >>> doc = MatrixDocument(d1=[[0]], d2_transpose=[[2]])
        >>> [m.to_rows() for m in doc.differentials()]
        [[[0]], [[2]]]
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    d1: tuple[tuple[int, ...], ...]
    d2: tuple[tuple[int, ...], ...] | None = None
    d2_transpose: tuple[tuple[int, ...], ...] | None = None
    m: int | None = Field(default=None, ge=1)
    class_number: int | None = None
    labels: dict[str, tuple[str, ...]] | None = Field(
        default=None, description="Printed row/column labels, e.g. d1_rows, d1_cols, d2_cols"
    )

    @model_validator(mode="after")
    def check_one_d2(self) -> Self:
        if (self.d2 is None) == (self.d2_transpose is None):
            raise ValueError("give exactly one of d2 and d2_transpose")
        return self

    def differentials(self) -> tuple[IntMatrix, IntMatrix]:
        """(d1, d2) as matrices; an empty d2 becomes the zero map out of C2 = 0.

        Raises:
            ValueError: If rows are ragged
        """
        d1 = IntMatrix.from_rows(self.d1)
        if self.d2 is not None:
            d2 = IntMatrix.from_rows(self.d2) if self.d2 else IntMatrix.zeros(d1.cols, 0)
        else:
            assert self.d2_transpose is not None
            d2 = (
                IntMatrix.from_rows(self.d2_transpose).transpose()
                if self.d2_transpose
                else IntMatrix.zeros(d1.cols, 0)
            )
        return d1, d2
