"""Validation of pruned complexes and assembly of the modified Bredon chain complex."""

from collections import Counter

from loguru import logger

from ..core.exceptions import BianchiKError
from ..models.algebra import FgAbelianGroup, IntMatrix
from ..models.complex import (
    CanonicalEmbeddingRef,
    CellOrbit,
    ClassMapRef,
    EmbeddingRef,
    ExplicitMatrixRef,
    IncidenceEntry,
    MatrixDocument,
    PrunedComplex,
    ValidationReport,
    Violation,
)
from ..models.reptheory import EmbeddingSpec, GroupType, InductionMatrix
from .arith import class_number, is_squarefree
from .reptheory import (
    CANONICAL_EMBEDDINGS,
    InvalidEmbedding,
    canonical_embedding,
    character_table,
    explicit_induction_matrix,
    induction_matrix,
    validate_embedding,
    validate_induction_matrix,
)


class IncidenceDataInconsistent(BianchiKError):
    """Raised when assembled differentials do not compose to zero."""

    pass


class InvalidComplex(BianchiKError):
    """Raised when a complex with validation violations is assembled."""

    def __init__(self, report: ValidationReport):
        self.report = report
        summary = "; ".join(f"{v.code}: {v.message}" for v in report.violations)
        super().__init__(f"complex has {len(report.violations)} violation(s): {summary}")


def ring_rank(group: GroupType) -> int:
    """Rank of R(group), the number of irreducible characters."""
    return character_table(group).n_irreducibles


def _embedding_problems(ref: EmbeddingRef, sub: GroupType, sup: GroupType) -> list[str]:
    if isinstance(ref, CanonicalEmbeddingRef):
        spec = CANONICAL_EMBEDDINGS.get(ref.canonical)
        if spec is None:
            return [f"unknown canonical embedding {ref.canonical!r}"]
        if (spec.sub, spec.sup) != (sub, sup):
            return [f"{ref.canonical} embeds {spec.sub} into {spec.sup}, incidence needs {sub} into {sup}"]
        return []
    if isinstance(ref, ClassMapRef):
        spec_in = ref.class_map
        if (spec_in.sub, spec_in.sup) != (sub, sup):
            return [f"class map embeds {spec_in.sub} into {spec_in.sup}, incidence needs {sub} into {sup}"]
        report = validate_embedding(EmbeddingSpec(sub=sub, sup=sup, class_map=spec_in.classes))
        return list(report.problems)
    try:
        matrix = IntMatrix.from_rows(ref.matrix)
    except ValueError as e:
        return [f"explicit induction matrix: {e}"]
    return list(validate_induction_matrix(matrix, sub, sup).problems)


def resolve_embedding(ref: EmbeddingRef, sub: GroupType, sup: GroupType) -> InductionMatrix:
    """Induction matrix R(sub) → R(sup) for one incidence, from any of the three reference forms.

    Raises:
        InvalidEmbedding: If the reference is unknown, mismatched or violates the invariants
    """
    problems = _embedding_problems(ref, sub, sup)
    if problems:
        raise InvalidEmbedding("; ".join(problems))
    if isinstance(ref, CanonicalEmbeddingRef):
        return induction_matrix(canonical_embedding(ref.canonical))
    if isinstance(ref, ClassMapRef):
        return induction_matrix(EmbeddingSpec(sub=sub, sup=sup, class_map=ref.class_map.classes))
    assert isinstance(ref, ExplicitMatrixRef)
    return explicit_induction_matrix(IntMatrix.from_rows(ref.matrix), sub, sup)


def _check_cells(c: PrunedComplex) -> list[Violation]:
    violations = []
    counts = Counter(cell.id for cell in c.cells)
    for cell_id, n in counts.items():
        if n > 1:
            violations.append(Violation(code="duplicate-id", cells=(cell_id,), message=f"id declared {n} times"))
    for cell in c.cells:
        if cell.dim > 2:
            violations.append(
                Violation(code="dimension", cells=(cell.id,), message=f"dimension {cell.dim} exceeds 2")
            )
        if cell.dim == 0 and cell.touches_singular:
            violations.append(
                Violation(
                    code="singular-vertex",
                    cells=(cell.id,),
                    message="vertices of the pruned complex cannot touch a singular point",
                )
            )
    return violations


def _check_field(m: int | None, k: int | None) -> list[Violation]:
    if k is not None and k < 1:
        return [Violation(code="class-number", message=f"class number {k} must be at least 1")]
    if m is None:
        return []
    if not is_squarefree(m):
        return [Violation(code="field", message=f"m = {m} is not squarefree")]
    h = class_number(m)
    if k is not None and h != k:
        return [
            Violation(
                code="class-number",
                message=f"class_number {k} disagrees with h(Q(sqrt(-{m}))) = {h}",
            )
        ]
    return []


def _check_incidence(entry: IncidenceEntry, cells: dict[str, CellOrbit]) -> list[Violation]:
    ids = (entry.cell, entry.face)
    missing = [x for x in ids if x not in cells]
    if missing:
        return [Violation(code="unknown-cell", cells=tuple(missing), message="incidence refers to an undeclared cell")]
    cell, face = cells[entry.cell], cells[entry.face]
    if cell.dim != face.dim + 1:
        return [
            Violation(
                code="incidence-dimension",
                cells=ids,
                message=f"dim({cell.id}) = {cell.dim} but dim({face.id}) = {face.dim}",
            )
        ]
    return [
        Violation(code="embedding", cells=ids, message=problem)
        for problem in _embedding_problems(entry.embedding, cell.stabilizer, face.stabilizer)
    ]


def _check_edges(c: PrunedComplex, cells: dict[str, CellOrbit]) -> list[Violation]:
    vertex_incidences = Counter(
        entry.cell
        for entry in c.incidences
        if entry.cell in cells and entry.face in cells and cells[entry.face].dim == 0
    )
    violations = []
    for edge in c.cells_of_dim(1):
        n = vertex_incidences[edge.id]
        if edge.touches_singular and n != 1:
            violations.append(
                Violation(
                    code="edge-incidences",
                    cells=(edge.id,),
                    message=f"edge touching a singular point needs exactly 1 vertex incidence, has {n}",
                )
            )
        elif not 1 <= n <= 2:
            violations.append(
                Violation(code="edge-incidences", cells=(edge.id,), message=f"edge has {n} vertex incidences")
            )
    return violations


def validate(c: PrunedComplex) -> ValidationReport:
    """List every violated invariant of a pruned complex; an empty report means valid.

    Example:
        >>> c = PrunedComplex(class_number=1, cells=[CellOrbit(id="e", dim=1, stabilizer="Trivial")])
        >>> [v.code for v in validate(c).violations]
        ['edge-incidences']
    """
    cells = c.cell_by_id()
    violations = _check_cells(c) + _check_field(c.m, c.class_number_k)
    for entry in c.incidences:
        violations.extend(_check_incidence(entry, cells))
    violations.extend(_check_edges(c, cells))
    logger.debug("Complex validated", cells=len(c.cells), incidences=len(c.incidences), violations=len(violations))
    return ValidationReport(violations=tuple(violations))


def _offsets(cells: list[CellOrbit]) -> tuple[dict[str, int], int]:
    offsets = {}
    total = 0
    for cell in cells:
        offsets[cell.id] = total
        total += ring_rank(cell.stabilizer)
    return offsets, total


def _differential(c: PrunedComplex, dim: int) -> IntMatrix:
    cells = c.cell_by_id()
    col_offsets, n_cols = _offsets(c.cells_of_dim(dim))
    row_offsets, n_rows = _offsets(c.cells_of_dim(dim - 1))
    grid = [[0] * n_cols for _ in range(n_rows)]
    for entry in c.incidences:
        if cells[entry.cell].dim != dim:
            continue
        cell, face = cells[entry.cell], cells[entry.face]
        block = resolve_embedding(entry.embedding, cell.stabilizer, face.stabilizer).matrix
        r0, c0 = row_offsets[face.id], col_offsets[cell.id]
        # repeated (cell, face) pairs accumulate
        for i in range(block.rows):
            for j in range(block.cols):
                grid[r0 + i][c0 + j] += entry.coefficient * block[i, j]
    return IntMatrix.from_rows(grid, cols=n_cols)


def assemble_bredon(c: PrunedComplex) -> tuple[IntMatrix, IntMatrix]:
    """Block differentials d1: C1 → C0 and d2: C2 → C1 over the orbit bases.

    Each block is coefficient × induction matrix of the incidence's embedding;
    blocks are laid out in cell declaration order.

    Raises:
        InvalidComplex: If validate reports any violation
        IncidenceDataInconsistent: If d1·d2 is not zero
    """
    report = validate(c)
    if not report.valid:
        raise InvalidComplex(report)
    d1 = _differential(c, 1)
    d2 = _differential(c, 2)
    if not (d1 @ d2).is_zero():
        raise IncidenceDataInconsistent(
            "d1·d2 is not zero; check incidence coefficients and embeddings"
        )
    logger.debug("Bredon complex assembled", d1=f"{d1.rows}x{d1.cols}", d2=f"{d2.rows}x{d2.cols}")
    return d1, d2


def chain_ranks(c: PrunedComplex) -> tuple[int, int, int]:
    """Total representation-ring rank of the 0-, 1- and 2-cells."""
    r0, r1, r2 = (sum(ring_rank(cell.stabilizer) for cell in c.cells_of_dim(p)) for p in range(3))
    return r0, r1, r2


def euler_check_ranks(ranks: tuple[int, int, int], h0: FgAbelianGroup, h1: FgAbelianGroup, h2: FgAbelianGroup) -> bool:
    """Alternating sum of chain ranks against alternating sum of homology free ranks.

    Example:
        >>> euler_check_ranks((13, 13, 3), FgAbelianGroup.parse("Z^5 + Z/2"), FgAbelianGroup.free(3), FgAbelianGroup.free(1))
        True
    """
    return ranks[0] - ranks[1] + ranks[2] == h0.free_rank - h1.free_rank + h2.free_rank


def euler_check(c: PrunedComplex, h0: FgAbelianGroup, h1: FgAbelianGroup, h2: FgAbelianGroup) -> bool:
    return euler_check_ranks(chain_ranks(c), h0, h1, h2)


def validate_matrices(doc: MatrixDocument) -> ValidationReport:
    """A matrix document is valid when its shapes compose and d1·d2 = 0."""
    violations = _check_field(doc.m, doc.class_number)
    try:
        d1, d2 = doc.differentials()
    except ValueError as e:
        return ValidationReport(violations=(*violations, Violation(code="shape", message=str(e))))
    if d1.cols != d2.rows:
        violations.append(
            Violation(code="shape", message=f"d1 is {d1.rows}x{d1.cols} but d2 is {d2.rows}x{d2.cols}")
        )
    elif not (d1 @ d2).is_zero():
        violations.append(Violation(code="composition", message="d1·d2 is not zero"))
    return ValidationReport(violations=tuple(violations))
