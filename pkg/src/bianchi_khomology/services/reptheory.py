"""Representation rings of the finite stabilizer types, with restriction and induction."""

from functools import cache
from types import MappingProxyType

from loguru import logger

from ..core.exceptions import BianchiKError
from ..models.algebra import IntMatrix
from ..models.reptheory import (
    CharacterTable,
    CyclotomicInt,
    EmbeddingReport,
    EmbeddingSpec,
    GroupType,
    InductionMatrix,
)


class InvalidEmbedding(BianchiKError):
    """Raised when an embedding or explicit induction matrix violates its invariants."""

    pass


class UnknownEmbedding(InvalidEmbedding):
    """Raised when a canonical embedding name is not in the registry."""

    pass


_ONE = CyclotomicInt(1)
_ZETA = CyclotomicInt(0, 1)
_ZETA2 = CyclotomicInt(-1, -1)


def _row(*values: int | CyclotomicInt) -> tuple[CyclotomicInt, ...]:
    return tuple(v if isinstance(v, CyclotomicInt) else CyclotomicInt(v) for v in values)


# (class sizes, class orders, irreducible names, character rows)
_TABLE_DATA: MappingProxyType[GroupType, tuple] = MappingProxyType(
    {
        GroupType.TRIVIAL: ((1,), (1,), ("triv",), (_row(1),)),
        GroupType.C2: (
            (1, 1),
            (1, 2),
            ("triv", "sign"),
            (_row(1, 1), _row(1, -1)),
        ),
        GroupType.C3: (
            (1, 1, 1),
            (1, 3, 3),
            ("triv", "omega", "omega2"),
            (_row(1, 1, 1), _row(1, _ZETA, _ZETA2), _row(1, _ZETA2, _ZETA)),
        ),
        # classes e, x, y, z; chi_x is trivial on x
        GroupType.V4: (
            (1, 1, 1, 1),
            (1, 2, 2, 2),
            ("triv", "chi_x", "chi_y", "chi_z"),
            (
                _row(1, 1, 1, 1),
                _row(1, 1, -1, -1),
                _row(1, -1, 1, -1),
                _row(1, -1, -1, 1),
            ),
        ),
        # classes e, transpositions, 3-cycles
        GroupType.S3: (
            (1, 3, 2),
            (1, 2, 3),
            ("triv", "sign", "std"),
            (_row(1, 1, 1), _row(1, -1, 1), _row(2, 0, -1)),
        ),
        # classes e, double transpositions, (123)-class, (132)-class
        GroupType.A4: (
            (1, 3, 4, 4),
            (1, 2, 3, 3),
            ("triv", "omega", "omega2", "std"),
            (
                _row(1, 1, 1, 1),
                _row(1, 1, _ZETA, _ZETA2),
                _row(1, 1, _ZETA2, _ZETA),
                _row(3, -1, 0, 0),
            ),
        ),
    }
)


@cache
def character_table(group: GroupType) -> CharacterTable:
    """Built-in character table of a stabilizer type.

    Example:
        >>> character_table(GroupType.S3).dims
        [1, 1, 2]
    """
    sizes, orders, names, chars = _TABLE_DATA[group]
    return CharacterTable(
        group=group,
        class_sizes=sizes,
        class_orders=orders,
        irreducible_names=names,
        chars=chars,
    )


def inner_product(
    table: CharacterTable,
    chi: tuple[CyclotomicInt, ...] | list[CyclotomicInt],
    psi: tuple[CyclotomicInt, ...] | list[CyclotomicInt],
) -> int:
    """(1/|G|)·Σ_c |c|·χ(c)·conj(ψ(c)), required to be a rational integer.

    Raises:
        ArithmeticError: If the value is not an integer (corrupt class functions)
    """
    total = CyclotomicInt(0)
    for size, x, y in zip(table.class_sizes, chi, psi, strict=True):
        total = total + x * y.conjugate() * size
    value = total.exact_div(table.order)
    if value.b != 0:
        raise ArithmeticError(f"inner product {value} is not a rational integer")
    return value.a


def check_orthogonality(table: CharacterTable) -> bool:
    """Row and column orthogonality of a character table."""
    n = table.n_irreducibles
    for i in range(n):
        for j in range(n):
            try:
                if inner_product(table, table.chars[i], table.chars[j]) != int(i == j):
                    return False
            except ArithmeticError:
                return False
    for c in range(len(table.class_sizes)):
        for d in range(len(table.class_sizes)):
            column_sum = CyclotomicInt(0)
            for row in table.chars:
                column_sum = column_sum + row[c] * row[d].conjugate()
            expected = table.order // table.class_sizes[c] if c == d else 0
            if column_sum != expected:
                return False
    return sum(table.class_sizes) == sum(d * d for d in table.dims)


def _embedding(name: str, sub: GroupType, sup: GroupType, class_map: tuple[int, ...]) -> EmbeddingSpec:
    return EmbeddingSpec(name=name, sub=sub, sup=sup, class_map=class_map)


def _build_registry() -> MappingProxyType[str, EmbeddingSpec]:
    entries: dict[str, EmbeddingSpec] = {}
    for group in GroupType:
        n_classes = len(_TABLE_DATA[group][0])
        entries[f"{group}-in-{group}"] = _embedding(f"{group}-in-{group}", group, group, tuple(range(n_classes)))
        if group is not GroupType.TRIVIAL:
            entries[f"Trivial-in-{group}"] = _embedding(f"Trivial-in-{group}", GroupType.TRIVIAL, group, (0,))
    for name, sub, sup, class_map in (
        ("C2-in-S3", GroupType.C2, GroupType.S3, (0, 1)),
        ("C3-in-S3", GroupType.C3, GroupType.S3, (0, 2, 2)),
        ("C2-in-A4", GroupType.C2, GroupType.A4, (0, 1)),
        ("C3-in-A4", GroupType.C3, GroupType.A4, (0, 2, 3)),
        ("V4-in-A4", GroupType.V4, GroupType.A4, (0, 1, 1, 1)),
        ("C2-in-V4-x", GroupType.C2, GroupType.V4, (0, 1)),
        ("C2-in-V4-y", GroupType.C2, GroupType.V4, (0, 2)),
        ("C2-in-V4-z", GroupType.C2, GroupType.V4, (0, 3)),
    ):
        entries[name] = _embedding(name, sub, sup, class_map)
    return MappingProxyType(entries)


CANONICAL_EMBEDDINGS = _build_registry()


def canonical_embedding(name: str) -> EmbeddingSpec:
    """Look up a registry embedding by its exact name.

    Raises:
        UnknownEmbedding: If the name is not registered

    Example:
        >>> canonical_embedding("C3-in-S3").class_map
        (0, 2, 2)
    """
    try:
        return CANONICAL_EMBEDDINGS[name]
    except KeyError as e:
        raise UnknownEmbedding(f"unknown canonical embedding {name!r}") from e


def _restriction_entries(e: EmbeddingSpec) -> list[list[int]]:
    sub_table = character_table(e.sub)
    sup_table = character_table(e.sup)
    restricted = [tuple(chi[c] for c in e.class_map) for chi in sup_table.chars]
    return [[inner_product(sub_table, phi, res) for res in restricted] for phi in sub_table.chars]


def validate_embedding(e: EmbeddingSpec) -> EmbeddingReport:
    """Check an embedding's class map without raising.

    Checks Lagrange, the class map's shape, identity and order preservation,
    and that restricted irreducibles decompose with nonnegative integer multiplicities.

    Example:
        >>> validate_embedding(EmbeddingSpec(sub="C2", sup="C3", class_map=(0, 1))).valid
        False
    """
    sub_table = character_table(e.sub)
    sup_table = character_table(e.sup)
    problems: list[str] = []
    if sup_table.order % sub_table.order:
        problems.append(f"|{e.sub}| = {sub_table.order} does not divide |{e.sup}| = {sup_table.order}")
    if len(e.class_map) != len(sub_table.class_sizes):
        problems.append(f"class map has {len(e.class_map)} entries, {e.sub} has {len(sub_table.class_sizes)} classes")
        return EmbeddingReport(problems=tuple(problems))
    if any(not 0 <= c < len(sup_table.class_sizes) for c in e.class_map):
        problems.append(f"class map {e.class_map} points outside the {len(sup_table.class_sizes)} classes of {e.sup}")
        return EmbeddingReport(problems=tuple(problems))
    if e.class_map[0] != 0:
        problems.append("identity class is not sent to the identity class")
    for c, target in enumerate(e.class_map):
        if sub_table.class_orders[c] != sup_table.class_orders[target]:
            problems.append(
                f"class {c} of {e.sub} has order {sub_table.class_orders[c]} "
                f"but lands in class {target} of order {sup_table.class_orders[target]}"
            )
    if not problems:
        try:
            multiplicities = _restriction_entries(e)
        except ArithmeticError as err:
            problems.append(f"restricted characters are not class functions of {e.sub}: {err}")
        else:
            if any(x < 0 for row in multiplicities for x in row):
                problems.append("a restricted irreducible has negative multiplicities")
    return EmbeddingReport(problems=tuple(problems))


def _require_valid(e: EmbeddingSpec) -> None:
    report = validate_embedding(e)
    if not report.valid:
        raise InvalidEmbedding(f"invalid embedding {e.name or (e.sub, e.sup, e.class_map)}: " + "; ".join(report.problems))


def restriction_matrix(e: EmbeddingSpec) -> IntMatrix:
    """Restriction R(sup) → R(sub); entry (i, j) is the multiplicity of irr_i(sub) in irr_j(sup).

    Raises:
        InvalidEmbedding: If validate_embedding reports a problem

    Example:
        >>> restriction_matrix(canonical_embedding("C2-in-S3")).to_rows()
        [[1, 0, 1], [0, 1, 1]]
    """
    _require_valid(e)
    return IntMatrix.from_rows(_restriction_entries(e), cols=character_table(e.sup).n_irreducibles)


def induction_matrix(e: EmbeddingSpec) -> InductionMatrix:
    """Induction R(sub) → R(sup), the transpose of restriction by Frobenius reciprocity.

    Raises:
        InvalidEmbedding: If validate_embedding reports a problem
    """
    matrix = restriction_matrix(e).transpose()
    logger.debug("Induction matrix built", sub=str(e.sub), sup=str(e.sup), name=e.name)
    return InductionMatrix(sub=e.sub, sup=e.sup, matrix=matrix)


def induced_character(e: EmbeddingSpec, phi: tuple[CyclotomicInt, ...]) -> tuple[CyclotomicInt, ...]:
    """Class function Ind(φ) on sup, from the induced-character formula.

    Ind φ(C) = |sup| / (|sub|·|C|) · Σ_{c ↦ C} |c|·φ(c)
    """
    sub_table = character_table(e.sub)
    sup_table = character_table(e.sup)
    values = []
    for target, target_size in enumerate(sup_table.class_sizes):
        acc = CyclotomicInt(0)
        for c, landing in enumerate(e.class_map):
            if landing == target:
                acc = acc + phi[c] * sub_table.class_sizes[c]
        values.append((acc * sup_table.order).exact_div(sub_table.order * target_size))
    return tuple(values)


def validate_induction_matrix(matrix: IntMatrix, sub: GroupType, sup: GroupType) -> EmbeddingReport:
    """Check an explicitly supplied induction matrix against the InductionMatrix invariants."""
    sub_table = character_table(sub)
    sup_table = character_table(sup)
    problems: list[str] = []
    expected_shape = (sup_table.n_irreducibles, sub_table.n_irreducibles)
    if (matrix.rows, matrix.cols) != expected_shape:
        problems.append(
            f"induction matrix {sub}->{sup} must be {expected_shape[0]}x{expected_shape[1]}, "
            f"got {matrix.rows}x{matrix.cols}"
        )
        return EmbeddingReport(problems=tuple(problems))
    if sup_table.order % sub_table.order:
        problems.append(f"|{sub}| does not divide |{sup}|")
        return EmbeddingReport(problems=tuple(problems))
    if any(x < 0 for x in matrix.entries):
        problems.append("induction matrix has negative entries")
    index = sup_table.order // sub_table.order
    for i, sub_dim in enumerate(sub_table.dims):
        induced_dim = sum(sup_dim * matrix[j, i] for j, sup_dim in enumerate(sup_table.dims))
        if induced_dim != index * sub_dim:
            problems.append(
                f"column {i} induces dimension {induced_dim}, expected [{sup}:{sub}]·{sub_dim} = {index * sub_dim}"
            )
    return EmbeddingReport(problems=tuple(problems))


def explicit_induction_matrix(matrix: IntMatrix, sub: GroupType, sup: GroupType) -> InductionMatrix:
    """Wrap a user-supplied induction matrix after validating it.

    Raises:
        InvalidEmbedding: If the matrix violates the InductionMatrix invariants
    """
    report = validate_induction_matrix(matrix, sub, sup)
    if not report.valid:
        raise InvalidEmbedding("; ".join(report.problems))
    return InductionMatrix(sub=sub, sup=sup, matrix=matrix)
