"""From Bredon differentials to equivariant K-homology.

The spectral sequence of the pruned complex degenerates at E² (the complex is
2-dimensional and odd rows vanish), so no higher differential is ever built.
K-groups of the pruned complex come from one extension problem, those of the
upper half-space from the vanishing connecting map of the pruning sequence, and
the final groups from the hexagon with the boundary tori at its corners.
"""

from concurrent.futures import ThreadPoolExecutor
from itertools import product
from math import prod
from typing import NamedTuple

from loguru import logger

from ..core.config import SplitPolicy, settings
from ..core.exceptions import BianchiKError
from ..models.algebra import FgAbelianGroup, IntMatrix
from ..models.complex import MatrixDocument, PrunedComplex
from ..models.pipeline import (
    HEXAGON_SIZE,
    ArrowHint,
    ExtensionProblem,
    HintsDocument,
    KResult,
    PipelineConfig,
    PipelineReport,
    SixTermCandidate,
    SixTermProblem,
    SpectralPage,
)
from .gamma_cw import InvalidComplex, assemble_bredon, chain_ranks, euler_check_ranks, validate_matrices
from .linalg import cokernel, elementary_divisors, homology, rank


class UnsupportedExtension(BianchiKError):
    """Raised when an extension problem has a torsion kernel or too many classes to enumerate."""

    pass


class InvalidClassNumber(BianchiKError):
    """Raised when the class number is missing or below one."""

    pass


class InconsistentHints(BianchiKError):
    """Raised when no arrow-rank assignment satisfies exactness and the hints."""

    pass


class MalformedSixTermProblem(BianchiKError):
    """Raised when a six-term problem does not have two opposite unknown nodes."""

    pass


def e2_page(d1: IntMatrix, d2: IntMatrix) -> SpectralPage:
    """H0, H1, H2 of the chain complex C2 → C1 → C0.

    Raises:
        CompositionNonzero: If d1·d2 is not zero

    Example:
        >>> page = e2_page(IntMatrix.from_rows([[0]]), IntMatrix.from_rows([[2]]))
        >>> [str(g) for g in (page.h0, page.h1, page.h2)]
        ['Z', 'Z/2', '0']
    """
    h1 = homology(d1, d2)
    page = SpectralPage(h0=cokernel(d1), h1=h1, h2=FgAbelianGroup.free(d2.cols - rank(d2)))
    logger.debug("E2 page computed", h0=str(page.h0), h1=str(page.h1), h2=str(page.h2))
    return page


def page_of_complex(c: PrunedComplex) -> SpectralPage:
    """Validate, assemble and take homology of a pruned complex."""
    d1, d2 = assemble_bredon(c)
    return e2_page(d1, d2)


def _presentation(s: int, quot: FgAbelianGroup, classes: tuple[tuple[int, ...], ...]) -> IntMatrix:
    # generators: sub basis, free quotient basis, lifts of the cyclic torsion generators;
    # relation i: t_i·h_i = Σ_j c_ij·e_j
    r = quot.free_rank
    n = len(quot.torsion)
    grid = [[0] * n for _ in range(s + r + n)]
    for i, t in enumerate(quot.torsion):
        grid[s + r + i][i] = t
        for j in range(s):
            grid[j][i] = -classes[i][j]
    return IntMatrix.from_rows(grid, cols=n)


def solve_extension(p: ExtensionProblem, limit: int | None = None) -> list[FgAbelianGroup]:
    """Every isomorphism class of middle group G in 0 → sub → G → quot → 0.

    Enumerates Ext(quot, sub) ≅ ⊕ᵢ (Z/tᵢ)^rank(sub) as presentation matrices and
    takes each cokernel. The split extension is always among the results.

    Args:
        p: The extension problem; sub must be free
        limit: Maximum number of classes to enumerate (settings.EXTENSION_ENUMERATION_LIMIT)

    Raises:
        UnsupportedExtension: If sub has torsion or the class count exceeds the limit

    Example:
        >>> problem = ExtensionProblem(sub="Z", quot="Z^5 + Z/2")
        >>> [str(g) for g in solve_extension(problem)]
        ['Z^6', 'Z^6 + Z/2']
    """
    if not p.sub.is_free():
        raise UnsupportedExtension(f"extension with torsion kernel {p.sub} is not supported")
    s = p.sub.free_rank
    if s == 0 or p.quot.is_free():
        return [p.sub.direct_sum(p.quot)]

    limit = limit or settings.EXTENSION_ENUMERATION_LIMIT
    n_classes = prod(t**s for t in p.quot.torsion)
    if n_classes > limit:
        raise UnsupportedExtension(
            f"Ext({p.quot}, {p.sub}) has {n_classes} classes, above the enumeration limit {limit}"
        )
    per_factor = [list(product(range(t), repeat=s)) for t in p.quot.torsion]
    found = {cokernel(_presentation(s, p.quot, classes)) for classes in product(*per_factor)}
    result = sorted(found, key=FgAbelianGroup.sort_key)
    logger.debug(
        "Extension problem solved",
        sub=str(p.sub),
        quot=str(p.quot),
        classes=n_classes,
        middle_groups=[str(g) for g in result],
    )
    return result


def k_of_pruned(page: SpectralPage, split_policy: SplitPolicy | None = None) -> KResult:
    """K-homology of Γ ⋉ C₀(X∘) from the E² page.

    K1 is H1. K0 is an extension of H0 by H2; the "paper-split" policy pins it
    to the split extension and records the alternatives as dropped.
    """
    policy = split_policy or settings.SPLIT_POLICY
    options = solve_extension(ExtensionProblem(sub=page.h2, quot=page.h0))
    if policy == "enumerate":
        return KResult.of(options, [page.h1])

    split = page.h2.direct_sum(page.h0)
    dropped = tuple(g for g in options if g != split)
    notes: tuple[str, ...] = ()
    if dropped:
        alternatives = ", ".join(str(g) for g in dropped)
        notes = (f"K0 pinned to the split extension {split}; non-split alternatives: {alternatives}",)
        logger.warning("Extension resolved by split policy", split=str(split), alternatives=alternatives)
    return KResult.of([split], [page.h1], pinned=True, dropped=dropped, notes=notes)


def k_of_halfspace(k_pruned: KResult) -> KResult:
    """K-homology of Γ ⋉ C₀(𝓗) from that of the pruned complex.

    The connecting map of the pruning sequence vanishes, so K0 is unchanged and
    K1 sits in 0 → K1(X∘) → K1(𝓗) → Z → 0, which splits because Z is free.

    Example:
        >>> zero = FgAbelianGroup.zero()
        >>> k = k_of_halfspace(KResult.of([zero], [zero]))
        >>> str(k.k0_candidates[0]), str(k.k1_candidates[0])
        ('0', 'Z')
    """
    z = FgAbelianGroup.free(1)
    return KResult.of(
        list(k_pruned.k0_candidates),
        [g.direct_sum(z) for g in k_pruned.k1_candidates],
        pinned=k_pruned.pinned,
        dropped=k_pruned.dropped,
        notes=k_pruned.notes,
    )


def boundary_corners(k: int) -> tuple[FgAbelianGroup, FgAbelianGroup]:
    """K0 and K1 of the k boundary 2-tori, both Z^{2k}.

    Raises:
        InvalidClassNumber: If k < 1
    """
    if k < 1:
        raise InvalidClassNumber(f"class number must be at least 1, got {k}")
    corner = FgAbelianGroup.free(2 * k)
    return corner, corner


def hexagon_problem(
    k0: FgAbelianGroup,
    k1: FgAbelianGroup,
    k: int,
    hints: HintsDocument | None = None,
) -> SixTermProblem:
    """The hexagon relating the tori, the unknown groups RK and K of the half-space.

    Nodes: 0 tori K0, 1 RK0, 2 K0(𝓗), 3 tori K1, 4 RK1, 5 K1(𝓗).
    """
    t0, t1 = boundary_corners(k)
    return SixTermProblem(
        nodes=(t0, None, k0, t1, None, k1),
        hints=dict(hints.arrows) if hints else {},
        split_nodes=frozenset(hints.split_nodes) if hints else frozenset(),
    )


class _Piece(NamedTuple):
    group: FgAbelianGroup
    exact: bool


def _kernel(source: FgAbelianGroup, target: FgAbelianGroup, x: int, hint: ArrowHint | None) -> _Piece | None:
    """Kernel of a rank-x arrow; None when a hinted kernel contradicts x.

    Exact when hinted or forced. Otherwise the generic representative (free part
    plus the torsion of the source) fixes only the free rank; its torsion is a guess.
    """
    free = source.free_rank - x
    if hint is not None and hint.kernel is not None:
        return _Piece(hint.kernel, True) if hint.kernel.free_rank == free else None
    if source.is_free():
        return _Piece(FgAbelianGroup.free(free), True)
    if target.is_zero() or (x == 0 and target.is_free()):
        # the map is zero
        return _Piece(source, True)
    return _Piece(FgAbelianGroup(free_rank=free, torsion=source.torsion), False)


def _cokernel(source: FgAbelianGroup, target: FgAbelianGroup, x: int, hint: ArrowHint | None) -> _Piece | None:
    """Cokernel of a rank-x arrow; None when a hinted cokernel contradicts x.

    Exact when hinted or forced. Otherwise the generic representative (free part
    plus the torsion of the target) fixes only the free rank: a free target can
    still have a cokernel with torsion, as for multiplication by 2 on Z.
    """
    free = target.free_rank - x
    if hint is not None and hint.cokernel is not None:
        return _Piece(hint.cokernel, True) if hint.cokernel.free_rank == free else None
    if target.is_zero():
        return _Piece(FgAbelianGroup.zero(), True)
    if source.is_zero() or (x == 0 and target.is_free()):
        return _Piece(target, True)
    return _Piece(FgAbelianGroup(free_rank=free, torsion=target.torsion), False)


def _merge_pairs(candidates: list[SixTermCandidate]) -> tuple[SixTermCandidate, ...]:
    merged: dict[tuple[FgAbelianGroup, FgAbelianGroup], SixTermCandidate] = {}
    for cand in candidates:
        key = (cand.rk0, cand.rk1)
        seen = merged.get(key)
        if seen is None:
            merged[key] = cand
        elif seen.torsion_pinned and not cand.torsion_pinned:
            merged[key] = seen.model_copy(update={"torsion_pinned": False})
    return tuple(sorted(merged.values(), key=lambda c: (c.rk0.sort_key(), c.rk1.sort_key())))


class SixTermSolver:
    """Solves a cyclic exact hexagon with two opposite unknown nodes u and u + 3.

    Exactness gives 0 → coker(a_{u+4}) → N_u → ker(a_{u+1}) → 0 and
    0 → coker(a_{u+1}) → N_{u+3} → ker(a_{u+4}) → 0, where a_{u+1} and a_{u+4}
    run between known nodes. The free ranks of those two arrows are enumerated;
    the other four arrow ranks follow by rank-nullity.
    """

    def __init__(self, problem: SixTermProblem, workers: int | None = None, limit: int | None = None):
        """Initialize the solver.

        Args:
            problem: Hexagon with exactly two unknown nodes at opposite positions
            workers: Threads for the rank enumeration (settings.SIX_TERM_WORKERS)
            limit: Extension enumeration limit passed to solve_extension

        Raises:
            MalformedSixTermProblem: If the unknowns, split nodes or hints do not fit the hexagon
        """
        unknowns = problem.unknowns()
        if len(unknowns) != 2 or unknowns[1] - unknowns[0] != 3:
            raise MalformedSixTermProblem(f"expected two opposite unknown nodes, got {unknowns}")
        self.u = unknowns[0]
        known_arrows = {(self.u + 1) % HEXAGON_SIZE, (self.u + 4) % HEXAGON_SIZE}
        stray = sorted(
            i for i, h in problem.hints.items() if i not in known_arrows and (h.kernel is not None or h.cokernel is not None)
        )
        if stray:
            raise MalformedSixTermProblem(
                f"kernel/cokernel hints are only meaningful on arrows {sorted(known_arrows)}, got {stray}"
            )
        if not problem.split_nodes <= set(unknowns):
            raise MalformedSixTermProblem(f"split nodes {sorted(problem.split_nodes)} must be unknown nodes {unknowns}")
        self.problem = problem
        self.workers = workers or settings.SIX_TERM_WORKERS
        self.limit = limit

    def _node(self, offset: int) -> FgAbelianGroup:
        group = self.problem.nodes[(self.u + offset) % HEXAGON_SIZE]
        assert group is not None
        return group

    def _hint(self, offset: int) -> ArrowHint | None:
        return self.problem.hints.get((self.u + offset) % HEXAGON_SIZE)

    def _middle(self, offset: int, sub: _Piece, quot: _Piece) -> list[tuple[FgAbelianGroup, bool]]:
        exact = sub.exact and quot.exact
        if (self.u + offset) % HEXAGON_SIZE in self.problem.split_nodes:
            return [(sub.group.direct_sum(quot.group), exact)]
        if quot.group.is_free():
            # sequences ending in a free group split
            return [(sub.group.direct_sum(quot.group), exact)]
        if sub.group.is_free():
            options = solve_extension(ExtensionProblem(sub=sub.group, quot=quot.group), self.limit)
            return [(g, exact and len(options) == 1) for g in options]
        return [(sub.group.direct_sum(quot.group), False)]

    def _arrow_ranks(self, x: int, y: int) -> tuple[int, ...]:
        f = [self._node(i).free_rank if i % 3 else 0 for i in range(HEXAGON_SIZE)]
        by_offset = [f[1] - x, x, f[2] - x, f[4] - y, y, f[5] - y]
        ranks = [0] * HEXAGON_SIZE
        for offset, r in enumerate(by_offset):
            ranks[(self.u + offset) % HEXAGON_SIZE] = r
        return tuple(ranks)

    def solve_assignment(self, x: int, y: int) -> list[SixTermCandidate]:
        """Candidates with rank(a_{u+1}) = x and rank(a_{u+4}) = y; empty when the hints exclude them."""
        ranks = self._arrow_ranks(x, y)
        for i, hint in self.problem.hints.items():
            if hint.rank is not None and hint.rank != ranks[i]:
                return []
        pieces = (
            _kernel(self._node(1), self._node(2), x, self._hint(1)),
            _cokernel(self._node(1), self._node(2), x, self._hint(1)),
            _kernel(self._node(4), self._node(5), y, self._hint(4)),
            _cokernel(self._node(4), self._node(5), y, self._hint(4)),
        )
        ker_a, coker_a, ker_b, coker_b = pieces
        if ker_a is None or coker_a is None or ker_b is None or coker_b is None:
            return []
        return [
            SixTermCandidate(rk0=g0, rk1=g1, arrow_ranks=ranks, torsion_pinned=e0 and e1)
            for (g0, e0), (g1, e1) in product(self._middle(0, coker_b, ker_a), self._middle(3, coker_a, ker_b))
        ]

    def assignments(self) -> list[tuple[int, int]]:
        x_max = min(self._node(1).free_rank, self._node(2).free_rank)
        y_max = min(self._node(4).free_rank, self._node(5).free_rank)
        return [(x, y) for x in range(x_max + 1) for y in range(y_max + 1)]

    def solve(self) -> KResult:
        """All consistent (N_u, N_{u+3}) pairs.

        Raises:
            InconsistentHints: If no rank assignment survives the hints
        """
        assignments = self.assignments()
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(lambda xy: self.solve_assignment(*xy), assignments))
        else:
            results = [self.solve_assignment(x, y) for x, y in assignments]
        pairs = _merge_pairs([cand for batch in results for cand in batch])
        if not pairs:
            raise InconsistentHints(f"no rank assignment among {len(assignments)} is consistent with the hints")

        notes = tuple(
            f"torsion-ambiguous candidate ({c.rk0}, {c.rk1}), arrow ranks {list(c.arrow_ranks)}"
            for c in pairs
            if not c.torsion_pinned
        )
        if notes:
            logger.warning("Six-term candidates with unresolved torsion", count=len(notes), candidates=len(pairs))
        logger.debug("Six-term problem solved", unknowns=[self.u, self.u + 3], candidates=len(pairs))
        return KResult.of(
            [c.rk0 for c in pairs],
            [c.rk1 for c in pairs],
            pinned=len(pairs) == 1 and pairs[0].torsion_pinned,
            pairs=pairs,
            notes=notes,
        )


def solve_six_term(p: SixTermProblem, workers: int | None = None, limit: int | None = None) -> KResult:
    """Solve a six-term problem; see SixTermSolver.

    Example:
        >>> zero = FgAbelianGroup.zero()
        >>> k0, k1 = FgAbelianGroup.parse("Z + Z/3"), FgAbelianGroup.free(2)
        >>> result = solve_six_term(SixTermProblem(nodes=(zero, None, k0, zero, None, k1)))
        >>> str(result.k0_candidates[0]), str(result.k1_candidates[0]), result.pinned
        ('Z + Z/3', 'Z^2', True)
    """
    return SixTermSolver(p, workers=workers, limit=limit).solve()


def _solve_hexagons(k_half: KResult, k: int, config: PipelineConfig) -> KResult:
    candidates: list[SixTermCandidate] = []
    notes: list[str] = []
    failures: list[str] = []
    for k0, k1 in product(k_half.k0_candidates, k_half.k1_candidates):
        try:
            result = solve_six_term(hexagon_problem(k0, k1, k, config.hints), workers=config.workers)
        except InconsistentHints as e:
            failures.append(f"K(H) = ({k0}, {k1}): {e}")
            continue
        candidates.extend(result.pairs)
        notes.extend(result.notes)
    if not candidates:
        raise InconsistentHints("; ".join(failures))
    notes.extend(f"no solution for {f}" for f in failures)
    pairs = _merge_pairs(candidates)
    return KResult.of(
        [c.rk0 for c in pairs],
        [c.rk1 for c in pairs],
        pinned=len(pairs) == 1 and pairs[0].torsion_pinned,
        pairs=pairs,
        notes=tuple(dict.fromkeys(notes)),
    )


def run_pipeline(source: PrunedComplex | MatrixDocument, config: PipelineConfig | None = None) -> PipelineReport:
    """Run every stage from the complex (or its matrices) to the final K-homology candidates.

    Raises:
        InvalidComplex: If the complex or matrix document fails validation
        InvalidClassNumber: If a matrix document has no class_number
    """
    config = config or PipelineConfig()
    if isinstance(source, PrunedComplex):
        d1, d2 = assemble_bredon(source)
        ranks = chain_ranks(source)
        kind, m, k = "complex", source.m, source.class_number_k
    else:
        report = validate_matrices(source)
        if not report.valid:
            raise InvalidComplex(report)
        if source.class_number is None:
            raise InvalidClassNumber("matrix document has no class_number")
        d1, d2 = source.differentials()
        ranks = (d1.rows, d1.cols, d2.cols)
        kind, m, k = "matrices", source.m, source.class_number
    stages = [f"Bredon differentials d1 {d1.rows}x{d1.cols}, d2 {d2.rows}x{d2.cols}"]
    logger.info("Bredon complex ready", source=kind, d1=f"{d1.rows}x{d1.cols}", d2=f"{d2.rows}x{d2.cols}")

    page = e2_page(d1, d2)
    euler_ok = euler_check_ranks(ranks, page.h0, page.h1, page.h2)
    stages.append(f"E2 page H0 = {page.h0}, H1 = {page.h1}, H2 = {page.h2}")
    logger.info("E2 page computed", h0=str(page.h0), h1=str(page.h1), h2=str(page.h2), euler_ok=euler_ok)
    if not euler_ok:
        logger.warning("Euler characteristic mismatch", chain_ranks=ranks)

    k_pruned = k_of_pruned(page, config.split_policy)
    stages.append("K of pruned complex computed")
    k_half = k_of_halfspace(k_pruned)
    stages.append("K of upper half-space computed")
    corners = boundary_corners(k)
    final = _solve_hexagons(k_half, k, config)
    stages.append(f"six-term sequence solved with {len(final.pairs)} candidate pair(s)")
    logger.info("Pipeline finished", candidates=len(final.pairs), pinned=final.pinned)

    return PipelineReport(
        source=kind,
        m=m,
        class_number=k,
        d1_shape=(d1.rows, d1.cols),
        d2_shape=(d2.rows, d2.cols),
        d1_divisors=tuple(elementary_divisors(d1)),
        d2_divisors=tuple(elementary_divisors(d2)),
        chain_ranks=ranks,
        page=page,
        euler_ok=euler_ok,
        k_pruned=k_pruned,
        k_halfspace=k_half,
        corners=corners,
        final=final,
        stages=tuple(stages),
    )
