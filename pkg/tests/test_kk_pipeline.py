"""Tests for the E2 page, extension problems, the six-term solver and the full pipeline."""

import pytest
from pydantic import ValidationError

from src.bianchi_khomology.models.algebra import FgAbelianGroup, IntMatrix
from src.bianchi_khomology.models.complex import MatrixDocument
from src.bianchi_khomology.models.pipeline import (
    ArrowHint,
    ExtensionProblem,
    KResult,
    PipelineConfig,
    SixTermProblem,
    SpectralPage,
)
from src.bianchi_khomology.services.gamma_cw import InvalidComplex
from src.bianchi_khomology.services.kk_pipeline import (
    InconsistentHints,
    InvalidClassNumber,
    MalformedSixTermProblem,
    SixTermSolver,
    UnsupportedExtension,
    boundary_corners,
    e2_page,
    hexagon_problem,
    k_of_halfspace,
    k_of_pruned,
    page_of_complex,
    run_pipeline,
    solve_extension,
    solve_six_term,
)
from src.bianchi_khomology.services.linalg import cokernel, kernel_basis, rank

G = FgAbelianGroup.parse
M5_PAGE = SpectralPage(h0="Z^5 + Z/2", h1="Z^3", h2="Z")


def groups(values):
    return [str(g) for g in values]


def pair_strings(result):
    return {(str(c.rk0), str(c.rk1)) for c in result.pairs}


def random_arrow(rng, rows, cols):
    """A random map Z^cols -> Z^rows, often scaled so its cokernel has torsion."""
    scale = rng.choice([1, 1, 2, 3])
    return IntMatrix(rows=rows, cols=cols, entries=tuple(scale * rng.randint(-2, 2) for _ in range(rows * cols)))


def exact_hexagon(rng):
    """An exact hexagon whose four known nodes are free and joined by random maps a and b.

    With a: N(u+1) -> N(u+2) and b: N(u+4) -> N(u+5), the unknown nodes are
    coker(b) + ker(a) and coker(a) + ker(b): both extensions end in a free group.
    """
    u = rng.choice([0, 1, 2])
    p, q, r, t = (rng.randint(0, 3) for _ in range(4))
    a, b = random_arrow(rng, q, p), random_arrow(rng, t, r)
    truth = (
        cokernel(b).direct_sum(FgAbelianGroup.free(kernel_basis(a).cols)),
        cokernel(a).direct_sum(FgAbelianGroup.free(kernel_basis(b).cols)),
    )
    nodes = [None] * 6
    nodes[u + 1], nodes[u + 2] = FgAbelianGroup.free(p), FgAbelianGroup.free(q)
    nodes[(u + 4) % 6], nodes[(u + 5) % 6] = FgAbelianGroup.free(r), FgAbelianGroup.free(t)
    return u, a, b, nodes, truth


def true_hint(m):
    return ArrowHint(rank=rank(m), kernel=FgAbelianGroup.free(kernel_basis(m).cols), cokernel=cokernel(m))


class TestE2Page:
    """Test homology of the Bredon complex."""

    def test_m5(self, m5_matrices):
        """Test the E2 page for m = 5."""
        assert e2_page(*m5_matrices) == M5_PAGE

    def test_page_of_complex(self, m5_complex, triangle_circle):
        """Test that assembling and taking homology agrees with the bundled tables."""
        assert page_of_complex(m5_complex) == M5_PAGE
        assert page_of_complex(triangle_circle) == SpectralPage(h0="Z", h1="Z", h2="0")

    def test_odd_rows_vanish(self):
        """Test that odd rows and columns beyond 2 are zero."""
        assert M5_PAGE.group(1, 0) == G("Z^3")
        assert M5_PAGE.group(1, 2) == G("Z^3")
        assert M5_PAGE.group(0, 1).is_zero()
        assert M5_PAGE.group(3, 0).is_zero()


class TestSolveExtension:
    """Test enumeration of extensions of a finite quotient by a free group."""

    def test_z_by_z5_plus_z2(self):
        """Test the two middle groups for 0 → Z → ? → Z^5 + Z/2 → 0."""
        assert groups(solve_extension(ExtensionProblem(sub="Z", quot="Z^5 + Z/2"))) == ["Z^6", "Z^6 + Z/2"]

    def test_z_by_z4(self):
        """Test every extension class of Z/4 by Z, including the intermediate one."""
        assert groups(solve_extension(ExtensionProblem(sub="Z", quot="Z/4"))) == ["Z", "Z + Z/2", "Z + Z/4"]

    def test_free_quotient_splits(self):
        """Test that a free quotient has only the split extension."""
        assert groups(solve_extension(ExtensionProblem(sub="Z^2", quot="Z^3"))) == ["Z^5"]

    def test_zero_sub(self):
        """Test that a zero kernel gives the quotient."""
        assert groups(solve_extension(ExtensionProblem(sub="0", quot="Z/6"))) == ["Z/6"]

    def test_torsion_sub_unsupported(self):
        """Test that torsion kernels are refused."""
        with pytest.raises(UnsupportedExtension, match="torsion kernel"):
            solve_extension(ExtensionProblem(sub="Z/2", quot="Z/2"))

    def test_enumeration_limit(self):
        """Test that too many classes are refused."""
        with pytest.raises(UnsupportedExtension, match="enumeration limit"):
            solve_extension(ExtensionProblem(sub="Z^3", quot="Z/2 + Z/2"), limit=10)

    def test_split_always_present(self, rng):
        """Test that the direct sum is always a candidate."""
        for _ in range(30):
            sub = FgAbelianGroup.free(rng.randint(1, 2))
            quot = FgAbelianGroup.from_cyclic_orders(*(rng.choice([0, 2, 3, 4]) for _ in range(rng.randint(1, 2))))
            assert sub.direct_sum(quot) in solve_extension(ExtensionProblem(sub=sub, quot=quot))


class TestKOfPruned:
    """Test the pruned-complex and half-space stages."""

    def test_paper_split_policy(self, log_messages):
        """Test that the split policy pins K0 and records the dropped alternative."""
        k = k_of_pruned(M5_PAGE, "paper-split")
        assert groups(k.k0_candidates) == ["Z^6 + Z/2"]
        assert groups(k.k1_candidates) == ["Z^3"]
        assert k.pinned
        assert groups(k.dropped) == ["Z^6"]
        assert k.notes and "Z^6" in k.notes[0]
        assert ("WARNING", "Extension resolved by split policy") in log_messages

    def test_enumerate_policy(self):
        """Test that the enumerate policy keeps both candidates."""
        k = k_of_pruned(M5_PAGE, "enumerate")
        assert groups(k.k0_candidates) == ["Z^6", "Z^6 + Z/2"]
        assert not k.pinned
        assert k.dropped == ()

    def test_no_alternatives_no_note(self):
        """Test that a page with free H0 pins silently."""
        k = k_of_pruned(SpectralPage(h0="Z", h1="Z", h2="Z"), "paper-split")
        assert groups(k.k0_candidates) == ["Z^2"]
        assert k.notes == ()

    def test_halfspace_adds_z_to_k1(self):
        """Test K(H) for m = 5."""
        k = k_of_halfspace(k_of_pruned(M5_PAGE, "paper-split"))
        assert groups(k.k0_candidates) == ["Z^6 + Z/2"]
        assert groups(k.k1_candidates) == ["Z^4"]
        assert k.pinned

    def test_boundary_corners(self):
        """Test Z^{2k} corners and the class-number guard."""
        assert boundary_corners(2) == (G("Z^4"), G("Z^4"))
        with pytest.raises(InvalidClassNumber):
            boundary_corners(0)

    def test_kresult_requires_canonical_candidates(self):
        """Test that KResult rejects unsorted or empty candidate lists."""
        with pytest.raises(ValidationError, match="must not be empty"):
            KResult(k0_candidates=(), k1_candidates=(G("Z"),), pinned=False)
        with pytest.raises(ValidationError, match="canonically sorted"):
            KResult(k0_candidates=(G("Z^2"), G("Z")), k1_candidates=(G("Z"),), pinned=False)


class TestSixTerm:
    """Test the six-term solver."""

    def test_m5_with_hints(self, m5_hints):
        """Test that the bundled hints pin RK for m = 5."""
        problem = hexagon_problem(G("Z^6 + Z/2"), G("Z^4"), 2, m5_hints)
        result = solve_six_term(problem)
        assert result.pinned
        assert groups(result.k0_candidates) == ["Z^6 + Z/2"]
        assert groups(result.k1_candidates) == ["Z^4"]
        assert result.pairs[0].arrow_ranks == (4, 2, 4, 0, 4, 0)

    def test_m5_without_hints(self):
        """Test that without hints the torsion of RK_0 is ambiguous."""
        result = solve_six_term(hexagon_problem(G("Z^6 + Z/2"), G("Z^4"), 2))
        assert not result.pinned
        assert {("Z^6 + Z/2", "Z^4"), ("Z^6", "Z^4")} <= pair_strings(result)
        assert result.notes

    def test_zero_corners(self):
        """Test that zero corners reproduce the known nodes."""
        zero = FgAbelianGroup.zero()
        result = solve_six_term(SixTermProblem(nodes=(zero, None, G("Z + Z/3"), zero, None, G("Z^2"))))
        assert result.pinned
        assert pair_strings(result) == {("Z + Z/3", "Z^2")}

    def test_toy_pruned_edge_hexagon(self):
        """Test the hexagon of a single pruned edge with k = 1."""
        result = solve_six_term(hexagon_problem(FgAbelianGroup.zero(), G("Z"), 1))
        assert pair_strings(result) == {("Z", "Z^2"), ("Z^2", "Z^3")}
        flags = {str(c.rk0): c.torsion_pinned for c in result.pairs}
        assert flags == {"Z": False, "Z^2": True}
        assert not result.pinned

    def test_construct_then_solve(self, rng):
        """Test hexagons built from random integer maps against their true unknown nodes."""
        for _ in range(200):
            u, a, b, nodes, truth = exact_hexagon(rng)
            solver = SixTermSolver(SixTermProblem(nodes=tuple(nodes)))
            found = solver.solve_assignment(rank(a), rank(b))
            assert found
            for cand in found:
                assert (cand.rk0.free_rank, cand.rk1.free_rank) == (truth[0].free_rank, truth[1].free_rank)
                if cand.torsion_pinned:
                    assert (cand.rk0, cand.rk1) == truth
            for cand in solver.solve().pairs:
                filled = list(nodes)
                filled[u], filled[u + 3] = cand.rk0, cand.rk1
                for i, group in enumerate(filled):
                    assert group.free_rank == cand.arrow_ranks[i - 1] + cand.arrow_ranks[i]

    def test_true_hints_pin_the_truth(self, rng):
        """Test that the true kernels and cokernels of both known arrows pin the true pair."""
        for _ in range(100):
            u, a, b, nodes, truth = exact_hexagon(rng)
            hints = {u + 1: true_hint(a), (u + 4) % 6: true_hint(b)}
            result = solve_six_term(SixTermProblem(nodes=tuple(nodes), hints=hints))
            assert result.pinned
            assert (result.pairs[0].rk0, result.pairs[0].rk1) == truth

    def test_cokernel_torsion_needs_a_hint(self):
        """Test multiplication by 2 on Z^2: its Z/2 + Z/2 cokernel is only found when hinted."""
        nodes = (G("Z^2"), None, G("Z^2"), G("Z^2"), None, FgAbelianGroup.zero())
        guessed = SixTermSolver(SixTermProblem(nodes=nodes)).solve_assignment(2, 0)
        assert [(str(c.rk0), str(c.rk1), c.torsion_pinned) for c in guessed] == [("Z^2", "0", False)]

        hints = {2: true_hint(IntMatrix.diagonal([2, 2]))}
        result = solve_six_term(SixTermProblem(nodes=nodes, hints=hints))
        assert result.pinned
        assert pair_strings(result) == {("Z^2", "Z/2 + Z/2")}

    def test_rank_hint_filters(self):
        """Test that a rank hint removes other assignments."""
        problem = hexagon_problem(FgAbelianGroup.zero(), G("Z"), 1).model_copy(update={"hints": {5: ArrowHint(rank=0)}})
        assert pair_strings(solve_six_term(problem)) == {("Z^2", "Z^3")}

    def test_inconsistent_hints(self):
        """Test that impossible ranks raise."""
        problem = SixTermProblem(
            nodes=(G("Z^4"), None, G("Z^6 + Z/2"), G("Z^4"), None, G("Z^4")),
            hints={2: ArrowHint(rank=7)},
        )
        with pytest.raises(InconsistentHints):
            solve_six_term(problem)

    def test_hint_kernel_rank_mismatch(self):
        """Test that a kernel hint disagreeing with rank-nullity excludes every assignment."""
        problem = SixTermProblem(
            nodes=(G("Z^2"), None, G("Z"), G("Z^2"), None, G("Z")),
            hints={2: ArrowHint(rank=0, kernel="Z^5")},
        )
        with pytest.raises(InconsistentHints):
            solve_six_term(problem)

    def test_unknowns_must_be_opposite(self):
        """Test that adjacent unknowns are malformed."""
        zero = FgAbelianGroup.zero()
        with pytest.raises(MalformedSixTermProblem, match="opposite"):
            solve_six_term(SixTermProblem(nodes=(zero, None, None, zero, zero, zero)))

    def test_stray_kernel_hint(self):
        """Test that kernel hints on arrows touching an unknown node are malformed."""
        zero = FgAbelianGroup.zero()
        problem = SixTermProblem(nodes=(zero, None, zero, zero, None, zero), hints={0: ArrowHint(kernel="0")})
        with pytest.raises(MalformedSixTermProblem, match="only meaningful"):
            solve_six_term(problem)

    def test_split_node_must_be_unknown(self):
        """Test that split nodes must be unknown nodes."""
        zero = FgAbelianGroup.zero()
        problem = SixTermProblem(nodes=(zero, None, zero, zero, None, zero), split_nodes=frozenset({0}))
        with pytest.raises(MalformedSixTermProblem, match="split nodes"):
            solve_six_term(problem)

    def test_six_nodes_required(self):
        """Test the node count."""
        with pytest.raises(ValidationError, match="6 nodes"):
            SixTermProblem(nodes=(None, None, None))

    def test_workers_do_not_change_result(self):
        """Test that threaded enumeration gives the same result."""
        problem = hexagon_problem(G("Z^6 + Z/2"), G("Z^4"), 2)
        assert solve_six_term(problem, workers=4) == solve_six_term(problem, workers=1)


@pytest.mark.integration
class TestRunPipeline:
    """Test the whole pipeline."""

    def test_m5_matrices_with_hints(self, m5_document, m5_hints):
        """Test RK_0 = Z^6 + Z/2 and RK_1 = Z^4 for m = 5."""
        report = run_pipeline(m5_document, PipelineConfig(hints=m5_hints, split_policy="paper-split"))
        assert report.source == "matrices"
        assert report.class_number == 2
        assert report.d1_divisors == (1, 1, 1, 1, 1, 1, 1, 2)
        assert report.d2_divisors == (1, 1)
        assert report.page == M5_PAGE
        assert report.euler_ok
        assert report.corners == (G("Z^4"), G("Z^4"))
        assert groups(report.k_halfspace.k0_candidates) == ["Z^6 + Z/2"]
        assert groups(report.k_halfspace.k1_candidates) == ["Z^4"]
        assert report.final.pinned
        assert groups(report.final.k0_candidates) == ["Z^6 + Z/2"]
        assert groups(report.final.k1_candidates) == ["Z^4"]

    def test_m5_complex_matches_matrices(self, m5_complex, m5_document, m5_hints):
        """Test that the orbit data and the tables give the same report body."""
        config = PipelineConfig(hints=m5_hints, split_policy="paper-split")
        from_complex = run_pipeline(m5_complex, config)
        from_matrices = run_pipeline(m5_document, config)
        assert from_complex.source == "complex"
        assert from_complex.chain_ranks == from_matrices.chain_ranks == (13, 13, 3)
        assert from_complex.final == from_matrices.final

    def test_enumerate_policy_without_hints(self, m5_document):
        """Test that the enumerate policy leaves RK unpinned."""
        report = run_pipeline(m5_document, PipelineConfig(split_policy="enumerate"))
        assert not report.k_pruned.pinned
        assert not report.final.pinned
        assert G("Z^6 + Z/2") in report.final.k0_candidates

    def test_toy_pruned_edge(self, toy_pruned_edge):
        """Test a complex with vanishing homology."""
        report = run_pipeline(toy_pruned_edge, PipelineConfig(split_policy="paper-split"))
        assert report.page == SpectralPage(h0="0", h1="0", h2="0")
        assert groups(report.k_halfspace.k1_candidates) == ["Z"]
        assert pair_strings(report.final) == {("Z", "Z^2"), ("Z^2", "Z^3")}

    def test_missing_class_number(self):
        """Test that matrix documents need a class number."""
        with pytest.raises(InvalidClassNumber):
            run_pipeline(MatrixDocument(d1=[[0]], d2=[[2]]))

    def test_invalid_matrices(self):
        """Test that a document whose differentials do not compose is refused."""
        with pytest.raises(InvalidComplex):
            run_pipeline(MatrixDocument(d1=[[1]], d2=[[1]], class_number=1))

    def test_stages_logged(self, m5_document, m5_hints, log_messages):
        """Test that each stage is logged at INFO."""
        run_pipeline(m5_document, PipelineConfig(hints=m5_hints))
        info = [msg for level, msg in log_messages if level == "INFO"]
        assert info == ["Bredon complex ready", "E2 page computed", "Pipeline finished"]
