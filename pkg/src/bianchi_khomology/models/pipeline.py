"""Spectral pages, extension and six-term problems, K-homology results and reports."""

from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import SplitPolicy, settings
from .algebra import FgAbelianGroup

HEXAGON_SIZE = 6


class SpectralPage(BaseModel):
    """Row q = 0 of the E² = E∞ page; the columns are H0, H1, H2.

    The complex is 2-dimensional and the odd rows vanish, so every other entry is zero.

    Example:
        >>> page = SpectralPage(h0="Z^5 + Z/2", h1="Z^3", h2="Z")
        >>> page.group(0, 2).render(), page.group(1, 1).render(), page.group(3, 0).render()
        ('Z^5 + Z/2', '0', '0')
    """

    model_config = ConfigDict(frozen=True)

    h0: FgAbelianGroup
    h1: FgAbelianGroup
    h2: FgAbelianGroup

    def group(self, p: int, q: int) -> FgAbelianGroup:
        """E²_{p,q}: H_p for even q, zero for odd q and outside 0 ≤ p ≤ 2."""
        if q % 2 or not 0 <= p <= 2:
            return FgAbelianGroup.zero()
        return (self.h0, self.h1, self.h2)[p]


class ExtensionProblem(BaseModel):
    """0 → sub → ? → quot → 0."""

    model_config = ConfigDict(frozen=True)

    sub: FgAbelianGroup
    quot: FgAbelianGroup


class ArrowHint(BaseModel):
    """Known data about one arrow of a six-term sequence."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    rank: int | None = Field(default=None, ge=0, description="Rank of the map")
    kernel: FgAbelianGroup | None = Field(default=None, description="Kernel, when known")
    cokernel: FgAbelianGroup | None = Field(default=None, description="Cokernel, when known")


class SixTermProblem(BaseModel):
    """Cyclic exact hexagon; arrow i maps node i to node (i + 1) mod 6.

    Unknown nodes are None; the solver expects exactly two, at opposite positions.
    """

    model_config = ConfigDict(frozen=True)

    nodes: tuple[FgAbelianGroup | None, ...]
    hints: dict[int, ArrowHint] = Field(default_factory=dict)
    split_nodes: frozenset[int] = Field(default_factory=frozenset, description="Unknown nodes whose extension splits")

    @field_validator("nodes")
    @classmethod
    def six_nodes(cls, v: tuple[FgAbelianGroup | None, ...]) -> tuple[FgAbelianGroup | None, ...]:
        if len(v) != HEXAGON_SIZE:
            raise ValueError(f"a six-term sequence has 6 nodes, got {len(v)}")
        return v

    @field_validator("hints")
    @classmethod
    def arrows_in_range(cls, v: dict[int, ArrowHint]) -> dict[int, ArrowHint]:
        bad = sorted(i for i in v if not 0 <= i < HEXAGON_SIZE)
        if bad:
            raise ValueError(f"arrow indices must be 0..5, got {bad}")
        return v

    def unknowns(self) -> list[int]:
        return [i for i, node in enumerate(self.nodes) if node is None]


class SixTermCandidate(BaseModel):
    """One solution of a six-term problem.

    rk0 is the lower-indexed unknown node and rk1 the one opposite it.
    """

    model_config = ConfigDict(frozen=True)

    rk0: FgAbelianGroup
    rk1: FgAbelianGroup
    arrow_ranks: tuple[int, ...]
    torsion_pinned: bool


def _canonical(groups: list[FgAbelianGroup] | tuple[FgAbelianGroup, ...]) -> tuple[FgAbelianGroup, ...]:
    return tuple(sorted(set(groups), key=FgAbelianGroup.sort_key))


class KResult(BaseModel):
    """Candidate K0 and K1 groups, with whatever a policy or hint set pinned or dropped."""

    model_config = ConfigDict(frozen=True)

    k0_candidates: tuple[FgAbelianGroup, ...]
    k1_candidates: tuple[FgAbelianGroup, ...]
    pinned: bool
    dropped: tuple[FgAbelianGroup, ...] = Field(default=(), description="K0 candidates removed by the split policy")
    notes: tuple[str, ...] = ()
    pairs: tuple[SixTermCandidate, ...] = Field(default=(), description="Joint (K0, K1) solutions of a six-term problem")

    @model_validator(mode="after")
    def check_candidates(self) -> Self:
        for name in ("k0_candidates", "k1_candidates"):
            values = getattr(self, name)
            if not values:
                raise ValueError(f"{name} must not be empty")
            if values != _canonical(values):
                raise ValueError(f"{name} must be duplicate-free and canonically sorted")
        return self

    @classmethod
    def of(
        cls,
        k0: list[FgAbelianGroup],
        k1: list[FgAbelianGroup],
        pinned: bool | None = None,
        **extra: object,
    ) -> "KResult":
        """Canonicalise the candidate lists; pinned defaults to both lists being singletons."""
        k0c, k1c = _canonical(k0), _canonical(k1)
        if pinned is None:
            pinned = len(k0c) == 1 and len(k1c) == 1
        return cls(k0_candidates=k0c, k1_candidates=k1c, pinned=pinned, **extra)  # type: ignore[arg-type]


class HintsDocument(BaseModel):
    """Map-rank and torsion hints for the hexagon, as read from a hints file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    description: str = ""
    arrows: dict[int, ArrowHint] = Field(default_factory=dict)
    split_nodes: tuple[int, ...] = ()


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    split_policy: SplitPolicy = Field(default_factory=lambda: settings.SPLIT_POLICY)
    hints: HintsDocument | None = None
    workers: int = Field(default_factory=lambda: settings.SIX_TERM_WORKERS, ge=1)


class PipelineReport(BaseModel):
    """Every intermediate result of one pipeline run, in stage order."""

    model_config = ConfigDict(frozen=True)

    source: Literal["complex", "matrices"]
    m: int | None
    class_number: int
    d1_shape: tuple[int, int]
    d2_shape: tuple[int, int]
    d1_divisors: tuple[int, ...]
    d2_divisors: tuple[int, ...]
    chain_ranks: tuple[int, int, int]
    page: SpectralPage
    euler_ok: bool
    k_pruned: KResult
    k_halfspace: KResult
    corners: tuple[FgAbelianGroup, FgAbelianGroup]
    final: KResult
    stages: tuple[str, ...] = ()
