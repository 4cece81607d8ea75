"""Human-readable and JSON renderings of command results."""

import json
from typing import Any

from pydantic import BaseModel

from ..core.config import settings
from ..models.algebra import FgAbelianGroup, IntMatrix, format_divisors
from ..models.complex import ValidationReport
from ..models.pipeline import KResult, PipelineReport, SpectralPage

_LABEL_WIDTH = 24


def to_json(payload: BaseModel | dict[str, Any]) -> str:
    """Sorted-key JSON; groups appear in their canonical rendering."""
    data = payload.model_dump(mode="json") if isinstance(payload, BaseModel) else payload
    return json.dumps(data, sort_keys=True, indent=settings.JSON_INDENT, ensure_ascii=False)


def _line(label: str, value: object) -> str:
    return f"{label:<{_LABEL_WIDTH}}{value}"


def _groups(groups: tuple[FgAbelianGroup, ...]) -> str:
    if len(groups) == 1:
        return str(groups[0])
    return "{" + ", ".join(str(g) for g in groups) + "}"


def render_validation(report: ValidationReport) -> str:
    if report.valid:
        return "valid"
    lines = [f"invalid: {len(report.violations)} violation(s)"]
    for v in report.violations:
        cells = f" [{', '.join(v.cells)}]" if v.cells else ""
        lines.append(f"  {v.code}{cells}: {v.message}")
    return "\n".join(lines)


def homology_payload(d1: IntMatrix, d2: IntMatrix, divisors: tuple[list[int], list[int]], page: SpectralPage) -> dict[str, Any]:
    return {
        "d1_shape": [d1.rows, d1.cols],
        "d2_shape": [d2.rows, d2.cols],
        "d1_divisors": divisors[0],
        "d2_divisors": divisors[1],
        "H0": str(page.h0),
        "H1": str(page.h1),
        "H2": str(page.h2),
    }


def render_homology(payload: dict[str, Any]) -> str:
    """Aligned text for the homology command."""
    r1, c1 = payload["d1_shape"]
    r2, c2 = payload["d2_shape"]
    return "\n".join(
        [
            _line(f"d1 ({r1}x{c1}) divisors", format_divisors(payload["d1_divisors"])),
            _line(f"d2 ({r2}x{c2}) divisors", format_divisors(payload["d2_divisors"])),
            _line("H0", payload["H0"]),
            _line("H1", payload["H1"]),
            _line("H2", payload["H2"]),
        ]
    )


def _k_lines(title: str, k: KResult) -> list[str]:
    lines = [
        _line(f"{title} K0", _groups(k.k0_candidates)),
        _line(f"{title} K1", _groups(k.k1_candidates)),
    ]
    lines.extend(_line("", f"note: {n}") for n in k.notes)
    return lines


def render_pipeline(report: PipelineReport) -> str:
    """Aligned text report; the last line states RK_0 and RK_1."""
    lines = [
        _line("source", report.source + (f" (m = {report.m})" if report.m is not None else "")),
        _line("class number", report.class_number),
        _line(f"d1 ({report.d1_shape[0]}x{report.d1_shape[1]}) divisors", format_divisors(list(report.d1_divisors))),
        _line(f"d2 ({report.d2_shape[0]}x{report.d2_shape[1]}) divisors", format_divisors(list(report.d2_divisors))),
        _line("E2 page", f"H0 = {report.page.h0}, H1 = {report.page.h1}, H2 = {report.page.h2}"),
        _line(
            "Euler check",
            "{} - {} + {} = {} - {} + {}: {}".format(
                *report.chain_ranks,
                report.page.h0.free_rank,
                report.page.h1.free_rank,
                report.page.h2.free_rank,
                "ok" if report.euler_ok else "MISMATCH",
            ),
        ),
        *_k_lines("pruned complex", report.k_pruned),
        *_k_lines("half-space", report.k_halfspace),
        _line("boundary tori", f"K0 = {report.corners[0]}, K1 = {report.corners[1]}"),
    ]
    final = report.final
    for cand in final.pairs:
        flag = "" if cand.torsion_pinned else "  [torsion-ambiguous]"
        lines.append(_line("candidate", f"({cand.rk0}, {cand.rk1}) arrow ranks {list(cand.arrow_ranks)}{flag}"))
    if final.pinned:
        lines.append(f"RK_0 = {final.k0_candidates[0]}, RK_1 = {final.k1_candidates[0]}")
    else:
        lines.append(
            f"RK_0 in {_groups(final.k0_candidates)}, RK_1 in {_groups(final.k1_candidates)} (not pinned)"
        )
    return "\n".join(lines)
