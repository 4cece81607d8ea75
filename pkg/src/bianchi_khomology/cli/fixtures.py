"""Bundled documents: the m = 5 tables, its hint set, and small complexes with known homology."""

import json
from collections.abc import Callable
from pathlib import Path

from loguru import logger
from pydantic import BaseModel

from ..core.config import settings
from ..core.exceptions import BianchiKError
from ..models.complex import MatrixDocument, PrunedComplex
from ..models.pipeline import HintsDocument


class FixtureWriteError(BianchiKError):
    """Raised when bundled documents cannot be written."""

    pass


# d1 for m = 5 as printed, zeros omitted: row -> {column: entry}, both 1-based
_M5_D1_NONZERO: dict[int, dict[int, int]] = {
    1: {1: -1, 8: 1, 10: 1},
    2: {2: -1, 9: 1, 10: 1},
    3: {1: -1, 9: 1, 11: 1},
    4: {2: -1, 8: 1, 11: 1},
    5: {6: 1, 8: -1, 10: -1},
    6: {7: 1, 9: -1, 10: -1},
    7: {7: 1, 8: -1, 11: -1},
    8: {6: 1, 9: -1, 11: -1},
    9: {1: 1, 6: -1, 12: -1, 13: -1},
    10: {2: 1, 7: -1, 12: -1, 13: -1},
    11: {12: 1},
    12: {12: 1},
    13: {12: 1},
}

# transpose of d2 as printed: one row per face orbit
_M5_D2_TRANSPOSE = (
    (-1, -1, -1, -1, -1, -1, -1, 0, 0, -1, -1, 0, 0),
    (1, 1, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0),
    (0,) * 13,
)

_M5_LABELS = {
    "d1_rows": ("b", "|", "|", "b", "u", "|", "|", "u", "a", "a", "v", "|", "v"),
    "d1_cols": (
        "(b,a)", "(b,a)",
        "(v,v1)", "(v,v1)", "(v,v1)",
        "(a3,u)", "(a3,u)",
        "(u,b)", "(u,b)",
        "(u1,b)", "(u1,b)",
        "(a,v)",
        "(a,s)",
    ),  # fmt: skip
    "d2_transpose_rows": ("large cell", "mid-size cell", "small cell"),
}


def m5_matrix_document() -> MatrixDocument:
    """Differentials of the modified Bredon complex for Q(√−5)."""
    d1 = tuple(
        tuple(_M5_D1_NONZERO[i].get(j, 0) for j in range(1, 14))
        for i in range(1, 14)
    )
    return MatrixDocument(
        d1=d1,
        d2_transpose=_M5_D2_TRANSPOSE,
        m=5,
        class_number=2,
        labels=_M5_LABELS,
    )


def m5_hints() -> HintsDocument:
    description = (
        "Hexagon for m = 5 with nodes 0: K0 of the tori (Z^4), 1: RK_0, 2: K0 of H, "
        "3: K1 of the tori (Z^4), 4: RK_1, 5: K1 of H; arrow i maps node i to node i+1. "
        "This is the assignment that yields RK_0 = Z^6 + Z/2 and RK_1 = Z^4: "
        "K0 of H maps onto the K1 tori corner with kernel Z^2 + Z/2, "
        "K1 of H maps to the K0 tori corner by zero, and the extension at RK_0 splits."
    )
    return HintsDocument.model_validate(
        {
            "description": description,
            "arrows": {
                2: {"rank": 4, "kernel": "Z^2 + Z/2", "cokernel": "0"},
                5: {"rank": 0, "kernel": "Z^4", "cokernel": "Z^4"},
            },
            "split_nodes": [1],
        }
    )


def _incidence(cell: str, face: str, coefficient: int, canonical: str) -> dict[str, object]:
    return {"cell": cell, "face": face, "coefficient": coefficient, "embedding": {"canonical": canonical}}


def m5_complex() -> PrunedComplex:
    """Orbit data of the pruned complex for Q(√−5) whose differentials are the printed tables.

    Vertices b, u (Klein four), a (C2), v (C3); seven edge orbits, the one from a
    towards the singular point s carrying a single vertex incidence; three faces.
    """
    cells = [
        {"id": "b", "dim": 0, "stabilizer": "V4"},
        {"id": "u", "dim": 0, "stabilizer": "V4"},
        {"id": "a", "dim": 0, "stabilizer": "C2"},
        {"id": "v", "dim": 0, "stabilizer": "C3"},
        {"id": "ba", "name": "(b,a)", "dim": 1, "stabilizer": "C2"},
        {"id": "vv1", "name": "(v,v1)", "dim": 1, "stabilizer": "C3"},
        {"id": "a3u", "name": "(a3,u)", "dim": 1, "stabilizer": "C2"},
        {"id": "ub", "name": "(u,b)", "dim": 1, "stabilizer": "C2"},
        {"id": "u1b", "name": "(u1,b)", "dim": 1, "stabilizer": "C2"},
        {"id": "av", "name": "(a,v)", "dim": 1, "stabilizer": "Trivial"},
        {"id": "as", "name": "(a,s)", "dim": 1, "stabilizer": "Trivial", "touches_singular": True},
        {"id": "large", "name": "large cell", "dim": 2, "stabilizer": "Trivial"},
        {"id": "mid", "name": "mid-size cell", "dim": 2, "stabilizer": "Trivial"},
        {"id": "small", "name": "small cell", "dim": 2, "stabilizer": "Trivial"},
    ]
    incidences = [
        _incidence("ba", "b", -1, "C2-in-V4-y"),
        _incidence("ba", "a", 1, "C2-in-C2"),
        _incidence("vv1", "v", 1, "C3-in-C3"),
        _incidence("vv1", "v", -1, "C3-in-C3"),
        _incidence("a3u", "u", 1, "C2-in-V4-z"),
        _incidence("a3u", "a", -1, "C2-in-C2"),
        _incidence("ub", "b", 1, "C2-in-V4-z"),
        _incidence("ub", "u", -1, "C2-in-V4-y"),
        _incidence("u1b", "b", 1, "C2-in-V4-x"),
        _incidence("u1b", "u", -1, "C2-in-V4-x"),
        _incidence("av", "a", -1, "Trivial-in-C2"),
        _incidence("av", "v", 1, "Trivial-in-C3"),
        _incidence("as", "a", -1, "Trivial-in-C2"),
        _incidence("large", "ba", -1, "Trivial-in-C2"),
        _incidence("large", "vv1", -1, "Trivial-in-C3"),
        _incidence("large", "a3u", -1, "Trivial-in-C2"),
        _incidence("large", "u1b", -1, "Trivial-in-C2"),
        _incidence("mid", "ba", 1, "Trivial-in-C2"),
        _incidence("mid", "a3u", 1, "Trivial-in-C2"),
        _incidence("mid", "ub", 1, "Trivial-in-C2"),
        _incidence("small", "as", 1, "Trivial-in-Trivial"),
        _incidence("small", "as", -1, "Trivial-in-Trivial"),
        _incidence("small", "av", 1, "Trivial-in-Trivial"),
        _incidence("small", "av", -1, "Trivial-in-Trivial"),
    ]
    return PrunedComplex.model_validate({"m": 5, "class_number": 2, "cells": cells, "incidences": incidences})


def toy_pruned_edge() -> PrunedComplex:
    """One trivially stabilized edge whose other end is a singular point; homology vanishes."""
    return PrunedComplex.model_validate(
        {
            "class_number": 1,
            "cells": [
                {"id": "v", "dim": 0, "stabilizer": "Trivial"},
                {"id": "e", "dim": 1, "stabilizer": "Trivial", "touches_singular": True},
            ],
            "incidences": [_incidence("e", "v", -1, "Trivial-in-Trivial")],
        }
    )


def toy_full_edge() -> PrunedComplex:
    """The same edge with both endpoints kept; H0 = Z."""
    return PrunedComplex.model_validate(
        {
            "class_number": 1,
            "cells": [
                {"id": "v0", "dim": 0, "stabilizer": "Trivial"},
                {"id": "v1", "dim": 0, "stabilizer": "Trivial"},
                {"id": "e", "dim": 1, "stabilizer": "Trivial"},
            ],
            "incidences": [
                _incidence("e", "v0", -1, "Trivial-in-Trivial"),
                _incidence("e", "v1", 1, "Trivial-in-Trivial"),
            ],
        }
    )


def triangle_circle() -> PrunedComplex:
    """A circle made of three vertices and three edges."""
    cells = [{"id": f"v{i}", "dim": 0, "stabilizer": "Trivial"} for i in range(3)]
    cells += [{"id": f"e{i}{(i + 1) % 3}", "dim": 1, "stabilizer": "Trivial"} for i in range(3)]
    incidences = []
    for i in range(3):
        j = (i + 1) % 3
        incidences.append(_incidence(f"e{i}{j}", f"v{i}", -1, "Trivial-in-Trivial"))
        incidences.append(_incidence(f"e{i}{j}", f"v{j}", 1, "Trivial-in-Trivial"))
    return PrunedComplex.model_validate({"class_number": 1, "cells": cells, "incidences": incidences})


def rp2_matrices() -> MatrixDocument:
    """One cell in each dimension with d2 = 2 and d1 = 0: the real projective plane."""
    return MatrixDocument(d1=((0,),), d2=((2,),), class_number=1)


FIXTURES: dict[str, Callable[[], BaseModel]] = {
    "m5_matrices.json": m5_matrix_document,
    "m5_complex.json": m5_complex,
    "m5_hints.json": m5_hints,
    "toy_pruned_edge.json": toy_pruned_edge,
    "toy_full_edge.json": toy_full_edge,
    "triangle_circle.json": triangle_circle,
    "rp2_matrices.json": rp2_matrices,
}


def dump_document(model: BaseModel, indent: int | None = None) -> str:
    """Deterministic JSON text of a document, with sorted keys and a trailing newline."""
    data = model.model_dump(mode="json", by_alias=True, exclude_none=True)
    return json.dumps(data, sort_keys=True, indent=settings.JSON_INDENT if indent is None else indent, ensure_ascii=False) + "\n"


def write_fixtures(outdir: Path) -> list[Path]:
    """Write every bundled document into outdir, creating it if needed.

    Raises:
        FixtureWriteError: If the directory or a file cannot be written
    """
    written = []
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        for filename, build in FIXTURES.items():
            path = outdir / filename
            path.write_text(dump_document(build()), encoding="utf-8")
            written.append(path)
    except OSError as e:
        raise FixtureWriteError(f"cannot write fixtures to {outdir}: {e}") from e
    logger.info("Fixtures written", outdir=str(outdir), count=len(written))
    return written
