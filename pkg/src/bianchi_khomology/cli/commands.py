"""Command-line entry point.

Exit codes: 0 success, 1 domain error (invalid complex, inconsistent hints, ...),
2 unreadable or malformed input.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from loguru import logger
from pydantic import BaseModel, ValidationError

from .. import __version__
from ..core.config import settings
from ..core.exceptions import BianchiKError
from ..core.logging import setup_logging
from ..models.complex import MatrixDocument, PrunedComplex
from ..models.pipeline import HintsDocument, PipelineConfig
from ..services.arith import (
    QuadPointParseError,
    class_number,
    imag_quad_field,
    orbit_counts,
    parse_quad_point,
    reduced_forms,
    singular_violation_search,
)
from ..services.gamma_cw import assemble_bredon, validate, validate_matrices
from ..services.kk_pipeline import e2_page, run_pipeline
from ..services.linalg import elementary_divisors
from .fixtures import write_fixtures
from .render import homology_payload, render_homology, render_pipeline, render_validation, to_json

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INPUT = 2


class DocumentError(BianchiKError):
    """Raised when an input document cannot be read or parsed."""

    pass


def _read_json(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path} is not valid JSON: {e}") from e


def load_document(path: Path) -> PrunedComplex | MatrixDocument:
    """Read a complex document, or a matrix document when a "d1" key is present.

    Raises:
        DocumentError: If the file is unreadable, not JSON, or fails the document schema
    """
    data = _read_json(path)
    if not isinstance(data, dict):
        raise DocumentError(f"{path}: a document must be a JSON object")
    model: type[PrunedComplex] | type[MatrixDocument] = MatrixDocument if "d1" in data else PrunedComplex
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise DocumentError(f"{path}: {e}") from e


def load_hints(path: Path) -> HintsDocument:
    try:
        return HintsDocument.model_validate(_read_json(path))
    except ValidationError as e:
        raise DocumentError(f"{path}: {e}") from e


def _emit(args: argparse.Namespace, payload: BaseModel | dict[str, Any], text: str) -> None:
    print(to_json(payload) if args.json else text)


def cmd_validate(args: argparse.Namespace) -> int:
    doc = load_document(args.path)
    report = validate(doc) if isinstance(doc, PrunedComplex) else validate_matrices(doc)
    _emit(args, report, render_validation(report))
    if not report.valid:
        logger.error("Document is invalid", path=str(args.path), violations=len(report.violations))
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_homology(args: argparse.Namespace) -> int:
    doc = load_document(args.path)
    if isinstance(doc, PrunedComplex):
        d1, d2 = assemble_bredon(doc)
    else:
        try:
            d1, d2 = doc.differentials()
        except ValueError as e:
            raise DocumentError(f"{args.path}: {e}") from e
        if d1.cols != d2.rows:
            raise DocumentError(f"{args.path}: d1 is {d1.rows}x{d1.cols} but d2 has {d2.rows} rows")
    page = e2_page(d1, d2)
    payload = homology_payload(d1, d2, (elementary_divisors(d1), elementary_divisors(d2)), page)
    _emit(args, payload, render_homology(payload))
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace) -> int:
    doc = load_document(args.path)
    if isinstance(doc, MatrixDocument) and doc.class_number is None:
        raise DocumentError(f"{args.path}: a matrix document needs class_number for the pipeline")
    hints = load_hints(args.hints) if args.hints else None
    config = PipelineConfig(split_policy=args.policy or settings.SPLIT_POLICY, hints=hints)
    report = run_pipeline(doc, config)
    _emit(args, report, render_pipeline(report))
    return EXIT_OK


def cmd_classnumber(args: argparse.Namespace) -> int:
    h = class_number(args.m)
    cusps, singular = orbit_counts(args.m)
    forms = reduced_forms(imag_quad_field(args.m).disc)
    payload = {
        "m": args.m,
        "class_number": h,
        "cusp_orbits": cusps,
        "singular_orbits": singular,
        "reduced_forms": [list(f) for f in forms],
    }
    text = f"h = {h}, cusp orbits = {cusps}, singular orbits = {singular}\nreduced forms: " + ", ".join(
        str(f) for f in forms
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_singular(args: argparse.Namespace) -> int:
    try:
        point = parse_quad_point(args.m, args.point)
    except QuadPointParseError as e:
        raise DocumentError(str(e)) from e
    bound = args.bound or settings.SINGULAR_SEARCH_BOUND
    witness = singular_violation_search(point, bound)
    field = point.field
    payload: dict[str, Any] = {"m": args.m, "point": args.point, "bound": bound, "witness": None}
    if witness is None:
        text = f"no witness with |c|^2 <= {bound}: bounded certificate, not a proof of singularity"
    else:
        payload["witness"] = {
            "c": list(witness.c),
            "d": list(witness.d),
            "distance_squared": str(witness.distance_squared),
        }
        text = (
            f"witness c = {field.render(witness.c)}, d = {field.render(witness.d)}, "
            f"|cD - d|^2 = {witness.distance_squared}"
        )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    paths = write_fixtures(args.outdir)
    _emit(args, {"written": [str(p) for p in paths]}, "\n".join(str(p) for p in paths))
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the machine-readable report")

    parser = argparse.ArgumentParser(
        prog="bianchi-k",
        description="Equivariant K-homology of Bianchi groups from orbit data of the pruned complex.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a complex or matrix document")
    p.add_argument("path", type=Path)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("homology", parents=[common], help="elementary divisors and E2 page")
    p.add_argument("path", type=Path)
    p.set_defaults(handler=cmd_homology)

    p = sub.add_parser("pipeline", parents=[common], help="full run to the final K-homology")
    p.add_argument("path", type=Path)
    p.add_argument("--hints", type=Path, help="hint document for the six-term sequence")
    p.add_argument("--policy", choices=["paper-split", "enumerate"], help="extension policy for K0")
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("classnumber", parents=[common], help="class number and orbit counts of Q(sqrt(-m))")
    p.add_argument("m", type=int)
    p.set_defaults(handler=cmd_classnumber)

    p = sub.add_parser("singular", parents=[common], help="search for a witness that a point is not singular")
    p.add_argument("m", type=int)
    p.add_argument("point", help='rational expression in s = sqrt(-m), e.g. "(1+s)/2"')
    p.add_argument("bound", type=_positive_int, nargs="?", help="norm bound for c (default SINGULAR_SEARCH_BOUND)")
    p.set_defaults(handler=cmd_singular)

    p = sub.add_parser("fixtures", parents=[common], help="write the bundled documents")
    p.add_argument("outdir", type=Path)
    p.set_defaults(handler=cmd_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    setup_logging("DEBUG" if args.verbose else None)
    try:
        return args.handler(args)
    except DocumentError as e:
        logger.error("Input error", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BianchiKError as e:
        logger.error("Computation failed", command=args.command, error=type(e).__name__)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
