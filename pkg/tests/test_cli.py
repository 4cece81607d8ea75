"""End-to-end tests of the bianchi-k command line."""

import json

import pytest
from loguru import logger

from src.bianchi_khomology.cli import main
from src.bianchi_khomology.cli.commands import EXIT_DOMAIN, EXIT_INPUT, EXIT_OK
from src.bianchi_khomology.cli.fixtures import FIXTURES


@pytest.fixture
def run(capsys):
    """Run main() and return (exit code, stdout, stderr)."""

    def _run(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err

    yield _run
    # main() points loguru at the captured stderr, which closes after the test
    logger.remove()


@pytest.fixture
def fixture_dir(tmp_path, run):
    """A directory holding every bundled document."""
    code, _, _ = run("fixtures", tmp_path)
    assert code == EXIT_OK
    return tmp_path


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


@pytest.mark.integration
class TestFixturesCommand:
    """Test writing the bundled documents."""

    def test_writes_every_document(self, tmp_path, run):
        """Test that each bundled file is written and listed."""
        code, out, _ = run("fixtures", tmp_path / "out")
        assert code == EXIT_OK
        assert sorted(p.name for p in (tmp_path / "out").iterdir()) == sorted(FIXTURES)
        assert len(out.splitlines()) == len(FIXTURES)

    def test_output_is_deterministic(self, tmp_path, run):
        """Test that two runs produce byte-identical files."""
        run("fixtures", tmp_path / "a")
        run("fixtures", tmp_path / "b")
        for name in FIXTURES:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_unwritable_directory(self, tmp_path, run):
        """Test that a file in place of the directory is a domain error."""
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        code, _, err = run("fixtures", blocker)
        assert code == EXIT_DOMAIN
        assert "error: cannot write fixtures" in err


@pytest.mark.integration
class TestValidateCommand:
    """Test the validate command."""

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_bundled_documents_valid(self, fixture_dir, run, name):
        """Test that every bundled complex and matrix document validates."""
        if name == "m5_hints.json":
            pytest.skip("hint documents are not complexes")
        code, out, _ = run("validate", fixture_dir / name)
        assert code == EXIT_OK
        assert out.strip() == "valid"

    def test_invalid_complex(self, tmp_path, run):
        """Test that violations are listed with exit code 1."""
        path = write_json(
            tmp_path / "bad.json",
            {"class_number": 1, "cells": [{"id": "e", "dim": 1, "stabilizer": "Trivial"}]},
        )
        code, out, _ = run("validate", path)
        assert code == EXIT_DOMAIN
        assert out.startswith("invalid: 1 violation(s)")
        assert "edge-incidences [e]" in out

    def test_json_report(self, tmp_path, run):
        """Test the machine-readable validation report."""
        path = write_json(tmp_path / "bad.json", {"d1": [[1]], "d2": [[1]]})
        code, out, _ = run("validate", path, "--json")
        assert code == EXIT_DOMAIN
        assert [v["code"] for v in json.loads(out)["violations"]] == ["composition"]

    def test_missing_file(self, tmp_path, run):
        """Test that an unreadable file is an input error."""
        code, _, err = run("validate", tmp_path / "absent.json")
        assert code == EXIT_INPUT
        assert "error: cannot read" in err

    def test_not_json(self, tmp_path, run):
        """Test that malformed JSON is an input error."""
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        code, _, err = run("validate", path)
        assert code == EXIT_INPUT
        assert "not valid JSON" in err

    def test_schema_violation(self, tmp_path, run):
        """Test that unknown keys are an input error."""
        path = write_json(tmp_path / "odd.json", {"class_number": 1, "faces": []})
        code, _, _ = run("validate", path)
        assert code == EXIT_INPUT


@pytest.mark.integration
class TestHomologyCommand:
    """Test the homology command."""

    def test_m5_tables(self, fixture_dir, run):
        """Test divisors and the E2 page for m = 5."""
        code, out, _ = run("homology", fixture_dir / "m5_matrices.json")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0].split() == ["d1", "(13x13)", "divisors", "(1×7,", "2×1)"]
        assert lines[1].split() == ["d2", "(13x3)", "divisors", "(1×2)"]
        assert lines[2].split() == ["H0", "Z^5", "+", "Z/2"]
        assert lines[3].split() == ["H1", "Z^3"]
        assert lines[4].split() == ["H2", "Z"]

    def test_complex_matches_tables(self, fixture_dir, run):
        """Test that the complex document gives the same JSON as the matrices."""
        _, from_complex, _ = run("homology", fixture_dir / "m5_complex.json", "--json")
        _, from_matrices, _ = run("homology", fixture_dir / "m5_matrices.json", "--json")
        assert json.loads(from_complex) == json.loads(from_matrices)
        assert json.loads(from_complex)["H1"] == "Z^3"

    def test_projective_plane(self, fixture_dir, run):
        """Test Z/2 in degree one."""
        _, out, _ = run("homology", fixture_dir / "rp2_matrices.json", "--json")
        payload = json.loads(out)
        assert (payload["H0"], payload["H1"], payload["H2"]) == ("Z", "Z/2", "0")

    def test_single_point(self, tmp_path, run):
        """Test that one vertex and no edges gives Z, 0, 0."""
        path = write_json(tmp_path / "point.json", {"d1": [[]], "d2": []})
        code, out, _ = run("homology", path, "--json")
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["d1_shape"] == [1, 0]
        assert (payload["H0"], payload["H1"], payload["H2"]) == ("Z", "0", "0")

    def test_zero_loop(self, tmp_path, run):
        """Test that a zero 1x1 d1 with no faces leaves a free loop in degree one."""
        path = write_json(tmp_path / "loop.json", {"d1": [[0]], "d2": []})
        _, out, _ = run("homology", path, "--json")
        payload = json.loads(out)
        assert (payload["H0"], payload["H1"], payload["H2"]) == ("Z", "Z", "0")

    def test_shape_mismatch(self, tmp_path, run):
        """Test that non-composable matrices are an input error."""
        path = write_json(tmp_path / "shapes.json", {"d1": [[1, 0]], "d2": [[0]]})
        code, _, err = run("homology", path)
        assert code == EXIT_INPUT
        assert "d2 has 1 rows" in err


@pytest.mark.integration
class TestPipelineCommand:
    """Test the pipeline command."""

    def test_m5_with_hints(self, fixture_dir, run):
        """Test the final line for m = 5."""
        code, out, _ = run(
            "pipeline", fixture_dir / "m5_matrices.json", "--hints", fixture_dir / "m5_hints.json"
        )
        assert code == EXIT_OK
        assert out.splitlines()[-1] == "RK_0 = Z^6 + Z/2, RK_1 = Z^4"
        assert "ok" in next(line for line in out.splitlines() if line.startswith("Euler check"))

    def test_m5_without_hints(self, fixture_dir, run):
        """Test that missing hints leave the result unpinned and flagged."""
        code, out, _ = run("pipeline", fixture_dir / "m5_complex.json")
        assert code == EXIT_OK
        assert out.splitlines()[-1].endswith("(not pinned)")
        assert "[torsion-ambiguous]" in out

    def test_json_report(self, fixture_dir, run):
        """Test the machine-readable pipeline report."""
        _, out, _ = run(
            "pipeline", fixture_dir / "m5_matrices.json", "--hints", fixture_dir / "m5_hints.json", "--json"
        )
        report = json.loads(out)
        assert report["final"]["k0_candidates"] == ["Z^6 + Z/2"]
        assert report["final"]["k1_candidates"] == ["Z^4"]
        assert report["page"] == {"h0": "Z^5 + Z/2", "h1": "Z^3", "h2": "Z"}

    def test_inconsistent_hints(self, fixture_dir, tmp_path, run):
        """Test that impossible hints are a domain error."""
        hints = write_json(tmp_path / "hints.json", {"arrows": {"2": {"rank": 7}}})
        code, _, err = run("pipeline", fixture_dir / "m5_matrices.json", "--hints", hints)
        assert code == EXIT_DOMAIN
        assert "error: " in err

    def test_matrix_document_needs_class_number(self, tmp_path, run):
        """Test that the pipeline refuses matrices without a class number."""
        path = write_json(tmp_path / "rp2.json", {"d1": [[0]], "d2": [[2]]})
        code, _, err = run("pipeline", path)
        assert code == EXIT_INPUT
        assert "class_number" in err


@pytest.mark.integration
class TestArithmeticCommands:
    """Test classnumber and singular."""

    def test_classnumber(self, run):
        """Test the m = 5 summary."""
        code, out, _ = run("classnumber", 5)
        assert code == EXIT_OK
        assert out.splitlines() == ["h = 2, cusp orbits = 2, singular orbits = 1", "reduced forms: (1, 0, 5), (2, 2, 3)"]

    def test_classnumber_not_squarefree(self, run):
        """Test that a bad m is a domain error."""
        code, _, _ = run("classnumber", 12)
        assert code == EXIT_DOMAIN

    def test_singular_no_witness(self, run):
        """Test that the bounded search never claims singularity."""
        code, out, _ = run("singular", 5, "(1+s)/2", 50)
        assert code == EXIT_OK
        assert out.strip() == "no witness with |c|^2 <= 50: bounded certificate, not a proof of singularity"

    def test_singular_witness(self, run):
        """Test a witness for an integer point."""
        code, out, _ = run("singular", 5, "0", 10)
        assert code == EXIT_OK
        assert out.strip() == "witness c = 1, d = 0, |cD - d|^2 = 0"

    @pytest.mark.parametrize("point", ["1/s", "(1+s", "__import__('os')"])
    def test_singular_parse_error(self, run, point):
        """Test that an unreadable point is an input error, not a crash."""
        code, _, err = run("singular", 5, point)
        assert code == EXIT_INPUT
        assert "error: " in err
        assert "Traceback" not in err

    def test_singular_bound_positive(self):
        """Test that argparse rejects a zero bound."""
        with pytest.raises(SystemExit):
            main(["singular", "5", "0", "0"])
