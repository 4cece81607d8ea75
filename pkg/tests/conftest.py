"""Pytest configuration and fixtures."""

import random

import pytest
from loguru import logger

from src.bianchi_khomology.cli import fixtures
from src.bianchi_khomology.models.algebra import IntMatrix


@pytest.fixture(scope="function")
def rng():
    """Seeded random source so property tests are reproducible."""
    return random.Random(20240517)


@pytest.fixture(scope="session")
def m5_document():
    """The m = 5 matrix document as bundled."""
    return fixtures.m5_matrix_document()


@pytest.fixture(scope="session")
def m5_matrices(m5_document):
    """(d1, d2) for m = 5: 13x13 and 13x3."""
    return m5_document.differentials()


@pytest.fixture(scope="session")
def m5_table1():
    """The printed transpose of d2 for m = 5 (3x13)."""
    return IntMatrix.from_rows(fixtures.m5_matrix_document().d2_transpose)


@pytest.fixture(scope="session")
def m5_complex():
    return fixtures.m5_complex()


@pytest.fixture(scope="session")
def m5_hints():
    return fixtures.m5_hints()


@pytest.fixture(scope="session")
def toy_pruned_edge():
    return fixtures.toy_pruned_edge()


@pytest.fixture(scope="session")
def toy_full_edge():
    return fixtures.toy_full_edge()


@pytest.fixture(scope="session")
def triangle_circle():
    return fixtures.triangle_circle()


@pytest.fixture(scope="function")
def log_messages():
    """Capture loguru records as (level, message) pairs."""
    records: list[tuple[str, str]] = []
    handler_id = logger.add(lambda msg: records.append((msg.record["level"].name, msg.record["message"])), level="DEBUG")
    yield records
    logger.remove(handler_id)
