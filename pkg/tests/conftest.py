import sys
from pathlib import Path

import pytest

from liveref.candidates import Config

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))

# Thresholds low enough that the desk-scale fixtures qualify for analysis.
TEST_CONFIG = Config(
    min_method_loc=10,
    min_cyclomatic=3,
    min_cognitive=3,
    min_halstead_effort=20.0,
)


@pytest.fixture
def test_config() -> Config:
    return TEST_CONFIG


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture
def customer_text() -> str:
    return fixture_text("Customer.java")


@pytest.fixture
def orders_text() -> str:
    return fixture_text("Orders.java")


@pytest.fixture
def big_text() -> str:
    return fixture_text("BigService.java")
