import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slpcase.casefile import parse_case
from slpcase.config import FIXTURE_MODEL, build_pipeline

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture_case(name: str):
    return parse_case(json.loads((FIXTURES / f"{name}.json").read_text()))


@pytest.fixture
def aurora():
    return load_fixture_case("aurora")


@pytest.fixture
def sofia():
    return load_fixture_case("sofia")


@pytest.fixture(scope="session")
def pipeline():
    return build_pipeline()


@pytest.fixture
def fixture_model():
    return FIXTURE_MODEL
