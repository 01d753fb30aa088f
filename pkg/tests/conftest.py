import copy
import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles.py importable

from speedroute.model import load_model  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


def toy_doc(name: str) -> dict:
    return json.loads((FIXTURES / f"toy-{name}.json").read_text())


def toy(name: str):
    return load_model(toy_doc(name))


def line_doc(**overrides) -> dict:
    doc = copy.deepcopy(toy_doc("line"))
    doc.update(overrides)
    return doc


@pytest.fixture
def fixtures_dir():
    return FIXTURES
