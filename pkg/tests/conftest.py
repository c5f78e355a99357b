from pathlib import Path

import pytest

from ccsp.dsl import parse_model

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def load(name: str):
    return parse_model((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def fixtures_dir():
    return FIXTURES
