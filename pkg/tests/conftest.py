from pathlib import Path

import pytest

from dtangent.poly import PointedModel

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def model(variables, generators, point=None):
    return PointedModel.from_strings(tuple(variables), generators, point)


@pytest.fixture
def node():
    return model("xy", ["x*y"])


@pytest.fixture
def fat_point():
    return model("xy", ["x^2", "x*y", "y^2"])
