import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add module directory to path so imports work
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "multicharlier"))

from charlier import CharlierParams, build_table  # noqa: E402


@pytest.fixture
def params_12():
    """r = 2 with sigma = (1, 2), the configuration most worked examples use."""
    return CharlierParams(2, (Fraction(1), Fraction(2)))


@pytest.fixture
def params_default():
    """The CLI default: r = 2, sigma = (1/2, 3/2)."""
    return CharlierParams(2, (Fraction(1, 2), Fraction(3, 2)))


@pytest.fixture
def params_r3():
    return CharlierParams(3, (Fraction(1, 3), Fraction(1), Fraction(5, 2)))


@pytest.fixture
def params_r1():
    return CharlierParams(1, (Fraction(1),))


@pytest.fixture
def table_12(params_12):
    """C_n for sigma = (1, 2), all |n| <= 4."""
    return build_table(params_12, 4)


@pytest.fixture
def table_r3(params_r3):
    return build_table(params_r3, 4)
