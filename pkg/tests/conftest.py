import numpy as np
import pytest

from hiddensums import BitMatrix, BitVector
from hiddensums.hiddensum import HiddenSum

# The N=5, d=2 worked example: B_{e1}, B_{e2}, B_{e3}.
EXAMPLE_BLOCKS = [
    [[0, 0], [1, 1], [1, 1]],
    [[1, 1], [0, 0], [0, 1]],
    [[1, 1], [0, 1], [0, 0]],
]


@pytest.fixture
def example_hs():
    return HiddenSum(np.array(EXAMPLE_BLOCKS, dtype=np.uint8))


def bv(text):
    return BitVector.from_string(text)


def bm(*rows):
    return BitMatrix.from_rows(rows)


def all_vectors(N):
    idx = np.arange(1 << N)
    return ((idx[:, None] >> np.arange(N)) & 1).astype(np.uint8)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
