import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiddensums import BitMatrix, BitVector
from hiddensums.cli import example_path
from hiddensums.formats import (
    FormatError,
    compact_rows,
    dumps_basis,
    dumps_hidden_sum,
    dumps_matrix,
    dumps_vector,
    loads_basis,
    loads_hidden_sum,
    loads_matrix,
    loads_vector,
    read_hidden_sum,
    read_matrix,
    write_matrix,
)
from hiddensums.gf2core import pack_rows
from hiddensums.hiddensum import random_hidden_sum


def test_shipped_example_round_trips():
    text = example_path().read_text()
    assert dumps_hidden_sum(loads_hidden_sum(text)) == text


def test_example_contents(example_hs):
    assert read_hidden_sum(example_path()) == example_hs
    assert compact_rows(example_hs) == [[0, 3, 3], [3, 0, 2], [3, 2, 0]]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 70), st.integers(1, 70), st.integers(0, 2**32))
def test_matrix_round_trip(r, c, seed):
    A = BitMatrix.from_array(np.random.default_rng(seed).integers(0, 2, (r, c)))
    assert loads_matrix(dumps_matrix(A)) == A


def test_matrix_file(tmp_path):
    A = BitMatrix.from_rows(["101", "011"])
    write_matrix(tmp_path / "a.gf2m", A)
    assert read_matrix(tmp_path / "a.gf2m") == A


def test_vector_round_trip():
    v = BitVector.from_string("0110100")
    assert loads_vector(dumps_vector(v)) == v


def test_hidden_sum_round_trip():
    for seed in range(5):
        hs = random_hidden_sum(4, 3, seed)
        assert loads_hidden_sum(dumps_hidden_sum(hs)) == hs


def test_basis_round_trip():
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, (5, 3 * 3 * 2)).astype(np.uint8)
    words = pack_rows(bits)
    text = dumps_basis(words, 18, 3, 2)
    assert text.splitlines()[0] == "kernel 5 3 2"
    back, n, d = loads_basis(text)
    assert (n, d) == (3, 2) and np.array_equal(back, words)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "hiddensum 3\n",
        "hiddensum 2 1\n0\n1\n1\n0\n",
        "hiddensum 2 1\n0\n1\n\n1\n",
        "hiddensum 2 1\n0\n2\n\n1\n0\n",
        "hiddensum 2 1\n0\n1\n\n1\n0\n\n1\n",
    ],
)
def test_malformed_hidden_sum(text):
    with pytest.raises(FormatError):
        loads_hidden_sum(text)


def test_malformed_matrix():
    with pytest.raises(FormatError):
        loads_matrix("gf2matrix 2 2\n10\n1\n")
    with pytest.raises(FormatError):
        loads_matrix("matrix 1 1\n1\n")
