import io
import subprocess
import sys

import numpy as np

from hiddensums import BitMatrix
from hiddensums.cli import run
from hiddensums.formats import write_hidden_sum, write_matrix
from hiddensums.gf2core import permutation_to_matrix
from hiddensums.hiddensum import HiddenSum


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stream=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_census_exact():
    code, out, _ = call("census", "--n", "3", "--d", "2", "--exact")
    assert code == 0
    row = out.splitlines()[1].split()
    assert row[:3] == ["3", "2", "42"] and row[5] == "brute-force"


def test_census_closed_form_and_bounds():
    code, out, _ = call("census", "--n", "2..4", "--d", "2", "--output", "records")
    assert code == 0
    recs = [dict(kv.split("=") for kv in line.split()) for line in out.splitlines()]
    assert [r["method"] for r in recs] == ["closed-form", "closed-form", "bounds-only"]
    assert recs[2]["exact"] == "-" and recs[2]["mu"] == "3969" and recs[2]["nu"] == "3024"


def test_census_ratio():
    code, out, _ = call("census", "--n", "4", "--d", "2", "--ratio")
    assert code == 0 and "pass" in out


def test_census_total():
    code, out, _ = call("census", "--total", "6")
    assert code == 0 and "total 2841615" in out and "2^23" in out


def test_census_budget_exceeded():
    code, _, err = call("census", "--n", "6", "--d", "2", "--exact", "--budget", "1000")
    assert code == 1 and "budget" in err


def test_validate_example():
    code, out, _ = call("validate", "example")
    assert code == 0
    assert "rank over F2: 3" in out and "dim U: 2" in out and "practical hidden sum: yes" in out


def test_add_and_decompose():
    assert call("add", "example", "10000", "01000")[1].strip() == "11011"
    assert call("decompose", "example", "11011")[1].strip() == "11000"


def test_malformed_vector():
    code, _, err = call("add", "example", "1000", "01000")
    assert code == 2 and "length" in err
    code, _, _ = call("add", "example", "10a00", "01000")
    assert code == 2


def test_missing_file(tmp_path):
    code, _, _ = call("validate", str(tmp_path / "nope.hsum"))
    assert code == 2


def test_decompose_non_group(tmp_path):
    blocks = np.zeros((2, 2, 1), dtype=np.uint8)
    blocks[0, 1, 0] = 1
    path = tmp_path / "bad.hsum"
    write_hidden_sum(path, HiddenSum(blocks))
    code, _, err = call("decompose", str(path), "110")
    assert code == 1 and "abelian" in err


def test_linearize_identity(tmp_path):
    lam = tmp_path / "id.gf2m"
    write_matrix(lam, BitMatrix.identity(5))
    basis = tmp_path / "basis.txt"
    code, out, _ = call(
        "linearize", "--lambda", str(lam), "--pi", str(lam), "--n", "3", "--d", "2",
        "--sample", "2", "--full-rank-only", "--emit-basis", str(basis),
    )
    assert code == 0 and "kernel dimension: 6" in out and "seed: 0" in out
    assert basis.read_text().splitlines()[0] == "kernel 6 3 2"


def test_linearize_not_block_triangular(tmp_path):
    lam = tmp_path / "swap.gf2m"
    write_matrix(lam, permutation_to_matrix([1, 2, 5, 4, 3]))
    pi = tmp_path / "id.gf2m"
    write_matrix(pi, BitMatrix.identity(5))
    code, _, err = call("linearize", "--lambda", str(lam), "--pi", str(pi), "--n", "3", "--d", "2")
    assert code == 1 and "not block-triangular" in err


def test_proper(tmp_path):
    lam = tmp_path / "id.gf2m"
    write_matrix(lam, BitMatrix.identity(6))
    code, out, _ = call("proper", "--lambda", str(lam), "--bricks", "3", "--brick-size", "2")
    assert code == 0 and "not proper" in out and "{1}" in out


def test_present_emit(tmp_path):
    code, _, _ = call("present", "--emit-lambda", str(tmp_path / "l.gf2m"), "--emit-pi", str(tmp_path / "p.gf2m"))
    assert code == 0
    code, out, _ = call("proper", "--lambda", str(tmp_path / "l.gf2m"), "--bricks", "16", "--brick-size", "4")
    assert "proper (65534 walls checked)" in out


def test_present_repro():
    code, out, _ = call("present", "--repro")
    assert code == 0
    assert "kernel dimension: 2360" in out
    assert "lower-left zero: True, Lambda3 = I4: True" in out
    assert "fixed coordinates of lambda_P: [1, 22, 43, 64]" in out


def test_records_are_reproducible():
    a = call("attack-demo", "--n", "4", "--d", "2", "--seed", "5", "--exhaustive", "--output", "records")
    b = call("attack-demo", "--n", "4", "--d", "2", "--seed", "5", "--exhaustive", "--output", "records")
    assert a == b and a[0] == 0
    assert "queries=7" in a[1] and "agreed=64" in a[1] and "seed=5" in a[1]


def test_attack_empty_family():
    code, _, err = call("attack-demo", "--n", "3", "--d", "1")
    assert code == 1 and "no practical hidden sum" in err


def test_bad_subcommand():
    assert call("frobnicate")[0] == 2


def test_console_script():
    res = subprocess.run(
        [sys.executable, "-m", "hiddensums.cli", "decompose", "example", "11011"],
        capture_output=True, text=True, check=True,
    )
    assert res.stdout.strip() == "11000"
