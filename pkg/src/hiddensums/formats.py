"""Text formats: ``.gf2m`` matrices, ``.hsum`` hidden sums, kernel basis files.

Every reader raises :class:`FormatError` on malformed input; writers emit
exactly what the readers accept, so files round-trip byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .gf2core import BitMatrix, BitVector
from .hiddensum import HiddenSum


class FormatError(ValueError):
    """Malformed input text."""


def _bits_line(line, width, what):
    if len(line) != width or set(line) - {"0", "1"}:
        raise FormatError(f"{what}: expected {width} characters from {{0,1}}, got {line!r}")
    return [1 if c == "1" else 0 for c in line]


def _header(line, keyword, nfields):
    parts = line.split()
    if len(parts) != nfields + 1 or parts[0] != keyword:
        raise FormatError(f"expected header '{keyword}' with {nfields} integers, got {line!r}")
    try:
        vals = [int(p) for p in parts[1:]]
    except ValueError as exc:
        raise FormatError(f"non-integer in header {line!r}") from exc
    return vals


# .gf2m --------------------------------------------------------------------


def dumps_matrix(A: BitMatrix) -> str:
    return f"gf2matrix {A.rows} {A.cols}\n{A}\n"


def loads_matrix(text: str) -> BitMatrix:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty matrix file")
    rows, cols = _header(lines[0], "gf2matrix", 2)
    if rows < 1 or cols < 1:
        raise FormatError("matrix dimensions must be positive")
    body = [ln for ln in lines[1:]]
    while body and body[-1] == "":
        body.pop()
    if len(body) != rows:
        raise FormatError(f"expected {rows} rows, found {len(body)}")
    return BitMatrix.from_array(np.array([_bits_line(ln, cols, f"row {k + 1}") for k, ln in enumerate(body)]))


def read_matrix(path) -> BitMatrix:
    return loads_matrix(Path(path).read_text())


def write_matrix(path, A: BitMatrix) -> None:
    Path(path).write_text(dumps_matrix(A))


def dumps_vector(v: BitVector) -> str:
    return f"gf2matrix 1 {len(v)}\n{v}\n"


def loads_vector(text: str) -> BitVector:
    A = loads_matrix(text)
    if A.rows != 1:
        raise FormatError("a vector file must hold a 1 x N matrix")
    return A.row(0)


# .hsum --------------------------------------------------------------------


def dumps_hidden_sum(hs: HiddenSum) -> str:
    parts = [f"hiddensum {hs.n} {hs.d}"]
    for i in range(hs.n):
        if i:
            parts.append("")
        parts.extend("".join(str(int(b)) for b in row) for row in hs.blocks[i])
    return "\n".join(parts) + "\n"


def loads_hidden_sum(text: str) -> HiddenSum:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty hidden-sum file")
    n, d = _header(lines[0], "hiddensum", 2)
    if n < 2 or d < 1:
        raise FormatError("need n >= 2 and d >= 1")
    body = lines[1:]
    while body and body[-1] == "":
        body.pop()
    blocks = []
    pos = 0
    for i in range(n):
        if i:
            if pos >= len(body) or body[pos] != "":
                raise FormatError(f"expected a blank line before block {i + 1}")
            pos += 1
        rows = body[pos : pos + n]
        if len(rows) != n:
            raise FormatError(f"block {i + 1}: expected {n} rows")
        blocks.append([_bits_line(r, d, f"block {i + 1}") for r in rows])
        pos += n
    if pos != len(body):
        raise FormatError("trailing content after the last block")
    return HiddenSum(np.array(blocks, dtype=np.uint8))


def read_hidden_sum(path) -> HiddenSum:
    return loads_hidden_sum(Path(path).read_text())


def write_hidden_sum(path, hs: HiddenSum) -> None:
    Path(path).write_text(dumps_hidden_sum(hs))


def compact_rows(hs: HiddenSum) -> list[list[int]]:
    """Each row of each B_{e_i} as an integer in [0, 2^d - 1].

    Bit k of the integer is column k+1 of the row (the alpha^k coefficient),
    the same encoding as :func:`hiddensum.bfrak`. Line i lists B_{e_i}.
    """
    weights = 1 << np.arange(hs.d, dtype=np.int64)
    return [[int(x) for x in row] for row in (hs.blocks.astype(np.int64) * weights).sum(axis=2)]


def dumps_compact(hs: HiddenSum) -> str:
    return "\n".join(" ".join(str(x) for x in row) for row in compact_rows(hs)) + "\n"


# kernel basis -------------------------------------------------------------


def dumps_basis(words, nvars: int, n: int, d: int) -> str:
    from .gf2core import unpack_rows

    words = np.asarray(words, dtype=np.uint64)
    l = words.shape[0]
    lines = [f"kernel {l} {n} {d}"]
    if l:
        bits = unpack_rows(words, nvars)
        lines.extend("".join("1" if b else "0" for b in row) for row in bits)
    return "\n".join(lines) + "\n"


def loads_basis(text: str):
    """Returns (packed words, n, d)."""
    from .gf2core import pack_rows

    lines = text.splitlines()
    if not lines:
        raise FormatError("empty basis file")
    l, n, d = _header(lines[0], "kernel", 3)
    nvars = n * n * d
    body = lines[1:]
    while body and body[-1] == "":
        body.pop()
    if len(body) != l:
        raise FormatError(f"expected {l} basis rows, found {len(body)}")
    if l == 0:
        return np.zeros((0, (nvars + 63) // 64), dtype=np.uint64), n, d
    bits = np.array([_bits_line(r, nvars, f"basis row {k + 1}") for k, r in enumerate(body)], dtype=np.uint8)
    return pack_rows(bits), n, d
