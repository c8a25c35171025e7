"""Dense linear algebra over F2 with bit-packed rows.

Vectors act on the left of matrices (``v -> v @ A``), so a permutation matrix
sends coordinate ``i`` of ``v`` to coordinate ``perm(i)``. Coordinates are
1-indexed wherever they cross the package boundary (text files, CLI, the
``perm`` argument of :func:`permutation_to_matrix`); internally everything
is 0-indexed.

Packing: column ``j`` of a :class:`BitMatrix` is bit ``j % 64`` of the
little-endian uint64 word ``j // 64``. A :class:`BitVector` is a Python int
with coordinate 1 in bit 0.
"""

from __future__ import annotations

import numpy as np

from . import _backend


class DimensionError(ValueError):
    """Operand shapes do not fit together."""


class SingularMatrixError(ArithmeticError):
    """A matrix that must be invertible is not."""


def _nwords(cols):
    return (cols + 63) // 64


def pack_rows(arr) -> np.ndarray:
    """Pack a 2-D 0/1 array into uint64 words (rows x ceil(cols/64))."""
    arr = np.asarray(arr, dtype=np.uint8)
    if arr.ndim != 2:
        raise DimensionError("expected a 2-D array")
    rows, cols = arr.shape
    width = _nwords(cols) * 64
    padded = np.zeros((rows, width), dtype=np.uint8)
    padded[:, :cols] = arr & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_rows(words, cols) -> np.ndarray:
    """Inverse of :func:`pack_rows`."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    raw = words.view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :cols]


class BitVector:
    """Immutable vector in (F2)^len."""

    __slots__ = ("_len", "_value")

    def __init__(self, length: int, value: int = 0):
        if length < 1:
            raise DimensionError("vector length must be positive")
        if value < 0 or value >> length:
            raise ValueError("value has bits beyond the vector length")
        self._len = int(length)
        self._value = int(value)

    @classmethod
    def from_bits(cls, bits) -> BitVector:
        bits = [int(b) for b in bits]
        if any(b not in (0, 1) for b in bits):
            raise ValueError("coordinates must be 0 or 1")
        value = 0
        for i, b in enumerate(bits):
            value |= b << i
        return cls(len(bits), value)

    @classmethod
    def from_string(cls, text: str) -> BitVector:
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def from_array(cls, arr) -> BitVector:
        arr = np.asarray(arr, dtype=np.uint8).ravel()
        return cls(arr.size, int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little"))

    @classmethod
    def unit(cls, length: int, i: int) -> BitVector:
        """The 1-indexed unit vector e_i."""
        if not 1 <= i <= length:
            raise DimensionError(f"unit index {i} outside 1..{length}")
        return cls(length, 1 << (i - 1))

    @classmethod
    def zero(cls, length: int) -> BitVector:
        return cls(length, 0)

    def __len__(self):
        return self._len

    @property
    def value(self) -> int:
        return self._value

    def __getitem__(self, i):
        """0-indexed coordinate access."""
        if not -self._len <= i < self._len:
            raise IndexError(i)
        return (self._value >> (i % self._len)) & 1

    def bits(self) -> list[int]:
        return [(self._value >> i) & 1 for i in range(self._len)]

    def to_array(self) -> np.ndarray:
        nbytes = (self._len + 7) // 8
        raw = np.frombuffer(self._value.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self._len].copy()

    def weight(self) -> int:
        return self._value.bit_count()

    def support(self) -> list[int]:
        """1-indexed coordinates equal to 1."""
        return [i + 1 for i in range(self._len) if (self._value >> i) & 1]

    def __add__(self, other: BitVector) -> BitVector:
        if not isinstance(other, BitVector):
            return NotImplemented
        if other._len != self._len:
            raise DimensionError("vector lengths differ")
        return BitVector(self._len, self._value ^ other._value)

    __xor__ = __add__

    def __matmul__(self, A):
        if isinstance(A, BitMatrix):
            return mat_vec_mul(self, A)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._len == other._len and self._value == other._value

    def __hash__(self):
        return hash((self._len, self._value))

    def __bool__(self):
        return self._value != 0

    def __str__(self):
        return "".join("1" if (self._value >> i) & 1 else "0" for i in range(self._len))

    def __repr__(self):
        return f"BitVector('{self}')"


class BitMatrix:
    """Immutable rows x cols matrix over F2, rows packed into uint64 words."""

    __slots__ = ("_rows", "_cols", "_words")

    def __init__(self, rows: int, cols: int, words=None):
        if rows < 1 or cols < 1:
            raise DimensionError("matrix dimensions must be positive")
        nw = _nwords(cols)
        if words is None:
            words = np.zeros((rows, nw), dtype=np.uint64)
        else:
            words = np.array(words, dtype=np.uint64, copy=True, order="C")
            if words.shape != (rows, nw):
                raise DimensionError(f"packed shape {words.shape} != {(rows, nw)}")
            tail = cols % 64
            if tail:
                words[:, -1] &= np.uint64((1 << tail) - 1)
        words.setflags(write=False)
        self._rows = int(rows)
        self._cols = int(cols)
        self._words = words

    @classmethod
    def from_array(cls, arr) -> BitMatrix:
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-D array")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        return cls(arr.shape[0], arr.shape[1], pack_rows(arr))

    @classmethod
    def from_rows(cls, rows) -> BitMatrix:
        rows = [list(r) if not isinstance(r, str) else [int(c) for c in r] for r in rows]
        return cls.from_array(np.array(rows, dtype=np.int64))

    @classmethod
    def from_vectors(cls, vectors) -> BitMatrix:
        vectors = list(vectors)
        if not vectors:
            raise DimensionError("need at least one row")
        n = len(vectors[0])
        if any(len(v) != n for v in vectors):
            raise DimensionError("row lengths differ")
        return cls.from_array(np.array([v.to_array() for v in vectors]))

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_array(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols)

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self):
        return (self._rows, self._cols)

    @property
    def words(self) -> np.ndarray:
        """Read-only packed storage."""
        return self._words

    def to_array(self) -> np.ndarray:
        return unpack_rows(self._words, self._cols)

    def row(self, i: int) -> BitVector:
        """0-indexed row."""
        return BitVector(self._cols, int.from_bytes(self._words[i].tobytes(), "little"))

    def row_vectors(self) -> list[BitVector]:
        return [self.row(i) for i in range(self._rows)]

    def __getitem__(self, key):
        i, j = key
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            raise IndexError(key)
        return int((int(self._words[i, j >> 6]) >> (j & 63)) & 1)

    @property
    def T(self) -> BitMatrix:
        return BitMatrix.from_array(self.to_array().T)

    def block(self, r0, r1, c0, c1) -> BitMatrix:
        """Sub-matrix rows r0:r1, cols c0:c1 (0-indexed, half-open)."""
        return BitMatrix.from_array(self.to_array()[r0:r1, c0:c1])

    def is_zero(self) -> bool:
        return not self._words.any()

    def __matmul__(self, other):
        if isinstance(other, BitMatrix):
            return mat_mul(self, other)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        if other.shape != self.shape:
            raise DimensionError("matrix shapes differ")
        return BitMatrix(self._rows, self._cols, self._words ^ other._words)

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._words, other._words)

    def __hash__(self):
        return hash((self._rows, self._cols, self._words.tobytes()))

    def __str__(self):
        return "\n".join("".join(map(str, r)) for r in self.to_array())

    def __repr__(self):
        return f"BitMatrix({self._rows}x{self._cols})"


def mat_vec_mul(v: BitVector, A: BitMatrix) -> BitVector:
    """Row vector times matrix: v @ A."""
    if len(v) != A.rows:
        raise DimensionError(f"vector length {len(v)} != matrix rows {A.rows}")
    idx = [i for i in range(A.rows) if (v.value >> i) & 1]
    if not idx:
        return BitVector.zero(A.cols)
    acc = np.bitwise_xor.reduce(A.words[idx], axis=0)
    return BitVector(A.cols, int.from_bytes(acc.tobytes(), "little"))


def mat_mul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    prod = A.to_array().astype(np.int64) @ B.to_array().astype(np.int64)
    return BitMatrix.from_array(prod & 1)


def rref(A: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form (zero rows at the bottom) and pivot columns."""
    work = np.array(A.words, copy=True, order="C")
    pivots = _backend.rref_inplace(work, A.cols)
    return BitMatrix(A.rows, A.cols, work), list(pivots)


def rank(A: BitMatrix) -> int:
    return len(rref(A)[1])


def _kernel_words(words, ncols):
    """Packed RREF basis of {x : x . row = 0 for every row}; shape (l, nwords)."""
    work = np.array(words, copy=True, order="C")
    pivots = _backend.rref_inplace(work, ncols)
    r = len(pivots)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    nw = _nwords(ncols)
    if not free:
        return np.zeros((0, nw), dtype=np.uint64)
    basis = np.zeros((len(free), ncols), dtype=np.uint8)
    basis[np.arange(len(free)), free] = 1
    if r:
        piv = np.asarray(pivots)
        for k, f in enumerate(free):
            colbits = (work[:r, f >> 6] >> np.uint64(f & 63)) & np.uint64(1)
            basis[k, piv] = colbits.astype(np.uint8)
    kw = pack_rows(basis)
    kpiv = _backend.rref_inplace(kw, ncols)
    assert len(kpiv) == len(free)
    return kw


def solve_homogeneous(A: BitMatrix) -> list[BitVector]:
    """Basis of the solutions of A x = 0 (rows of A are the constraints).

    The basis is the reduced row echelon form of the solution space, so the
    pivot columns ascend and the output is canonical for the subspace.
    """
    kw = _kernel_words(A.words, A.cols)
    return [BitVector(A.cols, int.from_bytes(kw[i].tobytes(), "little")) for i in range(kw.shape[0])]


def invert(A: BitMatrix) -> BitMatrix:
    n = A.rows
    if A.cols != n:
        raise DimensionError("only square matrices can be inverted")
    aug = np.concatenate([A.to_array(), np.eye(n, dtype=np.uint8)], axis=1)
    work = pack_rows(aug)
    pivots = _backend.rref_inplace(work, n)
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix is singular (rank {len(pivots)} < {n})")
    return BitMatrix.from_array(unpack_rows(work, 2 * n)[:, n:])


def permutation_to_matrix(perm) -> BitMatrix:
    """Matrix of the coordinate permutation i -> perm[i-1] (1-indexed images)."""
    perm = [int(p) for p in perm]
    n = len(perm)
    if n < 1 or sorted(perm) != list(range(1, n + 1)):
        raise ValueError("not a permutation of 1..N")
    arr = np.zeros((n, n), dtype=np.uint8)
    arr[np.arange(n), np.asarray(perm) - 1] = 1
    return BitMatrix.from_array(arr)


def matrix_to_permutation(P: BitMatrix) -> list[int]:
    """1-indexed images of a permutation matrix; raises if P is not one."""
    arr = P.to_array()
    if P.rows != P.cols or not (arr.sum(axis=0) == 1).all() or not (arr.sum(axis=1) == 1).all():
        raise ValueError("not a permutation matrix")
    return [int(j) + 1 for j in arr.argmax(axis=1)]


def conjugate(A: BitMatrix, P: BitMatrix) -> BitMatrix:
    """P A P^{-1}."""
    if A.rows != A.cols or P.shape != A.shape:
        raise DimensionError("conjugation needs square matrices of equal size")
    return mat_mul(mat_mul(P, A), invert(P))


def apply_many(X, A: BitMatrix) -> np.ndarray:
    """Batched v @ A for the rows of a 0/1 array X (uint8 result)."""
    X = np.asarray(X, dtype=np.uint8)
    return ((X.astype(np.int32) @ A.to_array().astype(np.int32)) & 1).astype(np.uint8)
