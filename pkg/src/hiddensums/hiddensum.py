"""Practical hidden sums in canonical form.

A hidden sum on V = (F2)^N, N = n + d, whose XOR-invariant subspace contains
e_{n+1}..e_N is fixed by n blocks B_1..B_n (each n x d). Translation by ``a``
is ``x -> x @ kappa(a) + a`` with

    kappa(a) = [[I_n, B_a], [0, I_d]],   B_a = sum_{i<=n} a_i B_i,

so ``x o a = x + a + (0, xbar @ B_a)`` where ``xbar`` is the first n
coordinates of x. All arithmetic here is batched over rows of uint8 arrays;
the BitVector functions are thin wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2core import BitMatrix, BitVector, DimensionError, invert, rank as f2_rank


class EmptyFamilyError(ValueError):
    """No practical hidden sum with full-rank grid exists for these parameters."""


class NotAHiddenSumError(ValueError):
    """Blocks violate the abelian/elementary conditions."""


class HiddenSum:
    """Canonical-form hidden sum given by its n blocks.

    ``blocks`` has shape (n, n, d): ``blocks[i]`` is B_{e_{i+1}}. Only the
    shape is checked on construction; :meth:`validate` reports the algebraic
    conditions.
    """

    __slots__ = ("n", "d", "_blocks", "_bilinear")

    def __init__(self, blocks):
        arr = np.asarray(blocks)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"blocks must have shape (n, n, d), got {arr.shape}")
        n, _, d = arr.shape
        if n < 2 or d < 1:
            raise DimensionError("need n >= 2 and d >= 1")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("block entries must be 0 or 1")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        self.n = int(n)
        self.d = int(d)
        self._blocks = arr
        # bilinear[r, i*d + k] = bit k of row r of B_i: xbar @ bilinear gives
        # the rows of every B_i selected by xbar, side by side.
        self._bilinear = np.ascontiguousarray(arr.transpose(1, 0, 2).reshape(n, n * d)).astype(np.int32)

    @property
    def N(self) -> int:
        return self.n + self.d

    @property
    def blocks(self) -> np.ndarray:
        return self._blocks

    def block(self, i: int) -> BitMatrix:
        """B_{e_i} for 1-indexed i (zero for i > n)."""
        if not 1 <= i <= self.N:
            raise DimensionError(f"block index {i} outside 1..{self.N}")
        if i > self.n:
            return BitMatrix.zeros(self.n, self.d)
        return BitMatrix.from_array(self._blocks[i - 1])

    @classmethod
    def from_grid(cls, grid, d: int) -> HiddenSum:
        """Build from an n x n grid of d-bit words (bit k = coefficient of alpha^k).

        ``grid[i][j]`` becomes row j of B_{e_i}.
        """
        grid = np.asarray(grid, dtype=np.int64)
        n = grid.shape[0]
        bits = (grid[:, :, None] >> np.arange(d)) & 1
        return cls(bits.astype(np.uint8))

    @classmethod
    def zero(cls, n: int, d: int) -> HiddenSum:
        return cls(np.zeros((n, n, d), dtype=np.uint8))

    def __eq__(self, other):
        if not isinstance(other, HiddenSum):
            return NotImplemented
        return self._blocks.shape == other._blocks.shape and np.array_equal(self._blocks, other._blocks)

    def __hash__(self):
        return hash((self._blocks.shape, self._blocks.tobytes()))

    def __repr__(self):
        return f"HiddenSum(n={self.n}, d={self.d})"

    # batched arithmetic -------------------------------------------------

    def correction_many(self, X, A) -> np.ndarray:
        """xbar @ B_a for every row pair, shape (m, d)."""
        n, d = self.n, self.d
        sel = (X[:, :n].astype(np.int32) @ self._bilinear).reshape(-1, n, d)
        return ((sel * A[:, :n, None].astype(np.int32)).sum(axis=1) & 1).astype(np.uint8)

    def add_many(self, X, A) -> np.ndarray:
        """Row-wise x o a for 0/1 arrays of shape (m, N)."""
        X = np.asarray(X, dtype=np.uint8)
        A = np.asarray(A, dtype=np.uint8)
        if X.shape != A.shape or X.ndim != 2 or X.shape[1] != self.N:
            raise DimensionError(f"expected two (m, {self.N}) arrays")
        out = X ^ A
        out[:, self.n :] ^= self.correction_many(X, A)
        return out

    def translate_many(self, X, i: int) -> np.ndarray:
        """x o e_i for every row (1-indexed i)."""
        X = np.asarray(X, dtype=np.uint8)
        out = X.copy()
        out[:, i - 1] ^= 1
        if i <= self.n:
            out[:, self.n :] ^= (X[:, : self.n].astype(np.int32) @ self._blocks[i - 1].astype(np.int32) & 1).astype(
                np.uint8
            )
        return out

    def decompose_many(self, X) -> np.ndarray:
        """Coordinates of every row in the o-basis e_1..e_N."""
        X = np.asarray(X, dtype=np.uint8)
        if X.ndim != 2 or X.shape[1] != self.N:
            raise DimensionError(f"expected an (m, {self.N}) array")
        alpha = np.zeros_like(X)
        alpha[:, : self.n] = X[:, : self.n]
        cur = X.copy()
        for i in range(1, self.n + 1):
            hit = cur[:, i - 1] == 1
            if hit.any():
                cur[hit] = self.translate_many(cur[hit], i)
        alpha[:, self.n :] = cur[:, self.n :]
        return alpha

    def recompose_many(self, C) -> np.ndarray:
        """o-fold of e_i over the 1-coefficients, ascending index."""
        C = np.asarray(C, dtype=np.uint8)
        if C.ndim != 2 or C.shape[1] != self.N:
            raise DimensionError(f"expected an (m, {self.N}) array")
        acc = np.zeros_like(C)
        for i in range(1, self.N + 1):
            hit = C[:, i - 1] == 1
            if hit.any():
                acc[hit] = self.translate_many(acc[hit], i)
        return acc


def _as_row(hs, v):
    if len(v) != hs.N:
        raise DimensionError(f"vector length {len(v)} != N = {hs.N}")
    return v.to_array()[None, :]


def kappa(hs: HiddenSum, y: BitVector) -> BitMatrix:
    """Linear part [[I_n, B_y], [0, I_d]] of translation by y."""
    yb = _as_row(hs, y)[0]
    B_y = (np.tensordot(yb[: hs.n].astype(np.int32), hs.blocks.astype(np.int32), axes=1) & 1).astype(np.uint8)
    out = np.eye(hs.N, dtype=np.uint8)
    out[: hs.n, hs.n :] = B_y
    return BitMatrix.from_array(out)


def circ_add(hs: HiddenSum, x: BitVector, a: BitVector) -> BitVector:
    return BitVector.from_array(hs.add_many(_as_row(hs, x), _as_row(hs, a))[0])


def blocks_matrix(hs: HiddenSum) -> BitMatrix:
    """n x nd matrix whose row i is B_{e_i} flattened row-major."""
    return BitMatrix.from_array(hs.blocks.reshape(hs.n, hs.n * hs.d))


@dataclass(frozen=True)
class ValidationReport:
    n: int
    d: int
    symmetric: bool
    zero_diagonal: bool
    nonzero: bool
    rank: int
    dim_U: int
    is_practical_hidden_sum: bool
    exact_dim_U: bool

    def lines(self):
        yes = {True: "yes", False: "no"}
        return [
            f"n={self.n} d={self.d}",
            f"symmetric (abelian): {yes[self.symmetric]}",
            f"zero diagonal (elementary): {yes[self.zero_diagonal]}",
            f"nonzero blocks: {yes[self.nonzero]}",
            f"rank over F2: {self.rank}",
            f"dim U: {self.dim_U}",
            f"practical hidden sum: {yes[self.is_practical_hidden_sum]}",
            f"dim U exactly d: {yes[self.exact_dim_U]}",
        ]


def is_symmetric(hs: HiddenSum) -> bool:
    # row i of B_j equals row j of B_i
    return bool(np.array_equal(hs.blocks, hs.blocks.transpose(1, 0, 2)))


def is_zero_diagonal(hs: HiddenSum) -> bool:
    idx = np.arange(hs.n)
    return not hs.blocks[idx, idx].any()


def validate(hs: HiddenSum) -> ValidationReport:
    sym = is_symmetric(hs)
    zd = is_zero_diagonal(hs)
    nonzero = bool(hs.blocks.any())
    r = f2_rank(blocks_matrix(hs))
    return ValidationReport(
        n=hs.n,
        d=hs.d,
        symmetric=sym,
        zero_diagonal=zd,
        nonzero=nonzero,
        rank=r,
        dim_U=hs.d + hs.n - r,
        is_practical_hidden_sum=sym and zd and nonzero,
        exact_dim_U=r == hs.n,
    )


def _require_group(hs):
    if not (is_symmetric(hs) and is_zero_diagonal(hs)):
        raise NotAHiddenSumError("blocks are not symmetric with zero diagonal; not an elementary abelian group")


@dataclass(frozen=True)
class BFrak:
    """n x n grid of d-bit words; cell (i, j) is row j of B_{e_i}."""

    n: int
    d: int
    grid: tuple

    def to_array(self) -> np.ndarray:
        return np.array(self.grid, dtype=np.int64)

    def is_symmetric(self) -> bool:
        a = self.to_array()
        return bool((a == a.T).all())

    def is_zero_diagonal(self) -> bool:
        return not np.diag(self.to_array()).any()

    def to_hidden_sum(self) -> HiddenSum:
        return HiddenSum.from_grid(self.to_array(), self.d)


def bfrak(hs: HiddenSum) -> BFrak:
    weights = 1 << np.arange(hs.d, dtype=np.int64)
    grid = (hs.blocks.astype(np.int64) * weights).sum(axis=2)
    return BFrak(hs.n, hs.d, tuple(tuple(int(c) for c in row) for row in grid))


def dim_U(hs: HiddenSum) -> int:
    return hs.d + hs.n - f2_rank(blocks_matrix(hs))


def u_basis(hs: HiddenSum) -> list[BitVector]:
    """Basis of U = {u : x o u = x + u for all x}, i.e. B_u = 0."""
    from .gf2core import solve_homogeneous

    flat = blocks_matrix(hs)
    # B_u = sum u_i B_i = 0  <=>  ubar is orthogonal to every column of flat
    head = solve_homogeneous(flat.T)
    out = [BitVector(hs.N, v.value) for v in head]
    out += [BitVector.unit(hs.N, hs.n + k) for k in range(1, hs.d + 1)]
    return out


def decompose(hs: HiddenSum, v: BitVector) -> BitVector:
    """Coefficients alpha with alpha_1 e_1 o ... o alpha_N e_N = v."""
    _require_group(hs)
    return BitVector.from_array(hs.decompose_many(_as_row(hs, v))[0])


def recompose(hs: HiddenSum, c: BitVector) -> BitVector:
    return BitVector.from_array(hs.recompose_many(_as_row(hs, c))[0])


def canonicalizing_map(u_basis, N: int) -> BitMatrix:
    """Invertible g with u_basis[k] @ g = e_{n+k+1}, n = N - len(u_basis).

    The complement is filled greedily with e_1, e_2, ... skipping vectors
    already in the span; g is the inverse of the matrix whose rows are the
    complement followed by ``u_basis``. Already-canonical input gives I_N.
    """
    vecs = list(u_basis)
    d = len(vecs)
    if d < 1 or d > N - 1:
        raise DimensionError(f"need 1 <= d <= N-1 basis vectors, got {d}")
    if any(len(v) != N for v in vecs):
        raise DimensionError("basis vectors must have length N")
    U = BitMatrix.from_vectors(vecs)
    if f2_rank(U) < d:
        raise ValueError("basis vectors are linearly dependent")
    chosen = []
    current = vecs[:]
    cur_rank = d
    for i in range(1, N + 1):
        if len(chosen) == N - d:
            break
        e = BitVector.unit(N, i)
        trial = BitMatrix.from_vectors(current + [e])
        r = f2_rank(trial)
        if r > cur_rank:
            chosen.append(e)
            current.append(e)
            cur_rank = r
    H = BitMatrix.from_vectors(chosen + vecs)
    return invert(H)


def random_hidden_sum(n: int, d: int, seed: int, max_tries: int = 100000) -> HiddenSum:
    """Uniform random full-rank canonical hidden sum (rejection sampling)."""
    if n < 2 or d < 1:
        raise DimensionError("need n >= 2 and d >= 1")
    if d == 1 and n % 2 == 1:
        raise EmptyFamilyError(f"no practical hidden sum with dim U = d exists for n={n}, d={d}")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    for _ in range(max_tries):
        grid = np.zeros((n, n), dtype=np.int64)
        grid[iu] = rng.integers(0, 1 << d, size=len(iu[0]))
        grid = grid + grid.T
        hs = HiddenSum.from_grid(grid, d)
        if f2_rank(blocks_matrix(hs)) == n:
            return hs
    raise EmptyFamilyError(f"no full-rank sample after {max_tries} tries for n={n}, d={d}")


class ConjugatedSum:
    """The operation x o' y = ((x P^{-1}) o (y P^{-1})) P carried by a conjugator P.

    If ``hs`` linearizes P lambda P^{-1}, this operation linearizes lambda.
    """

    def __init__(self, hs: HiddenSum, P: BitMatrix):
        if P.shape != (hs.N, hs.N):
            raise DimensionError("conjugator size must be N")
        self.hs = hs
        self.P = P
        self._P = P.to_array().astype(np.int32)
        self._Pinv = invert(P).to_array().astype(np.int32)

    def add_many(self, X, Y) -> np.ndarray:
        Xi = (np.asarray(X, dtype=np.int32) @ self._Pinv & 1).astype(np.uint8)
        Yi = (np.asarray(Y, dtype=np.int32) @ self._Pinv & 1).astype(np.uint8)
        return (self.hs.add_many(Xi, Yi).astype(np.int32) @ self._P & 1).astype(np.uint8)

    def circ_add(self, x: BitVector, y: BitVector) -> BitVector:
        return BitVector.from_array(self.add_many(x.to_array()[None, :], y.to_array()[None, :])[0])
