"""Find every canonical hidden sum that makes a block-triangular map linear.

For lambda = [[L1, L2], [0, L3]] (row-vector action) a canonical hidden sum
with blocks B_1..B_n linearizes lambda iff

    B_i L3 + L1 (sum_j L1[i, j] B_j) = 0          for every i,

together with the structural constraints row i of B_i = 0 and
row i of B_j = row j of B_i. L2 never enters. The unknowns are the n*n*d
entries of the blocks, variable (i, r, c) = entry (r, c) of B_{e_i} at
index ``i*n*d + r*d + c``; the solutions form a linear space, returned as a
reduced echelon basis.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .gf2core import (
    BitMatrix,
    BitVector,
    DimensionError,
    SingularMatrixError,
    _kernel_words,
    conjugate,
    invert,
    pack_rows,
    rank,
    unpack_rows,
)
from .hiddensum import HiddenSum

ENUMERATION_LIMIT = 24


class NotBlockTriangularError(ValueError):
    """The conjugated map does not leave span(e_{n+1..N}) invariant."""


class NotInKernelError(ValueError):
    """A point does not satisfy the linear system."""


class SamplingExhaustedError(RuntimeError):
    """Rejection sampling hit its retry cap."""


@dataclass(frozen=True)
class BlockLinearMap:
    lambda1: BitMatrix
    lambda2: BitMatrix
    lambda3: BitMatrix

    def __post_init__(self):
        n, d = self.lambda1.rows, self.lambda3.rows
        if self.lambda1.shape != (n, n) or self.lambda3.shape != (d, d) or self.lambda2.shape != (n, d):
            raise DimensionError("blocks must be n x n, n x d and d x d")
        if n < 2 or d < 1:
            raise DimensionError("need n >= 2 and d >= 1")
        for name, blk in (("lambda1", self.lambda1), ("lambda3", self.lambda3)):
            if rank(blk) < blk.rows:
                raise SingularMatrixError(f"{name} is singular")

    @property
    def n(self) -> int:
        return self.lambda1.rows

    @property
    def d(self) -> int:
        return self.lambda3.rows

    def matrix(self) -> BitMatrix:
        n, d = self.n, self.d
        full = np.zeros((n + d, n + d), dtype=np.uint8)
        full[:n, :n] = self.lambda1.to_array()
        full[:n, n:] = self.lambda2.to_array()
        full[n:, n:] = self.lambda3.to_array()
        return BitMatrix.from_array(full)

    @classmethod
    def from_matrix(cls, lam: BitMatrix, n: int, d: int) -> BlockLinearMap:
        if lam.shape != (n + d, n + d):
            raise DimensionError(f"expected a {n + d} x {n + d} matrix")
        arr = lam.to_array()
        low = arr[n:, :n]
        if low.any():
            bad = int(np.flatnonzero(low.any(axis=1))[0]) + n + 1
            raise NotBlockTriangularError(
                f"not block-triangular under this conjugator: row {bad} has support in the first {n} coordinates"
            )
        return cls(
            BitMatrix.from_array(arr[:n, :n]),
            BitMatrix.from_array(arr[:n, n:]),
            BitMatrix.from_array(arr[n:, n:]),
        )


@dataclass(frozen=True)
class LinearSystem:
    n: int
    d: int
    words: np.ndarray = field(repr=False)

    @property
    def nvars(self) -> int:
        return self.n * self.n * self.d

    @property
    def nrows(self) -> int:
        return self.words.shape[0]

    def to_matrix(self) -> BitMatrix:
        return BitMatrix(self.nrows, self.nvars, self.words)

    def residual(self, point_words) -> np.ndarray:
        """Parity of every constraint row against a packed point."""
        return (np.bitwise_count(self.words & point_words[None, :]).sum(axis=1) & 1).astype(np.uint8)


def var_index(n: int, d: int, i: int, r: int, c: int) -> int:
    """0-based variable index of entry (r, c) of B_{e_{i+1}}."""
    return i * n * d + r * d + c


def build_system(lam: BlockLinearMap) -> LinearSystem:
    n, d = lam.n, lam.d
    L1 = lam.lambda1.to_array().astype(np.uint8)
    L3 = lam.lambda3.to_array().astype(np.uint8)
    nvars = n * n * d
    nw = (nvars + 63) // 64
    nd = n * d
    # rows (r, c) x cols (j, s, c'): L1[i, j] * L1[r, s] * [c == c']
    K = np.kron(L1, np.eye(d, dtype=np.uint8))
    own = np.kron(np.eye(n, dtype=np.uint8), L3.T)
    eq1 = np.empty((n * nd, nw), dtype=np.uint64)
    for i in range(n):
        blk = np.kron(L1[i : i + 1, :], K)
        blk[:, i * nd : (i + 1) * nd] ^= own
        eq1[i * nd : (i + 1) * nd] = pack_rows(blk & 1)

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    n3 = n * d
    n4 = len(pairs) * d
    extra = np.zeros((n3 + n4, nw), dtype=np.uint64)
    row_ids = []
    var_ids = []
    for i in range(n):
        for c in range(d):
            row_ids.append(i * d + c)
            var_ids.append(var_index(n, d, i, i, c))
    for p, (i, j) in enumerate(pairs):
        for c in range(d):
            r = n3 + p * d + c
            row_ids += [r, r]
            var_ids += [var_index(n, d, j, i, c), var_index(n, d, i, j, c)]
    row_ids = np.asarray(row_ids, dtype=np.int64)
    var_ids = np.asarray(var_ids, dtype=np.int64)
    bits = np.left_shift(np.uint64(1), (var_ids & 63).astype(np.uint64))
    np.bitwise_xor.at(extra, (row_ids, var_ids >> 6), bits)
    return LinearSystem(n, d, np.ascontiguousarray(np.concatenate([eq1, extra])))


@dataclass(frozen=True)
class SolutionBasis:
    n: int
    d: int
    words: np.ndarray = field(repr=False)
    system: LinearSystem | None = field(default=None, repr=False)
    pi: BitMatrix | None = field(default=None, repr=False)
    block: BlockLinearMap | None = field(default=None, repr=False)
    seconds: float = 0.0

    @property
    def dimension(self) -> int:
        return self.words.shape[0]

    @property
    def nvars(self) -> int:
        return self.n * self.n * self.d

    def vectors(self) -> list[BitVector]:
        return [BitVector(self.nvars, int.from_bytes(w.tobytes(), "little")) for w in self.words]

    def point(self, coeffs) -> np.ndarray:
        """Packed F2-combination of basis vectors."""
        coeffs = np.asarray(coeffs, dtype=bool)
        if coeffs.shape != (self.dimension,):
            raise DimensionError(f"need {self.dimension} coefficients")
        if not coeffs.any():
            return np.zeros(self.words.shape[1], dtype=np.uint64)
        return np.bitwise_xor.reduce(self.words[coeffs], axis=0)


def solve(sys: LinearSystem) -> SolutionBasis:
    return SolutionBasis(sys.n, sys.d, _kernel_words(sys.words, sys.nvars), system=sys)


def _blocks_from_words(words, n, d):
    bits = unpack_rows(np.asarray(words, dtype=np.uint64)[None, :], n * n * d)[0]
    return bits.reshape(n, n, d)


def decode(basis: SolutionBasis, point) -> HiddenSum:
    """HiddenSum whose blocks are read off a kernel point (BitVector or packed words)."""
    if isinstance(point, BitVector):
        if len(point) != basis.nvars:
            raise DimensionError(f"point length {len(point)} != {basis.nvars}")
        words = pack_rows(point.to_array()[None, :])[0]
    else:
        words = np.asarray(point, dtype=np.uint64)
    if basis.system is not None:
        if basis.system.residual(words).any():
            raise NotInKernelError("point does not satisfy the linear system")
    elif not _in_span(basis.words, words, basis.nvars):
        raise NotInKernelError("point is not in the span of the basis")
    return HiddenSum(_blocks_from_words(words, basis.n, basis.d))


def _in_span(basis_words, words, nvars):
    stacked = np.concatenate([basis_words, words[None, :]])
    work = np.array(stacked, copy=True, order="C")
    from . import _backend

    return len(_backend.rref_inplace(work, nvars)) == basis_words.shape[0]


def _full_rank_many(points, n, d):
    """For packed kernel points (m, nwords): is the n x nd blocks matrix full rank?"""
    bits = unpack_rows(points, n * n * d).reshape(-1, n, n * d)
    out = np.empty(bits.shape[0], dtype=bool)
    for k in range(bits.shape[0]):
        work = pack_rows(bits[k])
        from . import _backend

        out[k] = len(_backend.rref_inplace(work, n * d)) == n
    return out


def sample_solutions(basis: SolutionBasis, count: int, seed: int, full_rank_only: bool = False) -> list[HiddenSum]:
    """Uniform random kernel points, decoded; optionally only rank-n grids."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    cap = 1000 * count
    out = []
    tries = 0
    while len(out) < count:
        if tries >= cap:
            raise SamplingExhaustedError(
                f"only {len(out)} of {count} full-rank samples after {tries} draws "
                f"(observed acceptance rate {len(out) / tries:.4g})"
            )
        tries += 1
        coeffs = rng.integers(0, 2, size=basis.dimension).astype(bool) if basis.dimension else np.zeros(0, bool)
        words = basis.point(coeffs)
        if full_rank_only and not _full_rank_many(words[None, :], basis.n, basis.d)[0]:
            continue
        out.append(HiddenSum(_blocks_from_words(words, basis.n, basis.d)))
    return out


def _all_points(basis):
    l = basis.dimension
    if l > ENUMERATION_LIMIT:
        raise ValueError(f"kernel dimension {l} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    if l == 0:
        return np.zeros((1, basis.words.shape[1]), dtype=np.uint64)
    idx = np.arange(1 << l, dtype=np.int64)
    coeffs = ((idx[:, None] >> np.arange(l)) & 1).astype(np.int32)
    bits = (coeffs @ unpack_rows(basis.words, basis.nvars).astype(np.int32)) & 1
    return pack_rows(bits.astype(np.uint8))


def enumerate_solutions(basis: SolutionBasis) -> list[HiddenSum]:
    """Every kernel point as a HiddenSum (only for dimension <= 24)."""
    pts = _all_points(basis)
    return [HiddenSum(_blocks_from_words(w, basis.n, basis.d)) for w in pts]


def count_full_rank_solutions(basis: SolutionBasis) -> int:
    pts = _all_points(basis)
    return int(_full_rank_many(pts, basis.n, basis.d).sum())


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class FullRankEstimate:
    exact: bool
    full_rank: int
    total: int
    low: float
    high: float

    @property
    def fraction(self) -> float:
        return self.full_rank / self.total


def full_rank_fraction(basis: SolutionBasis, samples: int = 1000, seed: int = 0) -> FullRankEstimate:
    """Exact when the kernel is enumerable, else a sampled 95% Wilson interval."""
    if basis.dimension <= ENUMERATION_LIMIT and (1 << basis.dimension) <= max(samples, 1 << 12):
        good = count_full_rank_solutions(basis)
        total = 1 << basis.dimension
        return FullRankEstimate(True, good, total, good / total, good / total)
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(0, 2, size=(samples, basis.dimension)).astype(bool)
    pts = np.stack([basis.point(c) for c in coeffs])
    good = int(_full_rank_many(pts, basis.n, basis.d).sum())
    lo, hi = wilson_interval(good, samples)
    return FullRankEstimate(False, good, samples, lo, hi)


def fixed_coordinates(perm) -> list[int]:
    """1-indexed fixed points of a permutation given by its images."""
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValueError("not a permutation of 1..N")
    return [i for i, p in enumerate(perm, start=1) if p == i]


def block_form(lam: BitMatrix, pi: BitMatrix, n: int, d: int) -> BlockLinearMap:
    """Blocks of pi lam pi^{-1}, which must leave span(e_{n+1..N}) invariant."""
    if lam.shape != (n + d, n + d) or pi.shape != lam.shape:
        raise DimensionError(f"lambda and pi must be {n + d} x {n + d}")
    return BlockLinearMap.from_matrix(conjugate(lam, pi), n, d)


def linearize(lam: BitMatrix, pi: BitMatrix, n: int, d: int) -> SolutionBasis:
    """block_form -> build_system -> solve, recording pi and the wall-clock time.

    Decoded operations linearize pi lam pi^{-1}; wrap them in
    :class:`hiddensum.ConjugatedSum` with ``pi`` to act on lam's frame.
    """
    t0 = time.perf_counter()
    blk = block_form(lam, pi, n, d)
    sys = build_system(blk)
    basis = solve(sys)
    elapsed = time.perf_counter() - t0
    return SolutionBasis(basis.n, basis.d, basis.words, system=sys, pi=pi, block=blk, seconds=elapsed)


def random_block_map(n: int, d: int, seed: int, permutation: bool = False) -> BlockLinearMap:
    """Seeded random block-triangular map; a bit permutation when ``permutation``."""
    rng = np.random.default_rng(seed)
    if permutation:
        p1 = rng.permutation(n)
        p3 = rng.permutation(d)
        L1 = np.zeros((n, n), dtype=np.uint8)
        L1[np.arange(n), p1] = 1
        L3 = np.zeros((d, d), dtype=np.uint8)
        L3[np.arange(d), p3] = 1
        return BlockLinearMap(BitMatrix.from_array(L1), BitMatrix.zeros(n, d), BitMatrix.from_array(L3))

    def rand_inv(k):
        while True:
            M = BitMatrix.from_array(rng.integers(0, 2, size=(k, k)))
            try:
                invert(M)
                return M
            except SingularMatrixError:
                continue

    return BlockLinearMap(rand_inv(n), BitMatrix.from_array(rng.integers(0, 2, size=(n, d))), rand_inv(d))
