"""Translation-based cipher pieces: PRESENT's bit permutation, walls, a toy cipher.

Bricks are consecutive runs of ``m`` coordinates: brick i (1-indexed) covers
coordinates (i-1)m+1 .. im, and an S-box reads its brick with the first
coordinate as the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2core import BitMatrix, BitVector, DimensionError, invert, permutation_to_matrix, rank
from .hiddensum import HiddenSum

# i -> i lambda_P for i = 1..64, row by row as printed in the PRESENT table.
PRESENT_PERMUTATION = (
    1, 17, 33, 49, 2, 18, 34, 50, 3, 19, 35, 51, 4, 20, 36, 52,
    5, 21, 37, 53, 6, 22, 38, 54, 7, 23, 39, 55, 8, 24, 40, 56,
    9, 25, 41, 57, 10, 26, 42, 58, 11, 27, 43, 59, 12, 28, 44, 60,
    13, 29, 45, 61, 14, 30, 46, 62, 15, 31, 47, 63, 16, 32, 48, 64,
)  # fmt: skip

PRESENT_PI_CYCLES = ((1, 61), (22, 62), (43, 63))

WALL_LIMIT = 24


def present_permutation_formula(i: int) -> int:
    """PRESENT's pLayer rule 16*j mod 63 (j = i-1, j = 63 fixed), 1-indexed."""
    j = i - 1
    return 64 if j == 63 else (16 * j) % 63 + 1


def present_mixing_layer() -> BitMatrix:
    return permutation_to_matrix(PRESENT_PERMUTATION)


def cycles_to_permutation(cycles, N: int) -> list[int]:
    perm = list(range(1, N + 1))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[a - 1] = b
    return perm


def present_pi() -> BitMatrix:
    return permutation_to_matrix(cycles_to_permutation(PRESENT_PI_CYCLES, 64))


@dataclass(frozen=True)
class WallVerdict:
    proper: bool
    witness: tuple[int, ...] | None
    walls_checked: int


def brick_reach(lam: BitMatrix, b: int, m: int) -> list[int]:
    """reach[i] = bitmask of bricks hit by the images of brick i's basis vectors."""
    arr = lam.to_array()
    reach = []
    for i in range(b):
        hit = arr[i * m : (i + 1) * m].any(axis=0).reshape(b, m).any(axis=1)
        reach.append(int(sum(1 << j for j in np.flatnonzero(hit))))
    return reach


def is_proper_mixing_layer(lam: BitMatrix, b: int, m: int, chunk: int = 1 << 20) -> WallVerdict:
    """Exhaustive search for a lambda-invariant wall (nonempty proper brick subset).

    Subsets are scanned as bitmasks 1, 2, ..., 2^b - 2; the first invariant
    one is returned as the witness (1-indexed brick numbers).
    """
    N = lam.rows
    if lam.cols != N or b < 1 or m < 1 or b * m != N:
        raise DimensionError(f"N={N} is not b*m = {b}*{m}")
    if b > WALL_LIMIT:
        raise ValueError(f"wall enumeration refused beyond b={WALL_LIMIT}")
    if rank(lam) < N:
        raise ValueError("mixing layer must be invertible")
    reach = np.asarray(brick_reach(lam, b, m), dtype=np.uint32)
    top = (1 << b) - 1
    checked = 0
    for lo in range(1, top, chunk):
        masks = np.arange(lo, min(top, lo + chunk), dtype=np.uint32)
        union = np.zeros_like(masks)
        for i in range(b):
            union |= np.where((masks >> np.uint32(i)) & 1, reach[i], np.uint32(0))
        inv = (union & ~masks) == 0
        hits = np.flatnonzero(inv)
        if hits.size:
            w = int(masks[hits[0]])
            checked += int(hits[0]) + 1
            return WallVerdict(False, tuple(i + 1 for i in range(b) if (w >> i) & 1), checked)
        checked += masks.size
    return WallVerdict(True, None, checked)


@dataclass(frozen=True)
class Round:
    sboxes: tuple  # b tables, each a permutation of range(2^m)
    mixing: BitMatrix
    key: BitVector


@dataclass(frozen=True)
class TbCipherSpec:
    b: int
    m: int
    rounds: tuple

    @property
    def N(self) -> int:
        return self.b * self.m

    def __post_init__(self):
        N = self.b * self.m
        for k, rnd in enumerate(self.rounds):
            if len(rnd.sboxes) != self.b:
                raise ValueError(f"round {k + 1}: need {self.b} S-boxes")
            for box in rnd.sboxes:
                if sorted(box) != list(range(1 << self.m)):
                    raise ValueError(f"round {k + 1}: S-box is not a bijection on [0, {(1 << self.m) - 1}]")
            if rnd.mixing.shape != (N, N) or rank(rnd.mixing) < N:
                raise ValueError(f"round {k + 1}: mixing layer must be an invertible {N} x {N} matrix")
            if len(rnd.key) != N:
                raise ValueError(f"round {k + 1}: round key must have length {N}")


def bricklayer(spec: TbCipherSpec, sboxes, X) -> np.ndarray:
    """Apply one S-box per brick to every row of X."""
    m = spec.m
    weights = 1 << np.arange(m - 1, -1, -1)
    out = np.empty_like(X)
    for i, box in enumerate(sboxes):
        seg = X[:, i * m : (i + 1) * m].astype(np.int64)
        vals = np.asarray(box, dtype=np.int64)[seg @ weights]
        out[:, i * m : (i + 1) * m] = (vals[:, None] >> np.arange(m - 1, -1, -1)) & 1
    return out


def encrypt_many(spec: TbCipherSpec, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.uint8)
    if X.ndim != 2 or X.shape[1] != spec.N:
        raise DimensionError(f"expected (m, {spec.N}) input")
    for rnd in spec.rounds:
        X = bricklayer(spec, rnd.sboxes, X)
        X = ((X.astype(np.int32) @ rnd.mixing.to_array().astype(np.int32)) & 1).astype(np.uint8)
        X = X ^ rnd.key.to_array()[None, :]
    return X


def encrypt(spec: TbCipherSpec, x: BitVector) -> BitVector:
    """gamma, then lambda, then the round-key XOR, for every round."""
    if len(x) != spec.N:
        raise DimensionError(f"input length {len(x)} != {spec.N}")
    return BitVector.from_array(encrypt_many(spec, x.to_array()[None, :])[0])


def random_tb_spec(b: int, m: int, rounds: int, seed: int) -> TbCipherSpec:
    rng = np.random.default_rng(seed)
    N = b * m
    out = []
    for _ in range(rounds):
        boxes = tuple(tuple(int(v) for v in rng.permutation(1 << m)) for _ in range(b))
        while True:
            lam = BitMatrix.from_array(rng.integers(0, 2, size=(N, N)))
            if rank(lam) == N:
                break
        key = BitVector.from_array(rng.integers(0, 2, size=N))
        out.append(Round(boxes, lam, key))
    return TbCipherSpec(b, m, tuple(out))


class CircAffineOracle:
    """Black-box x -> L(x) o c for a o-linear bijection L.

    L is a random invertible matrix M acting on o-coordinates:
    L(x) = recompose(decompose(x) @ M). ``ground_truth`` holds L(e_i) and c
    for test harnesses; callers doing the attack use only ``__call__`` and
    ``many``.
    """

    def __init__(self, hs: HiddenSum, M: BitMatrix, c: BitVector):
        if M.shape != (hs.N, hs.N) or len(c) != hs.N:
            raise DimensionError("M must be N x N and c of length N")
        invert(M)
        self.hs = hs
        self._M = M.to_array().astype(np.int32)
        self._c = c.to_array()
        self.queries = 0

    def many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.uint8)
        self.queries += X.shape[0]
        coords = (self.hs.decompose_many(X).astype(np.int32) @ self._M & 1).astype(np.uint8)
        lin = self.hs.recompose_many(coords)
        return self.hs.add_many(lin, np.broadcast_to(self._c, lin.shape).copy())

    def __call__(self, x: BitVector) -> BitVector:
        return BitVector.from_array(self.many(x.to_array()[None, :])[0])

    @property
    def ground_truth(self):
        """(L(e_1), ..., L(e_N)) and c."""
        images = self.hs.recompose_many(self._M.astype(np.uint8))
        return [BitVector.from_array(r) for r in images], BitVector.from_array(self._c)


def random_circ_affine_map(hs: HiddenSum, seed: int, degenerate: bool = False) -> CircAffineOracle:
    """Seeded uniformly random o-affine bijection (identity when ``degenerate``)."""
    N = hs.N
    if degenerate:
        return CircAffineOracle(hs, BitMatrix.identity(N), BitVector.zero(N))
    rng = np.random.default_rng(seed)
    while True:
        M = BitMatrix.from_array(rng.integers(0, 2, size=(N, N)))
        if rank(M) == N:
            break
    c = BitVector.from_array(rng.integers(0, 2, size=N))
    return CircAffineOracle(hs, M, c)
