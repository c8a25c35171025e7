"""Recover a o-affine black box from N + 1 queries and predict it everywhere.

With the hidden sum known, phi(x) = L(x) o c where L is o-linear. Querying
phi(0) gives c; querying phi(e_i) gives L(e_i) o c, and since every element
is its own o-inverse, L(e_i) = phi(e_i) o c. Any x is then
alpha_1 e_1 o ... o alpha_N e_N (decompose), so
phi(x) = (o-fold of L(e_i) over alpha_i = 1) o c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2core import BitVector, DimensionError
from .hiddensum import HiddenSum


@dataclass(frozen=True)
class CircAffineMap:
    hs: HiddenSum
    basis_images: tuple  # L(e_1), ..., L(e_N)
    c: BitVector

    def images_array(self) -> np.ndarray:
        return np.array([v.to_array() for v in self.basis_images], dtype=np.uint8)


def reconstruct(oracle, hs: HiddenSum, order=None) -> CircAffineMap:
    """Exactly N + 1 calls to ``oracle``: phi(0), then phi(e_i) in ``order``.

    ``order`` is an optional permutation of 1..N for the basis queries; the
    result does not depend on it.
    """
    N = hs.N
    order = list(range(1, N + 1)) if order is None else [int(i) for i in order]
    if sorted(order) != list(range(1, N + 1)):
        raise ValueError("order must be a permutation of 1..N")
    c = oracle(BitVector.zero(N))
    if len(c) != N:
        raise DimensionError("oracle output has the wrong length")
    carr = c.to_array()[None, :]
    images = [None] * N
    for i in order:
        y = oracle(BitVector.unit(N, i))
        images[i - 1] = BitVector.from_array(hs.add_many(y.to_array()[None, :], carr)[0])
    return CircAffineMap(hs, tuple(images), c)


def predict_many(m: CircAffineMap, X) -> np.ndarray:
    hs = m.hs
    X = np.asarray(X, dtype=np.uint8)
    if X.ndim != 2 or X.shape[1] != hs.N:
        raise DimensionError(f"expected (m, {hs.N}) input")
    alpha = hs.decompose_many(X)
    imgs = m.images_array()
    acc = np.zeros_like(X)
    for i in range(hs.N):
        hit = alpha[:, i] == 1
        if hit.any():
            acc[hit] = hs.add_many(acc[hit], np.broadcast_to(imgs[i], (int(hit.sum()), hs.N)).copy())
    return hs.add_many(acc, np.broadcast_to(m.c.to_array(), acc.shape).copy())


def predict(m: CircAffineMap, x: BitVector) -> BitVector:
    if len(x) != m.hs.N:
        raise DimensionError(f"input length {len(x)} != {m.hs.N}")
    return BitVector.from_array(predict_many(m, x.to_array()[None, :])[0])


@dataclass(frozen=True)
class VerificationReport:
    mode: str
    checked: int
    agreed: int
    counterexample: BitVector | None

    @property
    def agreement(self) -> float:
        return self.agreed / self.checked if self.checked else 1.0


def _oracle_many(oracle, X):
    if hasattr(oracle, "many"):
        return np.asarray(oracle.many(X), dtype=np.uint8)
    return np.array([oracle(BitVector.from_array(r)).to_array() for r in X], dtype=np.uint8)


def all_vectors(N: int) -> np.ndarray:
    """Every vector of (F2)^N, row k is the integer k with coordinate 1 as bit 0."""
    idx = np.arange(1 << N, dtype=np.int64)
    return ((idx[:, None] >> np.arange(N)) & 1).astype(np.uint8)


def verify_reconstruction(oracle, m: CircAffineMap, mode: str = "exhaustive", seed: int = 0, samples: int = 10000):
    """Compare predict against the oracle on all 2^N points or on random samples."""
    N = m.hs.N
    if mode == "exhaustive":
        if N > 20:
            raise ValueError("exhaustive verification needs N <= 20")
        X = all_vectors(N)
    elif mode == "sampled":
        X = np.random.default_rng(seed).integers(0, 2, size=(samples, N)).astype(np.uint8)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    want = _oracle_many(oracle, X)
    got = predict_many(m, X)
    ok = (want == got).all(axis=1)
    bad = np.flatnonzero(~ok)
    cex = BitVector.from_array(X[bad[0]]) if bad.size else None
    return VerificationReport(mode, int(X.shape[0]), int(ok.sum()), cex)


class CountingOracle:
    """Wraps an oracle and counts scalar queries."""

    def __init__(self, oracle):
        self._oracle = oracle
        self.calls = 0

    def __call__(self, x: BitVector) -> BitVector:
        self.calls += 1
        return self._oracle(x)
