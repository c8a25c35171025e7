"""Pure numpy implementations of the hot kernels.

Same signatures and outputs as the compiled ``_kernels`` module; used when the
extension is not built or when ``HIDDENSUMS_PURE=1`` is set.
"""

import numpy as np


def rref_inplace(M, ncols):
    """Gauss-Jordan over packed uint64 rows, in place. Returns pivot columns."""
    nrows = M.shape[0]
    pivots = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        w, b = divmod(col, 64)
        bit = np.uint64(1) << np.uint64(b)
        hits = np.flatnonzero(M[r:, w] & bit)
        if hits.size == 0:
            continue
        piv = r + int(hits[0])
        if piv != r:
            M[[r, piv], w:] = M[[piv, r], w:]
        others = np.flatnonzero(M[:, w] & bit)
        others = others[others != r]
        if others.size:
            M[others, w:] ^= M[r, w:]
        pivots.append(col)
        r += 1
    return pivots


def _cell_values(idx, n, d):
    """Decode odometer indices into an (len(idx), ncells) array of d-bit cells."""
    ncells = n * (n - 1) // 2
    mask = np.uint64((1 << d) - 1)
    shifts = np.array([d * (ncells - 1 - t) for t in range(ncells)], dtype=np.uint64)
    return (idx[:, None] >> shifts[None, :]) & mask


def count_full_rank(n, d, start, stop, chunk=1 << 16):
    """Count symmetric zero-diagonal grids of full F2 row rank in [start, stop).

    Full rank is tested as "no nonempty subset of rows XORs to zero", walking
    the subsets in Gray-code order.
    """
    if n * d > 64:
        raise ValueError("n*d must be at most 64 for the packed enumerator")
    cells = [(i, j) for i in range(n) for j in range(i + 1, n)]
    total = 0
    for lo in range(start, stop, chunk):
        hi = min(stop, lo + chunk)
        idx = np.arange(lo, hi, dtype=np.uint64)
        vals = _cell_values(idx, n, d)
        rows = np.zeros((idx.size, n), dtype=np.uint64)
        for t, (i, j) in enumerate(cells):
            rows[:, i] |= vals[:, t] << np.uint64(j * d)
            rows[:, j] |= vals[:, t] << np.uint64(i * d)
        acc = np.zeros(idx.size, dtype=np.uint64)
        singular = np.zeros(idx.size, dtype=bool)
        for g in range(1, 1 << n):
            flip = (g & -g).bit_length() - 1
            acc ^= rows[:, flip]
            singular |= acc == 0
        total += int(np.count_nonzero(~singular))
    return total
