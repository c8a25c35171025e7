# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: packed GF(2) Gauss-Jordan and the census enumerator.

Both functions mirror ``_fallback`` exactly; the two are cross-checked in
``tests/test_backend.py``.
"""

from libc.stdint cimport uint64_t


cdef extern from *:
    int __builtin_clzll(unsigned long long x) nogil


def rref_inplace(uint64_t[:, ::1] M, Py_ssize_t ncols):
    """Reduce the packed matrix ``M`` to reduced row echelon form in place.

    Column ``j`` is bit ``j % 64`` of word ``j // 64``. Returns the list of
    pivot columns, ascending.
    """
    cdef Py_ssize_t nrows = M.shape[0]
    cdef Py_ssize_t nwords = M.shape[1]
    cdef Py_ssize_t r = 0
    cdef Py_ssize_t col, w, i, k, piv
    cdef uint64_t bit, tmp
    pivots = []
    with nogil:
        for col in range(ncols):
            if r == nrows:
                break
            w = col >> 6
            bit = (<uint64_t>1) << (col & 63)
            piv = -1
            for i in range(r, nrows):
                if M[i, w] & bit:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                # rows >= r are zero left of col, so the swap starts at word w
                for k in range(w, nwords):
                    tmp = M[r, k]
                    M[r, k] = M[piv, k]
                    M[piv, k] = tmp
            for i in range(nrows):
                if i != r and (M[i, w] & bit):
                    for k in range(w, nwords):
                        M[i, k] ^= M[r, k]
            with gil:
                pivots.append(col)
            r += 1
    return pivots


def count_full_rank(int n, int d, unsigned long long start, unsigned long long stop):
    """Count symmetric zero-diagonal grids of full F2 row rank.

    Candidates are numbered odometer-style: the C(n,2) above-diagonal cells
    in row-major order, each a d-bit digit, last cell fastest. Row ``i`` of
    the n x nd matrix packs cell ``(i, j)`` at bits ``j*d .. j*d+d-1``.
    Requires n*d <= 64 and n <= 64.
    """
    if n * d > 64:
        raise ValueError("n*d must be at most 64 for the packed enumerator")
    cdef int ncells = n * (n - 1) // 2
    cdef unsigned long long mask = (1ULL << d) - 1 if d < 64 else <unsigned long long>(-1)
    cdef unsigned long long idx, val, x
    cdef unsigned long long rows[64]
    cdef unsigned long long piv[64]
    cdef int i, j, t, hb, ok
    cdef unsigned long long total = 0
    with nogil:
        for idx in range(start, stop):
            for i in range(n):
                rows[i] = 0
            t = ncells - 1
            for i in range(n - 1, -1, -1):
                for j in range(n - 1, i, -1):
                    val = (idx >> (d * (ncells - 1 - t))) & mask if d * (ncells - 1 - t) < 64 else 0
                    rows[i] |= val << (j * d)
                    rows[j] |= val << (i * d)
                    t -= 1
            for i in range(64):
                piv[i] = 0
            ok = 1
            for i in range(n):
                x = rows[i]
                while x:
                    hb = 63 - __builtin_clzll(x)
                    if piv[hb]:
                        x ^= piv[hb]
                    else:
                        piv[hb] = x
                        break
                if x == 0:
                    ok = 0
                    break
            total += ok
    return total
