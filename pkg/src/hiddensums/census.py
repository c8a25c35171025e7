"""Counting canonical practical hidden sums.

|M(n,d)| is the number of symmetric zero-diagonal n x n grids over F_{2^d}
whose rows are F2-independent as nd-bit vectors. This module enumerates it
directly at desk scale, evaluates the known closed forms and the upper and
lower bounds mu and nu, and sums totals over all d with Gaussian binomials.
All arithmetic is exact (Python ints and Fractions).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import _backend

DEFAULT_BUDGET = 1 << 28
BUDGET_ENV = "HIDDENSUM_BUDGET"
INTRO_CLAIM_LOG2_N6 = 23


class BudgetExceededError(RuntimeError):
    """Enumeration would exceed the candidate budget."""


class NoClosedFormError(ValueError):
    """(n, d) is outside the cases with a known closed form."""


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class CountReport:
    n: int
    d: int
    q: int
    exact: int | None
    mu: int
    nu: int
    method: str
    nu_exact: Fraction = field(default=Fraction(0), compare=False)
    candidates: int | None = None

    @property
    def sandwich_ok(self) -> bool | None:
        if self.exact is None:
            return None
        return self.nu <= self.exact <= self.mu

    @property
    def flags(self) -> list[str]:
        out = []
        if self.exact is not None and self.nu > self.exact:
            out.append("nu-exceeds-exact")
        if self.exact is not None and self.exact > self.mu:
            out.append("exact-exceeds-mu")
        if self.nu_exact.denominator != 1:
            out.append("nu-floored")
        return out


def _check_nd(n, d):
    if n < 2 or d < 1:
        raise ValueError(f"need n >= 2 and d >= 1, got n={n}, d={d}")


def candidate_count(n: int, d: int) -> int:
    """Number of symmetric zero-diagonal grids: q^C(n,2)."""
    return 1 << (d * (n * (n - 1) // 2))


def _count_range(args):
    n, d, lo, hi = args
    return _backend.count_full_rank(n, d, lo, hi)


def enumerate_full_rank(n: int, d: int, budget: int | None = None, workers: int = 1) -> int:
    """Brute-force |M(n,d)| by walking every candidate grid."""
    _check_nd(n, d)
    budget = default_budget() if budget is None else budget
    total = candidate_count(n, d)
    if total > budget:
        raise BudgetExceededError(f"(n={n}, d={d}) needs {total} candidates, budget is {budget}")
    if workers <= 1 or total < (1 << 16):
        return int(_backend.count_full_rank(n, d, 0, total))
    step = -(-total // (workers * 4))
    ranges = [(n, d, lo, min(total, lo + step)) for lo in range(0, total, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return int(sum(pool.map(_count_range, ranges)))


def brute_force_count(n: int, d: int, budget: int | None = None, workers: int = 1) -> CountReport:
    exact = enumerate_full_rank(n, d, budget, workers)
    nu_q = nu_exact(n, d)
    return CountReport(
        n=n,
        d=d,
        q=1 << d,
        exact=exact,
        mu=mu(n, d),
        nu=math.floor(nu_q),
        method="brute-force",
        nu_exact=nu_q,
        candidates=candidate_count(n, d),
    )


def _d1_even(n):
    return 2 ** math.comb(n, 2) * math.prod(
        (Fraction(1) - Fraction(1, 2 ** (2 * j - 1)) for j in range(1, (n - 1 + 1) // 2 + 1)), start=Fraction(1)
    )


def closed_form_value(n: int, d: int) -> int:
    _check_nd(n, d)
    q = 1 << d
    if n == 2:
        return q - 1
    if n == 3:
        return (q + 3) * (q - 1) * (q - 2)
    if d == 1:
        if n % 2:
            return 0
        val = _d1_even(n)
        assert val.denominator == 1
        return int(val)
    raise NoClosedFormError(f"no closed form for n={n}, d={d} (covered: n=2, n=3, d=1)")


def closed_form_count(n: int, d: int) -> CountReport:
    exact = closed_form_value(n, d)
    nu_q = nu_exact(n, d)
    return CountReport(
        n=n, d=d, q=1 << d, exact=exact, mu=mu(n, d), nu=math.floor(nu_q), method="closed-form", nu_exact=nu_q
    )


def bounds_only(n: int, d: int) -> CountReport:
    nu_q = nu_exact(n, d)
    return CountReport(n=n, d=d, q=1 << d, exact=None, mu=mu(n, d), nu=math.floor(nu_q), method="bounds-only", nu_exact=nu_q)


def mu(n: int, d: int) -> int:
    """Upper bound q^C(n,2) - 1 - sum_{r=1}^{n-2} C(n,r) (q-1)^C(n-r,2)."""
    _check_nd(n, d)
    q = 1 << d
    return q ** math.comb(n, 2) - 1 - sum(math.comb(n, r) * (q - 1) ** math.comb(n - r, 2) for r in range(1, n - 1))


def _prod_tail(q, upper):
    return math.prod((Fraction(1) - Fraction(1, q ** (2 * j - 1)) for j in range(1, upper + 1)), start=Fraction(1))


def nu_exact(n: int, d: int) -> Fraction:
    """Lower bound nu(n,d) as an exact rational."""
    _check_nd(n, d)
    q = 1 << d
    if n % 2 == 0:
        return q ** math.comb(n, 2) * _prod_tail(q, math.ceil((n - 1) / 2))
    return (q ** (n - 1) - 2 ** (n - 1)) * q ** math.comb(n - 1, 2) * _prod_tail(q, math.ceil((n - 2) / 2))


def nu(n: int, d: int) -> int:
    return math.floor(nu_exact(n, d))


def symmetric_invertible_count(n: int, d: int) -> int:
    """Symmetric invertible zero-diagonal n x n matrices over F_q (q = 2^d)."""
    _check_nd(n, d)
    if n % 2:
        return 0
    q = 1 << d
    val = q ** math.comb(n, 2) * _prod_tail(q, math.ceil((n - 1) / 2))
    return int(val)


def gaussian_binomial(N: int, d: int) -> int:
    """Number of d-dimensional subspaces of (F2)^N."""
    if not 0 <= d <= N:
        raise ValueError(f"need 0 <= d <= N, got N={N}, d={d}")
    num = math.prod((2 ** (N - i) - 1 for i in range(d)), start=1)
    den = math.prod((2 ** (d - i) - 1 for i in range(d)), start=1)
    assert num % den == 0
    return num // den


@dataclass(frozen=True)
class TotalReport:
    N: int
    total: int
    terms: tuple  # (d, gaussian_binomial, |M(N-d,d)|, product)

    @property
    def log2(self) -> float:
        return math.log2(self.total) if self.total else float("-inf")

    def intro_comparison(self) -> str:
        if self.N != 6:
            return ""
        return (
            f"N=6 exact total {self.total} = 2^{self.log2:.3f}; "
            f"introduction states ~2^{INTRO_CLAIM_LOG2_N6} "
            f"(ratio {self.total / 2**INTRO_CLAIM_LOG2_N6:.4f})"
        )


def total_count(N: int, budget: int | None = None, workers: int = 1) -> TotalReport:
    """Sum over d = 1..N-2 of [N d]_2 * |M(N-d, d)|, every term enumerated."""
    if N < 3:
        raise ValueError("need N >= 3 (n >= 2 and d >= 1)")
    budget = default_budget() if budget is None else budget
    for d in range(1, N - 1):
        c = candidate_count(N - d, d)
        if c > budget:
            raise BudgetExceededError(f"term d={d} (n={N - d}) needs {c} candidates, budget is {budget}")
    terms = []
    for d in range(1, N - 1):
        g = gaussian_binomial(N, d)
        m = enumerate_full_rank(N - d, d, budget, workers)
        terms.append((d, g, m, g * m))
    return TotalReport(N=N, total=sum(t[3] for t in terms), terms=tuple(terms))


# certified exponential -----------------------------------------------------


def exp_bracket(x: Fraction, terms: int) -> tuple[Fraction, Fraction]:
    """Rational (lower, upper) with lower <= e^x <= upper, for 0 <= x < terms + 2.

    lower is the Taylor sum through x^terms/terms!; the remainder is bounded
    by the geometric majorant of the tail.
    """
    if x < 0 or x >= terms + 2:
        raise ValueError("bracket needs 0 <= x < terms + 2")
    s = Fraction(0)
    term = Fraction(1)
    for k in range(terms + 1):
        if k:
            term = term * x / k
        s += term
    nxt = term * x / (terms + 1)
    tail = nxt / (1 - x / (terms + 2))
    return s, s + tail


@dataclass(frozen=True)
class RatioReport:
    n: int
    d: int
    ratio: Fraction
    factor: int
    exponent: Fraction
    bound_lower: Fraction
    bound_upper: Fraction
    passed: bool

    def line(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"n={self.n} d={self.d} mu/nu={float(self.ratio):.6f} "
            f"bound={self.factor}*e^({self.exponent})~{float(self.bound_lower):.6f} {verdict}"
        )


def ratio_bound_check(n: int, d: int) -> RatioReport:
    """Compare mu/nu with e^{(q+1)/(q(q-1))} (times 2 for odd n), exactly."""
    _check_nd(n, d)
    if d < 2:
        raise ValueError("the ratio bound is stated for d >= 2")
    q = 1 << d
    ratio = Fraction(mu(n, d)) / nu_exact(n, d)
    x = Fraction(q + 1, q * (q - 1))
    factor = 1 if n % 2 == 0 else 2
    lo = hi = Fraction(0)
    passed = None
    for terms in range(4, 200):
        lo, hi = exp_bracket(x, terms)
        if ratio <= factor * lo:
            passed = True
            break
        if ratio > factor * hi:
            passed = False
            break
    if passed is None:
        # ratio equals e^x to within 1e-300: cannot happen for rational ratio, but stay honest
        raise ArithmeticError("could not separate ratio from the bound")
    return RatioReport(n, d, ratio, factor, x, factor * lo, factor * hi, passed)


# arithmetic in F_{2^d} for the invertibility cross-check --------------------


def _poly_mod(a, m):
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def smallest_irreducible(d: int) -> int:
    """Lowest-valued irreducible polynomial of degree d over F2 (bit k = x^k)."""
    if d == 1:
        return 0b10
    for p in range((1 << d) | 1, 1 << (d + 1), 2):
        if all(_poly_mod(p, f) for f in range(2, 1 << (d // 2 + 1)) if f.bit_length() - 1 >= 1):
            return p
    raise AssertionError("unreachable")


class GF2d:
    """Arithmetic in F_{2^d} = F2[x]/(m), elements as d-bit ints."""

    def __init__(self, d: int):
        self.d = d
        self.modulus = smallest_irreducible(d)

    def mul(self, a: int, b: int) -> int:
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> self.d:
                a ^= self.modulus
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        r, e = 1, (1 << self.d) - 2
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def rank(self, grid) -> int:
        """Rank of a matrix over F_{2^d} by naive Gaussian elimination."""
        M = [list(r) for r in grid]
        rows = len(M)
        cols = len(M[0]) if rows else 0
        r = 0
        for c in range(cols):
            piv = next((i for i in range(r, rows) if M[i][c]), None)
            if piv is None:
                continue
            M[r], M[piv] = M[piv], M[r]
            inv = self.inv(M[r][c])
            M[r] = [self.mul(inv, v) for v in M[r]]
            for i in range(rows):
                if i != r and M[i][c]:
                    f = M[i][c]
                    M[i] = [a ^ self.mul(f, b) for a, b in zip(M[i], M[r])]
            r += 1
        return r


def _grids(n, d):
    cells = [(i, j) for i in range(n) for j in range(i + 1, n)]
    q = 1 << d
    for idx in range(q ** len(cells)):
        g = [[0] * n for _ in range(n)]
        t = idx
        for i, j in reversed(cells):
            g[i][j] = g[j][i] = t % q
            t //= q
        yield g


def brute_force_invertible_count(n: int, d: int, budget: int | None = None) -> int:
    """Symmetric zero-diagonal grids that are invertible over F_{2^d}."""
    _check_nd(n, d)
    budget = default_budget() if budget is None else budget
    if candidate_count(n, d) > min(budget, 1 << 20):
        raise BudgetExceededError(f"(n={n}, d={d}) is too large for the field-rank enumerator")
    field = GF2d(d)
    return sum(1 for g in _grids(n, d) if field.rank(g) == n)


def brute_force_f2_rank_count(n: int, d: int) -> int:
    """Straight-line reference enumerator (pure Python, no packing tricks)."""
    from .gf2core import BitMatrix, rank

    total = 0
    for g in _grids(n, d):
        rows = [[(g[i][j] >> k) & 1 for j in range(n) for k in range(d)] for i in range(n)]
        total += rank(BitMatrix.from_rows(rows)) == n
    return total


def enumerable_params(limit_log2: int = 20):
    """All (n, d) with q^C(n,2) <= 2^limit_log2."""
    out = []
    n = 2
    while math.comb(n, 2) <= limit_log2:
        d = 1
        while d * math.comb(n, 2) <= limit_log2:
            out.append((n, d))
            d += 1
        n += 1
    return out
