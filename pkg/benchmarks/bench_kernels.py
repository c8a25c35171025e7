"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeats 3]

Cases: elimination of the PRESENT linearization system (21720 x 14400),
a dense random 3000 x 3000 matrix, and the full-rank census at
(n, d) = (5, 2) and (4, 3). Each cell is the best of ``--repeats`` runs.
"""

import argparse
import time

import numpy as np

from hiddensums import _backend
from hiddensums.census import candidate_count
from hiddensums.gf2core import pack_rows
from hiddensums.linearize import block_form, build_system
from hiddensums.tbcipher import present_mixing_layer, present_pi


def best_of(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def rref_case(words, ncols):
    def make(impl):
        def go():
            work = words.copy()
            return len(impl.rref_inplace(work, ncols))

        return go

    return make


def census_case(n, d):
    total = candidate_count(n, d)

    def make(impl):
        return lambda: impl.count_full_rank(n, d, 0, total)

    return make


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    impls = [("python", _backend.fallback)]
    if _backend.compiled is not None:
        impls.insert(0, ("cython", _backend.compiled))
    else:
        print("compiled extension not available; timing the fallback only")

    present = build_system(block_form(present_mixing_layer(), present_pi(), 60, 4))
    dense = np.random.default_rng(0).integers(0, 2, (3000, 3000)).astype(np.uint8)
    cases = [
        ("rref PRESENT 21720x14400", rref_case(present.words, present.nvars)),
        ("rref dense 3000x3000", rref_case(pack_rows(dense), 3000)),
        ("census (5,2) 2^20 grids", census_case(5, 2)),
        ("census (4,3) 2^18 grids", census_case(4, 3)),
    ]

    names = [name for name, _ in impls]
    print(f"{'case':<28}" + "".join(f"{n:>12}" for n in names) + (f"{'speedup':>10}" if len(names) == 2 else ""))
    for label, make in cases:
        times = []
        results = set()
        for _, impl in impls:
            t, r = best_of(make(impl), args.repeats)
            times.append(t)
            results.add(r)
        assert len(results) == 1, f"{label}: backends disagree {results}"
        row = f"{label:<28}" + "".join(f"{t:>11.3f}s" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row + f"   result={results.pop()}")


if __name__ == "__main__":
    main()
