"""Command-line entry point: ``hiddensums <subcommand> ...``.

Exit status: 0 on success, 1 on domain errors (singular matrix, empty family,
budget exceeded, ...), 2 on malformed input. ``--output records`` prints one
``key=value`` record per line and never includes wall-clock times, so record
output is byte-identical across runs with the same arguments.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from . import __version__, _backend
from . import attack as atk
from . import census
from . import formats
from . import hiddensum as hsm
from . import linearize as lin
from . import tbcipher as tb
from .gf2core import BitMatrix, BitVector, DimensionError, SingularMatrixError, conjugate, matrix_to_permutation

DEFAULT_SEED = 0

DOMAIN_ERRORS = (
    SingularMatrixError,
    hsm.EmptyFamilyError,
    hsm.NotAHiddenSumError,
    census.BudgetExceededError,
    census.NoClosedFormError,
    lin.NotBlockTriangularError,
    lin.NotInKernelError,
    lin.SamplingExhaustedError,
)


class Reporter:
    def __init__(self, mode, stream=None):
        self.mode = mode
        self.stream = stream or sys.stdout

    def human(self, text=""):
        if self.mode == "human":
            print(text, file=self.stream)

    def record(self, **fields):
        if self.mode == "records":
            print(" ".join(f"{k}={v}" for k, v in fields.items()), file=self.stream)

    def both(self, text, **fields):
        self.human(text)
        self.record(**fields)


def example_path():
    return resources.files("hiddensums") / "data" / "example_n3_d2.hsum"


def _int_list(text):
    out = []
    for part in text.split(","):
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _vector(text, N, what):
    v = BitVector.from_string(text)
    if len(v) != N:
        raise DimensionError(f"{what} has length {len(v)}, expected N={N}")
    return v


# subcommands ----------------------------------------------------------------


def cmd_census(args, out):
    budget = args.budget if args.budget is not None else census.default_budget()
    if args.total is not None:
        rep = census.total_count(args.total, budget=budget, workers=args.threads)
        out.human(f"{'d':>3} {'[N d]_2':>10} {'|M(n,d)|':>12} {'term':>14}")
        for d, g, m, t in rep.terms:
            out.human(f"{d:>3} {g:>10} {m:>12} {t:>14}")
            out.record(N=rep.N, d=d, n=rep.N - d, gaussian_binomial=g, exact=m, term=t)
        out.human(f"total {rep.total} (log2 {rep.log2:.4f})")
        out.record(N=rep.N, total=rep.total, log2=f"{rep.log2:.4f}")
        if rep.N == 6:
            out.human(rep.intro_comparison())
            out.record(N=6, intro_claim_log2=census.INTRO_CLAIM_LOG2_N6, exact_log2=f"{rep.log2:.4f}")
        return 0
    if args.n is None or args.d is None:
        raise ValueError("census needs --n and --d (or --total N)")
    out.human(f"{'n':>3} {'d':>3} {'exact':>14} {'nu':>14} {'mu':>14}  method")
    for n in _int_list(args.n):
        for d in _int_list(args.d):
            if args.exact:
                rep = census.brute_force_count(n, d, budget=budget, workers=args.threads)
            else:
                try:
                    rep = census.closed_form_count(n, d)
                except census.NoClosedFormError:
                    rep = census.bounds_only(n, d)
            exact = "-" if rep.exact is None else str(rep.exact)
            flags = ",".join(rep.flags)
            out.human(f"{n:>3} {d:>3} {exact:>14} {rep.nu:>14} {rep.mu:>14}  {rep.method}" + (f"  [{flags}]" if flags else ""))
            out.record(n=n, d=d, exact=exact, nu=rep.nu, mu=rep.mu, method=rep.method, flags=flags or "-")
            if args.ratio and d >= 2:
                rr = census.ratio_bound_check(n, d)
                out.human("    " + rr.line())
                out.record(n=n, d=d, ratio=f"{float(rr.ratio):.9f}", factor=rr.factor, exponent=rr.exponent,
                           bound=f"{float(rr.bound_lower):.9f}", verdict="pass" if rr.passed else "fail")
    return 0


def _load_hsum(path):
    return formats.read_hidden_sum(example_path() if path == "example" else path)


def cmd_validate(args, out):
    hs = _load_hsum(args.file)
    rep = hsm.validate(hs)
    for line in rep.lines():
        out.human(line)
    out.record(n=rep.n, d=rep.d, symmetric=int(rep.symmetric), zero_diagonal=int(rep.zero_diagonal),
               rank=rep.rank, dim_U=rep.dim_U, practical=int(rep.is_practical_hidden_sum),
               exact_dim_U=int(rep.exact_dim_U))
    if args.compact:
        out.human("compact rows:")
        out.human(formats.dumps_compact(hs).rstrip("\n"))
    return 0


def cmd_add(args, out):
    hs = _load_hsum(args.file)
    x = _vector(args.x, hs.N, "x")
    y = _vector(args.y, hs.N, "y")
    z = hsm.circ_add(hs, x, y)
    out.both(str(z), x=x, y=y, sum=z)
    return 0


def cmd_decompose(args, out):
    hs = _load_hsum(args.file)
    v = _vector(args.v, hs.N, "v")
    c = hsm.decompose(hs, v)
    out.both(str(c), v=v, coefficients=c)
    return 0


def cmd_linearize(args, out):
    lam = formats.read_matrix(args.lam)
    pi = formats.read_matrix(args.pi)
    basis = lin.linearize(lam, pi, args.n, args.d)
    out.human(f"system: {basis.system.nrows} rows x {basis.system.nvars} variables")
    out.human(f"kernel dimension: {basis.dimension}")
    out.human(f"time: {basis.seconds:.3f} s  backend: {_backend.BACKEND}")
    out.record(n=args.n, d=args.d, rows=basis.system.nrows, vars=basis.system.nvars, kernel=basis.dimension)
    if args.emit_basis:
        with open(args.emit_basis, "w") as fh:
            fh.write(formats.dumps_basis(basis.words, basis.nvars, basis.n, basis.d))
        out.human(f"basis written to {args.emit_basis}")
    if args.sample:
        out.human(f"seed: {args.seed}")
        out.record(seed=args.seed)
        samples = lin.sample_solutions(basis, args.sample, args.seed, full_rank_only=args.full_rank_only)
        for k, hs in enumerate(samples, start=1):
            rep = hsm.validate(hs)
            out.human(f"sample {k}: rank {rep.rank}, dim U {rep.dim_U}")
            out.human(formats.dumps_compact(hs).rstrip("\n"))
            out.record(sample=k, rank=rep.rank, dim_U=rep.dim_U,
                       rows=";".join(",".join(map(str, r)) for r in formats.compact_rows(hs)))
    return 0


def cmd_proper(args, out):
    lam = formats.read_matrix(args.lam)
    v = tb.is_proper_mixing_layer(lam, args.bricks, args.brick_size)
    if v.proper:
        out.both(f"proper ({v.walls_checked} walls checked)", verdict="proper", walls_checked=v.walls_checked)
    else:
        w = ",".join(map(str, v.witness))
        out.both(f"not proper: invariant wall {{{w}}}", verdict="not-proper", witness=w)
    return 0


def cmd_present(args, out):
    lam = tb.present_mixing_layer()
    pi = tb.present_pi()
    if args.emit_lambda:
        formats.write_matrix(args.emit_lambda, lam)
        out.human(f"lambda_P written to {args.emit_lambda}")
    if args.emit_pi:
        formats.write_matrix(args.emit_pi, pi)
        out.human(f"pi_P written to {args.emit_pi}")
    if args.repro:
        basis = lin.linearize(lam, pi, 60, 4)
        blk = basis.block
        low_zero = not conjugate(lam, pi).to_array()[60:, :60].any()
        l3_identity = blk.lambda3 == BitMatrix.identity(4)
        l2_zero = blk.lambda2.is_zero()
        out.human(f"fixed coordinates of lambda_P: {lin.fixed_coordinates(matrix_to_permutation(lam))}")
        out.human(f"conjugated block form: lower-left zero: {low_zero}, Lambda3 = I4: {l3_identity}, Lambda2 = 0: {l2_zero}")
        out.human(f"system: {basis.system.nrows} rows x {basis.system.nvars} variables")
        out.human(f"kernel dimension: {basis.dimension}")
        out.human(f"time: {basis.seconds:.3f} s  backend: {_backend.BACKEND}")
        out.record(lower_left_zero=int(low_zero), lambda3_identity=int(l3_identity), rows=basis.system.nrows,
                   vars=basis.system.nvars, kernel=basis.dimension)
        out.human(f"seed: {args.seed}")
        hs = lin.sample_solutions(basis, 1, args.seed, full_rank_only=True)[0]
        rep = hsm.validate(hs)
        out.human(f"random full-rank operation: rank {rep.rank} = n, dim U = {rep.dim_U}")
        out.record(seed=args.seed, sample_rank=rep.rank, sample_dim_U=rep.dim_U)
        if args.show_sample:
            out.human(formats.dumps_compact(hs).rstrip("\n"))
    if not (args.emit_lambda or args.emit_pi or args.repro):
        out.human(" ".join(map(str, tb.PRESENT_PERMUTATION)))
        out.record(permutation=",".join(map(str, tb.PRESENT_PERMUTATION)))
    return 0


def cmd_attack_demo(args, out):
    hs = hsm.random_hidden_sum(args.n, args.d, args.seed)
    oracle = tb.random_circ_affine_map(hs, args.seed)
    counter = atk.CountingOracle(oracle)
    m = atk.reconstruct(counter, hs)
    mode = "exhaustive" if args.exhaustive else "sampled"
    rep = atk.verify_reconstruction(oracle, m, mode=mode, seed=args.seed, samples=args.samples)
    truth, c = oracle.ground_truth
    matches = list(m.basis_images) == truth and m.c == c
    out.human(f"seed: {args.seed}")
    out.human(f"hidden sum: n={hs.n} d={hs.d} N={hs.N}")
    out.human(f"queries: {counter.calls}")
    out.human(f"verification ({mode}): {rep.agreed}/{rep.checked} agree ({rep.agreement:.6f})")
    out.human(f"matches ground truth: {matches}")
    if rep.counterexample is not None:
        out.human(f"counterexample: {rep.counterexample}")
    out.record(seed=args.seed, n=hs.n, d=hs.d, queries=counter.calls, mode=mode, checked=rep.checked,
               agreed=rep.agreed, ground_truth=int(matches))
    return 0 if rep.agreed == rep.checked else 1


# parser -----------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("human", "records"), default="human")
    common.add_argument("--threads", type=int, default=1, help="worker cap for parallel enumeration")

    p = argparse.ArgumentParser(prog="hiddensums", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("census", parents=[common], help="count practical hidden sums")
    s.add_argument("--n", help="n or list (e.g. 2..6 or 3,5)")
    s.add_argument("--d", help="d or list")
    s.add_argument("--exact", action="store_true", help="brute-force enumeration")
    s.add_argument("--ratio", action="store_true", help="also check mu/nu against the exponential bound")
    s.add_argument("--total", type=int, metavar="N", help="total over d via Gaussian binomials")
    s.add_argument("--budget", type=int, help="candidate cap (default 2^28 or $HIDDENSUM_BUDGET)")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("validate", parents=[common], help="check a .hsum file")
    s.add_argument("file", help="path to .hsum, or 'example'")
    s.add_argument("--compact", action="store_true", help="also print rows as integers")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("add", parents=[common], help="x o y under a hidden sum")
    s.add_argument("file")
    s.add_argument("x")
    s.add_argument("y")
    s.set_defaults(func=cmd_add)

    s = sub.add_parser("decompose", parents=[common], help="coordinates in the o-basis")
    s.add_argument("file")
    s.add_argument("v")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("linearize", parents=[common], help="hidden sums linearizing a map")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--pi", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--sample", type=int, default=0, metavar="K")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--full-rank-only", action="store_true")
    s.add_argument("--emit-basis", metavar="PATH")
    s.set_defaults(func=cmd_linearize)

    s = sub.add_parser("proper", parents=[common], help="proper mixing layer check")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--bricks", type=int, required=True)
    s.add_argument("--brick-size", type=int, required=True)
    s.set_defaults(func=cmd_proper)

    s = sub.add_parser("present", parents=[common], help="PRESENT mixing layer case study")
    s.add_argument("--emit-lambda", metavar="PATH")
    s.add_argument("--emit-pi", metavar="PATH")
    s.add_argument("--repro", action="store_true", help="run the full linearization pipeline")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--show-sample", action="store_true")
    s.set_defaults(func=cmd_present)

    s = sub.add_parser("attack-demo", parents=[common], help="reconstruct a o-affine oracle")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--samples", type=int, default=10000)
    s.set_defaults(func=cmd_attack_demo)
    return p


def run(argv=None, stream=None, err=None) -> int:
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    out = Reporter(args.output, stream)
    try:
        return args.func(args, out)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=err)
        return 1
    except (formats.FormatError, DimensionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
