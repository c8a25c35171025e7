from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiddensums import BitMatrix, BitVector
from hiddensums.gf2core import SingularMatrixError, conjugate, rank
from hiddensums.hiddensum import ConjugatedSum, HiddenSum, kappa, u_basis, validate
from hiddensums.linearize import (
    BlockLinearMap,
    NotBlockTriangularError,
    NotInKernelError,
    SamplingExhaustedError,
    block_form,
    build_system,
    count_full_rank_solutions,
    decode,
    enumerate_solutions,
    fixed_coordinates,
    full_rank_fraction,
    linearize,
    random_block_map,
    sample_solutions,
    solve,
    var_index,
    wilson_interval,
)
from hiddensums.tbcipher import PRESENT_PERMUTATION, present_mixing_layer, present_pi

from oracles import all_pairs, apply, brute_force_linearizers, is_homomorphism


def identity_map(n, d):
    return BlockLinearMap(BitMatrix.identity(n), BitMatrix.zeros(n, d), BitMatrix.identity(d))


def swap_map():
    return BlockLinearMap(BitMatrix.from_rows(["01", "10"]), BitMatrix.zeros(2, 1), BitMatrix.identity(1))


@pytest.fixture(scope="module")
def present_basis():
    return linearize(present_mixing_layer(), present_pi(), 60, 4)


class TestBlockLinearMap:
    def test_singular_blocks(self):
        with pytest.raises(SingularMatrixError):
            BlockLinearMap(BitMatrix.from_rows(["11", "11"]), BitMatrix.zeros(2, 1), BitMatrix.identity(1))

    def test_round_trip(self):
        blk = random_block_map(4, 3, seed=1)
        assert BlockLinearMap.from_matrix(blk.matrix(), 4, 3) == blk

    def test_block_form_identity(self):
        blk = block_form(BitMatrix.identity(5), BitMatrix.identity(5), 3, 2)
        assert blk == identity_map(3, 2)

    def test_present_not_block_triangular_without_pi(self):
        with pytest.raises(NotBlockTriangularError, match="row 61"):
            block_form(present_mixing_layer(), BitMatrix.identity(64), 60, 4)

    def test_present_block_form(self):
        blk = block_form(present_mixing_layer(), present_pi(), 60, 4)
        assert blk.lambda3 == BitMatrix.identity(4)
        assert blk.lambda2.is_zero()
        full = conjugate(present_mixing_layer(), present_pi()).to_array()
        assert not full[60:, :60].any()


class TestSystem:
    def test_shape(self):
        for n, d in [(2, 1), (3, 2), (5, 3)]:
            sys = build_system(random_block_map(n, d, seed=n))
            assert sys.nvars == n * n * d
            assert sys.nrows == n * n * d + n * (n + 1) // 2 * d

    def test_present_shape(self):
        sys = build_system(block_form(present_mixing_layer(), present_pi(), 60, 4))
        assert (sys.nrows, sys.nvars) == (21720, 14400)

    def test_var_index(self):
        n, d = 3, 2
        seen = [var_index(n, d, i, r, c) for i in range(n) for r in range(n) for c in range(d)]
        assert seen == list(range(n * n * d))

    def test_lambda2_independence(self):
        blk = random_block_map(4, 2, seed=3)
        other = BlockLinearMap(blk.lambda1, BitMatrix.from_array(1 - blk.lambda2.to_array()), blk.lambda3)
        assert np.array_equal(build_system(blk).words, build_system(other).words)

    def test_swap_example(self):
        basis = solve(build_system(swap_map()))
        assert basis.dimension == 1
        hs = decode(basis, basis.vectors()[0])
        assert hs.blocks[:, :, 0].tolist() == [[0, 1], [1, 0]]
        assert validate(hs).dim_U == 1

    def test_swap_hand_solved(self):
        # brute force the 4-variable system over all 16 assignments
        sys = build_system(swap_map())
        A = sys.to_matrix().to_array().astype(int)
        sols = [v for v in range(16) if not ((A @ ((v >> np.arange(4)) & 1)) % 2).any()]
        assert sorted(sols) == [0, 0b0110]

    @pytest.mark.parametrize("n", range(2, 9))
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_identity_kernel_dimension(self, n, d):
        basis = linearize(BitMatrix.identity(n + d), BitMatrix.identity(n + d), n, d)
        assert basis.dimension == d * n * (n - 1) // 2

    def test_identity_n3_d2_full_rank_count(self):
        basis = linearize(BitMatrix.identity(5), BitMatrix.identity(5), 3, 2)
        sols = enumerate_solutions(basis)
        assert len(sols) == 64 == len({s.blocks.tobytes() for s in sols})
        assert count_full_rank_solutions(basis) == 42
        assert sum(validate(s).exact_dim_U for s in sols) == 42


class TestDecode:
    def test_zero_point(self):
        basis = linearize(BitMatrix.identity(5), BitMatrix.identity(5), 3, 2)
        hs = decode(basis, BitVector.zero(basis.nvars))
        assert hs == HiddenSum.zero(3, 2)
        assert not validate(hs).is_practical_hidden_sum

    def test_rejects_non_kernel_point(self):
        basis = solve(build_system(swap_map()))
        with pytest.raises(NotInKernelError):
            decode(basis, BitVector.unit(4, 1))

    def test_rejects_outside_span_without_system(self):
        basis = solve(build_system(swap_map()))
        bare = replace(basis, system=None)
        with pytest.raises(NotInKernelError):
            decode(bare, BitVector.unit(4, 2))
        assert decode(bare, bare.vectors()[0]).blocks.any()


class TestCorrectness:
    @pytest.mark.parametrize(
        "n,d",
        [(n, d) for n in range(2, 6) for d in range(1, 7 - n)],
    )
    def test_kernel_equals_brute_force(self, n, d):
        for seed in range(2):
            blk = random_block_map(n, d, seed=seed, permutation=bool(seed))
            basis = solve(build_system(blk))
            kernel = {hs.blocks.tobytes() for hs in enumerate_solutions(basis)}
            assert kernel == brute_force_linearizers(blk.matrix().to_array(), n, d)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(2, 5), st.integers(1, 3), st.integers(0, 10**6))
    def test_decoded_solutions_linearize(self, n, d, seed):
        blk = random_block_map(n, d, seed=seed, permutation=seed % 2 == 0)
        basis = solve(build_system(blk))
        lam = blk.matrix().to_array()
        X, Y = all_pairs(n + d)
        for hs in sample_solutions(basis, 4, seed=seed):
            assert is_homomorphism(hs.add_many, lam, X, Y)

    def test_mix1_u_invariant(self):
        for seed in range(6):
            blk = random_block_map(4, 2, seed=seed, permutation=True)
            basis = solve(build_system(blk))
            lam = blk.matrix()
            for hs in sample_solutions(basis, 5, seed=seed):
                U = BitMatrix.from_vectors(u_basis(hs))
                assert rank(BitMatrix.from_vectors(u_basis(hs) + [v for v in (U @ lam).row_vectors()])) == U.rows

    def test_mix2_kappa_commutes(self):
        blk = random_block_map(3, 2, seed=4, permutation=True)
        basis = solve(build_system(blk))
        lam = blk.matrix()
        for hs in enumerate_solutions(basis):
            for x in range(32):
                xv = BitVector(5, x)
                xl = BitVector.from_array(apply(xv.to_array()[None, :], lam.to_array())[0])
                assert kappa(hs, xv) @ lam == lam @ kappa(hs, xl)


class TestSampling:
    def test_deterministic(self):
        basis = linearize(BitMatrix.identity(6), BitMatrix.identity(6), 4, 2)
        a = sample_solutions(basis, 5, seed=3)
        assert a == sample_solutions(basis, 5, seed=3)

    def test_full_rank_only(self):
        basis = linearize(BitMatrix.identity(6), BitMatrix.identity(6), 4, 2)
        for hs in sample_solutions(basis, 10, seed=0, full_rank_only=True):
            assert validate(hs).exact_dim_U

    def test_exhausted(self):
        # n=3, d=1: no full-rank solution exists at all
        basis = linearize(BitMatrix.identity(4), BitMatrix.identity(4), 3, 1)
        with pytest.raises(SamplingExhaustedError, match="acceptance rate 0"):
            sample_solutions(basis, 1, seed=0, full_rank_only=True)

    def test_full_rank_fraction_exact(self):
        basis = linearize(BitMatrix.identity(5), BitMatrix.identity(5), 3, 2)
        est = full_rank_fraction(basis)
        assert est.exact and est.full_rank == 42 and est.total == 64

    def test_wilson(self):
        lo, hi = wilson_interval(50, 100)
        assert lo < 0.5 < hi and abs((lo + hi) / 2 - 0.5) < 1e-12
        assert wilson_interval(0, 10)[0] == 0.0


class TestFixedCoordinates:
    def test_cases(self):
        assert fixed_coordinates([1, 2, 3, 4, 5]) == [1, 2, 3, 4, 5]
        assert fixed_coordinates([2, 1]) == []
        assert fixed_coordinates(PRESENT_PERMUTATION) == [1, 22, 43, 64]


class TestPresent:
    def test_kernel_dimension(self, present_basis):
        assert present_basis.dimension == 2360
        assert present_basis.seconds > 0

    def test_samples_are_s2_s3(self, present_basis):
        for hs in sample_solutions(present_basis, 3, seed=1):
            rep = validate(hs)
            assert rep.symmetric and rep.zero_diagonal

    def test_full_rank_sample(self, present_basis):
        (hs,) = sample_solutions(present_basis, 1, seed=0, full_rank_only=True)
        rep = validate(hs)
        assert rep.rank == 60 and rep.dim_U == 4

    def test_linearizes_conjugated_and_original(self, present_basis):
        rng = np.random.default_rng(0)
        X, Y = rng.integers(0, 2, (2, 2000, 64)).astype(np.uint8)
        (hs,) = sample_solutions(present_basis, 1, seed=5)
        lam_hat = conjugate(present_mixing_layer(), present_pi()).to_array()
        assert is_homomorphism(hs.add_many, lam_hat, X, Y)
        # transported back, the operation linearizes lambda_P itself
        cs = ConjugatedSum(hs, present_pi())
        assert is_homomorphism(cs.add_many, present_mixing_layer().to_array(), X, Y)
