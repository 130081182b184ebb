import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polarperm.core import (
    BitPermutation,
    InvalidInputError,
    LayerPermutation,
    PolarCode,
    apply_permutation,
    encode,
    extract_info,
    generator_matrix,
    invert_permutation,
    kronecker_transform,
    layer_hamming_distance,
    layer_to_bit_permutation,
    place_info,
)

from conftest import EX8_Y
from oracles import digit_permutation, encode_matrix, kron_power

EX8_PI = [0, 1, 4, 5, 2, 3, 6, 7]


@st.composite
def layer_perm(draw, m=None):
    m = draw(st.integers(1, 6)) if m is None else m
    return LayerPermutation(tuple(draw(st.permutations(range(m)))))


class TestPolarCode:
    def test_fields(self):
        c = PolarCode.from_frozen(8, {0, 1, 2, 4})
        assert (c.n, c.k, c.m) == (8, 4, 3)
        assert c.info.tolist() == [3, 5, 6, 7]
        assert c.frozen_mask.tolist() == [1, 1, 1, 0, 1, 0, 0, 0]

    @pytest.mark.parametrize("n,k,frozen", [
        (6, 3, {0, 1, 2}),      # not a power of two
        (8, 4, {0, 1, 2}),      # |F| != n - k
        (8, 5, {0, 1, 9}),      # out of range
        (8, 0, set(range(8))),  # k = 0
        (1, 1, set()),          # m = 0
    ])
    def test_rejects(self, n, k, frozen):
        with pytest.raises(InvalidInputError):
            PolarCode(n=n, k=k, frozen=frozenset(frozen))

    def test_full_rate(self):
        assert PolarCode.from_frozen(4, ()).k == 4


class TestTransform:
    def test_zero(self):
        assert not kronecker_transform(np.zeros(8, np.uint8)).any()

    def test_last_row_all_ones(self):
        u = np.zeros(8, np.uint8)
        u[-1] = 1
        assert kronecker_transform(u).tolist() == [1] * 8

    @pytest.mark.parametrize("m", range(1, 6))
    def test_rows_match_explicit_matrix(self, m):
        n = 1 << m
        g = kron_power(m)
        assert np.array_equal(generator_matrix(m), g)
        for j in range(n):
            e = np.zeros(n, np.uint8)
            e[j] = 1
            assert np.array_equal(kronecker_transform(e), g[j])

    @given(st.integers(1, 5).flatmap(lambda m: st.lists(st.integers(0, 1), min_size=1 << m, max_size=1 << m)))
    def test_matches_matrix_product(self, u):
        assert np.array_equal(kronecker_transform(u), encode_matrix(u))

    @given(st.integers(1, 7).flatmap(lambda m: st.lists(st.integers(0, 1), min_size=1 << m, max_size=1 << m)))
    def test_involution(self, u):
        assert np.array_equal(kronecker_transform(kronecker_transform(u)), u)

    def test_batch_rows(self):
        rng = np.random.default_rng(0)
        u = rng.integers(0, 2, (5, 16), dtype=np.uint8)
        x = kronecker_transform(u)
        for r in range(5):
            assert np.array_equal(x[r], encode_matrix(u[r]))

    @pytest.mark.parametrize("n", [0, 3, 12])
    def test_bad_length(self, n):
        with pytest.raises(InvalidInputError):
            kronecker_transform(np.zeros(n, np.uint8))


class TestEncode:
    def test_zero_info(self):
        c = PolarCode.from_frozen(8, {0, 1, 2, 4})
        assert not encode([0, 0, 0, 0], c).any()

    def test_ex8_codeword(self, ex8_code):
        x = encode([0, 1, 1, 1], ex8_code)
        assert x.tolist() == [1, 0, 0, 1, 1, 0, 0, 1]
        # consistent with the channel signs of the example away from the noisy positions
        assert np.array_equal(x[[0, 7]], (EX8_Y[[0, 7]] < 0).astype(np.uint8))

    def test_random_n16_against_matrix(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            frozen = rng.choice(16, 7, replace=False)
            c = PolarCode.from_frozen(16, frozen)
            info = rng.integers(0, 2, c.k)
            u = np.zeros(16, np.int64)
            u[np.sort(np.setdiff1d(np.arange(16), frozen))] = info
            assert np.array_equal(encode(info, c), encode_matrix(u))

    def test_roundtrip_info(self, ex8_code):
        u = place_info([1, 0, 1, 1], ex8_code)
        assert extract_info(u, ex8_code).tolist() == [1, 0, 1, 1]
        assert u[list(ex8_code.frozen)].sum() == 0

    def test_length_mismatch(self, ex8_code):
        with pytest.raises(InvalidInputError):
            encode([1, 0, 1], ex8_code)


class TestPermutations:
    def test_identity(self):
        assert layer_to_bit_permutation(LayerPermutation.identity(3)) == BitPermutation.identity(8)

    def test_example_permutation(self):
        pi = layer_to_bit_permutation(LayerPermutation((0, 2, 1)))
        assert pi.tolist() == EX8_PI

    def test_example_application(self):
        pi = BitPermutation(EX8_PI)
        assert apply_permutation(pi, EX8_Y).tolist() == [-3.42, 2.97, 1.01, 0.32, 3.16, 1.45, 2.00, -6.12]
        assert apply_permutation(BitPermutation.identity(8), EX8_Y).tolist() == EX8_Y.tolist()

    def test_example_involution(self):
        pi = BitPermutation(EX8_PI)
        assert invert_permutation(pi) == pi

    @pytest.mark.parametrize("pl", list(itertools.permutations(range(4))))
    def test_all_m4_bijective_and_match_oracle(self, pl):
        lp = LayerPermutation(pl)
        pi = layer_to_bit_permutation(lp)
        assert sorted(pi.tolist()) == list(range(16))
        assert pi.tolist() == digit_permutation(pl)
        if lp.compose(lp).is_identity():
            assert pi.compose(pi) == BitPermutation.identity(16)

    @given(layer_perm(), layer_perm())
    def test_action_composition(self, a, b):
        # with out[i] = v[p(i)] and (a o b)(i) = a(b(i)), applying pi_b then pi_a
        # is the action of pi of (a o b)
        if a.m != b.m:
            b = LayerPermutation.identity(a.m)
        n = 1 << a.m
        v = np.arange(n) * 3 + 1
        pa, pb = layer_to_bit_permutation(a), layer_to_bit_permutation(b)
        assert np.array_equal(apply_permutation(pa, apply_permutation(pb, v)),
                              apply_permutation(layer_to_bit_permutation(a.compose(b)), v))
        # which makes pl -> pi an anti-homomorphism of maps
        assert layer_to_bit_permutation(a.compose(b)) == pb.compose(pa)

    @given(st.integers(1, 6).flatmap(lambda m: st.permutations(range(1 << m))), st.data())
    def test_invert_roundtrip(self, p, data):
        p = BitPermutation(p)
        v = np.array(data.draw(st.lists(st.integers(-9, 9), min_size=p.n, max_size=p.n)))
        assert np.array_equal(apply_permutation(invert_permutation(p), apply_permutation(p, v)), v)
        assert p.compose(invert_permutation(p)) == BitPermutation.identity(p.n)

    def test_commutation_1000(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            m = int(rng.integers(1, 7))
            pl = LayerPermutation(tuple(rng.permutation(m).tolist()))
            pi = layer_to_bit_permutation(pl)
            u = rng.integers(0, 2, 1 << m, dtype=np.uint8)
            assert np.array_equal(kronecker_transform(apply_permutation(pi, u)),
                                  apply_permutation(pi, kronecker_transform(u)))

    def test_apply_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            apply_permutation(BitPermutation.identity(8), np.zeros(4))

    @pytest.mark.parametrize("bad", [(0, 0, 1), (0, 3), ()])
    def test_layer_perm_validation(self, bad):
        with pytest.raises(InvalidInputError):
            LayerPermutation(bad)

    def test_bit_perm_validation(self):
        with pytest.raises(InvalidInputError):
            BitPermutation([0, 0, 1, 2])

    def test_layer_inverse(self):
        p = LayerPermutation((2, 0, 3, 1))
        assert p.compose(p.inverse()).is_identity()


class TestHammingDistance:
    def test_examples(self):
        ident3 = LayerPermutation.identity(3)
        assert layer_hamming_distance(ident3, ident3) == 0
        assert layer_hamming_distance(ident3, LayerPermutation((0, 2, 1))) == 2
        assert layer_hamming_distance(LayerPermutation.identity(5), LayerPermutation((1, 2, 3, 4, 0))) == 5

    def test_size_mismatch(self):
        with pytest.raises(InvalidInputError):
            layer_hamming_distance(LayerPermutation.identity(3), LayerPermutation.identity(4))

    @given(layer_perm(m=5), layer_perm(m=5))
    def test_symmetric(self, a, b):
        assert layer_hamming_distance(a, b) == layer_hamming_distance(b, a)
        assert layer_hamming_distance(a, b) != 1
