import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from polarperm.core import InvalidInputError, PolarCode, encode, kronecker_transform
from polarperm.sc import f_minus_exact, f_minus_minsum, f_plus, metric_is_valid, sc_decode, sc_decode_batch

from conftest import EX8_Y
from oracles import sc_reference

finite = st.floats(-50, 50, allow_nan=False)


def random_code(rng, n):
    k = int(rng.integers(1, n + 1))
    return PolarCode.from_frozen(n, rng.choice(n, n - k, replace=False))


class TestKernels:
    @given(finite)
    def test_exact_zero(self, x):
        assert f_minus_exact(x, 0.0) == pytest.approx(0.0, abs=1e-12)

    @given(finite, finite)
    def test_exact_symmetric_and_bounded(self, x, y):
        a = f_minus_exact(x, y)
        assert a == f_minus_exact(y, x)
        assert abs(a) <= min(abs(x), abs(y)) + 1e-12
        if abs(a) > 1e-12:
            assert np.sign(a) == np.sign(x) * np.sign(y)

    def test_exact_against_high_precision(self):
        mpmath.mp.dps = 50
        x, y = mpmath.mpf(10), mpmath.mpf(12)
        ref = mpmath.log((mpmath.exp(x + y) + 1) / (mpmath.exp(x) + mpmath.exp(y)))
        assert abs(f_minus_exact(10.0, 12.0) - float(ref)) < 1e-6

    def test_exact_no_overflow(self):
        assert f_minus_exact(800.0, -900.0) == pytest.approx(-800.0)

    def test_minsum_examples(self):
        assert f_minus_minsum(2, -3) == -2
        assert f_minus_minsum(0, 5) == 0
        assert f_minus_minsum(0, -5) == 0
        assert f_minus_minsum(-3.42, 1.01) == -1.01

    def test_minsum_sign_of_zero_is_positive(self):
        assert f_minus_minsum(-0.0, -2.0) >= 0
        assert f_minus_minsum(-4.0, 0.0) == 0.0

    def test_f_plus(self):
        assert f_plus(-3.42, 1.01, 0) == pytest.approx(-2.41)
        assert f_plus(-3.42, 1.01, 1) == pytest.approx(4.43)
        with pytest.raises(InvalidInputError):
            f_plus(1.0, 2.0, 2)


class TestWorkedExample:
    def test_identity_trace(self, backend, ex8_code):
        res = sc_decode(EX8_Y, ex8_code)
        assert res.decision_llrs[3] == pytest.approx(-0.14, abs=0.005)
        assert res.u_bits[3] == 1
        assert res.info_bits(ex8_code).tolist() != [0, 1, 1, 1]
        assert res.metric == pytest.approx(-3.48)
        np.testing.assert_allclose(res.decision_llrs, [0.32, -1.33, -0.99, -0.14, -1.16, 1.49, -3.27, -13.49])


class TestScDecode:
    def test_positive_llrs(self, backend):
        rng = np.random.default_rng(3)
        for n in (2, 8, 64):
            code = random_code(rng, n)
            res = sc_decode(rng.uniform(0.1, 5, n), code)
            assert not res.codeword.any() and res.metric == 0

    @pytest.mark.parametrize("n", [8, 16, 32])
    def test_matches_per_bit_oracle(self, backend, n):
        rng = np.random.default_rng(n)
        for _ in range(40):
            code = PolarCode.from_frozen(8, {0, 1, 2, 4}) if n == 8 else random_code(rng, n)
            y = rng.normal(1.0, 2.0, n)
            res = sc_decode(y, code)
            u, leaf, metric = sc_reference(y, code.frozen_mask)
            assert np.array_equal(res.u_bits, u)
            np.testing.assert_allclose(res.decision_llrs, leaf, atol=1e-9)
            assert res.metric == pytest.approx(metric, abs=1e-9)
            assert np.array_equal(res.codeword, kronecker_transform(u))
            fz = code.frozen_mask.astype(bool)
            assert res.metric == pytest.approx(np.minimum(0, leaf[fz]).sum(), abs=1e-9)

    @given(st.integers(1, 7), st.integers(0, 2**32 - 1))
    def test_metric_properties(self, m, seed):
        rng = np.random.default_rng(seed)
        n = 1 << m
        code = random_code(rng, n)
        res = sc_decode(rng.normal(0.5, 2.0, n), code)
        assert metric_is_valid(res.metric)
        fz = code.frozen_mask.astype(bool)
        assert (res.metric == 0) == bool(np.all(res.decision_llrs[fz] >= 0))
        assert np.array_equal(res.codeword, kronecker_transform(res.u_bits))
        assert not res.u_bits[fz].any()

    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_noiseless(self, m, seed):
        rng = np.random.default_rng(seed)
        n = 1 << m
        code = random_code(rng, n)
        info = rng.integers(0, 2, code.k)
        x = encode(info, code)
        res = sc_decode(20.0 * (1 - 2.0 * x), code)
        assert np.array_equal(res.codeword, x) and res.metric == 0
        assert np.array_equal(res.info_bits(code), info)

    def test_decision_tie_goes_to_one(self, backend):
        code = PolarCode.from_frozen(2, ())
        res = sc_decode([0.0, 0.0], code)
        assert res.u_bits.tolist() == [1, 1]

    def test_batch_matches_single(self, backend):
        rng = np.random.default_rng(5)
        code = random_code(rng, 32)
        y = rng.normal(0.5, 2, (20, 32))
        u, metric = sc_decode_batch(y, code)
        for r in range(20):
            res = sc_decode(y[r], code)
            assert np.array_equal(u[r], res.u_bits) and metric[r] == res.metric

    @pytest.mark.parametrize("bad", [np.zeros(4), np.array([0, 1, np.inf, 0, 0, 0, 0, 0.0]),
                                     np.array([np.nan] * 8)])
    def test_rejects(self, ex8_code, bad):
        with pytest.raises(InvalidInputError):
            sc_decode(bad, ex8_code)
