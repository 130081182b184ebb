import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polarperm.construction import (
    ReliabilityProfile,
    build_frozen_from_sequence,
    build_frozen_ga,
    frozen_from_profile,
    ga_density_evolution,
    log_phi,
    nr_reliability_sequence,
    phi_inverse_log,
    read_sequence_file,
    snr_to_sigma,
    write_sequence_file,
)
from polarperm.core import InvalidInputError

from oracles import mc_density_evolution


def q_func(x):
    return 0.5 * math.erfc(x / math.sqrt(2))


class TestPhi:
    # the fit jumps by about 0.025 (log domain) at x = 10, so values just
    # above the split have a second preimage just below it
    @pytest.mark.parametrize("x", [1e-6, 0.01, 0.5, 0.8, 0.9, 3.0, 9.9, 10.2, 25.0, 400.0])
    def test_inverse_roundtrip(self, x):
        assert phi_inverse_log(log_phi(x)) == pytest.approx(x, rel=1e-9)

    def test_near_zero(self):
        assert log_phi(0.0) == 0.0
        assert log_phi(1e-9) < 0
        assert abs(log_phi(0.867861 - 1e-9) - log_phi(0.867861 + 1e-9)) < 1e-3
        assert abs(log_phi(10 - 1e-9) - log_phi(10 + 1e-9)) < 0.05

    def test_decreasing_between_pieces(self):
        for lo, hi in [(1e-4, 9.999), (10.0, 80.0)]:
            xs = np.linspace(lo, hi, 500)
            vals = [log_phi(x) for x in xs]
            assert all(b < a for a, b in zip(vals, vals[1:]))


class TestDensityEvolution:
    @pytest.mark.parametrize("sigma", [0.3, 0.8, 1.5])
    def test_single_channel(self, sigma):
        assert ga_density_evolution(0, sigma).p_hat[0] == pytest.approx(q_func(1 / sigma), rel=1e-12)

    def test_useless_channel(self):
        assert np.all(np.abs(ga_density_evolution(6, 1e4).p_hat - 0.5) < 1e-3)

    @pytest.mark.parametrize("m", range(1, 7))
    @pytest.mark.parametrize("sigma", [0.5, 0.9, 1.4])
    def test_partial_order_exhaustive(self, m, sigma):
        prof = ga_density_evolution(m, sigma)
        n = 1 << m
        for i in range(n):
            for j in range(n):
                if j & i == i:   # j dominates i digit-wise
                    assert prof.log_p[j] <= prof.log_p[i] + 1e-12
        assert np.argmin(prof.log_p) == n - 1

    def test_monotone_in_sigma(self):
        sigmas = [0.4, 0.6, 0.8, 1.0, 1.3]
        profs = [ga_density_evolution(6, s).log_p for s in sigmas]
        for a, b in zip(profs, profs[1:]):
            assert np.all(b >= a - 1e-12)

    def test_underflow_keeps_order(self):
        prof = ga_density_evolution(10, 0.3)
        assert np.all(np.isfinite(prof.log_p))
        assert len(set(prof.log_p.tolist())) > 0.9 * prof.n

    def test_quick_monte_carlo(self):
        # reduced-budget version of the acceptance check
        prof = ga_density_evolution(3, 0.8)
        mc = mc_density_evolution(3, 0.8, 400_000, seed=3, check="exact")
        keep = prof.p_hat >= 1e-4
        np.testing.assert_allclose(prof.p_hat[keep], mc[keep], rtol=0.12)

    def test_rejects(self):
        with pytest.raises(InvalidInputError):
            ga_density_evolution(3, 0.0)
        with pytest.raises(InvalidInputError):
            ga_density_evolution(-1, 1.0)

    def test_profile_range_enforced(self):
        with pytest.raises(InvalidInputError):
            ReliabilityProfile(np.array([0.1, 0.6]), 1.0)
        with pytest.raises(InvalidInputError):
            ReliabilityProfile(np.array([-0.1, 0.2]), 1.0)


class TestSnr:
    def test_conventions(self):
        assert snr_to_sigma(0.0, 1.0, "esno") == pytest.approx(math.sqrt(0.5))
        assert snr_to_sigma(3.0, 0.5, "ebno") == pytest.approx(snr_to_sigma(3.0 + 10 * math.log10(0.5), 1.0, "esno"))
        with pytest.raises(InvalidInputError):
            snr_to_sigma(1.0, 0.5, "snr")


class TestBuilders:
    def test_full_rate(self):
        assert build_frozen_ga(16, 16, 2.0).frozen == frozenset()
        assert build_frozen_from_sequence(8, 8, range(8)).frozen == frozenset()

    @pytest.mark.parametrize("k", [0, 33])
    def test_bad_k(self, k):
        with pytest.raises(InvalidInputError):
            build_frozen_ga(32, k, 2.0)

    def test_extremes_of_partial_order(self):
        c = build_frozen_ga(32, 16, 2.0)
        assert 0 in c.frozen and 31 not in c.frozen

    @pytest.mark.parametrize("design", [0.0, 2.0, 4.0])
    def test_nested_in_k(self, design):
        prev = build_frozen_ga(64, 1, design).frozen
        for k in range(2, 65):
            cur = build_frozen_ga(64, k, design).frozen
            assert cur < prev
            prev = cur

    def test_sequence_equals_ga_ranking(self):
        sigma = snr_to_sigma(1.5, 0.5)
        prof = ga_density_evolution(7, sigma)
        seq = prof.ranking().tolist()
        for k in (1, 40, 64, 100, 128):
            assert build_frozen_from_sequence(128, k, seq) == frozen_from_profile(prof, k)
        assert build_frozen_from_sequence(128, 64, seq) == build_frozen_ga(128, 64, 1.5)

    @pytest.mark.parametrize("seq", [[0, 1, 2], [0, 1, 1, 2], [0, 1, 2, 5]])
    def test_malformed_sequence(self, seq):
        with pytest.raises(InvalidInputError):
            build_frozen_from_sequence(4, 2, seq)

    def test_nr_sequence(self):
        full = nr_reliability_sequence(1024)
        assert sorted(full) == list(range(1024))
        assert full[:16] == [0, 1, 2, 4, 8, 16, 32, 3, 5, 64, 9, 6, 17, 10, 18, 128]
        s256 = nr_reliability_sequence(256)
        assert s256 == [v for v in full if v < 256]
        code = build_frozen_from_sequence(256, 128, s256)
        assert code.k == 128 and 0 in code.frozen and 255 not in code.frozen

    @given(st.permutations(range(16)))
    def test_sequence_file_roundtrip(self, tmp_path_factory, seq):
        path = tmp_path_factory.mktemp("seq") / "s.txt"
        write_sequence_file(path, seq)
        assert read_sequence_file(path) == list(seq)
