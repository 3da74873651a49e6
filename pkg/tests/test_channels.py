import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.stats import norm

from lpbounds.channels import (
    ChannelModel,
    negative_moment,
    parse_channel,
    partial_moments_quad,
    positive_moment,
    sample_llrs,
)
from lpbounds import galois


class TestModel:
    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
    def test_bsc_epsilon_domain(self, eps):
        with pytest.raises(ValueError):
            ChannelModel.bsc(eps)

    def test_bad_awgn(self):
        with pytest.raises(ValueError):
            ChannelModel.awgn(0.0)

    def test_G(self):
        assert ChannelModel.bsc(0.25).G == pytest.approx(math.log(3), rel=1e-15)

    @pytest.mark.parametrize(
        "text, kind",
        [("bsc:0.05", "bsc"), ("bec:0.3", "bec"), ("awgn:Ec=1,sigma2=0.8", "awgn"), ("AWGN:sigma2=2", "awgn")],
    )
    def test_parse(self, text, kind):
        assert parse_channel(text).kind == kind

    def test_parse_values(self):
        ch = parse_channel("awgn:Ec=2,sigma2=0.8")
        assert (ch.Ec, ch.sigma2) == (2.0, 0.8)
        assert parse_channel(ch.describe()) == ch

    @pytest.mark.parametrize("text", ["bsc", "bsc:x", "foo:0.1", "awgn:Ec=1", "awgn:sigma2=1,snr=3"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            parse_channel(text)


class TestSampling:
    def test_bsc_flip_fraction(self):
        g = sample_llrs(ChannelModel.bsc(0.25), 10**6, seed=1)
        G = ChannelModel.bsc(0.25).G
        assert set(np.unique(g)) == {-G, G}
        assert abs(np.mean(g < 0) - 0.25) < 0.002

    def test_awgn_moments(self):
        g = sample_llrs(ChannelModel.awgn(1.0), 10**6, seed=2)
        assert abs(g.mean() - 2) < 0.01
        assert abs(g.var() - 4) < 0.05

    def test_bec_support(self):
        g = sample_llrs(ChannelModel.bec(0.3), 10**5, seed=3)
        assert set(np.unique(g)) == {0.0, np.inf}
        assert abs(np.mean(g == 0) - 0.3) < 0.01

    def test_deterministic(self):
        ch = ChannelModel.awgn(0.7)
        assert np.array_equal(sample_llrs(ch, 50, 9), sample_llrs(ch, 50, 9))


class TestMoments:
    def test_bsc_values(self):
        ch = ChannelModel.bsc(0.25)
        assert positive_moment(ch) == pytest.approx(0.823959, abs=1e-6)
        assert negative_moment(ch) == pytest.approx(0.274653, abs=1e-6)

    def test_awgn_values(self):
        ch = ChannelModel.awgn(4.0)
        assert positive_moment(ch) == pytest.approx(0.5 * norm.cdf(0.5) + norm.pdf(0.5), abs=1e-12)
        assert positive_moment(ch) == pytest.approx(0.697796, abs=1e-6)
        assert negative_moment(ch) == pytest.approx(0.197796, abs=1e-6)

    def test_bec(self):
        ch = ChannelModel.bec(0.5)
        assert positive_moment(ch) == math.inf
        assert negative_moment(ch) == 0.0

    @given(st.floats(1e-3, 1e3))
    def test_awgn_closed_form_vs_quadrature(self, sigma2):
        ch = ChannelModel.awgn(sigma2)
        pos, neg = partial_moments_quad(ch)
        assert positive_moment(ch) == pytest.approx(pos, rel=1e-9, abs=1e-300)
        assert negative_moment(ch) == pytest.approx(neg, rel=1e-8, abs=1e-300)

    def test_awgn_against_independent_integral(self):
        # plain scipy integral of the density, no shared helper
        mu, sd = 0.5, 1.0
        neg = -integrate.quad(lambda g: g * norm.pdf(g, mu, sd), -np.inf, 0)[0]
        assert negative_moment(ChannelModel.awgn(4.0)) == pytest.approx(neg, rel=1e-9)

    @given(st.floats(0.001, 0.999).filter(lambda e: abs(e - 0.5) > 1e-9))
    def test_bsc_difference_is_mean(self, eps):
        ch = ChannelModel.bsc(eps)
        G = ch.G
        diff = positive_moment(ch) - negative_moment(ch)
        # E[Gamma] = G(1 - 2 eps), for every eps
        assert diff == pytest.approx(G * (1 - 2 * eps), abs=1e-12)
        assert positive_moment(ch) >= 0 and negative_moment(ch) >= 0

    @given(st.floats(1e-2, 1e2), st.floats(0.1, 10))
    def test_awgn_difference_is_mean(self, sigma2, Ec):
        ch = ChannelModel.awgn(sigma2, Ec)
        diff = positive_moment(ch) - negative_moment(ch)
        assert diff == pytest.approx(2 * Ec / sigma2, rel=1e-12, abs=1e-12)
        assert negative_moment(ch) >= 0

    @pytest.mark.parametrize("ch", [ChannelModel.bsc(0.1), ChannelModel.awgn(1.3)], ids=["bsc", "awgn"])
    def test_law_of_large_numbers(self, ch):
        n = 10**6
        g = sample_llrs(ch, n, seed=5)
        pos, neg = g[g >= 0], -g[g < 0]
        pos_terms = np.where(g >= 0, g, 0.0)
        neg_terms = np.where(g < 0, -g, 0.0)
        assert abs(pos.sum() / n - positive_moment(ch)) <= 3 * pos_terms.std() / math.sqrt(n)
        assert abs(neg.sum() / n - negative_moment(ch)) <= 3 * neg_terms.std() / math.sqrt(n)


class TestGalois:
    @pytest.mark.parametrize("m", [2, 3, 6, 9, 12])
    def test_exp_table_is_cyclic(self, m):
        exp = galois.exp_table(m)
        assert len(exp) == 2**m - 1
        assert sorted(exp.tolist()) == list(range(1, 2**m))

    def test_mul_matches_carryless_product(self):
        m = 4
        exp = galois.exp_table(m)
        log = galois.log_table(exp)
        poly = galois.PRIMITIVE_POLYS[m]
        for a in range(16):
            for b in range(16):
                p = 0
                for k in range(m):
                    if (b >> k) & 1:
                        p ^= a << k
                for d in range(2 * m - 2, m - 1, -1):
                    if (p >> d) & 1:
                        p ^= poly << (d - m)
                assert galois.mul(a, b, exp, log) == p
