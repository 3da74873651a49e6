"""Binary-input symmetric channels and their log-likelihood-ratio laws.

All statements assume the all-zeros codeword was sent, so the LLRs of a
block are i.i.d. copies of one random variable ``Gamma``.  Infinite LLRs are
stored as ``numpy.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erfcx
from scipy.stats import norm

BSC, AWGNC, BEC = "bsc", "awgn", "bec"


@dataclass(frozen=True)
class ChannelModel:
    """One of BSC(epsilon), AWGNC(Ec, sigma2) or BEC(epsilon)."""

    kind: str
    epsilon: float | None = None
    Ec: float = 1.0
    sigma2: float | None = None

    def __post_init__(self):
        if self.kind in (BSC, BEC):
            if self.epsilon is None or not 0.0 < self.epsilon < 1.0:
                raise ValueError(f"{self.kind}: epsilon must lie in (0, 1)")
        elif self.kind == AWGNC:
            if self.sigma2 is None or not self.sigma2 > 0 or not self.Ec > 0:
                raise ValueError("awgn: Ec and sigma2 must be positive")
        else:
            raise ValueError(f"unknown channel kind {self.kind!r}")

    @classmethod
    def bsc(cls, epsilon: float) -> "ChannelModel":
        return cls(BSC, epsilon=epsilon)

    @classmethod
    def awgn(cls, sigma2: float, Ec: float = 1.0) -> "ChannelModel":
        return cls(AWGNC, Ec=Ec, sigma2=sigma2)

    @classmethod
    def bec(cls, epsilon: float) -> "ChannelModel":
        return cls(BEC, epsilon=epsilon)

    @property
    def G(self) -> float:
        """BSC LLR magnitude ``log((1 - eps) / eps)``."""
        if self.kind != BSC:
            raise AttributeError("G is defined for the BSC only")
        return math.log((1 - self.epsilon) / self.epsilon)

    @property
    def llr_mean(self) -> float:
        if self.kind == BSC:
            return self.G * (1 - 2 * self.epsilon)
        if self.kind == AWGNC:
            return 2 * self.Ec / self.sigma2
        return math.inf

    @property
    def llr_sd(self) -> float:
        """Standard deviation of the AWGNC LLR, ``sqrt(4 Ec / sigma2)``."""
        return math.sqrt(4 * self.Ec / self.sigma2)

    def describe(self) -> str:
        if self.kind == AWGNC:
            return f"awgn:Ec={self.Ec:g},sigma2={self.sigma2:g}"
        return f"{self.kind}:{self.epsilon:g}"


def parse_channel(spec: str) -> ChannelModel:
    """Parse ``"bsc:0.05"``, ``"bec:0.3"`` or ``"awgn:Ec=1,sigma2=0.8"``."""
    kind, _, rest = spec.strip().partition(":")
    kind = kind.lower()
    if not rest:
        raise ValueError(f"channel spec {spec!r} has no parameters")
    try:
        if kind in (BSC, BEC):
            return ChannelModel(kind, epsilon=float(rest))
        if kind in (AWGNC, "awgnc"):
            params = {}
            for item in rest.split(","):
                key, _, val = item.partition("=")
                params[key.strip().lower()] = float(val)
            unknown = set(params) - {"ec", "sigma2"}
            if unknown:
                raise ValueError(f"unknown awgn parameters {sorted(unknown)}")
            return ChannelModel.awgn(params["sigma2"], params.get("ec", 1.0))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad channel spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown channel kind in {spec!r}")


def sample_llrs(ch: ChannelModel, n: int, seed) -> np.ndarray:
    """Draw ``n`` i.i.d. LLRs given the all-zeros input."""
    rng = np.random.default_rng(seed)
    if ch.kind == BSC:
        flips = rng.random(n) < ch.epsilon
        return np.where(flips, -ch.G, ch.G)
    if ch.kind == AWGNC:
        return ch.llr_mean + ch.llr_sd * rng.standard_normal(n)
    erased = rng.random(n) < ch.epsilon
    return np.where(erased, 0.0, np.inf)


def _gauss_partial_moments(mu: float, sd: float) -> tuple[float, float]:
    # E[G; G >= 0] and -E[G; G < 0] for G ~ N(mu, sd^2)
    t = mu / sd
    pos = mu * norm.cdf(t) + sd * norm.pdf(t)
    # sd*phi(t) - mu*Phi(-t), rescaled by exp(t^2/2) against cancellation
    scaled = sd * (1 / math.sqrt(2 * math.pi) - t * 0.5 * erfcx(t / math.sqrt(2)))
    neg = scaled * math.exp(-0.5 * t * t)
    return pos, max(neg, 0.0)


def positive_moment(ch: ChannelModel) -> float:
    """``E[Gamma | Gamma >= 0] * Pr(Gamma >= 0)``; the atom at 0 counts here."""
    if ch.kind == BSC:
        # for eps > 1/2 the non-negative value is -G, taken with probability eps
        g = ch.G
        return g * (1 - ch.epsilon) if g >= 0 else -g * ch.epsilon
    if ch.kind == AWGNC:
        return _gauss_partial_moments(ch.llr_mean, ch.llr_sd)[0]
    return math.inf


def negative_moment(ch: ChannelModel) -> float:
    """``-E[Gamma | Gamma < 0] * Pr(Gamma < 0)``, always non-negative."""
    if ch.kind == BSC:
        g = ch.G
        return g * ch.epsilon if g >= 0 else -g * (1 - ch.epsilon)
    if ch.kind == AWGNC:
        return _gauss_partial_moments(ch.llr_mean, ch.llr_sd)[1]
    return 0.0


def partial_moments_quad(ch: ChannelModel) -> tuple[float, float]:
    """AWGNC partial moments by adaptive quadrature (cross-check path)."""
    if ch.kind != AWGNC:
        raise ValueError("quadrature is only meaningful for the AWGNC")
    mu, sd = ch.llr_mean, ch.llr_sd

    def f(g):
        return g * norm.pdf(g, loc=mu, scale=sd)

    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    # split at the mode so the peak is resolved
    pos = integrate.quad(f, 0.0, max(mu, 0.0), **opts)[0] + integrate.quad(
        f, max(mu, 0.0), np.inf, **opts
    )[0]
    neg = -(
        integrate.quad(f, -np.inf, min(mu, 0.0), **opts)[0]
        + integrate.quad(f, min(mu, 0.0), 0.0, **opts)[0]
    )
    return pos, neg
