"""End-to-end simulation of the benchmark experiment.

Per trial: draw alpha from the Gaussian prior, push the coherent state
through the channel, homodyne one quadrature (alternating x, p by default),
and accumulate (z - g_z z_alpha)^2. Rejected trials of post-selected channels
are excluded from both counts and normalization, which realizes the
acceptance-normalized noises directly.

Reproducibility contract: trials are partitioned into fixed chunks of
CHUNK_SIZE; chunk i uses an independent Philox substream with key
(seed, i), and all random draws happen in a fixed order per chunk
(prior normals; scheduling uniforms if schedule='random'; then channel
draws - for measure-and-prepare: two outcome normals, acceptance uniforms
when acceptance_c > 0, one homodyne normal; for Gaussian channels: one
homodyne normal). Per-chunk partial sums are combined with math.fsum (exact,
hence order-independent), so results do not depend on how chunks would be
distributed over workers, and identical (seed, config, channel) inputs give
bit-identical estimates on either kernel backend.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .benchmark import BenchmarkParams
from .channels import (
    GaussianChannelSpec,
    MeasurePrepareSpec,
    is_completely_positive,
)

CHUNK_SIZE = 65536

from . import _mc_fallback

if os.environ.get("CVQBENCH_DISABLE_EXT"):
    _kernel = _mc_fallback
else:
    try:
        from . import _mc_cython as _kernel  # type: ignore[no-redef]
    except ImportError:
        _kernel = _mc_fallback


def kernel_backend() -> str:
    """Name of the active accumulation kernel: 'cython' or 'python'."""
    return _kernel.BACKEND_NAME


@dataclass(frozen=True)
class ExperimentConfig:
    """Trial count, RNG seed, benchmark parameters and quadrature schedule."""

    n_samples: int
    seed: int
    params: BenchmarkParams
    schedule: str = "alternate"

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.params.lam <= 0:
            raise ValueError("sampling requires a normalizable prior (lam > 0)")
        if self.schedule not in ("alternate", "random"):
            raise ValueError("schedule must be 'alternate' or 'random'")


@dataclass(frozen=True)
class Estimate:
    """Sample means of (z - g_z z_alpha)^2 with standard errors and counts."""

    v_x_hat: float
    v_p_hat: float
    se_x: float
    se_p: float
    count_x: int
    count_p: int
    n_total: int
    n_accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_total


@dataclass(frozen=True)
class CertifiedVerdict:
    """Outcome of the conservative statistical violation test.

    factor_x/factor_p are the upper-confidence-limit bracket factors; the
    violation is certified only when both are positive and their product still
    falls below the EB bound rhs. Anything else is inconclusive - the test
    never certifies a channel as entanglement breaking.
    """

    certified: bool
    factor_x: float
    factor_p: float
    lhs: float
    rhs: float
    margin: float
    z_star: float
    confidence: float


def sample_prior(lam: float, rng: np.random.Generator) -> complex:
    """Draw alpha from p_lam: Re and Im independent N(0, 1/(2 lam))."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    sigma = math.sqrt(1.0 / (2.0 * lam))
    return complex(sigma * rng.standard_normal(), sigma * rng.standard_normal())


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    """Independent substream for chunk `index` (Philox keyed on (seed, index))."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def _channel_coefficients(channel) -> tuple[float, float, float, float]:
    """(k_x, k_p, s_x, s_p): outcome z_out = k_z * base_z + s_z * normal."""
    if isinstance(channel, GaussianChannelSpec):
        if not is_completely_positive(channel):
            raise ValueError("channel spec is not completely positive (unphysical channel)")
        return (
            channel.t_x,
            channel.t_p,
            math.sqrt(channel.t_x ** 2 / 2.0 + channel.n_x),
            math.sqrt(channel.t_p ** 2 / 2.0 + channel.n_p),
        )
    if isinstance(channel, MeasurePrepareSpec):
        e_x = math.exp(-(channel.q + channel.R))
        e_p = math.exp(channel.q + channel.R)
        return (
            channel.gamma * e_x,
            channel.gamma * e_p,
            e_x / math.sqrt(2.0),
            e_p / math.sqrt(2.0),
        )
    raise TypeError(f"unsupported channel type: {type(channel).__name__}")


def run_experiment(channel, config: ExperimentConfig, *, kernel=None) -> Estimate:
    """Simulate the benchmark and estimate the averaged quadrature noises.

    `kernel` overrides the accumulation backend (testing/benchmarking only).
    """
    if kernel is None:
        kernel = _kernel
    k_x, k_p, s_x, s_p = _channel_coefficients(channel)
    is_mp = isinstance(channel, MeasurePrepareSpec)
    g_x, g_p = config.params.g_x, config.params.g_p
    s_prior = math.sqrt(1.0 / config.params.lam)  # std of x_alpha (and p_alpha)

    partials = []
    n_chunks = (config.n_samples + CHUNK_SIZE - 1) // CHUNK_SIZE
    for i in range(n_chunks):
        length = min(CHUNK_SIZE, config.n_samples - i * CHUNK_SIZE)
        rng = _chunk_rng(config.seed, i)
        x_a = s_prior * rng.standard_normal(length)
        p_a = s_prior * rng.standard_normal(length)
        if config.schedule == "alternate":
            sel_x = (np.arange(length) % 2 == 0)
        else:
            sel_x = rng.random(length) < 0.5
        if is_mp:
            m_x, m_p = math.exp(channel.r), math.exp(-channel.r)
            sb_x = math.sqrt((math.exp(2.0 * channel.r) + 1.0) / 2.0)
            sb_p = math.sqrt((math.exp(-2.0 * channel.r) + 1.0) / 2.0)
            base_x = m_x * x_a + sb_x * rng.standard_normal(length)
            base_p = m_p * p_a + sb_p * rng.standard_normal(length)
            if channel.acceptance_c > 0.0:
                u_acc = rng.random(length)
                acc = u_acc < np.exp(
                    (-0.5 * channel.acceptance_c) * (base_x * base_x + base_p * base_p)
                )
            else:
                acc = np.ones(length, dtype=bool)
        else:
            base_x, base_p = x_a, p_a
            acc = np.ones(length, dtype=bool)
        n_out = rng.standard_normal(length)
        partials.append(
            kernel.accumulate_chunk(
                x_a, p_a, base_x, base_p,
                sel_x.astype(np.uint8), acc.astype(np.uint8), n_out,
                k_x, k_p, s_x, s_p, g_x, g_p,
            )
        )

    s2x = math.fsum(p[0] for p in partials)
    s4x = math.fsum(p[1] for p in partials)
    c_x = sum(p[2] for p in partials)
    s2p = math.fsum(p[3] for p in partials)
    s4p = math.fsum(p[4] for p in partials)
    c_p = sum(p[5] for p in partials)
    n_acc = sum(p[6] for p in partials)
    if n_acc == 0:
        raise ValueError("zero accepted trials; cannot form an estimate")

    def stats(s2, s4, c):
        if c == 0:
            return math.nan, math.nan
        mean = s2 / c
        if c < 2:
            return mean, math.nan
        var = max(0.0, (s4 - s2 * s2 / c) / (c - 1))
        return mean, math.sqrt(var / c)

    v_x, se_x = stats(s2x, s4x, c_x)
    v_p, se_p = stats(s2p, s4p, c_p)
    return Estimate(v_x, v_p, se_x, se_p, c_x, c_p, config.n_samples, n_acc)


def certify(est: Estimate, params: BenchmarkParams, confidence: float = 0.95) -> CertifiedVerdict:
    """Conservative product-bound test on a Monte Carlo estimate.

    Each bracket factor is inflated to its one-sided upper confidence limit
    (v_hat + z* se - g^2/(2(1+lam))); a violation is certified only if both
    inflated factors are positive and their product is still below the bound.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    if est.count_x < 100 or est.count_p < 100:
        raise ValueError("insufficient samples: need at least 100 trials per quadrature")
    z_star = NormalDist().inv_cdf(confidence)
    lam = params.lam
    f_x = est.v_x_hat + z_star * est.se_x - params.g_x ** 2 / (2.0 * (1.0 + lam))
    f_p = est.v_p_hat + z_star * est.se_p - params.g_p ** 2 / (2.0 * (1.0 + lam))
    rhs = 0.25 * (1.0 + params.eta / (1.0 + lam)) ** 2
    lhs = f_x * f_p
    certified = f_x > 0.0 and f_p > 0.0 and lhs < rhs
    return CertifiedVerdict(certified, f_x, f_p, lhs, rhs, rhs - lhs, z_star, confidence)
