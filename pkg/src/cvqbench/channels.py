"""Channel models: diagonal one-mode Gaussian channels and the
measure-and-prepare (entanglement-breaking) family.

A diagonal Gaussian channel maps quadrature means z -> t_z z and variances
V -> t_z^2 V + n_z. In the symmetric parametrization used for gain channels,
t_x = t_p = sqrt(G) and the added noise relates to the excess noise ntilde
(output noise above the quantum-limited minimum) by n_z = ntilde + |1-G|/2.

The measure-and-prepare channel heterodynes the input in a squeezed basis
(squeeze r), rescales the outcome by gamma, and re-prepares a squeezed
coherent state (squeeze R), optionally conjugated by an extra squeeze q and
post-selected with outcome-dependent acceptance exp(-c |beta|^2). Every such
channel is entanglement breaking by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .states import (
    GaussianState,
    PhasePoint,
    V0,
    coherent_state,
    quadrature_means,
    squeezed_coherent_state,
    two_mode_squeezed_state,
)

#: Tolerance on the complete-positivity and EB classification inequalities.
CP_ATOL = 1e-12


@dataclass(frozen=True)
class GaussianChannelSpec:
    """Diagonal one-mode Gaussian channel.

    t_x, t_p: quadrature gains (mean map z -> t_z z).
    n_x, n_p: nonnegative noises added after the gain (variance map
    V -> t_z^2 V + n_z).
    """

    t_x: float
    t_p: float
    n_x: float = 0.0
    n_p: float = 0.0

    def __post_init__(self):
        vals = (self.t_x, self.t_p, self.n_x, self.n_p)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("channel parameters must be finite")
        if self.n_x < 0 or self.n_p < 0:
            raise ValueError("added noises must be nonnegative")

    @classmethod
    def from_gain_noise(cls, gain: float, excess: float) -> "GaussianChannelSpec":
        """Symmetric channel from (G, ntilde): t = sqrt(G), n = ntilde + |1-G|/2."""
        if gain < 0:
            raise ValueError("gain G must be nonnegative")
        if excess < 0:
            raise ValueError("excess noise ntilde must be nonnegative")
        t = np.sqrt(gain)
        n = excess + abs(1.0 - gain) / 2.0
        return cls(t, t, n, n)

    @property
    def gain_product(self) -> float:
        return self.t_x * self.t_p

    def output_moments(self, mean: PhasePoint, var: tuple[float, float]) -> tuple[PhasePoint, tuple[float, float]]:
        """Transform a single mode's (mean, variance) pair."""
        m = PhasePoint(self.t_x * mean.x, self.t_p * mean.p)
        v = (self.t_x ** 2 * var[0] + self.n_x, self.t_p ** 2 * var[1] + self.n_p)
        return m, v


def is_completely_positive(spec: GaussianChannelSpec, atol: float = CP_ATOL) -> bool:
    """CP criterion for diagonal channels: sqrt(n_x n_p) >= |1 - t_x t_p| / 2."""
    return np.sqrt(spec.n_x * spec.n_p) >= abs(1.0 - spec.gain_product) / 2.0 - atol


def is_entanglement_breaking(spec: GaussianChannelSpec, atol: float = CP_ATOL) -> bool:
    """EB criterion for diagonal channels: sqrt(n_x n_p) >= (1 + |t_x t_p|) / 2.

    Follows from splitting the added noise as N = N1 + N2 with N1 >= i Omega/2
    and N2 >= i T Omega T^T / 2 (measure-and-prepare decomposition). For the
    symmetric case it reduces to ntilde >= min(1, G).
    """
    return np.sqrt(spec.n_x * spec.n_p) >= (1.0 + abs(spec.gain_product)) / 2.0 - atol


def classify_gaussian_channel(spec: GaussianChannelSpec) -> str:
    """Classify as 'unphysical', 'entanglement_breaking' or 'quantum_domain'."""
    if not is_completely_positive(spec):
        return "unphysical"
    if is_entanglement_breaking(spec):
        return "entanglement_breaking"
    return "quantum_domain"


def apply_gaussian_channel(spec: GaussianChannelSpec, state: GaussianState) -> GaussianState:
    """Apply a diagonal Gaussian channel to a single-mode state."""
    if state.n_modes != 1:
        raise ValueError("apply_gaussian_channel expects a single-mode state")
    if not is_completely_positive(spec):
        raise ValueError("channel spec is not completely positive (unphysical channel)")
    t = np.diag([spec.t_x, spec.t_p])
    noise = np.diag([spec.n_x, spec.n_p])
    return GaussianState(t @ state.mean, t @ state.cov @ t.T + noise)


def choi_state(spec: GaussianChannelSpec, xi: float) -> GaussianState:
    """Choi-type state (E ⊗ I)(|psi_xi><psi_xi|) from a two-mode squeezed seed.

    The channel acts on mode A (the first mode); mode B keeps the TMSS blocks.
    """
    if not is_completely_positive(spec):
        raise ValueError("channel spec is not completely positive (unphysical channel)")
    tmss = two_mode_squeezed_state(xi)  # validates xi
    t = np.diag([spec.t_x, spec.t_p, 1.0, 1.0])
    noise = np.diag([spec.n_x, spec.n_p, 0.0, 0.0])
    return GaussianState(t @ tmss.mean, t @ tmss.cov @ t.T + noise)


@dataclass(frozen=True)
class MeasurePrepareSpec:
    """Measure-and-prepare EB channel parameters.

    r: squeeze of the heterodyne measurement basis; gamma: outcome rescaling;
    R: squeeze of the re-prepared state; q: output-side conjugation squeeze
    (asymmetric-gain variant, 0 for the symmetric channel); acceptance_c:
    post-selection coefficient, outcome beta kept with probability
    exp(-acceptance_c |beta|^2) (0 = deterministic).
    """

    r: float = 0.0
    gamma: float = 1.0
    R: float = 0.0
    q: float = 0.0
    acceptance_c: float = 0.0

    def __post_init__(self):
        vals = (self.r, self.gamma, self.R, self.q, self.acceptance_c)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("measure-and-prepare parameters must be finite")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.acceptance_c < 0:
            raise ValueError("acceptance_c must be nonnegative")


def mp_from_benchmark(eta: float, lam: float, r: float, q: float = 0.0) -> MeasurePrepareSpec:
    """Bound-saturating measure-and-prepare channel for gain eta and prior width lam.

    gamma = sqrt(eta) / sqrt((1+lam)^2 cosh^2 r - sinh^2 r),
    e^R = sqrt(((1+lam) cosh r + sinh r) / ((1+lam) cosh r - sinh r)).
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    a = (1.0 + lam) * np.cosh(r)
    s = np.sinh(r)
    gamma = np.sqrt(eta) / np.sqrt(a * a - s * s)
    big_r = 0.5 * np.log((a + s) / (a - s))
    return MeasurePrepareSpec(r=r, gamma=gamma, R=big_r, q=q)


def mp_noise_closed_form(eta: float, lam: float, R: float, q: float = 0.0) -> tuple[float, float]:
    """Averaged quadrature noises of the bound-saturating channel.

    With eta' = eta/(1+lam): (Vx, Vp) = (((1+eta') e^{-2R} + eta') / 2,
    ((1+eta') e^{2R} + eta') / 2), each rescaled by e^{-2q} / e^{+2q} for the
    conjugated variant with gains (sqrt(eta) e^{-q}, sqrt(eta) e^{q}). The
    pair saturates the product EB bound identically in (eta, lam, R, q).
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    ep = eta / (1.0 + lam)
    v_x = ((1.0 + ep) * np.exp(-2.0 * R) + ep) / 2.0
    v_p = ((1.0 + ep) * np.exp(2.0 * R) + ep) / 2.0
    return float(np.exp(-2.0 * q) * v_x), float(np.exp(2.0 * q) * v_p)


class MpTranscript(NamedTuple):
    """One measure-and-prepare event: heterodyne outcome, acceptance, output state."""

    outcome: complex
    accepted: bool
    prepared: GaussianState | None


def mp_transcript(spec: MeasurePrepareSpec, alpha: complex,
                  rng: np.random.Generator) -> MpTranscript:
    """Sample one run of the measure-and-prepare channel on input |alpha>.

    The outcome beta follows the heterodyne density |<beta|S_r†|alpha>|^2 / pi,
    a Gaussian with the squeezed-frame mean (e^r x_alpha, e^{-r} p_alpha) and
    quadrature variances ((e^{2r}+1)/2, (e^{-2r}+1)/2). Accepted outcomes
    re-prepare S_q S_R |gamma beta>.
    """
    m = quadrature_means(alpha)
    x_b = np.exp(spec.r) * m.x + np.sqrt((np.exp(2.0 * spec.r) + 1.0) / 2.0) * rng.standard_normal()
    p_b = np.exp(-spec.r) * m.p + np.sqrt((np.exp(-2.0 * spec.r) + 1.0) / 2.0) * rng.standard_normal()
    beta = complex(x_b, p_b) / np.sqrt(2.0)
    if spec.acceptance_c > 0.0:
        accepted = rng.random() < np.exp(-spec.acceptance_c * abs(beta) ** 2)
    else:
        accepted = True
    if not accepted:
        return MpTranscript(beta, False, None)
    prepared = squeezed_coherent_state(spec.gamma * beta, spec.R)
    if spec.q != 0.0:
        sq = np.diag([np.exp(-spec.q), np.exp(spec.q)])
        prepared = GaussianState(sq @ prepared.mean, sq @ prepared.cov @ sq.T)
    return MpTranscript(beta, True, prepared)
