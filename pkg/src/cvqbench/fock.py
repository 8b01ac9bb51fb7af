"""Truncated Fock-space brute force.

Independent recomputation of the averaged quadrature noises, the
measure-and-prepare channel action and the hybrid separability integral,
used as the oracle against the closed-form phase-space results. Everything
here works directly with cutoff-D matrices: squeezers and two-mode mixers
are truncated matrix exponentials of their generators, channels are realized
by explicit dilations, and the coherent-state integrals are tensor
Gauss-Hermite quadratures. No phase-space covariance algebra is reused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply
from scipy.stats import poisson

from .benchmark import BenchmarkParams
from .channels import GaussianChannelSpec, MeasurePrepareSpec, is_completely_positive

#: Default bound on the probability mass lost to truncation in built states.
TAIL_TOL = 1e-8


@dataclass(frozen=True)
class FockOperators:
    """Cutoff-D matrices of the ladder and quadrature operators."""

    cutoff: int
    a: np.ndarray
    adag: np.ndarray
    x: np.ndarray
    p: np.ndarray

    @classmethod
    def build(cls, cutoff: int) -> "FockOperators":
        if cutoff < 2:
            raise ValueError("cutoff must be at least 2")
        a = np.zeros((cutoff, cutoff), dtype=complex)
        ns = np.arange(1, cutoff)
        a[ns - 1, ns] = np.sqrt(ns)
        adag = a.conj().T
        x = (a + adag) / np.sqrt(2.0)
        p = (a - adag) / (1j * np.sqrt(2.0))
        return cls(cutoff, a, adag, x, p)


@lru_cache(maxsize=16)
def _ops(cutoff: int) -> FockOperators:
    return FockOperators.build(cutoff)


@dataclass(frozen=True)
class FockState:
    """State at cutoff D: amplitude vector/matrix (pure) or density matrix.

    data shapes: (D,) single-mode pure; (D, D) two-mode pure amplitudes
    Psi[n_A, n_B]; (D, D) single-mode density matrix; (D^2, D^2) two-mode
    density matrix. tail_mass is the probability discarded by the cutoff.
    """

    data: np.ndarray
    n_modes: int
    pure: bool
    tail_mass: float

    @property
    def cutoff(self) -> int:
        if self.n_modes == 1:
            return self.data.shape[0]
        if self.pure:
            return self.data.shape[0]
        return math.isqrt(self.data.shape[0])


def _coherent_column(alpha: complex, cutoff: int) -> np.ndarray:
    """Fock amplitudes of |alpha>: c_n = e^{-|a|^2/2} a^n / sqrt(n!)."""
    c = np.empty(cutoff, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def _coherent_matrix(alphas: np.ndarray, cutoff: int) -> np.ndarray:
    """Columns of Fock amplitudes for an array of amplitudes, shape (D, len)."""
    alphas = np.asarray(alphas, dtype=complex).ravel()
    c = np.empty((cutoff, alphas.size), dtype=complex)
    c[0] = np.exp(-0.5 * np.abs(alphas) ** 2)
    for n in range(1, cutoff):
        c[n] = c[n - 1] * alphas / math.sqrt(n)
    return c


@lru_cache(maxsize=32)
def squeeze_operator(r: float, cutoff: int) -> np.ndarray:
    """Truncated S_r = exp(r (a^2 - a†^2)/2)."""
    ops = _ops(cutoff)
    gen = 0.5 * r * (ops.a @ ops.a - ops.adag @ ops.adag)
    return expm(gen)


def coherent_fock(alpha: complex, cutoff: int) -> FockState:
    col = _coherent_column(alpha, cutoff)
    tail = float(poisson.sf(cutoff - 1, abs(alpha) ** 2))
    return FockState(col, 1, True, tail)


def squeezed_coherent_fock(alpha: complex, r: float, cutoff: int) -> FockState:
    """S_r |alpha> via the truncated squeeze exponential; tail = norm deficit."""
    vec = squeeze_operator(float(r), cutoff) @ _coherent_column(alpha, cutoff)
    tail = max(0.0, 1.0 - float(np.vdot(vec, vec).real))
    return FockState(vec, 1, True, tail)


def tmss_fock(xi: float, cutoff: int) -> FockState:
    """Two-mode squeezed vacuum sqrt(1-xi^2) sum_n xi^n |n,n>; exact tail xi^{2D}."""
    if not (0.0 < xi < 1.0):
        raise ValueError("xi must lie in (0, 1)")
    amp = np.zeros((cutoff, cutoff), dtype=complex)
    amp[np.arange(cutoff), np.arange(cutoff)] = math.sqrt(1.0 - xi * xi) * xi ** np.arange(cutoff)
    return FockState(amp, 2, True, xi ** (2 * cutoff))


def build_states(kind: str, params: dict, cutoff: int, tail_tol: float = TAIL_TOL) -> FockState:
    """Build a state and enforce the truncation budget."""
    if kind == "coherent":
        state = coherent_fock(params.get("alpha", 0.0), cutoff)
    elif kind == "squeezed_coherent":
        state = squeezed_coherent_fock(params.get("alpha", 0.0), params["r"], cutoff)
    elif kind == "tmss":
        state = tmss_fock(params["xi"], cutoff)
    else:
        raise ValueError(f"unknown state kind: {kind!r}")
    if state.tail_mass > tail_tol:
        raise ValueError(
            f"truncation tail {state.tail_mass:.3e} exceeds budget {tail_tol:.1e} at cutoff {cutoff}"
        )
    return state


# ---------------------------------------------------------------------------
# Gauss-Hermite machinery

def _gh(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(n)


def _prior_axis(lam: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ∫ N(z; 0, 1/lam) f(z) dz."""
    t, w = _gh(n)
    return t * math.sqrt(2.0 / lam), w / math.sqrt(math.pi)


def _free_axis(sigma: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ∫ f(z) dz / sqrt(2 pi) when f decays like N(0, sigma^2).

    The Gaussian decay lives in f itself, so the weights carry e^{+t^2}.
    """
    t, w = _gh(n)
    nodes = t * sigma * math.sqrt(2.0)
    weights = w * np.exp(t * t) * sigma * math.sqrt(2.0) / math.sqrt(2.0 * math.pi)
    return nodes, weights


def suggest_cutoff(lam: float, gh_nodes: int = 40, weight_floor: float = 1e-10) -> int:
    """Conservative cutoff: D >= nbar + 6 sqrt(nbar) + 10 over contributing nodes.

    nbar is the largest mean photon number among prior-grid coherent states
    whose 2-D prior weight exceeds weight_floor (the far tail of the prior
    contributes below the oracle's error floor and is excluded).
    """
    x, wx = _prior_axis(lam, gh_nodes)
    w2 = np.outer(wx, wx)
    n2 = (x[:, None] ** 2 + x[None, :] ** 2) / 2.0
    nbar = float(np.max(np.where(w2 >= weight_floor, n2, 0.0)))
    return int(math.ceil(nbar + 6.0 * math.sqrt(nbar) + 10.0))


# ---------------------------------------------------------------------------
# averaged-noise oracle

@dataclass(frozen=True)
class OracleNoise:
    """Oracle result: noises, success probability, estimated numerical error."""

    v_x: float
    v_p: float
    success_prob: float
    err_x: float
    err_p: float


def _mode_a_moments(vecs: np.ndarray, op: np.ndarray) -> np.ndarray:
    """<op_A ⊗ I> for a batch of two-mode vectors shaped (D, D, N)."""
    return np.einsum("abn,ac,cbn->n", vecs.conj(), op, vecs, optimize=True).real


def _single_mode_moments(cols: np.ndarray, op: np.ndarray) -> np.ndarray:
    """<op> column-wise for single-mode vectors shaped (D, N)."""
    return np.einsum("dn,dc,cn->n", cols.conj(), op, cols, optimize=True).real


def _mixer_generator(kind: str, theta: float, dim: int) -> sp.csr_matrix:
    """Sparse generator of a beamsplitter, th (a†b - a b†), or two-mode
    squeezer, th (a†b† - a b)."""
    ops = _ops(dim)
    a = sp.csr_matrix(ops.a)
    adag = sp.csr_matrix(ops.adag)
    if kind == "bs":
        gen = sp.kron(adag, a) - sp.kron(a, adag)
    elif kind == "tms":
        gen = sp.kron(adag, adag) - sp.kron(a, a)
    else:
        raise ValueError(kind)
    return (theta * gen).tocsr()


def _heuristic_dim(nbar: float, floor: int) -> int:
    """Cutoff rule D >= nbar + 6 sqrt(nbar) + 10, floored at the requested cutoff."""
    return max(floor, int(math.ceil(nbar + 6.0 * math.sqrt(max(nbar, 0.0)) + 10.0)))

#: Prior-grid nodes below this 2-D weight are dropped from the dilation
#: integral; their worst-case contribution is folded into the error bound.
_NODE_FLOOR = 1e-12


def _gaussian_noise_pass(spec: GaussianChannelSpec, params: BenchmarkParams,
                         cutoff: int, gh_nodes: int, shrink: int = 0) -> tuple[float, float, float]:
    """One pass of the dilated Gaussian channel.

    The working Fock dimension follows the energy heuristic
    D >= nbar_max + 6 sqrt(nbar_max) + 10 over the contributing prior nodes
    (never below the requested cutoff): amplifying cores push population far
    above the input photon numbers, and a too-tight truncation reflects it off
    the cutoff boundary. The two-mode mixing unitary is applied with a sparse
    expm-times-matrix product, never formed densely. Returns (Vx, Vp,
    dropped-node error bound).
    """
    gain = spec.t_x * spec.t_p
    b = 0.5 * math.log(spec.t_p / spec.t_x)

    xs, wx = _prior_axis(params.lam, gh_nodes)
    xa = np.repeat(xs, gh_nodes)
    pa = np.tile(xs, gh_nodes)
    w2 = np.repeat(wx, gh_nodes) * np.tile(wx, gh_nodes)
    n_in = (xa * xa + pa * pa) / 2.0
    keep = w2 >= _NODE_FLOOR
    n_in_max = float(np.max(n_in[keep]))

    ax, ap = math.exp(-b), math.exp(b)
    if abs(gain - 1.0) < 1e-14:
        dim = max(cutoff - shrink, _heuristic_dim(n_in_max, cutoff) - shrink)
        ops = _ops(dim)
        cols = _coherent_matrix((xa + 1j * pa) / math.sqrt(2.0), dim)
        res_x, res_p = spec.n_x, spec.n_p
        m1x = _single_mode_moments(cols, ops.x)
        m2x = _single_mode_moments(cols, ops.x @ ops.x)
        m1p = _single_mode_moments(cols, ops.p)
        m2p = _single_mode_moments(cols, ops.p @ ops.p)
        val_x = ax * ax * m2x - 2.0 * params.g_x * xa * ax * m1x + params.g_x ** 2 * xa ** 2 + res_x
        val_p = ap * ap * m2p - 2.0 * params.g_p * pa * ap * m1p + params.g_p ** 2 * pa ** 2 + res_p
        return float(np.dot(w2, val_x)), float(np.dot(w2, val_p)), 0.0

    w = 0.25 * math.log(spec.n_p / spec.n_x) - b
    halfnoise = abs(1.0 - gain) / 2.0
    res_x = max(0.0, spec.n_x - math.exp(-2.0 * (b + w)) * halfnoise)
    res_p = max(0.0, spec.n_p - math.exp(2.0 * (b + w)) * halfnoise)
    n_anc = math.sinh(w) ** 2
    if gain < 1.0:
        n_peak = n_in_max + n_anc
    else:
        n_peak = gain * (n_in_max + n_anc + 1.0)
    dim = max(cutoff - shrink, _heuristic_dim(n_peak, cutoff) - shrink)

    ops = _ops(dim)
    if gain < 1.0:
        gen = _mixer_generator("bs", math.acos(math.sqrt(gain)), dim)
    else:
        gen = _mixer_generator("tms", math.acosh(math.sqrt(gain)), dim)
    anc = squeeze_operator(w, dim)[:, 0]
    cols = _coherent_matrix((xa[keep] + 1j * pa[keep]) / math.sqrt(2.0), dim)
    vecs = np.einsum("an,b->abn", cols, anc).reshape(dim * dim, -1)
    vecs = expm_multiply(gen, vecs).reshape(dim, dim, -1)
    m1x = _mode_a_moments(vecs, ops.x)
    m2x = _mode_a_moments(vecs, ops.x @ ops.x)
    m1p = _mode_a_moments(vecs, ops.p)
    m2p = _mode_a_moments(vecs, ops.p @ ops.p)

    xk, pk = xa[keep], pa[keep]
    val_x = ax * ax * m2x - 2.0 * params.g_x * xk * ax * m1x + params.g_x ** 2 * xk ** 2 + res_x
    val_p = ap * ap * m2p - 2.0 * params.g_p * pk * ap * m1p + params.g_p ** 2 * pk ** 2 + res_p
    v_x = float(np.dot(w2[keep], val_x))
    v_p = float(np.dot(w2[keep], val_p))
    # worst-case bound on everything the dropped far-tail nodes could add
    drop = ~keep
    if np.any(drop):
        spread = max(ax, ap) * math.sqrt(2.0 * dim)
        gmax = max(params.g_x, params.g_p)
        zmax = np.sqrt(xa[drop] ** 2 + pa[drop] ** 2)
        err_drop = float(np.dot(w2[drop], (spread + gmax * zmax) ** 2 + max(res_x, res_p)))
    else:
        err_drop = 0.0
    return v_x, v_p, err_drop


def _mp_noise_pass(spec: MeasurePrepareSpec, params: BenchmarkParams,
                   cutoff: int, gh_nodes: int) -> tuple[float, float, float]:
    """One pass of the measure-and-prepare integral at a given cutoff.

    Numerator/denominator of the acceptance-normalized noises: the outcome
    integral runs over a global Gauss-Hermite grid wide enough to cover the
    outcome marginal (prior spread plus measurement noise).
    """
    ops = _ops(cutoff)
    x2 = ops.x @ ops.x
    p2 = ops.p @ ops.p
    lam = params.lam

    xs, wx = _prior_axis(lam, gh_nodes)
    xa = np.repeat(xs, gh_nodes)
    pa = np.tile(xs, gh_nodes)
    w_alpha = np.repeat(wx, gh_nodes) * np.tile(wx, gh_nodes)
    cols_in = _coherent_matrix((xa + 1j * pa) / math.sqrt(2.0), cutoff)
    meas_cols = squeeze_operator(-spec.r, cutoff) @ cols_in  # S_r† |alpha>

    sbx2 = (math.exp(2.0 * spec.r) + 1.0) / 2.0
    sbp2 = (math.exp(-2.0 * spec.r) + 1.0) / 2.0
    bx, wbx = _free_axis(math.sqrt(math.exp(2.0 * spec.r) / lam + sbx2), gh_nodes)
    bp, wbp = _free_axis(math.sqrt(math.exp(-2.0 * spec.r) / lam + sbp2), gh_nodes)
    xb = np.repeat(bx, gh_nodes)
    pb = np.tile(bp, gh_nodes)
    w_beta = np.repeat(wbx, gh_nodes) * np.tile(wbp, gh_nodes)
    if spec.acceptance_c > 0.0:
        w_beta = w_beta * np.exp(-0.5 * spec.acceptance_c * (xb * xb + pb * pb))

    beta = (xb + 1j * pb) / math.sqrt(2.0)
    cols_beta = _coherent_matrix(beta, cutoff)
    amps = cols_beta.conj().T @ meas_cols          # <beta| S_r† |alpha>
    weight = (np.abs(amps) ** 2) * w_beta[:, None]  # (n_beta, n_alpha)

    cols_prep = _coherent_matrix(spec.gamma * beta, cutoff)
    fold1 = math.exp(-(spec.q + spec.R))
    m1x = fold1 * _single_mode_moments(cols_prep, ops.x)
    m2x = fold1 * fold1 * _single_mode_moments(cols_prep, x2)
    fold1p = math.exp(spec.q + spec.R)
    m1p = fold1p * _single_mode_moments(cols_prep, ops.p)
    m2p = fold1p * fold1p * _single_mode_moments(cols_prep, p2)

    s0 = weight.sum(axis=0)
    s1x = m1x @ weight
    s2x = m2x @ weight
    s1p = m1p @ weight
    s2p = m2p @ weight

    den = float(np.dot(w_alpha, s0))
    num_x = float(np.dot(w_alpha, s2x - 2.0 * params.g_x * xa * s1x + params.g_x ** 2 * xa ** 2 * s0))
    num_p = float(np.dot(w_alpha, s2p - 2.0 * params.g_p * pa * s1p + params.g_p ** 2 * pa ** 2 * s0))
    return num_x / den, num_p / den, den


def oracle_average_noise(channel, params: BenchmarkParams, cutoff: int = 40,
                         gh_nodes: int = 40, error_budget: float | None = None) -> OracleNoise:
    """Brute-force averaged noises with a truncation-error estimate.

    The error estimate compares the full pass with a pass at a shallower
    working dimension; cutoff convergence is geometric, so the reported bound
    comfortably covers the change from doubling the cutoff. Raises when
    error_budget is given and exceeded.
    """
    if params.lam <= 0:
        raise ValueError("the oracle requires a normalizable prior (lam > 0)")
    if isinstance(channel, GaussianChannelSpec):
        if channel.t_x <= 0 or channel.t_p <= 0:
            raise ValueError("oracle supports positive quadrature gains only")
        if not is_completely_positive(channel):
            raise ValueError("channel spec is not completely positive (unphysical channel)")
        v_x, v_p, drop = _gaussian_noise_pass(channel, params, cutoff, gh_nodes)
        v_x_lo, v_p_lo, _ = _gaussian_noise_pass(channel, params, cutoff, gh_nodes, shrink=10)
        success = 1.0
    elif isinstance(channel, MeasurePrepareSpec):
        lo = max(8, cutoff - 8)
        drop = 0.0
        v_x, v_p, success = _mp_noise_pass(channel, params, cutoff, gh_nodes)
        v_x_lo, v_p_lo, _ = _mp_noise_pass(channel, params, lo, gh_nodes)
    else:
        raise TypeError(f"unsupported channel type: {type(channel).__name__}")
    err_x = max(3.0 * abs(v_x - v_x_lo), 1e-10 * (1.0 + abs(v_x))) + drop
    err_p = max(3.0 * abs(v_p - v_p_lo), 1e-10 * (1.0 + abs(v_p))) + drop
    if error_budget is not None and max(err_x, err_p) > error_budget:
        raise ValueError(
            f"truncation budget exceeded: estimated error ({max(err_x, err_p):.3e}) "
            f"> budget ({error_budget:.1e}) at cutoff {cutoff}"
        )
    return OracleNoise(v_x, v_p, success, err_x, err_p)


# ---------------------------------------------------------------------------
# hybrid separability integral

def _as_tensor(J: FockState) -> np.ndarray:
    """Two-mode state as K[m, n, o, p] = <m, n| J |o, p>."""
    if J.n_modes != 2:
        raise ValueError("a two-mode state is required")
    d = J.cutoff
    if J.pure:
        return np.einsum("mn,op->mnop", J.data, J.data.conj())
    return J.data.reshape(d, d, d, d)


def oracle_hybrid_check(J: FockState, u: float, v: float,
                        gh_nodes: int = 40) -> tuple[float, float]:
    """Literal hybrid integral: ∫ (u z_A - v z_alpha)^2 <alpha*|J|alpha*> d^2a/pi - v^2/2 tr J.

    Evaluated exactly as written (the same minus sign for both quadratures);
    the p-quadrature sign flip relative to the second-moment form emerges from
    the conjugated coherent basis, it is not assumed.
    """
    K = _as_tensor(J)
    d = K.shape[0]
    ops = _ops(d)
    x2 = ops.x @ ops.x
    p2 = ops.p @ ops.p
    tr_j = float(np.einsum("mnmn->", K).real)

    t_i = np.einsum("mnmp->np", K)
    t_x = np.einsum("om,mnop->np", ops.x, K)
    t_x2 = np.einsum("om,mnop->np", x2, K)
    t_p = np.einsum("om,mnop->np", ops.p, K)
    t_p2 = np.einsum("om,mnop->np", p2, K)

    # B-marginal Q-function widths set the grid scale
    rho_b = np.einsum("mnmp->np", K)
    mean_x = float(np.einsum("np,pn->", rho_b, ops.x).real)
    mean_p = float(np.einsum("np,pn->", rho_b, ops.p).real)
    var_x = float(np.einsum("np,pn->", rho_b, x2).real) - mean_x ** 2
    var_p = float(np.einsum("np,pn->", rho_b, p2).real) - mean_p ** 2
    xs, wxs = _free_axis(math.sqrt(max(var_x, 0.0) + 0.5), gh_nodes)
    ps, wps = _free_axis(math.sqrt(max(var_p, 0.0) + 0.5), gh_nodes)
    xg = np.repeat(xs + mean_x, gh_nodes)
    pg = np.tile(ps + mean_p, gh_nodes)
    wg = np.repeat(wxs, gh_nodes) * np.tile(wps, gh_nodes)

    alpha = (xg + 1j * pg) / math.sqrt(2.0)
    cb = _coherent_matrix(alpha.conj(), d)  # |alpha*> columns

    def node_values(t_op):
        return np.einsum("nk,np,pk->k", cb.conj(), t_op, cb, optimize=True).real

    s_i = node_values(t_i)
    s_x = node_values(t_x)
    s_x2 = node_values(t_x2)
    s_p = node_values(t_p)
    s_p2 = node_values(t_p2)

    term_x = (
        u * u * float(np.dot(wg, s_x2))
        - 2.0 * u * v * float(np.dot(wg, xg * s_x))
        + v * v * float(np.dot(wg, xg * xg * s_i))
        - 0.5 * v * v * tr_j
    )
    term_p = (
        u * u * float(np.dot(wg, s_p2))
        - 2.0 * u * v * float(np.dot(wg, pg * s_p))
        + v * v * float(np.dot(wg, pg * pg * s_i))
        - 0.5 * v * v * tr_j
    )
    return term_x, term_p


def hybrid_moment_fock(J: FockState, u: float, v: float) -> tuple[float, float]:
    """Second-moment form <(u x_A - v x_B)^2>, <(u p_A + v p_B)^2> in Fock space."""
    K = _as_tensor(J)
    d = K.shape[0]
    ops = _ops(d)
    x2 = ops.x @ ops.x
    p2 = ops.p @ ops.p

    def pair(op_a, op_b):
        return float(np.einsum("om,pn,mnop->", op_a, op_b, K, optimize=True).real)

    eye = np.eye(d, dtype=complex)
    xa2 = pair(x2, eye)
    xb2 = pair(eye, x2)
    xab = pair(ops.x, ops.x)
    pa2 = pair(p2, eye)
    pb2 = pair(eye, p2)
    pab = pair(ops.p, ops.p)
    term_x = u * u * xa2 - 2.0 * u * v * xab + v * v * xb2
    term_p = u * u * pa2 + 2.0 * u * v * pab + v * v * pb2
    return term_x, term_p
