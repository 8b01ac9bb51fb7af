"""Phase-space representation of Gaussian states.

Conventions used throughout the package: canonical commutator [x, p] = i
(hbar = 1), so the quadrature variance of any coherent state (the shot
noise) is V0 = 1/2. A coherent state |alpha> has mean quadratures
(sqrt(2) Re alpha, sqrt(2) Im alpha). Quadratures are ordered
(x1, p1, x2, p2, ...) and the symplectic form is the direct sum of
[[0, 1], [-1, 0]] blocks.

The squeezing convention is S_r = exp(r (a^2 - a†^2) / 2), which maps
x -> e^{-r} x and p -> e^{r} p, i.e. positive r squeezes x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

#: Shot noise: quadrature variance of any coherent state.
V0 = 0.5

#: Relative tolerance for covariance-matrix symmetry.
SYMMETRY_RTOL = 1e-12

#: Absolute slack on the symplectic-eigenvalue physicality test.
PHYSICALITY_ATOL = 1e-10


class PhasePoint(NamedTuple):
    """Mean quadratures (x, p) of a single mode."""

    x: float
    p: float


def quadrature_means(alpha: complex) -> PhasePoint:
    """Mean quadratures of the coherent state |alpha>.

    With [x, p] = i the means are x = sqrt(2) Re alpha, p = sqrt(2) Im alpha.
    """
    alpha = complex(alpha)
    if not (np.isfinite(alpha.real) and np.isfinite(alpha.imag)):
        raise ValueError("coherent amplitude must be finite")
    return PhasePoint(np.sqrt(2.0) * alpha.real, np.sqrt(2.0) * alpha.imag)


def symplectic_form(n_modes: int) -> np.ndarray:
    """The 2n x 2n symplectic form, direct sum of [[0, 1], [-1, 0]]."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


@dataclass(frozen=True)
class GaussianState:
    """An n-mode Gaussian state: mean vector and covariance matrix.

    mean has length 2n ordered (x1, p1, ...); cov is the symmetric 2n x 2n
    covariance matrix Cov[z_i, z_j] = <{z_i - <z_i>, z_j - <z_j>}>/2.
    Instances are immutable; treat the arrays as read-only.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 != 0 or mean.size == 0:
            raise ValueError("mean must be a vector of even length 2n")
        if cov.shape != (mean.size, mean.size):
            raise ValueError("cov must be square with the same dimension as mean")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("state moments must be finite")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        # store normalized copies
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2


def coherent_state(alpha: complex = 0.0) -> GaussianState:
    """Single-mode coherent state: vacuum covariance, displaced mean."""
    m = quadrature_means(alpha)
    return GaussianState(np.array([m.x, m.p]), V0 * np.eye(2))


def squeezed_coherent_state(alpha: complex, r: float) -> GaussianState:
    """S_r |alpha>: squeeze applied after displacement.

    Mean (e^{-r} x_alpha, e^{r} p_alpha), covariance
    diag(e^{-2r}, e^{2r}) / 2.
    """
    if not np.isfinite(r):
        raise ValueError("squeezing parameter must be finite")
    m = quadrature_means(alpha)
    mean = np.array([np.exp(-r) * m.x, np.exp(r) * m.p])
    cov = V0 * np.diag([np.exp(-2.0 * r), np.exp(2.0 * r)])
    return GaussianState(mean, cov)


def two_mode_squeezed_state(xi: float) -> GaussianState:
    """Two-mode squeezed vacuum with Schmidt parameter xi = tanh(s).

    Covariance (1/2) [[cosh(2s) I, sinh(2s) Z], [sinh(2s) Z, cosh(2s) I]]
    with Z = diag(1, -1); zero mean.
    """
    if not (0.0 < xi < 1.0):
        raise ValueError("two-mode squeezing parameter xi must lie in (0, 1)")
    s = np.arctanh(xi)
    c2, s2 = np.cosh(2.0 * s), np.sinh(2.0 * s)
    cov = V0 * np.array(
        [
            [c2, 0.0, s2, 0.0],
            [0.0, c2, 0.0, -s2],
            [s2, 0.0, c2, 0.0],
            [0.0, -s2, 0.0, c2],
        ]
    )
    return GaussianState(np.zeros(4), cov)


def make_gaussian(kind: str, alpha: complex = 0.0, r: float | None = None,
                  xi: float | None = None) -> GaussianState:
    """Dispatch constructor: 'coherent', 'squeezed_coherent' or 'two_mode_squeezed'."""
    if kind == "coherent":
        return coherent_state(alpha)
    if kind == "squeezed_coherent":
        if r is None:
            raise ValueError("squeezed_coherent requires r")
        return squeezed_coherent_state(alpha, r)
    if kind == "two_mode_squeezed":
        if xi is None:
            raise ValueError("two_mode_squeezed requires xi")
        return two_mode_squeezed_state(xi)
    raise ValueError(f"unknown Gaussian state kind: {kind!r}")


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, sorted ascending.

    The eigenvalues of i Omega cov come in pairs (+nu, -nu); the returned
    array holds each nu once. For a single mode nu = sqrt(det cov).
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    if cov.shape != (2 * n, 2 * n):
        raise ValueError("covariance matrix must be 2n x 2n")
    scale = max(1.0, float(np.max(np.abs(cov))))
    if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
        raise ValueError("covariance matrix is not symmetric")
    ev = np.linalg.eigvals(symplectic_form(n) @ cov)
    nus = np.sort(np.abs(ev.imag))
    return nus[1::2]  # drop one of each (+nu, -nu) pair


def check_physical(state: GaussianState) -> bool:
    """True iff every symplectic eigenvalue is >= 1/2 (uncertainty principle)."""
    nus = symplectic_eigenvalues(state.cov)
    return bool(np.all(nus >= V0 - PHYSICALITY_ATOL))


def _mode_block(state: GaussianState, mode: int) -> tuple[np.ndarray, np.ndarray]:
    if not 0 <= mode < state.n_modes:
        raise ValueError(f"mode index {mode} out of range for {state.n_modes}-mode state")
    i = 2 * mode
    return state.mean[i:i + 2], state.cov[i:i + 2, i:i + 2]


def quadrature_marginal(state: GaussianState, mode: int, axis: str) -> tuple[float, float]:
    """Mean and variance of a homodyne measurement of x or p on one mode."""
    if axis not in ("x", "p"):
        raise ValueError("axis must be 'x' or 'p'")
    mean, cov = _mode_block(state, mode)
    k = 0 if axis == "x" else 1
    return float(mean[k]), float(cov[k, k])


def heterodyne_distribution(state: GaussianState, mode: int) -> tuple[np.ndarray, np.ndarray]:
    """Outcome statistics of heterodyne detection on one mode.

    The outcome density over d^2 beta / pi is the Husimi Q-function: a
    Gaussian in the outcome quadratures (x_beta, p_beta) with the mode's
    mean and covariance cov_mode + I/2.
    """
    mean, cov = _mode_block(state, mode)
    return mean.copy(), cov + V0 * np.eye(2)
