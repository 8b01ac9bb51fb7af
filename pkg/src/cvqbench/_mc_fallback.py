"""Pure-numpy Monte Carlo accumulation kernel.

Mirror of the Cython kernel in _mc_cython.pyx: same per-trial arithmetic in
the same order and the same pairwise halving-tree reduction, so both backends
return bit-identical partial sums for identical inputs. Keep the two files in
sync when changing either.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _tree_sum(values: np.ndarray) -> float:
    """Pairwise halving-tree sum: (a0+a1), (a2+a3), ... repeated to one value."""
    buf = np.array(values, dtype=np.float64)
    n = buf.size
    if n == 0:
        return 0.0
    while n > 1:
        half = n // 2
        odd = n % 2
        head = buf[0:2 * half:2] + buf[1:2 * half:2]
        if odd:
            buf = np.concatenate([head, buf[n - 1:n]])
        else:
            buf = head
        n = half + odd
    return float(buf[0])


def accumulate_chunk(x_a, p_a, base_x, base_p, sel_x, acc, n_out,
                     k_x, k_p, s_x, s_p, g_x, g_p):
    """Accumulate squared deviations for one chunk of trials.

    Per trial: the measured quadrature z (x when sel_x, else p) yields outcome
    z_out = k_z * base_z + s_z * n_out and deviation dev = z_out - g_z * z_a.
    Rejected trials (acc false) are excluded. Returns
    (sum_d2_x, sum_d4_x, count_x, sum_d2_p, sum_d4_p, count_p, n_accepted).
    """
    sel = sel_x.astype(bool)
    keep = acc.astype(bool)
    k = np.where(sel, k_x, k_p)
    s = np.where(sel, s_x, s_p)
    g = np.where(sel, g_x, g_p)
    base = np.where(sel, base_x, base_p)
    z_a = np.where(sel, x_a, p_a)
    dev = (k * base + s * n_out) - g * z_a
    d2 = dev * dev
    d4 = d2 * d2
    mask_x = sel & keep
    mask_p = (~sel) & keep
    zero = np.float64(0.0)
    s2x = _tree_sum(np.where(mask_x, d2, zero))
    s4x = _tree_sum(np.where(mask_x, d4, zero))
    s2p = _tree_sum(np.where(mask_p, d2, zero))
    s4p = _tree_sum(np.where(mask_p, d4, zero))
    c_x = int(np.count_nonzero(mask_x))
    c_p = int(np.count_nonzero(mask_p))
    return s2x, s4x, c_x, s2p, s4p, c_p, c_x + c_p
