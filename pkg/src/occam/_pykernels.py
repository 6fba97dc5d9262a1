"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` one-to-one and are used when the compiled
extension is unavailable (or ``OCCAM_PURE=1`` is set).
"""
import numpy as np


def biased_offspring(xstar_sub, x_sub, z, mu, out):
    """Write ``clip(xstar + mu*(x - xstar) + z, -1, 1)`` into ``out``.

    Returns ``(cand_sq, inc_sq)``: the squared distances to ``x_sub`` of the
    candidate and of the incumbent subvector.
    """
    np.subtract(x_sub, xstar_sub, out=out)
    inc_sq = float(np.dot(out, out))
    out *= mu
    out += xstar_sub
    out += z
    np.clip(out, -1.0, 1.0, out=out)
    diff = out - x_sub
    return float(np.dot(diff, diff)), inc_sq


def evolution_update(path, cov, z, sigma, c_c, c_cov):
    """In-place evolution path and diagonal covariance update."""
    path *= 1.0 - c_c
    path += np.sqrt(c_c * (2.0 - c_c)) * (z / sigma)
    cov *= 1.0 - c_cov
    cov += c_cov * path * path


def gather(src, idx, out):
    np.take(src, idx, out=out)


def scatter(dst, idx, vals):
    dst[idx] = vals
