"""Brute-force references used to freeze expected values.

These deliberately avoid the package's search code: they evaluate the norm on
dense grids and take plain minima.
"""

import math

import numpy as np


def dense_lambda_min(norm, x, y, step=1e-5, chunk=1 << 20):
    """Minimum of ``||x + lambda y||`` over a uniform lambda grid on the provable bracket."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    half = 2.0 * norm.evaluate(x) / norm.evaluate(y)
    n = int(math.ceil(2 * half / step)) + 1
    best_val, best_lam = math.inf, 0.0
    for start in range(0, n, chunk):
        lam = -half + step * np.arange(start, min(n, start + chunk))
        vals = norm.evaluate(x[None, :] + lam[:, None] * y[None, :])
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_lam = float(vals[i]), float(lam[i])
    return best_lam, best_val


def dense_defect(norm, x, y, step=1e-5):
    return max(norm.evaluate(np.asarray(x, dtype=float)) - dense_lambda_min(norm, x, y, step)[1], 0.0)


def euclid_closed_form(x, y):
    """Exact minimiser and value of ``|x + lambda y|_2``: project x off y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lam = -float(x @ y) / float(y @ y)
    return lam, float(np.linalg.norm(x + lam * y))


def psi_scan_defects(norm, theta, samples, lam_step=1e-4):
    """Defect of the unit vector at ``theta`` against ``samples`` equispaced directions in [0, pi)."""
    c = np.array([math.cos(theta), math.sin(theta)])
    x = c / norm.evaluate(c)
    psis = np.arange(samples) * (math.pi / samples)
    lam = np.arange(-2.0, 2.0 + lam_step / 2, lam_step)
    out = np.empty(samples)
    for k, p in enumerate(psis):
        d = np.array([math.cos(p), math.sin(p)])
        y = d / norm.evaluate(d)
        out[k] = 1.0 - np.min(norm.evaluate(x[None, :] + lam[:, None] * y[None, :]))
    return psis, out
