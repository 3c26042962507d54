"""Vectorised adaptive composite Gauss-Legendre quadrature.

One call integrates a whole family of integrands (e.g. one per Matsubara
term) sharing the abscissa.  Each panel is estimated with an ``order``-point
rule and with the same rule on its two halves; panels whose difference is
above their share of the tolerance for any member of the family are bisected.
"""
from functools import lru_cache

import numpy as np


class QuadratureError(RuntimeError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@lru_cache(maxsize=None)
def _gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_sums(f, lo, hi, order, m):
    """Rule on each [lo_i, hi_i]; returns (m, n_panels)."""
    x, w = _gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(nodes), dtype=float).reshape(m, len(lo), order)
    return np.einsum("mpk,k->mp", vals, w) * half[None, :]


def integrate_panels(f, edges, m, rel_tol, abs_tol=0.0, order=12, max_rounds=40):
    """Integrate ``f`` over ``[edges[0], edges[-1]]``.

    ``f`` maps a 1-d array of abscissae (length N) to an array of shape
    ``(m, N)``.  Returns an array of ``m`` integrals.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    length = edges[-1] - edges[0]
    total = np.zeros(m)
    estimate = None
    for _ in range(max_rounds):
        mid = 0.5 * (lo + hi)
        both = _panel_sums(f, np.concatenate([lo, lo, mid]), np.concatenate([hi, mid, hi]),
                           order, m)
        n = len(lo)
        coarse, fine = both[:, :n], both[:, n:2 * n] + both[:, 2 * n:]
        if estimate is None:
            estimate = fine.sum(axis=1)
        tol = np.maximum(rel_tol * np.abs(estimate), abs_tol)[:, None] * ((hi - lo) / length)[None, :]
        err = np.abs(fine - coarse)
        ok = np.all(err <= tol, axis=0)
        total += fine[:, ok].sum(axis=1)
        if ok.all():
            return total
        lo, hi = np.concatenate([lo[~ok], mid[~ok]]), np.concatenate([mid[~ok], hi[~ok]])
    raise QuadratureError("adaptive panel quadrature did not converge",
                          estimate=total, error=float(np.max(err)))
