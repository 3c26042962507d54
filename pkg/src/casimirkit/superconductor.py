"""BCS gap, Mattis-Bardeen conductivity and the superconducting permittivity.

Energies inside the conductivity integrals are measured in units of the gap
``Delta(T)``: ``x = hbar*omega/Delta`` and ``theta = k_B*T/Delta``.  The
square-root endpoint singularities of the coherence factors are removed by
``E = cosh(u)`` on the half-line and ``E = m + w*sin(phi)`` on finite
intervals.
"""
from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .constants import HBAR, K_B
from .dielectric import drude_eps


class NormalStateError(ValueError):
    pass


class MBQuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class SuperconductorParams:
    omega_p: float
    gamma: float
    t_c: float
    gap0_ratio: float = 1.764

    def __post_init__(self):
        if not (self.omega_p > 0 and self.gamma > 0 and self.t_c > 0):
            raise ValueError("omega_p, gamma and t_c must be positive")
        if not 1.5 <= self.gap0_ratio <= 2.5:
            raise ValueError("gap0_ratio must lie in [1.5, 2.5]")


@dataclass(frozen=True)
class GapValue:
    delta: float
    t: float


def bcs_gap(t, params):
    """Gap from the interpolation ``Delta(0) tanh(1.74 sqrt(T_c/T - 1))``."""
    if not t > 0:
        raise ValueError("temperature must be positive")
    if t >= params.t_c:
        return GapValue(0.0, t)
    delta0 = params.gap0_ratio * K_B * params.t_c
    return GapValue(delta0 * math.tanh(1.74 * math.sqrt(params.t_c / t - 1.0)), t)


# -- Mattis-Bardeen ---------------------------------------------------------

def _tanh_half(e, theta):
    return math.tanh(e / (2.0 * theta))


def _quad(f, lo, hi, points=None, rel_tol=1e-11):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, lo, hi, points=points, epsabs=1e-15, epsrel=rel_tol,
                                  limit=500)
    if err > max(1e4 * rel_tol * abs(val), 1e-12):
        raise MBQuadratureError(f"Mattis-Bardeen integral on [{lo}, {hi}] did not converge "
                                f"(value {val!r}, error {err:.3g})")
    return val


def _sigma1_thermal(x, theta, rel_tol):
    # (2/x) int_1^inf [f(E) - f(E+x)] (E^2 + 1 + xE) / (sqrt(E^2-1) sqrt((E+x)^2-1)) dE
    def g(u):
        e = math.cosh(u)
        occ = 0.5 * (_tanh_half(e + x, theta) - _tanh_half(e, theta))
        return occ * (e * e + 1.0 + x * e) / math.sqrt((e + x) ** 2 - 1.0)

    u_max = math.acosh(1.0 + 60.0 * theta + x)
    knee = min(math.sqrt(2.0 * x), 0.5 * u_max)
    return 2.0 / x * _quad(g, 0.0, u_max, points=[knee], rel_tol=rel_tol)


def _sigma1_pair_breaking(x, theta, rel_tol):
    # -(1/x) int_{1-x}^{-1} [1 - 2f(E+x)] (E^2 + 1 + xE) / (|E^2-1|^1/2 ((E+x)^2-1)^1/2) dE
    m, w = -0.5 * x, 0.5 * x - 1.0

    def g(phi):
        e = m + w * math.sin(phi)
        return -_tanh_half(e + x, theta) * (e * e + 1.0 + x * e) / math.sqrt((1.0 - e) * (e + x + 1.0))

    return _quad(g, -0.5 * math.pi, 0.5 * math.pi, rel_tol=rel_tol) / x


def _sigma2(x, theta, rel_tol):
    # (1/x) int_{max(1-x,-1)}^{1} [1 - 2f(E+x)] (E^2 + 1 + xE) / (sqrt(1-E^2) sqrt((E+x)^2-1)) dE
    lo = max(1.0 - x, -1.0)
    m, w = 0.5 * (lo + 1.0), 0.5 * (1.0 - lo)
    if x < 2.0:
        def g(phi):
            e = m + w * math.sin(phi)
            return _tanh_half(e + x, theta) * (e * e + 1.0 + x * e) / math.sqrt((1.0 + e) * (e + x + 1.0))
    else:
        def g(phi):
            e = m + w * math.sin(phi)
            return _tanh_half(e + x, theta) * (e * e + 1.0 + x * e) / math.sqrt((e + x) ** 2 - 1.0)
    return _quad(g, -0.5 * math.pi, 0.5 * math.pi, rel_tol=rel_tol) / x


def _mb_reduced(x, theta, rel_tol=1e-11):
    s1 = _sigma1_thermal(x, theta, rel_tol) if theta > 0 else 0.0
    if x > 2.0:
        s1 += _sigma1_pair_breaking(x, theta, rel_tol)
    return s1, _sigma2(x, theta, rel_tol)


def mb_sigma(omega, t, params):
    """Mattis-Bardeen ``(sigma1/sigma_n, sigma2/sigma_n)`` at angular frequency ``omega``."""
    if not (omega > 0 and t > 0):
        raise ValueError("omega and t must be positive")
    delta = bcs_gap(t, params).delta
    if delta == 0.0:
        return 1.0, 0.0
    return _mb_reduced(HBAR * omega / delta, K_B * t / delta)


def superfluid_weight(t, params):
    """Weight of the delta(omega)/omega term, as an effective plasma frequency squared."""
    if t >= params.t_c:
        raise NormalStateError("normal state: no superfluid weight at t >= t_c")
    delta = bcs_gap(t, params).delta
    return (params.omega_p**2 / params.gamma) * (math.pi * delta / HBAR) \
        * math.tanh(delta / (2.0 * K_B * t))


# -- imaginary-axis permittivity -------------------------------------------

def _drude_weight(omega, params):
    # omega * Im eps_Drude(omega)
    return params.omega_p**2 * params.gamma / (omega**2 + params.gamma**2)


def _deficit_direct(xi, t, params, rel_tol=1e-9):
    """(2/pi) int (1 - sigma1/sigma_n) omega Im eps_D / (omega^2 + xi^2) d omega, nested quad."""
    delta = bcs_gap(t, params).delta
    theta = K_B * t / delta
    scale = delta / HBAR

    def g(x):
        om = x * scale
        s1 = _sigma1_thermal(x, theta, 1e-12) + (_sigma1_pair_breaking(x, theta, 1e-12)
                                                 if x > 2.0 else 0.0)
        return (1.0 - s1) * _drude_weight(om, params) / (om * om + xi * xi)

    total = 0.0
    edges = [0.0, 1e-3, 0.1, 1.0, 2.0, 3.0, 10.0, 100.0, 1e3, 1e4, 1e5]
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(g, lo, hi, epsabs=0, epsrel=rel_tol, limit=400)[0]
    return (2.0 / math.pi) * scale * total


_X_PANELS = np.concatenate([np.geomspace(1e-7, 2.0, 97), np.geomspace(2.0, 1e5, 81)[1:]])
_ORDER = 8
_lock = threading.Lock()


@lru_cache(maxsize=256)
def _deficit_nodes(t, params):
    """Gauss-Legendre nodes (in ln x) and weighted deficit values for one temperature."""
    delta = bcs_gap(t, params).delta
    theta = K_B * t / delta
    gx, gw = np.polynomial.legendre.leggauss(_ORDER)
    lo, hi = np.log(_X_PANELS[:-1]), np.log(_X_PANELS[1:])
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    u = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    x = np.exp(u)
    deficit = np.empty_like(x)
    for i, xi_ in enumerate(x):
        s1 = _sigma1_thermal(xi_, theta, 1e-12)
        if xi_ > 2.0:
            s1 += _sigma1_pair_breaking(xi_, theta, 1e-12)
        deficit[i] = 1.0 - s1
    om = x * delta / HBAR
    # d omega = omega d(ln x); x < 1e-7 and x > 1e5 are dropped (< 1e-6 relative)
    weights = w * om * deficit * _drude_weight(om, params)
    return om, weights


def _deficit_tabulated(xi, t, params):
    with _lock:
        om, weights = _deficit_nodes(t, params)
    xi = np.atleast_1d(xi)
    return (2.0 / math.pi) * (weights[None, :] / (om[None, :] ** 2 + xi[:, None] ** 2)).sum(axis=1)


def eps_sc_imag_axis(xi, t, params, method="tabulated"):
    """``eps(i xi)`` of the superconductor; equals Drude for ``t >= t_c``.

    Below ``t_c`` the Drude permittivity loses the Mattis-Bardeen absorption
    deficit and gains the superfluid pole ``omega_s**2 / xi**2``.  ``method``
    selects the fixed-node ("tabulated") or nested adaptive ("direct") route
    for the deficit integral.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(~(xi_arr > 0)):
        raise ValueError("xi must be strictly positive")
    base = drude_eps(params.omega_p, params.gamma, xi_arr)
    if t >= params.t_c:
        out = base
    else:
        if method == "tabulated":
            deficit = _deficit_tabulated(xi_arr, float(t), params)
        elif method == "direct":
            deficit = np.array([_deficit_direct(x, t, params) for x in xi_arr])
        else:
            raise ValueError(f"unknown method {method!r}")
        out = base + superfluid_weight(t, params) / xi_arr**2 - deficit
    return out if np.ndim(xi) else float(out[0])
