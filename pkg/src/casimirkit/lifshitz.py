"""Finite-temperature Lifshitz theory for two half-spaces and the PFA sphere.

Internally every transverse-momentum integral uses the dimensionless variable
``y = 2 a q_l`` with ``q_l = sqrt(k_perp**2 + xi_l**2 / c**2)``, so that

    P = -(k_B T / (8 pi a**3)) sum'_l int_{y_l}^inf y**2 sum_a R_a e^-y / (1 - R_a e^-y) dy
    F =  (k_B T / (8 pi a**2)) sum'_l int_{y_l}^inf y    sum_a ln(1 - R_a e^-y) dy

with ``y_l = 2 a xi_l / c`` and ``R_a`` the product of the two reflection
coefficients for polarisation ``a``.  The l = 0 term is built from the
zero-frequency class of each model, never from ``eps`` at a tiny frequency.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._quadrature import integrate_panels
from .constants import C, HBAR, K_B
from .dielectric import (DrudeLike, Finite, IdealMetal, Plasma, PlasmaLike, Superconductor,
                         Tabulated, Vacuum, eps_imag_axis, zero_freq_class)

REL_TOL_ENV = "CASIMIRKIT_REL_TOL"

# integration range in t = y - y_l; the integrands carry e^-t
_T_EDGES = np.array([0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 52.0])


class MatsubaraConvergenceError(RuntimeError):
    def __init__(self, terms, bound):
        self.terms = terms
        self.bound = bound
        super().__init__(f"Matsubara sum not converged after {terms} terms "
                         f"(relative tail bound {bound:.3g})")


class PFAValidityError(ValueError):
    pass


def _default_rel_tol():
    value = os.environ.get(REL_TOL_ENV)
    return float(value) if value else 1e-9


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = field(default_factory=_default_rel_tol)
    max_matsubara_terms: int = 20000
    tail_estimate: bool = True

    def __post_init__(self):
        if not 0 < self.rel_tol < 1e-3:
            raise ValueError("rel_tol must lie in (0, 1e-3)")
        if self.max_matsubara_terms < 100:
            raise ValueError("max_matsubara_terms must be at least 100")


@dataclass(frozen=True)
class PlatePlate:
    pass


@dataclass(frozen=True)
class SpherePlate:
    radius: float
    pfa_limit: float = 0.05
    strict: bool = False

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def check(self, a):
        ratio = a / self.radius
        if ratio >= self.pfa_limit:
            msg = f"a/R = {ratio:.3g} exceeds the PFA validity bound {self.pfa_limit}"
            if self.strict:
                raise PFAValidityError(msg)
            warnings.warn(msg, stacklevel=3)


Geometry = PlatePlate | SpherePlate


def matsubara_frequency(l, t):
    if not t > 0:
        raise ValueError("temperature must be positive")
    return 2.0 * math.pi * K_B * t * np.asarray(l) / HBAR


# -- reflection coefficients ------------------------------------------------

def _fresnel(eps, q, s):
    """(r_TM, r_TE) for wave-vector scale ``q`` >= ``s`` with ``s = xi / c``.

    Written in a cancellation-free form: ``kt**2 - q**2 = (eps - 1) s**2``.
    Works in SI (q in 1/m) or in the dimensionless ``y`` variables alike.
    """
    de = (eps - 1.0) * s * s
    kt = np.sqrt(q * q + de)
    r_te = -de / (q + kt) ** 2
    r_tm = (eps - 1.0) * ((eps + 1.0) * q * q - s * s) / (eps * q + kt) ** 2
    return r_tm, r_te


def _zero_frequency(zero_class, q):
    """(r_TM, r_TE) at xi = 0; ``q`` in the same units as sqrt(omega_eff_sq)/c."""
    q = np.asarray(q, dtype=float)
    match zero_class:
        case Finite(eps0=e0):
            return np.full_like(q, (e0 - 1.0) / (e0 + 1.0)), np.zeros_like(q)
        case DrudeLike():
            return np.ones_like(q), np.zeros_like(q)
        case PlasmaLike(omega_eff_sq=w2):
            if math.isinf(w2):
                return np.ones_like(q), -np.ones_like(q)
            b = w2 / C**2
            return np.ones_like(q), -b / (q + np.sqrt(q * q + b)) ** 2
    raise TypeError(f"not a zero-frequency class: {zero_class!r}")


def reflection_coeffs(eps_l, xi_l, k_perp, zero_class=None, ideal=False):
    """Fresnel coefficients (r_TM, r_TE) on the imaginary frequency axis.

    ``k_perp`` in 1/m, ``xi_l`` in rad/s.  At ``xi_l == 0`` the behaviour is
    dictated by ``zero_class``; ``ideal=True`` short-circuits to (1, -1).
    """
    k = np.asarray(k_perp, dtype=float)
    if ideal:
        out = (np.ones_like(k), -np.ones_like(k))
    elif xi_l == 0:
        if zero_class is None:
            raise ValueError("zero_class is required at xi = 0")
        out = _zero_frequency(zero_class, k)
    else:
        s = xi_l / C
        q = np.sqrt(k * k + s * s)
        out = _fresnel(float(eps_l), q, s)
    if np.ndim(k_perp) == 0:
        return float(out[0]), float(out[1])
    return out


# -- Matsubara terms --------------------------------------------------------

class _Body:
    """Per-evaluation view of a model at fixed a, T."""

    def __init__(self, model, t):
        self.model = model
        self.t = t
        self.ideal = isinstance(model, IdealMetal)
        self.vacuum = isinstance(model, Vacuum)

    def eps(self, xi):
        return eps_imag_axis(self.model, xi, self.t)

    def zero_class(self):
        return zero_freq_class(self.model, self.t)

    def r(self, eps, y, y_l):
        if self.ideal:
            return 1.0, -1.0
        return _fresnel(eps, y, y_l)


def _kernel(kind, y, rtm, rte):
    """Integrand in t for the pressure or free-energy term."""
    ey = np.exp(-y)
    if kind == "pressure":
        return y * y * (rtm * ey / (1.0 - rtm * ey) + rte * ey / (1.0 - rte * ey))
    return y * (np.log1p(-rtm * ey) + np.log1p(-rte * ey))


def _terms(kind, pairs, a, xi, rel_tol, abs_tol=0.0):
    """Dimensionless Matsubara terms for an array of xi.

    ``pairs`` is a sequence of ``(sign, body1, body2)``; the signed kernels are
    added before integration, so differences are integrated directly.
    ``xi == [0]`` selects the zero-frequency term.
    """
    xi = np.asarray(xi, dtype=float)
    pairs = [p for p in pairs if not (p[1].vacuum or p[2].vacuum)]
    if not pairs:
        return np.zeros_like(xi)
    if xi.size == 1 and xi[0] == 0:
        classes = [(sign, b1.zero_class(), b2.zero_class()) for sign, b1, b2 in pairs]

        def f(t):
            q = t / (2.0 * a)
            out = 0.0
            for sign, z1, z2 in classes:
                r1, r2 = _zero_frequency(z1, q), _zero_frequency(z2, q)
                out = out + sign * _kernel(kind, t, r1[0] * r2[0], r1[1] * r2[1])
            return np.atleast_2d(out)

        return integrate_panels(f, _T_EDGES, 1, rel_tol, abs_tol)
    yl = (2.0 * a * xi / C)[:, None]
    cache = {}
    evaluated = []
    for sign, b1, b2 in pairs:
        eps = []
        for b in (b1, b2):
            if b.ideal:
                eps.append(None)
                continue
            key = b.model
            if key not in cache:
                cache[key] = b.eps(xi)[:, None]
            eps.append(cache[key])
        evaluated.append((sign, b1, b2, eps[0], eps[1]))

    def f(t):
        y = yl + t[None, :]
        out = 0.0
        for sign, b1, b2, e1, e2 in evaluated:
            r1 = b1.r(e1, y, yl)
            r2 = b2.r(e2, y, yl)
            out = out + sign * _kernel(kind, y, r1[0] * r2[0], r1[1] * r2[1])
        return out * np.ones_like(y)

    return integrate_panels(f, _T_EDGES, len(xi), rel_tol, abs_tol)


def _matsubara_sum(term_fn, zero_term, q, scale=None):
    """sum'_l of terms; ``term_fn(l_array)`` returns terms for l >= 1."""
    total = 0.5 * zero_term
    prev = None
    l0 = 1
    block = 32
    while True:
        if l0 > q.max_matsubara_terms:
            bound = abs(prev) / max(abs(total), 1e-300) if prev is not None else math.inf
            raise MatsubaraConvergenceError(l0 - 1, bound)
        ls = np.arange(l0, min(l0 + block, q.max_matsubara_terms + 1))
        ref = abs(scale) if scale is not None else abs(total)
        terms = term_fn(ls, abs_tol=1e-3 * q.rel_tol * ref)
        partial = total + np.cumsum(terms)
        before = np.concatenate([[prev if prev is not None else np.nan], terms[:-1]])
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = terms / before
            # geometric tail; a sign change bounds the remainder by the last term
            tail = np.where(terms == 0, 0.0,
                            np.where((rho > 0) & (rho < 1), terms * rho / (1 - rho),
                                     np.where(rho <= 0, np.abs(terms), np.inf)))
        ref = np.abs(partial) if scale is None else abs(scale)
        done = (np.abs(terms) <= q.rel_tol * ref) & (np.abs(tail) <= q.rel_tol * ref)
        hit = np.flatnonzero(done)
        if hit.size:
            j = hit[0]
            result = partial[j]
            if q.tail_estimate and np.isfinite(tail[j]) and 0 < rho[j] < 1:
                result += tail[j]
            return float(result)
        total = partial[-1]
        prev = terms[-1]
        l0 = ls[-1] + 1
        block = min(2 * block, 4096)


def _check_args(a, t):
    if not a > 0:
        raise ValueError("separation must be positive")
    if not t > 0:
        raise ValueError("temperature must be positive (use energy_zero_temperature)")


def _sum_for(kind, a, t, pairs, q, scale=None):
    xi1 = matsubara_frequency(1, t)
    zero = _terms(kind, pairs, a, [0.0], q.rel_tol)[0]
    return _matsubara_sum(
        lambda ls, abs_tol: _terms(kind, pairs, a, ls * xi1, q.rel_tol, abs_tol), zero, q,
        scale=scale)


def pressure_plate_plate(a, t, m1, m2, q=None):
    """Casimir pressure (Pa, negative = attractive) between two half-spaces."""
    q = q or QuadratureConfig()
    _check_args(a, t)
    s = _sum_for("pressure", a, t, [(1.0, _Body(m1, t), _Body(m2, t))], q)
    return -K_B * t / (8.0 * math.pi * a**3) * s


def free_energy_per_area(a, t, m1, m2, q=None):
    """Casimir free energy per unit area (J/m^2) between two half-spaces."""
    q = q or QuadratureConfig()
    _check_args(a, t)
    s = _sum_for("energy", a, t, [(1.0, _Body(m1, t), _Body(m2, t))], q)
    return K_B * t / (8.0 * math.pi * a**2) * s


def pressure_difference(a, t, m1, m2, n1, n2, q=None, scale=None):
    """P(m1, m2) - P(n1, n2), with the two kernels differenced before integration.

    ``scale`` (Pa) sets the absolute truncation threshold of the Matsubara
    sum; by default it is the pressure of the ``(n1, n2)`` pair.
    """
    q = q or QuadratureConfig()
    _check_args(a, t)
    if scale is None:
        scale = pressure_plate_plate(a, t, n1, n2, q)
    pref = -K_B * t / (8.0 * math.pi * a**3)
    pairs = [(1.0, _Body(m1, t), _Body(m2, t)), (-1.0, _Body(n1, t), _Body(n2, t))]
    return pref * _sum_for("pressure", a, t, pairs, q, scale=scale / pref)


def force_sphere_plate(a, t, radius, m_sphere, m_plate, q=None, geometry=None):
    """PFA sphere-plate force (N): ``2 pi R`` times the plate free energy."""
    geometry = geometry or SpherePlate(radius)
    geometry.check(a)
    return 2.0 * math.pi * radius * free_energy_per_area(a, t, m_sphere, m_plate, q)


def _zero_t_allowed(model):
    match model:
        case Vacuum() | IdealMetal() | Plasma():
            return True
        case Tabulated():
            return isinstance(zero_freq_class(model), PlasmaLike)
    return False


def energy_zero_temperature(a, m1, m2, q=None):
    """Zero-temperature Casimir energy per area (J/m^2), continuous frequency integral.

    Only models with a plasma-like or finite zero-frequency limit are accepted.
    """
    q = q or QuadratureConfig()
    for m in (m1, m2):
        if isinstance(m, Superconductor) or not _zero_t_allowed(m):
            raise ValueError("zero-T Drude limit not supported")
    b1, b2 = _Body(m1, None), _Body(m2, None)
    if b1.vacuum or b2.vacuum:
        return 0.0

    def outer(zeta):
        return _terms("energy", [(1.0, b1, b2)], a, zeta * C / (2.0 * a), q.rel_tol * 0.1)[None, :]

    total = integrate_panels(outer, _T_EDGES, 1, q.rel_tol)[0]
    return HBAR * C / (32.0 * math.pi**2 * a**3) * total
