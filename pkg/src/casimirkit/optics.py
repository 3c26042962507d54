"""Tabulated optical constants and the dispersion (Kramers-Kronig) transform.

Tables are read from plain text files with three whitespace separated columns:
photon energy in eV, refractive index n and extinction coefficient k.  Lines
starting with ``#`` are comments.  ``Im eps = 2 n k`` is interpolated
log-log between rows and pushed to the imaginary axis with

    eps(i xi) = 1 + (2/pi) * int_0^inf  w Im eps(w) / (w**2 + xi**2) dw,

the integral being split into an analytic low-frequency tail, the tabulated
interior and an analytic inverse-power high-frequency tail.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .constants import EV_TO_RAD_S

MIN_ROWS = 8


class TableError(ValueError):
    """Base class for optical-table ingestion errors."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedLineError(TableError):
    pass


class NonMonotonicError(TableError):
    pass


class InvalidValueError(TableError):
    pass


class TooFewRowsError(TableError):
    pass


class KKQuadratureError(RuntimeError):
    def __init__(self, estimate, error, tolerance):
        self.estimate = estimate
        self.error = error
        self.tolerance = tolerance
        super().__init__(
            f"dispersion integral did not reach tolerance {tolerance:g} "
            f"(estimate {estimate!r}, error {error:g})")


@dataclass(frozen=True, eq=False)
class OpticalTable:
    omega: np.ndarray
    n: np.ndarray
    k: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        for name in ("omega", "n", "k"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.omega.shape == self.n.shape == self.k.shape) or self.omega.ndim != 1:
            raise ValueError("omega, n, k must be 1-d arrays of equal length")
        if len(self.omega) < MIN_ROWS:
            raise TooFewRowsError(f"too few rows ({len(self.omega)} < {MIN_ROWS})")
        if np.any(self.omega <= 0) or np.any(np.diff(self.omega) <= 0):
            raise NonMonotonicError("omega must be positive and strictly increasing")
        if np.any(self.n <= 0) or np.any(self.k < 0):
            raise InvalidValueError("n must be positive and k non-negative")

    def __len__(self):
        return len(self.omega)

    @property
    def im_eps_nodes(self):
        return 2.0 * self.n * self.k


@dataclass(frozen=True)
class DrudeTail:
    omega_p: float
    gamma: float

    def __post_init__(self):
        if self.omega_p < 0 or self.gamma < 0:
            raise ValueError("omega_p and gamma must be non-negative")


@dataclass(frozen=True)
class PlasmaTail:
    """Lossless low-frequency extrapolation: a pole of weight omega_p**2 at w = 0."""

    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be positive")

    @classmethod
    def weight_matched(cls, tail, omega_min):
        """Plasma tail carrying the same spectral weight as ``tail`` below ``omega_min``."""
        weight = (2.0 / math.pi) * tail.omega_p**2 * math.atan2(omega_min, tail.gamma)
        return cls(math.sqrt(weight))


@dataclass(frozen=True)
class InversePowerTail:
    exponent: float = 3.0

    def __post_init__(self):
        if not self.exponent > 1:
            raise ValueError("high-frequency tail exponent must exceed 1")


@dataclass(frozen=True)
class ExtrapolationPolicy:
    low: DrudeTail | PlasmaTail
    high: InversePowerTail = field(default_factory=InversePowerTail)
    rel_tol: float = 1e-8


# -- ingestion --------------------------------------------------------------

def load_table(source, source_label=""):
    """Parse an ``E_eV n k`` text table from a byte or text stream."""
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    energies, ns, ks = [], [], []
    last = None
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 3:
            raise MalformedLineError(f"expected 3 columns, got {len(parts)}", lineno)
        try:
            e, n, k = (float(p) for p in parts)
        except ValueError:
            raise MalformedLineError(f"non-numeric entry in {stripped!r}", lineno) from None
        if not all(math.isfinite(v) for v in (e, n, k)):
            raise MalformedLineError("non-finite entry", lineno)
        if e <= 0:
            raise InvalidValueError("photon energy must be positive", lineno)
        if n <= 0 or k < 0:
            raise InvalidValueError(f"invalid optical constants n={n}, k={k}", lineno)
        if last is not None and e <= last:
            raise NonMonotonicError(f"energy {e} does not increase (previous {last})", lineno)
        last = e
        energies.append(e)
        ns.append(n)
        ks.append(k)
    if len(energies) < MIN_ROWS:
        raise TooFewRowsError(f"too few rows ({len(energies)} < {MIN_ROWS})")
    return OpticalTable(np.array(energies) * EV_TO_RAD_S, np.array(ns), np.array(ks),
                        source_label)


def format_table(table, header=None):
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    buf.write("# E_eV n k\n")
    for w, n, k in zip(table.omega / EV_TO_RAD_S, table.n, table.k):
        buf.write(f"{float(w)!r} {float(n)!r} {float(k)!r}\n")
    return buf.getvalue()


def synthetic_drude_table(omega_p, gamma, e_min=0.01, e_max=100.0, rows=200):
    """Optical table sampled from the Drude permittivity on a log energy grid."""
    omega = np.geomspace(e_min, e_max, rows) * EV_TO_RAD_S
    eps = 1.0 - omega_p**2 / (omega * (omega + 1j * gamma))
    nk = np.sqrt(eps)
    return OpticalTable(omega, nk.real, nk.imag, source_label="synthetic Drude")


# -- interpolation ----------------------------------------------------------

def _interp_im_eps(table, omega):
    w = table.omega
    y = table.im_eps_nodes
    idx = np.clip(np.searchsorted(w, omega, side="right") - 1, 0, len(w) - 2)
    w0, w1 = w[idx], w[idx + 1]
    y0, y1 = y[idx], y[idx + 1]
    lin = y0 + (y1 - y0) * (omega - w0) / (w1 - w0)
    positive = (y0 > 0) & (y1 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.log(omega / w0) / np.log(w1 / w0)
        loglog = np.exp(np.log(np.where(positive, y0, 1.0)) * (1 - s)
                        + np.log(np.where(positive, y1, 1.0)) * s)
    out = np.where(positive, loglog, lin)
    # exact at the nodes
    return np.where(omega == w0, y0, np.where(omega == w1, y1, out))


def im_eps(table, omega):
    """``Im eps = 2 n k`` at ``omega`` (rad/s) inside the tabulated range."""
    arr = np.asarray(omega, dtype=float)
    if np.any(arr < table.omega[0]) or np.any(arr > table.omega[-1]):
        raise ValueError("omega outside the tabulated range; extrapolation belongs to "
                         "kk_to_imag_axis")
    out = _interp_im_eps(table, arr)
    return out if np.ndim(omega) else float(out)


# -- dispersion transform ---------------------------------------------------

def _low_tail(low, omega_min, xi):
    if isinstance(low, PlasmaTail):
        return low.omega_p**2 / xi**2
    wp2, g = low.omega_p**2, low.gamma
    if wp2 == 0:
        return np.zeros_like(xi)
    if g == 0:
        return wp2 / xi**2
    # (2/pi) wp^2 g int_0^W dw / ((w^2+g^2)(w^2+xi^2)), by partial fractions
    h_g = math.atan2(omega_min, g) / g
    h_xi = np.arctan2(omega_min, xi) / xi
    denom = xi**2 - g**2
    out = np.empty_like(xi)
    near = np.abs(denom) < 1e-6 * xi**2
    far = ~near
    out[far] = (2 / math.pi) * wp2 * g * (h_g - h_xi[far]) / denom[far]
    for i in np.flatnonzero(near):
        x = xi[i]
        val, _ = integrate.quad(lambda w: 1.0 / ((w * w + g * g) * (w * w + x * x)),
                                0.0, omega_min, epsabs=0, epsrel=1e-12)
        out[i] = (2 / math.pi) * wp2 * g * val
    return out


def _high_tail(high, omega_max, im_max, xi):
    # Im eps = A (W/w)^n beyond W; with w = W/s the tail integral becomes
    # (2/pi) A int_0^1 s^(n-1) / (1 + (x s)^2) ds, x = xi/W
    if im_max == 0:
        return np.zeros_like(xi)
    n = high.exponent
    x = xi / omega_max
    if n == 3:
        small = x < 1e-2
        xs = np.where(small, 1.0, x)
        val = np.where(small, 1 / 3 - x**2 / 5 + x**4 / 7, (1.0 - np.arctan(xs) / xs) / xs**2)
    else:
        val = np.array([integrate.quad(lambda s, xx=xx: s**(n - 1) / (1.0 + (xx * s) ** 2),
                                       0.0, 1.0, epsabs=0, epsrel=1e-12)[0] for xx in x])
    return (2 / math.pi) * im_max * val


def kk_to_imag_axis(table, policy, xi):
    """``eps(i xi)`` from tabulated absorption plus the extrapolation policy."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(~(xi_arr > 0)):
        raise ValueError("xi must be strictly positive")
    w = table.omega
    u_nodes = np.log(w)
    y_nodes = table.im_eps_nodes

    # coarse trapezoid estimate sets a per-xi scale so that the adaptive
    # integration controls relative, not max-norm, error
    coarse = integrate.trapezoid(w[None, :] ** 2 * y_nodes[None, :]
                      / (w[None, :] ** 2 + xi_arr[:, None] ** 2), u_nodes, axis=1)
    scale = np.where(coarse > 0, coarse, 1.0)

    def integrand(u):
        om = math.exp(u)
        return om * om * _interp_im_eps(table, np.array(om)) / (om * om + xi_arr**2) / scale

    points = list(u_nodes[1:-1])
    if xi_arr.size == 1 and w[0] < xi_arr[0] < w[-1]:
        points.append(math.log(xi_arr[0]))
    if np.any(y_nodes > 0):
        res, err = integrate.quad_vec(integrand, u_nodes[0], u_nodes[-1], points=sorted(points),
                                      epsabs=1e-14, epsrel=policy.rel_tol, norm="max",
                                      limit=20000)
        if err > max(policy.rel_tol * np.max(np.abs(res)), 1e-14) * 10:
            raise KKQuadratureError(res * scale, err, policy.rel_tol)
        interior = (2 / math.pi) * res * scale
    else:
        interior = np.zeros_like(xi_arr)
    out = (1.0 + _low_tail(policy.low, w[0], xi_arr) + interior
           + _high_tail(policy.high, w[-1], y_nodes[-1], xi_arr))
    return out if np.ndim(xi) else float(out[0])
