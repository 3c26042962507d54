"""Ideal-metal closed forms, the small-parameter expansion and roughness averaging."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from importlib import resources

from .constants import C, HBAR, K_B

DEFAULT_COEFFICIENTS = "plasma_pfa_d4t4.txt"


class CoefficientTableError(ValueError):
    pass


class SmallParameterError(ValueError):
    pass


class RoughnessValidityError(ValueError):
    pass


def ideal_metal_pressure_t0(a):
    return -math.pi**2 * HBAR * C / (240.0 * a**4)


def ideal_metal_energy_t0(a):
    return -math.pi**2 * HBAR * C / (720.0 * a**3)


def ideal_metal_force_sphere_t0(a, radius):
    return -math.pi**3 * HBAR * C * radius / (360.0 * a**3)


# -- expansion coefficients -------------------------------------------------

@dataclass(frozen=True)
class CoefficientSet:
    """Named expansion coefficients; ``deltas[k-1]`` multiplies ``(delta0/a)**k``."""

    name: str
    source: str
    deltas: tuple
    thermal: dict = field(default_factory=dict)

    @property
    def order(self):
        return len(self.deltas)


def parse_coefficients(text):
    """Read a ``key=value`` coefficient table; ``source=`` is mandatory."""
    kv = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CoefficientTableError(f"line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        kv[key.strip()] = value.strip()
    if not kv.get("source"):
        raise CoefficientTableError("coefficient table lacks a source= citation")
    deltas, thermal = {}, {}
    for key, value in kv.items():
        for prefix, target in (("delta_", deltas), ("thermal_", thermal)):
            if key.startswith(prefix):
                try:
                    target[int(key[len(prefix):])] = float(value)
                except ValueError:
                    raise CoefficientTableError(f"bad entry {key}={value}") from None
    if sorted(deltas) != list(range(1, len(deltas) + 1)):
        raise CoefficientTableError("delta_k must be numbered 1..K without gaps")
    return CoefficientSet(kv.get("name", "unnamed"), kv["source"],
                          tuple(deltas[k] for k in sorted(deltas)), thermal)


def load_coefficients(name=DEFAULT_COEFFICIENTS):
    text = resources.files("casimirkit.data").joinpath(name).read_text(encoding="utf-8")
    return parse_coefficients(text)


@dataclass(frozen=True)
class PerturbationParams:
    delta0: float
    tau: float
    coefficient_set: CoefficientSet

    def check(self, a):
        x = self.delta0 / a
        if x > 0.5:
            raise SmallParameterError(f"delta0/a = {x:.3g} > 0.5: expansion not applicable")
        if x > 0.3 or self.tau >= 1.0:
            warnings.warn(f"expansion outside its small-parameter domain "
                          f"(delta0/a = {x:.3g}, tau = {self.tau:.3g})", stacklevel=3)


@dataclass(frozen=True)
class PerturbativeResult:
    value: float
    penetration_order: int
    thermal_orders: tuple
    delta0_over_a: float
    tau: float
    coefficient_set: str


def relative_temperature(a, t):
    return 2.0 * math.pi * K_B * t * a / (HBAR * C)


def perturbative_force_sphere(a, t, radius, omega_p, coeffs=None):
    """Sphere-plate force from the expansion in ``delta0/a`` and ``tau``."""
    if not (a > 0 and radius > 0 and omega_p > 0 and t >= 0):
        raise ValueError("a, radius, omega_p must be positive and t non-negative")
    coeffs = coeffs or load_coefficients()
    params = PerturbationParams(C / omega_p, relative_temperature(a, t), coeffs)
    params.check(a)
    x, tau = params.delta0 / a, params.tau
    factor = 1.0 + sum(c * x**k for k, c in enumerate(coeffs.deltas, start=1))
    factor += sum(c * tau**k for k, c in coeffs.thermal.items())
    return PerturbativeResult(ideal_metal_force_sphere_t0(a, radius) * factor, coeffs.order,
                              tuple(sorted(coeffs.thermal)), x, tau, coeffs.name)


# -- roughness ----------------------------------------------------------------

@dataclass(frozen=True)
class RoughnessSpec:
    rms_sphere: float = 0.0
    rms_plate: float = 0.0

    def __post_init__(self):
        if self.rms_sphere < 0 or self.rms_plate < 0:
            raise ValueError("rms amplitudes must be non-negative")

    @property
    def variance(self):
        return self.rms_sphere**2 + self.rms_plate**2


def roughness_correct(value_fn, a, spec):
    """Second-order average ``F(a) + (sigma**2/2) F''(a)`` over surface profiles."""
    var = spec.variance
    if math.sqrt(var) >= 0.2 * a:
        raise RoughnessValidityError(f"sigma/a = {math.sqrt(var) / a:.3g} exceeds 0.2")
    f0 = value_fn(a)
    if var == 0:
        return f0
    h = 1e-3 * a
    # five-point central stencil: O(h**4) truncation
    f1 = value_fn(a + h) + value_fn(a - h)
    f2 = value_fn(a + 2 * h) + value_fn(a - 2 * h)
    second = (16.0 * f1 - f2 - 30.0 * f0) / (12.0 * h * h)
    return f0 + 0.5 * var * second
