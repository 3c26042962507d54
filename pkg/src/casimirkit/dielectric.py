"""Dielectric response models on the imaginary frequency axis.

All closed-form models here are evaluated at ``omega = i*xi`` with ``xi > 0``.
The ``xi = 0`` (l = 0 Matsubara) behaviour is never obtained by evaluating
``eps`` at a tiny frequency; instead :func:`zero_freq_class` reports how the
product ``eps * xi**k`` behaves, which is all the Fresnel coefficients need.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .constants import C, EV_TO_RAD_S

PLASMA_BELOW_TC = "plasma"
MATTIS_BARDEEN = "mb"


class ModelSpecError(ValueError):
    """Raised for a malformed model specification string."""


# -- models -----------------------------------------------------------------

@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class IdealMetal:
    pass


@dataclass(frozen=True)
class Plasma:
    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be positive")

    @property
    def penetration_depth(self):
        return C / self.omega_p


@dataclass(frozen=True)
class Drude:
    omega_p: float
    gamma: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("omega_p must be positive")
        if not self.gamma >= 0:
            raise ValueError("gamma must be non-negative")

    @property
    def penetration_depth(self):
        return C / self.omega_p


@dataclass(frozen=True)
class Tabulated:
    table: "OpticalTable"  # noqa: F821
    extrapolation: "ExtrapolationPolicy"  # noqa: F821


@dataclass(frozen=True)
class Superconductor:
    """Normal-state Drude metal that turns superconducting below ``t_c``.

    ``sub_model`` selects the description used below ``t_c``: ``"plasma"``
    (lossless plasma model) or ``"mb"`` (Mattis-Bardeen conductivity).
    """

    omega_p: float
    gamma: float
    t_c: float
    sub_model: str = MATTIS_BARDEEN
    gap0_ratio: float = 1.764

    def __post_init__(self):
        if not (self.omega_p > 0 and self.gamma > 0 and self.t_c > 0):
            raise ValueError("omega_p, gamma and t_c must be positive")
        if self.sub_model not in (PLASMA_BELOW_TC, MATTIS_BARDEEN):
            raise ValueError(f"unknown superconducting sub-model {self.sub_model!r}")

    @property
    def params(self):
        from .superconductor import SuperconductorParams

        return SuperconductorParams(self.omega_p, self.gamma, self.t_c, self.gap0_ratio)

    @property
    def normal_state(self):
        return Drude(self.omega_p, self.gamma)


DielectricModel = Union[Vacuum, IdealMetal, Plasma, Drude, Tabulated, Superconductor]


# -- zero-frequency classification -----------------------------------------

@dataclass(frozen=True)
class Finite:
    eps0: float


@dataclass(frozen=True)
class DrudeLike:
    pass


@dataclass(frozen=True)
class PlasmaLike:
    omega_eff_sq: float

    def __post_init__(self):
        if not self.omega_eff_sq > 0:
            raise ValueError("omega_eff_sq must be positive")


ZeroFreqClass = Union[Finite, DrudeLike, PlasmaLike]


# -- evaluation -------------------------------------------------------------

def plasma_eps(omega_p, xi):
    xi = np.asarray(xi, dtype=float)
    return 1.0 + (omega_p / xi) ** 2


def drude_eps(omega_p, gamma, xi):
    if gamma == 0:
        return plasma_eps(omega_p, xi)
    xi = np.asarray(xi, dtype=float)
    return 1.0 + omega_p**2 / (xi * (xi + gamma))


def drude_im_eps(omega_p, gamma, omega):
    """Imaginary part of the Drude permittivity on the real frequency axis."""
    omega = np.asarray(omega, dtype=float)
    return omega_p**2 * gamma / (omega * (omega**2 + gamma**2))


def eps_imag_axis(model, xi, t=None):
    """Permittivity ``eps(i*xi)`` of ``model``; ``xi`` may be an array.

    ``t`` (kelvin) is only consulted by :class:`Superconductor`.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(~(xi_arr > 0)):
        raise ValueError("xi must be strictly positive; use zero_freq_class for xi = 0")
    match model:
        case Vacuum():
            out = np.ones_like(xi_arr)
        case IdealMetal():
            raise TypeError("IdealMetal has no finite permittivity; use the ideal-metal "
                            "reflection short-circuit")
        case Plasma(omega_p=wp):
            out = plasma_eps(wp, xi_arr)
        case Drude(omega_p=wp, gamma=g):
            out = drude_eps(wp, g, xi_arr)
        case Tabulated(table=table, extrapolation=policy):
            from .optics import kk_to_imag_axis

            out = kk_to_imag_axis(table, policy, xi_arr)
        case Superconductor():
            if t is None:
                raise ValueError("Superconductor permittivity needs a temperature")
            if model.sub_model == PLASMA_BELOW_TC and t < model.t_c:
                out = plasma_eps(model.omega_p, xi_arr)
            else:
                from .superconductor import eps_sc_imag_axis

                out = eps_sc_imag_axis(xi_arr, t, model.params)
        case _:
            raise TypeError(f"not a dielectric model: {model!r}")
    return out if np.ndim(xi) else float(out)


def zero_freq_class(model, t=None):
    match model:
        case Vacuum():
            return Finite(1.0)
        case IdealMetal():
            return PlasmaLike(math.inf)
        case Plasma(omega_p=wp):
            return PlasmaLike(wp**2)
        case Drude():
            return DrudeLike()
        case Tabulated(extrapolation=policy):
            from .optics import PlasmaTail

            if isinstance(policy.low, PlasmaTail):
                return PlasmaLike(policy.low.omega_p**2)
            return DrudeLike()
        case Superconductor():
            if t is None:
                raise ValueError("Superconductor classification needs a temperature")
            if t >= model.t_c:
                return DrudeLike()
            if model.sub_model == PLASMA_BELOW_TC:
                return PlasmaLike(model.omega_p**2)
            from .superconductor import superfluid_weight

            return PlasmaLike(superfluid_weight(t, model.params))
    raise TypeError(f"not a dielectric model: {model!r}")


# -- defaults and spec strings ---------------------------------------------

GOLD = Drude(9.0 * EV_TO_RAD_S, 0.035 * EV_TO_RAD_S)
SILVER = Drude(9.0 * EV_TO_RAD_S, 0.020 * EV_TO_RAD_S)
# Ordal et al. Drude fit for Al; T_c of bulk/film Al
ALUMINIUM = Superconductor(14.75 * EV_TO_RAD_S, 0.0818 * EV_TO_RAD_S, 1.3)

_QUANTITY = re.compile(r"^\s*([-+0-9.eE]+)\s*(ev|rad/s|k)?\s*$", re.IGNORECASE)


def parse_quantity(text, key):
    m = _QUANTITY.match(text)
    if not m:
        raise ModelSpecError(f"cannot parse value {text!r} for {key!r}")
    value = float(m.group(1))
    unit = (m.group(2) or "").lower()
    if unit == "ev":
        value *= EV_TO_RAD_S
    return value


def _parse_kv(body):
    out = {}
    if not body:
        return out
    for item in body.split(","):
        if "=" not in item:
            raise ModelSpecError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip().lower()] = value.strip()
    return out


def parse_model(spec, base_dir=None):
    """Build a model from a spec string such as ``drude:wp=9.0eV,gamma=0.035eV``.

    Recognised kinds: ``vacuum``, ``ideal``, ``plasma``, ``drude``, ``table``
    and ``sc``. Bare numbers are read as rad/s (kelvin for ``tc``).
    """
    kind, _, body = spec.strip().partition(":")
    kind = kind.lower()
    kv = _parse_kv(body)

    def need(key):
        if key not in kv:
            raise ModelSpecError(f"{kind!r} model requires {key}=")
        return parse_quantity(kv[key], key)

    try:
        if kind == "vacuum":
            return Vacuum()
        if kind == "ideal":
            return IdealMetal()
        if kind == "plasma":
            return Plasma(need("wp"))
        if kind == "drude":
            return Drude(need("wp"), need("gamma"))
        if kind == "sc":
            sub = kv.get("model", MATTIS_BARDEEN).lower()
            ratio = float(kv.get("gap0_ratio", 1.764))
            return Superconductor(need("wp"), need("gamma"), need("tc"), sub, ratio)
        if kind == "table":
            from .optics import DrudeTail, ExtrapolationPolicy, InversePowerTail, PlasmaTail, load_table

            if "path" not in kv:
                raise ModelSpecError("table model requires path=")
            path = Path(kv["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            with open(path, "rb") as fh:
                table = load_table(fh, source_label=str(path))
            wp = parse_quantity(kv["wp"], "wp") if "wp" in kv else GOLD.omega_p
            extrap = kv.get("extrap", "drude").lower()
            if extrap == "drude":
                gamma = parse_quantity(kv["gamma"], "gamma") if "gamma" in kv else GOLD.gamma
                low = DrudeTail(wp, gamma)
            elif extrap == "plasma":
                low = PlasmaTail(wp)
            else:
                raise ModelSpecError(f"unknown extrapolation {extrap!r}")
            high = InversePowerTail(float(kv.get("exponent", 3.0)))
            return Tabulated(table, ExtrapolationPolicy(low, high))
    except (ValueError, OSError) as exc:
        if isinstance(exc, ModelSpecError):
            raise
        raise ModelSpecError(f"{spec!r}: {exc}") from exc
    raise ModelSpecError(f"unknown model kind {kind!r}")
