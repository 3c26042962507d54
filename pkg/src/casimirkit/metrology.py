"""Force curves with provenance, the RMS offset fit, synthetic data and the
superconducting differential-pressure sweep."""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import analytic
from .dielectric import Drude, Plasma, Superconductor, Tabulated
from .lifshitz import (QuadratureConfig, SpherePlate, energy_zero_temperature,
                       force_sphere_plate, pressure_difference, pressure_plate_plate)

FORCE = "force"
PRESSURE = "pressure"
SERIES_HEADER = ("z_m", "f_N", "sigma_N")


class FitError(ValueError):
    pass


class BracketError(FitError):
    pass


def format_float(x):
    """Shortest round-trip scientific representation with at least 10 significant digits."""
    return np.format_float_scientific(float(x), unique=True, min_digits=9)


# -- provenance ---------------------------------------------------------------

def describe_model(model):
    if isinstance(model, Tabulated):
        tab = model.table
        digest = hashlib.sha256(b"".join(np.ascontiguousarray(v).tobytes()
                                         for v in (tab.omega, tab.n, tab.k))).hexdigest()
        return {"kind": "Tabulated", "source": tab.source_label, "rows": len(tab),
                "sha256": digest,
                "low": {"kind": type(model.extrapolation.low).__name__,
                        **dataclasses.asdict(model.extrapolation.low)},
                "high": dataclasses.asdict(model.extrapolation.high),
                "rel_tol": model.extrapolation.rel_tol}
    return {"kind": type(model).__name__, **dataclasses.asdict(model)}


def describe_geometry(geometry):
    if isinstance(geometry, SpherePlate):
        return {"kind": "sphere-plate", "radius": geometry.radius,
                "pfa_limit": geometry.pfa_limit}
    return {"kind": "plate-plate"}


def config_hash(provenance):
    blob = json.dumps(provenance, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# -- curves -------------------------------------------------------------------

@dataclasses.dataclass(frozen=True, eq=False)
class ForceCurve:
    a: np.ndarray
    values: np.ndarray
    quantity: str
    provenance: dict

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        v = np.array(self.values, dtype=float)
        for arr in (a, v):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "values", v)
        if a.ndim != 1 or a.shape != v.shape or len(a) == 0:
            raise ValueError("a and values must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(a) <= 0):
            raise ValueError("separations must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("curve values must be finite")
        if self.quantity not in (FORCE, PRESSURE):
            raise ValueError(f"unknown quantity {self.quantity!r}")

    def __len__(self):
        return len(self.a)

    @property
    def config_hash(self):
        return config_hash(self.provenance)

    @property
    def unit(self):
        return "N" if self.quantity == FORCE else "Pa"

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# provenance: {self.config_hash}\n")
        buf.write(f"# config: {json.dumps(self.provenance, sort_keys=True)}\n")
        buf.write(f"a_m,{self.quantity}_{self.unit}\n")
        for a, v in zip(self.a, self.values):
            buf.write(f"{format_float(a)},{format_float(v)}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        provenance, rows, quantity = {}, [], None
        for line in text.splitlines():
            if line.startswith("# config: "):
                provenance = json.loads(line[len("# config: "):])
            elif line.startswith("#") or not line.strip():
                continue
            elif quantity is None:
                quantity = line.split(",")[1].rsplit("_", 1)[0]
            else:
                rows.append([float(x) for x in line.split(",")])
        if not rows:
            raise ValueError("curve file has no data rows")
        rows = np.array(rows)
        return cls(rows[:, 0], rows[:, 1], quantity, provenance)


class CurveTheory:
    """Monotone cubic interpolation of a curve in log a versus log |value|."""

    vectorized = True

    def __init__(self, curve):
        if len(curve) < 2:
            raise ValueError("need at least two points to interpolate")
        self.curve = curve
        self.sign = float(np.sign(curve.values[0]))
        if np.any(np.sign(curve.values) != self.sign):
            raise ValueError("curve changes sign; log interpolation impossible")
        self._interp = PchipInterpolator(np.log(curve.a), np.log(np.abs(curve.values)),
                                         extrapolate=False)
        self.a_min, self.a_max = curve.a[0], curve.a[-1]

    def __call__(self, a):
        arr = np.asarray(a, dtype=float)
        if np.any(arr < self.a_min * (1 - 1e-12)) or np.any(arr > self.a_max * (1 + 1e-12)):
            raise ValueError("separation outside the cached curve range")
        out = self.sign * np.exp(self._interp(np.log(np.clip(arr, self.a_min, self.a_max))))
        return out if np.ndim(a) else float(out)


def point_function(kind, geometry, m_sphere, m_plate, t, q=None):
    """Single-separation evaluator ``a -> value`` for one curve kind."""
    q = q or QuadratureConfig()
    sphere = isinstance(geometry, SpherePlate)
    if kind == "ideal":
        if sphere:
            return lambda a: analytic.ideal_metal_force_sphere_t0(a, geometry.radius)
        return analytic.ideal_metal_pressure_t0
    if kind == "perturbation":
        if not sphere:
            raise ValueError("the perturbative expansion is implemented for sphere-plate only")
        omega_p = getattr(m_plate, "omega_p", None)
        if omega_p is None:
            raise ValueError("perturbative curve needs a plate model with omega_p")
        return lambda a: analytic.perturbative_force_sphere(a, t, geometry.radius, omega_p).value
    if kind != "lifshitz":
        raise ValueError(f"unknown curve kind {kind!r}")
    if t == 0:
        if sphere:
            return lambda a: 2.0 * math.pi * geometry.radius * energy_zero_temperature(
                a, m_sphere, m_plate, q)
        # P = -dE/da by a central difference
        return lambda a: -(energy_zero_temperature(a * (1 + 1e-4), m_sphere, m_plate, q)
                           - energy_zero_temperature(a * (1 - 1e-4), m_sphere, m_plate, q)) \
            / (2e-4 * a)
    if sphere:
        return lambda a: force_sphere_plate(a, t, geometry.radius, m_sphere, m_plate, q,
                                            geometry=geometry)
    return lambda a: pressure_plate_plate(a, t, m_sphere, m_plate, q)


def _evaluate_point(job):
    kind, geometry, m_sphere, m_plate, t, roughness, q, a = job
    fn = point_function(kind, geometry, m_sphere, m_plate, t, q)
    if roughness is None:
        return fn(a)
    return analytic.roughness_correct(fn, a, roughness)


def generate_curve(geometry, m_sphere, m_plate, t, roughness, grid, q=None, kind="lifshitz",
                   workers=1):
    """Sample a force (sphere-plate) or pressure (plate-plate) curve on ``grid``.

    ``kind`` is ``"lifshitz"``, ``"ideal"`` (zero-temperature closed form) or
    ``"perturbation"``.  Roughness averaging is applied to the final
    per-point function.  ``workers > 1`` evaluates points in separate
    processes; results are identical to the sequential run.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("empty separation grid")
    if np.any(np.diff(grid) <= 0) or np.any(grid <= 0):
        raise ValueError("grid must be positive and strictly increasing")
    if not t >= 0:
        raise ValueError("temperature must be non-negative")
    q = q or QuadratureConfig()
    if isinstance(geometry, SpherePlate):
        geometry.check(grid[-1])
    jobs = [(kind, geometry, m_sphere, m_plate, t, roughness, q, float(a)) for a in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_evaluate_point, jobs))
    else:
        values = [_evaluate_point(job) for job in jobs]
    provenance = {
        "kind": kind,
        "geometry": describe_geometry(geometry),
        "models": {"sphere": describe_model(m_sphere), "plate": describe_model(m_plate)},
        "t": t,
        "roughness": dataclasses.asdict(roughness) if roughness else None,
        "quadrature": dataclasses.asdict(q),
    }
    quantity = FORCE if isinstance(geometry, SpherePlate) else PRESSURE
    return ForceCurve(grid, values, quantity, provenance)


# -- measured series ------------------------------------------------------------

@dataclasses.dataclass(frozen=True, eq=False)
class MeasuredSeries:
    z: np.ndarray
    f: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        for name in ("z", "f", "sigma"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.z.shape == self.f.shape == self.sigma.shape) or self.z.ndim != 1:
            raise ValueError("z, f, sigma must be 1-d arrays of equal length")
        if np.any(np.diff(self.z) <= 0):
            raise ValueError("z must be strictly increasing")
        if np.any(~(self.sigma > 0)):
            raise ValueError("sigma must be positive")

    def __len__(self):
        return len(self.z)

    def to_csv(self, provenance=None):
        buf = io.StringIO()
        if provenance is not None:
            buf.write(f"# provenance: {provenance}\n")
        buf.write(",".join(SERIES_HEADER) + "\n")
        for row in zip(self.z, self.f, self.sigma):
            buf.write(",".join(format_float(v) for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        reader = csv.reader(lines)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SERIES_HEADER:
            raise ValueError(f"expected header {','.join(SERIES_HEADER)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValueError(f"data row {lineno}: non-numeric entry") from None
            if len(row) != 3:
                raise ValueError(f"data row {lineno}: expected 3 columns")
        rows = np.array(rows, dtype=float).reshape(-1, 3)
        return cls(rows[:, 0], rows[:, 1], rows[:, 2])


def _theory_values(theory, a):
    if getattr(theory, "vectorized", False):
        return np.asarray(theory(np.asarray(a, dtype=float)), dtype=float)
    return np.array([theory(float(x)) for x in a])


def synth_data(theory, grid, a0_true, noise_rms, seed, sigma=None):
    """Synthetic series ``z = a - a0_true``, ``f = theory(a) + noise``."""
    grid = np.asarray(grid, dtype=float)
    rng = np.random.default_rng(seed)
    f = _theory_values(theory, grid)
    if noise_rms > 0:
        f = f + rng.normal(0.0, noise_rms, size=len(grid))
    if sigma is None:
        sigma = noise_rms if noise_rms > 0 else 1e-12
    return MeasuredSeries(grid - a0_true, f, np.full(len(grid), float(sigma)))


# -- offset fit ----------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class FitResult:
    a0: float
    rms: float
    interval: tuple
    n_points: int

    def __post_init__(self):
        if not self.interval[0] < self.interval[1]:
            raise ValueError("interval must satisfy a_min < a_max")


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(fun, lo, hi, xtol):
    c, d = hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > xtol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fun(d)
    return 0.5 * (lo + hi)


def fit_offset(data, theory, interval, bracket=(0.0, 100e-9), reference=None, xtol=1e-11,
               scan_points=21):
    """Absolute-separation offset minimising the RMS force residual.

    Points enter the fit when ``z + reference`` lies inside ``interval``;
    ``reference`` defaults to the bracket midpoint, which keeps the point set
    (and so the objective) fixed while the offset is varied.
    """
    a_min, a_max = interval
    lo, hi = bracket
    if not (a_min < a_max and lo < hi):
        raise ValueError("interval and bracket must be increasing pairs")
    ref = 0.5 * (lo + hi) if reference is None else reference
    mask = (data.z + ref >= a_min) & (data.z + ref <= a_max)
    z, f = data.z[mask], data.f[mask]
    if len(z) < 5:
        raise FitError(f"only {len(z)} data points in [{a_min:.4g}, {a_max:.4g}] m; need 5")

    def rms(a0):
        return math.sqrt(np.mean((f - _theory_values(theory, z + a0)) ** 2))

    scan = np.linspace(lo, hi, scan_points)
    values = np.array([rms(x) for x in scan])
    i = int(np.argmin(values))
    if i == 0 or i == scan_points - 1:
        raise BracketError("RMS objective is monotone on the bracket "
                           f"[{lo:.4g}, {hi:.4g}] m; widen the bracket")
    # scan[i-1], scan[i], scan[i+1] is a valid three-point bracket
    a0 = _golden_section(rms, scan[i - 1], scan[i + 1], xtol)
    return FitResult(float(a0), rms(a0), (float(a_min), float(a_max)), int(len(z)))


class Sensitivity(NamedTuple):
    results: list
    spread: float


def interval_sensitivity(data, theory, intervals, **fit_kw):
    """Fit the offset separately in each interval; spread = max(a0) - min(a0)."""
    if not intervals:
        raise ValueError("need at least one interval")
    results = [fit_offset(data, theory, iv, **fit_kw) for iv in intervals]
    a0 = [r.a0 for r in results]
    return Sensitivity(results, float(max(a0) - min(a0)))


# -- superconducting sweep -------------------------------------------------------

class SweepPoint(NamedTuple):
    t: float
    delta_p: float
    pressure: float


def _sweep_point(job):
    a, t, model, normal, q = job
    reference = pressure_plate_plate(a, t, normal, normal, q)
    if t >= model.t_c:
        # the superconducting description joins the normal one at t_c
        return SweepPoint(t, 0.0, reference)
    dp = pressure_difference(a, t, model, model, normal, normal, q, scale=reference)
    return SweepPoint(t, dp, reference)


def sc_delta_sweep(a, model, t_grid, normal_model=None, q=None, workers=1):
    """``dP(t) = P_sc(a, t) - P_normal(a, t)`` with the normal model continued below t_c.

    ``normal_model`` defaults to the Drude normal state of ``model``.  The
    Matsubara spectrum at kelvin temperatures is dense, so the default term
    budget is raised to two million.
    """
    if not isinstance(model, Superconductor):
        raise TypeError("sc_delta_sweep needs a Superconductor model")
    if not a > 0:
        raise ValueError("separation must be positive")
    normal = normal_model or model.normal_state
    if not isinstance(normal, (Drude, Plasma)):
        raise TypeError("normal_model must be Drude or Plasma")
    t_grid = [float(t) for t in t_grid]
    if any(not 0.05 * model.t_c < t <= model.t_c for t in t_grid):
        raise ValueError("temperatures must lie in (0.05 t_c, t_c]")
    q = q or QuadratureConfig(max_matsubara_terms=2_000_000)
    jobs = [(a, t, model, normal, q) for t in t_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs))
    return [_sweep_point(job) for job in jobs]


__all__ = [
    "BracketError", "CurveTheory", "FitError", "FitResult", "ForceCurve", "MeasuredSeries",
    "Sensitivity", "SweepPoint", "config_hash", "describe_model", "fit_offset",
    "format_float", "generate_curve", "interval_sensitivity", "point_function", "sc_delta_sweep",
    "synth_data",
]
