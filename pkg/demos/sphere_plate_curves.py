"""Ag sphere over an Au plate at room temperature: three theories side by side.

Prints the rough-surface force from the full Lifshitz sum, from the
small-parameter expansion and from the ideal-metal closed form, then finds
where the ideal-metal force reaches 635.5 pN.
"""
import warnings

import numpy as np
from scipy.optimize import brentq

from casimirkit import (GOLD, SILVER, RoughnessSpec, force_sphere_plate,
                        ideal_metal_force_sphere_t0, perturbative_force_sphere,
                        roughness_correct)

R = 55e-6
rough = RoughnessSpec(rms_sphere=8e-9, rms_plate=2e-9)


def ideal(a):
    return roughness_correct(lambda x: ideal_metal_force_sphere_t0(x, R), a, rough)


def lifshitz(a):
    return roughness_correct(lambda x: force_sphere_plate(x, 300.0, R, SILVER, GOLD), a, rough)


def expansion(a):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # below ~73 nm the series is outside its domain
        return roughness_correct(
            lambda x: perturbative_force_sphere(x, 300.0, R, GOLD.omega_p).value, a, rough)


print(f"{'a [nm]':>8} {'ideal [pN]':>12} {'expansion':>12} {'Lifshitz':>12}")
for a in np.geomspace(50e-9, 1e-6, 12):
    print(f"{a * 1e9:8.1f} {ideal(a) * 1e12:12.2f} {expansion(a) * 1e12:12.2f} "
          f"{lifshitz(a) * 1e12:12.2f}")

a_star = brentq(lambda a: abs(ideal(a)) - 635.5e-12, 45e-9, 100e-9)
print(f"\nideal metal gives 635.5 pN at a = {a_star * 1e9:.2f} nm")
print(f"Lifshitz force at 50 nm: {abs(lifshitz(50e-9)) * 1e12:.1f} pN, "
      "so the real metals need a smaller gap")
