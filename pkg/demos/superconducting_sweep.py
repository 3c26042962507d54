"""Pressure change of aluminium plates on entering the superconducting state.

dP(T) = P_sc - P_normal at 100 nm, for the Mattis-Bardeen description and
for the plasma sub-model.  The dense Matsubara spectrum at 1 K makes this
the slowest demo (about half a minute per model).
"""
from casimirkit import ALUMINIUM, Plasma, Superconductor, sc_delta_sweep

a, tc = 100e-9, ALUMINIUM.t_c
fractions = [1.0, 0.9, 0.7, 0.5, 0.3, 0.2]
plasma_sc = Superconductor(ALUMINIUM.omega_p, ALUMINIUM.gamma, tc, "plasma")

runs = {
    "Mattis-Bardeen": sc_delta_sweep(a, ALUMINIUM, [f * tc for f in fractions], workers=2),
    "plasma": sc_delta_sweep(a, plasma_sc, [f * tc for f in fractions],
                             Plasma(ALUMINIUM.omega_p), workers=2),
}
for name, points in runs.items():
    print(name)
    for f, p in zip(fractions, points):
        print(f"  T = {f:.1f} T_c   dP = {p.delta_p: .4e} Pa   dP/|P| = "
              f"{p.delta_p / abs(p.pressure): .3e}")
