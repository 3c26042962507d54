"""Physical constants (CODATA via scipy) and unit helpers."""
from scipy import constants as _sc

HBAR = _sc.hbar
C = _sc.c
K_B = _sc.k
E_CHARGE = _sc.e

#: angular frequency (rad/s) corresponding to a photon energy of 1 eV
EV_TO_RAD_S = E_CHARGE / HBAR


def ev_to_rad_s(energy_ev):
    return energy_ev * EV_TO_RAD_S


def rad_s_to_ev(omega):
    return omega / EV_TO_RAD_S
