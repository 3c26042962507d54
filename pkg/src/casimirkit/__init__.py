"""Casimir forces between real metals from finite-temperature Lifshitz theory."""
from .analytic import (RoughnessSpec, ideal_metal_force_sphere_t0, ideal_metal_pressure_t0,
                       load_coefficients, perturbative_force_sphere, roughness_correct)
from .dielectric import (ALUMINIUM, GOLD, SILVER, Drude, DrudeLike, Finite, IdealMetal, Plasma,
                         PlasmaLike, Superconductor, Tabulated, Vacuum, eps_imag_axis,
                         parse_model, zero_freq_class)
from .lifshitz import (PlatePlate, QuadratureConfig, SpherePlate, energy_zero_temperature,
                       force_sphere_plate, free_energy_per_area, matsubara_frequency,
                       pressure_difference, pressure_plate_plate, reflection_coeffs)
from .metrology import (CurveTheory, FitResult, ForceCurve, MeasuredSeries, fit_offset,
                        generate_curve, interval_sensitivity, sc_delta_sweep, synth_data)
from .optics import (DrudeTail, ExtrapolationPolicy, InversePowerTail, OpticalTable, PlasmaTail,
                     im_eps, kk_to_imag_axis, load_table, synthetic_drude_table)
from .superconductor import (SuperconductorParams, bcs_gap, eps_sc_imag_axis, mb_sigma,
                             superfluid_weight)

__version__ = "0.1.0"
