"""Physical constants and the handful of unit conversions the toolkit needs.

Canonical internal units: eV, Angstrom, Tesla, MHz for spin matrices,
GHz for zero-field splitting input and V/Angstrom^2 for field gradients.
Constants are CODATA 2018.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "e_angstrom_to_debye",
    "debye_to_e_angstrom",
    "polarizability_to_bohr_cubed",
    "bohr_cubed_to_polarizability",
    "volts_per_angstrom_to_GV_per_cm",
    "ev_to_nm",
    "nm_to_ev",
    "mhz_to_ev",
    "ev_to_mhz",
]


@dataclass(frozen=True)
class PhysicalConstants:
    bohr_magneton_ueV_per_T: float = 57.88381806
    bohr_magneton_MHz_per_T: float = 13996.24494
    nuclear_magneton_neV_per_T: float = 31.52451258
    nuclear_magneton_MHz_per_T: float = 7.622593229
    # e^2 / (4 pi eps0) in eV*Angstrom; numerically equal to e/(4 pi eps0) in V*Angstrom
    coulomb_constant_eV_angstrom: float = 14.39964548
    debye_per_e_angstrom: float = 4.803204713
    bohr_radius_angstrom: float = 0.5291772109
    vacuum_permittivity_F_per_m: float = 8.854187813e-12
    hc_eV_nm: float = 1239.841984
    MHz_per_eV: float = 241798924.2
    # e * barn * V/Angstrom^2 = 1e-8 eV
    ev_per_e_barn_V_per_A2: float = 1e-8


CONSTANTS = PhysicalConstants()


def e_angstrom_to_debye(mu: float) -> float:
    """Dipole moment in e*Angstrom to Debye."""
    return mu * CONSTANTS.debye_per_e_angstrom


def debye_to_e_angstrom(mu: float) -> float:
    return mu / CONSTANTS.debye_per_e_angstrom


def polarizability_to_bohr_cubed(alpha: float) -> float:
    """Polarizability in Angstrom^2 e/V to atomic units of volume (a0^3).

    The Gaussian-units volume is alpha / (4 pi eps0), i.e. alpha times the
    Coulomb constant in V*Angstrom, giving Angstrom^3.
    """
    return alpha * CONSTANTS.coulomb_constant_eV_angstrom / CONSTANTS.bohr_radius_angstrom**3


def bohr_cubed_to_polarizability(alpha_au: float) -> float:
    return alpha_au * CONSTANTS.bohr_radius_angstrom**3 / CONSTANTS.coulomb_constant_eV_angstrom


def volts_per_angstrom_to_GV_per_cm(field: float) -> float:
    # 1 V/A = 1e8 V/cm = 0.1 GV/cm
    return field * 0.1


def ev_to_nm(energy: float) -> float:
    if energy <= 0 or not math.isfinite(energy):
        raise ValueError(f"photon energy must be positive and finite, got {energy}")
    return CONSTANTS.hc_eV_nm / energy


def nm_to_ev(wavelength: float) -> float:
    if wavelength <= 0 or not math.isfinite(wavelength):
        raise ValueError(f"wavelength must be positive and finite, got {wavelength}")
    return CONSTANTS.hc_eV_nm / wavelength


def mhz_to_ev(freq: float) -> float:
    return freq / CONSTANTS.MHz_per_eV


def ev_to_mhz(energy: float) -> float:
    return energy * CONSTANTS.MHz_per_eV
