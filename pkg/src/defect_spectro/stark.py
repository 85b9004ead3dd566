"""Stark-shift fits of zero-phonon-line energies and the effective internal field.

The shift model has no constant term:

    zpl(E) - zpl(0) = -(dmu / eps_s) E - (dalpha / (2 eps_s^2)) E^2

with E in V/Angstrom, dmu in e*Angstrom and dalpha in Angstrom^2 e/V.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularDesign, ValidationError
from .units import CONSTANTS, volts_per_angstrom_to_GV_per_cm

__all__ = ["StarkSeries", "StarkFit", "fit_stark", "parameter_covariance", "effective_field", "stark_shift"]


@dataclass(frozen=True)
class StarkSeries:
    label: str
    zpl0: float
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(e), float(z)) for e, z in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 3:
            raise ValidationError(
                f"Stark series {self.label!r}: need at least 3 field points, got {len(pts)}"
            )
        fields = [e for e, _ in pts]
        if len(set(fields)) != len(fields):
            raise ValidationError(f"Stark series {self.label!r}: applied field values must be distinct")
        if not np.all(np.isfinite(np.asarray(pts))) or not np.isfinite(self.zpl0):
            raise ValidationError(f"Stark series {self.label!r}: non-finite value")

    @property
    def fields(self) -> np.ndarray:
        return np.array([e for e, _ in self.points])

    @property
    def shifts(self) -> np.ndarray:
        return np.array([z for _, z in self.points]) - self.zpl0


@dataclass(frozen=True)
class StarkFit:
    """Fitted differential dipole (e*Angstrom) and polarizability (Angstrom^2 e/V)."""

    delta_mu: float
    delta_alpha: float
    residual_rms: float
    covariance: np.ndarray
    epsilon_s: float


def stark_shift(field, delta_mu: float, delta_alpha: float, epsilon_s: float):
    """Model ZPL shift in eV for applied field(s) in V/Angstrom."""
    field = np.asarray(field, dtype=float)
    return -delta_mu * field / epsilon_s - delta_alpha * field**2 / (2.0 * epsilon_s**2)


def fit_stark(series: StarkSeries, epsilon_s: float) -> StarkFit:
    """Least-squares fit of the two-parameter Stark model to a series.

    The covariance is the inverse normal matrix times the residual variance
    estimated with n - 2 degrees of freedom, so it vanishes for noise-free
    data.
    """
    if epsilon_s < 1:
        raise ValueError(f"static dielectric constant must be >= 1, got {epsilon_s}")
    e = series.fields
    y = series.shifts
    design = np.column_stack([-e / epsilon_s, -(e**2) / (2.0 * epsilon_s**2)])

    # Column scaling keeps the rank test meaningful for tiny fields.
    scale = np.linalg.norm(design, axis=0)
    if np.any(scale == 0):
        raise SingularDesign(f"Stark series {series.label!r}: degenerate field values")
    scaled = design / scale
    sv = np.linalg.svd(scaled, compute_uv=False)
    if sv[-1] <= sv[0] * 1e-12:
        raise SingularDesign(f"Stark series {series.label!r}: design matrix is rank deficient")

    coef, *_ = np.linalg.lstsq(scaled, y, rcond=None)
    coef = coef / scale
    resid = y - design @ coef
    rms = float(np.sqrt(np.mean(resid**2)))

    dof = len(e) - 2
    sigma2 = float(resid @ resid) / dof if dof > 0 else 0.0
    inv_normal = np.linalg.inv(design.T @ design)
    cov = sigma2 * inv_normal
    cov = 0.5 * (cov + cov.T)
    return StarkFit(float(coef[0]), float(coef[1]), rms, cov, float(epsilon_s))


def parameter_covariance(series: StarkSeries, epsilon_s: float, sigma: float) -> np.ndarray:
    """Covariance of the fitted parameters for known i.i.d. shift noise ``sigma`` (eV)."""
    e = series.fields
    design = np.column_stack([-e / epsilon_s, -(e**2) / (2.0 * epsilon_s**2)])
    return sigma**2 * np.linalg.inv(design.T @ design)


def effective_field(delta_mu: float, z_scale: float = 1.0, shielding: float = 1.0) -> float:
    """Effective internal field in GV/cm from a dipole of ``delta_mu`` e*Angstrom
    spread over a length scale ``z_scale`` (Angstrom), divided by ``shielding``."""
    if z_scale <= 0:
        raise ValueError(f"z_scale must be positive, got {z_scale}")
    if shielding < 1:
        raise ValueError(f"shielding must be >= 1, got {shielding}")
    field_v_per_A = CONSTANTS.coulomb_constant_eV_angstrom * delta_mu / z_scale**3
    return volts_per_angstrom_to_GV_per_cm(field_v_per_A) / shielding
