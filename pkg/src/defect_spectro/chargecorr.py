"""Ewald-summed point-charge energies and the leading finite-size correction
for charged cubic supercells.

Energies from :func:`ewald_energy` are in units of e^2/(4 pi eps0) per
Angstrom; multiply by the Coulomb constant for eV. A non-neutral cell gets a
uniform compensating background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc

from .errors import ConvergenceFailure
from .units import CONSTANTS

__all__ = [
    "EwaldConfig",
    "ewald_energy",
    "madelung_constant_cubic",
    "madelung_correction",
    "rocksalt_madelung_constant",
    "SC_MADELUNG_REFERENCE",
]

# Simple-cubic lattice of point charges in a neutralizing background.
SC_MADELUNG_REFERENCE = 2.8372974794806

_MAX_GROWTH_STEPS = 12


@dataclass(frozen=True)
class EwaldConfig:
    """Numerical controls: splitting parameter (1/A), cutoffs (A, 1/A)."""

    splitting_parameter: float
    real_space_cutoff: float
    reciprocal_cutoff: float
    target_rel_tolerance: float = 1e-8

    def __post_init__(self):
        for name in ("splitting_parameter", "real_space_cutoff", "reciprocal_cutoff", "target_rel_tolerance"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"EwaldConfig.{name} must be positive, got {value}")

    @classmethod
    def from_tolerance(cls, splitting: float, tol: float = 1e-8, margin: float = 1.0) -> "EwaldConfig":
        """Cutoffs where both the erfc tail and the Gaussian k-space tail drop below ``tol``."""
        x = math.sqrt(-math.log(tol)) * margin + 0.5
        return cls(splitting, x / splitting, 2.0 * splitting * x, tol)

    @classmethod
    def for_cell(cls, L: float, tol: float = 1e-8, splitting: float | None = None) -> "EwaldConfig":
        """Default config for a cubic cell of edge ``L``, grown until it passes
        the halved-splitting self-check."""
        alpha = math.sqrt(math.pi) / L if splitting is None else splitting
        margin = 1.0
        for _ in range(_MAX_GROWTH_STEPS):
            cfg = cls.from_tolerance(alpha, tol, margin)
            if _self_check(cfg, L, margin) is None:
                return cfg
            margin *= 1.25
        raise ConvergenceFailure(f"Ewald self-check failed for L={L} after {_MAX_GROWTH_STEPS} cutoff increases")


def _self_check(cfg: EwaldConfig, L: float, margin: float = 1.0) -> float | None:
    """Relative change of the unit-charge energy when the splitting is halved,
    or None if it is below the target tolerance."""
    pos = np.zeros((1, 3))
    q = np.ones(1)
    e1 = _ewald(pos, q, L, cfg)
    half = EwaldConfig.from_tolerance(cfg.splitting_parameter / 2, cfg.target_rel_tolerance, margin)
    e2 = _ewald(pos, q, L, half)
    rel = abs(e1 - e2) / abs(e1)
    return None if rel < cfg.target_rel_tolerance else rel


def _ewald(frac: np.ndarray, q: np.ndarray, L: float, cfg: EwaldConfig) -> float:
    alpha = cfg.splitting_parameter
    volume = L**3
    cart = frac * L

    # real space: all image vectors within the cutoff, pairs i,j in fixed order
    nmax = int(math.ceil(cfg.real_space_cutoff / L)) + 1
    rng = np.arange(-nmax, nmax + 1)
    images = np.stack(np.meshgrid(rng, rng, rng, indexing="ij"), axis=-1).reshape(-1, 3) * L
    diff = cart[:, None, :] - cart[None, :, :]
    real = 0.0
    for i in range(len(q)):
        for j in range(len(q)):
            r = np.linalg.norm(diff[i, j] + images, axis=1)
            mask = (r <= cfg.real_space_cutoff) & (r > 1e-12 * L)
            real += q[i] * q[j] * np.sum(erfc(alpha * r[mask]) / r[mask])
    real *= 0.5

    # reciprocal space
    kfac = 2.0 * math.pi / L
    mmax = int(math.ceil(cfg.reciprocal_cutoff / kfac))
    rng = np.arange(-mmax, mmax + 1)
    m = np.stack(np.meshgrid(rng, rng, rng, indexing="ij"), axis=-1).reshape(-1, 3)
    m = m[np.any(m != 0, axis=1)]
    k = m * kfac
    k2 = np.sum(k**2, axis=1)
    keep = k2 <= cfg.reciprocal_cutoff**2
    k, k2 = k[keep], k2[keep]
    phase = k @ cart.T
    s_re = np.cos(phase) @ q
    s_im = np.sin(phase) @ q
    recip = (2.0 * math.pi / volume) * np.sum(np.exp(-k2 / (4 * alpha**2)) / k2 * (s_re**2 + s_im**2))

    self_term = -alpha / math.sqrt(math.pi) * np.sum(q**2)
    net = np.sum(q)
    background = -math.pi * net**2 / (2.0 * volume * alpha**2)
    return float(real + recip + self_term + background)


def ewald_energy(frac_positions, charges, L: float, config: EwaldConfig | None = None) -> float:
    """Electrostatic energy per cubic cell of edge ``L`` (A) in e^2/(4 pi eps0 A)."""
    if L <= 0:
        raise ValueError(f"cell length must be positive, got {L}")
    frac = np.atleast_2d(np.asarray(frac_positions, dtype=float))
    q = np.asarray(charges, dtype=float).ravel()
    if frac.shape != (len(q), 3):
        raise ValueError("need one fractional position (3 components) per charge")
    if config is None:
        config = EwaldConfig.for_cell(L)
    return _ewald(frac, q, L, config)


@lru_cache(maxsize=256)
def _madelung_cached(L: float, config: EwaldConfig | None) -> float:
    if config is None:
        config = EwaldConfig.for_cell(L)
    else:
        rel = _self_check(config, L)
        if rel is not None:
            raise ConvergenceFailure(
                f"Ewald self-check failed: halving the splitting parameter changed the energy by {rel:.3e} (relative)"
            )
    energy = _ewald(np.zeros((1, 3)), np.ones(1), L, config)
    return 2.0 * L * energy


def madelung_constant_cubic(L: float, config: EwaldConfig | None = None) -> float:
    """Signed Madelung constant of a unit point charge on a simple-cubic lattice
    of spacing ``L`` in a neutralizing background, defined by E = nu / (2 L).

    The value is about -2.83730 and does not depend on ``L``.
    """
    if not (L > 0):
        raise ValueError(f"cell length must be positive, got {L}")
    return _madelung_cached(float(L), config)


def madelung_correction(q: int, L: float, epsilon_s: float, config: EwaldConfig | None = None) -> float:
    """Leading point-charge correction q^2 |nu| e^2/(4 pi eps0) / (2 eps_s L) in eV."""
    if epsilon_s < 1:
        raise ValueError(f"dielectric constant must be >= 1, got {epsilon_s}")
    if q == 0:
        return 0.0
    nu = madelung_constant_cubic(L, config)
    return q * q * abs(nu) * CONSTANTS.coulomb_constant_eV_angstrom / (2.0 * epsilon_s * L)


_ROCKSALT_CATIONS = [(0, 0, 0), (0, 0.5, 0.5), (0.5, 0, 0.5), (0.5, 0.5, 0)]
_ROCKSALT_ANIONS = [(0.5, 0.5, 0.5), (0.5, 0, 0), (0, 0.5, 0), (0, 0, 0.5)]


def rocksalt_madelung_constant(a: float = 1.0, config: EwaldConfig | None = None) -> float:
    """Madelung constant of the rock-salt structure referred to the
    nearest-neighbour distance a/2 (about 1.747565)."""
    frac = np.array(_ROCKSALT_CATIONS + _ROCKSALT_ANIONS, dtype=float)
    q = np.array([1.0] * 4 + [-1.0] * 4)
    energy = ewald_energy(frac, q, a, config)
    # four ion pairs per conventional cell: E = -4 M / (a / 2)
    return -energy * a / 8.0
