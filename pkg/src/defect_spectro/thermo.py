"""Defect formation energies, cohesive energies, charge transition levels and
the stable-charge map over the band gap.

All energies in eV. Fermi levels are measured from the valence band maximum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .chargecorr import madelung_correction
from .dataset import ChemicalPotentialTable, Dataset, DefectEntry, HostMaterial
from .errors import EmptyInput, EqualCharges, FermiOutOfGap, UnknownSpecies

__all__ = [
    "FormationLine",
    "ChargeTransitionLevel",
    "StabilityInterval",
    "StabilityMap",
    "correction_energy",
    "formation_energy",
    "formation_line",
    "formation_lines",
    "cohesive_energy",
    "charge_transition_level",
    "transition_levels",
    "stability_map",
    "DEGENERACY_TOL",
]

DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class FormationLine:
    """E_f(E_F) = intercept + slope * E_F, with slope equal to the charge."""

    label: str
    charge: int
    intercept: float

    @property
    def slope(self) -> int:
        return self.charge

    def __call__(self, fermi):
        return self.intercept + self.charge * np.asarray(fermi, dtype=float)


@dataclass(frozen=True)
class ChargeTransitionLevel:
    q1: int
    q2: int
    level: float
    label: str = ""

    def __post_init__(self):
        if self.q1 == self.q2:
            raise EqualCharges(f"transition level needs two different charges, got q={self.q1} twice")
        if not np.isfinite(self.level):
            raise ValueError("transition level must be finite")


@dataclass(frozen=True)
class StabilityInterval:
    start: float
    end: float
    charge: int
    label: str


@dataclass(frozen=True)
class StabilityMap:
    intervals: tuple[StabilityInterval, ...]
    gap: float

    @property
    def breakpoints(self) -> list[float]:
        return [iv.end for iv in self.intervals[:-1]]

    @property
    def charges(self) -> list[int]:
        return [iv.charge for iv in self.intervals]

    def stable_charge(self, fermi: float) -> int:
        for iv in self.intervals:
            if fermi < iv.end:
                return iv.charge
        return self.intervals[-1].charge

    def transition_levels(self) -> list[ChargeTransitionLevel]:
        return [
            ChargeTransitionLevel(a.charge, b.charge, a.end, a.label)
            for a, b in zip(self.intervals, self.intervals[1:])
        ]


def correction_energy(entry: DefectEntry, host: HostMaterial) -> float:
    """E_corr: the user-supplied override if present, else the point-charge
    term plus the potential-alignment offset."""
    if entry.correction_override is not None:
        return entry.correction_override
    return madelung_correction(entry.charge, host.cubic_cell_length, host.dielectric_constant) + entry.alignment_offset


def _species_sum(entry: DefectEntry, mu: ChemicalPotentialTable) -> float:
    total = 0.0
    for d in entry.species_deltas:
        if d.species not in mu.mu:
            raise UnknownSpecies(f"no chemical potential for species {d.species!r} (defect {entry.label})")
        total += d.count * mu.mu[d.species]
    return total


def formation_energy(entry: DefectEntry, host: HostMaterial, mu: ChemicalPotentialTable, fermi: float) -> float:
    if fermi < 0 or fermi > host.band_gap:
        warnings.warn(
            f"Fermi level {fermi} eV lies outside the gap [0, {host.band_gap}] eV", FermiOutOfGap, stacklevel=2
        )
    return (
        entry.total_energy
        - host.bulk_total_energy
        - _species_sum(entry, mu)
        + entry.charge * (host.vbm + fermi)
        + correction_energy(entry, host)
    )


def formation_line(entry: DefectEntry, host: HostMaterial, mu: ChemicalPotentialTable) -> FormationLine:
    intercept = (
        entry.total_energy
        - host.bulk_total_energy
        - _species_sum(entry, mu)
        + entry.charge * host.vbm
        + correction_energy(entry, host)
    )
    return FormationLine(entry.label, entry.charge, intercept)


def formation_lines(ds: Dataset, label: str | None = None) -> list[FormationLine]:
    """Formation lines for every entry (or one defect), sorted by label then charge."""
    entries = sorted(ds.defects, key=lambda e: (e.label, e.charge))
    if label is not None:
        entries = [e for e in entries if e.label == label]
    return [formation_line(e, ds.host, ds.chemical_potentials) for e in entries]


def cohesive_energy(total_energy: float, composition: Iterable[tuple[str, int]], mu_table: ChemicalPotentialTable) -> float:
    """Cohesive energy per atom, positive for a bound system."""
    composition = list(composition)
    n = 0
    atoms = 0.0
    for species, count in composition:
        if count < 1:
            raise ValueError(f"composition counts must be positive, got {count} for {species!r}")
        if species not in mu_table.atom_energy:
            raise UnknownSpecies(f"no isolated-atom energy for species {species!r}")
        atoms += count * mu_table.atom_energy[species]
        n += count
    if n == 0:
        raise ValueError("composition is empty")
    return (atoms - total_energy) / n


def charge_transition_level(
    e1: tuple[int, float, float], e2: tuple[int, float, float], vbm: float = 0.0, label: str = ""
) -> ChargeTransitionLevel:
    """Level at which charges q1 and q2 have equal formation energy.

    ``e1`` and ``e2`` are ``(q, total_energy, correction)``. The level is
    returned relative to ``vbm``.
    """
    q1, etot1, corr1 = e1
    q2, etot2, corr2 = e2
    if q1 == q2:
        raise EqualCharges(f"transition level needs two different charges, got q={q1} twice")
    level = (etot1 + corr1 - etot2 - corr2) / (q2 - q1) - vbm
    return ChargeTransitionLevel(q1, q2, level, label)


def transition_levels(ds: Dataset, label: str) -> list[ChargeTransitionLevel]:
    """Levels between the charge states that are stable somewhere in the gap,
    computed from total energies rather than from line crossings."""
    entries = {e.charge: e for e in ds.entries_for(label)}
    smap = stability_map(formation_lines(ds, label), ds.host.band_gap)
    out = []
    for a, b in zip(smap.intervals, smap.intervals[1:]):
        ea, eb = entries[a.charge], entries[b.charge]
        out.append(
            charge_transition_level(
                (ea.charge, ea.total_energy, correction_energy(ea, ds.host)),
                (eb.charge, eb.total_energy, correction_energy(eb, ds.host)),
                vbm=ds.host.vbm,
                label=label,
            )
        )
    return out


def _merge_degenerate(lines: Sequence[FormationLine]) -> list[FormationLine]:
    ordered = sorted(lines, key=lambda ln: (ln.charge, ln.intercept, ln.label))
    merged: list[FormationLine] = []
    for ln in ordered:
        if merged and merged[-1].charge == ln.charge and abs(merged[-1].intercept - ln.intercept) <= DEGENERACY_TOL:
            if ln.label < merged[-1].label:
                merged[-1] = FormationLine(ln.label, ln.charge, merged[-1].intercept)
            continue
        merged.append(ln)
    return merged


def stability_map(lines: Sequence[FormationLine], gap: float) -> StabilityMap:
    """Lower envelope of formation lines over [0, gap].

    Breakpoints are exact line crossings, so they coincide with transition
    levels of adjacent stable charges.
    """
    if not lines:
        raise EmptyInput("stability map needs at least one formation line")
    if gap <= 0:
        raise ValueError(f"band gap must be positive, got {gap}")
    lines = _merge_degenerate(lines)

    # lowest at E_F = 0; ties resolved toward the smaller slope (wins for E_F > 0)
    current = min(lines, key=lambda ln: (ln.intercept, ln.charge, ln.label))
    x = 0.0
    intervals = []
    while True:
        best = None
        for ln in lines:
            if ln.charge >= current.charge:
                continue
            cross = (ln.intercept - current.intercept) / (current.charge - ln.charge)
            if cross < x - 1e-12:
                continue
            key = (cross, ln.charge, ln.label)
            if best is None or key < best[0]:
                best = (key, ln)
        if best is None or best[0][0] >= gap:
            intervals.append(StabilityInterval(x, gap, current.charge, current.label))
            break
        cross = max(best[0][0], x)
        if cross > x:
            intervals.append(StabilityInterval(x, cross, current.charge, current.label))
        x = cross
        current = best[1]
    return StabilityMap(tuple(intervals), gap)
