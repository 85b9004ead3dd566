"""Data model and JSON ingestion for first-principles inputs.

Every domain object validates itself on construction, so a ``Dataset``
obtained from :func:`load_dataset` (or built by hand) satisfies all
invariants. Loader errors carry either a line/column (syntax) or a JSON path
(schema), e.g. ``defects[3].charge``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ParseError, SchemaError, ValidationError
from .stark import StarkSeries
from .symmetry import Irrep, Orbital, OrbitalConfiguration, parse_state_label

__all__ = [
    "SpeciesDelta",
    "ChemicalPotentialTable",
    "HostMaterial",
    "DefectEntry",
    "SpinSystemParams",
    "StateConfig",
    "OrbitalConfigSet",
    "OpticalTransition",
    "Dataset",
    "DatasetDigest",
    "load_dataset",
    "parse_dataset",
    "dataset_to_dict",
    "save_dataset",
    "dataset_digest",
    "principal_values_efg",
    "principal_values_zfs",
    "principal_values_hyperfine",
]

DEFAULT_G_E = 2.0023


def _finite(value: float, what: str) -> None:
    if not math.isfinite(value):
        raise ValidationError(f"{what} must be finite, got {value}")


@dataclass(frozen=True)
class SpeciesDelta:
    species: str
    count: int

    def __post_init__(self):
        if not self.species:
            raise ValidationError("species symbol must be non-empty")
        if self.count == 0:
            raise ValidationError(f"species delta for {self.species!r} has zero count")


@dataclass(frozen=True)
class ChemicalPotentialTable:
    """Chemical potentials ``mu`` and isolated-atom energies, both eV/atom."""

    mu: Mapping[str, float]
    atom_energy: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "mu", dict(self.mu))
        object.__setattr__(self, "atom_energy", dict(self.atom_energy))
        for table, what in ((self.mu, "chemical potential"), (self.atom_energy, "atom energy")):
            for sp, val in table.items():
                _finite(val, f"{what} of {sp}")

    @property
    def species(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.mu) | set(self.atom_energy)))


@dataclass(frozen=True)
class HostMaterial:
    bulk_total_energy: float
    n_bulk_atoms: int
    vbm: float
    band_gap: float
    dielectric_constant: float
    cubic_cell_length: float

    def __post_init__(self):
        for name in ("bulk_total_energy", "vbm", "band_gap", "dielectric_constant", "cubic_cell_length"):
            _finite(getattr(self, name), f"host {name}")
        if self.band_gap <= 0:
            raise ValidationError(f"host band_gap must be > 0, got {self.band_gap}")
        if self.dielectric_constant < 1:
            raise ValidationError(f"host dielectric_constant must be >= 1, got {self.dielectric_constant}")
        if self.cubic_cell_length <= 0:
            raise ValidationError(f"host cubic_cell_length must be > 0, got {self.cubic_cell_length}")
        if self.n_bulk_atoms <= 0:
            raise ValidationError(f"host n_bulk_atoms must be > 0, got {self.n_bulk_atoms}")


@dataclass(frozen=True)
class DefectEntry:
    label: str
    charge: int
    total_energy: float
    species_deltas: tuple[SpeciesDelta, ...] = ()
    correction_override: float | None = None
    alignment_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "species_deltas", tuple(self.species_deltas))
        if not self.label:
            raise ValidationError("defect label must be non-empty")
        _finite(self.total_energy, f"total energy of {self.label} q={self.charge}")
        _finite(self.alignment_offset, f"alignment offset of {self.label} q={self.charge}")
        if self.correction_override is not None:
            _finite(self.correction_override, f"correction of {self.label} q={self.charge}")
        seen = set()
        for d in self.species_deltas:
            if d.species in seen:
                raise ValidationError(f"defect {self.label} q={self.charge}: species {d.species!r} listed twice")
            seen.add(d.species)


def _check_spin(value: float, what: str) -> float:
    twice = 2 * value
    if twice < 0 or abs(twice - round(twice)) > 1e-12:
        raise ValidationError(f"{what} must be a non-negative half-integer, got {value}")
    return round(twice) / 2


@dataclass(frozen=True)
class SpinSystemParams:
    """Spin-Hamiltonian inputs in principal-axis form.

    Units: hyperfine in MHz, ``dzz`` in GHz (the zz principal value of the
    traceless ZFS tensor, so D = 1.5 * dzz), EFG in V/Angstrom^2,
    quadrupole moment in barn.
    """

    S: float
    I: float
    g_n: float
    A: tuple[float, float, float] = (0.0, 0.0, 0.0)
    g_e: float = DEFAULT_G_E
    dzz: float = 0.0
    zfs_epsilon: float = 0.0
    efg_vzz: float = 0.0
    efg_eta: float = 0.0
    Q_barn: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "S", _check_spin(self.S, "electron spin S"))
        object.__setattr__(self, "I", _check_spin(self.I, "nuclear spin I"))
        object.__setattr__(self, "A", tuple(float(a) for a in self.A))
        if len(self.A) != 3:
            raise ValidationError(f"hyperfine needs 3 principal values, got {len(self.A)}")
        for name in ("g_e", "g_n", "dzz", "zfs_epsilon", "efg_vzz", "efg_eta", "Q_barn"):
            _finite(getattr(self, name), name)
        for i, a in enumerate(self.A):
            _finite(a, f"A[{i}]")
        if abs(self.efg_eta) > 1 + 1e-12:
            raise ValidationError(f"EFG asymmetry |eta| must be <= 1, got {self.efg_eta}")

    @property
    def D(self) -> float:
        """Axial ZFS parameter D = 1.5 * D_zz in GHz."""
        return 1.5 * self.dzz

    @property
    def dimension(self) -> int:
        return int(round((2 * self.S + 1) * (2 * self.I + 1)))

    def d_tensor(self) -> np.ndarray:
        """Diagonal traceless ZFS tensor (GHz) reproducing ``dzz`` and ``zfs_epsilon``."""
        return np.diag(_traceless_principal(self.dzz, self.zfs_epsilon))

    def efg_tensor(self) -> np.ndarray:
        return np.diag(_traceless_principal(self.efg_vzz, self.efg_eta))

    def a_tensor(self) -> np.ndarray:
        return np.diag(self.A)


def _traceless_principal(zz: float, asym: float) -> tuple[float, float, float]:
    # xx + yy = -zz and (xx - yy) / zz = asym
    return (0.5 * zz * (asym - 1.0), -0.5 * zz * (asym + 1.0), zz)


@dataclass(frozen=True)
class StateConfig:
    name: str
    config: OrbitalConfiguration


@dataclass(frozen=True)
class OrbitalConfigSet:
    """Ground state (first) and candidate excited states of one defect charge state."""

    label: str
    charge: int
    states: tuple[StateConfig, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ValidationError(f"orbital configs for {self.label} q={self.charge}: no states")
        names = [s.name for s in self.states]
        if len(set(names)) != len(names):
            raise ValidationError(f"orbital configs for {self.label} q={self.charge}: duplicate state names")


@dataclass(frozen=True)
class OpticalTransition:
    """A reported optical line: term symbols of ground/excited state and ZPL."""

    label: str
    charge: int
    spin_channel: str
    ground: str
    excited: str
    zpl_nm: float
    tdm_debye: float | None = None

    def __post_init__(self):
        if self.spin_channel not in ("up", "down"):
            raise ValidationError(f"optical transition {self.label}: spin_channel must be 'up' or 'down'")
        if not (self.zpl_nm > 0 and math.isfinite(self.zpl_nm)):
            raise ValidationError(f"optical transition {self.label}: zpl_nm must be positive")
        for term in (self.ground, self.excited):
            try:
                parse_state_label(term)
            except ValueError as exc:
                raise ValidationError(f"optical transition {self.label}: {exc}") from None


@dataclass(frozen=True)
class Dataset:
    host: HostMaterial
    chemical_potentials: ChemicalPotentialTable
    defects: tuple[DefectEntry, ...] = ()
    spin_systems: Mapping[str, SpinSystemParams] = field(default_factory=dict)
    stark_series: Mapping[str, StarkSeries] = field(default_factory=dict)
    orbital_configs: tuple[OrbitalConfigSet, ...] = ()
    optical_transitions: tuple[OpticalTransition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "defects", tuple(self.defects))
        object.__setattr__(self, "spin_systems", dict(self.spin_systems))
        object.__setattr__(self, "stark_series", dict(self.stark_series))
        object.__setattr__(self, "orbital_configs", tuple(self.orbital_configs))
        object.__setattr__(self, "optical_transitions", tuple(self.optical_transitions))
        seen = set()
        for entry in self.defects:
            key = (entry.label, entry.charge)
            if key in seen:
                raise ValidationError(f"duplicate defect entry: label {entry.label!r}, charge {entry.charge}")
            seen.add(key)
            for d in entry.species_deltas:
                if d.species not in self.chemical_potentials.mu:
                    raise ValidationError(
                        f"defect {entry.label} q={entry.charge}: species {d.species!r} has no chemical potential"
                    )
                if d.species not in self.chemical_potentials.atom_energy:
                    raise ValidationError(
                        f"defect {entry.label} q={entry.charge}: species {d.species!r} has no isolated-atom energy"
                    )
        for name, series in self.stark_series.items():
            if series.label != name:
                raise ValidationError(f"stark series key {name!r} does not match its label {series.label!r}")
        keys = [(c.label, c.charge) for c in self.orbital_configs]
        if len(set(keys)) != len(keys):
            raise ValidationError("duplicate orbital_configs entry for the same label and charge")

    def entries_for(self, label: str) -> list[DefectEntry]:
        return sorted((e for e in self.defects if e.label == label), key=lambda e: e.charge)

    @property
    def defect_labels(self) -> list[str]:
        return sorted({e.label for e in self.defects})


# ---------------------------------------------------------------- parsing


def _expect_object(value: Any, loc: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(loc, f"expected an object, got {type(value).__name__}")
    return value


def _expect_list(value: Any, loc: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(loc, f"expected an array, got {type(value).__name__}")
    return value


def _keys(obj: dict, loc: str, required: set[str], optional: set[str] = frozenset()) -> None:
    unknown = sorted(set(obj) - required - set(optional))
    if unknown:
        raise SchemaError(loc, f"unknown field(s) {', '.join(map(repr, unknown))}")
    missing = sorted(required - set(obj))
    if missing:
        raise SchemaError(loc, f"missing field(s) {', '.join(map(repr, missing))}")


def _number(value: Any, loc: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(loc, f"expected a number, got {type(value).__name__}")
    return float(value)


def _integer(value: Any, loc: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise SchemaError(loc, f"expected an integer, got {value!r}")
    return value


def _string(value: Any, loc: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(loc, f"expected a string, got {type(value).__name__}")
    return value


def _spin(value: Any, loc: str) -> float:
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise SchemaError(loc, f"cannot read spin {value!r}") from None
    return _number(value, loc)


def _matrix3(value: Any, loc: str) -> np.ndarray:
    rows = _expect_list(value, loc)
    if len(rows) != 3:
        raise SchemaError(loc, "expected a 3x3 matrix")
    out = np.empty((3, 3))
    for i, row in enumerate(rows):
        row = _expect_list(row, f"{loc}[{i}]")
        if len(row) != 3:
            raise SchemaError(f"{loc}[{i}]", "expected 3 entries")
        for j, v in enumerate(row):
            out[i, j] = _number(v, f"{loc}[{i}][{j}]")
    return out


def _check_symmetric(m: np.ndarray, what: str) -> None:
    scale = max(np.abs(m).max(), 1e-300)
    if np.abs(m - m.T).max() > 1e-9 * scale:
        raise ValidationError(f"{what} must be symmetric to 1e-9 relative")


def _ordered_principal(m: np.ndarray) -> tuple[float, float, float]:
    """Eigenvalues of the traceless part ordered |zz| >= |yy| >= |xx|."""
    m = 0.5 * (m + m.T)
    m = m - np.trace(m) / 3.0 * np.eye(3)
    vals = np.linalg.eigvalsh(m)
    xx, yy, zz = sorted(vals, key=abs)
    return float(xx), float(yy), float(zz)


def principal_values_efg(m: np.ndarray) -> tuple[float, float]:
    """(V_zz, eta) of a field-gradient tensor, standard ordering, eta in [0, 1]."""
    xx, yy, zz = _ordered_principal(np.asarray(m, dtype=float))
    eta = 0.0 if zz == 0 else (xx - yy) / zz
    return zz, eta


def principal_values_zfs(m: np.ndarray) -> tuple[float, float]:
    """(D_zz, epsilon) of a ZFS tensor, isotropic part removed."""
    xx, yy, zz = _ordered_principal(np.asarray(m, dtype=float))
    eps = 0.0 if zz == 0 else (xx - yy) / zz
    return zz, eps


def principal_values_hyperfine(m: np.ndarray) -> tuple[float, float, float]:
    """Principal values of a hyperfine tensor assigned to the nearest lab axes."""
    m = np.asarray(m, dtype=float)
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    # rows: lab axis, cols: eigenvector; maximize total squared projection
    rows, cols = linear_sum_assignment(-(vecs**2))
    order = cols[np.argsort(rows)]
    return tuple(float(v) for v in vals[order])


def _parse_host(obj: Any, loc: str) -> HostMaterial:
    obj = _expect_object(obj, loc)
    _keys(
        obj,
        loc,
        {"bulk_total_energy_eV", "n_bulk_atoms", "vbm_eV", "band_gap_eV", "dielectric_constant", "cubic_cell_length_A"},
    )
    return HostMaterial(
        bulk_total_energy=_number(obj["bulk_total_energy_eV"], f"{loc}.bulk_total_energy_eV"),
        n_bulk_atoms=_integer(obj["n_bulk_atoms"], f"{loc}.n_bulk_atoms"),
        vbm=_number(obj["vbm_eV"], f"{loc}.vbm_eV"),
        band_gap=_number(obj["band_gap_eV"], f"{loc}.band_gap_eV"),
        dielectric_constant=_number(obj["dielectric_constant"], f"{loc}.dielectric_constant"),
        cubic_cell_length=_number(obj["cubic_cell_length_A"], f"{loc}.cubic_cell_length_A"),
    )


def _parse_chempots(obj: Any, loc: str) -> ChemicalPotentialTable:
    obj = _expect_object(obj, loc)
    mu, atom = {}, {}
    for sp, rec in obj.items():
        sub = f"{loc}.{sp}"
        rec = _expect_object(rec, sub)
        _keys(rec, sub, {"mu_eV", "atom_energy_eV"})
        mu[sp] = _number(rec["mu_eV"], f"{sub}.mu_eV")
        atom[sp] = _number(rec["atom_energy_eV"], f"{sub}.atom_energy_eV")
    return ChemicalPotentialTable(mu, atom)


def _parse_defect(obj: Any, loc: str) -> DefectEntry:
    obj = _expect_object(obj, loc)
    _keys(obj, loc, {"label", "charge", "total_energy_eV", "species_deltas"}, {"correction_eV", "alignment_eV"})
    deltas = []
    for i, d in enumerate(_expect_list(obj["species_deltas"], f"{loc}.species_deltas")):
        sub = f"{loc}.species_deltas[{i}]"
        d = _expect_object(d, sub)
        _keys(d, sub, {"species", "count"})
        deltas.append(SpeciesDelta(_string(d["species"], f"{sub}.species"), _integer(d["count"], f"{sub}.count")))
    corr = obj.get("correction_eV")
    return DefectEntry(
        label=_string(obj["label"], f"{loc}.label"),
        charge=_integer(obj["charge"], f"{loc}.charge"),
        total_energy=_number(obj["total_energy_eV"], f"{loc}.total_energy_eV"),
        species_deltas=tuple(deltas),
        correction_override=None if corr is None else _number(corr, f"{loc}.correction_eV"),
        alignment_offset=_number(obj.get("alignment_eV", 0.0), f"{loc}.alignment_eV"),
    )


def _parse_spin_system(obj: Any, loc: str) -> SpinSystemParams:
    obj = _expect_object(obj, loc)
    _keys(obj, loc, {"S", "I", "g_n", "A_MHz", "EFG", "Q_barn"}, {"g_e", "D_GHz"})

    a_raw = _expect_list(obj["A_MHz"], f"{loc}.A_MHz")
    if len(a_raw) == 3 and all(isinstance(x, list) for x in a_raw):
        a_mat = _matrix3(a_raw, f"{loc}.A_MHz")
        _check_symmetric(a_mat, f"{loc}.A_MHz")
        A = principal_values_hyperfine(a_mat)
    elif len(a_raw) == 3:
        A = tuple(_number(x, f"{loc}.A_MHz[{i}]") for i, x in enumerate(a_raw))
    else:
        raise SchemaError(f"{loc}.A_MHz", "expected [Axx, Ayy, Azz] or a 3x3 matrix")

    dzz, eps = 0.0, 0.0
    if "D_GHz" in obj:
        d_raw = obj["D_GHz"]
        if isinstance(d_raw, list):
            d_mat = _matrix3(d_raw, f"{loc}.D_GHz")
            _check_symmetric(d_mat, f"{loc}.D_GHz")
            dzz, eps = principal_values_zfs(d_mat)
        else:
            d_raw = _expect_object(d_raw, f"{loc}.D_GHz")
            _keys(d_raw, f"{loc}.D_GHz", {"Dzz", "epsilon"})
            dzz = _number(d_raw["Dzz"], f"{loc}.D_GHz.Dzz")
            eps = _number(d_raw["epsilon"], f"{loc}.D_GHz.epsilon")

    e_raw = obj["EFG"]
    if isinstance(e_raw, list):
        e_mat = _matrix3(e_raw, f"{loc}.EFG")
        _check_symmetric(e_mat, f"{loc}.EFG")
        vzz, eta = principal_values_efg(e_mat)
    else:
        e_raw = _expect_object(e_raw, f"{loc}.EFG")
        _keys(e_raw, f"{loc}.EFG", {"Vzz_V_per_A2", "eta"})
        vzz = _number(e_raw["Vzz_V_per_A2"], f"{loc}.EFG.Vzz_V_per_A2")
        eta = _number(e_raw["eta"], f"{loc}.EFG.eta")

    return SpinSystemParams(
        S=_spin(obj["S"], f"{loc}.S"),
        I=_spin(obj["I"], f"{loc}.I"),
        g_e=_number(obj.get("g_e", DEFAULT_G_E), f"{loc}.g_e"),
        g_n=_number(obj["g_n"], f"{loc}.g_n"),
        A=A,
        dzz=dzz,
        zfs_epsilon=eps,
        efg_vzz=vzz,
        efg_eta=eta,
        Q_barn=_number(obj["Q_barn"], f"{loc}.Q_barn"),
    )


def _parse_stark(label: str, obj: Any, loc: str) -> StarkSeries:
    obj = _expect_object(obj, loc)
    _keys(obj, loc, {"zpl_eV_at_zero_field", "points"})
    pts = []
    for i, p in enumerate(_expect_list(obj["points"], f"{loc}.points")):
        sub = f"{loc}.points[{i}]"
        p = _expect_object(p, sub)
        _keys(p, sub, {"E_V_per_A", "zpl_eV"})
        pts.append((_number(p["E_V_per_A"], f"{sub}.E_V_per_A"), _number(p["zpl_eV"], f"{sub}.zpl_eV")))
    return StarkSeries(label, _number(obj["zpl_eV_at_zero_field"], f"{loc}.zpl_eV_at_zero_field"), tuple(pts))


def _parse_channel(items: Any, loc: str) -> tuple[Orbital, ...]:
    out = []
    for i, o in enumerate(_expect_list(items, loc)):
        sub = f"{loc}[{i}]"
        o = _expect_object(o, sub)
        _keys(o, sub, {"irrep", "occ"})
        try:
            irrep = Irrep.parse(_string(o["irrep"], f"{sub}.irrep"))
        except ValueError as exc:
            raise SchemaError(f"{sub}.irrep", str(exc)) from None
        out.append(Orbital(irrep, _integer(o["occ"], f"{sub}.occ")))
    return tuple(out)


def _parse_orbital_configs(obj: Any, loc: str) -> tuple[OrbitalConfigSet, ...]:
    out = []
    for i, rec in enumerate(_expect_list(obj, loc)):
        sub = f"{loc}[{i}]"
        rec = _expect_object(rec, sub)
        _keys(rec, sub, {"label", "charge", "states"})
        states = []
        for j, st in enumerate(_expect_list(rec["states"], f"{sub}.states")):
            ssub = f"{sub}.states[{j}]"
            st = _expect_object(st, ssub)
            _keys(st, ssub, {"name", "up", "down"})
            cfg = OrbitalConfiguration(_parse_channel(st["up"], f"{ssub}.up"), _parse_channel(st["down"], f"{ssub}.down"))
            states.append(StateConfig(_string(st["name"], f"{ssub}.name"), cfg))
        out.append(
            OrbitalConfigSet(_string(rec["label"], f"{sub}.label"), _integer(rec["charge"], f"{sub}.charge"), tuple(states))
        )
    return tuple(out)


def _parse_optical(obj: Any, loc: str) -> tuple[OpticalTransition, ...]:
    out = []
    for i, rec in enumerate(_expect_list(obj, loc)):
        sub = f"{loc}[{i}]"
        rec = _expect_object(rec, sub)
        _keys(rec, sub, {"label", "charge", "spin_channel", "ground", "excited", "zpl_nm"}, {"tdm_debye"})
        tdm = rec.get("tdm_debye")
        out.append(
            OpticalTransition(
                label=_string(rec["label"], f"{sub}.label"),
                charge=_integer(rec["charge"], f"{sub}.charge"),
                spin_channel=_string(rec["spin_channel"], f"{sub}.spin_channel"),
                ground=_string(rec["ground"], f"{sub}.ground"),
                excited=_string(rec["excited"], f"{sub}.excited"),
                zpl_nm=_number(rec["zpl_nm"], f"{sub}.zpl_nm"),
                tdm_debye=None if tdm is None else _number(tdm, f"{sub}.tdm_debye"),
            )
        )
    return tuple(out)


def parse_dataset(doc: Any) -> Dataset:
    """Build a validated Dataset from an already-decoded JSON document."""
    doc = _expect_object(doc, "$")
    _keys(
        doc,
        "$",
        {"host", "chemical_potentials", "defects"},
        {"spin_systems", "stark_series", "orbital_configs", "optical_transitions"},
    )
    host = _parse_host(doc["host"], "host")
    mu = _parse_chempots(doc["chemical_potentials"], "chemical_potentials")
    defects = tuple(_parse_defect(d, f"defects[{i}]") for i, d in enumerate(_expect_list(doc["defects"], "defects")))
    spins = {
        name: _parse_spin_system(rec, f"spin_systems.{name}")
        for name, rec in _expect_object(doc.get("spin_systems", {}), "spin_systems").items()
    }
    stark = {
        name: _parse_stark(name, rec, f"stark_series.{name}")
        for name, rec in _expect_object(doc.get("stark_series", {}), "stark_series").items()
    }
    configs = _parse_orbital_configs(doc.get("orbital_configs", []), "orbital_configs")
    optical = _parse_optical(doc.get("optical_transitions", []), "optical_transitions")
    return Dataset(host, mu, defects, spins, stark, configs, optical)


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None
    return parse_dataset(doc)


# ---------------------------------------------------------- serialization


def _spin_to_json(s: float) -> float | int:
    return int(s) if float(s).is_integer() else s


def dataset_to_dict(ds: Dataset) -> dict:
    """Inverse of :func:`parse_dataset`; tensors are written in principal form."""
    h = ds.host
    doc: dict[str, Any] = {
        "host": {
            "bulk_total_energy_eV": h.bulk_total_energy,
            "n_bulk_atoms": h.n_bulk_atoms,
            "vbm_eV": h.vbm,
            "band_gap_eV": h.band_gap,
            "dielectric_constant": h.dielectric_constant,
            "cubic_cell_length_A": h.cubic_cell_length,
        },
        "chemical_potentials": {
            sp: {"mu_eV": ds.chemical_potentials.mu[sp], "atom_energy_eV": ds.chemical_potentials.atom_energy[sp]}
            for sp in ds.chemical_potentials.species
        },
        "defects": [],
    }
    for e in ds.defects:
        rec: dict[str, Any] = {
            "label": e.label,
            "charge": e.charge,
            "total_energy_eV": e.total_energy,
            "species_deltas": [{"species": d.species, "count": d.count} for d in e.species_deltas],
        }
        if e.correction_override is not None:
            rec["correction_eV"] = e.correction_override
        if e.alignment_offset != 0.0:
            rec["alignment_eV"] = e.alignment_offset
        doc["defects"].append(rec)
    if ds.spin_systems:
        doc["spin_systems"] = {}
        for name in sorted(ds.spin_systems):
            p = ds.spin_systems[name]
            doc["spin_systems"][name] = {
                "S": _spin_to_json(p.S),
                "I": _spin_to_json(p.I),
                "g_e": p.g_e,
                "g_n": p.g_n,
                "A_MHz": list(p.A),
                "D_GHz": {"Dzz": p.dzz, "epsilon": p.zfs_epsilon},
                "EFG": {"Vzz_V_per_A2": p.efg_vzz, "eta": p.efg_eta},
                "Q_barn": p.Q_barn,
            }
    if ds.stark_series:
        doc["stark_series"] = {
            name: {
                "zpl_eV_at_zero_field": s.zpl0,
                "points": [{"E_V_per_A": e, "zpl_eV": z} for e, z in s.points],
            }
            for name, s in sorted(ds.stark_series.items())
        }
    if ds.orbital_configs:
        doc["orbital_configs"] = [
            {
                "label": c.label,
                "charge": c.charge,
                "states": [
                    {
                        "name": st.name,
                        "up": [{"irrep": o.irrep.name, "occ": o.occ} for o in st.config.up],
                        "down": [{"irrep": o.irrep.name, "occ": o.occ} for o in st.config.down],
                    }
                    for st in c.states
                ],
            }
            for c in ds.orbital_configs
        ]
    if ds.optical_transitions:
        doc["optical_transitions"] = []
        for t in ds.optical_transitions:
            rec = {
                "label": t.label,
                "charge": t.charge,
                "spin_channel": t.spin_channel,
                "ground": t.ground,
                "excited": t.excited,
                "zpl_nm": t.zpl_nm,
            }
            if t.tdm_debye is not None:
                rec["tdm_debye"] = t.tdm_debye
            doc["optical_transitions"].append(rec)
    return doc


def save_dataset(ds: Dataset, path: str | Path) -> None:
    Path(path).write_text(json.dumps(dataset_to_dict(ds), indent=2) + "\n", encoding="utf-8")


# ----------------------------------------------------------------- digest


@dataclass(frozen=True)
class DatasetDigest:
    n_entries: int
    n_defects: int
    n_spin_systems: int
    n_stark_series: int
    species: tuple[str, ...]
    entries: tuple[tuple[str, int], ...]
    charge_ranges: tuple[tuple[str, int, int], ...]


def dataset_digest(ds: Dataset) -> DatasetDigest:
    entries = tuple(sorted((e.label, e.charge) for e in ds.defects))
    ranges = []
    for label in sorted({label for label, _ in entries}):
        qs = [q for lab, q in entries if lab == label]
        ranges.append((label, min(qs), max(qs)))
    species = sorted({d.species for e in ds.defects for d in e.species_deltas})
    return DatasetDigest(
        n_entries=len(entries),
        n_defects=len(ranges),
        n_spin_systems=len(ds.spin_systems),
        n_stark_series=len(ds.stark_series),
        species=tuple(species),
        entries=entries,
        charge_ranges=tuple(ranges),
    )
