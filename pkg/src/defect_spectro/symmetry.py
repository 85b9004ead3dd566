"""C2v irreducible representations, many-electron state symmetry and
electric-dipole selection rules.

Axis convention: C2 along z, sigma_v is the xz plane, sigma_v' the yz plane,
so x -> B1, y -> B2, z -> A1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce

from .errors import MalformedPromotion, ValidationError

__all__ = [
    "CLASSES",
    "Irrep",
    "Orbital",
    "OrbitalConfiguration",
    "TransitionVerdict",
    "irrep_product",
    "state_symmetry",
    "dipole_allowed",
    "classify_transitions",
    "parse_state_label",
]

CLASSES = ("E", "C2", "sigma_v(xz)", "sigma_v'(yz)")


class Irrep(enum.Enum):
    A1 = (1, 1, 1, 1)
    A2 = (1, 1, -1, -1)
    B1 = (1, -1, 1, -1)
    B2 = (1, -1, -1, 1)

    @property
    def characters(self) -> tuple[int, int, int, int]:
        return self.value

    @classmethod
    def from_characters(cls, chars) -> "Irrep":
        chars = tuple(int(c) for c in chars)
        for irrep in cls:
            if irrep.value == chars:
                return irrep
        raise ValueError(f"no C2v irrep has characters {chars}")

    @classmethod
    def parse(cls, name: str) -> "Irrep":
        """Accepts 'A1', 'a1', 'b2', ..."""
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown C2v irrep {name!r}") from None

    def __str__(self) -> str:
        return self.name


DIPOLE_COMPONENTS = {"x": Irrep.B1, "y": Irrep.B2, "z": Irrep.A1}


def irrep_product(a: Irrep, b: Irrep) -> Irrep:
    return Irrep.from_characters(x * y for x, y in zip(a.characters, b.characters))


@dataclass(frozen=True)
class Orbital:
    irrep: Irrep
    occ: int

    def __post_init__(self):
        if self.occ not in (0, 1, 2):
            raise ValidationError(f"orbital occupancy must be 0, 1 or 2, got {self.occ!r}")


@dataclass(frozen=True)
class OrbitalConfiguration:
    """Orbital occupations resolved by spin channel.

    Each channel is an ordered list of orbitals with occupancy 0 or 1.
    ``from_spatial`` builds one from a spin-free list with occupancies
    0/1/2, putting unpaired electrons in the up channel.
    """

    up: tuple[Orbital, ...]
    down: tuple[Orbital, ...]

    def __post_init__(self):
        object.__setattr__(self, "up", tuple(self.up))
        object.__setattr__(self, "down", tuple(self.down))
        if not self.up and not self.down:
            raise ValidationError("orbital configuration needs at least one orbital")
        for channel in (self.up, self.down):
            for orb in channel:
                if orb.occ not in (0, 1):
                    raise ValidationError(
                        f"spin-resolved occupancy must be 0 or 1, got {orb.occ} for {orb.irrep}"
                    )

    @classmethod
    def from_spatial(cls, orbitals) -> "OrbitalConfiguration":
        norm = []
        for o in orbitals:
            if not isinstance(o, Orbital):
                irrep, occ = o
                o = Orbital(Irrep.parse(irrep) if isinstance(irrep, str) else irrep, occ)
            norm.append(o)
        orbitals = norm
        up = tuple(Orbital(o.irrep, 1 if o.occ >= 1 else 0) for o in orbitals)
        down = tuple(Orbital(o.irrep, 1 if o.occ == 2 else 0) for o in orbitals)
        return cls(up, down)

    def channel(self, name: str) -> tuple[Orbital, ...]:
        if name not in ("up", "down"):
            raise ValueError(f"spin channel must be 'up' or 'down', got {name!r}")
        return self.up if name == "up" else self.down

    @property
    def n_up(self) -> int:
        return sum(o.occ for o in self.up)

    @property
    def n_down(self) -> int:
        return sum(o.occ for o in self.down)

    @property
    def multiplicity(self) -> int:
        return abs(self.n_up - self.n_down) + 1


def state_symmetry(config: OrbitalConfiguration) -> Irrep:
    """Irrep of a single-determinant state: the product over occupied spin orbitals.

    Doubly occupied spatial orbitals contribute X x X = A1, so the result is
    the product of the singly occupied orbitals.
    """
    occupied = [o.irrep for o in config.up + config.down if o.occ == 1]
    return reduce(irrep_product, occupied, Irrep.A1)


def dipole_allowed(ground: Irrep, excited: Irrep) -> frozenset[str]:
    """Polarizations p for which <excited| r_p |ground> is symmetry allowed."""
    product = irrep_product(ground, excited)
    return frozenset(p for p, g in DIPOLE_COMPONENTS.items() if g == product)


@dataclass(frozen=True)
class TransitionVerdict:
    ground_label: str
    excited_label: str
    spin_channel: str
    from_orbital: int
    to_orbital: int
    ground_irrep: Irrep
    excited_irrep: Irrep
    multiplicity: int
    polarizations: frozenset[str]

    @property
    def allowed(self) -> bool:
        return bool(self.polarizations)


def _promotion(ground: OrbitalConfiguration, excited: OrbitalConfiguration, channel: str, label: str):
    """Return (from_index, to_index) of a single-electron move in ``channel``,
    or None if the configurations are identical."""
    other = "down" if channel == "up" else "up"
    for name in ("up", "down"):
        g, x = ground.channel(name), excited.channel(name)
        if [o.irrep for o in g] != [o.irrep for o in x]:
            raise MalformedPromotion(f"{label}: orbital list of the {name} channel differs from the ground state")
    if [o.occ for o in ground.channel(other)] != [o.occ for o in excited.channel(other)]:
        raise MalformedPromotion(
            f"{label}: occupation changes in the {other} channel (spin flip or wrong channel)"
        )
    g_occ = [o.occ for o in ground.channel(channel)]
    x_occ = [o.occ for o in excited.channel(channel)]
    removed = [i for i, (a, b) in enumerate(zip(g_occ, x_occ)) if a > b]
    added = [i for i, (a, b) in enumerate(zip(g_occ, x_occ)) if a < b]
    if not removed and not added:
        return None
    if len(removed) != 1 or len(added) != 1:
        raise MalformedPromotion(
            f"{label}: configurations differ by {len(removed)} removal(s) and {len(added)} addition(s) "
            f"in the {channel} channel; expected one electron move"
        )
    return removed[0], added[0]


def classify_transitions(configs, spin_channel: str) -> list[TransitionVerdict]:
    """Dipole verdicts for single-electron promotions out of a ground state.

    ``configs`` is a sequence of ``(label, OrbitalConfiguration)``; the first
    entry is the ground state and every other entry must differ from it by
    moving one electron inside ``spin_channel``. Entries identical to the
    ground state are skipped.
    """
    if spin_channel not in ("up", "down"):
        raise ValueError(f"spin channel must be 'up' or 'down', got {spin_channel!r}")
    configs = list(configs)
    if not configs:
        return []
    ground_label, ground = configs[0]
    g_irrep = state_symmetry(ground)
    rows = []
    for label, cfg in configs[1:]:
        move = _promotion(ground, cfg, spin_channel, label)
        if move is None:
            continue
        x_irrep = state_symmetry(cfg)
        rows.append(
            TransitionVerdict(
                ground_label=ground_label,
                excited_label=label,
                spin_channel=spin_channel,
                from_orbital=move[0],
                to_orbital=move[1],
                ground_irrep=g_irrep,
                excited_irrep=x_irrep,
                multiplicity=ground.multiplicity,
                polarizations=dipole_allowed(g_irrep, x_irrep),
            )
        )
    return rows


def parse_state_label(label: str) -> tuple[int | None, Irrep]:
    """Split a term symbol such as '3B2' or '^2A_1' into (multiplicity, irrep)."""
    text = label.replace("^", "").replace("_", "").replace("{", "").replace("}", "").strip()
    digits = ""
    while text and text[0].isdigit():
        digits += text[0]
        text = text[1:]
    return (int(digits) if digits else None), Irrep.parse(text)
