"""Regenerate reference_defects.json.

Total energies are synthetic: they are chosen so the formation lines of each
defect give prescribed transition levels. Spin parameters come from the
published hyperfine/EFG/ZFS table; g_n and Q are placeholders. Stark series
are exact quadratics built from the published dipole and polarizability.
"""

import json
from pathlib import Path

import numpy as np

from defect_spectro.chargecorr import madelung_correction
from defect_spectro.units import nm_to_ev

HOST = {
    "bulk_total_energy_eV": -1961.28,
    "n_bulk_atoms": 216,
    "vbm_eV": 11.92,
    "band_gap_eV": 5.5,
    "dielectric_constant": 5.7,
    "cubic_cell_length_A": 10.701,
}
MU = {
    "C": {"mu_eV": -1961.28 / 216, "atom_energy_eV": -1.26},
    "Pa": {"mu_eV": -9.52, "atom_energy_eV": -2.31},
    "Pr": {"mu_eV": -4.73, "atom_energy_eV": -0.98},
}
# neutral formation energy and transition levels (+1/0, 0/-1, -1/-2, -2/-3)
DEFECTS = {
    "PaV2": {"species": {"Pa": 1, "C": -3}, "f0": 7.45, "levels": (1.05, 2.20, 3.15, 4.35)},
    "PrV2": {"species": {"Pr": 1, "C": -3}, "f0": 8.10, "levels": (0.85, 2.45, 3.40, 4.60)},
}


def formation_intercepts(f0, levels):
    f = {0: f0}
    f[1] = f0 - levels[0]
    f[-1] = f0 + levels[1]
    f[-2] = f[-1] + levels[2]
    f[-3] = f[-2] + levels[3]
    return f


def defects():
    out = []
    L, eps, vbm = HOST["cubic_cell_length_A"], HOST["dielectric_constant"], HOST["vbm_eV"]
    for label, d in DEFECTS.items():
        mu_sum = sum(n * MU[sp]["mu_eV"] for sp, n in d["species"].items())
        for q, f in sorted(formation_intercepts(d["f0"], d["levels"]).items(), reverse=True):
            etot = f + HOST["bulk_total_energy_eV"] + mu_sum - q * vbm - madelung_correction(q, L, eps)
            out.append(
                {
                    "label": label,
                    "charge": q,
                    "total_energy_eV": round(etot, 6),
                    "species_deltas": [{"species": sp, "count": n} for sp, n in d["species"].items()],
                }
            )
    return out


def spin(S, A, vzz, eta, dzz=None, eps=None, g_n=0.75, Q=3.0):
    rec = {"S": S, "I": "5/2", "g_n": g_n, "A_MHz": A, "EFG": {"Vzz_V_per_A2": vzz, "eta": eta}, "Q_barn": Q}
    if dzz is not None:
        rec["D_GHz"] = {"Dzz": dzz, "epsilon": eps}
    return rec


SPIN = {
    "PaV2-2": spin("1/2", [-50.874, -48.39, -116.319], 613.191, 0.595),
    "PrV2-2": spin("1/2", [-195.352, -160.946, -201.971], 287.623, 0.744, g_n=1.71, Q=-0.077),
    "PaV2-1": spin(1, [-76.684, -46.146, -88.272], -683.679, 0.776, 1.611, 0.115),
    "PrV2-1": spin(1, [-106.872, -104.617, -113.123], 370.684, 0.77, 12.931, 0.275, g_n=1.71, Q=-0.077),
}


def stark(zpl_nm, dmu, dalpha, eps=5.7):
    zpl0 = nm_to_ev(zpl_nm)
    fields = np.linspace(-0.2, 0.2, 9)
    pts = [
        {"E_V_per_A": round(float(e), 12), "zpl_eV": float(zpl0 - dmu * e / eps - dalpha * e**2 / (2 * eps**2))}
        for e in fields
    ]
    return {"zpl_eV_at_zero_field": zpl0, "points": pts}


def occ(irreps, flags):
    return [{"irrep": r, "occ": f} for r, f in zip(irreps, flags)]


M2 = ["A1", "B2", "B1", "A1", "B2", "B2"]
M1 = ["A1", "B2", "B1", "A1", "B2", "B1"]
ORBITAL_CONFIGS = []
for label in ("PaV2", "PrV2"):
    ORBITAL_CONFIGS.append(
        {
            "label": label,
            "charge": -2,
            "states": [
                {"name": "ground", "up": occ(M2, [1, 1, 1, 1, 1, 0]), "down": occ(M2, [1, 1, 1, 0, 1, 0])},
                {"name": "up a1->b2", "up": occ(M2, [1, 1, 1, 0, 1, 1]), "down": occ(M2, [1, 1, 1, 0, 1, 0])},
            ],
        }
    )
    ORBITAL_CONFIGS.append(
        {
            "label": label,
            "charge": -1,
            "states": [
                {"name": "ground", "up": occ(M1, [1, 1, 1, 1, 1, 0]), "down": occ(M1, [1, 1, 1, 0, 0, 0])},
                {"name": "down a1->b1", "up": occ(M1, [1, 1, 1, 1, 1, 0]), "down": occ(M1, [0, 1, 1, 0, 0, 1])},
            ],
        }
    )

OPTICAL = [
    {"label": "PaV2", "charge": -2, "spin_channel": "up", "ground": "2A1", "excited": "2B2", "zpl_nm": 533, "tdm_debye": 1.37},
    {"label": "PrV2", "charge": -2, "spin_channel": "up", "ground": "2A1", "excited": "2B2", "zpl_nm": 764, "tdm_debye": 1.61},
    {"label": "PrV2", "charge": -2, "spin_channel": "down", "ground": "2A1", "excited": "2B2", "zpl_nm": 1765, "tdm_debye": 1.16},
    {"label": "PaV2", "charge": -1, "spin_channel": "down", "ground": "3B2", "excited": "3A2", "zpl_nm": 1187, "tdm_debye": 6.64},
    {"label": "PrV2", "charge": -1, "spin_channel": "down", "ground": "3B2", "excited": "3A2", "zpl_nm": 1259, "tdm_debye": 7.72},
]


def main():
    doc = {
        "host": HOST,
        "chemical_potentials": MU,
        "defects": defects(),
        "spin_systems": SPIN,
        "stark_series": {"PaV2-2": stark(533, 1.23, 0.12), "PaV2-1": stark(1187, 0.02, 0.025)},
        "orbital_configs": ORBITAL_CONFIGS,
        "optical_transitions": OPTICAL,
    }
    path = Path(__file__).with_name("reference_defects.json")
    path.write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
