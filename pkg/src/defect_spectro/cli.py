"""Command-line front end: ``defect-spectro <subcommand> -i data.json -o outdir``.

Exit codes: 0 success, 1 invalid input, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .chargecorr import madelung_constant_cubic, madelung_correction
from .dataset import Dataset, load_dataset
from .errors import DefectSpectroError, MalformedPromotion
from .report import csv_text, emit_svg_diagram
from .spinham import transition_table, zeeman_sweep
from .stark import effective_field, fit_stark
from .symmetry import classify_transitions, dipole_allowed, parse_state_label
from .thermo import correction_energy, formation_lines, stability_map, transition_levels
from .units import e_angstrom_to_debye, ev_to_nm, nm_to_ev, polarizability_to_bohr_cubed

log = logging.getLogger("defect_spectro")

SUBCOMMANDS = ("thermo", "correction", "levels", "selection", "stark", "all")
DEFAULT_SWEEP = "0:1:101"


class UsageError(Exception):
    pass


@dataclass
class Outputs:
    """Collects generated files; written at the end in name order."""

    files: dict[str, str] = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def add(self, name: str, text: str) -> None:
        if name in self.files:
            raise RuntimeError(f"output {name} produced twice")
        self.files[name] = text


def thread_count() -> int:
    raw = os.environ.get("DEFECT_SPECTRO_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"DEFECT_SPECTRO_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError("DEFECT_SPECTRO_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _safe_name(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in label)


# ----------------------------------------------------------------- thermo


def run_thermo(ds: Dataset, out: Outputs) -> None:
    lines = formation_lines(ds)
    out.add(
        "formation_lines.csv",
        csv_text(["label", "q", "intercept_eV", "slope"], [(ln.label, ln.charge, ln.intercept, ln.slope) for ln in lines]),
    )
    ctl_rows, stab_rows = [], []
    for label in ds.defect_labels:
        own = [ln for ln in lines if ln.label == label]
        smap = stability_map(own, ds.host.band_gap)
        for iv in smap.intervals:
            stab_rows.append((label, iv.start, iv.end, iv.charge))
        for ctl in transition_levels(ds, label):
            ctl_rows.append((label, ctl.q1, ctl.q2, ctl.level))
        out.add(
            f"formation_{_safe_name(label)}.svg",
            emit_svg_diagram("formation", {"lines": own, "gap": ds.host.band_gap, "title": f"{label} formation energy"}),
        )
    out.add("transition_levels.csv", csv_text(["label", "q1", "q2", "level_eV"], ctl_rows))
    out.add("stability.csv", csv_text(["label", "start_eV", "end_eV", "q"], stab_rows))
    out.params["thermo"] = {"band_gap_eV": ds.host.band_gap, "vbm_eV": ds.host.vbm, "fermi_grid_eV": 1e-3}


# ------------------------------------------------------------- correction


def run_correction_table(ds: Dataset, out: Outputs) -> None:
    h = ds.host
    nu = madelung_constant_cubic(h.cubic_cell_length)
    rows = []
    for e in sorted(ds.defects, key=lambda e: (e.label, e.charge)):
        point = madelung_correction(e.charge, h.cubic_cell_length, h.dielectric_constant)
        source = "override" if e.correction_override is not None else "computed"
        rows.append((e.label, e.charge, nu, point, e.alignment_offset, correction_energy(e, h), source))
    out.add(
        "corrections.csv",
        csv_text(["label", "q", "madelung_nu", "point_charge_eV", "alignment_eV", "E_corr_eV", "source"], rows),
    )
    out.params["correction"] = {"cell_length_A": h.cubic_cell_length, "epsilon": h.dielectric_constant}


# ----------------------------------------------------------------- levels


def parse_sweep(text: str) -> np.ndarray:
    try:
        start, stop, steps = text.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError:
        raise UsageError(f"--sweep expects start:stop:steps, got {text!r}") from None
    if steps < 1:
        raise UsageError("--sweep needs at least one step")
    if stop < start:
        raise UsageError("--sweep stop must be >= start")
    return np.linspace(start, stop, steps)


_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


def _levels_for(ds: Dataset, system: str, fields: np.ndarray, axis: str, effective: bool, convention: str):
    if system not in ds.spin_systems:
        known = ", ".join(sorted(ds.spin_systems)) or "none"
        raise UsageError(f"unknown spin system {system!r} (known: {known})")
    if effective and axis != "z":
        raise UsageError("--effective requires --axis z")
    params = ds.spin_systems[system]
    return zeeman_sweep(params, _AXES[axis], fields, effective=effective, convention=convention, max_workers=thread_count())


def run_levels(
    ds: Dataset,
    out: Outputs,
    system: str,
    fields: np.ndarray,
    axis: str = "z",
    effective: bool = False,
    convention: str = "third",
    excited: str | None = None,
    zpl_eV: float | None = None,
) -> None:
    sweep = _levels_for(ds, system, fields, axis, effective, convention)
    rows = []
    for diag, b in zip(sweep, fields):
        for idx, (energy, (ms, mi), br) in enumerate(zip(diag.energies, diag.labels, diag.branch)):
            rows.append((b, idx, energy, ms, mi, br))
    name = _safe_name(system)
    out.add(f"levels_{name}.csv", csv_text(["B_T", "index", "energy_MHz", "m_S", "m_I", "branch"], rows))
    out.add(f"levels_{name}.svg", emit_svg_diagram("levels", {"sweep": sweep, "title": f"{system} spin levels"}))
    out.params.setdefault("levels", {})[system] = {
        "axis": axis,
        "fields_T": [float(b) for b in fields],
        "effective": effective,
        "convention": convention,
    }
    if excited is not None:
        if zpl_eV is None:
            raise UsageError("--excited needs --zpl-eV or --zpl-nm")
        upper = _levels_for(ds, excited, fields[-1:], axis, effective, convention)[0]
        lines = transition_table(sweep[-1], upper, zpl_eV)
        out.add(
            f"transitions_{name}.csv",
            csv_text(
                ["energy_eV", "wavelength_nm", "lower_m_S", "lower_m_I", "upper_m_S", "upper_m_I"],
                [(t.energy_eV, t.wavelength_nm, *t.lower, *t.upper) for t in lines],
            ),
        )
        out.params["levels"][system].update({"excited": excited, "zpl_eV": zpl_eV})


# -------------------------------------------------------------- selection


def run_selection(ds: Dataset, out: Outputs) -> None:
    rows = []
    for cset in sorted(ds.orbital_configs, key=lambda c: (c.label, c.charge)):
        ground = cset.states[0]
        for st in cset.states[1:]:
            verdicts = None
            for channel in ("up", "down"):
                try:
                    verdicts = classify_transitions([(ground.name, ground.config), (st.name, st.config)], channel)
                    break
                except MalformedPromotion as exc:
                    err = exc
            if verdicts is None:
                raise err
            for v in verdicts:
                rows.append(
                    (
                        cset.label,
                        cset.charge,
                        v.spin_channel,
                        v.ground_label,
                        v.excited_label,
                        f"{v.multiplicity}{v.ground_irrep.name}",
                        f"{v.multiplicity}{v.excited_irrep.name}",
                        v.from_orbital,
                        v.to_orbital,
                        "".join(sorted(v.polarizations)),
                        v.allowed,
                    )
                )
    out.add(
        "selection.csv",
        csv_text(
            [
                "label",
                "q",
                "spin_channel",
                "ground_state",
                "excited_state",
                "ground_symmetry",
                "excited_symmetry",
                "from_orbital",
                "to_orbital",
                "polarizations",
                "allowed",
            ],
            rows,
        ),
    )
    if ds.optical_transitions:
        orows = []
        for t in ds.optical_transitions:
            _, g = parse_state_label(t.ground)
            _, x = parse_state_label(t.excited)
            pol = dipole_allowed(g, x)
            ev = nm_to_ev(t.zpl_nm)
            orows.append(
                (
                    t.label,
                    t.charge,
                    t.spin_channel,
                    t.ground,
                    t.excited,
                    t.zpl_nm,
                    ev,
                    ev_to_nm(ev),
                    "" if t.tdm_debye is None else t.tdm_debye,
                    "".join(sorted(pol)),
                    bool(pol),
                )
            )
        out.add(
            "optical_transitions.csv",
            csv_text(
                [
                    "label",
                    "q",
                    "spin_channel",
                    "ground",
                    "excited",
                    "zpl_nm",
                    "zpl_eV",
                    "zpl_nm_roundtrip",
                    "tdm_debye",
                    "polarizations",
                    "allowed",
                ],
                orows,
            ),
        )


# ------------------------------------------------------------------ stark


def run_stark(
    ds: Dataset,
    out: Outputs,
    systems: list[str] | None = None,
    epsilon_s: float | None = None,
    z_scale: float = 1.0,
    shielding: float = 1.0,
) -> None:
    eps = ds.host.dielectric_constant if epsilon_s is None else epsilon_s
    names = sorted(ds.stark_series) if systems is None else systems
    rows = []
    for name in names:
        if name not in ds.stark_series:
            raise UsageError(f"no Stark series for {name!r}")
        fit = fit_stark(ds.stark_series[name], eps)
        rows.append(
            (
                name,
                fit.delta_mu,
                e_angstrom_to_debye(fit.delta_mu),
                fit.delta_alpha,
                polarizability_to_bohr_cubed(fit.delta_alpha),
                effective_field(fit.delta_mu, z_scale, shielding),
                fit.residual_rms,
                eps,
                z_scale,
                shielding,
            )
        )
    out.add(
        "stark.csv",
        csv_text(
            [
                "label",
                "delta_mu_eA",
                "delta_mu_D",
                "delta_alpha_A2e_per_V",
                "delta_alpha_a0_3",
                "E_eff_GV_per_cm",
                "residual_rms_eV",
                "epsilon_s",
                "z_scale_A",
                "shielding",
            ],
            rows,
        ),
    )
    out.params["stark"] = {"epsilon_s": eps, "z_scale_A": z_scale, "shielding": shielding, "systems": names}


# -------------------------------------------------------------- plumbing


def _common(p: argparse.ArgumentParser, need_input: bool = True) -> None:
    p.add_argument("-i", "--input", required=need_input, help="dataset JSON file")
    p.add_argument("-o", "--outdir", default=".", help="output directory (default: current directory)")
    p.add_argument("--stdout", action="store_true", help="write tables to standard output instead of files")
    p.add_argument("--quiet", action="store_true", help="only report errors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="defect-spectro", description="Point-defect thermodynamics and spectroscopy post-processing.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")

    p = sub.add_parser("thermo", help="formation energies, transition levels, stability map")
    _common(p)

    p = sub.add_parser("correction", help="point-charge finite-size correction")
    _common(p, need_input=False)
    p.add_argument("--charge", type=int, help="defect charge q (omit with -i for a per-entry table)")
    p.add_argument("--cell-length", type=float, help="cubic supercell edge in Angstrom")
    p.add_argument("--epsilon", type=float, help="static dielectric constant")

    p = sub.add_parser("levels", help="spin-Hamiltonian level structure")
    _common(p)
    p.add_argument("--system", required=True, help="spin system label")
    p.add_argument("--B", type=float, dest="field", help="single field value in Tesla")
    p.add_argument("--axis", choices=("x", "y", "z"), default="z")
    p.add_argument("--sweep", help="field sweep start:stop:steps in Tesla")
    p.add_argument("--effective", action="store_true", help="use the diagonal high-field Hamiltonian")
    p.add_argument("--convention", choices=("third", "sixth"), default="third", help="rhombic ZFS convention")
    p.add_argument("--excited", help="spin system of the excited state, for an optical line table")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--zpl-eV", type=float, dest="zpl_eV")
    g.add_argument("--zpl-nm", type=float, dest="zpl_nm")

    p = sub.add_parser("selection", help="C2v dipole selection rules")
    _common(p)

    p = sub.add_parser("stark", help="Stark fits and effective internal field")
    _common(p)
    p.add_argument("--system", action="append", help="Stark series label (repeatable; default all)")
    p.add_argument("--epsilon-s", type=float, dest="epsilon_s", help="dielectric constant (default: host value)")
    p.add_argument("--z-scale", type=float, default=1.0, dest="z_scale", help="length scale in Angstrom")
    p.add_argument("--shielding", type=float, default=1.0, help="divide the effective field by this factor")

    p = sub.add_parser("all", help="every analysis the dataset supports")
    _common(p)
    p.add_argument("--sweep", default=DEFAULT_SWEEP, help=f"field sweep along z for every spin system (default {DEFAULT_SWEEP})")
    return parser


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write(out: Outputs, args, command: str) -> None:
    if args.stdout:
        for name in sorted(out.files):
            if name.endswith(".csv"):
                sys.stdout.write(f"# {name}\n{out.files[name]}")
        return
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in sorted(out.files):
        (outdir / name).write_text(out.files[name], encoding="utf-8", newline="\n")
    manifest = {
        "toolkit": "defect-spectro",
        "version": __version__,
        "subcommand": command,
        "input": None if args.input is None else str(args.input),
        "input_sha256": None if args.input is None else _sha256(Path(args.input)),
        "parameters": out.params,
        "outputs": sorted(out.files),
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    log.info("wrote %d files to %s", len(out.files) + 1, outdir)


def _dispatch(args) -> int:
    command = args.command
    out = Outputs()
    ds = load_dataset(args.input) if args.input else None

    if command == "correction":
        if args.charge is None:
            if ds is None:
                raise UsageError("correction needs --charge, or -i for a per-entry table")
            run_correction_table(ds, out)
        else:
            L = args.cell_length if args.cell_length is not None else (ds.host.cubic_cell_length if ds else None)
            eps = args.epsilon if args.epsilon is not None else (ds.host.dielectric_constant if ds else None)
            if L is None or eps is None:
                raise UsageError("correction needs --cell-length and --epsilon (or -i to take them from the host)")
            if L <= 0 or eps < 1:
                raise UsageError("--cell-length must be > 0 and --epsilon >= 1")
            nu = madelung_constant_cubic(L)
            value = madelung_correction(args.charge, L, eps)
            print(f"E_corr_eV={value:.12g}")
            print(f"madelung_nu={nu:.12g}")
            out.params["correction"] = {"charge": args.charge, "cell_length_A": L, "epsilon": eps}
            out.add("correction.csv", csv_text(["q", "cell_length_A", "epsilon", "madelung_nu", "E_corr_eV"], [(args.charge, L, eps, nu, value)]))
            if args.stdout:
                return 0
        _write(out, args, command)
        return 0

    assert ds is not None
    if command == "thermo":
        run_thermo(ds, out)
    elif command == "levels":
        if args.field is not None and args.sweep is not None:
            raise UsageError("use either --B or --sweep, not both")
        fields = parse_sweep(args.sweep) if args.sweep else np.array([args.field if args.field is not None else 0.0])
        zpl = args.zpl_eV if args.zpl_eV is not None else (nm_to_ev(args.zpl_nm) if args.zpl_nm is not None else None)
        run_levels(ds, out, args.system, fields, args.axis, args.effective, args.convention, args.excited, zpl)
    elif command == "selection":
        run_selection(ds, out)
    elif command == "stark":
        if args.z_scale <= 0 or args.shielding < 1:
            raise UsageError("--z-scale must be > 0 and --shielding >= 1")
        if args.epsilon_s is not None and args.epsilon_s < 1:
            raise UsageError("--epsilon-s must be >= 1")
        run_stark(ds, out, args.system, args.epsilon_s, args.z_scale, args.shielding)
    elif command == "all":
        fields = parse_sweep(args.sweep)
        if ds.defects:
            run_thermo(ds, out)
            run_correction_table(ds, out)
        for system in sorted(ds.spin_systems):
            run_levels(ds, out, system, fields)
        if ds.orbital_configs or ds.optical_transitions:
            run_selection(ds, out)
        if ds.stark_series:
            run_stark(ds, out)
    _write(out, args, command)
    return 0


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="defect-spectro: %(message)s", stream=sys.stderr)
    try:
        return _dispatch(args)
    except UsageError as exc:
        print(f"defect-spectro: usage error: {exc}", file=sys.stderr)
        return 2
    except DefectSpectroError as exc:
        print(f"defect-spectro: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"defect-spectro: invalid input: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
