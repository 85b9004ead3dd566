"""Spin Hamiltonians of a defect electron spin S coupled to a nuclear spin I.

Matrices act on the product space electron (x) nucleus, each factor in
descending-m order, so product index ``k = iS * (2I + 1) + iI`` has
``m_S = S - iS`` and ``m_I = I - iI``. Matrix elements are in MHz
(frequency units, E/h).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .dataset import SpinSystemParams
from .errors import InvalidSpin, NonHermitian, QuadrupoleForbidden
from .units import CONSTANTS, ev_to_nm, mhz_to_ev

__all__ = [
    "SpinOperatorSet",
    "SpinHamiltonian",
    "LevelDiagram",
    "TransitionLine",
    "TERM_ORDER",
    "spin_operators",
    "zfs_term",
    "quadrupole_term",
    "quadrupole_prefactor",
    "hyperfine_term",
    "build_hamiltonian",
    "tensor_hamiltonian",
    "effective_hamiltonian",
    "diagonalize",
    "zeeman_sweep",
    "transition_table",
    "product_labels",
]

TERM_ORDER = ("electron_zeeman", "nuclear_zeeman", "zfs", "hyperfine", "quadrupole")


@dataclass(frozen=True)
class SpinOperatorSet:
    s: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    sp: np.ndarray
    sm: np.ndarray

    @property
    def dim(self) -> int:
        return self.sz.shape[0]

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    @property
    def m_values(self) -> np.ndarray:
        return self.s - np.arange(self.dim)


def spin_operators(s: float) -> SpinOperatorSet:
    twice = 2 * s
    if twice < 0 or abs(twice - round(twice)) > 1e-12:
        raise InvalidSpin(f"spin must be a non-negative half-integer, got {s}")
    s = round(twice) / 2
    dim = int(round(twice)) + 1
    m = s - np.arange(dim)
    # S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; |m+1> sits one row above |m>
    sp = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        sp[i - 1, i] = np.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
    sm = sp.conj().T
    sx = 0.5 * (sp + sm)
    sy = -0.5j * (sp - sm)
    sz = np.diag(m).astype(complex)
    return SpinOperatorSet(s, sx, sy, sz, sp, sm)


def zfs_term(D: float, epsilon: float, ops: SpinOperatorSet, convention: str = "third") -> np.ndarray:
    """Zero-field splitting D[Sz^2 - S(S+1)/3 + c (S+^2 + S-^2)] in MHz for D in GHz.

    ``convention="third"`` uses c = epsilon/3; ``"sixth"`` uses
    c = epsilon/6, i.e. E (Sx^2 - Sy^2) with E = epsilon D / 3.
    Spin doublets and singlets return the zero matrix.
    """
    if convention not in ("third", "sixth"):
        raise ValueError(f"unknown ZFS convention {convention!r}")
    n = ops.dim
    if ops.s <= 0.5:
        return np.zeros((n, n), dtype=complex)
    s = ops.s
    c = epsilon / 3.0 if convention == "third" else epsilon / 6.0
    body = ops.sz @ ops.sz - s * (s + 1) / 3.0 * ops.identity + c * (ops.sp @ ops.sp + ops.sm @ ops.sm)
    return 1e3 * D * body


def quadrupole_prefactor(Vzz: float, Q_I: float, I: float) -> float:
    """e Q_I V_zz / (4 I (2I - 1)) in MHz for Q_I in barn and V_zz in V/A^2."""
    if I <= 0.5:
        return 0.0
    return Q_I * Vzz * CONSTANTS.ev_per_e_barn_V_per_A2 * CONSTANTS.MHz_per_eV / (4.0 * I * (2.0 * I - 1.0))


def quadrupole_term(Vzz: float, eta: float, Q_I: float, ops: SpinOperatorSet) -> np.ndarray:
    """Nuclear quadrupole interaction in MHz.

    Uses eta (Ix^2 - Iy^2) for the asymmetry term. For I <= 1/2 the
    interaction does not exist: the zero matrix is returned, with a warning
    when a non-zero coupling was requested.
    """
    n = ops.dim
    I = ops.s
    if I <= 0.5:
        if Q_I * Vzz != 0:
            warnings.warn(f"no quadrupole interaction for I = {I}; term set to zero", QuadrupoleForbidden, stacklevel=2)
        return np.zeros((n, n), dtype=complex)
    body = 3.0 * ops.sz @ ops.sz - I * (I + 1) * ops.identity + eta * (ops.sx @ ops.sx - ops.sy @ ops.sy)
    return quadrupole_prefactor(Vzz, Q_I, I) * body


def hyperfine_term(A: Sequence[float], ops_s: SpinOperatorSet, ops_i: SpinOperatorSet) -> np.ndarray:
    axx, ayy, azz = A
    return azz * np.kron(ops_s.sz, ops_i.sz) + axx * np.kron(ops_s.sx, ops_i.sx) + ayy * np.kron(ops_s.sy, ops_i.sy)


def product_labels(S: float, I: float) -> list[tuple[float, float]]:
    ms = S - np.arange(int(round(2 * S)) + 1)
    mi = I - np.arange(int(round(2 * I)) + 1)
    return [(float(a), float(b)) for a in ms for b in mi]


@dataclass(frozen=True)
class SpinHamiltonian:
    S: float
    I: float
    field: np.ndarray
    matrix: np.ndarray
    terms: dict[str, np.ndarray]

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def _total(terms: dict[str, np.ndarray]) -> np.ndarray:
    total = np.zeros_like(terms[TERM_ORDER[0]])
    for name in TERM_ORDER:
        total = total + terms[name]
    return total


def _field_vector(B) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    if B.shape == ():
        B = np.array([0.0, 0.0, float(B)])
    if B.shape != (3,):
        raise ValueError("magnetic field must be a scalar (along z) or a 3-vector in Tesla")
    return B


def build_hamiltonian(params: SpinSystemParams, B, convention: str = "third") -> SpinHamiltonian:
    """Full five-term spin Hamiltonian in MHz for a field ``B`` in Tesla."""
    B = _field_vector(B)
    ops_s = spin_operators(params.S)
    ops_i = spin_operators(params.I)
    one_s, one_i = ops_s.identity, ops_i.identity

    ez = CONSTANTS.bohr_magneton_MHz_per_T * params.g_e * (B[0] * ops_s.sx + B[1] * ops_s.sy + B[2] * ops_s.sz)
    nz = CONSTANTS.nuclear_magneton_MHz_per_T * params.g_n * (B[0] * ops_i.sx + B[1] * ops_i.sy + B[2] * ops_i.sz)
    terms = {
        "electron_zeeman": np.kron(ez, one_i),
        "nuclear_zeeman": np.kron(one_s, nz),
        "zfs": np.kron(zfs_term(params.D, params.zfs_epsilon, ops_s, convention), one_i),
        "hyperfine": hyperfine_term(params.A, ops_s, ops_i),
        "quadrupole": np.kron(one_s, quadrupole_term(params.efg_vzz, params.efg_eta, params.Q_barn, ops_i)),
    }
    return SpinHamiltonian(params.S, params.I, B, _total(terms), terms)


def tensor_hamiltonian(
    S: float,
    I: float,
    g_e: float,
    g_n: float,
    d_tensor_mhz,
    a_tensor_mhz,
    q_tensor_mhz,
    B,
) -> SpinHamiltonian:
    """Spin Hamiltonian from general 3x3 tensors: S.D.S + S.A.I + I.Q.I plus
    isotropic Zeeman terms (MHz, Tesla)."""
    B = _field_vector(B)
    ops_s = spin_operators(S)
    ops_i = spin_operators(I)
    svec = (ops_s.sx, ops_s.sy, ops_s.sz)
    ivec = (ops_i.sx, ops_i.sy, ops_i.sz)
    D = np.asarray(d_tensor_mhz, dtype=float)
    A = np.asarray(a_tensor_mhz, dtype=float)
    Q = np.asarray(q_tensor_mhz, dtype=float)
    one_s, one_i = ops_s.identity, ops_i.identity
    ez = sum(CONSTANTS.bohr_magneton_MHz_per_T * g_e * B[a] * svec[a] for a in range(3))
    nz = sum(CONSTANTS.nuclear_magneton_MHz_per_T * g_n * B[a] * ivec[a] for a in range(3))
    zfs = sum(D[a, b] * svec[a] @ svec[b] for a in range(3) for b in range(3))
    quad = sum(Q[a, b] * ivec[a] @ ivec[b] for a in range(3) for b in range(3))
    hyp = sum(A[a, b] * np.kron(svec[a], ivec[b]) for a in range(3) for b in range(3))
    if S <= 0.5:
        zfs = np.zeros_like(one_s)
    if I <= 0.5:
        quad = np.zeros_like(one_i)
    terms = {
        "electron_zeeman": np.kron(ez, one_i),
        "nuclear_zeeman": np.kron(one_s, nz),
        "zfs": np.kron(zfs, one_i),
        "hyperfine": hyp,
        "quadrupole": np.kron(one_s, quad),
    }
    return SpinHamiltonian(S, I, B, _total(terms), terms)


def effective_hamiltonian(params: SpinSystemParams, Bz: float, include_offsets: bool = False) -> SpinHamiltonian:
    """Diagonal high-field Hamiltonian along the C2 (z) axis, in MHz.

        mu_B g_e Bz Sz + mu_N g_n Bz Iz + D Sz^2 + Q_eff Iz^2 + A_zz Sz Iz

    with Q_eff = 3 e Q_I V_zz / (4 I (2I - 1)). ``include_offsets`` adds the
    scalar shifts -D S(S+1)/3 and -Q_eff I(I+1)/3 that the full traceless
    terms carry, so both Hamiltonians share the same zero of energy.
    """
    ops_s = spin_operators(params.S)
    ops_i = spin_operators(params.I)
    one_s, one_i = ops_s.identity, ops_i.identity
    S, I = params.S, params.I
    D = 1e3 * params.D if S > 0.5 else 0.0
    q_eff = 3.0 * quadrupole_prefactor(params.efg_vzz, params.Q_barn, I)

    zfs = D * ops_s.sz @ ops_s.sz
    quad = q_eff * ops_i.sz @ ops_i.sz
    if include_offsets:
        zfs = zfs - D * S * (S + 1) / 3.0 * one_s
        quad = quad - q_eff * I * (I + 1) / 3.0 * one_i
    terms = {
        "electron_zeeman": np.kron(CONSTANTS.bohr_magneton_MHz_per_T * params.g_e * Bz * ops_s.sz, one_i),
        "nuclear_zeeman": np.kron(one_s, CONSTANTS.nuclear_magneton_MHz_per_T * params.g_n * Bz * ops_i.sz),
        "zfs": np.kron(zfs, one_i),
        "hyperfine": params.A[2] * np.kron(ops_s.sz, ops_i.sz),
        "quadrupole": np.kron(one_s, quad),
    }
    return SpinHamiltonian(S, I, np.array([0.0, 0.0, float(Bz)]), _total(terms), terms)


@dataclass(frozen=True)
class LevelDiagram:
    """Eigenvalues (ascending, MHz) and eigenvectors (columns) at one field.

    ``labels[i]`` is the product state (m_S, m_I) with the largest weight in
    level i. ``branch[i]`` is the adiabatic branch index assigned by
    :func:`zeeman_sweep`; for a standalone diagram it equals ``i``.
    """

    field: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    labels: tuple[tuple[float, float], ...]
    S: float
    I: float
    branch: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.branch:
            object.__setattr__(self, "branch", tuple(range(len(self.energies))))

    def __len__(self) -> int:
        return len(self.energies)

    def by_branch(self) -> np.ndarray:
        """Energies reordered so that entry j belongs to branch j."""
        out = np.empty_like(self.energies)
        out[list(self.branch)] = self.energies
        return out


def _degenerate_clusters(w: np.ndarray, tol: float) -> list[list[int]]:
    clusters = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[clusters[-1][-1]] <= tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _fix_degenerate_subspace(v: np.ndarray) -> np.ndarray:
    """Replace an arbitrary orthonormal basis of a degenerate subspace by one
    aligned with the product basis (independent of the eigensolver's choice)."""
    k = v.shape[1]
    _, _, piv = scipy.linalg.qr(v.conj().T, pivoting=True)
    cols = np.sort(piv[:k])
    # projections of the selected product states onto the subspace
    proj = v @ v.conj().T[:, cols]
    # Loewdin orthonormalization is symmetric in the chosen states
    overlap = proj.conj().T @ proj
    evals, evecs = np.linalg.eigh(overlap)
    inv_sqrt = evecs @ np.diag(evals**-0.5) @ evecs.conj().T
    return proj @ inv_sqrt


def diagonalize(h: SpinHamiltonian | np.ndarray, S: float | None = None, I: float | None = None) -> LevelDiagram:
    """Eigen-decomposition with reproducible eigenvectors.

    Degenerate subspaces are re-expressed in a basis aligned with the product
    states and ordered by label; each eigenvector is phased so its largest
    component is real and positive.
    """
    if isinstance(h, SpinHamiltonian):
        matrix, S, I, B = h.matrix, h.S, h.I, h.field
    else:
        matrix = np.asarray(h, dtype=complex)
        B = np.zeros(3)
        if S is None or I is None:
            # treat a bare matrix as a single spin with no nucleus
            S, I = (matrix.shape[0] - 1) / 2, 0.0
    matrix = np.asarray(matrix, dtype=complex)
    scale = max(np.abs(matrix).max(), 1.0)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonHermitian("Hamiltonian must be a square matrix")
    if np.abs(matrix - matrix.conj().T).max() > 1e-10 * scale:
        raise NonHermitian("Hamiltonian is not Hermitian")

    w, v = np.linalg.eigh(matrix)
    labels_all = product_labels(S, I)
    if len(labels_all) != len(w):
        raise ValueError(f"matrix dimension {len(w)} does not match S={S}, I={I}")

    tol = 1e-9 * scale
    vecs = np.empty_like(v)
    energies = np.empty_like(w)
    pos = 0
    for cluster in _degenerate_clusters(w, tol):
        block = v[:, cluster]
        if len(cluster) > 1:
            block = _fix_degenerate_subspace(block)
        dominant = np.argmax(np.abs(block) ** 2, axis=0)
        # descending (m_S, m_I) inside a degenerate cluster, i.e. product-basis order
        local = np.argsort(dominant, kind="stable")
        for j in local:
            vecs[:, pos] = block[:, j]
            energies[pos] = w[cluster].mean() if len(cluster) > 1 else w[cluster[0]]
            pos += 1

    for j in range(vecs.shape[1]):
        k = np.argmax(np.abs(vecs[:, j]))
        phase = vecs[k, j] / abs(vecs[k, j])
        vecs[:, j] = vecs[:, j] / phase
    labels = tuple(labels_all[int(np.argmax(np.abs(vecs[:, j]) ** 2))] for j in range(vecs.shape[1]))
    return LevelDiagram(np.asarray(B, dtype=float), energies, vecs, labels, float(S), float(I))


def zeeman_sweep(
    params: SpinSystemParams,
    B_axis,
    B_values: Sequence[float],
    effective: bool = False,
    convention: str = "third",
    max_workers: int = 1,
) -> list[LevelDiagram]:
    """Level diagrams along a field sweep with levels connected adiabatically.

    Branches are matched between neighbouring field points by maximizing the
    total squared eigenvector overlap. Field points are diagonalized on up to
    ``max_workers`` threads; branch matching is sequential.
    """
    B_values = [float(b) for b in B_values]
    if any(b2 < b1 for b1, b2 in zip(B_values, B_values[1:])):
        raise ValueError("field values must be sorted in ascending order")
    axis = np.asarray(B_axis, dtype=float)
    norm = np.linalg.norm(axis)
    if axis.shape != (3,) or norm == 0:
        raise ValueError("field axis must be a non-zero 3-vector")
    axis = axis / norm
    if effective and not np.allclose(axis, [0, 0, 1]):
        raise ValueError("the effective Hamiltonian is defined for fields along z only")

    def solve(b: float) -> LevelDiagram:
        if effective:
            return diagonalize(effective_hamiltonian(params, b))
        return diagonalize(build_hamiltonian(params, b * axis, convention))

    if max_workers > 1 and len(B_values) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            solved = list(pool.map(solve, B_values))
    else:
        solved = [solve(b) for b in B_values]

    out: list[LevelDiagram] = []
    prev = None
    for diag in solved:
        if prev is None:
            branch = tuple(range(len(diag)))
        else:
            overlap = np.abs(prev.vectors.conj().T @ diag.vectors) ** 2
            rows, cols = linear_sum_assignment(-overlap)
            branch_of = np.empty(len(diag), dtype=int)
            branch_of[cols] = np.asarray(prev.branch)[rows]
            branch = tuple(int(x) for x in branch_of)
        diag = LevelDiagram(diag.field, diag.energies, diag.vectors, diag.labels, diag.S, diag.I, branch)
        out.append(diag)
        prev = diag
    return out


@dataclass(frozen=True)
class TransitionLine:
    energy_eV: float
    wavelength_nm: float
    lower: tuple[float, float]
    upper: tuple[float, float]
    lower_index: int
    upper_index: int


def transition_table(
    ground: LevelDiagram, excited: LevelDiagram, zpl: float, spin_conserving: bool = True
) -> list[TransitionLine]:
    """Optical lines zpl + (E_upper - E_lower) between sublevels.

    With ``spin_conserving`` only pairs with the same (m_S, m_I) label are
    kept, since the electric-dipole operator acts on neither spin.
    """
    lines = []
    for i, (e_lo, lab_lo) in enumerate(zip(ground.energies, ground.labels)):
        for j, (e_up, lab_up) in enumerate(zip(excited.energies, excited.labels)):
            if spin_conserving and lab_lo != lab_up:
                continue
            energy = zpl + mhz_to_ev(e_up - e_lo)
            lines.append(TransitionLine(float(energy), ev_to_nm(energy), lab_lo, lab_up, i, j))
    lines.sort(key=lambda t: (t.energy_eV, t.lower_index, t.upper_index))
    return lines
