"""Independent reference implementations used by the test suite.

None of these import the code under test except for plain data classes.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import erfc

# --------------------------------------------------------------- spin algebra


def spin_matrices_ascending(s: float):
    """(Sx, Sy, Sz) in ascending-m order, built from Sx/Sy matrix elements
    directly rather than from ladder operators."""
    dim = int(round(2 * s)) + 1
    m = -s + np.arange(dim)
    sx = np.zeros((dim, dim), dtype=complex)
    sy = np.zeros((dim, dim), dtype=complex)
    for a in range(dim):
        for b in range(dim):
            if m[a] == m[b] + 1:
                c = 0.5 * math.sqrt((s - m[b]) * (s + m[b] + 1))
                sx[a, b] = c
                sy[a, b] = -1j * c
            elif m[a] == m[b] - 1:
                c = 0.5 * math.sqrt((s + m[b]) * (s - m[b] + 1))
                sx[a, b] = c
                sy[a, b] = 1j * c
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


def dense_spin_hamiltonian(S, I, g_e, g_n, D_mhz, eps, A, vzz_q_mhz, eta, B, mu_b, mu_n):
    """Five-term Hamiltonian assembled in ascending order with nucleus first
    (I (x) S), then permuted to the package's electron-first, descending order.

    ``vzz_q_mhz`` is the quadrupole prefactor e Q V_zz / (4I(2I-1)) in MHz;
    the rhombic ZFS coefficient is eps/3.
    """
    sx, sy, sz = spin_matrices_ascending(S)
    ix, iy, iz = spin_matrices_ascending(I)
    ns, ni = sz.shape[0], iz.shape[0]
    es, ei = np.eye(ns), np.eye(ni)
    sp, sm = sx + 1j * sy, sx - 1j * sy
    h_s = mu_b * g_e * (B[0] * sx + B[1] * sy + B[2] * sz)
    if S > 0.5:
        h_s = h_s + D_mhz * (sz @ sz - S * (S + 1) / 3 * es + eps / 3 * (sp @ sp + sm @ sm))
    h_i = mu_n * g_n * (B[0] * ix + B[1] * iy + B[2] * iz)
    if I > 0.5:
        h_i = h_i + vzz_q_mhz * (3 * iz @ iz - I * (I + 1) * ei + eta * (ix @ ix - iy @ iy))
    h = np.kron(ei, h_s) + np.kron(h_i, es)
    h = h + A[0] * np.kron(ix, sx) + A[1] * np.kron(iy, sy) + A[2] * np.kron(iz, sz)
    # permutation: package index (iS desc, iI desc) -> oracle index (iI asc, iS asc)
    perm = []
    for a in range(ns):
        for b in range(ni):
            perm.append((ni - 1 - b) * ns + (ns - 1 - a))
    perm = np.array(perm)
    return h[np.ix_(perm, perm)]


def second_order_bound(full: np.ndarray, diag: np.ndarray):
    """Perturbation-theory estimate for eigenvalues of ``full`` near the
    diagonal entries ``diag``.

    Returns (shift2, ratio, row_norm) per level: the second-order shift
    magnitude sum_j |V_ij|^2/|d_i - d_j|, the largest mixing ratio
    |V_ij|/|d_i - d_j| and the first-order bound sqrt(sum_j |V_ij|^2).
    """
    V = full - np.diag(diag)
    n = len(diag)
    shift2 = np.zeros(n)
    ratio = np.zeros(n)
    row = np.zeros(n)
    for i in range(n):
        for j in range(n):
            if i == j:
                row[i] += abs(V[i, i]) ** 2
                continue
            v2 = abs(V[i, j]) ** 2
            row[i] += v2
            if v2 == 0:
                continue
            gap = abs(diag[i] - diag[j])
            if gap == 0:
                shift2[i] = math.inf
                ratio[i] = math.inf
                continue
            shift2[i] += v2 / gap
            ratio[i] = max(ratio[i], math.sqrt(v2) / gap)
    return shift2, ratio, np.sqrt(row)


# ----------------------------------------------------------------- Ewald


def ewald_loops(frac, q, L, alpha, nreal, nrecip):
    """Plain-loop Ewald sum (energy per cell in e^2/(4 pi eps0 A)) with a
    neutralizing background; image and k loops are explicit."""
    frac = np.asarray(frac, dtype=float)
    q = np.asarray(q, dtype=float)
    n = len(q)
    cart = frac * L
    real = 0.0
    for nx, ny, nz in itertools.product(range(-nreal, nreal + 1), repeat=3):
        shift = np.array([nx, ny, nz]) * L
        for i in range(n):
            for j in range(n):
                if nx == ny == nz == 0 and i == j:
                    continue
                r = np.linalg.norm(cart[i] - cart[j] + shift)
                real += 0.5 * q[i] * q[j] * erfc(alpha * r) / r
    recip = 0.0
    V = L**3
    for mx, my, mz in itertools.product(range(-nrecip, nrecip + 1), repeat=3):
        if mx == my == mz == 0:
            continue
        k = 2 * math.pi / L * np.array([mx, my, mz])
        k2 = k @ k
        s = np.sum(q * np.exp(1j * (cart @ k)))
        recip += 2 * math.pi / V * math.exp(-k2 / (4 * alpha**2)) / k2 * abs(s) ** 2
    self_term = -alpha / math.sqrt(math.pi) * np.sum(q**2)
    background = -math.pi * np.sum(q) ** 2 / (2 * V * alpha**2)
    return real + recip + self_term + background


# ------------------------------------------------------------ thermodynamics


def brute_envelope(lines, gap, step=1e-4):
    """Stable charge on a uniform Fermi grid, from direct evaluation."""
    grid = np.arange(0.0, gap + step / 2, step)
    vals = np.array([[ln.intercept + ln.charge * x for x in grid] for ln in lines])
    winner = np.argmin(vals, axis=0)
    return grid, [lines[k].charge for k in winner]


# ------------------------------------------------------------------- C2v

# irreps as (sign under C2, sign under sigma_v(xz)); the group is Z2 x Z2
KLEIN = {"A1": (0, 0), "A2": (0, 1), "B1": (1, 0), "B2": (1, 1)}
KLEIN_INV = {v: k for k, v in KLEIN.items()}
DIPOLE = {"x": "B1", "y": "B2", "z": "A1"}


def klein_product(a: str, b: str) -> str:
    x, y = KLEIN[a], KLEIN[b]
    return KLEIN_INV[(x[0] ^ y[0], x[1] ^ y[1])]


def klein_allowed(g: str, e: str) -> set[str]:
    return {axis for axis, irrep in DIPOLE.items() if klein_product(klein_product(g, irrep), e) == "A1"}
