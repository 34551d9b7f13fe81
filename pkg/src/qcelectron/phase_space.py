"""Wigner function of the scattered electron and its sideband decomposition.

Sideband labels follow the recoil: psi_{-1} is the absorption term centred
at p0 + p_rec, psi_{+1} the emission term at p0 - p_rec.  With photon
overlaps G, the electron state after tracing out the photon is

    rho(p, p') = sum_mn psi_m(p) conj(psi_n(p')) G[n, m],

and each pair (m, n) gets its own Wigner component.  Pure states use G = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidParameterError
from .perturbation import ABSORB, EMIT, ScatteredState
from .electron_wavepacket import _check_uniform, momentum_grid

LABELS = (-1, 0, 1)
PAIRS = tuple((m, n) for m in LABELS for n in LABELS if m <= n)
# label -> path in ScatteredState
_PATH = {-1: (ABSORB,), 0: (), 1: (EMIT,)}


@dataclass(frozen=True)
class WignerGrid:
    """W(p, z) with rows along p and columns along z.

    ``k_grid`` holds the offsets p - p0; ``components[(m, n)]`` already
    includes the photon-overlap weight of that pair.
    """

    k_grid: np.ndarray
    z_grid: np.ndarray
    total: np.ndarray
    components: dict = field(default_factory=dict)
    p0: float = 0.0

    @property
    def p_grid(self) -> np.ndarray:
        return self.p0 + self.k_grid

    @property
    def dk(self) -> float:
        return float(self.k_grid[1] - self.k_grid[0])

    @property
    def dz(self) -> float:
        return float(self.z_grid[1] - self.z_grid[0])


def conjugate_z_grid(n_p: int, dk: float, n_z: int | None = None) -> np.ndarray:
    """z grid for which the lag sum is an exact DFT: dz = pi / (n_z dk)."""
    n_z = n_p if n_z is None else n_z
    return (np.arange(n_z) - n_z // 2) * (math.pi / (n_z * dk))


def _cross(fm: np.ndarray, fn: np.ndarray, n_p: int, n_z: int, dk: float) -> np.ndarray:
    """(1/pi) sum_j fm(p + j dk) conj(fn(p - j dk)) e^{2 i j dk z} dk.

    ``fm`` and ``fn`` live on the extended grid k = (l - n_p) dk,
    l = 0 .. 2 n_p - 1, so main-grid index i sits at l = i + n_p // 2.
    """
    lags = min(n_p // 2 - 1, (n_z - 1) // 2)
    j = np.arange(-lags, lags + 1)
    centre = np.arange(n_p)[:, None] + n_p // 2
    prod = fm[centre + j] * np.conj(fn[centre - j])
    # e^{2 i j dk z_m} = e^{2 pi i j m / n_z} (-1)^j for even n_z
    z0 = -(n_z // 2) * math.pi / (n_z * dk)
    prod = prod * np.exp(2j * j * dk * z0)
    buf = np.zeros((n_p, n_z), dtype=complex)
    buf[:, j % n_z] = prod
    return (dk / math.pi) * n_z * np.fft.ifft(buf, axis=1)


def _assemble(components: dict) -> np.ndarray:
    total = np.zeros_like(next(iter(components.values())))
    for (m, n), w in components.items():
        total = total + (w if m == n else 2.0 * np.real(w))
    return total


def _build(ext: dict, weights: np.ndarray, k: np.ndarray, n_z: int, p0: float) -> WignerGrid:
    n_p = k.size
    dk = float(k[1] - k[0])
    comps = {}
    for m, n in PAIRS:
        w = weights[n + 1, m + 1]
        if w == 0:
            comps[(m, n)] = np.zeros((n_p, n_z), dtype=complex)
            continue
        comps[(m, n)] = w * _cross(ext[m], ext[n], n_p, n_z, dk)
    total = _assemble(comps)
    imag = float(np.max(np.abs(np.imag(total))))
    scale = max(float(np.max(np.abs(total))), 1e-300)
    if imag > 1e-10 * scale:
        raise ArithmeticError(f"assembled Wigner function has imaginary residue {imag:.3e}")
    for key in ((0, 0), (1, 1), (-1, -1)):
        comps[key] = np.real(comps[key])
    return WignerGrid(k, conjugate_z_grid(n_p, dk, n_z), np.real(total), comps, p0)


def wigner_from_sidebands(k_grid, psi0, psi_minus, psi_plus, gram=None,
                          n_z: int | None = None, p0: float = 0.0) -> WignerGrid:
    """Wigner grid of three sideband wavefunctions sampled on ``k_grid``.

    ``gram[a, b]`` is the photon overlap <g_a|g_b> for labels ordered
    (-1, 0, +1); omit it for a pure superposition.  Samples outside the grid
    are taken as zero.
    """
    k = np.asarray(k_grid, dtype=float)
    dk = _check_uniform(k, "k_grid")
    n_p = k.size
    if n_p % 2:
        raise InvalidParameterError("k_grid needs an even number of points")
    n_z = n_p if n_z is None else int(n_z)
    weights = np.ones((3, 3), dtype=complex) if gram is None else np.asarray(gram, dtype=complex)
    rows = {-1: psi_minus, 0: psi0, 1: psi_plus}
    ext = {}
    for lab, f in rows.items():
        f = np.asarray(f, dtype=complex)
        if f.shape != k.shape:
            raise InvalidParameterError("sideband wavefunctions must share the k grid")
        buf = np.zeros(2 * n_p, dtype=complex)
        buf[n_p // 2: n_p // 2 + n_p] = f
        ext[lab] = buf
    psi = np.array([rows[lab] for lab in LABELS], dtype=complex)
    norm = float(np.real(np.einsum("mk,nm,nk->", psi, weights, np.conj(psi))) * dk)
    if abs(norm - 1.0) > 1e-6:
        raise InvalidParameterError(f"combined sideband norm {norm:.8f} differs from 1")
    return _build(ext, weights, k, n_z, p0)


def wigner_from_scattered(s: ScatteredState, n_points: int = 512, n_z: int | None = None,
                          span_sigmas: float = 10.0) -> WignerGrid:
    """Wigner grid of the first-order scattered electron.

    Sidebands are evaluated from the amplitude closures on a grid of
    ``n_points``; the O(Ytilde^2) norm excess is removed from the diagonal
    (0, 0) weight exactly as in the final momentum distribution.
    """
    wp = s.wp
    k = momentum_grid(wp, n_points=n_points, span_sigmas=span_sigmas,
                      sideband_margin=s.cfg.p_rec)
    n_p = k.size
    dk = float(k[1] - k[0])
    k_ext = (np.arange(2 * n_p) - n_p) * dk
    ext = {lab: s.electron(_PATH[lab], k_ext) for lab in LABELS}
    g = np.array([s.photon_column(_PATH[lab]) for lab in LABELS])
    gram = np.conj(g) @ g.T
    psi = np.array([ext[lab][n_p // 2: n_p // 2 + n_p] for lab in LABELS])
    rho_raw = np.real(np.einsum("mk,nm,nk->k", psi, gram, np.conj(psi)))
    rho0 = np.abs(psi[1]) ** 2 * np.real(gram[1, 1])
    excess = (np.sum(rho_raw) - np.sum(rho0)) / np.sum(rho0)
    gram = gram.copy()
    gram[1, 1] *= 1.0 - excess
    return _build(ext, gram, k, n_p if n_z is None else int(n_z), wp.p0)


def decohere(w: WignerGrid) -> WignerGrid:
    """Drop every interference pair; the total keeps only diagonal terms."""
    comps = {key: (v if key[0] == key[1] else np.zeros_like(v)) for key, v in w.components.items()}
    total = _assemble(comps) if comps else w.total
    return replace(w, total=np.real(total), components=comps)


def marginals(w: WignerGrid) -> tuple[np.ndarray, np.ndarray]:
    """(momentum density over k_grid, position density over z_grid)."""
    return w.total.sum(axis=1) * w.dz, w.total.sum(axis=0) * w.dk


def marginal_moments(w: WignerGrid) -> tuple[float, float]:
    """Mean and variance of the momentum marginal (offsets from p0)."""
    rho, _ = marginals(w)
    k = w.k_grid
    norm = np.sum(rho)
    mean = float(np.sum(k * rho) / norm)
    return mean, float(np.sum((k - mean) ** 2 * rho) / norm)
