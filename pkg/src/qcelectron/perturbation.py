"""First-order electron-photon scattering amplitudes and energy transfer.

The initial state is a product c0(p, nu) = c_p c_nu, and every scattering
term produced by the emission/absorption map keeps a product form
psi(p) g(nu).  Amplitudes are therefore stored as (electron function,
photon column) pairs; dense (p, nu) grids are materialized only on demand.
Reductions over the grid factor into small Gram matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError
from .photon_state import PhotonState, expectation_annihilation, mean_photon_number
from .electron_wavepacket import WavepacketState, extinction_factor, momentum_grid, sinc

# Classical coupling Y = eE_cL/4 hbar omega in terms of the quantized one:
# Y = BRIDGE * Ytilde * |<a>|.  Fixed by matching the numeric interference
# energy to the closed form (see tests/test_perturbation.py::test_bridge_constant).
BRIDGE = 0.5

EMIT, ABSORB = "e", "a"
_SECOND_ORDER_PATHS = ((EMIT, EMIT), (EMIT, ABSORB), (ABSORB, EMIT), (ABSORB, ABSORB))


@dataclass(frozen=True)
class InteractionConfig:
    detuning: float
    coupling_q: float
    phi0: float
    length: float
    hbar_qz: float
    p_rec: float = 1.0

    @property
    def sinc_factor(self) -> float:
        return float(sinc(0.5 * self.detuning))

    @property
    def phase(self) -> float:
        """theta/2 + phi0, the phase carried by emission amplitudes."""
        return 0.5 * self.detuning + self.phi0


def make_config(detuning: float = 0.0, coupling_q: float = 0.05, phi0: float = 0.0,
                length: float = 100.0) -> InteractionConfig:
    """Build a config; ``length`` is L in units of v0/omega.

    theta = (omega/v0 - q_z) L fixes hbar q_z = 1 - theta / L in recoil units.
    """
    if not 0.0 <= coupling_q < 1.0:
        raise InvalidParameterError(
            f"coupling_q={coupling_q} outside [0, 1): first-order perturbation theory does not apply"
        )
    if not length > 0:
        raise InvalidParameterError("interaction length must be positive")
    return InteractionConfig(
        detuning=float(detuning),
        coupling_q=float(coupling_q),
        phi0=float(phi0),
        length=float(length),
        hbar_qz=1.0 - detuning / length,
    )


def classical_coupling(cfg: InteractionConfig, photon: PhotonState) -> float:
    """Y = eE_cL/(4 hbar omega) of the classical field equivalent to ``photon``."""
    return BRIDGE * cfg.coupling_q * abs(expectation_annihilation(photon))


@dataclass(frozen=True)
class TransferResult:
    """Energies in units of hbar*omega.

    ``dE_second`` is the energy carried by the second-order norm-restoring
    term; it is not part of ``dE_total`` but enters the ARC balance together
    with ``dNu``, which is computed to the same order.
    """

    dE_total: float
    dE_interference: float
    dE_fgr: float
    dNu: float
    dE_second: float = 0.0


class ScatteredState:
    """c0 + c1(e) + c1(a) on a momentum-offset grid times the Fock ladder."""

    def __init__(self, wp: WavepacketState, photon: PhotonState, cfg: InteractionConfig,
                 k_grid: np.ndarray, spontaneous_approx: bool = False):
        self.wp = wp
        self.photon = photon
        self.cfg = cfg
        self.k_grid = np.asarray(k_grid, dtype=float)
        self.spontaneous_approx = spontaneous_approx
        self.dk = float(self.k_grid[1] - self.k_grid[0])
        # room for two emissions in the second-order bookkeeping
        self.nu = np.arange(photon.fock_coeffs.size + 2)

    @property
    def p_grid(self) -> np.ndarray:
        return self.wp.p0 + self.k_grid

    @property
    def nu_range(self) -> tuple[int, int]:
        return int(self.nu[0]), int(self.nu[-1])

    # -- factor construction ------------------------------------------------

    def _step_coefficient(self, step: str) -> complex:
        c = self.cfg
        mag = c.coupling_q * c.sinc_factor
        if step == EMIT:
            return mag * np.exp(1j * c.phase)
        return -mag * np.exp(-1j * c.phase)

    def _prefactor(self, step: str, k):
        p0, q = self.wp.p0, self.cfg.hbar_qz
        if step == EMIT:
            return 1.0 + (k + self.cfg.p_rec - 0.5 * q) / p0
        return 1.0 + (k - self.cfg.p_rec + 0.5 * q) / p0

    def electron(self, path: tuple[str, ...], k=None) -> np.ndarray:
        """Electron factor of the term reached by applying ``path`` to c0."""
        k = self.k_grid if k is None else np.asarray(k, dtype=float)
        if not path:
            return self.wp.amplitude(k)
        step = path[-1]
        shift = self.cfg.p_rec if step == EMIT else -self.cfg.p_rec
        return (self._step_coefficient(step) * self._prefactor(step, k)
                * self.electron(path[:-1], k + shift))

    def photon_column(self, path: tuple[str, ...]) -> np.ndarray:
        g = np.zeros(self.nu.size, dtype=complex)
        g[: self.photon.fock_coeffs.size] = self.photon.fock_coeffs
        for step in path:
            out = np.zeros_like(g)
            if step == EMIT:
                # |n> -> sqrt(n+1)|n+1>; spontaneous approximation uses sqrt(n)
                n = self.nu[:-1]
                out[1:] = (np.sqrt(n) if self.spontaneous_approx else np.sqrt(n + 1)) * g[:-1]
            else:
                out[:-1] = np.sqrt(self.nu[1:]) * g[1:]
            g = out
        return g

    # -- dense grids ----------------------------------------------------------

    @cached_property
    def c0(self) -> np.ndarray:
        return np.outer(self.electron(()), self.photon_column(()))

    @cached_property
    def c1_emit(self) -> np.ndarray:
        return np.outer(self.electron((EMIT,)), self.photon_column((EMIT,)))

    @cached_property
    def c1_abs(self) -> np.ndarray:
        return np.outer(self.electron((ABSORB,)), self.photon_column((ABSORB,)))

    # -- reductions -----------------------------------------------------------

    def first_order_factors(self, k=None) -> tuple[np.ndarray, np.ndarray]:
        """Electron rows (0, e, a) on ``k`` and the 3x3 photon Gram matrix.

        gram[m, n] = sum_nu conj(g_m) g_n, so that
        sum_nu |c0 + c1|^2 = sum_mn conj(psi_m) psi_n gram[m, n].
        """
        paths = ((), (EMIT,), (ABSORB,))
        psi = np.array([self.electron(p, k) for p in paths])
        g = np.array([self.photon_column(p) for p in paths])
        return psi, np.conj(g) @ g.T

    def norm(self) -> float:
        psi, gram = self.first_order_factors()
        dens = np.real(np.einsum("mk,mn,nk->k", np.conj(psi), gram, psi))
        return float(np.sum(dens) * self.dk)


def scattered_amplitudes(wp: WavepacketState, ph: PhotonState, cfg: InteractionConfig,
                         k_grid=None, spontaneous_approx: bool = False) -> ScatteredState:
    if k_grid is None:
        k_grid = momentum_grid(wp)
    k = np.asarray(k_grid, dtype=float)
    if k.ndim != 1 or k.size < 16 or not np.allclose(np.diff(k), k[1] - k[0], rtol=1e-9, atol=0):
        raise InvalidParameterError("k_grid must be uniform with at least 16 points")
    need = cfg.p_rec + 8.0 * wp.sigma_p0
    if k[0] > -need or k[-1] < need:
        raise InvalidParameterError(
            f"momentum grid [{k[0]:.3g}, {k[-1]:.3g}] misses sideband support +-{need:.3g}"
        )
    if wp.sigma_p0 / (k[1] - k[0]) < 4:
        raise InvalidParameterError("momentum grid too coarse to resolve sigma_p0")
    return ScatteredState(wp, ph, cfg, k, spontaneous_approx)


def _order(path) -> int:
    return len(path)


def energy_transfer_numeric(s: ScatteredState, p0: float | None = None) -> TransferResult:
    """Delta E and its split, by direct summation over the (p, nu) grid.

    The photon-number change is evaluated with the second-order
    norm-restoring amplitude c2 = M^2 c0 / 2 included, so that it is
    complete at O(Ytilde^2), the order at which Delta E^(2) lives.
    """
    k = s.k_grid
    m_eff = s.wp.params.m_eff
    rho0 = np.abs(s.electron(())) ** 2
    # E_p - E_0 with E_0 the initial mean energy on this grid
    energy = k + k**2 / (2.0 * m_eff)
    energy = energy - np.sum(rho0 * energy) / np.sum(rho0)

    paths = [(), (EMIT,), (ABSORB,), *_SECOND_ORDER_PATHS]
    weights = [1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5]
    psi = np.array([w * s.electron(p) for w, p in zip(weights, paths)])
    g = np.array([s.photon_column(p) for p in paths])
    nu_bar = mean_photon_number(s.photon)

    el_energy = (np.conj(psi) * energy) @ psi.T * s.dk
    el_one = np.conj(psi) @ psi.T * s.dk
    ph_one = np.conj(g) @ g.T
    ph_num = (np.conj(g) * (s.nu - nu_bar)) @ g.T

    def collect(el, ph, orders):
        total = 0.0
        for i, pi in enumerate(paths):
            for j, pj in enumerate(paths):
                if (_order(pi), _order(pj)) in orders:
                    total += el[i, j] * ph[i, j]
        return float(np.real(total))

    interference = collect(el_energy, ph_one, {(0, 1), (1, 0)})
    fgr = collect(el_energy, ph_one, {(1, 1)})
    second = collect(el_energy, ph_one, {(0, 2), (2, 0)})
    dnu = collect(el_one, ph_num, {(0, 1), (1, 0), (1, 1), (0, 2), (2, 0)})
    return TransferResult(
        dE_total=interference + fgr,
        dE_interference=interference,
        dE_fgr=fgr,
        dNu=dnu,
        dE_second=second,
    )


@dataclass(frozen=True)
class CoherentRegime:
    """Classical light; ``coupling_y`` defaults to the bridged value."""

    nu0: float
    coupling_y: float | None = None


@dataclass(frozen=True)
class FockRegime:
    nu0: int


def energy_transfer_analytic(wp: WavepacketState, regime, cfg: InteractionConfig) -> TransferResult:
    s = cfg.sinc_factor
    fgr = -(cfg.coupling_q**2) * s**2
    if isinstance(regime, FockRegime):
        interference = 0.0
    elif isinstance(regime, CoherentRegime):
        y = regime.coupling_y
        if y is None:
            y = BRIDGE * cfg.coupling_q * math.sqrt(regime.nu0)
        interference = -4.0 * y * extinction_factor(wp.gamma_decay) * s * math.cos(cfg.phase)
    else:
        raise InvalidParameterError(f"unknown regime {regime!r}")
    total = interference + fgr
    return TransferResult(dE_total=total, dE_interference=interference, dE_fgr=fgr, dNu=-total)


def arc_check(t: TransferResult) -> float:
    """Delta nu + Delta E / hbar omega at the order of ``t.dNu``."""
    return t.dNu + t.dE_total + t.dE_second
