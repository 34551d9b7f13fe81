"""Chirped Gaussian electron wavepacket in reduced units.

Reduced units: hbar = omega = 1, momenta in units of the recoil
hbar*omega/v0, so v0 = 1, lengths in v0/omega and times in 1/omega.
Momentum arguments are *offsets* k = p - p0; p0 itself is typically
1e6..1e12 and carrying it through arithmetic would destroy precision.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ElectronParameters:
    """Central momentum ``p0`` and velocity ``beta``; gamma and m* are derived."""

    p0: float
    beta: float
    gamma0: float = field(init=False)
    m_eff: float = field(init=False)

    def __post_init__(self):
        if not self.p0 > 0:
            raise InvalidParameterError(f"p0 must be positive, got {self.p0}")
        if not 0.0 < self.beta < 1.0:
            raise InvalidParameterError(f"beta must lie in (0, 1), got {self.beta}")
        gamma0 = 1.0 / math.sqrt(1.0 - self.beta**2)
        object.__setattr__(self, "gamma0", gamma0)
        # m* = gamma^3 m and p0 = gamma m v0 with v0 = 1  =>  m* = gamma^2 p0
        object.__setattr__(self, "m_eff", gamma0**2 * self.p0)

    @property
    def energy(self) -> float:
        """Total energy gamma m c^2 = p0 / beta^2 in units of hbar*omega."""
        return self.p0 / self.beta**2


@dataclass(frozen=True)
class WavepacketState:
    params: ElectronParameters
    sigma_p0: float
    t_drift: float
    chirp: float
    width_complex: complex
    drift_length: float
    gamma_decay: float
    global_phase: float

    @property
    def p0(self) -> float:
        return self.params.p0

    @property
    def gamma0_decay(self) -> float:
        """Undrifted decay parameter 1 / (2 sigma_p0)."""
        return 0.5 / self.sigma_p0

    def amplitude(self, k):
        """Momentum amplitude c_p at offsets ``k = p - p0``."""
        k = np.asarray(k, dtype=float)
        norm = (TWO_PI * self.sigma_p0**2) ** -0.25
        return norm * np.exp(-(k**2) / (4.0 * self.width_complex) + 1j * self.global_phase)

    def density(self, k):
        k = np.asarray(k, dtype=float)
        s2 = self.sigma_p0**2
        return np.exp(-(k**2) / (2.0 * s2)) / math.sqrt(TWO_PI * s2)


def make_wavepacket(params: ElectronParameters, sigma_p0: float, t_drift: float = 0.0) -> WavepacketState:
    if not sigma_p0 > 0:
        raise InvalidParameterError(f"sigma_p0 must be positive, got {sigma_p0}")
    if t_drift < 0:
        raise InvalidParameterError(f"t_drift must be non-negative, got {t_drift}")
    ratio = sigma_p0 / params.p0
    if ratio > 0.1:
        raise InvalidParameterError(
            f"sigma_p0/p0 = {ratio:.3g} > 0.1: the paraxial (sigma << p0) expansion does not hold"
        )
    if ratio > 1e-2:
        warnings.warn(f"sigma_p0/p0 = {ratio:.3g} is not small; expansion accuracy degraded", stacklevel=2)

    chirp = 2.0 * sigma_p0**2 / params.m_eff
    xt = chirp * t_drift
    width = sigma_p0**2 if t_drift == 0 else sigma_p0**2 / (1.0 + 1j * xt)
    gamma = (0.5 / sigma_p0) * math.sqrt(1.0 + xt * xt)
    # p0*L_D - E0*t_D with L_D = t_D; reduced mod 2pi before exponentiation
    phase = math.fmod(params.p0 * t_drift * (1.0 - 1.0 / params.beta**2), TWO_PI)
    return WavepacketState(
        params=params,
        sigma_p0=float(sigma_p0),
        t_drift=float(t_drift),
        chirp=chirp,
        width_complex=complex(width),
        drift_length=float(t_drift),
        gamma_decay=gamma,
        global_phase=phase,
    )


def momentum_amplitude(wp: WavepacketState, p):
    """c_p^(0) at absolute momentum ``p``.  Prefer ``wp.amplitude(k)`` for large p0."""
    return wp.amplitude(np.asarray(p, dtype=float) - wp.p0)


def momentum_density(wp: WavepacketState, p):
    return wp.density(np.asarray(p, dtype=float) - wp.p0)


def extinction_factor(gamma_decay: float) -> float:
    if gamma_decay < 0:
        raise InvalidParameterError("gamma_decay must be non-negative")
    return math.exp(-0.5 * gamma_decay**2)


def sinc(x):
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x, dtype=float) / math.pi)


def momentum_grid(wp: WavepacketState, n_points: int = 4096, span_sigmas: float = 10.0,
                  sideband_margin: float = 1.0) -> np.ndarray:
    """Uniform offset grid covering p0 +- (sideband_margin + span_sigmas*sigma).

    When possible the spacing is 1/M for integer M so that one recoil is an
    exact number of cells.
    """
    if n_points < 16:
        raise InvalidParameterError("n_points must be at least 16")
    half = sideband_margin + span_sigmas * wp.sigma_p0
    cells_per_recoil = math.floor(n_points / (2.0 * half))
    dk = 1.0 / cells_per_recoil if cells_per_recoil >= 1 else 2.0 * half / n_points
    return (np.arange(n_points) - n_points // 2) * dk


def _check_uniform(grid: np.ndarray, name: str) -> float:
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidParameterError(f"{name} must be a 1D grid with at least two points")
    d = np.diff(grid)
    step = d[0]
    if step <= 0 or not np.allclose(d, step, rtol=1e-9, atol=0.0):
        raise InvalidParameterError(f"{name} must be uniform and increasing")
    return float(step)


def matched_momentum_grid(z_grid) -> np.ndarray:
    z = np.asarray(z_grid, dtype=float)
    dz = _check_uniform(z, "z_grid")
    n = z.size
    dk = TWO_PI / (n * dz)
    return (np.arange(n) - n // 2) * dk


def position_wavefunction(wp: WavepacketState, z_grid) -> np.ndarray:
    """Envelope psi(z) = (2 pi)^-1/2 int c(p0+k) e^{ikz} dk on a uniform z grid.

    The fast carrier e^{i p0 z} is factored out.  The momentum grid is the
    one conjugate to ``z_grid`` (see :func:`matched_momentum_grid`).
    """
    z = np.asarray(z_grid, dtype=float)
    dz = _check_uniform(z, "z_grid")
    n = z.size
    width = wp.gamma_decay
    if width / dz < 16:
        raise InvalidParameterError(
            f"z grid too coarse: {width / dz:.1f} points per spatial width, need >= 16"
        )
    center = 0.5 * (z[0] + z[-1])
    if min(center - z[0], z[-1] - center) < 8 * width or abs(center) > dz:
        raise InvalidParameterError("z grid must be centred and cover at least +-8 spatial widths")
    k = matched_momentum_grid(z)
    dk = k[1] - k[0]
    if k[-1] < 8 * wp.sigma_p0 * math.sqrt(1 + (wp.chirp * wp.t_drift) ** 2):
        raise InvalidParameterError("z grid spacing too coarse to represent the momentum spread")
    return _to_position(wp.amplitude(k), k, z)


def _to_position(c, k, z):
    n = z.size
    dk = k[1] - k[0]
    m = np.arange(n)
    # k_j z_m = k_j z_0 + 2 pi (j - n//2) m / n
    weighted = c * np.exp(1j * k * z[0])
    carrier = np.exp(-2j * math.pi * (n // 2) * m / n)
    return (dk / math.sqrt(TWO_PI)) * carrier * (np.fft.ifft(weighted) * n)


def momentum_from_position(psi, z_grid) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`position_wavefunction`: returns (k grid, c(k))."""
    z = np.asarray(z_grid, dtype=float)
    dz = _check_uniform(z, "z_grid")
    k = matched_momentum_grid(z)
    m = np.arange(z.size)
    n = z.size
    spectrum = np.fft.fft(np.asarray(psi) * np.exp(2j * math.pi * (n // 2) * m / n))
    c = (dz / math.sqrt(TWO_PI)) * spectrum * np.exp(-1j * k * z[0])
    return k, c
