"""Photon-added coherent states |alpha, nu> in a truncated Fock basis."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import InvalidParameterError

TAIL_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PhotonState:
    alpha: complex
    nu_added: int
    fock_coeffs: np.ndarray
    n_max: int

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.fock_coeffs.size)

    @property
    def is_fock(self) -> bool:
        return self.alpha == 0

    @property
    def is_coherent(self) -> bool:
        return self.nu_added == 0


@dataclass(frozen=True)
class PhotonMode:
    """Single slow-wave mode; ``eff_volume`` is the eps_eff*V lump.

    The field per photon follows from box quantization,
    E_q = sqrt(hbar*omega / (2 eps_eff V)) with hbar = omega = 1.
    """

    eff_volume: float
    q_z: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if not self.eff_volume > 0:
            raise InvalidParameterError("eff_volume must be positive")
        if self.omega != 1.0:
            raise InvalidParameterError("omega is the unit of frequency and must equal 1")

    @property
    def single_photon_field(self) -> float:
        return math.sqrt(self.omega / (2.0 * self.eff_volume))

    @classmethod
    def from_single_photon_field(cls, field: float, q_z: float = 1.0) -> "PhotonMode":
        if not field > 0:
            raise InvalidParameterError("single_photon_field must be positive")
        return cls(eff_volume=1.0 / (2.0 * field**2), q_z=q_z)

    def field_expectation(self, state: PhotonState, t, z):
        """<E> for the phase-free mode operator i E_q (a e^{i(qz - t)} - h.c.)."""
        a = expectation_annihilation(state)
        phase = np.exp(1j * (self.q_z * np.asarray(z) - np.asarray(t)))
        return np.real(1j * self.single_photon_field * (a * phase - np.conj(a * phase)))


def laguerre(nu: int, x):
    """Laguerre polynomial L_nu(x) by the three-term recurrence."""
    if int(nu) != nu or nu < 0:
        raise InvalidParameterError(f"Laguerre order must be a non-negative integer, got {nu}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if nu == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, int(nu)):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def log_laguerre_neg(nu: int, x: float) -> float:
    """log L_nu(-x) for x >= 0, rescaled to survive nu ~ 1e3, x ~ 1e3."""
    if x < 0:
        raise InvalidParameterError("log_laguerre_neg needs x >= 0")
    prev, cur, log_scale = 1.0, 1.0 + x, 0.0
    if nu == 0:
        return 0.0
    for k in range(1, int(nu)):
        prev, cur = cur, ((2 * k + 1 + x) * cur - k * prev) / (k + 1)
        if cur > 1e250:
            prev /= cur
            log_scale += math.log(cur)
            cur = 1.0
    return log_scale + math.log(cur)


def recommended_n_max(alpha: complex, nu: int) -> int:
    return int(math.ceil(nu + 10 * (1 + abs(alpha) ** 2)))


def make_photon_state(alpha: complex, nu: int = 0, n_max: int | None = None) -> PhotonState:
    if int(nu) != nu or nu < 0:
        raise InvalidParameterError(f"photon-addition order must be a non-negative integer, got {nu}")
    nu = int(nu)
    alpha = complex(alpha)
    if n_max is None:
        n_max = recommended_n_max(alpha, nu)
    n_max = int(n_max)
    if n_max < nu:
        raise InvalidParameterError(f"n_max={n_max} is below the addition order {nu}")

    coeffs = np.zeros(n_max + 1, dtype=complex)
    if alpha == 0:
        coeffs[nu] = 1.0
        return _frozen(alpha, nu, coeffs, n_max)

    m = np.arange(nu, n_max + 1)
    n = m - nu
    r2 = abs(alpha) ** 2
    log_mod = -0.5 * r2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    # a^dag^nu |n> = sqrt((n+nu)!/n!) |n+nu>
    log_mod += 0.5 * (gammaln(m + 1) - gammaln(n + 1))
    log_norm = math.lgamma(nu + 1) + log_laguerre_neg(nu, r2)

    log_w = 2 * log_mod
    log_direct = float(logsumexp(log_w))
    # tail beyond n_max bounded by a geometric series in the last weight ratio
    ratio = math.exp(log_w[-1] - log_w[-2]) if log_w.size > 1 else 0.0
    tail = math.inf if ratio >= 1 else math.exp(log_w[-1] - log_direct) * ratio / (1 - ratio)
    if tail > TAIL_TOLERANCE:
        raise InvalidParameterError(
            f"truncation tail mass {tail:.2e} exceeds {TAIL_TOLERANCE:g}; "
            f"use n_max >= {recommended_n_max(alpha, nu)}"
        )
    # closed-form norm nu! L_nu(-|alpha|^2) must agree with the direct Fock sum
    if abs(math.expm1(log_direct - log_norm)) > 1e-8:
        raise RuntimeError("Laguerre normalization disagrees with the truncated Fock sum")

    coeffs[nu:] = np.exp(log_mod - 0.5 * log_direct + 1j * n * np.angle(alpha))
    return _frozen(alpha, nu, coeffs, n_max)


def _frozen(alpha, nu, coeffs, n_max):
    coeffs.setflags(write=False)
    return PhotonState(alpha=alpha, nu_added=nu, fock_coeffs=coeffs, n_max=n_max)


def fock_state(nu: int) -> PhotonState:
    return make_photon_state(0.0, nu)


def coherent_state(alpha: complex, n_max: int | None = None) -> PhotonState:
    return make_photon_state(alpha, 0, n_max)


def _padded(a: np.ndarray, size: int) -> np.ndarray:
    if a.size >= size:
        return a
    return np.concatenate([a, np.zeros(size - a.size, dtype=a.dtype)])


def expectation_annihilation(state: PhotonState) -> complex:
    c = state.fock_coeffs
    return complex(np.sum(np.conj(c[:-1]) * np.sqrt(np.arange(1, c.size)) * c[1:]))


def mean_photon_number(state: PhotonState) -> float:
    c = state.fock_coeffs
    return float(np.sum(np.arange(c.size) * np.abs(c) ** 2))


def overlap(a: PhotonState, b: PhotonState) -> complex:
    """<b|a>."""
    size = max(a.fock_coeffs.size, b.fock_coeffs.size)
    return complex(np.sum(np.conj(_padded(b.fock_coeffs, size)) * _padded(a.fock_coeffs, size)))


def matrix_elements(pre: PhotonState, post: PhotonState) -> tuple[complex, complex, complex]:
    """(<post|pre>, <post|a|pre>, <post|a^dag|pre>)."""
    size = max(pre.fock_coeffs.size, post.fock_coeffs.size) + 1
    a = _padded(pre.fock_coeffs, size)
    b = np.conj(_padded(post.fock_coeffs, size))
    root = np.sqrt(np.arange(1, size))
    ov = np.sum(b * a)
    ann = np.sum(b[:-1] * root * a[1:])
    cre = np.sum(b[1:] * root * a[:-1])
    return complex(ov), complex(ann), complex(cre)


def coherent_amplitude_from_field(E_c: float, phi0: float, mode: PhotonMode) -> complex:
    """Coherent amplitude reproducing E_c cos(omega t - q_z z + phi0) in ``mode``."""
    if E_c < 0:
        raise InvalidParameterError("E_c must be non-negative")
    return math.sqrt(mode.eff_volume / (2.0 * mode.omega)) * E_c * np.exp(-1j * (phi0 + math.pi / 2))
