"""Weak value of the mode vector potential and the electron pointer shift.

Single-mode operators in the interaction picture, with the injection phase
carried by the mode phase Phi = t - q_z z + phi0:

    E = Et (a e^{-i Phi} + a^dag e^{i Phi}),
    A = i Et (a^dag e^{i Phi} - a e^{-i Phi}),      E = -dA/dt.

For a real coherent amplitude alpha this gives <E> = E_c cos(Phi) with
E_c = 2 Et alpha.  The phase-free convention of :class:`PhotonMode` is the
special case phi0 = -pi/2, where the field phase moves into alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .electron_wavepacket import WavepacketState
from .errors import UndefinedWeakValueError
from .perturbation import InteractionConfig
from .photon_state import PhotonMode, PhotonState, matrix_elements

OVERLAP_FLOOR = 1e-12


@dataclass(frozen=True)
class WeakValueResult:
    """Weak-measurement readout in reduced units.

    ``pointer_shift_p`` is the impulse -Re int E_w dt delivered along the
    trajectory z = t.  ``chain_shift_p`` = -Re <A_w>_t is the literal
    time-averaged vector potential readout, kept for comparison.
    """

    a_weak: complex
    a_weak_time_avg: complex
    postselection_prob_amp: complex
    pointer_shift_z: float
    pointer_shift_p: float
    chain_shift_p: float
    t_samples: np.ndarray
    a_weak_samples: np.ndarray

    @property
    def postselection_prob(self) -> float:
        return abs(self.postselection_prob_amp) ** 2


def _weak_ladder(pre: PhotonState, post: PhotonState) -> tuple[complex, complex, complex]:
    ov, ann, cre = matrix_elements(pre, post)
    if abs(ov) <= OVERLAP_FLOOR:
        raise UndefinedWeakValueError(
            f"|<post|pre>| = {abs(ov):.3e} <= {OVERLAP_FLOOR:g}: weak value undefined"
        )
    return ov, ann / ov, cre / ov


def _phase(mode: PhotonMode, t, z, phi0: float):
    t = np.asarray(t, dtype=float)
    z = t if z is None else np.asarray(z, dtype=float)
    return t - mode.q_z * z + phi0


def vector_potential_weak_value(pre: PhotonState, post: PhotonState, mode: PhotonMode,
                                t, z=None, phi0: float = 0.0):
    """<post|A|pre> / <post|pre> at time(s) ``t``; ``z`` defaults to v0 t."""
    _, wa, wc = _weak_ladder(pre, post)
    ph = _phase(mode, t, z, phi0)
    val = 1j * mode.single_photon_field * (wc * np.exp(1j * ph) - wa * np.exp(-1j * ph))
    return complex(val) if np.ndim(val) == 0 else val


def field_weak_value(pre: PhotonState, post: PhotonState, mode: PhotonMode,
                     t, z=None, phi0: float = 0.0):
    """<post|E|pre> / <post|pre>."""
    _, wa, wc = _weak_ladder(pre, post)
    ph = _phase(mode, t, z, phi0)
    val = mode.single_photon_field * (wa * np.exp(-1j * ph) + wc * np.exp(1j * ph))
    return complex(val) if np.ndim(val) == 0 else val


def _nodes(cfg: InteractionConfig, n_nodes: int | None):
    # phase advances by theta over the window; a few nodes per radian suffice
    n = n_nodes or int(32 + 4 * math.ceil(abs(cfg.detuning)))
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * cfg.length
    return half * (x + 1.0), half * w


def pointer_shift(wp: WavepacketState, pre: PhotonState, post: PhotonState, mode: PhotonMode,
                  cfg: InteractionConfig, n_nodes: int | None = None) -> WeakValueResult:
    """Pointer readout over t in [0, L] along z = t, with q_z taken from ``cfg``."""
    ov, _, _ = _weak_ladder(pre, post)
    local = PhotonMode(mode.eff_volume, q_z=cfg.hbar_qz)
    t, w = _nodes(cfg, n_nodes)
    a_w = vector_potential_weak_value(pre, post, local, t, phi0=cfg.phi0)
    e_w = field_weak_value(pre, post, local, t, phi0=cfg.phi0)
    a_int = complex(np.sum(w * a_w))
    impulse = -float(np.real(np.sum(w * e_w)))
    a_avg = a_int / cfg.length
    # gamma0 m = p0 / v0 in reduced units
    dz = -float(np.real(a_int)) / wp.p0
    return WeakValueResult(
        a_weak=vector_potential_weak_value(pre, post, local, 0.0, phi0=cfg.phi0),
        a_weak_time_avg=a_avg,
        postselection_prob_amp=ov,
        pointer_shift_z=dz,
        pointer_shift_p=impulse,
        chain_shift_p=-float(np.real(a_avg)),
        t_samples=t,
        a_weak_samples=a_w,
    )


def equivalent_field(pre: PhotonState, mode: PhotonMode) -> float:
    """Classical amplitude E_c = 2 Et |<a>| of the diagonal selection on ``pre``."""
    _, wa, _ = _weak_ladder(pre, pre)
    return 2.0 * mode.single_photon_field * abs(wa)
