"""Classical point-particle kick: closed form and adaptive ODE oracle.

The electron charge is absorbed into ``E_c`` (it is the force amplitude in
units of p_rec * omega), so eE_cL/v0 = E_c * L = 4Y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, InvalidParameterError
from .perturbation import InteractionConfig
from .electron_wavepacket import sinc


@dataclass(frozen=True)
class ClassicalKick:
    dp_closed: float
    dp_ode: float
    rel_err: float
    work: float = 0.0
    n_steps: int = 0


def point_kick_closed(cfg: InteractionConfig, E_c: float) -> float:
    return -E_c * cfg.length * float(sinc(0.5 * cfg.detuning)) * math.cos(cfg.phase)


def point_kick_ode(cfg: InteractionConfig, E_c: float, tol: float = 1e-10,
                   m_eff: float = 1e6) -> ClassicalKick:
    """Integrate z' = v0 + (p - p0)/m*, p' = -E_c cos(t - q_z z + phi0) over [0, L].

    A third component accumulates the work -E_c int cos(...) z' dt.  The
    position is carried as u = z - v0 t so the phase t - q_z z keeps full
    precision when q_z = 1.
    """
    if not 1e-12 <= tol <= 1e-6:
        raise InvalidParameterError(f"tol must lie in [1e-12, 1e-6], got {tol}")
    closed = point_kick_closed(cfg, E_c)
    if E_c == 0:
        return ClassicalKick(closed, 0.0, abs(0.0 - closed) / max(abs(closed), 1e-15))

    q, phi = cfg.hbar_qz, cfg.phi0

    def rhs(t, y):
        u, k, _ = y
        force = -E_c * math.cos((1.0 - q) * t - q * u + phi)
        return [k / m_eff, force, force * (1.0 + k / m_eff)]

    sol = solve_ivp(rhs, (0.0, cfg.length), [0.0, 0.0, 0.0], method="DOP853",
                    rtol=tol, atol=tol * abs(E_c) * cfg.length)
    if not sol.success:
        raise IntegrationError(f"step control failed: {sol.message} (t={sol.t[-1]:.6g})")
    dp = float(sol.y[1, -1])
    rel = abs(dp - closed) / max(abs(closed), 1e-15)
    return ClassicalKick(closed, dp, rel, work=float(sol.y[2, -1]), n_steps=int(sol.t.size - 1))
