import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcelectron.electron_wavepacket import (ElectronParameters, extinction_factor, make_wavepacket,
                                            momentum_amplitude, momentum_density,
                                            momentum_from_position, momentum_grid,
                                            position_wavefunction)
from qcelectron.errors import InvalidParameterError

P0 = 1e5


def wp_at(sigma, t=0.0, p0=P0, beta=0.5):
    return make_wavepacket(ElectronParameters(p0, beta), sigma, t)


def test_gamma0_and_mass():
    e = ElectronParameters(1e6, 0.6)
    assert e.gamma0 == pytest.approx(1.25, rel=1e-12)
    assert e.m_eff == pytest.approx(1.5625e6, rel=1e-12)
    with pytest.raises(InvalidParameterError):
        ElectronParameters(1e6, 1.0)
    with pytest.raises(InvalidParameterError):
        ElectronParameters(-1.0, 0.5)


@pytest.mark.parametrize("sigma, expected", [(0.25, 2.0), (0.5, 1.0)])
def test_gamma_decay_static(sigma, expected):
    assert wp_at(sigma).gamma_decay == pytest.approx(expected, rel=1e-12)


def test_gamma_decay_drift():
    base = wp_at(0.5)
    # choose t_D so that xi t_D = sqrt(3)
    t = math.sqrt(3) / base.chirp
    wp = wp_at(0.5, t)
    assert wp.gamma_decay == pytest.approx(2.0, rel=1e-12)
    assert abs(wp.width_complex) <= 0.25
    assert base.width_complex == 0.25


def test_parameter_errors():
    with pytest.raises(InvalidParameterError):
        wp_at(0.0)
    with pytest.raises(InvalidParameterError):
        wp_at(1.0, t=-1.0)
    with pytest.raises(InvalidParameterError):
        wp_at(0.2 * P0)
    with pytest.warns(UserWarning):
        wp_at(0.05 * P0)


def test_amplitude_peak_and_norm():
    wp = wp_at(0.7)
    peak = abs(momentum_amplitude(wp, P0)) ** 2
    assert peak == pytest.approx((2 * math.pi * 0.49) ** -0.5, rel=1e-12)
    k = np.linspace(-7, 7, 4001)
    dens = np.abs(wp.amplitude(k)) ** 2
    assert np.trapezoid(dens, k) == pytest.approx(1.0, abs=1e-9)


def test_drift_changes_phase_not_density():
    a, b = wp_at(0.7), wp_at(0.7, t=3e4)
    k = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(np.abs(a.amplitude(k)), np.abs(b.amplitude(k)), rtol=1e-12)
    assert np.max(np.abs(np.angle(a.amplitude(k) / b.amplitude(k)))) > 1e-3


def test_density_examples():
    wp = wp_at(0.5)
    peak = momentum_density(wp, P0)
    assert momentum_density(wp, P0 + 0.5) == pytest.approx(peak * math.exp(-0.5), rel=1e-12)
    x = np.linspace(0, 3, 7)
    np.testing.assert_array_equal(wp.density(x), wp.density(-x))


@pytest.mark.parametrize("gamma, expected", [(0.0, 1.0), (math.sqrt(2 * math.log(2)), 0.5),
                                             (3.0, 0.011108996538242306)])
def test_extinction_factor(gamma, expected):
    assert extinction_factor(gamma) == pytest.approx(expected, rel=1e-12)


def test_grid_has_integer_cells_per_recoil():
    wp = wp_at(0.3)
    k = momentum_grid(wp)
    cells = 1.0 / (k[1] - k[0])
    assert cells == round(cells)
    assert k[0] <= -(1 + 3.0) and k[-1] >= 1 + 3.0 - (k[1] - k[0])


@settings(max_examples=100, deadline=None)
@given(sigma=st.floats(0.05, 20.0), p0=st.floats(1e5, 1e9))
def test_density_quadrature(sigma, p0):
    wp = wp_at(sigma, p0=p0)
    k = np.linspace(-10 * sigma, 10 * sigma, 4001)
    rho = wp.density(k)
    assert np.trapezoid(rho, k) == pytest.approx(1.0, abs=1e-9)
    assert abs(np.trapezoid(k * rho, k)) < 1e-9 * max(1.0, sigma)
    assert wp.gamma0_decay * sigma == pytest.approx(0.5, abs=1e-16)


@settings(max_examples=30, deadline=None)
@given(sigma=st.floats(0.1, 5.0), t1=st.floats(0, 1e6), t2=st.floats(0, 1e6))
def test_gamma_monotone_in_drift(sigma, t1, t2):
    lo, hi = sorted((t1, t2))
    assert wp_at(sigma, lo).gamma_decay <= wp_at(sigma, hi).gamma_decay


def _zgrid(width, n=2048, cover=12):
    dz = 2 * cover * width / n
    return (np.arange(n) - n // 2) * dz


def test_position_wavefunction_parseval_and_width():
    wp = wp_at(0.5)
    z = _zgrid(wp.gamma_decay)
    psi = position_wavefunction(wp, z)
    dz = z[1] - z[0]
    assert np.sum(np.abs(psi) ** 2) * dz == pytest.approx(1.0, abs=1e-6)
    rho = np.abs(psi) ** 2 * dz
    width = math.sqrt(np.sum(z**2 * rho))
    assert width == pytest.approx(1.0 / (2 * 0.5), abs=1e-6)
    # real envelope up to a global phase
    ph = psi / psi[z.size // 2]
    assert np.max(np.abs(np.imag(ph[np.abs(psi) > 1e-8]))) < 1e-10


def test_position_round_trip_with_chirp():
    wp0 = wp_at(0.5)
    wp = wp_at(0.5, t=1.0 / wp0.chirp)
    z = _zgrid(wp.gamma_decay, n=4096)
    psi = position_wavefunction(wp, z)
    k, c = momentum_from_position(psi, z)
    assert np.max(np.abs(c - wp.amplitude(k))) < 1e-8


def test_position_grid_rejections():
    wp = wp_at(0.5)
    with pytest.raises(InvalidParameterError):
        position_wavefunction(wp, np.linspace(-10, 10, 64))
    with pytest.raises(InvalidParameterError):
        position_wavefunction(wp, np.linspace(0, 20, 4096))
    with pytest.raises(InvalidParameterError):
        position_wavefunction(wp, np.array([0.0, 1.0, 3.0]))


def test_no_warning_for_small_ratio():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        wp_at(1.0)
