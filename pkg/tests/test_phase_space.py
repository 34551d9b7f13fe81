import math

import numpy as np
import pytest

from qcelectron.electron_wavepacket import ElectronParameters, make_wavepacket
from qcelectron.errors import InvalidParameterError
from qcelectron.perturbation import make_config, scattered_amplitudes
from qcelectron.phase_space import (decohere, marginal_moments, marginals, wigner_from_scattered,
                                    wigner_from_sidebands)
from qcelectron.photon_state import coherent_state, fock_state
from qcelectron.spectra import final_distribution

K = (np.arange(512) - 256) / 64.0
SIG = 0.2


def gauss(c, sig=SIG, k=K, phase=0.0):
    return (2 * np.pi * sig**2) ** -0.25 * np.exp(-((k - c) ** 2) / (4 * sig**2) + 1j * phase)


def gauss_wigner(a, b, k, z, sig=SIG):
    """Analytic cross-Wigner of two real Gaussians centred at a and b."""
    kk, zz = np.meshgrid(k, z, indexing="ij")
    c = 0.5 * (a + b)
    return np.exp(-((kk - c) ** 2) / (2 * sig**2) - 2 * sig**2 * zz**2 + 1j * (a - b) * zz) / np.pi


def scattered(ph, p0=1e11, sigma=0.3, **kw):
    wp = make_wavepacket(ElectronParameters(p0, 0.5), sigma)
    cfg = make_config(**({"detuning": 0.6, "coupling_q": 0.02, "phi0": 0.4} | kw))
    return scattered_amplitudes(wp, ph, cfg, spontaneous_approx=True)


def test_single_gaussian_is_nonnegative_gaussian():
    zero = np.zeros_like(K)
    w = wigner_from_sidebands(K, gauss(0.3), zero, zero)
    assert w.total.min() >= -1e-10
    np.testing.assert_allclose(w.total, gauss_wigner(0.3, 0.3, K, w.z_grid).real, atol=1e-12)
    assert np.sum(w.total) * w.dk * w.dz == pytest.approx(1.0, abs=1e-6)


def test_two_gaussian_cross_term_oracle():
    a, b = -1.5, 1.5
    w = wigner_from_sidebands(K, np.zeros_like(K), gauss(a) / math.sqrt(2), gauss(b) / math.sqrt(2))
    ref = gauss_wigner(a, b, K, w.z_grid) / 2
    np.testing.assert_allclose(w.components[(-1, 1)], ref, atol=1e-12)
    # fringe wavevector along z equals the momentum splitting
    row = w.components[(-1, 1)][np.argmin(np.abs(K))]
    mid = slice(w.z_grid.size // 2 - 20, w.z_grid.size // 2 + 20)
    slope = np.gradient(np.unwrap(np.angle(row[mid])), w.z_grid[mid])
    np.testing.assert_allclose(slope, a - b, atol=1e-9)
    pm, _ = marginals(w)
    np.testing.assert_allclose(pm, 0.5 * (np.abs(gauss(a)) ** 2 + np.abs(gauss(b)) ** 2), atol=1e-6)


def test_minimal_uncertainty_marginals():
    zero = np.zeros_like(K)
    w = wigner_from_sidebands(K, gauss(0.0), zero, zero)
    pm, zm = marginals(w)
    sp = math.sqrt(np.sum(K**2 * pm) * w.dk)
    sz = math.sqrt(np.sum(w.z_grid**2 * zm) * w.dz)
    assert sp * sz == pytest.approx(0.5, abs=1e-6)
    assert np.sum(pm) * w.dk == pytest.approx(1.0, abs=1e-6)
    assert np.sum(zm) * w.dz == pytest.approx(1.0, abs=1e-6)


def test_linearity_on_random_triples():
    rng = np.random.default_rng(3)
    for _ in range(5):
        cs = rng.uniform(-1.5, 1.5, 3)
        amps = rng.normal(size=3) + 1j * rng.normal(size=3)
        rows = [amps[i] * gauss(cs[i], phase=rng.uniform(0, 6)) for i in range(3)]
        norm = np.sum(np.abs(sum(rows)) ** 2) * (K[1] - K[0])
        rows = [r / math.sqrt(norm) for r in rows]
        w = wigner_from_sidebands(K, rows[1], rows[0], rows[2])
        whole = wigner_from_sidebands(K, sum(rows), np.zeros_like(K), np.zeros_like(K))
        np.testing.assert_allclose(w.total, whole.total, atol=1e-10)
        c = w.components
        assembled = c[(0, 0)] + c[(1, 1)] + c[(-1, -1)] + 2 * np.real(c[(-1, 0)] + c[(0, 1)] + c[(-1, 1)])
        np.testing.assert_allclose(assembled, w.total, atol=1e-10)


def test_translation_covariance():
    rows = [gauss(-1.0) * 0.5, gauss(0.0) * math.sqrt(0.5), gauss(1.0) * 0.5]
    rows = [r / math.sqrt(np.sum(np.abs(sum(rows)) ** 2) / 64) for r in rows]
    w = wigner_from_sidebands(K, rows[1], rows[0], rows[2])
    shift = 16
    moved = [np.roll(r, shift) for r in rows]
    w2 = wigner_from_sidebands(K, moved[1], moved[0], moved[2])
    np.testing.assert_allclose(w2.total[shift + 100: 400], w.total[100: 400 - shift], atol=1e-10)


def test_rejections():
    g = gauss(0.0)
    with pytest.raises(InvalidParameterError):
        wigner_from_sidebands(np.r_[K[:-1], 10.0], g, 0 * g, 0 * g)
    with pytest.raises(InvalidParameterError):
        wigner_from_sidebands(K, 2 * g, 0 * g, 0 * g)


def test_scattered_marginal_matches_final_distribution():
    s = scattered(coherent_state(3.0))
    w = wigner_from_scattered(s)
    k = w.k_grid
    fd = final_distribution(scattered_amplitudes(s.wp, s.photon, s.cfg, k_grid=k, spontaneous_approx=True))
    pm, _ = marginals(w)
    np.testing.assert_allclose(pm, fd.density, atol=1e-6)
    assert np.sum(w.total) * w.dk * w.dz == pytest.approx(1.0, abs=1e-6)


def test_decohere_kills_acceleration_and_broadens():
    w = wigner_from_scattered(scattered(coherent_state(3.0), sigma=1.2))
    mean, var = marginal_moments(w)
    assert mean < -1e-3
    d = decohere(w)
    dmean, dvar = marginal_moments(d)
    assert abs(dmean) < 1e-9
    assert dvar >= var
    dd = decohere(d)
    np.testing.assert_array_equal(dd.total, d.total)


def test_fock_grid_is_already_diagonal():
    w = wigner_from_scattered(scattered(fock_state(4)))
    for (m, n), comp in w.components.items():
        if m != n:
            assert not np.any(comp)
    np.testing.assert_allclose(decohere(w).total, w.total, atol=0)
