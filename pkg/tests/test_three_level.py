import math

import numpy as np
import pytest

from rfctap.errors import DomainError, ExtractionError, StabilityError
from rfctap.three_level import (Couplings, OnSiteEnergies, dark_state,
                                hamiltonian, integrate, mixing_angle,
                                raised_cosine_pulses, tunneling_extract)
from rfctap.units import HBAR, MASS_RB87


def test_hamiltonian_zero():
    h = hamiltonian(Couplings(0.0, 0.0))
    assert np.all(h == 0.0)


def test_hamiltonian_eigenvalues_against_dense_solver():
    j = 2.0 * math.pi * 37.0
    h = hamiltonian(Couplings(j, j))
    vals = np.linalg.eigvalsh(h)
    np.testing.assert_allclose(
        vals, [-HBAR * j * math.sqrt(2), 0.0, HBAR * j * math.sqrt(2)],
        atol=1e-12 * HBAR * j)


def test_hamiltonian_eigenvalues_random_couplings():
    rng = np.random.default_rng(11)
    for _ in range(50):
        jlm, jmr = rng.uniform(0.1, 5.0, size=2)
        vals = np.linalg.eigvalsh(hamiltonian(Couplings(jlm, jmr)))
        lam = HBAR * math.hypot(jlm, jmr)
        np.testing.assert_allclose(vals, [-lam, 0.0, lam], atol=1e-12 * lam)


def test_hamiltonian_interacting_diagonal_placement():
    # diagonal carries (w_L + mu_L/hbar, w_M, w_R + mu_R/hbar) as given
    e = OnSiteEnergies(eps_L=10.0, eps_M=7.0, eps_R=4.0)
    h = hamiltonian(Couplings(1.0, 2.0), e)
    np.testing.assert_allclose(np.diag(h), HBAR * np.array([10.0, 7.0, 4.0]))
    assert h[0, 1] == h[1, 0] == -HBAR * 1.0
    assert h[1, 2] == h[2, 1] == -HBAR * 2.0
    assert h[0, 2] == 0.0


def test_mixing_angle_limits():
    assert mixing_angle(Couplings(0.0, 1.0)) == 0.0
    assert mixing_angle(Couplings(1.0, 0.0)) == pytest.approx(math.pi / 2)
    assert mixing_angle(Couplings(3.0, 3.0)) == pytest.approx(math.pi / 4)
    with pytest.raises(DomainError):
        mixing_angle(Couplings(0.0, 0.0))


def test_dark_state_forms():
    np.testing.assert_allclose(dark_state(Couplings(0.0, 2.0)), [1, 0, 0],
                               atol=1e-15)
    np.testing.assert_allclose(
        dark_state(Couplings(5.0, 5.0)),
        [1 / math.sqrt(2), 0.0, -1 / math.sqrt(2)], atol=1e-15)


def test_dark_state_annihilated_by_random_hamiltonians():
    # 1e4 random coupling pairs: ||H d|| < 1e-12 (in units of hbar*|J|)
    rng = np.random.default_rng(2024)
    pairs = rng.uniform(1e-3, 1e3, size=(10000, 2))
    worst = 0.0
    for jlm, jmr in pairs:
        h = hamiltonian(Couplings(jlm, jmr))
        d = dark_state(Couplings(jlm, jmr))
        worst = max(worst, np.linalg.norm(h @ d) / (HBAR * math.hypot(jlm, jmr)))
    assert worst < 1e-12


def test_interacting_resonance_recovers_dark_state():
    # with hbar w_L + mu_L = hbar w_M = hbar w_R + mu_R the spectrum keeps
    # an eigenstate at the common level with zero middle amplitude
    e = OnSiteEnergies(eps_L=6.0, eps_M=6.0, eps_R=6.0)
    c = Couplings(1.3, 0.7)
    h = hamiltonian(c, e)
    d = dark_state(c)
    np.testing.assert_allclose(h @ d, HBAR * 6.0 * d, atol=1e-18)
    assert abs(d[1]) == 0.0


def test_integrate_constant_zero_hamiltonian():
    c = lambda t: Couplings(0.0, 0.0)
    e = lambda t: OnSiteEnergies()
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    times, pops, final = integrate(c, e, psi0, total_T=1.0, dt=1e-3)
    np.testing.assert_allclose(final, psi0, atol=1e-14)
    np.testing.assert_allclose(pops[-1], [1, 0, 0], atol=1e-14)


def test_integrate_norm_conservation():
    T = 1.0
    jlm, jmr = raised_cosine_pulses(peak=50.0, total_T=T, delay=0.1 * T)
    c = lambda t: Couplings(jlm(t), jmr(t))
    e = lambda t: OnSiteEnergies()
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    _, pops, final = integrate(c, e, psi0, total_T=T, dt=5e-4)
    assert abs(np.vdot(final, final).real - 1.0) < 1e-9


def test_counter_intuitive_transfer_at_pinned_parameters():
    # peak J*T = 50, delay 0.1 T
    T = 1.0
    jlm, jmr = raised_cosine_pulses(peak=50.0 / T, total_T=T, delay=0.1 * T)
    c = lambda t: Couplings(jlm(t), jmr(t))
    e = lambda t: OnSiteEnergies()
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    _, pops, final = integrate(c, e, psi0, total_T=T, dt=2e-4, n_samples=2001)
    assert abs(final[2]) ** 2 > 0.999


def test_intuitive_ordering_oscillates_with_T():
    results = []
    for T in (0.95, 1.0, 1.05):
        jlm, jmr = raised_cosine_pulses(peak=50.0, total_T=T, delay=0.1 * T,
                                        intuitive=True)
        c = lambda t: Couplings(jlm(t), jmr(t))
        e = lambda t: OnSiteEnergies()
        psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
        _, _, final = integrate(c, e, psi0, total_T=T, dt=2e-4)
        results.append(abs(final[2]) ** 2)
    spread = max(results) - min(results)
    assert spread > 0.1  # Rabi-oscillation sensitivity to T


def test_integrate_stability_guard():
    c = lambda t: Couplings(1e4, 1e4)
    e = lambda t: OnSiteEnergies()
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    with pytest.raises(StabilityError):
        integrate(c, e, psi0, total_T=1.0, dt=1e-3)


def test_self_consistent_variant_runs_and_reduces():
    T = 1.0
    jlm, jmr = raised_cosine_pulses(peak=50.0, total_T=T, delay=0.1 * T)
    c = lambda t: Couplings(jlm(t), jmr(t))
    e = lambda t: OnSiteEnergies()
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    _, _, base = integrate(c, e, psi0, total_T=T, dt=5e-4)
    _, _, zero_u = integrate(c, e, psi0, total_T=T, dt=5e-4,
                             self_consistent_u=(0.0, 0.0, 0.0))
    np.testing.assert_allclose(zero_u, base, atol=1e-12)
    _, _, with_u = integrate(c, e, psi0, total_T=T, dt=5e-4,
                             self_consistent_u=(8.0, 0.0, 8.0))
    assert abs(with_u[2]) ** 2 < abs(base[2]) ** 2  # feedback detunes transfer


# ------------------------------------------------- tunneling extraction


def _double_well(n, L, depth_scale=1.0):
    # quartic symmetric double well on [-L/2, L/2]
    x = np.linspace(-L / 2, L / 2, n)
    a = 2.0e-6
    v0 = depth_scale * 2.0e-30
    v = v0 * ((x / a) ** 2 - 1.0) ** 2
    return x, v


def test_tunneling_extract_grid_refinement():
    x1, v1 = _double_well(1500, 8e-6)
    x2, v2 = _double_well(3000, 8e-6)
    j1 = tunneling_extract(v1, x1[1] - x1[0], MASS_RB87)
    j2 = tunneling_extract(v2, x2[1] - x2[0], MASS_RB87)
    assert abs(j1 - j2) / j2 < 0.01


def test_tunneling_extract_vanishes_with_separation():
    # widen the well separation at fixed barrier: splitting collapses
    x = np.linspace(-8e-6, 8e-6, 3000)
    a = 1.5e-6
    v0 = 2.0e-30
    js = []
    for sep in (1.0, 1.6):
        v = v0 * ((x / (sep * a)) ** 2 - 1.0) ** 2
        js.append(tunneling_extract(v, x[1] - x[0], MASS_RB87))
    assert js[1] < 0.2 * js[0]


def test_tunneling_extract_band_separation_guard():
    # a barrier far below the doublet spacing: not a resolved doublet
    x = np.linspace(-6e-6, 6e-6, 2000)
    v = 0.5 * MASS_RB87 * (2 * math.pi * 500.0) ** 2 * x**2  # single well
    with pytest.raises(ExtractionError):
        tunneling_extract(v, x[1] - x[0], MASS_RB87)
