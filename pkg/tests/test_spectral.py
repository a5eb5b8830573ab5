import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from vscrate import spectral as sp
from vscrate.units import wavenumber_to_au
from vscrate.vibsolver import DiabaticBasis

W0 = 1189.678


def cav(**kw):
    kw.setdefault("omega_c", W0)
    return sp.CavitySpec(**kw)


# ---------------------------------------------------------------- cavity basics

def test_linewidth_and_quality_factor():
    c = sp.CavitySpec(omega_c=1200.0, tau_c=100.0)
    assert c.linewidth == pytest.approx(53.09, abs=0.01)
    assert c.quality_factor == pytest.approx(22.6, abs=0.05)


@pytest.mark.parametrize("kw", [dict(omega_c=-5.0), dict(tau_c=0.0), dict(lambda_c=-1.0),
                                dict(theta_max=math.pi / 2), dict(refractive_index=0.0)])
def test_cavity_validation(kw):
    with pytest.raises(ValueError):
        sp.CavitySpec(**kw)


def test_dispersion():
    c = cav()
    assert sp.dispersion(0.0, c) == pytest.approx(W0)
    assert sp.dispersion(math.pi / 3, c) == pytest.approx(2 * W0)
    with pytest.raises(ValueError):
        sp.dispersion(math.pi / 2, c)


def test_dos_omega_normalized():
    c = cav(theta_max=math.radians(80.0))
    wm = c.omega_c / math.cos(c.theta_max)
    # integrable 1/sqrt(w - wc) edge handled by the algebraic weight
    f = lambda w: w / (c.k_parallel_max * math.sqrt(w + c.omega_c))
    val, _ = integrate.quad(f, c.omega_c, wm, weight="alg", wvar=(-0.5, 0.0))
    assert val == pytest.approx(1.0, rel=1e-10)
    inside = np.linspace(c.omega_c * 1.01, wm * 0.99, 5)
    ref = inside / (c.k_parallel_max * np.sqrt(inside**2 - c.omega_c**2))
    assert np.allclose(sp.dos_omega(inside, c), ref)
    assert sp.dos_omega(0.5 * c.omega_c, c) == 0.0
    assert sp.dos_omega(1.01 * wm, c) == 0.0


def test_dos_theta_singular_at_normal_incidence():
    c = cav()
    with pytest.raises(sp.SingularPointError):
        sp.dos_theta(0.0, c)
    assert sp.dos_theta(0.1, c) > sp.dos_theta(0.2, c) > 0


# ---------------------------------------------------------------- baths

def test_j_loss_is_ohmic():
    assert sp.j_loss(2000.0, 100.0) == pytest.approx(2 * sp.j_loss(1000.0, 100.0))
    assert sp.j_loss(1000.0, 50.0) == pytest.approx(2 * sp.j_loss(1000.0, 100.0))
    with pytest.raises(ValueError):
        sp.j_loss(-1.0, 100.0)


def test_j_nu_drude_lorentz_peak():
    bath = sp.PhononBathSpec(reorg_lambda=3.0, char_gamma=200.0)
    w = np.linspace(1, 2000, 4001)
    assert w[np.argmax(sp.j_nu(w, bath))] == pytest.approx(200.0, abs=0.5)
    assert sp.j_nu(200.0, bath) == pytest.approx(3.0)


def test_from_friction_units():
    b = sp.PhononBathSpec.from_friction(0.1, 1000.0, 1.0, 200.0)
    lam_au = 0.1 * wavenumber_to_au(1000.0) * wavenumber_to_au(200.0) / 2
    assert wavenumber_to_au(b.reorg_lambda) == pytest.approx(lam_au)
    assert b.cutoff == 4000.0


# ---------------------------------------------------------------- closed form

def test_closed_form_zero_at_zero_and_nonnegative():
    c = cav()
    assert sp.j_eff_closed(0.0, c) == 0.0
    w = np.linspace(0, 5 * W0, 1001)
    assert np.all(sp.j_eff_closed(w, c) >= 0)


@given(st.floats(10.0, 1e5), st.floats(300.0, 3000.0))
@settings(max_examples=50, deadline=None)
def test_closed_form_argmax_within_linewidth(tau, w0):
    # as a function of omega_c at fixed transition frequency
    wc = np.linspace(0.3 * w0, 3 * w0, 20001)
    vals = [sp.j_eff_closed(w0, sp.CavitySpec(omega_c=x, tau_c=tau)) for x in wc[::50]]
    best = wc[::50][int(np.argmax(vals))]
    fine = np.linspace(best - 2 * (wc[50] - wc[0]), best + 2 * (wc[50] - wc[0]), 401)
    vals = [sp.j_eff_closed(w0, sp.CavitySpec(omega_c=x, tau_c=tau)) for x in fine]
    best = fine[int(np.argmax(vals))]
    gamma = sp.CavitySpec(tau_c=tau).linewidth
    assert abs(best - w0) <= gamma + (fine[1] - fine[0])


# ---------------------------------------------------------------- angular form

def test_angular_matches_closed_at_resonance():
    c = cav(theta_max=math.radians(89.99))
    assert sp.j_eff_angular(W0, c) == pytest.approx(sp.j_eff_closed(W0, c), rel=0.02)


@pytest.mark.parametrize("w", [0.7 * W0, W0, 1.3 * W0])
def test_angular_converges_to_closed(w):
    errs = []
    for deg in (80.0, 85.0, 89.0, 89.9, 89.99):
        c = cav(theta_max=math.radians(deg))
        errs.append(abs(sp.j_eff_angular(w, c) / sp.j_eff_closed(w, c) - 1))
    assert errs[-1] < 0.01
    assert errs[2] > errs[3] > errs[4]


def test_singular_cell_shrinks_as_theta_max_grows():
    fracs = []
    for deg in (89.0, 89.9, 89.99, 89.999):
        b, cont = sp.j_eff_angular(W0, cav(theta_max=math.radians(deg)), return_parts=True)
        fracs.append(cont / (b + cont))
    assert all(x > y for x, y in zip(fracs, fracs[1:]))
    assert fracs[-1] < 2e-4


def test_small_aperture_off_resonance():
    c30 = cav(theta_max=math.radians(30.0))
    w = 1.2 * W0 / math.cos(math.radians(30.0))
    val = sp.j_eff_angular(w, c30)
    peak = sp.j_eff_angular(W0, cav(theta_max=math.radians(89.99)))
    assert 0 < val < peak


def test_angular_zero_frequency_and_arrays():
    c = cav()
    assert sp.j_eff_angular(0.0, c) == 0.0
    v = sp.j_eff_angular(np.array([0.9 * W0, W0]), c)
    assert v.shape == (2,) and v[1] > v[0]
    with pytest.raises(ValueError):
        sp.j_eff_angular(-1.0, c)


def test_singular_cutoff():
    assert sp.singular_cutoff(math.radians(30)) is None
    d = sp.singular_cutoff(math.radians(60))
    assert math.sin(d) == pytest.approx(1 / math.tan(math.radians(60)))


# ---------------------------------------------------------------- normal-mode oracle

def _arrowhead(n, seed=0):
    rng = np.random.default_rng(seed)
    d = np.sort(rng.uniform(0.1, 5.0, n))
    w = rng.uniform(0.0, 0.01, n) * d
    a = 2.0 + np.sum(w / d)
    return d, w, a


def test_secular_roots_match_dense_eigensolver():
    d, w, a = _arrowhead(300)
    z, q = sp._secular_roots(d, w, a)
    H = np.diag(np.concatenate([[a], d]))
    H[0, 1:] = H[1:, 0] = -np.sqrt(w)
    E, V = np.linalg.eigh(H)
    assert np.allclose(z, E, rtol=1e-10, atol=0)
    assert np.allclose(q, V[0] ** 2, rtol=1e-8, atol=1e-14)
    assert q.sum() == pytest.approx(1.0, abs=1e-12)


def test_secular_roots_reject_indefinite_matrix():
    d, w, _ = _arrowhead(50)
    with pytest.raises(sp.UnphysicalBathError):
        sp._secular_roots(d, w, 0.5 * np.sum(w / d))


def test_bath_discretization_reproduces_ohmic_density():
    c = cav()
    f, cc, dw = sp.ohmic_bath_modes(c, 4000)
    J = 0.5 * math.pi * cc**2 / (f * dw)
    assert np.allclose(J, f / sp.fs_to_au(c.tau_c))
    assert f.max() == pytest.approx(wavenumber_to_au(300 * W0), rel=0.01)


def test_oracle_sum_rule_and_curve_small():
    c = cav()
    grid = np.linspace(0.5 * W0, 1.5 * W0, 81)
    o = sp.j_eff_oracle(grid, c, n_bath=4000, kernel="gaussian")
    assert o.sum_rule == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(o.values / sp.j_eff_closed(grid, c) - 1)) < 0.03


def test_oracle_converges_with_bath_size():
    c = cav(tau_c=30.0)
    grid = np.linspace(0.5 * W0, 1.5 * W0, 41)
    ref = sp.j_eff_closed(grid, c)
    e1 = np.max(np.abs(sp.j_eff_oracle(grid, c, n_bath=1500).values / ref - 1))
    e2 = np.max(np.abs(sp.j_eff_oracle(grid, c, n_bath=3000).values / ref - 1))
    assert e2 < e1


def test_oracle_zero_coupling():
    o = sp.j_eff_oracle([1000.0, 1200.0], cav(lambda_c=0.0), n_bath=1000)
    assert np.all(o.values == 0)


def test_oracle_needs_enough_modes():
    with pytest.raises(ValueError):
        sp.j_eff_oracle([1000.0], cav(), n_bath=10)


def test_tabulate_modes():
    c = cav()
    g = np.array([1000.0, 1200.0])
    assert np.allclose(sp.tabulate("closed", g, c).values, sp.j_eff_closed(g, c))
    assert sp.tabulate("angular", g, c).mode == "angular"
    with pytest.raises(AttributeError):
        sp.tabulate("closed", g, c).sum_rule
    with pytest.raises(ValueError):
        sp.tabulate("histogram", g, c)


# ---------------------------------------------------------------- phonon broadening

BASIS = DiabaticBasis(omega0=W0, epsilon_z=9.39)


def _sigma(basis=BASIS, T=300.0, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp.PhononCutoffWarning)
        return sp.phonon_sigma(basis, sp.PhononBathSpec(**kw), T)


def test_sigma_classical_closed_form():
    kw = dict(reorg_lambda=0.0456, char_gamma=200.0, omega_cutoff=math.inf, quantum_coth=False)
    assert _sigma(**kw) == pytest.approx(
        sp.phonon_sigma_classical_limit(BASIS, sp.PhononBathSpec(**kw), 300.0), rel=1e-6)


def test_sigma_scales_as_sqrt_lambda_and_eps():
    a = _sigma(reorg_lambda=0.04)
    assert _sigma(reorg_lambda=0.16) == pytest.approx(2 * a, rel=1e-10)
    assert _sigma(DiabaticBasis(omega0=W0, epsilon_z=2 * 9.39), reorg_lambda=0.04) == pytest.approx(2 * a)
    assert _sigma(reorg_lambda=0.0) == 0.0


def test_sigma_increases_with_temperature():
    s = [_sigma(T=T, reorg_lambda=0.05) for T in (50.0, 100.0, 200.0, 300.0, 600.0)]
    assert all(x < y for x, y in zip(s, s[1:]))


def test_quantum_sigma_exceeds_classical_with_same_cutoff():
    q = _sigma(reorg_lambda=0.05, omega_cutoff=4000.0)
    c = _sigma(reorg_lambda=0.05, omega_cutoff=4000.0, quantum_coth=False)
    assert q > c


def test_sigma_warns_when_cutoff_truncates():
    with pytest.warns(sp.PhononCutoffWarning, match="not converged"):
        sp.phonon_sigma(BASIS, sp.PhononBathSpec(reorg_lambda=0.05), 300.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", sp.PhononCutoffWarning)
        sp.phonon_sigma(BASIS, sp.PhononBathSpec(reorg_lambda=0.05, quantum_coth=False,
                                                 omega_cutoff=1e7), 300.0)
