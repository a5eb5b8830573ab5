import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vscrate import kinetics as kin

rate = st.floats(1e-3, 1.0)


def test_generator_columns_sum_to_zero():
    K = kin.KineticScheme(0.1, 0.2, 0.3).generator
    assert np.allclose(K.sum(axis=0), 0.0)


@pytest.mark.parametrize("kw", [dict(k1=-1.0, k2=1.0, k3=1.0), dict(k1=float("nan"), k2=1.0, k3=1.0),
                                dict(k1=1.0, k2=1.0, k3=1.0, initial=(0.5, 0.0, 0.0, 0.0)),
                                dict(k1=1.0, k2=1.0, k3=1.0, initial=(1.0, 0.0, 0.0))])
def test_scheme_validation(kw):
    with pytest.raises(ValueError):
        kin.KineticScheme(**kw)


def test_reactant_is_single_exponential():
    s = kin.KineticScheme(0.01, 1.0, 1.0)
    tr = kin.integrate_scheme(s, 500.0, 501)
    assert np.allclose(tr["P_G"], np.exp(-0.01 * tr.times), rtol=1e-12, atol=0)


def test_intermediate_closed_form():
    k1, k2 = 0.01, 0.5
    tr = kin.integrate_scheme(kin.KineticScheme(k1, k2, 0.3), 400.0, 401)
    t = tr.times
    expect = k1 / (k2 - k1) * (np.exp(-k1 * t) - np.exp(-k2 * t))
    assert np.allclose(tr["P_nuL"], expect, atol=1e-13)


def test_degenerate_rates_handled():
    # coincident rates make the generator defective; expm still works
    k = 0.05
    tr = kin.integrate_scheme(kin.KineticScheme(k, k, k), 400.0, 401)
    t = tr.times
    assert np.allclose(tr["P_nuL"], k * t * np.exp(-k * t), atol=1e-13)
    assert np.allclose(tr["P_nuR_ex"], 0.5 * (k * t) ** 2 * np.exp(-k * t), atol=1e-13)


@given(rate, rate, rate)
@settings(max_examples=15, deadline=None)
def test_expm_matches_adaptive(k1, k2, k3):
    s = kin.KineticScheme(k1, k2, k3)
    t_max = 10.0 / min(k1, k2, k3)
    a = kin.integrate_scheme(s, t_max, 201, "expm")
    b = kin.integrate_scheme(s, t_max, 201, "adaptive")
    assert np.max(np.abs(a.populations - b.populations)) < 1e-8


@given(rate, rate, rate)
@settings(max_examples=30, deadline=None)
def test_populations_conserved_and_bounded(k1, k2, k3):
    tr = kin.integrate_scheme(kin.KineticScheme(k1, k2, k3), 50.0 / k1, 301)
    P = tr.populations
    assert np.all((P >= 0) & (P <= 1))
    assert np.max(np.abs(P.sum(axis=1) - 1)) < 1e-9
    assert np.all(np.diff(tr["P_nuR"]) >= -1e-11)


@pytest.mark.parametrize("rates", [(1.0, 1.0, 1.0 - 1e-16), (0.5, 0.5 + 1e-9, 0.5), (1e-3, 1e-3, 1.0)])
def test_nearly_equal_rates(rates):
    s = kin.KineticScheme(*rates)
    t_max = 50.0 / min(rates)
    a = kin.integrate_scheme(s, t_max, 301, "expm")
    b = kin.integrate_scheme(s, t_max, 301, "adaptive")
    assert np.max(np.abs(a.populations - b.populations)) < 1e-8


def test_nonuniform_times():
    s = kin.KineticScheme(0.1, 0.2, 0.3)
    t = np.array([0.0, 0.5, 3.0, 40.0])
    a = kin.integrate_scheme(s, None, times=t)
    b = kin.integrate_scheme(s, 40.0, 81)
    assert np.allclose(a.populations[[1, 2, 3]], b.populations[[1, 6, 80]], atol=1e-13)


def test_conservation_guard():
    with pytest.raises(kin.KineticsError):
        kin.PopulationTrajectory(np.zeros(2), np.array([[1.0, 0, 0, 0], [0.5, 0, 0, 0]]), "x")


def test_unknown_method():
    with pytest.raises(ValueError):
        kin.integrate_scheme(kin.KineticScheme(1, 1, 1), 1.0, method="euler")
    with pytest.raises(ValueError):
        kin.integrate_scheme(kin.KineticScheme(1, 1, 1), 0.0)


@pytest.mark.parametrize("ratio", [10, 100, 1000])
def test_fit_recovers_k1_when_fast(ratio):
    k1 = 1e-3
    s = kin.KineticScheme(k1, ratio * k1, ratio * k1)
    fit = kin.effective_rate_fit(kin.integrate_scheme(s, 25.0 / k1, 4001))
    assert fit.rate == pytest.approx(k1, rel=1e-4)


def test_fit_error_shrinks_with_ratio():
    k1 = 1e-3
    errs = []
    for ratio in (2, 10, 100, 1000):
        s = kin.KineticScheme(k1, ratio * k1, ratio * k1)
        tr = kin.integrate_scheme(s, 25.0 / k1, 4001)
        errs.append(abs(kin.effective_rate_fit(tr, t_start=0.0).rate / k1 - 1))
    assert errs == sorted(errs, reverse=True)


def test_fit_with_equal_rates():
    k = 1e-2
    tr = kin.integrate_scheme(kin.KineticScheme(k, k, k), 40.0 / k, 4001)
    fit = kin.effective_rate_fit(tr)
    # survival is a gamma tail, so the fitted rate sits between its local log-slopes
    x = k * np.array(fit.window)
    local = k * x**2 / 2 / (1 + x + x**2 / 2)
    assert local[0] < fit.rate < local[1] < k


def test_fit_with_stalled_intermediate():
    tr = kin.integrate_scheme(kin.KineticScheme(0.01, 0.0, 0.0), 3000.0, 1001)
    with pytest.raises(kin.KineticsError):
        kin.effective_rate_fit(tr)
    assert kin.effective_rate_fit(tr, observable="reactant").rate == pytest.approx(0.01, rel=1e-9)


def test_fit_needs_decay():
    tr = kin.integrate_scheme(kin.KineticScheme(1e-4, 1.0, 1.0), 100.0, 101)
    with pytest.raises(kin.KineticsError):
        kin.effective_rate_fit(tr)
    with pytest.raises(ValueError):
        kin.effective_rate_fit(tr, observable="foo")


def test_cavity_rate_adds_to_k0():
    k0, kv = 2.3e-3, 1.1e-3
    tr = kin.integrate_scheme(kin.KineticScheme(k0 + kv, 1.0, 1.0), 25.0 / (k0 + kv), 4001)
    assert kin.effective_rate_fit(tr).rate == pytest.approx(k0 + kv, rel=1e-4)


def test_steady_state_holds_when_k2_dominates():
    s = kin.KineticScheme(1e-3, 1.0, 1.0)
    rep = kin.steady_state_check(kin.integrate_scheme(s, 5000.0, 5001), s)
    assert rep.satisfied and rep.ratio_error < 0.01


def test_steady_state_fails_when_k2_small():
    s = kin.KineticScheme(1e-2, 1e-3, 1.0)
    rep = kin.steady_state_check(kin.integrate_scheme(s, 5000.0, 501), s)
    assert not rep.satisfied and "accumulates" in rep.message
    s = kin.KineticScheme(1e-2, 1.5e-2, 1.0)
    rep = kin.steady_state_check(kin.integrate_scheme(s, 2000.0, 2001), s)
    assert not rep.satisfied


def test_steady_state_trivial_cases():
    s = kin.KineticScheme(0.0, 1.0, 1.0)
    assert kin.steady_state_check(kin.integrate_scheme(s, 10.0, 11), s).satisfied
    s = kin.KineticScheme(1.0, 1.0, 1.0, initial=(0.0, 0.0, 0.0, 1.0))
    assert kin.steady_state_check(kin.integrate_scheme(s, 10.0, 11), s).satisfied


def test_csv(tmp_path):
    tr = kin.integrate_scheme(kin.KineticScheme(0.1, 0.2, 0.3), 10.0, 3)
    p = tmp_path / "t.csv"
    kin.write_trajectory_csv(tr, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "t_fs,P_G,P_nuL,P_nuR_ex,P_nuR" and len(lines) == 4
