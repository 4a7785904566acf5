import numpy as np
import pytest

from scoremech.env import PE_V0, make_environment
from scoremech.symmetric import (buyer_utility_sym, equilibrium_strategies,
                                 informational_rent, pw_sym, quality_at,
                                 score_slope_comparative, solve_quality_sym,
                                 solve_symmetric)

CE = {"family": "ce", "n": 2, "alpha": 0.4, "beta": 1.0, "gamma": 3.0}


def _ce_env(**kw):
    return make_environment({**CE, **kw})


def test_ce_quality_closed_form():
    # q(theta) = (PW / beta)^(1/(gamma-1)) with PW = (1 - theta)^(n-1)
    for n in (2, 3, 5):
        env = _ce_env(n=n)
        for th in (0.0, 0.3, 0.8):
            want = ((1 - th) ** (n - 1)) ** (1.0 / (env.gamma - 1.0))
            assert quality_at(env, th) == pytest.approx(want, abs=1e-10)
        assert quality_at(env, 1.0) == 0.0


def test_ce_scoring_rule_is_identity():
    sol = solve_symmetric(_ce_env())
    qs = np.linspace(0.0, sol.schedule.q_bottom, 50)
    assert np.max(np.abs(np.asarray(sol.rule(qs)) - qs)) < 1e-9


def test_pe_quality_closed_form():
    env = make_environment({"family": "pe", "n": 3, "beta": 1.0,
                            "delta": 1.0, "e_p": 2.0, "e_i": 3.0})
    sched = solve_quality_sym(env)
    for th in (0.1, 0.5, 0.9):
        pw = float(pw_sym(env, th))
        want = (PE_V0 - 3.0 * th ** 2) / (1.0 + 4.0 * th ** 3 / pw)
        assert quality_at(env, th) == pytest.approx(want, rel=1e-10)
        assert float(sched(th)) == pytest.approx(want, rel=1e-6)
    # the monopoly-level quality at theta = 0 is common to every n
    assert float(sched(0.0)) == pytest.approx(PE_V0, abs=1e-9)


def test_pe_equal_elasticities_scoring_rule():
    # E_P = E_I = E gives s(q) = V(q) / (1 + delta*E)
    env = make_environment({"family": "pe", "n": 2, "beta": 1.0,
                            "delta": 1.0, "e_p": 2.0, "e_i": 2.0})
    sol = solve_symmetric(env)
    qs = np.linspace(0.0, sol.schedule.q_bottom * 0.999, 40)
    want = np.asarray(env.value(qs)) / 3.0
    assert np.max(np.abs(np.asarray(sol.rule(qs)) - want)) < 1e-6


def test_informational_rent_closed_form():
    # CE: IR(theta, 1) = alpha * (1 - theta)^n / n
    for n in (2, 4):
        env = _ce_env(n=n)
        for th in (0.0, 0.25, 0.7):
            want = env.alpha * (1 - th) ** n / n
            assert informational_rent(env, th, 1.0) == pytest.approx(
                want, abs=1e-9)


def test_equilibrium_price_limit():
    env = _ce_env()
    sol = solve_symmetric(env)
    # p(1) = C^P(q(1), 1) = alpha
    assert float(sol.price(1.0)) == pytest.approx(env.alpha, abs=1e-8)
    # the equilibrium score bid is decreasing in type
    ths = np.linspace(0.0, 1.0, 30)
    assert np.all(np.diff(np.asarray(sol.score(ths))) < 1e-10)


def test_buyer_utility_golden():
    assert buyer_utility_sym(_ce_env()) == pytest.approx(4.0 / 15.0,
                                                         abs=1e-9)


def test_utility_dual_route():
    # pointwise-exact quadrature vs evaluation through the tabulation
    env = make_environment({"family": "pe", "n": 2, "beta": 0.7,
                            "delta": 1.0, "e_p": 1.5, "e_i": 2.5})
    sched = solve_quality_sym(env)
    assert buyer_utility_sym(env) == pytest.approx(
        buyer_utility_sym(env, schedule=sched), rel=1e-7)


def test_quality_decreasing_in_n_and_beta():
    base = make_environment({"family": "pe", "n": 2, "beta": 1.0,
                             "delta": 1.0, "e_p": 2.0, "e_i": 3.0})
    ths = np.linspace(0.05, 0.95, 11)
    q2 = [quality_at(base, t) for t in ths]
    env3 = make_environment({"family": "pe", "n": 3, "beta": 1.0,
                             "delta": 1.0, "e_p": 2.0, "e_i": 3.0})
    q3 = [quality_at(env3, t) for t in ths]
    assert np.all(np.asarray(q3) < np.asarray(q2))
    envb = make_environment({"family": "pe", "n": 2, "beta": 2.0,
                             "delta": 1.0, "e_p": 2.0, "e_i": 3.0})
    qb = [quality_at(envb, t) for t in ths]
    assert np.all(np.asarray(qb) < np.asarray(q2))


def test_score_slope_comparative_directions():
    # slope decreasing in n when E_P < E_I, increasing when E_P > E_I
    lo = make_environment({"family": "pe", "n": 2, "beta": 1.0, "delta": 1.0,
                           "e_p": 1.5, "e_i": 3.0})
    sched = solve_quality_sym(make_environment(
        {"family": "pe", "n": 5, "beta": 1.0, "delta": 1.0, "e_p": 1.5,
         "e_i": 3.0}))
    qs = np.linspace(0.5, float(sched(0.9)), 8)
    slopes = score_slope_comparative(lo, qs, [2, 3, 5])
    assert np.all(slopes[3] < slopes[2]) and np.all(slopes[5] < slopes[3])
    hi = make_environment({"family": "pe", "n": 2, "beta": 1.0, "delta": 1.0,
                           "e_p": 3.0, "e_i": 1.5})
    slopes = score_slope_comparative(hi, qs, [2, 3, 5])
    assert np.all(slopes[3] > slopes[2]) and np.all(slopes[5] > slopes[3])


def test_n1_solution_has_no_auction():
    sol = solve_symmetric(_ce_env(n=1))
    assert sol.rule is None and sol.score is None
    assert sol.utility == pytest.approx(
        buyer_utility_sym(_ce_env(n=1)), rel=1e-9)
