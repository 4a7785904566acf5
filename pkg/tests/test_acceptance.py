"""Acceptance battery: one test per criterion, one PASS/FAIL line each.

Every test prints "CRITERION n: PASS/FAIL -- detail" before asserting, so the
full scoreboard survives in captured output even when a criterion is red.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from scoremech.env import (PE_V0, _x_peak, check_regularity, indirect_cost,
                           make_environment, virtual_surplus_x)
from scoremech.errors import BoundaryTie
from scoremech import asymmetric as asym
from scoremech import auctionsim as game
from scoremech import entry as entry_mod
from scoremech.symmetric import (quality_at, score_slope_comparative,
                                 solve_quality_sym, solve_symmetric)

CE_FLOOR = {"family": "ce", "n": 2, "alpha": 0.4, "beta": 1.0, "gamma": 3.0}
CE_CEIL = {"family": "ce", "n": 2, "alpha": 0.5, "beta": 1.0, "gamma": 1.5}
U_SYM = 4.0 / 15.0
TH0 = 11.0 / 36.0


def _report(num, ok, detail):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} -- {detail}")
    assert ok, f"criterion {num}: {detail}"


@pytest.fixture(scope="module")
def senv_floor():
    return asym.as_separable(make_environment(CE_FLOOR))


@pytest.fixture(scope="module")
def senv_ceil():
    return asym.as_separable(make_environment(CE_CEIL))


def test_criterion_01_cutoff_golden(senv_floor):
    t0 = time.process_time()
    root = asym.threshold_floor(senv_floor)
    g, a = 3.0, 0.4
    closed = 1.0 - (a * g) ** (-(g - 1.0) / (g - 2.0))
    elapsed = time.process_time() - t0
    err = max(abs(root - TH0), abs(closed - TH0))
    _report(1, err < 1e-8 and elapsed < 1.0,
            f"theta0={root:.12f}, closed={closed:.12f}, err={err:.2e}, "
            f"{elapsed:.2f} CPU s")


def test_criterion_02_utility_gain(senv_floor):
    t0 = time.process_time()
    u_star = asym.buyer_utility_asym(senv_floor, TH0, "right")
    gain = (u_star - U_SYM) / U_SYM
    u_at_0 = asym.buyer_utility_asym(senv_floor, 0.0, "right")
    u_at_1 = asym.buyer_utility_asym(senv_floor, 1.0, "right")
    ends = max(abs(u_at_0 - U_SYM), abs(u_at_1 - U_SYM))
    elapsed = time.process_time() - t0
    _report(2, 0.030 <= gain <= 0.037 and ends < 1e-8 and elapsed < 5.0,
            f"gain={100 * gain:.3f}%, endpoint err={ends:.2e}, {elapsed:.2f} CPU s")


def test_criterion_03_regime_map():
    t0 = time.process_time()
    gammas = np.linspace(1.1, 4.0, 60)
    alphas = np.linspace(0.05, 1.2, 40)
    agree = total = 0
    for g in gammas:
        for a in alphas:
            if asym.regime_boundary_slack(float(g), float(a)) < 0.02:
                continue
            try:
                want = asym.classify_regime_ce(float(g), float(a))
            except BoundaryTie:
                continue
            env = make_environment({"family": "ce", "n": 2, "alpha": float(a),
                                    "beta": 1.0, "gamma": float(g)})
            got = asym.solve_optimal(asym.as_separable(env)).kind
            total += 1
            agree += int(want == got)
    elapsed = time.process_time() - t0
    rate = agree / total
    _report(3, rate >= 0.99 and elapsed < 120.0,
            f"{agree}/{total} agree ({100 * rate:.2f}%), {elapsed:.1f} CPU s")


def test_criterion_04_scoring_rule_identities():
    sol = solve_symmetric(make_environment(CE_FLOOR))
    lo, hi = sol.rule.domain
    qs = np.linspace(lo, hi, 257)
    ce_err = float(np.max(np.abs(np.asarray(sol.rule(qs)) - qs)))

    pe_err = 0.0
    e = 1.5
    for n in (2, 3, 5):
        for beta in (0.5, 1.0, 2.0):
            env = make_environment({"family": "pe", "n": n, "beta": beta,
                                    "delta": 1.0, "e_p": e, "e_i": e})
            rule = solve_symmetric(env).rule
            lo, hi = rule.domain
            qs = np.linspace(lo, hi, 257)
            target = (PE_V0 * qs - qs ** 2 / 2.0) / (1.0 + e)
            pe_err = max(pe_err,
                         float(np.max(np.abs(np.asarray(rule(qs)) - target))))
    _report(4, ce_err < 1e-9 and pe_err < 1e-6,
            f"CE |s(q)-q|={ce_err:.2e}, PE |s-V/(1+dE)|={pe_err:.2e}")


def test_criterion_05_comparative_statics():
    rng = np.random.default_rng(20240817)
    ths = np.linspace(0.05, 0.95, 11)
    ok = True
    notes = []
    for _ in range(10):     # CE draws: q decreasing in n and beta
        g = rng.uniform(1.4, 3.5)
        a = rng.uniform(0.2, 0.9)
        b = rng.uniform(0.5, 2.0)
        cfg = {"family": "ce", "n": 2, "alpha": a, "beta": b, "gamma": g}
        q2 = np.array([quality_at(make_environment(cfg), t) for t in ths])
        q5 = np.array([quality_at(make_environment({**cfg, "n": 5}), t)
                       for t in ths])
        qb = np.array([quality_at(make_environment({**cfg, "beta": 2 * b}), t)
                       for t in ths])
        ok &= bool(np.all(q5 < q2) and np.all(qb < q2))
    for i in range(10):     # PE draws: same monotonicity + slope directions
        ep = rng.uniform(0.8, 2.6)
        ei = ep + rng.choice([-1.0, 1.0]) * rng.uniform(0.4, 1.2)
        ei = float(np.clip(ei, 0.5, 3.5))
        b = rng.uniform(0.7, 1.5)
        cfg = {"family": "pe", "n": 2, "beta": b, "delta": 1.0,
               "e_p": ep, "e_i": ei}
        env = make_environment(cfg)
        q2 = np.array([quality_at(env, t) for t in ths])
        q5 = np.array([quality_at(make_environment({**cfg, "n": 5}), t)
                       for t in ths])
        qb = np.array([quality_at(make_environment({**cfg, "beta": 2 * b}), t)
                       for t in ths])
        ok &= bool(np.all(q5 < q2) and np.all(qb < q2))
        if i < 4 and abs(ep - ei) > 0.4:
            sched5 = solve_quality_sym(make_environment({**cfg, "n": 5}))
            qs = np.linspace(0.7 * float(sched5(0.9)), float(sched5(0.9)), 6)
            slopes = score_slope_comparative(env, qs, [2, 3, 5])
            d32 = np.asarray(slopes[3]) - np.asarray(slopes[2])
            d53 = np.asarray(slopes[5]) - np.asarray(slopes[3])
            want = -1.0 if ep < ei else 1.0
            ok &= bool(np.all(want * d32 > 0) and np.all(want * d53 > 0))
            vprime = PE_V0 - qs
            ok &= bool(all(np.all(np.asarray(s) <= vprime + 1e-9)
                           for s in slopes.values()))
            notes.append(f"e_p{'<' if ep < ei else '>'}e_i ok")
    _report(5, ok, "20 random draws; " + ", ".join(notes))


@pytest.fixture(scope="module")
def floor_game(senv_floor):
    return game.floor_profile(senv_floor, TH0)


@pytest.fixture(scope="module")
def ceiling_game(senv_ceil):
    return game.ceiling_profile(senv_ceil, asym.threshold_ceiling(senv_ceil))


def test_criterion_06_equilibrium_verification(floor_game, ceiling_game):
    t0 = time.process_time()
    rng = np.random.default_rng(7)
    failures = []

    def check(tag, mech, profile, scale):
        rep = game.verify_bne(mech, profile, grid=(48, 48, 48))
        if not (rep.max_ic_violation <= 1e-3 * max(1.0, abs(scale))
                and rep.single_peaked
                and all(abs(v) <= 1e-6 for v in rep.worst_type_profit.values())
                and rep.participation_ok):
            failures.append(f"{tag}: ic={rep.max_ic_violation:.2e}")

    for i in range(5):
        if i % 2 == 0:
            cfg = {"family": "ce", "n": 2, "alpha": rng.uniform(0.2, 0.9),
                   "beta": 1.0, "gamma": rng.uniform(1.4, 3.5)}
        else:
            cfg = {"family": "pe", "n": 2, "beta": rng.uniform(0.7, 1.5),
                   "delta": 1.0, "e_p": rng.uniform(0.8, 2.5),
                   "e_i": rng.uniform(0.8, 2.5)}
        env = make_environment(cfg)
        assert check_regularity(env).passed
        sol = solve_symmetric(env)
        check(f"sym{i}", *game.symmetric_profile(sol), sol.utility)

    check("floor", *floor_game, U_SYM)
    check("ceiling", *ceiling_game, U_SYM)

    # control: dropping the kickback must break the ceiling equilibrium
    mech, profile = ceiling_game
    broken = game.verify_bne(replace(mech, kickback=0.0), profile,
                             grid=(32, 32, 32))
    if broken.max_ic_violation <= 1e-2:
        failures.append(f"control: ic={broken.max_ic_violation:.2e}")
    elapsed = time.process_time() - t0
    _report(6, not failures and elapsed < 180.0,
            (f"5 sym + floor + ceiling verified, K=0 control "
             f"ic={broken.max_ic_violation:.2e}, {elapsed:.1f} CPU s")
            if not failures else "; ".join(failures))


def test_criterion_07_monte_carlo(senv_floor, senv_ceil, floor_game,
                                  ceiling_game):
    sym_pair = game.symmetric_profile(solve_symmetric(make_environment(
        CE_FLOOR)))
    cases = [
        ("symmetric", sym_pair, U_SYM),
        ("floor", floor_game, asym.buyer_utility_asym(senv_floor, TH0,
                                                      "right")),
        ("ceiling", ceiling_game,
         asym.buyer_utility_asym(senv_ceil, ceiling_game[1].theta0, "left")),
    ]
    details = []
    ok = True
    for tag, (mech, profile), target in cases:
        r = game.simulate(mech, profile, draws=1_000_000, seed=11)
        zscore = abs(r.utility - target) / r.stderr
        ok &= zscore <= 3.0 and r.ks_pvalue >= 0.01
        details.append(f"{tag}: z={zscore:.2f}, KS p={r.ks_pvalue:.2f}")
    _report(7, ok, "; ".join(details))


def test_criterion_08_side_payments(senv_floor, senv_ceil):
    params = asym.floor_params(senv_floor, TH0)
    golden = max(abs(params["score_floor"] - 13.0 / 30.0),
                 abs(params["bonus"] - 125.0 / 648.0))
    grid = np.linspace(1e-4, 1.0 - 1e-4, 100)
    b_min = min(asym.floor_params(senv_floor, float(t))["bonus"]
                for t in grid)
    k_min = min(asym.ceiling_params(senv_ceil, float(t))["kickback"]
                for t in grid)
    k_at_0 = asym.ceiling_params(senv_ceil, 0.0)["kickback"]
    b_limit = asym.floor_params(senv_floor, 1.0 - 1e-10)["bonus"]
    ok = (golden < 1e-8 and b_min >= 0.0 and k_min >= 0.0
          and abs(k_at_0) < 1e-12 and abs(b_limit) < 1e-8)
    _report(8, ok, f"golden err={golden:.2e}, min B={b_min:.2e}, "
                   f"min K={k_min:.2e}, K(0)={k_at_0:.1e}, "
                   f"B(1-)={b_limit:.1e}")


def test_criterion_09_threshold_monotonicity():
    floor_alphas = np.linspace(0.34, 2.0, 30)
    ceil_alphas = np.linspace(0.34, 0.99, 30)
    th_f, th_c, eff_ok = [], [], True
    for a in floor_alphas:
        senv = asym.as_separable(make_environment({**CE_FLOOR,
                                                   "alpha": float(a)}))
        t = asym.threshold_floor(senv)
        th_f.append(t)
        eff_ok &= asym.efficient_threshold(senv, "right") <= t + 1e-7
    for a in ceil_alphas:
        senv = asym.as_separable(make_environment({**CE_CEIL,
                                                   "alpha": float(a)}))
        t = asym.threshold_ceiling(senv)
        th_c.append(t)
        eff_ok &= asym.efficient_threshold(senv, "left") >= t - 1e-7
    mono_f = bool(np.all(np.diff(th_f) >= -1e-9))
    mono_c = bool(np.all(np.diff(th_c) <= 1e-9))
    _report(9, mono_f and mono_c and eff_ok,
            f"floor increasing={mono_f}, ceiling decreasing={mono_c}, "
            f"efficient-vs-optimal ordering={eff_ok}")


def test_criterion_10_restricted_entry():
    cfg = {"family": "sc", "n": 2, "alpha": 0.3, "delta": 1.0,
           "g": {"name": "quadratic", "scale": 1.0}}
    senv = asym.as_separable(make_environment(cfg))

    # literal closed form U(k) = k/(2(2k-1)) - alpha/(k+1) vs quadrature
    def literal(alpha, k):
        return k / (2.0 * (2.0 * k - 1.0)) - alpha / (k + 1.0)

    lit_err = corr_err = 0.0
    for k in range(1, 11):
        u = entry_mod.utility_restricted(senv, k)
        lit_err = max(lit_err, abs(u - literal(0.3, k)))
        corr_err = max(corr_err,
                       abs(u - entry_mod.utility_restricted_quadratic(0.3, k)))

    struct_ok = True
    for a in np.arange(0.1, 0.95, 0.1):
        sa = asym.as_separable(make_environment({**cfg, "alpha": float(a)}))
        curve = entry_mod.optimal_entry(sa, 6)
        struct_ok &= curve.one_or_all and curve.fractional_shape.kind in (
            "quasiconvex", "increasing", "decreasing", "constant")
    a0 = entry_mod.alpha_crossover(senv, 6)
    struct_ok &= abs(a0 - 7.0 / 22.0) < 1e-8

    _report(10, lit_err < 1e-8 and struct_ok,
            f"literal closed-form err={lit_err:.2e} (coefficient on the "
            f"alpha/(k+1) term appears off by 2: with 2*alpha/(k+1) the "
            f"quadrature error is {corr_err:.2e}); quasi-convexity and "
            f"k* in {{1,6}} hold for alpha=0.1..0.9; crossover alpha0="
            f"{a0:.12f}")


def test_criterion_11_indirect_cost():
    envs = [
        make_environment({"family": "ce", "n": 2, "alpha": 0.2, "beta": 1.0,
                          "gamma": 3.0}),
        make_environment({"family": "ce", "n": 2, "alpha": 0.1, "beta": 1.0,
                          "gamma": 1.5}),
        make_environment({"family": "ce", "n": 2, "alpha": 0.25, "beta": 1.0,
                          "gamma": 2.5}),
        make_environment({"family": "pe", "n": 2, "beta": 1.0, "delta": 1.0,
                          "e_p": 1.0, "e_i": 2.0}),
        make_environment({"family": "sc", "n": 2, "alpha": 0.2, "delta": 1.0,
                          "g": {"name": "quadratic", "scale": 1.0}}),
    ]
    ths = np.linspace(0.0, 1.0, 64)
    ok = True
    ce_err = 0.0
    for env in envs:
        # largest x attainable at every type, smallest attainable at theta=0
        x_lo = virtual_surplus_x(env, 0.0, 0.0)
        x_hi = virtual_surplus_x(env, _x_peak(env, 1.0), 1.0)
        span = x_hi - x_lo
        xs = np.linspace(x_lo + 1e-3 * span, x_hi - 1e-3 * span, 64)
        C = np.array([[indirect_cost(env, float(x), float(t)) for t in ths]
                      for x in xs])
        ok &= bool(np.all(np.diff(C, axis=0) >= -1e-8))          # monotone x
        ok &= bool(np.all(np.diff(C, axis=1) >= -1e-8))          # monotone th
        ok &= bool(np.all(np.diff(C, 2, axis=0) >= -1e-7))       # convex in x
        mixed = np.diff(np.diff(C, axis=0), axis=1)
        ok &= bool(np.all(mixed >= -1e-8))                       # supermodular
        if env.family == "constant_elasticity":
            X, T = np.meshgrid(xs, ths, indexing="ij")
            closed = (X + 2.0 * env.alpha * T) ** env.gamma / env.gamma
            ce_err = max(ce_err, float(np.max(np.abs(C - closed))))
    _report(11, ok and ce_err < 1e-8,
            f"5 envs on 64x64 grids, CE closed-form err={ce_err:.2e}")


def test_dominance_constructive(senv_floor):
    # sole sourcing strictly beats the optimal symmetric auction when the
    # production-cost stakes are small; the censored mechanism strictly beats
    # the symmetric one in the floor example
    senv_lo = asym.as_separable(make_environment({**CE_FLOOR, "alpha": 0.1}))
    margin_sole = asym.utility_sole(senv_lo) - asym.utility_symmetric(senv_lo)
    margin_floor = asym.buyer_utility_asym(senv_floor, TH0, "right") - U_SYM
    ok = margin_sole > 1e-3 and margin_floor > 0.0
    print(f"DOMINANCE NOTE: {'PASS' if ok else 'FAIL'} -- sole-symmetric="
          f"{margin_sole:.4f}, floor-symmetric={margin_floor:.4f}")
    assert ok
