"""Optimal symmetric scoring auction with n >= 1 ex-ante identical firms.

The buyer's relaxed problem yields a per-type quality schedule q(theta)
solving V'(q) = Ctilde^P_q + Ctilde^I_q / PW(theta), with winning probability
PW(theta) = (1 - F(theta))^(n-1).  The schedule is implemented by a
first-score auction with scoring rule s(q) obtained from

    s'(q) = C^P_q(q, theta(q)) + C^I_q(q, theta(q)) / PW(theta(q)),

anchored at s(q(1)) = V(q(1)).  Substituting the first-order condition turns
the slope into C^P_q + (V' - Ctilde^P_q) * C^I_q / Ctilde^I_q, which stays
finite as PW -> 0 and is what the integrator evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .env import Environment
from .errors import DomainError, SingularEndpoint
from .numerics import (Tabulated, TabulatedMonotone, cheb_grid, find_root,
                       integrate)

__all__ = [
    "QualitySchedule",
    "SymmetricSolution",
    "pw_sym",
    "solve_quality_sym",
    "quality_at",
    "scoring_rule",
    "informational_rent",
    "equilibrium_strategies",
    "buyer_utility_sym",
    "score_slope_comparative",
    "solve_symmetric",
]

GRID_SIZE = 512
# last interior grid point; theta = 1 itself is handled by closed-form limits
_TH_TOP = 1.0 - 1e-9


def pw_sym(env: Environment, th):
    """Equilibrium winning probability of type theta: (1 - F(theta))^(n-1)."""
    out = np.asarray((1.0 - np.asarray(env.cdf(th))) ** (env.n - 1))
    return float(out) if out.ndim == 0 else out


def _foc(env: Environment, q: float, th: float, pw: float) -> float:
    """V'(q)*PW - Ctilde^P_q*PW - Ctilde^I_q, scaled to avoid dividing by PW."""
    return (env.value_q(q) - env.cpt_q(q, th)) * pw - env.cit_q(q, th)


def quality_at(env: Environment, th: float) -> float:
    """Pointwise-exact solution of the relaxed quality first-order condition."""
    if not 0.0 <= th <= 1.0:
        raise DomainError("theta must lie in [0, 1]")
    if th >= 1.0 and env.n > 1:
        if env.zero_marginal_investment_at_zero:
            return 0.0
        raise SingularEndpoint("q(1) undefined unless C^I_q(0, theta) = 0")
    pw = float(pw_sym(env, th))
    qm = env.q_max
    f0 = _foc(env, 0.0, th, pw)
    if f0 <= 0.0:
        return 0.0
    f1 = _foc(env, qm, th, pw)
    if f1 >= 0.0:
        return qm
    return find_root(lambda q: _foc(env, q, th, pw), 0.0, qm)


@dataclass(frozen=True)
class QualitySchedule:
    """Tabulated relaxed-optimal quality theta -> q, with its inverse."""

    env: Environment
    tab: TabulatedMonotone

    def __call__(self, th):
        return self.tab(th)

    def theta_of_q(self, q: float) -> float:
        return self.tab.invert(q)

    def exact(self, th: float) -> float:
        """Re-solve the first-order condition (no interpolation error)."""
        return quality_at(self.env, th)

    @property
    def q_top(self) -> float:
        return float(self.tab.y[0])

    @property
    def q_bottom(self) -> float:
        return float(self.tab.y[-1])


def solve_quality_sym(env: Environment, grid: int = GRID_SIZE) -> QualitySchedule:
    """Solve the relaxed quality schedule on a Chebyshev theta grid."""
    ths = cheb_grid(grid, 0.0, _TH_TOP)
    qs = np.array([quality_at(env, t) for t in ths])
    if env.n > 1 and env.zero_marginal_investment_at_zero:
        ths = np.append(ths, 1.0)
        qs = np.append(qs, 0.0)
    strict = bool(np.all(np.diff(qs) < 0))
    tab = TabulatedMonotone(ths, qs, strict=strict)
    return QualitySchedule(env=env, tab=tab)


def _slope(env: Environment, q: float, th: float) -> float:
    """Scoring-rule slope via the first-order-condition substitution."""
    return float(env.cp_q(q, th)
                 + (env.value_q(q) - env.cpt_q(q, th)) * env.ci_ratio(q, th))


def scoring_rule(env: Environment, schedule: QualitySchedule,
                 tol: float = 1e-10) -> TabulatedMonotone:
    """Integrate the scoring-rule slope over the implemented quality range.

    Anchored at s(q_bottom) = V(q_bottom).
    """
    if env.n < 2:
        raise DomainError("scoring rule defined for n >= 2")
    qs = schedule.tab.y[::-1]  # increasing in q
    ths = schedule.tab.x[::-1]
    qs, idx = np.unique(qs, return_index=True)
    ths = ths[idx]
    th_of_q = TabulatedMonotone(qs, ths, strict=False)

    def slope(u):
        return _slope(env, u, float(th_of_q(u)))

    svals = np.empty_like(qs)
    svals[0] = env.value(qs[0])
    for i in range(1, len(qs)):
        svals[i] = svals[i - 1] + integrate(slope, qs[i - 1], qs[i], tol=tol)
    # the slope may vanish at the very top of the range (where V' hits 0)
    strict = bool(np.all(np.diff(svals) > 0))
    return TabulatedMonotone(qs, svals, strict=strict)


def informational_rent(env: Environment, th: float, th_ref: float,
                       tol: float = 1e-11) -> float:
    """IR(theta, theta') = integral_theta^theta' [C^P_theta*PW + C^I_theta] du
    along the relaxed quality schedule (evaluated pointwise-exactly)."""
    for t in (th, th_ref):
        if not 0.0 <= t <= 1.0:
            raise DomainError("theta must lie in [0, 1]")

    def integrand(u):
        q = quality_at(env, u)
        return (env.cp_th(q, u) * float(pw_sym(env, u)) + env.ci_th(q, u))

    return integrate(integrand, th, th_ref, tol=tol)


def _price_at(env: Environment, th: float, rent_to_top: Callable[[float], float]) -> float:
    """Equilibrium price p(theta) = C^P + [C^I + IR(theta, 1)] / PW."""
    if th >= 1.0:
        # PW -> 0 but C^I(q(1), 1) = 0 and IR decays faster; limit is C^P(q(1), 1)
        return float(env.cp(quality_at(env, 1.0), 1.0))
    q = quality_at(env, th)
    pw = float(pw_sym(env, th))
    return float(env.cp(q, th) + (env.ci(q, th) + rent_to_top(th)) / pw)


def equilibrium_strategies(env: Environment, schedule: QualitySchedule,
                           rule: TabulatedMonotone, grid: int = 257):
    """Tabulate the equilibrium price p(theta) and score bid S(theta).

    Returns (price_tab, score_tab) on a Chebyshev grid including theta = 1,
    where the closed-form limits p(1) = C^P(q(1), 1), S(1) = s(q(1)) - p(1)
    are used.
    """
    ths = np.append(cheb_grid(grid, 0.0, _TH_TOP), 1.0)
    ir = lambda t: informational_rent(env, t, 1.0)
    prices = np.array([_price_at(env, t, ir) for t in ths])
    scores = np.array([float(rule(quality_at(env, t))) - p
                       for t, p in zip(ths, prices)])
    price_tab = Tabulated(ths, prices)
    score_tab = TabulatedMonotone(ths, scores, strict=False)
    return price_tab, score_tab


def buyer_utility_sym(env: Environment, schedule: Optional[QualitySchedule] = None,
                      tol: float = 1e-11) -> float:
    """n * integral [x(q(theta), theta) * PW - Ctilde^I(q(theta), theta)] dF.

    With schedule=None the quality first-order condition is re-solved at each
    quadrature node; passing a (possibly perturbed) schedule evaluates it
    through the tabulation instead.
    """
    qfun = (lambda t: quality_at(env, t)) if schedule is None else \
        (lambda t: float(schedule(min(t, schedule.tab.x[-1]))))

    def integrand(th):
        q = qfun(th)
        x = env.value(q) - env.cpt(q, th)
        return ((x * float(pw_sym(env, th)) - env.cit(q, th)) * env.pdf(th))

    return env.n * integrate(integrand, 0.0, 1.0, tol=tol)


def score_slope_comparative(env: Environment, q_grid: Sequence[float],
                            n_values: Sequence[int]) -> dict:
    """Scoring-rule slopes s'(q) on a common quality grid for each n.

    The grid must lie inside the implemented quality range of every n.
    """
    out = {}
    for n in n_values:
        env_n = Environment(family=env.family, n=int(n), alpha=env.alpha,
                            beta=env.beta, gamma=env.gamma, delta=env.delta,
                            e_p=env.e_p, e_i=env.e_i, g=env.g, v=env.v)
        sched = solve_quality_sym(env_n)
        slopes = []
        for q in q_grid:
            th = sched.theta_of_q(float(q))
            slopes.append(_slope(env_n, float(q), th))
        out[int(n)] = np.asarray(slopes)
    return out


@dataclass(frozen=True)
class SymmetricSolution:
    env: Environment
    schedule: QualitySchedule
    rule: Optional[TabulatedMonotone]
    price: Optional[Tabulated]
    score: Optional[TabulatedMonotone]
    utility: float

    def rent(self, th: float) -> float:
        return informational_rent(self.env, th, 1.0)


def solve_symmetric(env: Environment, grid: int = GRID_SIZE) -> SymmetricSolution:
    """Full symmetric solution: schedule, scoring rule, strategies, utility."""
    schedule = solve_quality_sym(env, grid=grid)
    if env.n >= 2:
        rule = scoring_rule(env, schedule)
        price, score = equilibrium_strategies(env, schedule, rule)
    else:
        rule = price = score = None
    utility = buyer_utility_sym(env)
    return SymmetricSolution(env=env, schedule=schedule, rule=rule,
                             price=price, score=score, utility=utility)
