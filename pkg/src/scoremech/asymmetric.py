"""Optimal favoritism between two ex-ante identical firms (separable costs).

With n = 2, C^P = alpha*theta, C^I = g(q), and V(q) = q, the buyer can beat
the symmetric auction by committing to favor one firm.  Whether the optimal
distortion censors high types (a score floor with an entry bonus B for the
favored firm) or low types (a score ceiling with a kickback K) is decided by
the quasi-shape of q -> alpha*xi(g'(q)) - q, where xi(z) = 1 - J(F^-1(1-z))
and J is the standard virtual type.

All threshold first-order conditions and transfers below are expressed through
the convex conjugate H(z) = max_q [q z - g(q)] and are closed-form up to 1-D
quadratures, since F(theta) = theta^(1/delta) admits

    int (1 - F) du  and  int J dF  in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import dblquad

from .env import Environment, GFunction
from .errors import BoundaryTie, DomainError, InvalidParameter, NoRoot
from .numerics import ShapeVerdict, find_root, integrate, quasi_shape

__all__ = [
    "SeparableEnv",
    "Regime",
    "CensoredOutcomes",
    "as_separable",
    "virtual_type_j",
    "xi_transform",
    "classify_convexity",
    "phi_surplus",
    "censored_outcomes",
    "threshold_floor",
    "threshold_ceiling",
    "floor_params",
    "ceiling_params",
    "buyer_utility_asym",
    "utility_at_threshold",
    "solve_optimal",
    "classify_regime_ce",
    "regime_boundary_slack",
    "efficient_threshold",
]

_EPS = 1e-9
_SCAN = 1025


@dataclass(frozen=True)
class SeparableEnv:
    """Two-firm separable environment: V = q, C^P = alpha*theta, C^I = g(q)."""

    alpha: float
    delta: float
    g: GFunction
    env: Optional[Environment] = None

    def __post_init__(self):
        if self.alpha < 0:
            raise InvalidParameter("alpha must be non-negative")
        if self.delta <= 0:
            raise InvalidParameter("delta must be positive")

    # F(theta) = theta^(1/delta)
    def cdf(self, th):
        out = np.asarray(th, dtype=float) ** (1.0 / self.delta)
        return float(out) if out.ndim == 0 else out

    def cdf_inv(self, u):
        out = np.asarray(u, dtype=float) ** self.delta
        return float(out) if out.ndim == 0 else out

    def pdf(self, th):
        th = np.asarray(th, dtype=float)
        out = (1.0 / self.delta) * th ** (1.0 / self.delta - 1.0)
        return float(out) if out.ndim == 0 else out

    def survival_int(self, th):
        """int_0^theta (1 - F(u)) du, closed form."""
        th = np.asarray(th, dtype=float)
        out = th - self.delta / (1.0 + self.delta) * th ** ((1.0 + self.delta) / self.delta)
        return float(out) if out.ndim == 0 else out

    def j_int(self, th):
        """int_0^theta J(u) dF(u) = theta^((1+delta)/delta), closed form."""
        out = np.asarray(th, dtype=float) ** ((1.0 + self.delta) / self.delta)
        return float(out) if out.ndim == 0 else out

    # symmetric benchmark pieces (n = 2 hence PW = 1 - F)
    def q_sym(self, th):
        return self.g.inv_deriv(1.0 - np.asarray(self.cdf(th)))

    def rent(self, th, th_ref=1.0):
        """IR(theta, theta') = alpha * int (1 - F) du along the schedule."""
        return self.alpha * (np.asarray(self.survival_int(th_ref))
                             - np.asarray(self.survival_int(th)))

    def score_sym(self, th):
        """Symmetric equilibrium score bid S*_sym(theta); the rule is s(q) = q."""
        th = np.asarray(th, dtype=float)
        z = 1.0 - np.asarray(self.cdf(th))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(z > 0,
                           self.g.conjugate(z) / np.where(z > 0, z, 1.0) - self.alpha * th
                           - np.asarray(self.rent(th)) / np.where(z > 0, z, 1.0),
                           -self.alpha)
        return float(out) if out.ndim == 0 else out

    @property
    def q_top(self) -> float:
        """Monopoly quality g'^{-1}(1), the top of the implemented range."""
        return float(self.g.inv_deriv(1.0))


def as_separable(env: Environment) -> SeparableEnv:
    """Adapt a (validated) Environment to the two-firm separable form."""
    if env.n != 2:
        raise DomainError("asymmetric mechanisms are defined for n = 2")
    if not env.separable():
        raise DomainError("environment lacks the separable structure "
                          "(V = q, C^P = alpha*theta, C^I = g(q))")
    return SeparableEnv(alpha=env.alpha, delta=env.delta,
                        g=env.g_kernel(), env=env)


def virtual_type_j(senv: SeparableEnv, th):
    """J(theta) = theta + F/f = (1 + delta) * theta."""
    th = np.asarray(th, dtype=float)
    if np.any(th < 0) or np.any(th > 1):
        raise DomainError("theta must lie in [0, 1]")
    out = (1.0 + senv.delta) * th
    return float(out) if out.ndim == 0 else out


def xi_transform(senv: SeparableEnv, z):
    """xi(z) = 1 - J(F^-1(1 - z)) on z in [0, 1]."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > 1):
        raise DomainError("z must lie in [0, 1]")
    out = 1.0 - (1.0 + senv.delta) * (1.0 - z) ** senv.delta
    return float(out) if out.ndim == 0 else out


def phi_surplus(senv: SeparableEnv, z, th):
    """phi(z, theta) = H(z) - alpha*J(theta)*z: winner-adjusted virtual surplus
    of giving win probability z to a type-theta firm at its optimal quality."""
    z = np.asarray(z, dtype=float)
    out = (np.asarray(senv.g.conjugate(z))
           - senv.alpha * np.asarray(virtual_type_j(senv, th)) * z)
    return float(out) if out.ndim == 0 else out


def _x_star(senv: SeparableEnv, z, th):
    """phi_z(z, theta) = g'^{-1}(z) - alpha*J(theta) (envelope theorem)."""
    return (np.asarray(senv.g.inv_deriv(z))
            - senv.alpha * np.asarray(virtual_type_j(senv, th)))


def classify_convexity(senv: SeparableEnv, samples: int = 512) -> ShapeVerdict:
    """Quasi-shape of q -> alpha*xi(g'(q)) - q on the implemented range.

    quasiconvex  -> score-floor (right-censoring) family
    quasiconcave -> score-ceiling (left-censoring) family
    monotone / constant shapes belong to both families (the threshold then
    lands on a boundary: symmetric or sole sourcing).
    """
    # clustered at both ends: the interior extremum can hug a boundary
    k = np.arange(samples)
    qs = senv.q_top * 0.5 * (1.0 - np.cos(np.pi * k / (samples - 1)))
    vals = senv.alpha * np.asarray(xi_transform(senv, np.clip(senv.g.deriv(qs), 0.0, 1.0))) - qs
    return quasi_shape(vals)


# --------------------------------------------------------------------------
# Threshold first-order conditions (both closed-form in theta0)
# --------------------------------------------------------------------------

def _foc_floor(senv: SeparableEnv, th0):
    """d U_floor / d theta0 up to the positive factor f(theta0).

    phi(z0, th0) - int_th0^1 x*(z0, th) dF simplifies (via H(z) = q*z - g(q*)
    and int (J(th) - J(th0)) dF = (1+delta) int (1-F) du) to the
    cancellation-free form alpha*(1+delta)*int_th0^1 (1-F) du - g(q*(z0)).
    """
    th0 = np.asarray(th0, dtype=float)
    z0 = 1.0 - np.asarray(senv.cdf(th0))
    q0 = np.asarray(senv.g.inv_deriv(z0))
    tail = np.asarray(senv.survival_int(1.0)) - np.asarray(senv.survival_int(th0))
    out = senv.alpha * (1.0 + senv.delta) * tail - np.asarray(senv.g(q0))
    return float(out) if out.ndim == 0 else out


_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)


def _survival_tail_z(senv: SeparableEnv, z):
    """int_theta0^1 (1 - F) du as a function of z = 1 - F(theta0).

    Substituting t = 1 - F(u) turns the tail into
    delta * int_0^z t * (1 - t)^(delta-1) dt, evaluated by Gauss-Legendre so
    that z far below float eps (theta0 indistinguishable from 1) keeps full
    relative precision; the theta parametrization loses it to cancellation.
    """
    z = np.asarray(z, dtype=float)
    t = 0.5 * z[..., None] * (_GL_X + 1.0)
    d = senv.delta
    vals = t * np.exp((d - 1.0) * np.log1p(-t))
    out = d * 0.5 * z * np.sum(_GL_W * vals, axis=-1)
    return float(out) if out.ndim == 0 else out


def _foc_floor_z(senv: SeparableEnv, z):
    """_foc_floor reparametrized by z0 = 1 - F(theta0) (stable as z0 -> 0)."""
    q0 = np.asarray(senv.g.inv_deriv(np.asarray(z, dtype=float)))
    out = (senv.alpha * (1.0 + senv.delta) * _survival_tail_z(senv, z)
           - np.asarray(senv.g(q0)))
    return float(out) if np.ndim(out) == 0 else out


def _foc_ceiling(senv: SeparableEnv, th0):
    """d U_ceiling / d theta0 up to the positive factor f(theta0).

    Same simplification as _foc_floor yields
    (q1 - q0) - (g(q1) - g(q0)) - alpha*(1+delta)*int_0^th0 F du,
    with q1 = g'^{-1}(1) and q0 = g'^{-1}(1 - F(th0)).
    """
    th0 = np.asarray(th0, dtype=float)
    z0 = 1.0 - np.asarray(senv.cdf(th0))
    q0 = np.asarray(senv.g.inv_deriv(z0))
    q1 = senv.q_top
    head = th0 - np.asarray(senv.survival_int(th0))  # int_0^th0 F(u) du
    out = ((q1 - q0) - (float(senv.g(q1)) - np.asarray(senv.g(q0)))
           - senv.alpha * (1.0 + senv.delta) * head)
    return float(out) if out.ndim == 0 else out


_Z_SWITCH = 1e-4   # survival level below which the theta-space FOC is noisy
_Z_MIN = 1e-120


def _threshold_info(senv: SeparableEnv, side: str):
    """Roots of the threshold FOC; boundary and multiple roots resolved by
    utility comparison.

    Returns (theta0, utility, is_root, z0, roots) where is_root marks an
    interior FOC root (vs a boundary local max) and z0 = 1 - F(theta0) is the
    survival at the root, kept separately because theta0 itself can round to
    1.0 when the root hugs the upper boundary.
    """
    foc = _foc_floor if side == "right" else _foc_ceiling
    # clustered at both ends: thresholds can sit arbitrarily close to 0 or 1.
    # The floor grid stops where the survival hits _Z_SWITCH: past that the
    # theta-space tail integral cancels and the scan continues in z below.
    th_hi = (float(senv.cdf_inv(1.0 - _Z_SWITCH)) if side == "right"
             else 1.0 - _EPS)
    k = np.arange(_SCAN)
    grid = _EPS + (th_hi - _EPS) * 0.5 * (1.0 - np.cos(np.pi * k / (_SCAN - 1)))
    vals = np.asarray(foc(senv, grid))
    sign = np.sign(vals)
    roots = []
    for i in range(len(grid) - 1):
        if sign[i] > 0 >= sign[i + 1]:  # down-crossing: local maximum of U
            roots.append(find_root(lambda t: float(foc(senv, t)),
                                   grid[i], grid[i + 1]))
    top_sign = sign[-1]
    zmap = {r: 1.0 - float(senv.cdf(r)) for r in roots}
    if side == "right" and top_sign > 0:
        zs = np.geomspace(_Z_SWITCH, _Z_MIN, 577)
        zsign = np.sign(np.asarray(_foc_floor_z(senv, zs)))
        for i in range(len(zs) - 1):
            if zsign[i] > 0 >= zsign[i + 1]:
                zr = find_root(lambda z: float(_foc_floor_z(senv, z)),
                               zs[i + 1], zs[i])
                tr = float(senv.cdf_inv(1.0 - zr))
                roots.append(tr)
                zmap[tr] = zr
                break
        top_sign = zsign[-1]
    candidates = [(r, True) for r in roots]
    if sign[0] <= 0:
        candidates.append((0.0, False))  # U decreasing at 0+: local max
    if top_sign >= 0:
        candidates.append((1.0, False))  # U increasing at 1-: local max
    if not candidates:
        candidates = [(0.0, False), (1.0, False)]
    util = {th: utility_at_threshold(senv, th, side) for th, _ in candidates}
    u_max = max(util.values())
    u_tie = 1e-11 * max(1.0, abs(u_max))
    # among near-ties, a polished FOC root beats a boundary point: the root
    # pins the regime even when its utility gain is below quadrature noise
    best, is_root = max(candidates,
                        key=lambda c: (util[c[0]] >= u_max - u_tie, c[1],
                                       util[c[0]]))
    z0 = zmap.get(best, 1.0 - float(senv.cdf(best)))
    return best, util[best], is_root, z0, roots


def _threshold(senv: SeparableEnv, side: str, full_output: bool = False):
    """Optimal censoring threshold (see _threshold_info)."""
    best, _, _, _, roots = _threshold_info(senv, side)
    if full_output:
        return best, roots
    return best


def threshold_floor(senv: SeparableEnv, full_output: bool = False):
    """Optimal right-censoring threshold for the score-floor mechanism.

    theta0 = 0 collapses to sole sourcing, theta0 = 1 to the symmetric auction.
    """
    return _threshold(senv, "right", full_output)


def threshold_ceiling(senv: SeparableEnv, full_output: bool = False):
    """Optimal left-censoring threshold for the score-ceiling mechanism.

    theta0 = 0 collapses to the symmetric auction, theta0 = 1 to sole sourcing.
    """
    return _threshold(senv, "left", full_output)


# --------------------------------------------------------------------------
# Buyer utility at a given threshold (1-D route used by the solvers)
# --------------------------------------------------------------------------

def _phi_sym_integral(senv: SeparableEnv, a: float, b: float, tol=1e-11) -> float:
    """int_a^b phi(1 - F(theta), theta) dF(theta).

    Substituting u = F(theta) gives
        int [H(1-u) - alpha*(1+delta)*u^delta*(1-u)] du,
    which is closed-form for power kernels g (H is itself a power of 1-u).
    """
    if a == b:
        return 0.0
    g, de, al = senv.g, senv.delta, senv.alpha
    ua, ub = float(senv.cdf(a)), float(senv.cdf(b))
    if g.name in ("power", "quadratic") and (g.name == "quadratic" or g.exponent > 1.0):
        p = 2.0 if g.name == "quadratic" else g.exponent / (g.exponent - 1.0)
        c1 = (0.5 / g.scale if g.name == "quadratic"
              else (1.0 - 1.0 / g.exponent) * g.scale ** (-1.0 / (g.exponent - 1.0)))

        def anti(u):
            return (-c1 * (1.0 - u) ** (p + 1.0) / (p + 1.0)
                    - al * (1.0 + de) * (u ** (de + 1.0) / (de + 1.0)
                                         - u ** (de + 2.0) / (de + 2.0)))

        return anti(ub) - anti(ua)

    def integrand(th):
        return float(phi_surplus(senv, 1.0 - senv.cdf(th), th)) * float(senv.pdf(th))

    return integrate(integrand, a, b, tol=tol)


def utility_at_threshold(senv: SeparableEnv, th0: float, side: str) -> float:
    """Buyer utility of the censored allocation with threshold theta0.

    Right-censoring (floor family):
        U = 2 int_0^th0 phi(1-F, th) dF + int_th0^1 phi(1-F(th0), th) dF
    Left-censoring (ceiling family):
        U = int_0^th0 [phi(1, th) + phi(1-F(th0), th)] dF
            + 2 int_th0^1 phi(1-F, th) dF
    The inner integrals against J dF are closed-form.
    """
    if not 0.0 <= th0 <= 1.0:
        raise DomainError("theta0 must lie in [0, 1]")
    F0 = float(senv.cdf(th0))
    z0 = 1.0 - F0
    H = senv.g.conjugate
    if side == "right":
        tail = (float(H(z0)) * z0
                - senv.alpha * z0 * (1.0 - float(senv.j_int(th0))))
        return 2.0 * _phi_sym_integral(senv, 0.0, th0) + tail
    if side == "left":
        head = (float(H(1.0)) * F0 - senv.alpha * float(senv.j_int(th0))
                + float(H(z0)) * F0 - senv.alpha * z0 * float(senv.j_int(th0)))
        return head + 2.0 * _phi_sym_integral(senv, th0, 1.0)
    raise InvalidParameter("side must be 'right' or 'left'")


def utility_symmetric(senv: SeparableEnv) -> float:
    """Benchmark: optimal symmetric auction, U = 2 int phi(1-F, theta) dF."""
    return 2.0 * _phi_sym_integral(senv, 0.0, 1.0)


def utility_sole(senv: SeparableEnv) -> float:
    """Benchmark: sole sourcing from the favored firm, U = H(1) - alpha."""
    return float(senv.g.conjugate(1.0)) - senv.alpha


# --------------------------------------------------------------------------
# Censored outcome functions and the 2-D utility cross-check
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CensoredOutcomes:
    """Allocation and quality functions of a censored solution.

    side "right": the favored firm's type is censored above theta0 (score
    floor); side "left": the unfavored firm's type is censored below theta0
    (score ceiling).  Ties go to the favored firm (index 1).
    """

    senv: SeparableEnv
    theta0: float
    side: str

    def quality1(self, th):
        th = np.asarray(th, dtype=float)
        if self.side == "right":
            out = np.asarray(self.senv.q_sym(np.minimum(th, self.theta0)))
        else:
            out = np.where(th < self.theta0,
                           np.asarray(self.senv.q_sym(0.0)),
                           np.asarray(self.senv.q_sym(th)))
        return float(out) if out.ndim == 0 else out

    def quality2(self, th):
        th = np.asarray(th, dtype=float)
        if self.side == "right":
            out = np.where(th < self.theta0,
                           np.asarray(self.senv.q_sym(th)),
                           np.asarray(self.senv.q_sym(1.0)))
        else:
            out = np.asarray(self.senv.q_sym(np.maximum(th, self.theta0)))
        return float(out) if out.ndim == 0 else out

    def win1(self, th1, th2):
        th1, th2 = np.asarray(th1, float), np.asarray(th2, float)
        if self.side == "right":
            out = np.minimum(th1, self.theta0) <= th2
        else:
            out = th1 <= np.maximum(th2, self.theta0)
        return np.asarray(out, dtype=float)

    def win2(self, th1, th2):
        return 1.0 - self.win1(th1, th2)


def censored_outcomes(senv: SeparableEnv, theta0: float, side: str) -> CensoredOutcomes:
    if side not in ("right", "left"):
        raise InvalidParameter("side must be 'right' or 'left'")
    if not 0.0 <= theta0 <= 1.0:
        raise DomainError("theta0 must lie in [0, 1]")
    return CensoredOutcomes(senv=senv, theta0=theta0, side=side)


def buyer_utility_asym(senv: SeparableEnv, theta0: float, side: str,
                       tol: float = 1e-11) -> float:
    """E[sum_i x(q_i, theta_i) z_i - g(q_i)] by 2-D quadrature over (th1, th2).

    Independent of utility_at_threshold (which reduces to 1-D integrals); the
    two must agree and are cross-checked in the tests.
    """
    out = censored_outcomes(senv, theta0, side)
    al, de = senv.alpha, senv.delta
    qs = senv.q_sym

    def x(q, th):
        return q - al * (1.0 + de) * th

    def dens(th1, th2):
        return float(senv.pdf(th1)) * float(senv.pdf(th2))

    th0 = theta0
    pieces = []
    kw = dict(epsabs=tol, epsrel=tol)
    if side == "right":
        # winner surplus over the four smooth regions of (th1, th2)
        if th0 > 0.0:
            pieces.append(dblquad(lambda y, t1: x(qs(t1), t1) * dens(t1, y),
                                  0.0, th0, lambda t1: t1, lambda t1: 1.0, **kw)[0])
            pieces.append(dblquad(lambda y, t1: x(qs(y), y) * dens(t1, y),
                                  0.0, th0, lambda t1: 0.0, lambda t1: t1, **kw)[0])
            pieces.append(dblquad(lambda y, t1: x(qs(y), y) * dens(t1, y),
                                  th0, 1.0, lambda t1: 0.0, lambda t1: th0, **kw)[0])
        if th0 < 1.0:
            pieces.append(dblquad(lambda y, t1: x(qs(th0), t1) * dens(t1, y),
                                  th0, 1.0, lambda t1: th0, lambda t1: 1.0, **kw)[0])
    else:
        if th0 > 0.0:
            pieces.append(integrate(
                lambda t1: x(qs(0.0), t1) * float(senv.pdf(t1)), 0.0, th0, tol=tol))
        if th0 < 1.0:
            pieces.append(dblquad(lambda y, t1: x(qs(t1), t1) * dens(t1, y),
                                  th0, 1.0, lambda t1: t1, lambda t1: 1.0, **kw)[0])
            pieces.append(dblquad(lambda y, t1: x(qs(th0), y) * dens(t1, y),
                                  th0, 1.0, lambda t1: 0.0, lambda t1: th0, **kw)[0])
            pieces.append(dblquad(lambda y, t1: x(qs(y), y) * dens(t1, y),
                                  th0, 1.0, lambda t1: th0, lambda t1: t1, **kw)[0])
    winner = sum(pieces)

    def allpay(th):
        return ((float(senv.g(out.quality1(th))) + float(senv.g(out.quality2(th))))
                * float(senv.pdf(th)))

    return winner - integrate(allpay, 0.0, 1.0, tol=tol, points=[th0])


# --------------------------------------------------------------------------
# Side payments
# --------------------------------------------------------------------------

def floor_params(senv: SeparableEnv, theta0: float) -> dict:
    """Score floor level and entry bonus of the right-censored implementation.

    S_floor = H(z0)/z0 - alpha*theta0 with z0 = 1 - F(theta0);
    B = alpha * z0 * (1 - theta0) compensates the favored firm for pooling.
    """
    if not 0.0 <= theta0 < 1.0:
        raise DomainError("floor threshold must lie in [0, 1)")
    z0 = 1.0 - float(senv.cdf(theta0))
    s_floor = float(senv.g.conjugate(z0)) / z0 - senv.alpha * theta0
    bonus = senv.alpha * z0 * (1.0 - theta0)
    return {"theta0": theta0, "score_floor": s_floor, "bonus": bonus}


def _floor_params_z(senv: SeparableEnv, z0: float) -> dict:
    """floor_params driven by z0 = 1 - F(theta0), stable when theta0 is
    within float eps of 1 (theta0 and 1 - theta0 recovered via log1p/expm1)."""
    lg = float(np.log1p(-z0))
    theta0 = float(np.exp(senv.delta * lg))
    one_minus = -float(np.expm1(senv.delta * lg))
    s_floor = float(senv.g.conjugate(z0)) / z0 - senv.alpha * theta0
    bonus = senv.alpha * z0 * one_minus
    return {"theta0": theta0, "score_floor": s_floor, "bonus": bonus}


def ceiling_params(senv: SeparableEnv, theta0: float) -> dict:
    """Score ceiling level and kickback of the left-censored implementation.

    S_ceiling = S*_sym(theta0);
    K = H(1) - H(z0)/z0 + alpha * F0/z0 * int_th0^1 (1 - F) du.
    """
    if not 0.0 <= theta0 < 1.0:
        raise DomainError("ceiling threshold must lie in [0, 1)")
    F0 = float(senv.cdf(theta0))
    z0 = 1.0 - F0
    s_ceiling = float(senv.score_sym(theta0))
    kick = (float(senv.g.conjugate(1.0)) - float(senv.g.conjugate(z0)) / z0
            + senv.alpha * F0 / z0
            * (float(senv.survival_int(1.0)) - float(senv.survival_int(theta0))))
    return {"theta0": theta0, "score_ceiling": s_ceiling, "kickback": kick}


# --------------------------------------------------------------------------
# Regime selection
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Regime:
    kind: str                   # symmetric | sole_sourcing | score_floor | score_ceiling
    theta0: float
    side: Optional[str]         # censoring side of the winning family (None if n/a)
    utility: float
    utilities: dict
    params: dict
    classification: ShapeVerdict
    thresholds: dict


_BOUND_TOL = 1e-7


def _family_result(senv: SeparableEnv, side: str):
    th0, u, is_root, z0, _ = _threshold_info(senv, side)
    return th0, u, is_root, z0


def solve_optimal(senv: SeparableEnv, tol: float = 1e-9) -> Regime:
    """Classify the environment and solve for the optimal two-firm mechanism.

    Always evaluates the symmetric and sole-sourcing benchmarks, so the
    returned utility is at least max(symmetric, sole) - tol.
    """
    verdict = classify_convexity(senv)
    u_sym = utility_symmetric(senv)
    u_sole = utility_sole(senv)
    sides = {"quasiconvex": ("right",), "quasiconcave": ("left",)}.get(
        verdict.kind, ("right", "left"))

    results = {}
    for side in sides:
        results[side] = _family_result(senv, side)

    utilities = {"symmetric": u_sym, "sole_sourcing": u_sole}
    for side, (th0, u, is_root, z0) in results.items():
        utilities["floor" if side == "right" else "ceiling"] = u

    best_u = max(r[1] for r in results.values())
    u_tie = 1e-11 * max(1.0, abs(best_u))
    # same tie-break as _threshold_info: a side that found an interior FOC
    # root wins over a boundary side whose utility differs only by noise
    side, (th0, u_best, is_root, z0) = max(
        results.items(),
        key=lambda kv: (kv[1][1] >= best_u - u_tie, kv[1][2], kv[1][1]))
    thresholds = {("floor" if s == "right" else "ceiling"): r[0]
                  for s, r in results.items()}

    if u_best < max(u_sym, u_sole) - tol:  # pragma: no cover - safety net
        raise NoRoot("censored solution dominated by a benchmark; "
                     "threshold search failed")

    if not is_root:
        at_one = th0 >= 1.0 - _BOUND_TOL
        if side == "right":
            kind = "symmetric" if at_one else "sole_sourcing"
        else:
            kind = "sole_sourcing" if at_one else "symmetric"
        params = {}
    elif side == "right":
        kind = "score_floor"
        params = _floor_params_z(senv, z0)
    else:
        kind = "score_ceiling"
        params = ceiling_params(senv, th0)

    return Regime(kind=kind, theta0=float(th0), side=side,
                  utility=float(max(u_best, u_sym, u_sole)),
                  utilities=utilities, params=params,
                  classification=verdict, thresholds=thresholds)


def regime_boundary_slack(gamma: float, alpha: float) -> float:
    """Distance of (gamma, alpha) from the closed-form regime boundaries of the
    uniform-F constant-elasticity environment."""
    cands = [abs(alpha - 1.0 / gamma), abs(alpha - (1.0 - 1.0 / gamma)),
             abs(gamma - 2.0)]
    if gamma < 2.0:
        cands.append(abs(alpha - 1.0 / (2.0 * (gamma - 1.0))))
    return min(cands)


def classify_regime_ce(gamma: float, alpha: float) -> str:
    """Closed-form regime of the uniform-F constant-elasticity environment.

    sole_sourcing  iff alpha <  min(1 - 1/gamma, 1/gamma)
    symmetric      iff gamma < 2 and alpha > 1/(2*(gamma - 1))
    score_ceiling  iff gamma <= 2 and 1 - 1/gamma < alpha < 1/(2*(gamma - 1))
    score_floor    iff gamma > 2 and alpha > 1/gamma
    """
    if gamma <= 1.0:
        raise InvalidParameter("gamma must exceed 1")
    if alpha <= 0.0:
        raise InvalidParameter("alpha must be positive")
    if alpha < min(1.0 - 1.0 / gamma, 1.0 / gamma):
        return "sole_sourcing"
    if gamma < 2.0 and alpha > 1.0 / (2.0 * (gamma - 1.0)):
        return "symmetric"
    if gamma <= 2.0 and (1.0 - 1.0 / gamma) < alpha < 1.0 / (2.0 * (gamma - 1.0)):
        return "score_ceiling"
    if gamma > 2.0 and alpha > 1.0 / gamma:
        return "score_floor"
    raise BoundaryTie(f"(gamma={gamma}, alpha={alpha}) lies on a regime boundary")


def efficient_threshold(senv: SeparableEnv, side: str) -> float:
    """Threshold of the efficient (non-virtual) censored allocation.

    With uniform F, dropping the information rent replaces the virtual cost
    2*alpha*theta by alpha*theta, i.e. re-solves the problem at alpha/2.
    """
    if senv.delta != 1.0:
        raise DomainError("efficient threshold implemented for uniform F only")
    half = SeparableEnv(alpha=senv.alpha / 2.0, delta=1.0, g=senv.g)
    return _threshold(half, side)
