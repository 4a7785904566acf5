"""Procurement environments.

An environment bundles the buyer's value V(q), the winner-pay (production)
cost C^P(q, theta), the all-pay (investment) cost C^I(q, theta), and the type
distribution F on [0, 1].  Three built-in families are provided:

* constant_elasticity:  V(q) = q, C^P = alpha*theta, C^I = beta*q^gamma/gamma,
  F(theta) = theta.
* power_elasticity:     V(q) = 8q - q^2/2, C^P = theta^e_p * q,
  C^I = beta * theta^e_i * q^2/2, F(theta) = theta^(1/delta).
* separable_custom:     V per descriptor (default q), C^P = alpha*theta,
  C^I = g(q) from a named descriptor, F(theta) = theta^(1/delta).

All families share F(theta) = theta^(1/delta), for which F/f = delta*theta,
so virtual costs are Ctilde(q, theta) = C(q, theta) + C_theta * delta * theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DomainError, InvalidParameter, MissingField, NoRoot,
                     OutOfRange, UnknownField)
from .numerics import find_root

__all__ = [
    "Environment",
    "GFunction",
    "VFunction",
    "RegularityReport",
    "make_environment",
    "virtual_cost_p",
    "virtual_cost_i",
    "virtual_surplus_x",
    "indirect_cost",
    "check_regularity",
]

# Value intercept of the power_elasticity family: V(q) = PE_V0*q - q^2/2.
PE_V0 = 8.0


@dataclass(frozen=True)
class GFunction:
    """Investment cost kernel g(q) with g(0) = 0 and g' increasing.

    name "power":     g = scale * q^exponent / exponent
    name "quadratic": g = scale * q^2 / 2
    name "exp":       g = scale * (exp(q) - 1)
    """

    name: str
    scale: float = 1.0
    exponent: float = 2.0

    def __post_init__(self):
        if self.name not in ("power", "quadratic", "exp"):
            raise InvalidParameter(f"unknown g kernel {self.name!r}")
        if self.scale <= 0:
            raise InvalidParameter("g scale must be positive")
        if self.name == "power" and self.exponent <= 0:
            raise InvalidParameter("g exponent must be positive")

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        if self.name == "power":
            out = self.scale * q ** self.exponent / self.exponent
        elif self.name == "quadratic":
            out = self.scale * q * q / 2.0
        else:
            out = self.scale * np.expm1(q)
        return float(out) if out.ndim == 0 else out

    def deriv(self, q):
        q = np.asarray(q, dtype=float)
        if self.name == "power":
            with np.errstate(divide="ignore"):
                out = self.scale * q ** (self.exponent - 1.0)
        elif self.name == "quadratic":
            out = self.scale * q
        else:
            out = self.scale * np.exp(q)
        return float(out) if out.ndim == 0 else out

    def deriv2(self, q):
        q = np.asarray(q, dtype=float)
        if self.name == "power":
            with np.errstate(divide="ignore"):
                out = self.scale * (self.exponent - 1.0) * q ** (self.exponent - 2.0)
        elif self.name == "quadratic":
            out = np.full_like(q, self.scale)
        else:
            out = self.scale * np.exp(q)
        return float(out) if out.ndim == 0 else out

    def inv_deriv(self, z):
        """Solve g'(q) = z for q >= 0 (clipped at 0 when g'(0) > z)."""
        z = np.asarray(z, dtype=float)
        if self.name == "power":
            out = np.where(z > 0, (np.maximum(z, 0) / self.scale)
                           ** (1.0 / (self.exponent - 1.0)), 0.0)
        elif self.name == "quadratic":
            out = np.maximum(z, 0.0) / self.scale
        else:
            out = np.where(z > self.scale, np.log(np.maximum(z, self.scale) / self.scale), 0.0)
        return float(out) if out.ndim == 0 else out

    def conjugate(self, z):
        """H(z) = max_q [q*z - g(q)], the convex conjugate on q >= 0."""
        q = self.inv_deriv(z)
        out = np.asarray(q * np.asarray(z, dtype=float) - self(q))
        out = np.maximum(out, 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class VFunction:
    """Buyer value kernel.  name "linear": V = scale*q; "power": V = scale*q^exponent;
    "quadratic_cap": V = scale*q - q^2/2."""

    name: str = "linear"
    scale: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.name not in ("linear", "power", "quadratic_cap"):
            raise InvalidParameter(f"unknown v kernel {self.name!r}")

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        if self.name == "linear":
            out = self.scale * q
        elif self.name == "power":
            out = self.scale * q ** self.exponent
        else:
            out = self.scale * q - q * q / 2.0
        return float(out) if out.ndim == 0 else out

    def deriv(self, q):
        q = np.asarray(q, dtype=float)
        if self.name == "linear":
            out = np.full_like(q, self.scale)
        elif self.name == "power":
            out = self.scale * self.exponent * q ** (self.exponent - 1.0)
        else:
            out = self.scale - q
        return float(out) if out.ndim == 0 else out

    def deriv2(self, q):
        q = np.asarray(q, dtype=float)
        if self.name == "linear":
            out = np.zeros_like(q)
        elif self.name == "power":
            out = (self.scale * self.exponent * (self.exponent - 1.0)
                   * q ** (self.exponent - 2.0))
        else:
            out = np.full_like(q, -1.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Environment:
    """A fully specified procurement environment.  Build via make_environment."""

    family: str
    n: int
    alpha: float = 0.0
    beta: float = 1.0
    gamma: float = 2.0
    delta: float = 1.0
    e_p: float = 1.0
    e_i: float = 1.0
    g: Optional[GFunction] = None
    v: VFunction = field(default_factory=VFunction)

    # ----- type distribution: F(theta) = theta^(1/delta) ------------------
    def cdf(self, th):
        th = np.asarray(th, dtype=float)
        out = th ** (1.0 / self.delta)
        return float(out) if out.ndim == 0 else out

    def cdf_inv(self, u):
        u = np.asarray(u, dtype=float)
        out = u ** self.delta
        return float(out) if out.ndim == 0 else out

    def pdf(self, th):
        th = np.asarray(th, dtype=float)
        out = (1.0 / self.delta) * th ** (1.0 / self.delta - 1.0)
        return float(out) if out.ndim == 0 else out

    def rent_weight(self, th):
        """F(theta)/f(theta) = delta * theta."""
        th = np.asarray(th, dtype=float)
        out = self.delta * th
        return float(out) if out.ndim == 0 else out

    # ----- value -----------------------------------------------------------
    def value(self, q):
        return self.v(q)

    def value_q(self, q):
        return self.v.deriv(q)

    def value_qq(self, q):
        return self.v.deriv2(q)

    # ----- production cost C^P and partials --------------------------------
    def cp(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = th ** self.e_p * q
        else:
            out = self.alpha * th * np.ones_like(np.asarray(q * th))
        return float(out) if out.ndim == 0 else out

    def cp_q(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = th ** self.e_p * np.ones_like(q * th)
        else:
            out = np.zeros_like(np.asarray(q * th, float))
        return float(out) if out.ndim == 0 else out

    def cp_th(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = self.e_p * th ** (self.e_p - 1.0) * q
        else:
            out = self.alpha * np.ones_like(np.asarray(q * th, float))
        return float(out) if out.ndim == 0 else out

    def cp_qq(self, q, th):
        out = np.zeros_like(np.asarray(q, float) * np.asarray(th, float))
        return float(out) if out.ndim == 0 else out

    def cp_qth(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = self.e_p * th ** (self.e_p - 1.0) * np.ones_like(q * th)
        else:
            out = np.zeros_like(np.asarray(q * th, float))
        return float(out) if out.ndim == 0 else out

    # ----- investment cost C^I and partials ---------------------------------
    def ci(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "constant_elasticity":
            out = self.beta * q ** self.gamma / self.gamma * np.ones_like(q * th)
        elif self.family == "power_elasticity":
            out = self.beta * th ** self.e_i * q * q / 2.0
        else:
            out = self.g(q) * np.ones_like(q * th)
        return float(out) if out.ndim == 0 else out

    def ci_q(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "constant_elasticity":
            out = self.beta * q ** (self.gamma - 1.0) * np.ones_like(q * th)
        elif self.family == "power_elasticity":
            out = self.beta * th ** self.e_i * q
        else:
            out = self.g.deriv(q) * np.ones_like(q * th)
        return float(out) if out.ndim == 0 else out

    def ci_th(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = self.beta * self.e_i * th ** (self.e_i - 1.0) * q * q / 2.0
        else:
            out = np.zeros_like(np.asarray(q * th, float))
        return float(out) if out.ndim == 0 else out

    def ci_qq(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "constant_elasticity":
            with np.errstate(divide="ignore"):
                out = (self.beta * (self.gamma - 1.0)
                       * q ** (self.gamma - 2.0) * np.ones_like(q * th))
        elif self.family == "power_elasticity":
            out = self.beta * th ** self.e_i * np.ones_like(q * th)
        else:
            out = self.g.deriv2(q) * np.ones_like(q * th)
        return float(out) if out.ndim == 0 else out

    def ci_qth(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = self.beta * self.e_i * th ** (self.e_i - 1.0) * q
        else:
            out = np.zeros_like(np.asarray(q * th, float))
        return float(out) if out.ndim == 0 else out

    # ----- virtual (information-adjusted) costs -----------------------------
    # Ctilde = C + C_theta * delta * theta; closed forms per family.
    def cpt(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = (1.0 + self.delta * self.e_p) * th ** self.e_p * q
        else:
            out = self.alpha * (1.0 + self.delta) * th * np.ones_like(np.asarray(q * th))
        return float(out) if out.ndim == 0 else out

    def cpt_q(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = (1.0 + self.delta * self.e_p) * th ** self.e_p * np.ones_like(q * th)
        else:
            out = np.zeros_like(np.asarray(q * th, float))
        return float(out) if out.ndim == 0 else out

    def cpt_qq(self, q, th):
        out = np.zeros_like(np.asarray(q, float) * np.asarray(th, float))
        return float(out) if out.ndim == 0 else out

    def cpt_th(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = ((1.0 + self.delta * self.e_p) * self.e_p
                   * th ** (self.e_p - 1.0) * q)
        else:
            out = self.alpha * (1.0 + self.delta) * np.ones_like(np.asarray(q * th, float))
        return float(out) if out.ndim == 0 else out

    def cpt_qth(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = ((1.0 + self.delta * self.e_p) * self.e_p
                   * th ** (self.e_p - 1.0) * np.ones_like(q * th))
        else:
            out = np.zeros_like(np.asarray(q * th, float))
        return float(out) if out.ndim == 0 else out

    def cit(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = self.beta * (1.0 + self.delta * self.e_i) * th ** self.e_i * q * q / 2.0
            return float(out) if out.ndim == 0 else out
        return self.ci(q, th)

    def cit_q(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = self.beta * (1.0 + self.delta * self.e_i) * th ** self.e_i * q
            return float(out) if out.ndim == 0 else out
        return self.ci_q(q, th)

    def cit_qq(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = (self.beta * (1.0 + self.delta * self.e_i) * th ** self.e_i
                   * np.ones_like(q * th))
            return float(out) if out.ndim == 0 else out
        return self.ci_qq(q, th)

    def cit_th(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = (self.beta * (1.0 + self.delta * self.e_i) * self.e_i
                   * th ** (self.e_i - 1.0) * q * q / 2.0)
            return float(out) if out.ndim == 0 else out
        return self.ci_th(q, th)

    def cit_qth(self, q, th):
        q, th = np.asarray(q, float), np.asarray(th, float)
        if self.family == "power_elasticity":
            out = (self.beta * (1.0 + self.delta * self.e_i) * self.e_i
                   * th ** (self.e_i - 1.0) * q)
            return float(out) if out.ndim == 0 else out
        return self.ci_qth(q, th)

    def ci_ratio(self, q, th):
        """C^I_q / Ctilde^I_q, which is constant within each built-in family."""
        if self.family == "power_elasticity":
            return 1.0 / (1.0 + self.delta * self.e_i)
        return 1.0

    # ----- misc --------------------------------------------------------------
    @property
    def zero_marginal_investment_at_zero(self) -> bool:
        """True when C^I_q(0, theta) = 0, so the bottom quality is 0."""
        if self.family == "constant_elasticity":
            return self.gamma > 1.0
        if self.family == "power_elasticity":
            return True
        return float(self.g.deriv(0.0)) == 0.0

    @property
    def q_max(self) -> float:
        """Upper bound of the quality search box (4x the monopoly quality)."""
        if self.family == "constant_elasticity":
            return 4.0 * self.beta ** (-1.0 / (self.gamma - 1.0))
        if self.family == "power_elasticity":
            return PE_V0  # where V'(q) = 0; FOC solutions never exceed it
        try:
            qm = find_root(lambda q: self.value_q(q) - self.g.deriv(q), 1e-12, 64.0)
        except NoRoot:
            return 4.0
        return max(4.0 * qm, 1.0)

    def separable(self) -> bool:
        """True when C^P is independent of q and C^I of theta (with V linear)."""
        return (self.family in ("constant_elasticity", "separable_custom")
                and self.v.name == "linear" and self.v.scale == 1.0)

    def g_kernel(self) -> GFunction:
        """The investment kernel g(q) for separable environments."""
        if self.family == "constant_elasticity":
            return GFunction("power", scale=self.beta, exponent=self.gamma)
        if self.family == "separable_custom":
            return self.g
        raise DomainError("environment is not separable")


# --------------------------------------------------------------------------
# Construction and validation
# --------------------------------------------------------------------------

_FAMILY_ALIASES = {
    "constant_elasticity": "constant_elasticity",
    "ce": "constant_elasticity",
    "power_elasticity": "power_elasticity",
    "pe": "power_elasticity",
    "separable_custom": "separable_custom",
    "sc": "separable_custom",
}

_ALLOWED_KEYS = {
    "constant_elasticity": {"family", "n", "alpha", "beta", "gamma"},
    "power_elasticity": {"family", "n", "beta", "delta", "e_p", "e_i"},
    "separable_custom": {"family", "n", "alpha", "delta", "g", "v"},
}


def _require_positive(name: str, value: float, strict: bool = True):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a number, got {value!r}")
    if (value <= 0 if strict else value < 0) or not math.isfinite(value):
        raise InvalidParameter(f"{name} must be {'positive' if strict else 'non-negative'}")
    return value


def make_environment(config: dict) -> Environment:
    """Validate a configuration mapping and build an Environment.

    Unknown keys are rejected; missing required keys raise MissingField.
    """
    if not isinstance(config, dict):
        raise InvalidParameter("environment config must be a mapping")
    if "family" not in config:
        raise MissingField("family")
    fam = _FAMILY_ALIASES.get(str(config["family"]).lower())
    if fam is None:
        raise InvalidParameter(f"unknown family {config['family']!r}")
    extra = set(config) - _ALLOWED_KEYS[fam]
    if extra:
        raise UnknownField(f"unknown keys for {fam}: {sorted(extra)}")
    if "n" not in config:
        raise MissingField("n")
    n = config["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidParameter("n must be an integer >= 1")

    if fam == "constant_elasticity":
        if "alpha" not in config:
            raise MissingField("alpha")
        if "gamma" not in config:
            raise MissingField("gamma")
        alpha = _require_positive("alpha", config["alpha"], strict=False)
        gamma = _require_positive("gamma", config["gamma"])
        if gamma <= 1.0:
            raise InvalidParameter("gamma must exceed 1")
        beta = _require_positive("beta", config.get("beta", 1.0))
        return Environment(family=fam, n=n, alpha=alpha, beta=beta,
                           gamma=gamma, delta=1.0)

    if fam == "power_elasticity":
        e_p = _require_positive("e_p", config.get("e_p", 1.0))
        e_i = _require_positive("e_i", config.get("e_i", 1.0))
        delta = _require_positive("delta", config.get("delta", 1.0))
        beta = _require_positive("beta", config.get("beta", 1.0))
        if 1.0 + delta * e_p >= PE_V0:
            raise InvalidParameter(
                f"power_elasticity requires (1 + delta*e_p) < {PE_V0} "
                "so interior quality exists for every type")
        return Environment(family=fam, n=n, beta=beta, delta=delta,
                           e_p=e_p, e_i=e_i,
                           v=VFunction("quadratic_cap", scale=PE_V0))

    # separable_custom
    if "alpha" not in config:
        raise MissingField("alpha")
    alpha = _require_positive("alpha", config["alpha"], strict=False)
    delta = _require_positive("delta", config.get("delta", 1.0))
    gspec = config.get("g")
    if gspec is None:
        raise MissingField("g")
    if not isinstance(gspec, dict) or "name" not in gspec:
        raise InvalidParameter("g descriptor must be a mapping with a 'name'")
    gkw = {k: v for k, v in gspec.items() if k != "name"}
    if set(gkw) - {"scale", "exponent"}:
        raise UnknownField(f"unknown g keys: {sorted(set(gkw) - {'scale', 'exponent'})}")
    g = GFunction(gspec["name"], **gkw)
    vspec = config.get("v")
    if vspec is None:
        v = VFunction()
    else:
        if not isinstance(vspec, dict) or "name" not in vspec:
            raise InvalidParameter("v descriptor must be a mapping with a 'name'")
        vkw = {k: val for k, val in vspec.items() if k != "name"}
        if set(vkw) - {"scale", "exponent"}:
            raise UnknownField(f"unknown v keys: {sorted(set(vkw) - {'scale', 'exponent'})}")
        v = VFunction(vspec["name"], **vkw)
    return Environment(family=fam, n=n, alpha=alpha, delta=delta, g=g, v=v)


# --------------------------------------------------------------------------
# Spec-level operations
# --------------------------------------------------------------------------

def _check_theta(th):
    arr = np.asarray(th, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("theta must lie in [0, 1]")


def virtual_cost_p(env: Environment, q, th):
    """Ctilde^P(q, theta) = C^P + C^P_theta * F/f."""
    _check_theta(th)
    return env.cpt(q, th)


def virtual_cost_i(env: Environment, q, th):
    """Ctilde^I(q, theta) = C^I + C^I_theta * F/f."""
    _check_theta(th)
    return env.cit(q, th)


def virtual_surplus_x(env: Environment, q, th):
    """x(q, theta) = V(q) - Ctilde^P(q, theta)."""
    _check_theta(th)
    q_arr = np.asarray(q, dtype=float)
    if np.any(q_arr < 0):
        raise DomainError("quality must be non-negative")
    out = np.asarray(env.value(q)) - np.asarray(env.cpt(q, th))
    return float(out) if out.ndim == 0 else out


def _x_peak(env: Environment, th: float) -> float:
    """Quality maximizing x(., theta) on [0, q_max]."""
    qm = env.q_max
    d0 = env.value_q(0.0) - env.cpt_q(0.0, th)
    d1 = env.value_q(qm) - env.cpt_q(qm, th)
    if d0 <= 0:
        return 0.0
    if d1 >= 0:
        return qm
    return find_root(lambda q: env.value_q(q) - env.cpt_q(q, th), 0.0, qm)


def indirect_cost(env: Environment, x: float, th: float) -> float:
    """Ctilde^I at the lowest quality delivering virtual surplus x at type theta.

    Raises OutOfRange when x is unattainable on [0, q_max].
    """
    _check_theta(th)
    qp = _x_peak(env, th)
    x_lo = virtual_surplus_x(env, 0.0, th)
    x_hi = virtual_surplus_x(env, qp, th)
    if x > x_hi or x < x_lo:
        raise OutOfRange(f"surplus {x} unattainable; range is [{x_lo}, {x_hi}]")
    if x == x_lo:
        q = 0.0
    else:
        q = find_root(lambda u: virtual_surplus_x(env, u, th) - x, 0.0, qp)
    return float(env.cit(q, th))


@dataclass(frozen=True)
class RegularityReport:
    passed: bool
    checks: tuple
    violations: tuple

    def failed_checks(self):
        return sorted({v["check"] for v in self.violations})


_EPS_TH = 1e-6


def check_regularity(env: Environment, grid: int = 33) -> RegularityReport:
    """Evaluate the maintained cost/value inequalities on a (q, theta) grid.

    Inequalities that degenerate to equalities in separable families (e.g.
    C^P_q = 0) are checked weakly; curvature and single-crossing conditions
    needed by the solvers are checked strictly.
    """
    if grid < 16:
        raise InvalidParameter("grid must be at least 16 points per axis")
    qm = env.q_max
    qs = np.linspace(qm / grid, qm, grid)
    ths = np.linspace(_EPS_TH, 1.0 - _EPS_TH, grid)
    Q, T = np.meshgrid(qs, ths, indexing="ij")

    battery = [
        ("cp_q_nonneg", env.cp_q(Q, T), 0.0, False),
        ("cp_theta_pos", env.cp_th(Q, T), 0.0, True),
        ("ci_q_pos", env.ci_q(Q, T), 0.0, True),
        ("ci_theta_nonneg", env.ci_th(Q, T), 0.0, False),
        ("cp_qtheta_nonneg", env.cp_qth(Q, T), 0.0, False),
        ("ci_qtheta_nonneg", env.ci_qth(Q, T), 0.0, False),
        ("vcp_theta_pos", env.cpt_th(Q, T), 0.0, True),
        ("vcp_qq_nonneg", env.cpt_qq(Q, T), 0.0, False),
        ("vci_qq_pos", env.cit_qq(Q, T), 0.0, True),
        ("vci_theta_nonneg", env.cit_th(Q, T), 0.0, False),
        ("vcp_qtheta_nonneg", env.cpt_qth(Q, T), 0.0, False),
        ("vci_qtheta_nonneg", env.cit_qth(Q, T), 0.0, False),
        ("v_q_nonneg", env.value_q(Q), 0.0, False),
        ("v_qq_nonpos", -np.asarray(env.value_qq(Q)), 0.0, False),
    ]
    violations = []
    checks = []
    tol = 1e-12
    for name, vals, bound, strict in battery:
        vals = np.broadcast_to(np.asarray(vals, float), Q.shape)
        bad = vals < bound - tol if not strict else vals <= bound
        checks.append(name)
        if np.any(bad):
            i, j = np.unravel_index(int(np.argmin(vals)), Q.shape)
            violations.append({"check": name, "q": float(Q[i, j]),
                               "theta": float(T[i, j]), "value": float(vals[i, j])})

    # anchoring of the all-pay cost at q = 0
    checks.append("ci_zero_at_q0")
    ci0 = np.asarray(env.ci(0.0, ths), float)
    ciq0 = np.asarray(env.ci_q(0.0, ths), float)
    if np.any(np.abs(ci0) > 1e-12) or np.any(np.abs(ciq0) > 1e-12):
        violations.append({"check": "ci_zero_at_q0", "q": 0.0,
                           "theta": float(ths[int(np.argmax(np.abs(ci0) + np.abs(ciq0)))]),
                           "value": float(np.max(np.abs(ci0) + np.abs(ciq0)))})

    # Inada-style bracketing of the quality first-order condition
    checks.append("inada_at_zero")
    lo = np.asarray(env.value_q(0.0) - env.cpt_q(0.0, ths), float)
    lo = np.broadcast_to(lo, ths.shape)
    if np.any(lo <= 0):
        j = int(np.argmin(lo))
        violations.append({"check": "inada_at_zero", "q": 0.0,
                           "theta": float(ths[j]), "value": float(lo[j])})
    checks.append("inada_at_qmax")
    hi = np.asarray(env.value_q(qm) - env.cpt_q(qm, ths) - env.cit_q(qm, ths), float)
    hi = np.broadcast_to(hi, ths.shape)
    if np.any(hi >= 0):
        j = int(np.argmax(hi))
        violations.append({"check": "inada_at_qmax", "q": float(qm),
                           "theta": float(ths[j]), "value": float(hi[j])})

    return RegularityReport(passed=not violations, checks=tuple(checks),
                            violations=tuple(violations))
