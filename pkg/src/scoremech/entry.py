"""Restricted entry: buyer utility from admitting k of n symmetric firms.

With uniformly distributed types, running the optimal symmetric mechanism
among k entrants yields

    U(k) = int_0^1 k * [H((1-th)^(k-1)) - 2*alpha*th*(1-th)^(k-1)] dth,

with H(z) = max_q (q*z - g(q)).  U is quasi-convex in k under a growth
condition on g, so the optimal entry is one firm or all firms.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameter, ScoremechError
from .numerics import ShapeVerdict, find_root, integrate, quasi_shape
from .asymmetric import SeparableEnv

_FRACTIONAL_SAMPLES = 33


def _require_uniform(senv: SeparableEnv):
    if abs(senv.delta - 1.0) > 1e-12:
        raise DomainError("restricted-entry analysis requires uniform types "
                          "(delta = 1)")


def _u_of_k(g, alpha: float, k: float, tol: float = 1e-11) -> float:
    """U(k) by quadrature; k may be fractional (the shape argument treats the
    number of firms as continuous)."""
    if k < 1.0:
        raise DomainError("k must be at least 1")
    H = g.conjugate

    def integrand(th):
        w = (1.0 - th) ** (k - 1.0)
        return k * (float(H(w)) - 2.0 * alpha * th * w)

    return integrate(integrand, 0.0, 1.0, tol=tol)


def utility_restricted(senv: SeparableEnv, k: int, tol: float = 1e-11) -> float:
    """Buyer utility of the optimal symmetric mechanism among k entrants."""
    _require_uniform(senv)
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    return _u_of_k(senv.g, senv.alpha, float(k), tol=tol)


def utility_restricted_quadratic(alpha: float, k: float) -> float:
    """Closed form for g(q) = q^2/2: U(k) = k/(2(2k-1)) - 2*alpha/(k+1).

    (H(z) = z^2/2; the two beta integrals evaluate to 1/(2(2k-1)) and
    1/(k(k+1)).)
    """
    return k / (2.0 * (2.0 * k - 1.0)) - 2.0 * alpha / (k + 1.0)


def g_condition_holds(g, q_hi: float, samples: int = 256) -> bool:
    """Check numerically that g(q)/sqrt(g'(q)) is strictly increasing.

    This is the hypothesis under which U(k) is quasi-convex and entry is
    one-or-all; checked on (0, q_hi] and reported, never assumed.
    """
    qs = np.linspace(q_hi / samples, q_hi, samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(g(qs)) / np.sqrt(np.asarray(g.deriv(qs)))
    if not np.all(np.isfinite(vals)):
        return False
    return bool(np.all(np.diff(vals) > -1e-12 * max(1.0, float(vals[-1]))))


@dataclass(frozen=True)
class EntryCurve:
    k: np.ndarray               # 1..n
    utility: np.ndarray         # U(k)
    k_star: int
    shape: ShapeVerdict         # over integer k
    fractional_shape: ShapeVerdict  # over a fractional k grid (continuous proof)
    hypothesis_ok: bool         # g/sqrt(g') increasing check
    one_or_all: bool            # k_star in {1, n}

    def rows(self):
        """(k, U(k), is_argmax) rows for CSV emission."""
        return [(int(k), float(u), int(k) == self.k_star)
                for k, u in zip(self.k, self.utility)]


def optimal_entry(senv: SeparableEnv, n: int, tol: float = 1e-11) -> EntryCurve:
    """Evaluate U(k) for k = 1..n and locate the optimal entry.

    When the g-condition holds, the one-or-all property (optimal k is 1 or n)
    is asserted; a failing condition only flags hypothesis_ok = False and the
    curve is still returned.
    """
    _require_uniform(senv)
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    ks = np.arange(1, n + 1, dtype=float)
    us = np.array([_u_of_k(senv.g, senv.alpha, k, tol=tol) for k in ks])
    k_star = int(ks[int(np.argmax(us))])
    shape = quasi_shape(-us)        # quasi-convex U <=> quasi-concave -U
    shape = ShapeVerdict(kind={"quasiconcave": "quasiconvex",
                               "quasiconvex": "quasiconcave",
                               "increasing": "decreasing",
                               "decreasing": "increasing"}.get(shape.kind,
                                                               shape.kind),
                         witness=shape.witness)
    if n > 1:
        fks = np.linspace(1.0, float(n), _FRACTIONAL_SAMPLES)
        fus = np.array([_u_of_k(senv.g, senv.alpha, k, tol=tol) for k in fks])
        fshape = quasi_shape(fus)
    else:
        fshape = ShapeVerdict(kind="constant", witness=None)
    hypothesis = g_condition_holds(senv.g, senv.q_top)
    one_or_all = k_star in (1, n)
    if hypothesis and not one_or_all:
        raise ScoremechError("g-condition holds but the optimal entry is "
                             f"interior (k* = {k_star}); this contradicts "
                             "the one-or-all property")
    return EntryCurve(k=ks.astype(int), utility=us, k_star=k_star,
                      shape=shape, fractional_shape=fshape,
                      hypothesis_ok=hypothesis, one_or_all=one_or_all)


def alpha_crossover(senv: SeparableEnv, n: int, lo: float = 1e-3,
                    hi: float = 4.0) -> float:
    """The alpha at which U(1) = U(n), found by bisection.

    Below it a single supplier is optimal; above it admitting everyone wins
    (higher production-cost stakes make competition for the contract more
    valuable).  U(n) - U(1) is affine and increasing in alpha, so the root is
    unique when bracketed.
    """
    _require_uniform(senv)
    if n < 2:
        raise InvalidParameter("crossover needs n >= 2")

    def gap(alpha):
        return (_u_of_k(senv.g, alpha, float(n))
                - _u_of_k(senv.g, alpha, 1.0))

    return find_root(gap, lo, hi)
