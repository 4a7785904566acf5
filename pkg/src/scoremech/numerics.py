"""Shared numerical utilities: monotone tabulations, shape detection, quadrature.

Root finding is Brent's method (scipy.optimize.brentq), quadrature is adaptive
Gauss-Kronrod (scipy.integrate.quad), and monotone interpolation is the
shape-preserving piecewise cubic of Fritsch-Carlson (scipy PchipInterpolator).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _sciint
from scipy import optimize as _sciopt
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NoConvergence, NonMonotone, NoRoot

__all__ = [
    "Tabulated",
    "TabulatedMonotone",
    "ShapeVerdict",
    "quasi_shape",
    "integrate",
    "find_root",
    "cheb_grid",
    "minimize_scalar_bounded",
]


def cheb_grid(num: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Chebyshev-Lobatto points on [lo, hi], clustered at both endpoints."""
    if num < 2:
        raise DomainError("grid needs at least 2 points")
    k = np.arange(num)
    t = 0.5 * (1.0 - np.cos(np.pi * k / (num - 1)))
    return lo + (hi - lo) * t


@dataclass(frozen=True)
class ShapeVerdict:
    """Result of a quasi-shape scan over sampled values.

    kind is one of: increasing, decreasing, quasiconvex, quasiconcave,
    constant, neither.  witness holds the indices where the sign of the
    first differences changes (empty for monotone/constant data).
    """

    kind: str
    witness: tuple = ()

    @property
    def is_monotone(self) -> bool:
        return self.kind in ("increasing", "decreasing", "constant")


def quasi_shape(values: Sequence[float], strict_tol: float | None = None) -> ShapeVerdict:
    """Classify sampled values by the sign pattern of first differences.

    Differences smaller in magnitude than strict_tol are treated as flat.
    Default tolerance is 1e-9 * (max - min) of the data.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 3:
        raise DomainError("quasi_shape needs a 1-D sample of at least 3 points")
    if strict_tol is None:
        strict_tol = 1e-9 * max(float(v.max() - v.min()), 1e-300)
    d = np.diff(v)
    signs = np.where(d > strict_tol, 1, np.where(d < -strict_tol, -1, 0))
    pattern = []
    witness = []
    for i, s in enumerate(signs):
        if s == 0:
            continue
        if not pattern or pattern[-1] != s:
            pattern.append(int(s))
            if len(pattern) > 1:
                witness.append(i)
    if not pattern:
        return ShapeVerdict("constant")
    if pattern == [1]:
        return ShapeVerdict("increasing")
    if pattern == [-1]:
        return ShapeVerdict("decreasing")
    if pattern == [-1, 1]:
        return ShapeVerdict("quasiconvex", tuple(witness))
    if pattern == [1, -1]:
        return ShapeVerdict("quasiconcave", tuple(witness))
    return ShapeVerdict("neither", tuple(witness))


class Tabulated:
    """A scalar function tabulated on knots (no monotonicity requirement)."""

    def __init__(self, x: Sequence[float], y: Sequence[float]):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise DomainError("knots must be matching 1-D arrays with >= 2 points")
        if np.any(np.diff(x) <= 0):
            raise NonMonotone("knot abscissae must be strictly increasing")
        self._x, self._y = x, y
        self._interp = PchipInterpolator(x, y, extrapolate=False)

    @property
    def x(self):
        return self._x

    @property
    def y(self):
        return self._y

    @property
    def domain(self):
        return float(self._x[0]), float(self._x[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
            raise DomainError(f"argument outside tabulated domain [{lo}, {hi}]")
        out = self._interp(np.clip(x, lo, hi))
        return float(out) if out.ndim == 0 else out


class TabulatedMonotone:
    """A monotone function tabulated on knots with a shape-preserving cubic.

    Inversion solves tab(x) = y by Brent's method on the bracketing knot
    interval, so round trips satisfy |tab(invert(y)) - y| <= invert_tol.
    """

    def __init__(self, x: Sequence[float], y: Sequence[float], *, strict: bool = True,
                 invert_tol: float = 1e-9):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise DomainError("knots must be matching 1-D arrays with >= 2 points")
        if np.any(np.diff(x) <= 0):
            raise NonMonotone("knot abscissae must be strictly increasing")
        dy = np.diff(y)
        if np.all(dy >= 0):
            self.direction = 1
        elif np.all(dy <= 0):
            self.direction = -1
        else:
            raise NonMonotone("knot ordinates are not monotone")
        if strict and np.any(dy * self.direction <= 0):
            raise NonMonotone("knot ordinates are not strictly monotone")
        self._x = x
        self._y = y
        self._strict = strict
        self._interp = PchipInterpolator(x, y, extrapolate=False)
        self._scale = max(float(np.max(np.abs(y))), 1e-30)
        self._invert_tol = invert_tol * self._scale

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def domain(self) -> tuple:
        return float(self._x[0]), float(self._x[-1])

    @property
    def range(self) -> tuple:
        lo, hi = float(min(self._y[0], self._y[-1])), float(max(self._y[0], self._y[-1]))
        return lo, hi

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
            raise DomainError(f"argument outside tabulated domain [{lo}, {hi}]")
        out = self._interp(np.clip(x, lo, hi))
        return float(out) if out.ndim == 0 else out

    def derivative(self, x):
        lo, hi = self.domain
        out = self._interp.derivative()(np.clip(np.asarray(x, dtype=float), lo, hi))
        return float(out) if out.ndim == 0 else out

    def invert(self, y: float) -> float:
        """Solve tab(x) = y; raises OutOfRange-flavoured DomainError outside range."""
        lo, hi = self.range
        if not (lo - self._invert_tol <= y <= hi + self._invert_tol):
            raise DomainError(f"value {y} outside tabulated range [{lo}, {hi}]")
        y = min(max(y, lo), hi)
        yk = self._y if self.direction > 0 else self._y[::-1]
        xk = self._x if self.direction > 0 else self._x[::-1]
        j = int(np.searchsorted(yk, y))
        j = min(max(j, 1), len(yk) - 1)
        a, b = sorted((xk[j - 1], xk[j]))
        fa = float(self._interp(a)) - y
        fb = float(self._interp(b)) - y
        if fa == 0.0:
            return float(a)
        if fb == 0.0:
            return float(b)
        if fa * fb > 0:
            # flat segment under non-strict tabulation: return nearest knot
            if abs(fa) <= self._invert_tol:
                return float(a)
            if abs(fb) <= self._invert_tol:
                return float(b)
            raise NoRoot("no bracket for inversion (flat segment?)")
        return float(_sciopt.brentq(lambda t: float(self._interp(t)) - y, a, b,
                                    xtol=1e-14, rtol=8.9e-16))


def integrate(fn: Callable[[float], float], a: float, b: float, *,
              tol: float = 1e-9, points: Sequence[float] | None = None) -> float:
    """Adaptive quadrature of fn over [a, b] to relative tolerance tol."""
    if a == b:
        return 0.0
    kw = {"epsabs": tol, "epsrel": tol, "limit": 200}
    if points is not None:
        pts = [p for p in points if min(a, b) < p < max(a, b)]
        if pts:
            kw["points"] = pts
    val, err = _sciint.quad(fn, a, b, **kw)
    if not np.isfinite(val):
        raise NoConvergence("quadrature produced a non-finite value")
    if err > max(tol, 100 * tol * abs(val)) and err > 1e-7 * max(abs(val), 1.0):
        raise NoConvergence(f"quadrature error estimate {err} above tolerance")
    return float(val)


def find_root(fn: Callable[[float], float], a: float, b: float, *,
              tol: float = 1e-12) -> float:
    """Bracketed root of fn on [a, b] via Brent's method."""
    fa, fb = fn(a), fn(b)
    if fa == 0.0:
        return float(a)
    if fb == 0.0:
        return float(b)
    if fa * fb > 0:
        raise NoRoot(f"no sign change on [{a}, {b}]")
    return float(_sciopt.brentq(fn, a, b, xtol=tol, rtol=8.9e-16, maxiter=200))


def minimize_scalar_bounded(fn: Callable[[float], float], lo: float, hi: float,
                            *, tol: float = 1e-10) -> tuple:
    """Minimize fn on [lo, hi]; returns (argmin, min).  Checks the endpoints too."""
    res = _sciopt.minimize_scalar(fn, bounds=(lo, hi), method="bounded",
                                  options={"xatol": tol})
    cands = [(float(res.x), float(res.fun)), (lo, float(fn(lo))), (hi, float(fn(hi)))]
    return min(cands, key=lambda t: t[1])
