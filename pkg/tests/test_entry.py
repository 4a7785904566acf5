import numpy as np
import pytest

from scoremech.env import make_environment
from scoremech.errors import DomainError, InvalidParameter
from scoremech.asymmetric import as_separable
from scoremech import entry


def _senv(alpha, g=None, delta=1.0):
    cfg = {"family": "sc", "n": 2, "alpha": alpha, "delta": delta,
           "g": g or {"name": "quadratic", "scale": 1.0}}
    return as_separable(make_environment(cfg))


def test_quadratic_closed_form():
    for alpha in (0.1, 0.3, 0.7):
        senv = _senv(alpha)
        for k in range(1, 11):
            assert entry.utility_restricted(senv, k) == pytest.approx(
                entry.utility_restricted_quadratic(alpha, k), abs=1e-8)


def test_single_entrant_is_posted_contract():
    # k = 1: U = H(1) - 2*alpha*E[theta] = 1/2 - alpha for quadratic g
    senv = _senv(0.4)
    assert entry.utility_restricted(senv, 1) == pytest.approx(0.1, abs=1e-10)


def test_alpha_crossover_golden():
    # U(6) = U(1) at alpha = 7/22 for quadratic g
    senv = _senv(0.3)
    assert entry.alpha_crossover(senv, 6) == pytest.approx(7.0 / 22.0,
                                                           abs=1e-9)


def test_one_or_all_switch():
    a0 = 7.0 / 22.0
    lo = entry.optimal_entry(_senv(a0 - 0.05), 6)
    hi = entry.optimal_entry(_senv(a0 + 0.05), 6)
    assert lo.k_star == 1 and hi.k_star == 6
    for curve in (lo, hi):
        assert curve.one_or_all and curve.hypothesis_ok
        assert curve.shape.kind in ("quasiconvex", "increasing",
                                    "decreasing", "constant")
        assert curve.fractional_shape.kind in ("quasiconvex", "increasing",
                                               "decreasing", "constant")


def test_entry_curve_single_interior_dip():
    # quasi-convex: differences change sign at most once, - to +
    curve = entry.optimal_entry(_senv(7.0 / 22.0), 8)
    signs = np.sign(np.diff(curve.utility))
    changes = np.flatnonzero(np.diff(signs) != 0)
    assert len(changes) <= 1


def test_exp_kernel_hypothesis_and_extremes():
    senv = _senv(0.2, g={"name": "exp", "scale": 1.0})
    curve = entry.optimal_entry(senv, 4)
    assert curve.hypothesis_ok and curve.one_or_all


def test_rows_flag_argmax():
    curve = entry.optimal_entry(_senv(0.5), 4)
    rows = curve.rows()
    assert sum(flag for _, _, flag in rows) == 1
    assert rows[curve.k_star - 1][2]


def test_errors():
    with pytest.raises(DomainError):
        entry.utility_restricted(_senv(0.3, delta=2.0), 3)
    with pytest.raises(DomainError):
        entry.utility_restricted(_senv(0.3), 0)
    with pytest.raises(InvalidParameter):
        entry.alpha_crossover(_senv(0.3), 1)
