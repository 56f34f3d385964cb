import numpy as np
import pytest
from hypothesis import given, strategies as st

from crossdiff.errors import ValidationError
from crossdiff.exact import (BARENBLATT_MASS, ExactContactSolution, barenblatt, barenblatt_dx,
                             exact_pair, interface, support_radius)

T_STAR = 0.01


def test_barenblatt_values():
    assert barenblatt(T_STAR, 0.0, 0.0) == pytest.approx(9.283177667225558, rel=1e-13)
    for t in (0.0, 0.003, 0.01):
        assert barenblatt(T_STAR, support_radius(T_STAR, t), t) == pytest.approx(0.0, abs=1e-12)
    assert barenblatt(T_STAR, 0.99, 0.0) == 0.0
    with pytest.raises(ValidationError):
        barenblatt(T_STAR, 0.0, -0.02)


def test_support_radius():
    assert support_radius(T_STAR, 0.0) == pytest.approx(0.7463180689448256, rel=1e-13)
    assert support_radius(T_STAR, 0.01) == pytest.approx(0.940301844980479, rel=1e-13)
    r = support_radius(T_STAR, np.linspace(0, 0.1, 50))
    assert np.all(np.diff(r) > 0)


@pytest.mark.parametrize("t", [0.0, 0.01])
def test_mass(t):
    # adaptive quadrature reference: 9.237604307034013 at both times
    x = np.linspace(-1, 1, 400001)
    m = np.trapezoid(barenblatt(T_STAR, x, t), x)
    assert m == pytest.approx(9.237604307034013, abs=1e-4)
    assert BARENBLATT_MASS == pytest.approx(9.237604307034012, rel=1e-14)


def test_interface():
    assert interface(T_STAR, 0.0, 0.37) == 0.0
    assert interface(T_STAR, 0.1, 0.0) == 0.1
    # DOP853 integration of eta' = -B_x(eta, t) (derivative by central differences) from eta(0) = 0.1
    assert interface(T_STAR, 0.1, 0.01) == pytest.approx(0.1259921049945757, abs=1e-9)


def test_exact_pair_values():
    sol = ExactContactSolution(T_STAR, 0.0, 1.0)
    u1, u2 = exact_pair(sol, 0.5, 0.0)
    assert u1 == pytest.approx(5.116511000558891, rel=1e-12)
    assert u2 == 0.0
    assert exact_pair(sol, -0.2, 0.0)[0] == 0.0
    assert exact_pair(sol, 0.0, 0.004) == pytest.approx((barenblatt(T_STAR, 0.0, 0.004) / 2,) * 2)


def test_exact_pair_partition():
    sol = ExactContactSolution(T_STAR, 0.1, 1.0)
    x = np.linspace(-1, 1, 1001)
    for t in (0.0, 0.005, 0.01):
        u1, u2 = exact_pair(sol, x, t)
        assert np.array_equal(u1 + u2, barenblatt(T_STAR, x, t))
        assert np.all(u1 >= 0) and np.all(u2 >= 0)
        assert np.all((u1 == 0) | (u2 == 0) | (x == sol.interface(t)))
    assert sol(0.5, 0.0) == exact_pair(sol, 0.5, 0.0)


def test_parameter_validation():
    with pytest.raises(ValidationError) as err:
        ExactContactSolution(T_STAR, 0.8, 1.0)
    assert "x0" in err.value.fields
    with pytest.raises(ValidationError):
        ExactContactSolution(0.0)
    sol = ExactContactSolution(T_STAR, 0.0, 1.0)
    sol.check_horizon(0.01)
    with pytest.raises(ValidationError):
        sol.check_horizon(0.05)


def pme_residual(h, t=0.005):
    """Max |B_t - ((B^2 / 2)_x)_x| by central differences, away from the support edge."""
    tau = h / 100
    r = support_radius(T_STAR, t)
    edge_speed = r / (3 * (t + T_STAR))
    x = np.arange(-1.0, 1.0 + h / 2, h)
    keep = (np.abs(x) < r) & (np.abs(np.abs(x) - r) > 5 * h + edge_speed * tau)
    dBdt = (barenblatt(T_STAR, x, t + tau) - barenblatt(T_STAR, x, t - tau)) / (2 * tau)
    half_sq = lambda y: 0.5 * barenblatt(T_STAR, y, t) ** 2
    lap = (half_sq(x + h) - 2 * half_sq(x) + half_sq(x - h)) / h ** 2
    return np.abs(dBdt - lap)[keep].max()


def pme_order():
    hs = (2e-3, 1e-3)
    r1, r2 = (pme_residual(h) for h in hs)
    return np.log2(r1 / r2)


def test_pme_residual_second_order():
    assert pme_order() >= 1.8


def test_derivative_matches_finite_difference():
    x = np.linspace(-0.7, 0.7, 57)
    h = 1e-6
    fd = (barenblatt(T_STAR, x + h, 0.002) - barenblatt(T_STAR, x - h, 0.002)) / (2 * h)
    assert np.abs(fd - barenblatt_dx(T_STAR, x, 0.002)).max() < 1e-6


@pytest.mark.invariant
@given(st.floats(1e-3, 1.0), st.floats(0, 1.0))
def test_mass_time_invariant(t_star, t):
    r = support_radius(t_star, t)
    x = np.linspace(-r, r, 20001)
    assert np.trapezoid(barenblatt(t_star, x, t), x) == pytest.approx(BARENBLATT_MASS, rel=1e-6)


@pytest.mark.invariant
@given(st.floats(1e-3, 1.0), st.floats(-1, 1), st.floats(0, 5))
def test_interface_velocity_identity(t_star, frac, t):
    x0 = frac * 0.99 * support_radius(t_star, 0.0)
    h = 1e-6 * (t + t_star)
    deta = (interface(t_star, x0, t + h) - interface(t_star, x0, t - h)) / (2 * h) if t > h else \
        (interface(t_star, x0, t + h) - interface(t_star, x0, t)) / h
    assert deta * 3 * (t + t_star) == pytest.approx(interface(t_star, x0, t), rel=1e-5, abs=1e-9)
