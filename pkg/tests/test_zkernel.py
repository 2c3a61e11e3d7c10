import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardyz import AfeParams, DomainError, Method, theta, z_pow_afe, z_rs, zeta_dirichlet
from hardyz import zkernel
from hardyz.arith import TestFunction, sieve_dk
from hardyz.oracle import zeta_oracle

from reference import THETA_VALUES, Z_VALUES


@pytest.mark.parametrize("t", sorted(THETA_VALUES))
def test_theta_matches_reference(t):
    th = theta(t)
    assert abs(th.theta - THETA_VALUES[t]) <= th.err
    assert th.err < (1e-3 if t < 10 else 1e-8)


@given(st.floats(min_value=2.0, max_value=1e7))
def test_theta_is_odd(t):
    assert theta(-t).theta == -theta(t).theta


def test_theta_domain():
    with pytest.raises(DomainError):
        theta(1.5)
    with pytest.raises(DomainError):
        theta(10.0, order=3)


@pytest.mark.parametrize("t", [t for t in sorted(Z_VALUES) if t >= 10])
@pytest.mark.parametrize("order", range(6))
def test_rs_within_bound(t, order):
    z = z_rs(t, order)
    assert z.method == Method(f"RS{order}")
    assert abs(z.value - Z_VALUES[t]) <= z.err


def test_rs_even_and_domain():
    assert z_rs(-1000.0).value == z_rs(1000.0).value
    with pytest.raises(DomainError):
        z_rs(9.0)
    with pytest.raises(DomainError):
        z_rs(100.0, order=6)


def test_rs_bound_shrinks_with_order():
    errs = [z_rs(1e5, o).err for o in range(6)]
    assert errs[0] > errs[1] > errs[2]


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=10.0, max_value=1e6))
def test_vectorised_matches_scalar(t):
    vals, errs = zkernel.z_rs_many(np.array([t, t]), 2)
    assert vals[0] == vals[1] == z_rs(t, 2).value


@pytest.mark.parametrize("t,T", [(150.0, 100.0), (1500.0, 1000.0), (15000.0, 10000.0)])
def test_dirichlet_against_oracle(t, T):
    z = zeta_dirichlet(t, T)
    ref = complex(zeta_oracle(t, 20))
    assert abs(z.value - ref) <= z.err


def test_dirichlet_window():
    with pytest.raises(DomainError):
        zeta_dirichlet(250.0, 100.0)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("t", [100.0, 1000.0])
def test_afe_powers(k, t):
    z = z_pow_afe(t, AfeParams(k))
    assert abs(z.value - Z_VALUES[t] ** k) <= z.err


def test_afe_table_checks():
    with pytest.raises(DomainError):
        z_pow_afe(100.0, AfeParams(2), table=sieve_dk(3, 100))
    from hardyz import ResourceError
    with pytest.raises(ResourceError):
        z_pow_afe(1000.0, AfeParams(3), table=sieve_dk(3, 10))


def test_afe_params_validation():
    for bad in (dict(k=4), dict(k=1, b=1.0), dict(k=1, tau_base="e")):
        with pytest.raises(DomainError):
            AfeParams(**bad)


def test_afe_accepts_custom_rho():
    z1 = z_pow_afe(1000.0, AfeParams(1), rho=TestFunction(1.5))
    z2 = z_pow_afe(1000.0, AfeParams(1), rho=TestFunction(2.0))
    assert z1.agrees_with(z2)


def test_agrees_with():
    a = z_rs(1000.0, 1)
    b = z_rs(1000.0, 5)
    assert a.agrees_with(b)
    assert math.isfinite(a.err)
