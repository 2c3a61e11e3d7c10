import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardyz import DomainError, ResourceError, arith

from reference import D3_HEAD, D4_POINTS


def test_d3_head():
    t = arith.sieve_dk(3, 12)
    assert list(t.values[1:]) == D3_HEAD


def test_d4_points():
    t = arith.sieve_dk(4, 16)
    for n, v in D4_POINTS.items():
        assert t[n] == v


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3000))
def test_sieve_matches_brute(k, n):
    assert arith.sieve_dk(k, n)[n] == arith.brute_dk(k, n)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 200), st.integers(1, 200))
def test_d3_multiplicative(a, b):
    if math.gcd(a, b) != 1:
        return
    t = arith.sieve_dk(3, a * b)
    assert t[a * b] == t[a] * t[b]


def test_table_bounds():
    t = arith.sieve_dk(2, 10)
    with pytest.raises(ResourceError):
        t[11]
    with pytest.raises(ResourceError):
        t.truncated(20)
    assert t.truncated(5).limit == 5
    with pytest.raises(DomainError):
        arith.sieve_dk(0, 10)


def test_memory_budget():
    with pytest.raises(ResourceError) as exc:
        arith.sieve_dk(3, 10**6, max_bytes=1000)
    assert exc.value.required == arith.table_bytes(10**6)


def test_roundtrip_and_cache(tmp_path):
    t = arith.sieve_dk(3, 5000)
    p = tmp_path / "t.dkt"
    arith.save_table(t, p)
    assert p.stat().st_size == 20 + 8 * 5000
    u = arith.load_table(p)
    assert u.k == 3 and np.array_equal(u.values, t.values)
    c1 = arith.cached_sieve(3, 3000, tmp_path / "c")
    c2 = arith.cached_sieve(3, 2000, tmp_path / "c")
    assert np.array_equal(c2.values, t.values[:2001])
    assert arith.load_table(tmp_path / "c" / "d3.dkt").limit == c1.limit


def test_load_rejects_garbage(tmp_path):
    p = tmp_path / "bad.dkt"
    p.write_bytes(b"XXXX" + bytes(16))
    with pytest.raises(ValueError):
        arith.load_table(p)


@given(st.floats(min_value=1e-6, max_value=1e6), st.floats(min_value=1.01, max_value=2.0))
def test_rho_reciprocity(x, b):
    f = arith.TestFunction(b)
    assert abs(f(x) + f(1.0 / x) - 1.0) < 1e-12


def test_rho_shape():
    f = arith.TestFunction(2.0)
    assert f(0.3) == 1.0 and f(2.5) == 0.0 and f(1.0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        arith.TestFunction(3.0)
    with pytest.raises(DomainError):
        f(-1.0)


def test_divisors():
    assert arith.divisors(36) == [1, 2, 3, 4, 6, 9, 12, 18, 36]


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3000), st.floats(min_value=0.0, max_value=30.0))
def test_shift_weight_sieve_matches_enumeration(n, U):
    t = arith.sieve_dk(2, 3000)
    re, im = arith.shift_weight_array(U, t, 3000)
    h = arith.shift_weight(n, U, t).value
    assert abs(complex(re[n], im[n]) - h) < 1e-9 * max(1.0, abs(h))


def test_shift_weight_at_zero_is_d3():
    d2 = arith.sieve_dk(2, 500)
    d3 = arith.sieve_dk(3, 500)
    for n in (1, 12, 360, 500):
        assert arith.shift_weight(n, 0.0, d2).value == d3[n]


def test_shift_weight_small_case():
    # h(2, U) = 2^{-iU} (d(1) + d(2) 2^{iU})
    d2 = arith.sieve_dk(2, 4)
    U = 0.7
    expect = cmath.exp(-1j * U * math.log(2)) * (1 + 2 * cmath.exp(1j * U * math.log(2)))
    assert abs(arith.shift_weight(2, U, d2).value - expect) < 1e-14
