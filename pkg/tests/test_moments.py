import math

import numpy as np
import pytest

from hardyz import DomainError, arith, moments, zeros, zkernel
from hardyz.moments import HallVariant, RangeChoice


@pytest.fixture(scope="module")
def table():
    return zeros.scan_zeros(10.0, 20000.0)


def test_f_moment_includes_low_range():
    r = moments.f_moment(0.0, 100.0, 2)
    low = moments.oracle_moment(0.0, 10.0, 2)
    high = moments.f_moment(10.0, 100.0, 2)
    assert abs(r.value - (low + high.value)) <= r.err + high.err + 1e-9


def test_korolev_at_1e4(table):
    rows = moments.korolev_scan([1e3, 1e4], table)
    assert all(r.ok for r in rows)
    assert abs(rows[-1].F1) < 18.2 * 1e4**0.25


def test_sign_changes():
    assert moments.sign_changes([1.0, -2.0, 0.0, 3.0, 4.0]) == 2


def test_first_moment_ratio_small(table):
    assert moments.first_moment_ratio(1e4, table) < 0.01


def test_ingham_at_1e4():
    T = 1e4
    r = moments.f_moment(0.0, T, 4)
    main = T * math.log(T) ** 4 / (2 * math.pi**2)
    assert abs(r.value - main) <= 10 * T * math.log(T) ** 3


def test_sign_partition_identities(table):
    sp = moments.sign_partition(1000.0, 1000.0, table)
    assert abs(sp.Kplus + sp.Kminus - 1000.0) < 1e-9
    assert abs(sp.Iplus + sp.Iminus - sp.integral) < 1e-6 * 1000.0
    assert abs(sp.Iplus - sp.Iminus - sp.abs_integral) < 1e-6 * 1000.0
    assert sp.Iplus > 0 > sp.Iminus
    assert 0.35 < sp.Kplus / 1000.0 < 0.65


def test_sign_partition_between_zeros(table):
    g = table.gammas
    a, b = g[500], g[501]
    T, H = a + 0.1 * (b - a), 0.5 * (b - a)
    sp = moments.sign_partition(T, H, table)
    sign = np.sign(zkernel.z_rs(0.5 * (a + b)).value)
    assert (sp.Kplus if sign > 0 else sp.Kminus) == pytest.approx(H, abs=1e-12)
    assert (sp.Kminus if sign > 0 else sp.Kplus) == 0


def test_alternating_gap_sum(table):
    v = moments.alternating_gap_sum(5000.0, table)
    assert math.isfinite(v)


def test_cubic_rhs_structure():
    T = 500.0
    n0, n1 = moments.cubic_range(T)
    table = arith.sieve_dk(3, n1)
    r = moments.cubic_rhs(T, table)
    assert (r.n_lo, r.n_hi) == (n0, n1)
    bound = sum(2 * math.pi * math.sqrt(2 / 3) * table[n] * n ** (-1 / 6) for n in range(n0, n1 + 1))
    assert abs(r.value) <= bound


def test_hall_sinc_limit():
    a = moments.hall_main(1e4, 1e-8, HallVariant.LOG)
    b = moments.hall_main(1e4, 0.0, HallVariant.LOG)
    assert a == pytest.approx(b, rel=1e-12)


def test_hall_zero_shift_positive():
    r = moments.hall_shifted(1000.0, 1e-9)
    assert r.lhs > 0


def test_hall_log_variant_wins():
    r = moments.hall_shifted(1e4, 1.0)
    assert r.best is HallVariant.LOG
    assert abs(r.residuals[HallVariant.LOG]) <= 5 * r.bound


def test_shifted_ranges():
    T = 500.0
    lo, hi = moments.shifted_range(T, RangeChoice.PRINTED)
    assert hi < lo
    d2 = arith.sieve_dk(2, 10)
    r = moments.shifted_cubic_rhs(T, 2.0, RangeChoice.PRINTED, d2)
    assert r.empty and r.value == 0.0
    with pytest.raises(DomainError):
        moments.shifted_cubic_rhs(T, 30.0, RangeChoice.HALF, d2)


def test_shifted_reduces_to_cubic():
    # with U -> 0 and [T/2, T] mapped onto [T, 2T] the two explicit sums coincide
    T = 1000.0
    n0, n1 = moments.cubic_range(T)
    d2 = arith.sieve_dk(2, n1)
    d3 = arith.sieve_dk(3, n1)
    shifted = moments.shifted_cubic_rhs(2 * T, 1e-12, RangeChoice.HALF, d2)
    cubic = moments.cubic_rhs(T, d3)
    assert (shifted.n_lo, shifted.n_hi) == (cubic.n_lo, cubic.n_hi)
    assert shifted.value == pytest.approx(cubic.value, rel=1e-9, abs=1e-9)


def test_growth_rows():
    rows = moments.growth_diagnostics([1, 2], [1000.0, 2000.0])
    assert all(r.ratio > 0 for r in rows)
    assert moments.band([r.ratio for r in rows if r.k == 2]) < 3
    with pytest.raises(DomainError):
        moments.growth_diagnostics(2, [1000.0, 3000.0])


def test_ks_bounds():
    rng = np.random.default_rng(0)
    assert 0 <= moments.ks_normal(rng.normal(size=500)) <= 1
    assert moments.ks_normal(np.full(100, 10.0)) > 0.99


def test_clt_deterministic():
    a = moments.clt_sample(1e4, 2000, seed=7, threads=1)
    b = moments.clt_sample(1e4, 2000, seed=7, threads=4)
    assert np.array_equal(a.values, b.values) and a.ks_stat == b.ks_stat
    assert a.ks_stat < 0.15


def test_phase_points_real_at_zero():
    r = moments.phase_point_sum(2000.0, 0.0)
    assert r.max_rel_imag < 1e-9
    assert r.relative_residual < 0.25


def test_phase_points_quarter_turn():
    T = 2000.0
    r = moments.phase_point_sum(T, math.pi / 2)
    assert abs(r.main) < 1e-9 * T
    assert abs(r.empirical) < 0.1 * T * math.log(T)


def test_dirichlet_integral():
    for T in (1000.0, 5000.0):
        v = zkernel.dirichlet_integral(T)
        assert abs(v - T) < 5 * math.sqrt(T)


def test_cubic_trajectory():
    rows = moments.cubic_trajectory([100.0, 400.0, 1600.0])
    assert [r[0] for r in rows] == [100.0, 400.0, 1600.0]
    direct = moments.f_moment(0.0, 400.0, 3)
    assert abs(rows[1][1] - direct.value) <= 2 * direct.err + 1e-9
