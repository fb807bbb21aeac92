from fractions import Fraction

import pytest

from omfq.classical import (
    delta, eisenstein, eta_power, jacobi_times_q_series, level_one_basis, level_one_membership, phi10_1,
    phi_m1_2, phi_m2_1,
)
from omfq.ortho import PrecisionError
from omfq.series import LaurentSeries, TruncationRegion

TAU = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def coeffs(f):
    return {e[0]: c for e, c in f}


def naive_mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= n:
                out[i + j] += x * y
    return out


def product_oracle(e, n):
    out = [1] + [0] * n
    for m in range(1, n + 1):
        f = [0] * (n + 1)
        f[0], f[m] = 1, -1
        for _ in range(e):
            out = naive_mul(out, f, n)
    return out


def test_delta_matches_product_and_tau():
    d = coeffs(delta(10))
    body = product_oracle(24, 9)
    assert [d.get(Fraction(n + 1), 0) for n in range(10)] == body
    assert body == TAU


def test_eta_powers():
    assert coeffs(eta_power(5, 0)) == {0: 1}
    e6 = coeffs(eta_power(3, 6))
    assert e6[Fraction(1, 4)] == 1 and e6[Fraction(5, 4)] == -6 and e6[Fraction(9, 4)] == 9
    body = product_oracle(6, 2)
    assert [e6[Fraction(1, 4) + k] for k in range(3)] == body


def divisor_sum(n, k):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def test_eisenstein_series():
    e4, e6 = coeffs(eisenstein(4, 6)), coeffs(eisenstein(6, 6))
    assert [e4[n] for n in range(4)] == [1, 240, 2160, 6720]
    assert [e6[n] for n in range(3)] == [1, -504, -16632]
    for n in range(1, 7):
        assert e4[n] == 240 * divisor_sum(n, 3) and e6[n] == -504 * divisor_sum(n, 5)
    with pytest.raises(ValueError):
        eisenstein(2, 4)


def test_classical_identity():
    E4, E6 = eisenstein(4, 12), eisenstein(6, 12)
    assert E4 ** 3 - E6 * E6 == delta(12).scale(1728)


def test_all_integral():
    for f in [delta(15), eisenstein(4, 15), eisenstein(6, 15)]:
        assert all(c.denominator == 1 for _, c in f)


def theta_quotient_oracle(prec):
    """(zeta - 2 + 1/zeta) prod (1 - q^n zeta)^2 (1 - q^n/zeta)^2 / (1 - q^n)^4 as {(n, l): c}."""
    def mul(a, b):
        out = {}
        for (n1, l1), c1 in a.items():
            for (n2, l2), c2 in b.items():
                if n1 + n2 <= prec:
                    k = (n1 + n2, l1 + l2)
                    out[k] = out.get(k, 0) + c1 * c2
        return {k: v for k, v in out.items() if v}

    f = {(0, 1): 1, (0, 0): -2, (0, -1): 1}
    for n in range(1, prec + 1):
        for sgn in (1, -1):
            for _ in range(2):
                f = mul(f, {(0, 0): 1, (n, sgn): -1})
        geo = {(n * j, 0): 1 for j in range(prec // n + 1)}
        for _ in range(4):
            f = mul(f, geo)
    return f


def test_phi_m2_1():
    phi = phi_m2_1(4)
    got = {(int(n), int(2 * r[0])): c for (n, r), c in phi.coeffs.items()}
    assert got == theta_quotient_oracle(4)
    assert {l: got.get((0, l), 0) for l in (-1, 0, 1)} == {-1: 1, 0: -2, 1: 1}
    assert {l: c for (n, l), c in got.items() if n == 1} == {2: -2, 1: 8, 0: -12, -1: 8, -2: -2}
    assert phi.weight == -2 and phi.lattice.gram == ((2,),)


def test_phi_m1_2():
    # (zeta - 1/zeta) prod (1 - q^n zeta^2)(1 - q^n zeta^-2) / (1 - q^n)^2, first two q-powers
    phi = phi_m1_2(2)
    got = {(int(n), int(4 * r[0])): c for (n, r), c in phi.coeffs.items()}
    assert {l: c for (n, l), c in got.items() if n == 0} == {1: 1, -1: -1}
    assert {l: c for (n, l), c in got.items() if n == 1} == {3: -1, 1: 3, -1: -3, -3: 1}


@pytest.mark.parametrize("phi,index", [(phi_m2_1(6), 1), (phi10_1(6), 1), (phi_m1_2(6), 2)])
def test_coefficients_depend_on_discriminant(phi, index):
    by_class = {}
    parity = -1 if phi.weight % 2 else 1
    for (n, r), c in phi.coeffs.items():
        ell = 2 * index * r[0]
        by_class.setdefault((4 * index * n - ell * ell, ell % (2 * index)), set()).add(c)
        assert phi[(n, (-r[0],))] == parity * c
    for key, vals in by_class.items():
        assert len(vals) == 1, key


def test_phi10_first_coefficient():
    phi = phi10_1(3)
    got = {int(2 * r[0]): c for (n, r), c in phi.coeffs.items() if n == 1}
    assert got == {-1: 1, 0: -2, 1: 1}
    assert not [k for k in phi.coeffs if k[0] < 1]
    assert phi.weight == 10


def test_jacobi_times_series_bounds():
    phi = jacobi_times_q_series(phi_m2_1(5), delta(3), 12)
    assert phi.bound == 3
    assert phi.weight == 10


def test_membership():
    r = level_one_membership(delta(8).scale(1728), 12, "eisenstein")
    assert r["member"] and r["coords"] == {(3, 0, 0): 1, (0, 2, 0): -1}
    r = level_one_membership(delta(8).scale(1728), 12)
    assert r["member"] and r["coords"] == {(0, 0, 1): 1728}
    zero = LaurentSeries(1, {}, 1, (TruncationRegion.total_degree(1, 6),))
    r = level_one_membership(zero, 24)
    assert r["member"] and r["coords"] == {}


def test_membership_detects_non_members_and_precision():
    bad = delta(6) + LaurentSeries(1, {(3,): 1}, 1, (TruncationRegion.total_degree(1, 6),))
    r = level_one_membership(bad, 12)
    assert not r["member"] and r["residual"]
    with pytest.raises(PrecisionError):
        level_one_membership(delta(1), 36)


def test_basis_dimensions():
    # dim M_k for k = 0, 4, 12, 14, 24, 74
    assert [len(level_one_basis(k)) for k in (0, 4, 12, 14, 24, 74)] == [1, 1, 2, 1, 3, 6]
    assert len(level_one_basis(74, "eisenstein")) == 6
