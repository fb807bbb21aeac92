import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from omfq.gegenbauer import G_eval
from omfq.lattice import GramLattice, LatticeError, SublatticeSplit
from omfq.lift import hyperbolic_lattice
from omfq.ortho import (
    DivisorError, NotVanishingError, OrthoFormExpansion, PoleError, PrecisionError, heegner_split,
    pullback_cycle, pullback_heegner, pullback_meromorphic, quasi_pullback, quasi_pullback_constant,
)
from omfq.series import LaurentSeries
from omfq.verify import random_ortho

SIEGEL = hyperbolic_lattice(GramLattice([[2]]))  # (a, x, b) with Q = ab - x^2
RANK4 = GramLattice([[0, 0, 0, 1], [0, -2, -1, 0], [0, -1, -2, 0], [1, 0, 0, 0]])


def siegel_data(seed, bound=6, cusp=True, k=10):
    return random_ortho(SIEGEL, k, (1, 0, 1), bound, random.Random(seed), cusp=cusp)


def heegner_oracle(F, lam, N):
    """Direct evaluation of the displayed kernel, grouped by the projection to lambda-perp."""
    lat = F.lattice
    m = -lat.Q(lam)
    s = F.weight + Fraction(1 - lat.rank, 2)
    out = {}
    for nu, c in F.coeffs.items():
        # projection of nu onto lambda-perp, in ambient coordinates
        t = lat.pair(nu, lam) / lat.pair(lam, lam)
        r = tuple(a - t * b for a, b in zip(nu, lam))
        out[r] = out.get(r, 0) + c * G_eval(N, s, lat.pair(nu, lam), m * lat.Q(r))
    return out


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("N", range(4))
@pytest.mark.parametrize("lam", [(0, 1, 0), (1, 1, -1), (1, 0, -1)])
def test_heegner_matches_direct_kernel(seed, N, lam):
    F = siegel_data(seed)
    res = pullback_heegner(F, lam, N)
    split = heegner_split(SIEGEL, lam)
    want = heegner_oracle(F, lam, N)
    got = {split.embed_sub(r): c for r, c in res.expansion.coeffs.items()}
    kept = {r: c for r, c in want.items() if c and split.coords_sub(r) in res.expansion.coeffs}
    assert got == kept
    for r in res.omitted:
        assert r not in res.expansion.coeffs
    assert res.expansion.weight == F.weight + N


def test_restriction_sums_fibers():
    F = siegel_data(11, cusp=False)
    res = pullback_heegner(F, (0, 1, 0), 0)
    split = heegner_split(SIEGEL, (0, 1, 0))
    sums = {}
    for nu, c in F.coeffs.items():
        r = split.coords_sub(nu)
        sums[r] = sums.get(r, 0) + c
    for r, c in res.expansion.coeffs.items():
        assert c == sums[r]


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_cusp_support(N):
    F = siegel_data(3, cusp=False)
    E = pullback_heegner(F, (0, 1, 0), N).expansion
    assert all(E.lattice.Q(r) > 0 for r in E.coeffs)


def test_invalid_divisor():
    F = siegel_data(0)
    for lam in [(1, 0, 1), (1, 0, 0), (0, 0, 0)]:
        with pytest.raises(DivisorError):
            pullback_heegner(F, lam, 1)


def test_precision_error():
    F = siegel_data(0)
    with pytest.raises(PrecisionError):
        pullback_heegner(F, (1, 1, -1), 2, bound=100)


@given(st.integers(1, 3), st.integers(0, 3))
def test_homogeneity_in_lambda(c, N):
    F = siegel_data(5)
    lam = (1, 1, -1)
    split = heegner_split(SIEGEL, lam)
    one = pullback_heegner(F, lam, N, split=split).expansion
    many = pullback_heegner(F, tuple(c * x for x in lam), N, split=split).expansion
    assert many.coeffs == {r: v * c ** N for r, v in one.coeffs.items() if v}


@pytest.mark.parametrize("N", range(4))
def test_cycle_along_line_is_heegner(N):
    F = siegel_data(7)
    lam = (1, 1, -1)
    split = heegner_split(SIEGEL, lam)
    T = pullback_cycle(F, split, N)
    E = pullback_heegner(F, lam, N, split=split).expansion
    assert T.weight == F.weight + N
    assert T.evaluate(*([(1,)] * N)).coeffs == E.coeffs
    assert T.diagonal((1,)).coeffs == E.coeffs


def test_cycle_second_order_single_monomial():
    # rank 4 ambient, rank 2 normal lattice: one coefficient gives one kernel value
    sub = [(1, 0, 0, 0), (0, 0, 0, 1)]
    split = SublatticeSplit(RANK4, sub)
    nu = (2, Fraction(1, 3), Fraction(-2, 3), 3)
    assert RANK4.is_dual(nu)
    F = OrthoFormExpansion(RANK4, 7, {nu: 1}, (1, 0, 0, 1), 10, cusp=True)
    T = pullback_cycle(F, split, 2)
    lam = split.coords_sub(nu)
    (key, form), = T.coeffs.items()
    assert key == lam
    s = Fraction(7) - Fraction(split.sub_lattice.rank, 2)
    mq = -split.sub_lattice.Q(lam)
    B = split.complement_lattice.gram
    for v1 in [(1, 0), (0, 1), (2, -1)]:
        for v2 in [(1, 0), (1, 1)]:
            def mu(v):
                return sum(vi * RANK4.pair(b, nu) for vi, b in zip(v, split.complement))
            bil = sum(v1[i] * B[i][j] * v2[j] for i in range(2) for j in range(2))
            assert form(v1, v2) == (s + 1) * mu(v1) * mu(v2) - 2 * mq * Fraction(bil, 2)


def test_cycle_signature_error():
    F = siegel_data(0)
    split = SublatticeSplit(SIEGEL, [(0, 1, 0)])
    with pytest.raises(LatticeError):
        pullback_cycle(F, split, 1)


def vanishing_data(order, seed):
    """Coefficients whose first ``order`` Taylor coefficients along (0, 1, 0)-perp vanish fiberwise."""
    rng = random.Random(seed)
    half = Fraction(1, 2)
    # fiber weights with vanishing moments below ``order``
    weights = {1: [(-half, 1), (half, -1)], 2: [(-half, 1), (0, -2), (half, 1)]}[order]
    coeffs = {}
    for a in range(1, 5):
        for b in range(1, 5):
            if a + b <= 6 and rng.random() < 0.7:
                f = rng.randint(-9, 9)
                for x, w in weights:
                    coeffs[(a, x, b)] = coeffs.get((a, x, b), 0) + f * w
    return OrthoFormExpansion(SIEGEL, 10, coeffs, (1, 0, 1), 6, cusp=True)


@pytest.mark.parametrize("N", [1, 2])
@pytest.mark.parametrize("seed", range(3))
def test_quasi_pullback_is_scalar_multiple(N, seed):
    F = vanishing_data(N, seed)
    lam = (0, 1, 0)
    q = quasi_pullback(F, lam, N).expansion
    p = pullback_heegner(F, lam, N).expansion
    const = quasi_pullback_constant(10, 3, N)
    assert p.coeffs == {r: const * v for r, v in q.coeffs.items()}
    assert p.coeffs


def test_quasi_pullback_restriction_and_precondition():
    F = siegel_data(2)
    assert quasi_pullback(F, (0, 1, 0), 0).expansion.coeffs == pullback_heegner(F, (0, 1, 0), 0).expansion.coeffs
    assert quasi_pullback_constant(10, 3, 0) == 1
    with pytest.raises(NotVanishingError):
        quasi_pullback(F, (0, 1, 0), 1)


def test_meromorphic_pole_error():
    G = LaurentSeries(2, {(1, -1): 1})
    with pytest.raises(PoleError):
        pullback_meromorphic(G, 4, 3, 1, 0, 1, lambda e: 0)
