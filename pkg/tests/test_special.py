import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from omfq.classical import delta, jacobi_times_q_series, phi_m1_2
from omfq.gegenbauer import G_eval
from omfq.lattice import LatticeError, SublatticeSplit
from omfq.ortho import heegner_split, pullback_cycle, pullback_heegner, pullback_meromorphic
from omfq.series import LaurentSeries, TruncationRegion, exp_substitute
from omfq.special import (
    B1, B2, DATA, SIEGEL_LATTICE, HilbertExpansion, QuadraticOrderElement, SiegelExpansion,
    SquareDiscriminantError, cohen_generating_identity, cohen_kernel, cohen_operator, humbert_root_data,
    igusa_psi35_seed, psi10, psi35_bracket, run_ex64, run_ex65, siegel_curve_pullback,
    siegel_diagonal_pullback, siegel_humbert_pullback, split_discriminant, verify_prop62,
)
from omfq.verify import random_ortho


def random_siegel(seed, k=10, bound=6):
    return SiegelExpansion.from_ortho(random_ortho(SIEGEL_LATTICE, k, (1, 0, 1), bound, random.Random(seed)))


# ---------------------------------------------------------------- quadratic fields

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=6)
elements = st.builds(lambda a, b: QuadraticOrderElement(5, 1, a, b), fracs, fracs)


@given(elements, elements)
def test_norm_and_trace_are_multiplicative_and_additive(x, y):
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x.conj().conj() == x
    assert (x * x.conj()).is_rational()


@given(elements, elements)
def test_pair_is_symmetric_trace_form(x, y):
    assert x.pair(y) == y.pair(x)
    assert x.pair(x) == 2 * x.norm()


@given(elements)
def test_embeddings_bracket_the_real_values(x):
    (lo1, hi1), (lo2, hi2) = x.embeddings()
    r = 5 ** 0.5
    assert float(lo1) - 1e-9 <= float(x.a) + float(x.b) * r <= float(hi1) + 1e-9
    assert float(lo2) - 1e-9 <= float(x.a) - float(x.b) * r <= float(hi2) + 1e-9
    if lo1 > 0 and lo2 > 0:
        assert x.is_totally_positive()
    if hi1 < 0 or hi2 < 0:
        assert not x.is_totally_positive()


def test_order_membership():
    g = QuadraticOrderElement.generator(5)
    assert g.is_integral() and (g * g).is_integral()
    assert not QuadraticOrderElement(5, 1, Fraction(1, 2), 0).is_integral()
    assert QuadraticOrderElement(5, 2, 0, 1).is_integral()
    assert not QuadraticOrderElement(5, 2, Fraction(1, 2), Fraction(1, 2)).is_integral()
    with pytest.raises(ValueError):
        QuadraticOrderElement(4, 1, 1, 1)


@pytest.mark.parametrize("D, want", [(5, (5, 1)), (20, (5, 2)), (8, (8, 1)), (45, (5, 3)), (12, (12, 1))])
def test_split_discriminant(D, want):
    assert split_discriminant(D) == want


# ---------------------------------------------------------------- Cohen operators

def hilbert_sample(weight, antisymmetric=False, seed=0):
    rng = random.Random(seed)
    coeffs = {}
    for a2 in range(1, 9):
        for b2 in range(-a2, a2 + 1):
            nu = QuadraticOrderElement(5, 1, Fraction(a2, 2), Fraction(b2, 2))
            if nu.is_integral() and nu.is_totally_positive() and nu not in coeffs:
                c = rng.randint(-5, 5)
                coeffs[nu] = c
                if antisymmetric:
                    coeffs[nu.conj()] = 0 if nu == nu.conj() else -c
    return HilbertExpansion(5, 1, weight, coeffs, 8)


def test_cohen_order_zero_is_restriction():
    f = hilbert_sample(4, seed=1)
    lam = QuadraticOrderElement(5, 1, Fraction(3, 2), Fraction(1, 2))
    out = cohen_operator(f, 0, lam)
    sums = {}
    for nu, c in f.coeffs.items():
        m = (nu * lam.conj()).trace()
        if m <= out.bound:
            sums[m] = sums.get(m, 0) + c
    assert {m: v.a for m, v in out.coeffs.items()} == {m: v for m, v in sums.items() if v}
    assert out.weight == 8 and out.level == lam.norm()


@given(elements, st.integers(1, 12))
def test_cohen_first_kernel(nu, k):
    lam = QuadraticOrderElement(5, 1, 3, 1)
    assert cohen_kernel(k, 1, nu, lam) == (lam.conj() * nu - lam * nu.conj()) * k


@pytest.mark.parametrize("N", [0, 2, 4])
def test_cohen_even_order_kills_antisymmetric_input(N):
    f = hilbert_sample(3, antisymmetric=True, seed=2)
    assert f.is_graded_symmetric()
    out = cohen_operator(f, N, 2)
    assert out.coeffs == {}


def test_cohen_odd_order_sees_antisymmetric_input():
    f = hilbert_sample(3, antisymmetric=True, seed=2)
    assert cohen_operator(f, 1, 2).coeffs


def test_cohen_rejects_non_positive_lambda():
    f = hilbert_sample(4)
    with pytest.raises(ValueError):
        cohen_operator(f, 1, QuadraticOrderElement(5, 1, 1, 1))


def test_heegner_kernel_matches_cohen_kernel_at_golden_ratio():
    phi = QuadraticOrderElement(5, 1, Fraction(1, 2), Fraction(1, 2))
    r = verify_prop62(10, 2, 1, (0, 1), [phi])
    assert r["ok"] and r["checked"] == 1


@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=5),
       st.integers(0, 4), st.sampled_from([2, Fraction(5, 2), 10]))
def test_heegner_kernel_matches_cohen_kernel(samples, N, k):
    nus = [QuadraticOrderElement(5, 1, Fraction(a, 2), Fraction(b, 2)) for a, b in samples]
    assert verify_prop62(k, N, 1, (0, 1), nus)["ok"]


def test_prop62_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        verify_prop62(10, 1, 1, 1, [1])


@pytest.mark.parametrize("k", [2, Fraction(5, 2), 3, Fraction(7, 2)])
def test_cohen_generating_function(k):
    r = cohen_generating_identity(k, 8)
    assert r["ok"], r["diff"]


# ---------------------------------------------------------------- Humbert surfaces

HUMBERT = [(1, 1, -1), (1, 0, -2), (1, 1, -3), (1, 0, -3), (2, 1, -2)]


@pytest.mark.parametrize("abc", HUMBERT)
@pytest.mark.parametrize("N", range(4))
def test_humbert_equals_heegner_along_minus_two_a(abc, N):
    F = random_siegel(3)
    a, b, c = abc
    H = siegel_humbert_pullback(F, abc, N)
    _, _, lam, mu = humbert_root_data(a, b, c)
    v = (-2 * a, b, -2 * c)
    res = pullback_heegner(F.to_ortho(), v, N)
    split = heegner_split(SIEGEL_LATTICE, v)
    want = {}
    for r, x in res.expansion.coeffs.items():
        r0, r1, r2 = split.embed_sub(r)
        want[(lam * lam * r2 + lam * mu * (-2 * r1) + mu * mu * r0).conj()] = x
    assert H.coeffs == want
    assert H.weight == F.weight + N and H.bound == res.expansion.bound


def test_humbert_restriction_sums_coefficients():
    F = random_siegel(5)
    H = siegel_humbert_pullback(F, (1, 1, -1), 0)
    _, _, lam, mu = humbert_root_data(1, 1, -1)
    sums = {}
    for (t1, t2, t3), c in F.coeffs.items():
        nu = (lam * lam * t1 + lam * mu * t2 + mu * mu * t3).conj()
        sums[nu] = sums.get(nu, 0) + c
    assert H.coeffs == {nu: v for nu, v in sums.items() if v and (nu * H.height).trace() <= H.bound}


@pytest.mark.parametrize("N", range(5))
def test_humbert_single_monomial_kernel(N):
    # x = t1 - t2/2 - t3 vanishes at T = (2, 2, 1), det T = 1, D = 5
    F = SiegelExpansion(10, {(2, 2, 1): 1}, 5)
    H = siegel_humbert_pullback(F, (1, 1, -1), N)
    assert list(H.coeffs.values()) == ([G_eval(N, Fraction(9), 0, 5)] if G_eval(N, Fraction(9), 0, 5) else [])


def test_humbert_rejects_square_discriminant():
    with pytest.raises(SquareDiscriminantError):
        siegel_humbert_pullback(random_siegel(1), (1, 3, 2), 0)
    with pytest.raises(ValueError):
        humbert_root_data(1, 0, 1)


# ---------------------------------------------------------------- diagonal and curves

@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("N", range(4))
def test_diagonal_equals_heegner_and_meromorphic(seed, N):
    F = random_siegel(seed)
    D = {tuple(int(x) for x in e): c for e, c in siegel_diagonal_pullback(F, N)}
    res = pullback_heegner(F.to_ortho(), (0, 1, 0), N)
    split = heegner_split(SIEGEL_LATTICE, (0, 1, 0))
    want = {}
    for r, x in res.expansion.coeffs.items():
        r0, _, r2 = split.embed_sub(r)
        want[(int(r2), int(r0))] = x
    assert D == want
    S = LaurentSeries(3, dict(F.coeffs), 1, (TruncationRegion.weighted((1, 0, 1), F.bound),))
    P = pullback_meromorphic(exp_substitute(S, 1, N + 1), F.weight, 3, 0, N, 1, lambda e: e[0] * e[2])
    assert {(int(e[0]), int(e[2])): c for e, c in P} == D


def test_diagonal_single_monomial():
    F = SiegelExpansion(7, {(2, 3, 2): 5}, 4)
    assert dict(siegel_diagonal_pullback(F, 1).coeffs) == {(2, 2): 15}


def test_psi35_vanishes_on_diagonal():
    assert siegel_diagonal_pullback(igusa_psi35_seed(), 0).coeffs == {}


CURVE_SPLIT = SublatticeSplit(SIEGEL_LATTICE, [(1, 0, 1)], [(1, 0, -1), (0, 1, 0)])
# tr(T B) = <nu, (b1, b2/2, b3)>, so B1 and B2 are these vectors in complement coordinates
CURVE_DIRECTIONS = {0: (Fraction(1), Fraction(0)), 1: (Fraction(0), Fraction(1, 2))}


@pytest.mark.parametrize("seed", range(2))
@pytest.mark.parametrize("N", range(4))
def test_curve_equals_cycle_pullback(seed, N):
    F = random_siegel(seed + 20)
    T = pullback_cycle(F.to_ortho(), CURVE_SPLIT, N)
    for word in itertools.product((0, 1), repeat=N):
        C = siegel_curve_pullback(F, (1, 0, 1), N, [(B1, B2)[i] for i in word])
        E = T.evaluate(*[CURVE_DIRECTIONS[i] for i in word])
        assert C.coefficients() == {2 * r[0]: v for r, v in E.coeffs.items() if v}
        assert C.weight == 2 * F.weight + 2 * N and C.level == 1


@pytest.mark.parametrize("N", [1, 3])
def test_odd_orders_vanish_on_identity_curve(N):
    for F in (igusa_psi35_seed(), SiegelExpansion.from_ortho(psi10(5))):
        for word in itertools.product((B1, B2), repeat=N):
            assert siegel_curve_pullback(F, (1, 0, 1), N, list(word)).coefficients() == {}


def test_curve_rejects_bad_directions():
    F = random_siegel(1)
    with pytest.raises(ValueError):
        siegel_curve_pullback(F, (1, 0, 1), 1, [(1, 0, 1)])
    with pytest.raises(ValueError):
        siegel_curve_pullback(F, (1, 0, -1), 0, [])
    with pytest.raises(ValueError):
        siegel_curve_pullback(F, (1, 0, 1), 2, [B1, B2, B1])


def test_siegel_model_round_trip():
    F = random_siegel(9)
    assert SiegelExpansion.from_ortho(F.to_ortho()) == F
    with pytest.raises(LatticeError):
        SiegelExpansion.from_ortho(random_ortho(SIEGEL_LATTICE, 10, (2, 0, 1), 4, random.Random(0)))
    with pytest.raises(ValueError):
        SiegelExpansion(10, {(1, 5, 1): 1}, 4)


# ---------------------------------------------------------------- the weight 35 seed

def sympy_bracket(c33):
    q, r, s = sympy.symbols("q r s")
    expr = q ** 2 * s ** 2 * (q - s) * (r - 1 / r) * (
        1 - (q + s) * (r ** 2 + 70 + r ** -2) + 69 * (q ** 2 + s ** 2) * (r ** 2 + c33 + r ** -2)
        + q * s * (r ** 4 + 70 * r ** 2 - 32384 * r - 127074 - 32384 / r + 70 / r ** 2 + r ** -4))
    poly = sympy.Poly(sympy.expand(expr * r ** 5), q, r, s)
    return {(i, j - 5, k): int(c) for (i, j, k), c in poly.terms()}


def test_psi35_seed_matches_independent_expansion():
    want = {t: Fraction(c) for t, c in sympy_bracket(34).items() if t[0] + t[2] <= 7}
    S = igusa_psi35_seed()
    assert S.weight == 35 and S.bound == 7
    assert dict(S.coeffs) == want
    assert psi35_bracket(34) == sympy_bracket(34)


def test_psi35_leading_coefficients_and_swap():
    S = igusa_psi35_seed()
    assert S[(3, 1, 2)] == 1 and S[(2, 1, 3)] == -1
    assert S.swap_parity() == -1
    assert all(S[(t1, -t2, t3)] == -c for (t1, t2, t3), c in S.coeffs.items())


def second_fourier_jacobi(br):
    return {(t1, t2): c for (t1, t2, t3), c in br.items() if t3 == 2 and t1 <= 5}


def test_psi35_fourier_jacobi_coefficient():
    phi = jacobi_times_q_series(phi_m1_2(6), delta(6) * delta(6) * delta(6), 36)
    want = {(int(n), int(4 * r[0])): c for (n, r), c in phi.coeffs.items() if n <= 5}
    assert second_fourier_jacobi(psi35_bracket(34)) == want
    assert second_fourier_jacobi(psi35_bracket(33)) != want
    S = igusa_psi35_seed()
    assert S[(2, 1, 5)] == -want[(5, 1)]


def test_weight_35_curve_pullback_values():
    r = run_ex65()
    assert r["ok"] and r["weight"] == 74 and r["through"] == 7
    vals = r["checks"]["P2(B1⊗B2)"]["value"]
    assert {n: vals[Fraction(n)] for n in (5, 6, 7)} == {5: 71, 6: -10224, 7: -13257972}
    assert r["checks"]["membership"]["coords"] == {(2, 1, 5): 71}


def test_psi10_leading_block_and_meromorphic_pullbacks():
    r = run_ex64(height=5)
    assert r["block_ok"] and r["ok"]
    assert r["pullbacks"][0]["claim"] == "1/(Delta Delta)"


def test_seed_file_is_shipped():
    assert (DATA / "psi35.omfq").exists()
