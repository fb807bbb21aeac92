from collections import Counter
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import assume, given, strategies as st

from omfq.lattice import (
    GramLattice, LatticeError, SublatticeSplit, discriminant_group, enumerate_dual, integer_kernel,
    mat_vec, orthogonal_complement,
)
from omfq.lift import hyperbolic_lattice


def frac_part(x):
    return x - (x.numerator // x.denominator)


def coset_oracle(lat):
    """Dual vectors S^-1 y reduced mod Z^n, by scanning y over a box of side |det|."""
    n, D = lat.rank, abs(lat.det)
    seen = {}
    for y in product(range(D), repeat=n):
        x = tuple(frac_part(c) for c in mat_vec(lat.inverse, y))
        seen.setdefault(x, frac_part(lat.Q(x)))
    return seen


def _gram(n, diag, off):
    g = [[0] * n for _ in range(n)]
    it = iter(off)
    for i in range(n):
        g[i][i] = 2 * diag[i]
        for j in range(i):
            g[i][j] = g[j][i] = next(it)
    return GramLattice(g)


def even_grams(n=2):
    entries = st.integers(-3, 3)
    return st.builds(lambda d, o: _gram(n, d, o),
                     st.lists(entries, min_size=n, max_size=n),
                     st.lists(entries, min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2)
                     ).filter(lambda lat: lat.det != 0)


def test_examples():
    assert len(discriminant_group(GramLattice([[0, 1], [1, 0]]))) == 1
    A = discriminant_group(GramLattice([[2]]))
    assert len(A) == 2
    assert sorted(A.qvalues().values()) == [0, Fraction(1, 4)]
    assert A.representative((1,)) == (Fraction(1, 2),)
    assert len(discriminant_group(GramLattice([[2, 1], [1, 2]]))) == 3


def test_degenerate_lattice():
    with pytest.raises(LatticeError):
        discriminant_group(GramLattice([[2, 2], [2, 2]]))


@given(even_grams())
def test_group_matches_coset_scan(lat):
    A = discriminant_group(lat)
    oracle = coset_oracle(lat)
    assert len(A) == abs(lat.det) == len(oracle)
    assert Counter(A.qvalues().values()) == Counter(oracle.values())
    for x in oracle:
        k = A.key(x)
        shifted = tuple(c + (1 if i == 0 else 0) for i, c in enumerate(x))
        assert A.key(shifted) == k
        assert A.qvalue(k) == oracle[x]


@given(even_grams(3))
def test_group_order_rank3(lat):
    A = discriminant_group(lat)
    assert len(A) == abs(lat.det)
    for a in A.elements():
        assert A.add(a, A.neg(a)) == A.zero()
        assert A.pairing(a, a) == frac_part(2 * A.qvalue(a))


def test_split_diagonal():
    sp = orthogonal_complement(GramLattice([[2, 0], [0, -2]]), [(1, 0)])
    assert sp.complement == ((0, 1),) or sp.complement == ((0, -1),)


def test_siegel_split_with_identity_direction():
    lat = hyperbolic_lattice(GramLattice([[2]]))
    # A = identity is (1, 0, 1); its complement is spanned by B1 = (1, 0, -1) and B2 = (0, 1, 0)
    sp = orthogonal_complement(lat, [(1, 0, 1)])
    span = {tuple(v) for v in sp.complement}
    for b in span:
        assert lat.pair(b, (1, 0, 1)) == 0
    for b in [(1, 0, -1), (0, 1, 0)]:
        assert lat.pair(b, (1, 0, 1)) == 0
    assert sp.complement_lattice.is_negative_definite()
    assert abs(sp.complement_lattice.det) == abs(GramLattice([[lat.pair(a, b) for b in [(1, 0, -1), (0, 1, 0)]]
                                                               for a in [(1, 0, -1), (0, 1, 0)]]).det)


@given(even_grams(3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_random_complement_is_orthogonal(lat, v):
    assume(any(v) and lat.Q(v) != 0)
    try:
        sp = SublatticeSplit(lat, [v])
    except LatticeError:
        assume(False)
    assert len(sp.complement) == 2
    for c in sp.complement:
        assert lat.pair(c, v) == 0
    x = (Fraction(1, 3), 2, -1)
    a, b = sp.split(x)
    back = tuple(p + q for p, q in zip(sp.embed_sub(a), sp.embed_complement(b)))
    assert back == tuple(Fraction(t) for t in x)


def test_integer_kernel_is_saturated():
    ker = integer_kernel([[2, 4, 6]], 3)
    assert len(ker) == 2
    for k in ker:
        assert 2 * k[0] + 4 * k[1] + 6 * k[2] == 0


def brute_dual(lat, box, keep):
    out = []
    for y in product(range(-box, box + 1), repeat=lat.rank):
        x = mat_vec(lat.inverse, y)
        if keep(x):
            out.append(x)
    return sorted(set(out))


def test_enumerate_rank_one():
    lat = GramLattice([[2]])
    got = enumerate_dual(lat, 1)
    assert got == sorted((Fraction(a, 2),) for a in (-2, -1, 0, 1, 2))
    assert enumerate_dual(lat, -1) == []


@given(even_grams(), st.integers(0, 6))
def test_enumerate_definite_matches_scan(lat, bound):
    assume(lat.is_positive_definite() or lat.is_negative_definite())
    got = enumerate_dual(lat, bound)
    # Cauchy-Schwarz: |<e_i, x>|^2 <= 4 |Q(e_i)| |Q(x)|
    box = 2 + int((2 * max(abs(lat.gram[i][i]) for i in range(2)) * bound) ** 0.5)
    assert got == brute_dual(lat, box, lambda x: abs(lat.Q(x)) <= bound)


@pytest.mark.parametrize("gram,w0", [
    ([[0, 1], [1, 0]], (1, 1)),
    ([[2, 0], [0, -2]], (1, 0)),
    ([[2, 1], [1, -2]], (1, 0)),
    ([[0, 1, 0], [1, 0, 0], [0, 0, -2]], (1, 1, 0)),
    ([[0, 2, 0], [2, 0, 0], [0, 0, -4]], (1, 1, 0)),
])
@pytest.mark.parametrize("bound", [0, 2, 5])
@pytest.mark.parametrize("strict", [False, True])
def test_enumerate_lorentzian_matches_scan(gram, w0, bound, strict):
    lat = GramLattice(gram)

    def keep(x):
        q, h = lat.Q(x), lat.pair(x, w0)
        return h <= bound and h >= 0 and (q > 0 if strict else q >= 0) and (not strict or h > 0)

    got = enumerate_dual(lat, bound, w0=w0, strict=strict)
    box = 4 * (bound + 2) if lat.rank == 2 else 2 * (bound + 2)
    assert got == brute_dual(lat, box, keep)


def test_hyperbolic_two_dimensional_example():
    lat = GramLattice([[0, 1], [1, 0]])
    got = enumerate_dual(lat, 2, w0=(1, 1))
    assert got == sorted((Fraction(a), Fraction(b)) for a in range(3) for b in range(3) if a + b <= 2)


def test_enumerate_invalid_region():
    with pytest.raises(LatticeError):
        enumerate_dual(GramLattice([[2, 0], [0, -2]]), 3, w0=(0, 1))
