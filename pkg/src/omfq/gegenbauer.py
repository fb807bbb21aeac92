"""Gegenbauer polynomials and their multilinear (tensor) versions.

``g_N^s(x, y)`` is the coefficient of t^N in (1 - x t + y t^2)^(-s);
``G_N^s = N! Gamma(s) / Gamma(s + ceil(N/2)) * g_N^s`` is the rescaled
version with coefficients in Z[x, y, s].  Gamma is never evaluated: the
ratios are rising factorials, so negative and half-integral s are fine.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Callable, Dict, List, Sequence, Tuple

from .series import rising_factorial

Poly = Dict[Tuple[int, ...], Fraction]


class TensorError(ValueError):
    pass


def _ceil_half(n: int) -> int:
    return (n + 1) // 2


def index_pairs(N: int) -> List[Tuple[int, int]]:
    """All (n1, n2) with 2 n1 + n2 = N."""
    return [(n1, N - 2 * n1) for n1 in range(N // 2 + 1)]


def g_coefficients(N: int, s) -> Dict[Tuple[int, int], Fraction]:
    """Coefficients of x^n2 y^n1 in the unnormalized g_N^s."""
    s = Fraction(s)
    out = {}
    for n1, n2 in index_pairs(N):
        out[(n1, n2)] = (-1) ** n1 * rising_factorial(s, n1 + n2) / (factorial(n1) * factorial(n2))
    return out


def G_coefficients(N: int, s) -> Dict[Tuple[int, int], Fraction]:
    """Coefficients of x^n2 y^n1 in G_N^s."""
    s = Fraction(s)
    c = _ceil_half(N)
    out = {}
    for n1, n2 in index_pairs(N):
        out[(n1, n2)] = (-1) ** n1 * Fraction(factorial(N), factorial(n1) * factorial(n2)) \
            * rising_factorial(s + c, n1 + n2 - c)
    return out


def G_coefficient_in_s(N: int, n1: int) -> List[int]:
    """The x^n2 y^n1 coefficient of G_N^s as an integer polynomial in s (low degree first)."""
    n2 = N - 2 * n1
    if n2 < 0 or n1 < 0:
        raise ValueError("need 2 n1 <= N")
    c = _ceil_half(N)
    poly = [1]
    for i in range(n1 + n2 - c):
        shift = c + i
        # multiply by (s + shift)
        new = [0] * (len(poly) + 1)
        for j, a in enumerate(poly):
            new[j] += a * shift
            new[j + 1] += a
        poly = new
    scal = factorial(N) // (factorial(n1) * factorial(n2))
    sign = (-1) ** n1
    return [sign * scal * a for a in poly]


def g_eval(N: int, s, x, y) -> Fraction:
    x, y = Fraction(x), Fraction(y)
    return sum((c * x ** n2 * y ** n1 for (n1, n2), c in g_coefficients(N, s).items()), Fraction(0))


def G_eval(N: int, s, x, y) -> Fraction:
    """G_N^s(x, y) exactly."""
    x, y = Fraction(x), Fraction(y)
    return sum((c * x ** n2 * y ** n1 for (n1, n2), c in G_coefficients(N, s).items()), Fraction(0))


# polynomials in d variables, used as packed symmetric tensors

def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return {e: c for e, c in out.items() if c}


def _poly_add(a: Poly, b: Poly, scale=1) -> Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, Fraction(0)) + scale * c
    return {e: c for e, c in out.items() if c}


def linear_poly(coeffs: Sequence) -> Poly:
    d = len(coeffs)
    out = {}
    for i, c in enumerate(coeffs):
        if c:
            e = [0] * d
            e[i] = 1
            out[tuple(e)] = Fraction(c)
    return out


def quadratic_poly(m: Sequence[Sequence]) -> Poly:
    """The polynomial v -> m(v, v) for a symmetric bilinear form m."""
    d = len(m)
    out: Poly = {}
    for i in range(d):
        for j in range(d):
            if m[i][j]:
                e = [0] * d
                e[i] += 1
                e[j] += 1
                e = tuple(e)
                out[e] = out.get(e, Fraction(0)) + Fraction(m[i][j])
    return {e: c for e, c in out.items() if c}


def _poly_pow(p: Poly, n: int, d: int) -> Poly:
    out: Poly = {(0,) * d: Fraction(1)}
    for _ in range(n):
        out = _poly_mul(out, p)
    return out


def _multiplicities(idx: Sequence[int], d: int) -> Tuple[int, ...]:
    m = [0] * d
    for i in idx:
        m[i] += 1
    return tuple(m)


class TensorForm:
    """A symmetric N-linear form on Q^d (coordinates of a basis of a lattice).

    Stored as its diagonal polynomial P(v) = T(v, ..., v), which determines
    the form uniquely.  ``components()`` gives the full index map.
    """

    __slots__ = ("degree", "dim", "poly")

    def __init__(self, degree: int, dim: int, poly: Poly):
        for e in poly:
            if len(e) != dim or sum(e) != degree:
                raise TensorError(f"monomial {e} is not of degree {degree} in {dim} variables")
        self.degree = degree
        self.dim = dim
        self.poly = {e: Fraction(c) for e, c in poly.items() if c}

    @classmethod
    def zero(cls, degree: int, dim: int) -> "TensorForm":
        return cls(degree, dim, {})

    @classmethod
    def from_components(cls, degree: int, dim: int, comps: Dict[Tuple[int, ...], Fraction]) -> "TensorForm":
        """Build from a full component map; the map must be symmetric."""
        poly: Poly = {}
        for idx, c in comps.items():
            if len(idx) != degree:
                raise TensorError("component index has the wrong length")
            if c != comps.get(tuple(sorted(idx)), Fraction(0)):
                raise TensorError("components are not symmetric")
            e = _multiplicities(idx, dim)
            poly[e] = poly.get(e, Fraction(0)) + Fraction(c)
        return cls(degree, dim, poly)

    def component(self, idx: Sequence[int]) -> Fraction:
        if len(idx) != self.degree:
            raise TensorError("component index has the wrong length")
        e = _multiplicities(idx, self.dim)
        c = self.poly.get(e)
        if not c:
            return Fraction(0)
        w = 1
        for x in e:
            w *= factorial(x)
        return c * w / factorial(self.degree)

    def components(self) -> Dict[Tuple[int, ...], Fraction]:
        out = {}
        for idx in product(range(self.dim), repeat=self.degree):
            c = self.component(idx)
            if c:
                out[idx] = c
        return out

    def is_symmetric(self) -> bool:
        comps = self.components()
        return all(comps.get(tuple(p), Fraction(0)) == c for idx, c in comps.items()
                   for p in set(_perms(idx)))

    def diagonal(self, v: Sequence) -> Fraction:
        v = [Fraction(x) for x in v]
        if len(v) != self.dim:
            raise TensorError("vector has the wrong dimension")
        tot = Fraction(0)
        for e, c in self.poly.items():
            t = c
            for x, k in zip(v, e):
                if k:
                    t *= x ** k
            tot += t
        return tot

    def __call__(self, *vectors: Sequence) -> Fraction:
        """Multilinear evaluation T(v_1, ..., v_N)."""
        if len(vectors) != self.degree:
            raise TensorError(f"expected {self.degree} vectors")
        if self.degree == 0:
            return self.poly.get((0,) * self.dim, Fraction(0))
        vs = [[Fraction(x) for x in v] for v in vectors]
        for v in vs:
            if len(v) != self.dim:
                raise TensorError("vector has the wrong dimension")
        tot = Fraction(0)
        for idx in product(range(self.dim), repeat=self.degree):
            p = Fraction(1)
            for v, i in zip(vs, idx):
                p *= v[i]
                if not p:
                    break
            if p:
                tot += p * self.component(idx)
        return tot

    def __add__(self, other: "TensorForm") -> "TensorForm":
        self._check(other)
        return TensorForm(self.degree, self.dim, _poly_add(self.poly, other.poly))

    def __sub__(self, other: "TensorForm") -> "TensorForm":
        self._check(other)
        return TensorForm(self.degree, self.dim, _poly_add(self.poly, other.poly, -1))

    def scale(self, c) -> "TensorForm":
        c = Fraction(c)
        return TensorForm(self.degree, self.dim, {e: c * x for e, x in self.poly.items()})

    def __neg__(self) -> "TensorForm":
        return self.scale(-1)

    def __mul__(self, c) -> "TensorForm":
        if isinstance(c, TensorForm):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.poly)

    def _check(self, other):
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise TensorError("degree/dimension mismatch")

    def is_zero(self) -> bool:
        return not self.poly

    def __eq__(self, other):
        if isinstance(other, TensorForm):
            return (self.degree, self.dim, self.poly) == (other.degree, other.dim, other.poly)
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.degree, self.dim, frozenset(self.poly.items())))

    def __repr__(self):
        return f"TensorForm(N={self.degree}, d={self.dim}, {self.poly})"


def _perms(idx):
    from itertools import permutations
    return permutations(idx)


def gegenbauer_poly(N: int, s, r: Sequence, m: Sequence[Sequence], normalized: bool = True) -> Poly:
    """Diagonal polynomial v -> G_N^s(r(v), m(v, v))."""
    d = len(r)
    coeffs = G_coefficients(N, s) if normalized else g_coefficients(N, s)
    rp, mp = linear_poly(r), quadratic_poly(m)
    out: Poly = {}
    for (n1, n2), c in coeffs.items():
        if c:
            out = _poly_add(out, _poly_mul(_poly_pow(rp, n2, d), _poly_pow(mp, n1, d)), c)
    return out


def G_multilinear(N: int, s, r: Sequence, m: Sequence[Sequence]) -> TensorForm:
    """The symmetric N-form obtained by symmetrizing the t^N coefficient of (1 - r t + m t^2)^(-s), rescaled."""
    d = len(r)
    if len(m) != d or any(len(row) != d for row in m):
        raise TensorError("dimension mismatch between r and m")
    for i in range(d):
        for j in range(d):
            if Fraction(m[i][j]) != Fraction(m[j][i]):
                raise TensorError("m must be symmetric")
    return TensorForm(N, d, gegenbauer_poly(N, s, r, m))


def polarize(diag: Callable[[Tuple[Fraction, ...]], Fraction], N: int, dim: int) -> TensorForm:
    """Recover a symmetric N-form from its diagonal by finite differences over subset sums."""
    comps: Dict[Tuple[int, ...], Fraction] = {}
    seen = set()
    for idx in product(range(dim), repeat=N):
        key = tuple(sorted(idx))
        if key in seen:
            comps[idx] = comps[key]
            continue
        seen.add(key)
        tot = Fraction(0)
        for k in range(N + 1):
            for sub in combinations(range(N), k):
                v = [Fraction(0)] * dim
                for p in sub:
                    v[key[p]] += 1
                tot += (-1) ** (N - k) * Fraction(diag(tuple(v)))
        comps[key] = tot / factorial(N)
        comps[idx] = comps[key]
    form = TensorForm.from_components(N, dim, comps)
    # a posteriori check: the form must reproduce the given diagonal
    for v in product(range(-1, 3), repeat=dim):
        if form.diagonal(v) != Fraction(diag(tuple(Fraction(x) for x in v))):
            raise TensorError("inconsistent diagonal: not the diagonal of a symmetric N-form")
    return form
