"""Jacobi forms of lattice index, vector-valued forms for the Weil representation,
and the maps between them.

Conventions.  A vector-valued form on a lattice Lambda stores c(gamma, n) with
n in Z + Q(gamma).  Theta decomposition sends a Jacobi form of index L
(positive-definite) to a vector-valued form on L(-1), with
c_vv(r + L, n - Q_L(r)) = c_jac(n, r).  Coefficient values are Fractions or,
for development coefficients, TensorForms.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Poly, cyclotomic_poly, symbols

from .gegenbauer import G_coefficients, TensorForm, _poly_add, _poly_mul, _poly_pow, linear_poly, quadratic_poly
from .lattice import (DiscriminantGroup, GramLattice, LatticeError, SublatticeSplit, Vector,
                      discriminant_group, enumerate_dual, vec)

Key = Tuple[int, ...]


class MalformedJacobiForm(ValueError):
    pass


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _value(c):
    return c if isinstance(c, TensorForm) else Fraction(c)


# ---------------------------------------------------------------- cyclotomic numbers

@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> Tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, highest degree first."""
    x = symbols("x")
    return tuple(int(c) for c in Poly(cyclotomic_poly(n, x), x).all_coeffs())


class CyclotomicNumber:
    """An element sum_k a_k zeta_n^k of Q(zeta_n), stored in the group algebra of Z/n."""

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords: Dict[int, object] = None):
        if order < 1:
            raise ValueError("order must be positive")
        self.order = order
        acc: Dict[int, Fraction] = {}
        for k, c in (coords or {}).items():
            k %= order
            c = c if type(c) is Fraction else Fraction(c)
            acc[k] = acc[k] + c if k in acc else c
        self.coords = {k: c for k, c in acc.items() if c}

    @classmethod
    def _raw(cls, order: int, coords: Dict[int, Fraction]) -> "CyclotomicNumber":
        """Trusted constructor: keys already reduced mod order, values nonzero Fractions."""
        out = object.__new__(cls)
        out.order = order
        out.coords = coords
        return out

    @classmethod
    def root(cls, order: int, k: int = 1) -> "CyclotomicNumber":
        return cls(order, {k: 1})

    @classmethod
    def e(cls, x: Fraction, order: Optional[int] = None) -> "CyclotomicNumber":
        """exp(2 pi i x) for rational x."""
        x = Fraction(x)
        n = order or x.denominator
        if (x * n).denominator != 1:
            raise ValueError(f"{x} is not a multiple of 1/{n}")
        return cls(n, {int(x * n): 1})

    @classmethod
    def rational(cls, c, order: int = 1) -> "CyclotomicNumber":
        return cls(order, {0: c})

    def lift(self, m: int) -> "CyclotomicNumber":
        if m % self.order:
            raise ValueError(f"{m} is not a multiple of {self.order}")
        if m == self.order:
            return self
        f = m // self.order
        return CyclotomicNumber._raw(m, {k * f: c for k, c in self.coords.items()})

    def _common(self, other):
        if not isinstance(other, CyclotomicNumber):
            other = CyclotomicNumber.rational(other, self.order)
        m = _lcm(self.order, other.order)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        a, b = self._common(other)
        out = dict(a.coords)
        for k, c in b.coords.items():
            if k in out:
                v = out[k] + c
                if v:
                    out[k] = v
                else:
                    del out[k]
            else:
                out[k] = c
        return CyclotomicNumber._raw(a.order, out)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber._raw(self.order, {k: -c for k, c in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CyclotomicNumber):
            c = Fraction(other)
            return CyclotomicNumber(self.order, {k: c * v for k, v in self.coords.items()})
        a, b = self._common(other)
        out: Dict[int, Fraction] = {}
        for i, x in a.coords.items():
            for j, y in b.coords.items():
                k = (i + j) % a.order
                out[k] = out.get(k, Fraction(0)) + x * y
        return CyclotomicNumber(a.order, out)

    __rmul__ = __mul__

    def conjugate(self) -> "CyclotomicNumber":
        return CyclotomicNumber(self.order, {-k: c for k, c in self.coords.items()})

    def reduced(self) -> Tuple[Fraction, ...]:
        """Coordinates in the power basis 1, zeta, ..., zeta^(phi(n)-1)."""
        phi = _cyclotomic(self.order)
        deg = len(phi) - 1
        # integer arithmetic over a common denominator
        den = 1
        for c in self.coords.values():
            den = _lcm(den, c.denominator)
        poly = [0] * max(self.order, deg)
        for k, c in self.coords.items():
            poly[k] = c.numerator * (den // c.denominator)
        for top in range(len(poly) - 1, deg - 1, -1):
            c = poly[top]
            if c:
                # subtract c x^(top-deg) Phi_n(x); Phi_n is monic
                for i, a in enumerate(phi):
                    poly[top - i] -= c * a
        return tuple(Fraction(x, den) for x in poly[:deg])

    def canonical(self) -> "CyclotomicNumber":
        """The same number written in the power basis (fewest redundant terms)."""
        return CyclotomicNumber(self.order, dict(enumerate(self.reduced())))

    def is_zero(self) -> bool:
        return not any(self.reduced())

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicNumber.rational(other, self.order)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        terms = " + ".join(f"{c}*z{self.order}^{k}" for k, c in sorted(self.coords.items()))
        return f"Cyclotomic({terms or 0})"


# ---------------------------------------------------------------- Weil representation

def _weil_order(group: DiscriminantGroup) -> int:
    return _lcm(8, group.level())


def gauss_sum(lattice: GramLattice) -> CyclotomicNumber:
    """sum over the discriminant group of e(Q(gamma)); equals sqrt|A| e(sigma/8)."""
    A = discriminant_group(lattice)
    n = _weil_order(A)
    out = CyclotomicNumber(n)
    for g in A.elements():
        out = out + CyclotomicNumber.e(A.qvalue(g), n)
    return out


@lru_cache(maxsize=None)
def _weil_matrix_cached(gram, gen: str):
    lat = GramLattice(gram)
    A = discriminant_group(lat)
    n = _weil_order(A)
    els = A.elements()
    m: Dict[Tuple[Key, Key], CyclotomicNumber] = {}
    if gen == "T":
        for g in els:
            m[(g, g)] = CyclotomicNumber.e(A.qvalue(g), n)
    elif gen == "S":
        # e(-sigma/8) / sqrt|A| is the conjugate Gauss sum divided by |A|
        pref = (gauss_sum(lat).conjugate() * Fraction(1, A.order)).canonical()
        for g in els:
            for b in els:
                j = int(-A.pairing(g, b) * n)
                m[(b, g)] = CyclotomicNumber(n, {k + j: c for k, c in pref.coords.items()})
    else:
        raise ValueError(f"unknown generator {gen!r}; use 'S' or 'T'")
    return m


def weil_matrix(lattice: GramLattice, gen: str) -> Dict[Tuple[Key, Key], CyclotomicNumber]:
    """Entries m[(beta, gamma)] with rho(gen) e_gamma = sum_beta m[(beta, gamma)] e_beta."""
    return _weil_matrix_cached(lattice.gram, gen)


@lru_cache(maxsize=None)
def _weil_columns(gram, gen: str) -> Dict[Key, List[Tuple[Key, CyclotomicNumber]]]:
    cols: Dict[Key, List[Tuple[Key, CyclotomicNumber]]] = {}
    for (b, g), x in _weil_matrix_cached(gram, gen).items():
        cols.setdefault(g, []).append((b, x))
    return cols


def weil_action(lattice: GramLattice, gen: str, v: Dict[Key, object]) -> Dict[Key, CyclotomicNumber]:
    """Apply rho(S) or rho(T) to a vector in the group algebra (missing keys are 0)."""
    A = discriminant_group(lattice)
    n = _weil_order(A)
    cols = _weil_columns(lattice.gram, gen)
    out = {b: CyclotomicNumber(n) for b in A.elements()}
    for g, c in v.items():
        if c.coords == {} if isinstance(c, CyclotomicNumber) else c == 0:
            continue
        for b, x in cols.get(g, ()):
            out[b] = out[b] + x * c
    return {b: x.canonical() for b, x in out.items()}


def weil_word(lattice: GramLattice, word: str, v: Dict[Key, object]) -> Dict[Key, CyclotomicNumber]:
    """Apply a word in S and T, rightmost letter first."""
    for g in reversed(word):
        v = weil_action(lattice, g, v)
    return v


# ---------------------------------------------------------------- intertwiners and trace

class GlueMap:
    """The overlattice L_tilde = sub + complement inside Lambda, on discriminant groups.

    Coordinates on L_tilde are (sub coordinates, complement coordinates).
    """

    def __init__(self, split: SublatticeSplit):
        self.split = split
        r, s = len(split.sub), len(split.complement)
        if r + s != split.ambient.rank:
            raise LatticeError("sub + complement is not of full rank in the ambient lattice")
        g1, g2 = split.sub_lattice.gram, split.complement_lattice.gram
        gram = [[0] * (r + s) for _ in range(r + s)]
        for i in range(r):
            for j in range(r):
                gram[i][j] = g1[i][j]
        for i in range(s):
            for j in range(s):
                gram[r + i][r + j] = g2[i][j]
        self.tilde = GramLattice(gram)
        self.tilde_group = discriminant_group(self.tilde)
        self.ambient_group = discriminant_group(split.ambient)
        self.rank_sub = r
        self.image: Dict[Key, Optional[Key]] = {}
        for d in self.tilde_group.elements():
            x = self.to_ambient(self.tilde_group.representative(d))
            self.image[d] = self.ambient_group.key(x) if split.ambient.is_dual(x) else None

    def to_ambient(self, t: Sequence) -> Vector:
        r = self.rank_sub
        a = self.split.embed_sub(t[:r])
        b = self.split.embed_complement(t[r:])
        return tuple(x + y for x, y in zip(a, b))

    def from_ambient(self, x: Sequence) -> Vector:
        return self.split.coords_sub(x) + self.split.coords_complement(x)


def arrow_down_vector(glue: GlueMap, v: Dict[Key, object]) -> Dict[Key, object]:
    """e_gamma -> sum of e_delta over delta in Lambda' with delta + Lambda = gamma."""
    out = {}
    for d, g in glue.image.items():
        if g is not None and g in v:
            out[d] = v[g]
    return out


def arrow_up_vector(glue: GlueMap, w: Dict[Key, object]) -> Dict[Key, object]:
    """e_delta -> e_(delta + Lambda) if delta lies in Lambda', else 0."""
    out: Dict[Key, object] = {}
    for d, c in w.items():
        g = glue.image[d]
        if g is not None:
            out[g] = out[g] + c if g in out else c
    return out


def trace_map(x: Dict[Tuple[Key, Key, Key], object]) -> Dict[Key, object]:
    """e_beta (x) e_gamma (x) e_delta -> e_beta if gamma = delta, else 0."""
    out: Dict[Key, object] = {}
    for (b, g, d), c in x.items():
        if g == d:
            out[b] = out[b] + c if b in out else c
    return out


# ---------------------------------------------------------------- expansions

class VVMFExpansion:
    """sum c(gamma, n) q^n e_gamma for the Weil representation of ``lattice``; known for n <= bound."""

    def __init__(self, lattice: GramLattice, weight, coeffs: Dict[Tuple[Key, object], object], bound,
                 check: bool = True):
        self.lattice = lattice
        self.group = discriminant_group(lattice)
        self.weight = Fraction(weight)
        self.bound = Fraction(bound)
        self.coeffs: Dict[Tuple[Key, Fraction], object] = {}
        for (g, n), c in coeffs.items():
            c = _value(c)
            if not c:
                continue
            g, n = tuple(g), Fraction(n)
            if check:
                if g not in self.group._index:
                    raise LatticeError(f"{g} is not an element of the discriminant group")
                if (n - self.group.qvalue(g)).denominator != 1:
                    raise LatticeError(f"exponent {n} is not in Z + Q(gamma) for gamma = {g}")
            if n <= self.bound:
                self.coeffs[(g, n)] = c

    def __getitem__(self, key):
        g, n = key
        return self.coeffs.get((tuple(g), Fraction(n)), Fraction(0))

    def items(self):
        return sorted(self.coeffs.items())

    def min_exponent(self) -> Optional[Fraction]:
        return min((n for _, n in self.coeffs), default=None)

    def is_cusp(self) -> bool:
        return all(n > 0 for _, n in self.coeffs)

    def restrict(self, bound) -> "VVMFExpansion":
        return VVMFExpansion(self.lattice, self.weight, self.coeffs, min(self.bound, Fraction(bound)), check=False)

    def map_values(self, fn) -> "VVMFExpansion":
        return VVMFExpansion(self.lattice, self.weight, {k: fn(c) for k, c in self.coeffs.items()}, self.bound,
                             check=False)

    def evaluate(self, *vectors) -> "VVMFExpansion":
        return self.map_values(lambda t: t(*vectors))

    def diagonal(self, v) -> "VVMFExpansion":
        return self.map_values(lambda t: t.diagonal(v))

    def monomial_part(self, e) -> "VVMFExpansion":
        """The scalar form of the coefficients of monomial ``e`` in tensor values."""
        return self.map_values(lambda t: t.poly.get(tuple(e), Fraction(0)))

    def __add__(self, other: "VVMFExpansion") -> "VVMFExpansion":
        acc = dict(self.coeffs)
        for k, c in other.coeffs.items():
            acc[k] = acc[k] + c if k in acc else c
        return VVMFExpansion(self.lattice, self.weight, acc, min(self.bound, other.bound), check=False)

    def scale(self, c) -> "VVMFExpansion":
        c = Fraction(c)
        return self.map_values(lambda x: x * c)

    def __eq__(self, other):
        return (isinstance(other, VVMFExpansion) and self.lattice == other.lattice
                and self.weight == other.weight and self.coeffs == other.coeffs)

    def __repr__(self):
        return f"VVMFExpansion(weight={self.weight}, {len(self.coeffs)} terms, n<={self.bound})"


class JacobiFormExpansion:
    """sum c(n, r) q^n zeta^r for a positive-definite index lattice; known for n <= bound."""

    def __init__(self, lattice: GramLattice, weight, coeffs: Dict[Tuple[object, Sequence], object], bound,
                 multiplier: str = "trivial", weak: bool = False, check: bool = True):
        if lattice.rank and not lattice.is_positive_definite():
            raise LatticeError("Jacobi index lattice must be positive-definite")
        self.lattice = lattice
        self.weight = Fraction(weight)
        self.bound = Fraction(bound)
        self.multiplier = multiplier
        self.weak = weak
        self.coeffs: Dict[Tuple[Fraction, Vector], object] = {}
        for (n, r), c in coeffs.items():
            c = _value(c)
            if not c:
                continue
            n, r = Fraction(n), vec(r)
            if check:
                if len(r) != lattice.rank or not lattice.is_dual(r):
                    raise LatticeError(f"{r} is not a dual vector of the index lattice")
                if not weak and lattice.Q(r) > n:
                    raise MalformedJacobiForm(f"c({n}, {r}) != 0 although Q(r) = {lattice.Q(r)} > n")
            if n <= self.bound:
                self.coeffs[(n, r)] = c

    def __getitem__(self, key):
        n, r = key
        return self.coeffs.get((Fraction(n), vec(r)), Fraction(0))

    def items(self):
        return sorted(self.coeffs.items())

    def _like(self, coeffs, bound=None, weak=None) -> "JacobiFormExpansion":
        return JacobiFormExpansion(self.lattice, self.weight, coeffs, self.bound if bound is None else bound,
                                   multiplier=self.multiplier, weak=self.weak if weak is None else weak,
                                   check=False)

    def restrict(self, bound) -> "JacobiFormExpansion":
        return self._like(self.coeffs, min(self.bound, Fraction(bound)))

    def map_values(self, fn) -> "JacobiFormExpansion":
        return self._like({k: fn(c) for k, c in self.coeffs.items()})

    def evaluate(self, *vectors) -> "JacobiFormExpansion":
        return self.map_values(lambda t: t(*vectors))

    def diagonal(self, v) -> "JacobiFormExpansion":
        return self.map_values(lambda t: t.diagonal(v))

    def __add__(self, other: "JacobiFormExpansion") -> "JacobiFormExpansion":
        acc = dict(self.coeffs)
        for k, c in other.coeffs.items():
            acc[k] = acc[k] + c if k in acc else c
        return self._like(acc, min(self.bound, other.bound), weak=self.weak or other.weak)

    def scale(self, c) -> "JacobiFormExpansion":
        c = Fraction(c)
        return self.map_values(lambda x: x * c)

    def q_series(self) -> Dict[Fraction, object]:
        """For rank-zero index: the map n -> coefficient."""
        if self.lattice.rank:
            raise LatticeError("q_series is only defined for rank-zero index")
        return {n: c for (n, _), c in sorted(self.coeffs.items())}

    def __eq__(self, other):
        return (isinstance(other, JacobiFormExpansion) and self.lattice == other.lattice
                and self.weight == other.weight and self.coeffs == other.coeffs)

    def __repr__(self):
        return (f"JacobiFormExpansion(index={[list(r) for r in self.lattice.gram]}, weight={self.weight}, "
                f"{len(self.coeffs)} terms, n<={self.bound})")


RANK_ZERO = GramLattice([])


# ---------------------------------------------------------------- theta decomposition

def _coset_minima(lattice: GramLattice) -> Dict[Key, Fraction]:
    """Minimal norm in each coset of L'/L (positive-definite L)."""
    A = discriminant_group(lattice)
    t = Fraction(1)
    while True:
        mins: Dict[Key, Fraction] = {}
        for r in enumerate_dual(lattice, t):
            k = A.key(r)
            q = lattice.Q(r)
            if k not in mins or q < mins[k]:
                mins[k] = q
        if len(mins) == A.order:
            return mins
        t *= 2


def theta_decompose(phi: JacobiFormExpansion, check: bool = True) -> VVMFExpansion:
    """Jacobi form of index L to a vector-valued form on L(-1)."""
    L = phi.lattice
    base = L.scaled(-1) if L.rank else L
    A = discriminant_group(base)
    mins = _coset_minima(L) if L.rank else {(): Fraction(0)}
    worst = max(mins.values())
    out: Dict[Tuple[Key, Fraction], object] = {}
    for (n, r), c in phi.coeffs.items():
        key = (A.key(r), n - L.Q(r))
        if key in out and out[key] != c:
            raise MalformedJacobiForm(f"representatives of {key} disagree: {out[key]} vs {c}")
        out[key] = c
    if check and phi.coeffs and L.rank:
        # every representative inside the truncation must carry the same coefficient
        lo = min(m for _, m in out)
        reps: Dict[Key, List[Vector]] = {}
        for r in enumerate_dual(L, phi.bound - lo):
            reps.setdefault(A.key(r), []).append(r)
        for (g, m), c in out.items():
            for r in reps.get(g, []):
                n = m + L.Q(r)
                if n <= phi.bound and phi[(n, r)] != c:
                    raise MalformedJacobiForm(f"c({n}, {r}) = {phi[(n, r)]} differs from its class value {c}")
    bound = phi.bound - worst
    return VVMFExpansion(base, phi.weight - Fraction(L.rank, 2), out, bound, check=False)


def theta_recompose(F: VVMFExpansion, bound=None, multiplier: str = "trivial") -> JacobiFormExpansion:
    """Vector-valued form on a negative-definite lattice to a Jacobi form of index lattice(-1)."""
    base = F.lattice
    if base.rank and not base.is_negative_definite():
        raise LatticeError("theta decomposition needs a negative-definite lattice")
    L = base.scaled(-1) if base.rank else base
    B = F.bound if bound is None else Fraction(bound)
    if B > F.bound:
        raise ValueError(f"requested bound {B} exceeds the known bound {F.bound}")
    out = {}
    if F.coeffs:
        lo = F.min_exponent()
        reps: Dict[Key, List[Vector]] = {}
        for r in enumerate_dual(L, B - lo):
            reps.setdefault(F.group.key(r), []).append(r)
        for (g, m), c in F.coeffs.items():
            for r in reps.get(g, []):
                n = m + L.Q(r)
                if n <= B:
                    out[(n, r)] = c
    weak = bool(F.coeffs) and F.min_exponent() < 0
    return JacobiFormExpansion(L, F.weight + Fraction(L.rank, 2), out, B, multiplier=multiplier, weak=weak,
                               check=False)


# ---------------------------------------------------------------- development coefficients

def _kernel_poly(N: int, s, lin: Sequence, quad: Sequence[Sequence], coeffs=None) -> dict:
    """Diagonal polynomial of G_N^s(lin, quad) in the coordinates of a basis."""
    d = len(lin)
    coeffs = coeffs or G_coefficients(N, s)
    rp, qp = linear_poly(lin), quadratic_poly(quad)
    out: dict = {}
    for (n1, n2), a in coeffs.items():
        if a:
            out = _poly_add(out, _poly_mul(_poly_pow(rp, n2, d), _poly_pow(qp, n1, d)), a)
    if N == 0:
        out = {(0,) * d: Fraction(1)}
    return out


def dev_coeff(phi: JacobiFormExpansion, N: int) -> JacobiFormExpansion:
    """D_N phi as a rank-zero-index form whose coefficients are symmetric N-forms on the index lattice."""
    L = phi.lattice
    s = phi.weight - 1
    coeffs = G_coefficients(N, s)
    half = [[Fraction(x, 2) for x in row] for row in L.gram]
    out: Dict[Tuple[Fraction, Vector], dict] = {}
    for (n, r), c in phi.coeffs.items():
        if isinstance(c, TensorForm):
            raise TypeError("dev_coeff needs scalar coefficients")
        lin = L.lower(r)
        quad = [[n * x for x in row] for row in half]
        p = _kernel_poly(N, s, lin, quad, coeffs)
        out[(n, ())] = _poly_add(out.get((n, ()), {}), p, c)
    tensors = {k: TensorForm(N, L.rank, p) for k, p in out.items()}
    return JacobiFormExpansion(RANK_ZERO, phi.weight + N, tensors, phi.bound, multiplier=phi.multiplier,
                               weak=False, check=False)


def partial_dev_coeff(phi: JacobiFormExpansion, K: Sequence[Sequence[int]], N: int,
                      complement: Optional[Sequence[Sequence[int]]] = None) -> JacobiFormExpansion:
    """Develop along the complement of K in the index lattice; the result has index K.

    Coefficients are symmetric N-forms in the coordinates of the complement basis.
    The kernel at (n, r) is G_N^(k-1-dim K/2)(<r, .>, (n - Q(r_K)) B / 2).
    """
    L = phi.lattice
    try:
        split = SublatticeSplit(L, K, complement)
    except LatticeError as e:
        raise LatticeError(f"degenerate split: {e}") from e
    Kl, C = split.sub_lattice, split.complement_lattice
    d = C.rank
    s = phi.weight - 1 - Fraction(Kl.rank, 2)
    coeffs = G_coefficients(N, s)
    half = [[Fraction(x, 2) for x in row] for row in C.gram]
    out: Dict[Tuple[Fraction, Vector], dict] = {}
    for (n, r), c in phi.coeffs.items():
        rk = split.coords_sub(r)
        lin = [L.pair(r, b) for b in split.complement]
        m = n - Kl.Q(rk)
        quad = [[m * x for x in row] for row in half]
        p = _kernel_poly(N, s, lin, quad, coeffs)
        key = (n, rk)
        out[key] = _poly_add(out.get(key, {}), p, c)
    tensors = {k: TensorForm(N, d, p) for k, p in out.items()}
    return JacobiFormExpansion(Kl, phi.weight + N, tensors, phi.bound, multiplier=phi.multiplier,
                               weak=phi.weak, check=False)


def _frac(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def _check_normal(split: SublatticeSplit):
    C = split.complement_lattice
    if C.rank and not C.is_negative_definite():
        raise LatticeError("signature error: the development lattice must be negative-definite")


def dev_coeff_vvmf(F: VVMFExpansion, split: SublatticeSplit, N: int, path: str = "direct") -> VVMFExpansion:
    """Development coefficients of F along ``split.sub``, developing in the negative-definite ``split.complement``.

    The output is a form for ``split.sub_lattice`` of weight k + N + dim(complement)/2
    whose coefficients are symmetric N-forms on the complement basis.
    ``path`` selects the Fourier formula ("direct") or the composition of
    arrow-down, theta tensor, trace and D_N ("composition").
    """
    if split.ambient != F.lattice:
        raise LatticeError("split does not belong to the form's lattice")
    _check_normal(split)
    if path == "direct":
        return _dev_vvmf_direct(F, split, N)
    if path == "composition":
        return _dev_vvmf_composition(F, split, N)
    raise ValueError("path must be 'direct' or 'composition'")


def _normal_vectors(split: SublatticeSplit, F: VVMFExpansion) -> List[Vector]:
    C = split.complement_lattice
    if not F.coeffs:
        return []
    return enumerate_dual(C, F.bound - F.min_exponent())


def _dev_vvmf_direct(F: VVMFExpansion, split: SublatticeSplit, N: int) -> VVMFExpansion:
    Lam, L, C = F.lattice, split.sub_lattice, split.complement_lattice
    AL = discriminant_group(L)
    d = C.rank
    s = F.weight - 1 + Fraction(d, 2)
    coeffs = G_coefficients(N, s)
    half = [[Fraction(-x, 2) for x in row] for row in C.gram]
    out: Dict[Tuple[Key, Fraction], dict] = {}
    if F.coeffs:
        lo = F.min_exponent()
        lams = _normal_vectors(split, F)
        for g in AL.elements():
            rep = AL.representative(g)
            base = split.embed_sub(rep)
            n = lo + _frac(L.Q(rep) - lo)
            while n <= F.bound:
                poly: dict = {}
                for lam in lams:
                    qpos = -C.Q(lam)
                    m = n - qpos
                    if m < lo:
                        continue
                    x = tuple(a + b for a, b in zip(base, split.embed_complement(lam)))
                    if not Lam.is_dual(x):
                        continue
                    c = F[(F.group.key(x), m)]
                    if not c:
                        continue
                    lin = [Lam.pair(x, b) for b in split.complement]
                    quad = [[n * v for v in row] for row in half]
                    poly = _poly_add(poly, _kernel_poly(N, s, lin, quad, coeffs), c)
                if poly:
                    out[(g, n)] = poly
                n += 1
    tensors = {k: TensorForm(N, d, p) for k, p in out.items()}
    return VVMFExpansion(L, F.weight + N + Fraction(d, 2), tensors, F.bound, check=False)


def arrow_down(F: VVMFExpansion, split: SublatticeSplit) -> VVMFExpansion:
    """Transport F to the overlattice-free sum sub + complement."""
    glue = GlueMap(split)
    out = {}
    for (g, n), c in F.coeffs.items():
        for d, img in glue.image.items():
            if img == g:
                out[(d, n)] = c
    return VVMFExpansion(glue.tilde, F.weight, out, F.bound, check=False)


def arrow_up(F: VVMFExpansion, split: SublatticeSplit) -> VVMFExpansion:
    """Transport a form on sub + complement back to the ambient lattice."""
    glue = GlueMap(split)
    if F.lattice != glue.tilde:
        raise LatticeError("form does not live on sub + complement")
    out: Dict[Tuple[Key, Fraction], object] = {}
    for (d, n), c in F.coeffs.items():
        g = glue.image[d]
        if g is not None:
            k = (g, n)
            out[k] = out[k] + c if k in out else c
    return VVMFExpansion(split.ambient, F.weight, out, F.bound, check=False)


def trace_with_theta(Ft: VVMFExpansion, glue: GlueMap) -> Dict[Key, JacobiFormExpansion]:
    """Tr_L(F_tilde (x) Theta_{C(-1)}) as one Jacobi form of index C(-1) per coset of L'/L.

    The theta factor is recorded with zeta^(-lambda), so that the Jacobi
    variable pairs with the ambient form.
    """
    split = glue.split
    L, C = split.sub_lattice, split.complement_lattice
    AL, AC = discriminant_group(L), discriminant_group(C)
    r = glue.rank_sub
    Cpos = C.scaled(-1) if C.rank else C
    comps: Dict[Key, Dict[Tuple[Fraction, Vector], object]] = {g: {} for g in AL.elements()}
    if Ft.coeffs:
        lo = Ft.min_exponent()
        lams = enumerate_dual(C, Ft.bound - lo)
        for (dkey, m), c in Ft.coeffs.items():
            t = glue.tilde_group.representative(dkey)
            gL = AL.key(t[:r])
            gC = AC.key(t[r:])
            for lam in lams:
                if AC.key(lam) != gC:
                    continue
                n = m - C.Q(lam)
                if n <= Ft.bound:
                    comps[gL][(n, tuple(-x for x in lam))] = c
    d = C.rank
    return {g: JacobiFormExpansion(Cpos, Ft.weight + Fraction(d, 2), data, Ft.bound, multiplier="rho_L",
                                   weak=True, check=False)
            for g, data in comps.items()}


def _dev_vvmf_composition(F: VVMFExpansion, split: SublatticeSplit, N: int) -> VVMFExpansion:
    glue = GlueMap(split)
    Ft = arrow_down(F, split)
    jac = trace_with_theta(Ft, glue)
    L = split.sub_lattice
    d = split.complement_lattice.rank
    out = {}
    for g, phi in jac.items():
        D = dev_coeff(phi, N)
        for (n, _), t in D.coeffs.items():
            if t:
                out[(g, n)] = t
    return VVMFExpansion(L, F.weight + N + Fraction(d, 2), out, F.bound, check=False)


# ---------------------------------------------------------------- Fourier-Jacobi expansion

def hyperbolic_block(lattice: GramLattice) -> GramLattice:
    """For Gram [[0,0,1],[0,-S,0],[1,0,0]] return the positive-definite lattice S."""
    g = lattice.gram
    n = lattice.rank
    ok = n >= 2 and g[0][0] == 0 and g[-1][-1] == 0 and g[0][-1] == 1
    if ok:
        for i in range(1, n - 1):
            if g[0][i] or g[-1][i]:
                ok = False
    if not ok:
        raise LatticeError("lattice is not presented as II_{1,1} + L(-1) with coordinates (a, x, b)")
    S = [[-g[i][j] for j in range(1, n - 1)] for i in range(1, n - 1)]
    L = GramLattice(S)
    if L.rank and not L.is_positive_definite():
        raise LatticeError("the middle block must be negative-definite")
    return L


def fourier_jacobi(F, coeff_kind: str = "auto") -> Dict[int, JacobiFormExpansion]:
    """phi_a for the expansion of F in s = exp(2 pi i w).

    The index (a, x, b) goes to the coefficient of s^a q^b zeta^r in phi_a,
    with r = -x/a in the dual of L(a).  F may be an OrthoFormExpansion or a
    TensorValuedExpansion.
    """
    lat = F.lattice
    L = hyperbolic_block(lat)
    w0 = F.w0
    if any(w0[1:-1]):
        raise LatticeError("the height vector must lie in the hyperbolic plane")
    wa, wb = w0[-1], w0[0]  # <(a,x,b), w0> = a w0_b + b w0_a
    if wa <= 0 or wb <= 0:
        raise LatticeError("the height vector must have positive hyperbolic coordinates")
    by_a: Dict[int, Dict] = {}
    for nu, c in F.coeffs.items():
        a, x, b = nu[0], nu[1:-1], nu[-1]
        if a.denominator != 1:
            raise LatticeError(f"{nu} has non-integral hyperbolic coordinate")
        a = int(a)
        if a == 0:
            if any(x):
                raise LatticeError(f"{nu} lies outside the closed cone")
            r = ()
        else:
            r = tuple(-t / a for t in x)
        by_a.setdefault(a, {})[(b, r)] = c
    out: Dict[int, JacobiFormExpansion] = {}
    a = 0
    while True:
        bound = (F.bound - a * wa) / wb
        if bound < 0:
            break
        idx = L.scaled(a) if a else RANK_ZERO
        out[a] = JacobiFormExpansion(idx, F.weight, by_a.get(a, {}), bound, check=False)
        a += 1
    return out


def fourier_jacobi_reassemble(phis: Dict[int, JacobiFormExpansion], lattice: GramLattice) -> Dict[Vector, object]:
    """Inverse of ``fourier_jacobi`` on coefficient data."""
    out = {}
    L = hyperbolic_block(lattice)
    for a, phi in phis.items():
        for (b, r), c in phi.coeffs.items():
            x = tuple(-a * t for t in r) if a else (Fraction(0),) * L.rank
            out[(Fraction(a),) + x + (Fraction(b),)] = c
    return out
