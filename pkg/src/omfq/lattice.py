"""Even lattices given by Gram matrices.

Vectors are tuples of Fractions in the coordinates of the lattice basis, so
``Q(v) = v^T S v / 2`` and ``<u, v> = u^T S v``.  Dual vectors are exactly
the rational vectors with ``S v`` integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import isqrt
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

Vector = Tuple[Fraction, ...]
FMatrix = Tuple[Tuple[Fraction, ...], ...]


class LatticeError(ValueError):
    """Invalid lattice data (degenerate, odd, wrong signature, ...)."""


def vec(xs: Sequence) -> Vector:
    return tuple(Fraction(x) for x in xs)


def _to_fmatrix(m: Matrix) -> FMatrix:
    return tuple(tuple(Fraction(int(x.p), int(x.q)) for x in m.row(i)) for i in range(m.rows))


def mat_vec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> FMatrix:
    cols = list(zip(*b))
    return tuple(tuple(sum((Fraction(x) * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a)


def transpose(a: Sequence[Sequence]) -> FMatrix:
    return tuple(tuple(Fraction(x) for x in col) for col in zip(*a))


def ceil_sqrt(x: Fraction) -> int:
    """Smallest integer n >= 0 with n^2 >= x."""
    x = Fraction(x)
    if x <= 0:
        return 0
    c = -((-x.numerator) // x.denominator)
    n = isqrt(c)
    while n * n < x:
        n += 1
    return n


def signature_of(gram: Sequence[Sequence]) -> Tuple[int, int]:
    """Sylvester signature (p, q) via sign changes of the characteristic polynomial.

    The characteristic polynomial of a real symmetric matrix has only real
    roots, so Descartes' rule counts its positive and negative roots exactly.
    """
    m = Matrix(gram)
    coeffs = [c for c in m.charpoly().all_coeffs()]

    def changes(cs):
        signs = [1 if c > 0 else -1 for c in cs if c != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    deg = len(coeffs) - 1
    neg = [c * (-1) ** (deg - i) for i, c in enumerate(coeffs)]
    return changes(coeffs), changes(neg)


class GramLattice:
    """Even lattice Z^n with quadratic form Q(v) = v^T S v / 2."""

    def __init__(self, gram: Sequence[Sequence[int]], signature: Optional[Tuple[int, int]] = None):
        g = tuple(tuple(int(x) for x in row) for row in gram)
        n = len(g)
        if any(len(row) != n for row in g):
            raise LatticeError("Gram matrix must be square")
        for i in range(n):
            if g[i][i] % 2:
                raise LatticeError("Gram matrix must have even diagonal")
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise LatticeError("Gram matrix must be symmetric")
        self.gram = g
        self.rank = n
        self._S = tuple(tuple(Fraction(x) for x in row) for row in g)
        if n:
            m = Matrix(g)
            self.det = int(m.det())
            sig = signature_of(g)
        else:
            self.det = 1
            sig = (0, 0)
        if signature is not None and tuple(signature) != sig:
            raise LatticeError(f"signature {signature} does not match Gram matrix ({sig})")
        self.signature = sig
        self._inv: Optional[FMatrix] = None

    def __repr__(self):
        return f"GramLattice({[list(r) for r in self.gram]})"

    def __eq__(self, other):
        return isinstance(other, GramLattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    @property
    def S(self) -> FMatrix:
        return self._S

    @property
    def inverse(self) -> FMatrix:
        if self.det == 0:
            raise LatticeError("degenerate lattice: singular Gram matrix")
        if self._inv is None:
            self._inv = _to_fmatrix(Matrix(self.gram).inv())
        return self._inv

    def is_nondegenerate(self) -> bool:
        return self.det != 0

    def is_positive_definite(self) -> bool:
        return self.signature == (self.rank, 0)

    def is_negative_definite(self) -> bool:
        return self.signature == (0, self.rank)

    def is_lorentzian(self) -> bool:
        return self.rank >= 1 and self.signature == (1, self.rank - 1)

    def pair(self, u: Sequence, v: Sequence) -> Fraction:
        return sum((Fraction(u[i]) * self._S[i][j] * v[j]
                    for i in range(self.rank) for j in range(self.rank) if self._S[i][j] and u[i] and v[j]),
                   Fraction(0))

    def Q(self, v: Sequence) -> Fraction:
        return self.pair(v, v) / 2

    def lower(self, v: Sequence) -> Vector:
        """The coordinates of the linear form <v, .>, i.e. S v."""
        return mat_vec(self._S, v)

    def is_dual(self, v: Sequence) -> bool:
        return all(x.denominator == 1 for x in self.lower(v))

    def scaled(self, a: int) -> "GramLattice":
        """The lattice with quadratic form a * Q."""
        return GramLattice([[a * x for x in row] for row in self.gram])

    def dual_vector(self, coords: Sequence) -> "DualVector":
        return DualVector(self, vec(coords))


@dataclass(frozen=True)
class DualVector:
    lattice: GramLattice
    coords: Vector

    def __post_init__(self):
        if not self.lattice.is_dual(self.coords):
            raise LatticeError(f"{self.coords} is not in the dual lattice")

    def norm(self) -> Fraction:
        return self.lattice.Q(self.coords)


class DiscriminantGroup:
    """The finite quadratic module L'/L.

    Elements are keyed by tuples ``a`` with ``0 <= a_i < orders[i]``,
    representing ``sum a_i g_i`` for the Smith generators ``g_i``.
    """

    def __init__(self, lattice: GramLattice):
        if lattice.rank and lattice.det == 0:
            raise LatticeError("degenerate lattice: singular Gram matrix")
        self.lattice = lattice
        n = lattice.rank
        if n == 0:
            self.orders: Tuple[int, ...] = ()
            self.generators: Tuple[Vector, ...] = ()
            self._coset_map: FMatrix = ()
        else:
            d, u, v = smith_normal_decomp(Matrix(lattice.gram))
            diag = [abs(int(d[i, i])) for i in range(n)]
            vf = _to_fmatrix(v)
            keep = [i for i in range(n) if diag[i] != 1]
            self.orders = tuple(diag[i] for i in keep)
            self.generators = tuple(tuple(vf[r][i] / diag[i] for r in range(n)) for i in keep)
            # a = D V^{-1} x recovers Smith coordinates of a dual vector x
            vinv = _to_fmatrix(v.inv())
            self._coset_map = tuple(tuple(diag[i] * x for x in vinv[i]) for i in keep)
        self.order = 1
        for o in self.orders:
            self.order *= o
        self._elements = [tuple(a) for a in product(*(range(o) for o in self.orders))]
        self._index = {a: i for i, a in enumerate(self._elements)}
        self._qvalues = {a: self.qvalue(a) for a in self._elements}

    def __len__(self):
        return self.order

    def elements(self) -> List[Tuple[int, ...]]:
        return list(self._elements)

    def index(self, key) -> int:
        return self._index[key]

    def zero(self) -> Tuple[int, ...]:
        return (0,) * len(self.orders)

    def key(self, x: Sequence) -> Tuple[int, ...]:
        """Coset of the dual vector x."""
        out = []
        for row, o in zip(self._coset_map, self.orders):
            a = sum((c * Fraction(t) for c, t in zip(row, x)), Fraction(0))
            if a.denominator != 1:
                raise LatticeError(f"{tuple(x)} is not a dual vector")
            out.append(int(a) % o)
        return tuple(out)

    def representative(self, key: Sequence[int]) -> Vector:
        n = self.lattice.rank
        v = [Fraction(0)] * n
        for a, g in zip(key, self.generators):
            for i in range(n):
                v[i] += a * g[i]
        return tuple(x - (x.numerator // x.denominator) for x in v)

    def add(self, a, b):
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))

    def neg(self, a):
        return tuple((-x) % o for x, o in zip(a, self.orders))

    def qvalue(self, key) -> Fraction:
        """Q(gamma) mod 1 in [0, 1)."""
        q = self.lattice.Q(self.representative(key))
        return q - (q.numerator // q.denominator)

    def pairing(self, a, b) -> Fraction:
        """<gamma, beta> mod 1 in [0, 1)."""
        p = self.lattice.pair(self.representative(a), self.representative(b))
        return p - (p.numerator // p.denominator)

    def qvalues(self) -> Dict[Tuple[int, ...], Fraction]:
        return dict(self._qvalues)

    def level(self) -> int:
        """Smallest N with N Q(gamma) in Z for all gamma."""
        n = 1
        for q in self._qvalues.values():
            n = n * q.denominator // _gcd(n, q.denominator)
        return n


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@lru_cache(maxsize=256)
def _discriminant_group_cached(gram) -> DiscriminantGroup:
    return DiscriminantGroup(GramLattice(gram))


def discriminant_group(lattice: GramLattice) -> DiscriminantGroup:
    """L'/L, shared between equal Gram matrices."""
    return _discriminant_group_cached(lattice.gram)


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> List[Tuple[int, ...]]:
    """A basis of the saturated integer kernel {x in Z^n : rows x = 0}."""
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    m = Matrix(rows)
    d, u, v = smith_normal_decomp(m)
    rk = sum(1 for i in range(min(d.rows, d.cols)) if d[i, i] != 0)
    return [tuple(int(v[r, c]) for r in range(n)) for c in range(rk, n)]


def saturate(basis: Sequence[Sequence[int]], n: int) -> List[Tuple[int, ...]]:
    """Basis of (span(basis) tensor Q) intersected with Z^n."""
    perp = integer_kernel([list(b) for b in basis], n) if basis else []
    return integer_kernel(perp, n) if perp else [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]


class SublatticeSplit:
    """A sublattice L of an ambient lattice together with its complement.

    ``sub`` and ``complement`` are integer basis matrices (rows are vectors
    in ambient coordinates).  ``proj_sub`` and ``proj_complement`` are the
    orthogonal projections, acting on column vectors.
    """

    def __init__(self, ambient: GramLattice, sub: Sequence[Sequence[int]],
                 complement: Optional[Sequence[Sequence[int]]] = None):
        self.ambient = ambient
        n = ambient.rank
        self.sub = tuple(tuple(int(x) for x in row) for row in sub)
        if complement is None:
            rows = [[int(x) for x in ambient.lower(b)] for b in self.sub]
            complement = integer_kernel(rows, n)
        self.complement = tuple(tuple(int(x) for x in row) for row in complement)
        self.sub_lattice = _restricted(ambient, self.sub)
        self.complement_lattice = _restricted(ambient, self.complement)
        if self.sub and self.sub_lattice.det == 0:
            raise LatticeError("degenerate split: the sublattice has a singular restricted form")
        if self.complement and self.complement_lattice.det == 0:
            raise LatticeError("degenerate split: the complement has a singular restricted form")
        for x in self.sub:
            for y in self.complement:
                if ambient.pair(x, y) != 0:
                    raise LatticeError("complement is not orthogonal to the sublattice")
        self.proj_sub = _projection(ambient, self.sub, self.sub_lattice)
        self.proj_complement = _projection(ambient, self.complement, self.complement_lattice)

    def coords_sub(self, x: Sequence) -> Vector:
        """Coordinates of the projection of x onto L, in the basis of L."""
        return _coords(self.ambient, self.sub, self.sub_lattice, x)

    def coords_complement(self, x: Sequence) -> Vector:
        return _coords(self.ambient, self.complement, self.complement_lattice, x)

    def split(self, x: Sequence) -> Tuple[Vector, Vector]:
        return self.coords_sub(x), self.coords_complement(x)

    def embed_sub(self, c: Sequence) -> Vector:
        n = self.ambient.rank
        return tuple(sum((Fraction(c[i]) * self.sub[i][j] for i in range(len(self.sub))), Fraction(0)) for j in range(n))

    def embed_complement(self, c: Sequence) -> Vector:
        n = self.ambient.rank
        return tuple(sum((Fraction(c[i]) * self.complement[i][j] for i in range(len(self.complement))), Fraction(0))
                     for j in range(n))

    def swapped(self) -> "SublatticeSplit":
        return SublatticeSplit(self.ambient, self.complement, self.sub)


def _restricted(ambient: GramLattice, basis) -> GramLattice:
    if not basis:
        return GramLattice([])
    m = [[int(ambient.pair(x, y)) for y in basis] for x in basis]
    return GramLattice(m)


def _projection(ambient: GramLattice, basis, lat: GramLattice) -> FMatrix:
    n = ambient.rank
    if not basis:
        return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
    b = tuple(tuple(Fraction(x) for x in row) for row in basis)
    # p = B^T G^{-1} B S
    return mat_mul(mat_mul(transpose(b), lat.inverse), mat_mul(b, ambient.S))


def _coords(ambient: GramLattice, basis, lat: GramLattice, x) -> Vector:
    if not basis:
        return ()
    ip = tuple(ambient.pair(b, x) for b in basis)
    return mat_vec(lat.inverse, ip)


def orthogonal_complement(ambient: GramLattice, sub: Sequence[Sequence[int]]) -> SublatticeSplit:
    """Split the ambient lattice along ``sub`` and its saturated orthogonal complement."""
    return SublatticeSplit(ambient, sub)


def _adjugate(lattice: GramLattice) -> Tuple[Tuple[int, ...], ...]:
    """det * S^-1 as an integer matrix."""
    D = lattice.det
    return tuple(tuple(int(x * D) for x in row) for row in lattice.inverse)


def _dual_box(lattice: GramLattice, bounds: Sequence[int]) -> Iterator[Vector]:
    """All dual vectors whose pairings with the basis vectors lie in the given boxes."""
    inv = lattice.inverse
    for y in product(*(range(-b, b + 1) for b in bounds)):
        yield mat_vec(inv, y)


def _qform(adj, y) -> int:
    """y^T adj y, so that Q(S^-1 y) = y^T adj y / (2 det)."""
    n = len(y)
    return sum(y[i] * sum(adj[i][j] * y[j] for j in range(n)) for i in range(n))


def enumerate_dual(lattice: GramLattice, bound, w0: Optional[Sequence] = None,
                   strict: bool = False) -> List[Vector]:
    """Dual vectors in a bounded region, sorted.

    Definite lattices: all lambda with |Q(lambda)| <= bound.
    Lorentzian lattices (including rank one positive, when ``w0`` is given): all lambda in the closed cone containing ``w0``
    with height <lambda, w0> <= bound (open cone if ``strict``).

    Points are searched by their pairings y = S lambda with the basis, in integers.
    """
    bound = Fraction(bound)
    if bound < 0:
        return []
    n = lattice.rank
    if n == 0:
        return [()]
    if lattice.det == 0:
        raise LatticeError("degenerate lattice")
    D = lattice.det
    adj = _adjugate(lattice)
    inv = lattice.inverse
    cone = w0 is not None and lattice.is_lorentzian()
    if not cone and (lattice.is_positive_definite() or lattice.is_negative_definite()):
        sign = 1 if lattice.is_positive_definite() else -1
        # |<e_i, l>|^2 <= 4 |Q(e_i)| |Q(l)|
        bounds = [ceil_sqrt(2 * abs(lattice.gram[i][i]) * bound) for i in range(n)]
        # sign * Q <= bound  <=>  sign * qf * sgn(D) <= 2 |D| bound
        lim = 2 * abs(D) * bound
        sd = sign * (1 if D > 0 else -1)
        out = []
        for y in product(*(range(-b, b + 1) for b in bounds)):
            if sd * _qform(adj, y) <= lim and (not strict or any(y)):
                out.append(mat_vec(inv, y))
        return sorted(out)
    if not lattice.is_lorentzian():
        raise LatticeError("enumeration needs a definite or Lorentzian lattice")
    if w0 is None:
        w0 = tuple(1 if i == 0 else 0 for i in range(n))
    w0 = vec(w0)
    qw = lattice.Q(w0)
    if qw <= 0:
        raise LatticeError("invalid region: w0 must have positive norm")
    amax = bound / (2 * qw)
    bounds = []
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        ew = lattice.pair(e, w0)
        negq = ew * ew / (4 * qw) - lattice.Q(e)
        # |<e_i, l>| <= a |<e_i, w0>| + 2 sqrt(negq * a^2 Q(w0))
        lin = amax * abs(ew)
        bounds.append(int(lin) + 1 + ceil_sqrt(4 * negq * amax * amax * qw))
    # the height is linear in y: <lambda, w0> = y . w0; scale w0 to integers
    W = 1
    for x in w0:
        W = W * x.denominator // _gcd(W, x.denominator)
    wi = [int(x * W) for x in w0]
    hmax = bound * W
    j = max(range(n), key=lambda i: abs(wi[i]))
    others = [i for i in range(n) if i != j]
    sd = 1 if D > 0 else -1
    out = []
    y = [0] * n
    for part in product(*(range(-bounds[i], bounds[i] + 1) for i in others)):
        rest = 0
        for i, v in zip(others, part):
            y[i] = v
            rest += v * wi[i]
        # 0 <= rest + y_j wi_j <= hmax
        lo, hi = Fraction(-rest, wi[j]), (hmax - rest) / wi[j]
        if lo > hi:
            lo, hi = hi, lo
        lo_i = max(-bounds[j], -((-lo.numerator) // lo.denominator))
        hi_i = min(bounds[j], hi.numerator // hi.denominator)
        for yj in range(lo_i, hi_i + 1):
            y[j] = yj
            qf = sd * _qform(adj, y)  # sign of Q
            if qf < 0 or (strict and qf == 0):
                continue
            out.append(mat_vec(inv, y))
    return sorted(out)
