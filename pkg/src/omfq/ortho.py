"""Orthogonal modular form expansions and their higher pullbacks.

An expansion lives on a Lorentzian lattice Lambda and stores c(lambda) for
dual vectors lambda.  Its truncation is a height bound <lambda, w0> <= B for
an interior vector w0 of the positive cone; every coefficient in the closed
cone below that height is known (absent keys are zero).

All pullbacks work one input coefficient at a time: each ambient index is
split into its projection onto the cycle and its normal part, and the
Gegenbauer kernel of the normal part is added to the projected index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .gegenbauer import (G_coefficients, TensorForm, _poly_add, _poly_mul, _poly_pow,
                         g_coefficients, linear_poly, quadratic_poly)
from .lattice import GramLattice, LatticeError, SublatticeSplit, Vector, ceil_sqrt, integer_kernel, vec
from .series import LaurentSeries, SeriesError, rising_factorial


class PrecisionError(ValueError):
    """An output coefficient is not determined by the available input."""


class DivisorError(ValueError):
    """The chosen vector does not define a Heegner divisor."""


class NotVanishingError(ValueError):
    """A quasi-pullback was requested for a form that does not vanish to the given order."""


class PoleError(ValueError):
    """Negative powers of the normal variable remain."""


class OrthoFormExpansion:
    """Fourier coefficients c(lambda) of a form of weight k on a Lorentzian lattice."""

    def __init__(self, lattice: GramLattice, weight, coeffs: Dict[Sequence, object],
                 w0: Sequence, bound, cusp: bool = False, check: bool = True):
        self.lattice = lattice
        self.weight = Fraction(weight)
        self.w0 = vec(w0)
        self.bound = Fraction(bound)
        self.cusp = cusp
        self.coeffs: Dict[Vector, Fraction] = {}
        if lattice.rank and lattice.Q(self.w0) <= 0:
            raise LatticeError("w0 must have positive norm")
        for k, c in coeffs.items():
            c = Fraction(c)
            if not c:
                continue
            k = vec(k)
            if check:
                if not lattice.is_dual(k):
                    raise LatticeError(f"{k} is not a dual vector")
                if not self.in_cone(k, strict=cusp):
                    raise LatticeError(f"{k} is outside the {'open' if cusp else 'closed'} positive cone")
            if self.height(k) <= self.bound:
                self.coeffs[k] = c

    def height(self, v: Sequence) -> Fraction:
        return self.lattice.pair(v, self.w0)

    def in_cone(self, v: Sequence, strict: bool = False) -> bool:
        q = self.lattice.Q(v)
        h = self.height(v)
        if strict:
            return q > 0 and h > 0
        return q >= 0 and h >= 0

    def is_known(self, v: Sequence) -> bool:
        return self.height(v) <= self.bound

    def __getitem__(self, v: Sequence) -> Fraction:
        return self.coeffs.get(vec(v), Fraction(0))

    def items(self):
        return sorted(self.coeffs.items())

    def __eq__(self, other):
        return (isinstance(other, OrthoFormExpansion) and self.lattice == other.lattice
                and self.weight == other.weight and self.coeffs == other.coeffs)

    def restrict(self, bound) -> "OrthoFormExpansion":
        return OrthoFormExpansion(self.lattice, self.weight, self.coeffs, self.w0, min(self.bound, Fraction(bound)),
                                  self.cusp, check=False)

    def __add__(self, other: "OrthoFormExpansion") -> "OrthoFormExpansion":
        acc = dict(self.coeffs)
        for k, c in other.coeffs.items():
            acc[k] = acc.get(k, Fraction(0)) + c
        return OrthoFormExpansion(self.lattice, self.weight, acc, self.w0, min(self.bound, other.bound),
                                  self.cusp and other.cusp, check=False)

    def scale(self, c) -> "OrthoFormExpansion":
        c = Fraction(c)
        return OrthoFormExpansion(self.lattice, self.weight, {k: c * v for k, v in self.coeffs.items()},
                                  self.w0, self.bound, self.cusp, check=False)

    def __repr__(self):
        return f"OrthoFormExpansion(weight={self.weight}, {len(self.coeffs)} terms, height<={self.bound})"


@dataclass
class TensorValuedExpansion:
    """Coefficients in symmetric N-forms on the normal lattice of a split."""

    split: SublatticeSplit
    weight: Fraction
    degree: int
    coeffs: Dict[Vector, TensorForm]
    w0: Vector
    bound: Fraction
    omitted: List[Vector] = field(default_factory=list)

    @property
    def lattice(self) -> GramLattice:
        return self.split.sub_lattice

    def __getitem__(self, v) -> TensorForm:
        return self.coeffs.get(vec(v), TensorForm.zero(self.degree, len(self.split.complement)))

    def evaluate(self, *vectors) -> OrthoFormExpansion:
        """The scalar form obtained by feeding N normal vectors (in complement-basis coordinates)."""
        out = {k: t(*vectors) for k, t in self.coeffs.items()}
        return OrthoFormExpansion(self.lattice, self.weight, out, self.w0, self.bound, cusp=self.degree >= 1,
                                  check=False)

    def diagonal(self, v) -> OrthoFormExpansion:
        out = {k: t.diagonal(v) for k, t in self.coeffs.items()}
        return OrthoFormExpansion(self.lattice, self.weight, out, self.w0, self.bound, cusp=self.degree >= 1,
                                  check=False)


@dataclass
class PullbackResult:
    """A scalar pullback plus the output indices left out for lack of precision."""

    expansion: OrthoFormExpansion
    omitted: List[Vector]


def _output_window(F: OrthoFormExpansion, split: SublatticeSplit):
    """Projected height vector, its norm, the normal defect and the certified output bound."""
    lat = split.sub_lattice
    w_sub = split.coords_sub(F.w0)
    w_nor = split.coords_complement(F.w0)
    q_sub = lat.Q(w_sub)
    neg_q_nor = -split.complement_lattice.Q(w_nor) if split.complement else Fraction(0)
    if q_sub <= 0:
        raise LatticeError("the height vector does not project into the positive cone of the cycle")
    if neg_q_nor == 0:
        out_bound = F.bound
    else:
        # h + 2 sqrt(Q(r) |Q(w_nor)|) <= B is implied by h (1 + sqrt(rho)) <= B
        rho = neg_q_nor / q_sub
        den = 1000
        u = Fraction(ceil_sqrt(rho * den * den), den)
        out_bound = F.bound / (1 + u)
    return w_sub, q_sub, neg_q_nor, out_bound


def _fiber_complete(h: Fraction, q: Fraction, neg_q_nor: Fraction, B: Fraction) -> bool:
    if h > B:
        return False
    if neg_q_nor == 0 or q <= 0:
        return True
    return (B - h) ** 2 >= 4 * q * neg_q_nor


def _project_all(F: OrthoFormExpansion, split: SublatticeSplit):
    """Group the input coefficients by their projection onto the cycle."""
    groups: Dict[Vector, List[Tuple[Vector, Vector, Fraction]]] = {}
    for nu, c in F.coeffs.items():
        r = split.coords_sub(nu)
        groups.setdefault(r, []).append((nu, split.coords_complement(nu), c))
    return groups


def _finish(F, split, w_sub, q_sub, neg_q_nor, out_bound, values, bound=None):
    lat = split.sub_lattice
    B = F.bound
    kept, omitted = {}, []
    for r, v in values.items():
        h = lat.pair(r, w_sub)
        if h <= out_bound and _fiber_complete(h, lat.Q(r), neg_q_nor, B):
            kept[r] = v
        else:
            omitted.append(r)
    target = out_bound if bound is None else Fraction(bound)
    if bound is not None and target > out_bound:
        raise PrecisionError(f"requested output height {target} exceeds the certified bound {out_bound}")
    kept = {r: v for r, v in kept.items() if lat.pair(r, w_sub) <= target}
    return kept, sorted(omitted), target


def heegner_split(lattice: GramLattice, lam: Sequence[int]) -> SublatticeSplit:
    """Split with the cycle lambda-perp as ``sub`` and span(lambda) as ``complement``."""
    lam = tuple(int(x) for x in lam)
    if lattice.Q(lam) >= 0:
        raise DivisorError(f"Q(lambda) = {lattice.Q(lam)} is not negative: no Heegner divisor")
    rows = [[int(x) for x in lattice.lower(lam)]]
    perp = integer_kernel(rows, lattice.rank)
    return SublatticeSplit(lattice, perp, [lam])


def pullback_heegner(F: OrthoFormExpansion, lam: Sequence[int], N: int, bound=None,
                     split: Optional[SublatticeSplit] = None) -> PullbackResult:
    """The N-th pullback to lambda-perp for a negative-norm lattice vector lambda.

    Output coefficient at r: sum over the fiber of c(nu) G_N^s(<nu, lambda>, m Q(r))
    with m = -Q(lambda) and s = k + (1 - l)/2.
    """
    lat = F.lattice
    lam = vec(lam)
    if any(x.denominator != 1 for x in lam):
        raise DivisorError("lambda must be a lattice vector")
    m = -lat.Q(lam)
    if m <= 0:
        raise DivisorError(f"Q(lambda) = {-m} is not negative: no Heegner divisor")
    if split is None:
        split = heegner_split(lat, lam)
    ell = lat.rank
    s = F.weight + Fraction(1 - ell, 2)
    coeffs = G_coefficients(N, s)
    L = split.sub_lattice
    w_sub, q_sub, neg_q_nor, out_bound = _output_window(F, split)
    values: Dict[Vector, Fraction] = {}
    for nu, c in F.coeffs.items():
        r = split.coords_sub(nu)
        x = lat.pair(nu, lam)
        y = m * L.Q(r)
        g = sum((a * x ** n2 * y ** n1 for (n1, n2), a in coeffs.items()), Fraction(0))
        values[r] = values.get(r, Fraction(0)) + c * g
    kept, omitted, target = _finish(F, split, w_sub, q_sub, neg_q_nor, out_bound, values, bound)
    out = OrthoFormExpansion(L, F.weight + N, kept, w_sub, target, cusp=N >= 1, check=False)
    return PullbackResult(out, omitted)


def pullback_cycle(F: OrthoFormExpansion, split: SublatticeSplit, N: int, bound=None) -> TensorValuedExpansion:
    """Tensor-valued N-th pullback to the cycle ``split.sub`` (Lorentzian) with normal ``split.complement``.

    Coefficient at lambda: sum over mu of c(lambda, mu) G_N^s(<., mu>, -Q(lambda) B / 2)
    with B the form on the complement and s = k - dim L / 2.
    """
    if split.ambient != F.lattice:
        raise LatticeError("split does not belong to the expansion's lattice")
    L, K = split.sub_lattice, split.complement_lattice
    if not L.is_lorentzian():
        raise LatticeError("the cycle lattice must be Lorentzian")
    if K.rank and not K.is_negative_definite():
        raise LatticeError("signature error: the normal lattice must be negative-definite")
    d = K.rank
    s = F.weight - Fraction(L.rank, 2)
    coeffs = G_coefficients(N, s)
    qpows = {n1: _poly_pow(quadratic_poly([[Fraction(x, 2) for x in row] for row in K.gram]), n1, d)
             for n1, _ in coeffs}
    w_sub, q_sub, neg_q_nor, out_bound = _output_window(F, split)
    values: Dict[Vector, dict] = {}
    for nu, c in F.coeffs.items():
        lam = split.coords_sub(nu)
        mq = -L.Q(lam)
        rp = linear_poly([F.lattice.pair(b, nu) for b in split.complement])
        poly: dict = {}
        rpow = {0: {(0,) * d: Fraction(1)}}
        for n2 in range(1, N + 1):
            rpow[n2] = _poly_mul(rpow[n2 - 1], rp)
        for (n1, n2), a in coeffs.items():
            if a:
                poly = _poly_add(poly, _poly_mul(rpow[n2], qpows[n1]), a * mq ** n1)
        values[lam] = _poly_add(values.get(lam, {}), poly, c)
    kept, omitted, target = _finish(F, split, w_sub, q_sub, neg_q_nor, out_bound, values, bound)
    tensors = {r: TensorForm(N, d, p) for r, p in kept.items()}
    return TensorValuedExpansion(split, F.weight + N, N, tensors, w_sub, target, omitted)


def quasi_pullback_constant(k, ell: int, N: int) -> Fraction:
    """P_N = constant * (quasi-pullback) for forms vanishing to order N: N! Gamma(s+N)/Gamma(s+ceil(N/2))."""
    s = Fraction(k) + Fraction(1 - ell, 2)
    return factorial(N) * rising_factorial(s + (N + 1) // 2, N - (N + 1) // 2)


def taylor_coefficient(F: OrthoFormExpansion, split: SublatticeSplit, lam: Sequence, j: int):
    """Coefficient of w^j (w normalized by 2 pi i) of F(z + w lambda), as a map on the cycle indices."""
    out: Dict[Vector, Fraction] = {}
    for nu, c in F.coeffs.items():
        r = split.coords_sub(nu)
        x = F.lattice.pair(nu, lam)
        out[r] = out.get(r, Fraction(0)) + c * x ** j / factorial(j)
    return {r: v for r, v in out.items() if v}


def quasi_pullback(F: OrthoFormExpansion, lam: Sequence[int], N: int, bound=None) -> PullbackResult:
    """Leading Taylor coefficient along lambda-perp, for F vanishing to order N there."""
    lam = vec(lam)
    split = heegner_split(F.lattice, lam)
    w_sub, q_sub, neg_q_nor, out_bound = _output_window(F, split)
    for j in range(N):
        low = taylor_coefficient(F, split, lam, j)
        kept, _, _ = _finish(F, split, w_sub, q_sub, neg_q_nor, out_bound, low, bound)
        if kept:
            r = min(kept)
            raise NotVanishingError(f"Taylor coefficient of order {j} is nonzero at {r}: {kept[r]}")
    vals = taylor_coefficient(F, split, lam, N)
    kept, omitted, target = _finish(F, split, w_sub, q_sub, neg_q_nor, out_bound, vals, bound)
    out = OrthoFormExpansion(split.sub_lattice, F.weight + N, kept, w_sub, target, cusp=N >= 1, check=False)
    return PullbackResult(out, omitted)


def pullback_meromorphic(G: LaurentSeries, pretend_weight, ell: int, pole_order: int, N: int,
                         wvar: int, mq, normalized: bool = True) -> LaurentSeries:
    """Apply G_N^s(d/dw, m Laplacian) at w = 0 to Fourier data with a normal Taylor variable.

    ``G`` is w^pole_order times the meromorphic form, a series whose variable
    ``wvar`` is the normalized Taylor variable w.  ``mq`` maps the exponent
    vector of a term (with w removed) to m Q(r).  The result has w-exponent 0.
    """
    if any(e[wvar] < 0 for e in G.coeffs):
        raise PoleError("negative powers of the normal variable remain; multiply by a higher power first")
    order = None
    for reg in G.truncation:
        if reg.weights[wvar] > 0:
            if any(w for i, w in enumerate(reg.weights) if i != wvar):
                raise SeriesError("the normal variable must have its own truncation")
            order = reg.bound / reg.weights[wvar]
    if order is not None and order < N:
        raise PrecisionError(f"normal variable known to order {order} < {N}")
    s = Fraction(pretend_weight) + Fraction(1 - ell, 2)
    coeffs = G_coefficients(N, s) if normalized else g_coefficients(N, s)
    d = G.denom
    out: Dict[tuple, Fraction] = {}
    for e, c in G.coeffs.items():
        n2 = Fraction(e[wvar], d)
        if n2.denominator != 1 or n2 > N or (N - n2) % 2:
            continue
        n2 = int(n2)
        n1 = (N - n2) // 2
        a = coeffs.get((n1, n2))
        if not a:
            continue
        key = e[:wvar] + (0,) + e[wvar + 1:]
        true = tuple(Fraction(x, d) for x in key)
        out[key] = out.get(key, Fraction(0)) + a * c * factorial(n2) * Fraction(mq(true)) ** n1
    trunc = tuple(reg for reg in G.truncation if reg.weights[wvar] == 0)
    return LaurentSeries(G.nvars, out, d, trunc)
