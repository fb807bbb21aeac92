"""Exact truncated multivariate Laurent series.

A series stores a finite map from integer exponent vectors to Fractions.
The true exponent of variable i in a stored key ``e`` is ``e[i] / D`` where
``D`` is the series' exponent denominator, so half-integral powers such as
r^(1/2) are stored by doubling ``D``.

Precision is described by a truncation: a tuple of ``TruncationRegion``
constraints, each a weighted height bound.  A coefficient is known exactly
when its exponent satisfies every constraint.  An empty truncation means the
series is an exact Laurent polynomial.

Products keep exactness by the usual valuation rule: if ``a`` is known up to
height ``Ba`` and has valuation ``va`` (and likewise for ``b``) then ``a*b`` is
known up to ``min(Ba + vb, Bb + va)``.  This assumes every series is a
monomial times a power series in the weighted variables, which holds for all
expansions built in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd
from typing import Dict, Iterable, Iterator, Optional, Sequence, Tuple

Exponent = Tuple[int, ...]


class SeriesError(ValueError):
    """Structural problem with series arguments."""


class NonInvertibleError(SeriesError):
    """Raised by :func:`invert_unit` when no unit structure exists."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def rising_factorial(x, n: int) -> Fraction:
    """Return x (x+1) ... (x+n-1) exactly; the empty product is 1."""
    if n < 0:
        raise ValueError("rising factorial needs n >= 0")
    x = Fraction(x)
    out = Fraction(1)
    for i in range(n):
        out *= x + i
    return out


@dataclass(frozen=True)
class TruncationRegion:
    """The set of exponents e with sum(weights[i] * e[i]) <= bound.

    ``mode`` is ``"total-degree"`` when every weight is 1 and
    ``"weighted-height"`` otherwise.
    """

    weights: Tuple[Fraction, ...]
    bound: Fraction
    mode: str = "weighted-height"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        object.__setattr__(self, "bound", Fraction(self.bound))
        if self.mode not in ("total-degree", "weighted-height"):
            raise SeriesError(f"unknown truncation mode {self.mode!r}")
        if self.mode == "total-degree" and any(w != 1 for w in self.weights):
            raise SeriesError("total-degree mode needs unit weights")
        if any(w < 0 for w in self.weights):
            raise SeriesError("truncation weights must be nonnegative")
        if not any(w > 0 for w in self.weights):
            raise SeriesError("truncation needs a positive weight")

    @classmethod
    def total_degree(cls, nvars: int, bound) -> "TruncationRegion":
        return cls((1,) * nvars, bound, "total-degree")

    @classmethod
    def weighted(cls, weights: Sequence, bound) -> "TruncationRegion":
        return cls(tuple(weights), bound, "weighted-height")

    def height(self, exps: Exponent, denom: int = 1) -> Fraction:
        return sum((w * e for w, e in zip(self.weights, exps)), Fraction(0)) / denom

    def contains(self, exps: Exponent, denom: int = 1) -> bool:
        return self.height(exps, denom) <= self.bound

    def with_bound(self, bound) -> "TruncationRegion":
        return TruncationRegion(self.weights, bound, self.mode)


def _as_exponent(exps: Sequence, denom: int) -> Exponent:
    out = []
    for e in exps:
        v = Fraction(e) * denom
        if v.denominator != 1:
            raise SeriesError(f"exponent {e} not representable with denominator {denom}")
        out.append(int(v))
    return tuple(out)


class LaurentSeries:
    """Immutable truncated Laurent series with Fraction coefficients."""

    __slots__ = ("nvars", "denom", "coeffs", "truncation")

    def __init__(
        self,
        nvars: int,
        coeffs: Optional[Dict[Exponent, object]] = None,
        denom: int = 1,
        truncation: Iterable[TruncationRegion] = (),
    ):
        if nvars < 1 or denom < 1:
            raise SeriesError("need nvars >= 1 and denom >= 1")
        truncation = tuple(truncation)
        for reg in truncation:
            if len(reg.weights) != nvars:
                raise SeriesError("truncation weights do not match nvars")
        clean: Dict[Exponent, Fraction] = {}
        for e, c in (coeffs or {}).items():
            if len(e) != nvars:
                raise SeriesError(f"exponent {e} has wrong length")
            c = Fraction(c)
            if c and all(reg.contains(e, denom) for reg in truncation):
                clean[tuple(e)] = c
        self.nvars = nvars
        self.denom = denom
        self.coeffs = clean
        self.truncation = truncation

    # construction helpers

    @classmethod
    def from_terms(cls, nvars: int, terms: Iterable[Tuple[Sequence, object]],
                   truncation: Iterable[TruncationRegion] = ()) -> "LaurentSeries":
        """Build a series from (true exponent, coefficient) pairs, accumulating repeats."""
        terms = [(tuple(Fraction(x) for x in e), Fraction(c)) for e, c in terms]
        denom = 1
        for e, _ in terms:
            for x in e:
                denom = _lcm(denom, x.denominator)
        acc: Dict[Exponent, Fraction] = {}
        for e, c in terms:
            k = _as_exponent(e, denom)
            acc[k] = acc.get(k, Fraction(0)) + c
        return cls(nvars, acc, denom, truncation)

    @classmethod
    def constant(cls, nvars: int, value=1, truncation=()) -> "LaurentSeries":
        return cls(nvars, {(0,) * nvars: value}, 1, truncation)

    @classmethod
    def monomial(cls, nvars: int, exps: Sequence, coeff=1, truncation=()) -> "LaurentSeries":
        return cls.from_terms(nvars, [(exps, coeff)], truncation)

    @classmethod
    def zero(cls, nvars: int, truncation=()) -> "LaurentSeries":
        return cls(nvars, {}, 1, truncation)

    # inspection

    def __iter__(self) -> Iterator[Tuple[Tuple[Fraction, ...], Fraction]]:
        """Yield (true exponent, coefficient) in lexicographic order."""
        for e in sorted(self.coeffs):
            yield tuple(Fraction(x, self.denom) for x in e), self.coeffs[e]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, exps: Sequence) -> Fraction:
        try:
            key = _as_exponent(exps, self.denom)
        except SeriesError:
            return Fraction(0)
        return self.coeffs.get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_known(self, exps: Sequence) -> bool:
        """True if the coefficient at ``exps`` is determined by the truncation."""
        e = tuple(Fraction(x) for x in exps)
        return all(reg.height(e) <= reg.bound for reg in self.truncation)

    def valuation(self, region: TruncationRegion) -> Optional[Fraction]:
        """Lower bound for the height of every true term (None for an exact zero)."""
        hs = [region.height(e, self.denom) for e in self.coeffs]
        own = self._region_like(region)
        if own is not None:
            hs.append(own.bound)
        return min(hs) if hs else None

    def _region_like(self, region: TruncationRegion) -> Optional[TruncationRegion]:
        for reg in self.truncation:
            if reg.weights == region.weights:
                return reg
        return None

    def __repr__(self) -> str:
        names = "qrstuvwxyz"
        parts = []
        for e, c in self:
            mono = "*".join(
                f"{names[i] if self.nvars <= len(names) else 'x%d' % i}^{x}"
                for i, x in enumerate(e) if x
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        body = " + ".join(parts) if parts else "0"
        trunc = "".join(f" + O(h<={reg.bound})" for reg in self.truncation)
        return f"LaurentSeries({body}{trunc})"

    # denominator handling

    def with_denominator(self, denom: int) -> "LaurentSeries":
        if denom % self.denom:
            raise SeriesError("new denominator must be a multiple of the old one")
        f = denom // self.denom
        if f == 1:
            return self
        return LaurentSeries(self.nvars, {tuple(x * f for x in e): c for e, c in self.coeffs.items()},
                             denom, self.truncation)

    def reduced(self) -> "LaurentSeries":
        """Same series with the smallest possible exponent denominator."""
        g = self.denom
        for e in self.coeffs:
            for x in e:
                g = gcd(g, x)
        if g <= 1:
            return self
        return LaurentSeries(self.nvars, {tuple(x // g for x in e): c for e, c in self.coeffs.items()},
                             self.denom // g, self.truncation)

    def _common(self, other: "LaurentSeries"):
        if not isinstance(other, LaurentSeries):
            raise SeriesError("expected a LaurentSeries")
        if other.nvars != self.nvars:
            raise SeriesError(f"variable-count mismatch: {self.nvars} vs {other.nvars}")
        d = _lcm(self.denom, other.denom)
        return self.with_denominator(d), other.with_denominator(d), d

    # ring operations

    def _merge_truncation(self, other: "LaurentSeries", product: bool):
        regions = {}
        for reg in self.truncation + other.truncation:
            regions.setdefault(reg.weights, reg)
        out = []
        for weights, proto in regions.items():
            ra, rb = self._region_like(proto), other._region_like(proto)
            if not product:
                bounds = [r.bound for r in (ra, rb) if r is not None]
                out.append(proto.with_bound(min(bounds)))
                continue
            va, vb = self.valuation(proto), other.valuation(proto)
            if va is None or vb is None:
                # exact zero factor: the product is exactly zero
                return None
            cands = []
            if ra is not None:
                cands.append(ra.bound + vb)
            if rb is not None:
                cands.append(rb.bound + va)
            out.append(proto.with_bound(min(cands)))
        return tuple(out)

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.constant(self.nvars, other)
        a, b, d = self._common(other)
        acc = dict(a.coeffs)
        for e, c in b.coeffs.items():
            acc[e] = acc.get(e, Fraction(0)) + c
        return LaurentSeries(self.nvars, acc, d, a._merge_truncation(b, False))

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.nvars, {e: -c for e, c in self.coeffs.items()}, self.denom, self.truncation)

    def __sub__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentSeries":
        c = Fraction(c)
        return LaurentSeries(self.nvars, {e: c * v for e, v in self.coeffs.items()}, self.denom, self.truncation)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return self.scale(other)
        a, b, d = self._common(other)
        trunc = a._merge_truncation(b, True)
        if trunc is None:
            return LaurentSeries(self.nvars, {}, d, ())
        acc: Dict[Exponent, Fraction] = {}
        bitems = list(b.coeffs.items())
        for ea, ca in a.coeffs.items():
            for eb, cb in bitems:
                e = tuple(x + y for x, y in zip(ea, eb))
                acc[e] = acc.get(e, Fraction(0)) + ca * cb
        # the product stores exponents with denominator d
        return LaurentSeries(self.nvars, acc, d, trunc)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            return invert_unit(self) ** (-n)
        out = LaurentSeries.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            if other == 0:
                return self.is_zero()
            return NotImplemented
        if other.nvars != self.nvars:
            return False
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        r = self.reduced()
        return hash((r.nvars, r.denom, frozenset(r.coeffs.items())))

    # structural operations

    def truncate(self, region: TruncationRegion) -> "LaurentSeries":
        """Add (or tighten) a truncation constraint."""
        regs = [r for r in self.truncation if r.weights != region.weights]
        own = self._region_like(region)
        if own is not None and own.bound < region.bound:
            region = own
        return LaurentSeries(self.nvars, self.coeffs, self.denom, tuple(regs) + (region,))

    def shift(self, exps: Sequence) -> "LaurentSeries":
        """Multiply by the monomial with true exponent ``exps``; bounds move with it."""
        mono = LaurentSeries.monomial(self.nvars, exps)
        a, m, d = self._common(mono)
        (me, _), = m.coeffs.items()
        regs = tuple(r.with_bound(r.bound + r.height(me, d)) for r in a.truncation)
        return LaurentSeries(self.nvars, {tuple(x + y for x, y in zip(e, me)): c for e, c in a.coeffs.items()},
                             d, regs)

    def map_terms(self, fn) -> "LaurentSeries":
        """Multiply each coefficient by fn(true exponent)."""
        out = {}
        for e, c in self.coeffs.items():
            out[e] = c * Fraction(fn(tuple(Fraction(x, self.denom) for x in e)))
        return LaurentSeries(self.nvars, out, self.denom, self.truncation)

    def ring_op(self, other, op: str):
        """Dispatch by name: add, mul, neg, scale."""
        if op == "add":
            return self + other
        if op == "mul":
            return self * other
        if op == "neg":
            return -self
        if op == "scale":
            return self.scale(other)
        raise SeriesError(f"unknown ring operation {op!r}")


def invert_unit(a: LaurentSeries, monomial: Optional[Sequence] = None) -> LaurentSeries:
    """Inverse of a monomial times a unit power series, within truncation.

    The monomial is the componentwise minimum of the support unless given;
    it must itself carry a nonzero coefficient.
    """
    if a.is_zero():
        raise NonInvertibleError("zero series is not invertible")
    if monomial is None:
        mins = tuple(min(e[i] for e in a.coeffs) for i in range(a.nvars))
        if mins not in a.coeffs:
            raise NonInvertibleError("no unique minimal exponent: series is not a monomial times a unit")
        monomial = tuple(Fraction(x, a.denom) for x in mins)
    monomial = tuple(Fraction(x) for x in monomial)
    u = a.shift(tuple(-x for x in monomial))
    zero = (0,) * a.nvars
    c0 = u.coeffs.get(zero)
    if not c0:
        raise NonInvertibleError("unit part has no constant term")
    if any(x < 0 for e in u.coeffs for x in e):
        raise NonInvertibleError("unit part is not a power series")
    t = LaurentSeries(a.nvars, {e: -c / c0 for e, c in u.coeffs.items() if e != zero}, u.denom, u.truncation)
    for e in t.coeffs:
        if not any(reg.height(e, u.denom) > 0 for reg in u.truncation):
            raise NonInvertibleError("unit part has terms of height zero; iteration would not terminate")
    if not u.truncation and not t.is_zero():
        raise NonInvertibleError("inverse of a non-monomial exact polynomial needs a truncation")
    one = LaurentSeries(a.nvars, {zero: 1}, u.denom, u.truncation)
    b = one
    while True:
        nb = one + t * b
        nb = LaurentSeries(a.nvars, nb.coeffs, nb.denom, u.truncation)
        if nb == b:
            break
        b = nb
    b = b.scale(1 / c0)
    return b.shift(tuple(-x for x in monomial))


def exp_substitute(a: LaurentSeries, var: int, order: int) -> LaurentSeries:
    """Replace r^k in variable ``var`` by exp(k w), keeping powers of w up to ``order``.

    The variable ``var`` is reused for w; the result gets the extra constraint
    deg_w <= order.
    """
    if not 0 <= var < a.nvars:
        raise SeriesError(f"variable index {var} out of range")
    for reg in a.truncation:
        if reg.weights[var] != 0:
            raise SeriesError("support in the substituted variable is not bounded independently of the truncation")
    d = a.denom
    acc: Dict[Exponent, Fraction] = {}
    facts = [Fraction(factorial(j)) for j in range(order + 1)]
    for e, c in a.coeffs.items():
        k = Fraction(e[var], d)
        p = Fraction(1)
        for j in range(order + 1):
            if j and k == 0:
                break
            key = e[:var] + (j * d,) + e[var + 1:]
            acc[key] = acc.get(key, Fraction(0)) + c * p / facts[j]
            p *= k
    weights = [0] * a.nvars
    weights[var] = 1
    trunc = a.truncation + (TruncationRegion.weighted(weights, order),)
    return LaurentSeries(a.nvars, acc, d, trunc)
