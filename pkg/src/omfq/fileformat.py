"""The line-oriented "omfq v1" coefficient format.

    omfq v1
    kind siegel
    weight 35
    gram -
    variables 3
    denominator 1
    truncation 1 0 1 <= 7
    coeff 2 1 5 -1
    ...

Header lines come in the order above, followed by optional kind-specific
lines (``w0``, ``cusp``, ``weak``, ``multiplier``).  Each body line is
``coeff e_1 ... e_m c`` where the e_i are integers (true exponent times the
denominator) and c is p or p/q.  Canonical output lists the body sorted by
exponent and never contains zero coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .jacobi import JacobiFormExpansion, VVMFExpansion, _lcm
from .lattice import GramLattice, discriminant_group
from .ortho import OrthoFormExpansion
from .series import LaurentSeries, TruncationRegion

TAG = "omfq v1"
KINDS = ("series", "ortho", "jacobi", "vvmf", "siegel")


class CoefficientFileError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _frac(tok: str, line: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise CoefficientFileError(f"bad number {tok!r}", line) from None


def _int(tok: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise CoefficientFileError(f"bad integer {tok!r}", line) from None


# ---------------------------------------------------------------- emit

def _gram_text(L: Optional[GramLattice]) -> str:
    if L is None:
        return "-"
    if L.rank == 0:
        return "[]"
    return "; ".join(" ".join(str(int(x)) for x in row) for row in L.gram)


def _trunc_text(regions) -> str:
    if not regions:
        return "none"
    return "; ".join(" ".join(_fmt(w) for w in r.weights) + " <= " + _fmt(r.bound) for r in regions)


def _denominator(exps) -> int:
    d = 1
    for e in exps:
        for x in e:
            d = _lcm(d, Fraction(x).denominator)
    return d


def emit_coefficient_file(obj) -> str:
    """Canonical text for a LaurentSeries, OrthoFormExpansion, JacobiFormExpansion,
    VVMFExpansion or SiegelExpansion with rational coefficients."""
    from .special import SiegelExpansion

    extra: List[str] = []
    if isinstance(obj, LaurentSeries):
        kind, weight, gram = "series", Fraction(0), None
        terms = [(e, c) for e, c in obj]
        nvars, regions = obj.nvars, obj.truncation
    elif isinstance(obj, OrthoFormExpansion):
        kind, weight, gram = "ortho", obj.weight, obj.lattice
        terms = list(obj.coeffs.items())
        nvars = obj.lattice.rank
        regions = (TruncationRegion(tuple(obj.lattice.lower(obj.w0)), obj.bound),)
        extra = ["w0 " + " ".join(_fmt(x) for x in obj.w0), f"cusp {int(obj.cusp)}"]
    elif isinstance(obj, JacobiFormExpansion):
        kind, weight, gram = "jacobi", obj.weight, obj.lattice
        terms = [((n,) + tuple(r), c) for (n, r), c in obj.coeffs.items()]
        nvars = 1 + obj.lattice.rank
        regions = (TruncationRegion((1,) + (0,) * obj.lattice.rank, obj.bound),)
        extra = [f"weak {int(obj.weak)}", f"multiplier {obj.multiplier}"]
    elif isinstance(obj, VVMFExpansion):
        kind, weight, gram = "vvmf", obj.weight, obj.lattice
        A = obj.group
        terms = [(tuple(A.representative(g)) + (n,), c) for (g, n), c in obj.coeffs.items()]
        nvars = obj.lattice.rank + 1
        regions = (TruncationRegion((0,) * obj.lattice.rank + (1,), obj.bound),)
    elif isinstance(obj, SiegelExpansion):
        kind, weight, gram = "siegel", obj.weight, None
        terms = [(t, c) for t, c in obj.coeffs.items()]
        nvars = 3
        regions = (TruncationRegion((1, 0, 1), obj.bound),)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    for _, c in terms:
        if not isinstance(c, (int, Fraction)):
            raise TypeError("only rational coefficients can be written; evaluate tensor values first")
    D = _denominator(e for e, _ in terms)
    body = sorted((tuple(int(Fraction(x) * D) for x in e), Fraction(c)) for e, c in terms if c)
    lines = [TAG, f"kind {kind}", f"weight {_fmt(weight)}", f"gram {_gram_text(gram)}",
             f"variables {nvars}", f"denominator {D}", f"truncation {_trunc_text(regions)}"] + extra
    lines += ["coeff " + " ".join(str(x) for x in e) + " " + _fmt(c) for e, c in body]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parse

_HEADER = ("kind", "weight", "gram", "variables", "denominator", "truncation")
_EXTRA = {"ortho": ("w0", "cusp"), "jacobi": ("weak", "multiplier"), "vvmf": (), "series": (), "siegel": ()}


def _parse_gram(text: str, line: int) -> Optional[GramLattice]:
    text = text.strip()
    if text == "-":
        return None
    if text == "[]":
        return GramLattice([])
    rows = [[_int(t, line) for t in row.split()] for row in text.split(";")]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise CoefficientFileError("gram matrix is not square", line)
    if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
        raise CoefficientFileError("gram matrix is not symmetric", line)
    return GramLattice(rows)


def _parse_truncation(text: str, nvars: int, line: int) -> Tuple[TruncationRegion, ...]:
    text = text.strip()
    if text == "none":
        return ()
    out = []
    for part in text.split(";"):
        if "<=" not in part:
            raise CoefficientFileError("truncation constraint needs '<='", line)
        lhs, rhs = part.split("<=")
        w = [_frac(t, line) for t in lhs.split()]
        if len(w) != nvars:
            raise CoefficientFileError(f"truncation has {len(w)} weights for {nvars} variables", line)
        out.append(TruncationRegion(tuple(w), _frac(rhs.strip(), line)))
    return tuple(out)


def parse_coefficient_file(text: str):
    """Inverse of ``emit_coefficient_file``."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != TAG:
        raise CoefficientFileError(f"missing header tag {TAG!r}", 1)
    head: Dict[str, Tuple[str, int]] = {}
    i = 1
    expected = list(_HEADER)
    while i < len(lines) and not lines[i].startswith("coeff"):
        raw = lines[i].strip()
        i += 1
        if not raw:
            continue
        key, _, val = raw.partition(" ")
        if expected:
            if key != expected[0]:
                raise CoefficientFileError(f"expected header field {expected[0]!r}, got {key!r}", i)
            expected.pop(0)
            if key == "kind":
                if val not in KINDS:
                    raise CoefficientFileError(f"unknown kind {val!r}", i)
                expected += list(_EXTRA[val])
        elif key in head or key not in _EXTRA.get(head["kind"][0], ()):
            raise CoefficientFileError(f"unexpected header field {key!r}", i)
        head[key] = (val, i)
    if expected:
        raise CoefficientFileError(f"missing header field {expected[0]!r}", i)
    kind = head["kind"][0]
    weight = _frac(*head["weight"])
    gram = _parse_gram(*head["gram"])
    nvars = _int(*head["variables"])
    D = _int(*head["denominator"])
    if D < 1:
        raise CoefficientFileError("denominator must be positive", head["denominator"][1])
    regions = _parse_truncation(head["truncation"][0], nvars, head["truncation"][1])
    body: Dict[Tuple[Fraction, ...], Fraction] = {}
    for j in range(i, len(lines)):
        raw = lines[j].strip()
        if not raw:
            continue
        toks = raw.split()
        if toks[0] != "coeff":
            raise CoefficientFileError(f"expected a 'coeff' line, got {toks[0]!r}", j + 1)
        if len(toks) != nvars + 2:
            raise CoefficientFileError(f"expected {nvars} exponents and a coefficient", j + 1)
        e = tuple(Fraction(_int(t, j + 1), D) for t in toks[1:-1])
        c = _frac(toks[-1], j + 1)
        if not c:
            raise CoefficientFileError("zero coefficient", j + 1)
        if e in body:
            raise CoefficientFileError(f"duplicate exponent {toks[1:-1]}", j + 1)
        body[e] = c
    return _build(kind, weight, gram, nvars, regions, head, body)


def _single_bound(regions, weights, line) -> Fraction:
    for r in regions:
        if tuple(r.weights) == tuple(Fraction(w) for w in weights):
            return r.bound
    raise CoefficientFileError("truncation does not match the kind", line)


def _build(kind, weight, gram, nvars, regions, head, body):
    from .special import SiegelExpansion

    tline = head["truncation"][1]
    if kind == "series":
        return LaurentSeries.from_terms(nvars, list(body.items()), regions)
    if kind == "siegel":
        if nvars != 3:
            raise CoefficientFileError("siegel data has three exponents", head["variables"][1])
        bound = _single_bound(regions, (1, 0, 1), tline)
        return SiegelExpansion(weight, {tuple(int(x) for x in e): c for e, c in body.items()}, bound)
    if gram is None:
        raise CoefficientFileError(f"kind {kind} needs a gram matrix", head["gram"][1])
    rank = gram.rank
    if kind == "ortho":
        if nvars != rank:
            raise CoefficientFileError("variables must equal the lattice rank", head["variables"][1])
        w0 = tuple(_frac(t, head["w0"][1]) for t in head["w0"][0].split())
        bound = _single_bound(regions, gram.lower(w0), tline)
        cusp = head["cusp"][0].strip() == "1"
        return OrthoFormExpansion(gram, weight, body, w0, bound, cusp=cusp)
    if kind == "jacobi":
        if nvars != rank + 1:
            raise CoefficientFileError("variables must be 1 + rank", head["variables"][1])
        bound = _single_bound(regions, (1,) + (0,) * rank, tline)
        weak = head["weak"][0].strip() == "1"
        coeffs = {(e[0], e[1:]): c for e, c in body.items()}
        return JacobiFormExpansion(gram, weight, coeffs, bound, multiplier=head["multiplier"][0].strip(), weak=weak)
    if nvars != rank + 1:
        raise CoefficientFileError("variables must be rank + 1", head["variables"][1])
    bound = _single_bound(regions, (0,) * rank + (1,), tline)
    A = discriminant_group(gram)
    coeffs = {}
    for e, c in body.items():
        k = (A.key(e[:-1]), e[-1])
        if k in coeffs:
            raise CoefficientFileError(f"two lines for the class of {e[:-1]} at q^{e[-1]}")
        coeffs[k] = c
    return VVMFExpansion(gram, weight, coeffs, bound)
