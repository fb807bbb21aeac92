"""Level-one elliptic modular forms and the small Jacobi forms built from theta_1.

``prec`` is always a height bound: a q-series is known for exponents <= prec.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Dict, List, Tuple

from sympy import Matrix, Rational

from .jacobi import JacobiFormExpansion
from .lattice import GramLattice
from .ortho import PrecisionError
from .series import LaurentSeries, TruncationRegion


def _mul(a: List, b: List, n: int) -> List:
    out = [0] * (n + 1)
    for i, x in enumerate(a[:n + 1]):
        if x:
            for j, y in enumerate(b[:n + 1 - i]):
                out[i + j] += x * y
    return out


def _inverse(a: List, n: int) -> List:
    """Power series inverse of a list with a[0] = +-1."""
    if a[0] not in (1, -1):
        raise ValueError("leading coefficient must be a unit")
    out = [0] * (n + 1)
    out[0] = a[0]
    for k in range(1, n + 1):
        s = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out[k] = -s * a[0]
    return out


def _pow(a: List, e: int, n: int) -> List:
    if e < 0:
        a, e = _inverse(a, n), -e
    out = [1] + [0] * n
    base = list(a[:n + 1]) + [0] * max(0, n + 1 - len(a))
    while e:
        if e & 1:
            out = _mul(out, base, n)
        base = _mul(base, base, n)
        e >>= 1
    return out


def euler_product(n: int) -> List[int]:
    """prod_{m >= 1} (1 - q^m) through q^n."""
    out = [1] + [0] * n
    for m in range(1, n + 1):
        factor = [0] * (n + 1)
        factor[0] = 1
        factor[m] = -1
        out = _mul(out, factor, n)
    return out


def q_series(coeffs: Dict[Fraction, object], prec) -> LaurentSeries:
    return LaurentSeries.from_terms(1, [((e,), c) for e, c in coeffs.items()],
                                    (TruncationRegion.total_degree(1, prec),))


def eta_power(prec, e: int) -> LaurentSeries:
    """q^(e/24) prod (1 - q^n)^e, known through q^prec."""
    prec = Fraction(prec)
    shift = Fraction(e, 24)
    top = prec - shift
    n = int(top // 1) if top >= 0 else -1
    if n < 0:
        return q_series({}, prec)
    body = _pow(euler_product(n), e, n)
    return q_series({shift + k: c for k, c in enumerate(body) if c}, prec)


def delta(prec) -> LaurentSeries:
    return eta_power(prec, 24)


def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = -1/2, from sum_{j<=k} C(k+1, j) B_j = 0."""
    B = [Fraction(1)]
    for m in range(1, k + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B[k]


def sigma(n: int, k: int) -> int:
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def eisenstein(k: int, prec) -> LaurentSeries:
    """E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n for even k >= 4."""
    if k < 4 or k % 2:
        raise ValueError("Eisenstein series need even k >= 4")
    c = -Fraction(2 * k) / bernoulli(k)
    n = int(Fraction(prec) // 1)
    terms = {Fraction(0): 1}
    for m in range(1, n + 1):
        terms[Fraction(m)] = c * sigma(m, k - 1)
    return q_series(terms, prec)


# ---------------------------------------------------------------- Jacobi forms from theta_1

def _laurent_mul(a: Dict[Tuple[int, int], int], b: Dict[Tuple[int, int], int], n: int):
    out: Dict[Tuple[int, int], int] = {}
    for (qa, za), x in a.items():
        for (qb, zb), y in b.items():
            q = qa + qb
            if q <= n:
                k = (q, za + zb)
                out[k] = out.get(k, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _theta_quotient(prec: int, zmult: int, theta_power: int, eta_exp: int) -> Dict[Tuple[int, int], int]:
    """theta_1(tau, zmult z)^theta_power / eta^(-eta_exp) with the q^(1/8) powers cancelled.

    theta_1(tau, z) = q^(1/8) (z^(1/2) - z^(-1/2)) prod (1 - q^n)(1 - q^n z)(1 - q^n z^-1),
    written with z-exponents doubled so that half powers stay integral.
    """
    n = prec
    out = {(0, 0): 1}
    lead = {(0, zmult): 1, (0, -zmult): -1}
    for _ in range(theta_power):
        out = _laurent_mul(out, lead, n)
        for k in range(1, n + 1):
            out = _laurent_mul(out, {(0, 0): 1, (k, 2 * zmult): -1}, n)
            out = _laurent_mul(out, {(0, 0): 1, (k, -2 * zmult): -1}, n)
    eul = _pow(euler_product(n), theta_power + eta_exp, n)
    return _laurent_mul(out, {(k, 0): c for k, c in enumerate(eul) if c}, n)


def _to_jacobi(data: Dict[Tuple[int, int], int], index: int, weight, prec, weak: bool) -> JacobiFormExpansion:
    """(q, doubled z) exponents -> coefficients c(n, r) with r = l/(2 index) for zeta^l."""
    L = GramLattice([[2 * index]])
    coeffs = {}
    for (q, z2), c in data.items():
        ell = Fraction(z2, 2)
        coeffs[(Fraction(q), (ell / (2 * index),))] = c
    return JacobiFormExpansion(L, weight, coeffs, prec, weak=weak)


def phi_m2_1(prec: int) -> JacobiFormExpansion:
    """The weak Jacobi form theta_1(tau,z)^2 / eta^6 of weight -2 and index 1."""
    return _to_jacobi(_theta_quotient(prec, 1, 2, -6), 1, -2, prec, weak=True)


def phi_m1_2(prec: int) -> JacobiFormExpansion:
    """The weak Jacobi form theta_1(tau,2z) / eta^3 of weight -1 and index 2."""
    return _to_jacobi(_theta_quotient(prec, 2, 1, -3), 2, -1, prec, weak=True)


def jacobi_times_q_series(phi: JacobiFormExpansion, f: LaurentSeries, weight_shift) -> JacobiFormExpansion:
    """Multiply a Jacobi form by an elliptic modular form given as a q-series."""
    fq = {e[0]: c for e, c in f}
    out: Dict = {}
    bound = None
    for reg in f.truncation:
        bound = reg.bound if bound is None else min(bound, reg.bound)
    vf = min(fq, default=Fraction(0))
    vphi = min((n for n, _ in phi.coeffs), default=Fraction(0))
    new_bound = phi.bound + vf if bound is None else min(phi.bound + vf, bound + vphi)
    for (n, r), c in phi.coeffs.items():
        for m, a in fq.items():
            if n + m <= new_bound:
                k = (n + m, r)
                out[k] = out.get(k, Fraction(0)) + a * c
    return JacobiFormExpansion(phi.lattice, phi.weight + Fraction(weight_shift), out, new_bound,
                               multiplier=phi.multiplier, weak=True, check=False)


def phi10_1(prec: int) -> JacobiFormExpansion:
    """The Jacobi cusp form Delta * phi_{-2,1} of weight 10 and index 1."""
    phi = jacobi_times_q_series(phi_m2_1(prec), delta(prec), 12)
    return JacobiFormExpansion(phi.lattice, phi.weight, phi.coeffs, prec)


# ---------------------------------------------------------------- level one membership

def level_one_basis(k: int, basis: str = "delta") -> List[Tuple[int, int, int]]:
    """Exponents (a, b, c) of E4^a E6^b Delta^c forming a basis of M_k.

    "delta": one element per c with k - 12c != 2, using b in {0, 1};
    "eisenstein": all E4^a E6^b with 4a + 6b = k.
    """
    if k < 0 or k % 2:
        raise ValueError("weight must be even and nonnegative")
    out = []
    if basis == "eisenstein":
        for b in range(k // 6 + 1):
            if (k - 6 * b) % 4 == 0:
                out.append(((k - 6 * b) // 4, b, 0))
        return out
    if basis != "delta":
        raise ValueError("basis must be 'delta' or 'eisenstein'")
    for c in range(k // 12 + 1):
        r = k - 12 * c
        if r == 2:
            continue
        b = 0 if r % 4 == 0 else 1
        out.append(((r - 6 * b) // 4, b, c))
    return out


def _monomial_coeffs(a: int, b: int, c: int, n: int) -> List[Fraction]:
    e4 = [Fraction(1)] + [240 * sigma(m, 3) for m in range(1, n + 1)]
    e6 = [Fraction(1)] + [-504 * sigma(m, 5) for m in range(1, n + 1)]
    d = [0] + _pow(euler_product(n), 24, n)[:n]
    out = [Fraction(1)] + [Fraction(0)] * n
    for f, e in ((e4, a), (e6, b), (d, c)):
        for _ in range(e):
            out = _mul(out, f, n)
    return out


def _rat(x) -> Rational:
    x = Fraction(x)
    return Rational(x.numerator, x.denominator)


def level_one_membership(f: LaurentSeries, k: int, basis: str = "delta") -> dict:
    """Coordinates of a q-series in a basis of M_k, with a residual over all known coefficients.

    Returns {"coords": {(a,b,c): coeff}, "residual": {n: value}, "member": bool, "through": n}.
    """
    if f.nvars != 1:
        raise ValueError("need a series in one variable")
    known = None
    for reg in f.truncation:
        known = reg.bound / reg.weights[0] if known is None else min(known, reg.bound / reg.weights[0])
    if known is None:
        known = max((e[0] for e, _ in f), default=Fraction(0))
    n = int(known // 1)
    coeffs = {}
    for e, c in f:
        if e[0].denominator != 1 or e[0] < 0:
            raise ValueError(f"q^{e[0]} cannot occur in a level one form")
        coeffs[int(e[0])] = c
    B = level_one_basis(k, basis)
    dim = len(B)
    if n + 1 < dim:
        raise PrecisionError(f"need coefficients through q^{dim - 1} to determine a form of weight {k}; "
                             f"have through q^{n}")
    cols = [_monomial_coeffs(a, b, c, n) for a, b, c in B]
    M = Matrix([[_rat(cols[j][i]) for j in range(dim)] for i in range(n + 1)])
    rhs = Matrix([_rat(coeffs.get(i, 0)) for i in range(n + 1)])
    # least-index square subsystem; the basis is triangular for "delta"
    rows = []
    rank = 0
    for i in range(n + 1):
        trial = M.extract(rows + [i], list(range(dim)))
        if trial.rank() > rank:
            rows.append(i)
            rank += 1
        if rank == dim:
            break
    if rank < dim:
        raise PrecisionError("known coefficients do not determine the coordinates")
    sol = M.extract(rows, list(range(dim))).LUsolve(rhs.extract(rows, [0]))
    coords = {B[j]: Fraction(int(sol[j].p), int(sol[j].q)) for j in range(dim) if sol[j] != 0}
    res = M * sol - rhs
    residual = {i: Fraction(int(res[i].p), int(res[i].q)) for i in range(n + 1) if res[i] != 0}
    return {"coords": coords, "residual": residual, "member": not residual, "through": n}
