"""Deterministic self-check suites.

Every suite returns a dict with at least ``ok`` (bool), ``checked`` (int) and
``failures`` (a list of short, printable descriptions of the first mismatches).
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence

from .classical import phi10_1, phi_m1_2, phi_m2_1
from .gegenbauer import G_coefficient_in_s, G_eval, G_multilinear, g_eval, polarize
from .jacobi import (CyclotomicNumber, GlueMap, JacobiFormExpansion, VVMFExpansion, arrow_down_vector,
                     arrow_up_vector, fourier_jacobi, partial_dev_coeff, theta_decompose, theta_recompose,
                     trace_map, weil_action, weil_matrix)
from .lattice import GramLattice, SublatticeSplit, discriminant_group, enumerate_dual, integer_kernel
from .lift import hyperbolic_lattice, verify_prop57
from .ortho import OrthoFormExpansion, heegner_split, pullback_cycle, pullback_heegner
from .series import rising_factorial
from .special import cohen_generating_identity, run_ex64, run_ex65, verify_prop62

MAX_FAILURES = 20


def _report(checked: int, failures: List[str], **extra) -> dict:
    out = {"ok": not failures, "checked": checked, "failures": failures[:MAX_FAILURES]}
    out.update(extra)
    return out


# ---------------------------------------------------------------- Gegenbauer

def _binom(a: Fraction, r: int) -> Fraction:
    p = Fraction(1)
    for i in range(r):
        p *= a - i
    for i in range(2, r + 1):
        p /= i
    return p


def _generating_coeffs(s: Fraction, x: Fraction, y: Fraction, top: int) -> List[Fraction]:
    """Taylor coefficients of (1 - x t + y t^2)^(-s) through t^top."""
    u = {0: Fraction(1)}
    out = [Fraction(0)] * (top + 1)
    # (1 + u)^(-s) with u = -x t + y t^2
    base = {1: -x, 2: y}
    for j in range(top + 1):
        c = _binom(-s, j)
        for e, v in u.items():
            if e <= top:
                out[e] += c * v
        nxt: Dict[int, Fraction] = {}
        for e, v in u.items():
            for f, w in base.items():
                if e + f <= top:
                    nxt[e + f] = nxt.get(e + f, Fraction(0)) + v * w
        u = nxt
    return out


def suite_gegenbauer(top: int = 12) -> dict:
    failures: List[str] = []
    checked = 0
    points = [(Fraction(2), Fraction(5)), (Fraction(-3, 2), Fraction(1, 3)), (Fraction(1), Fraction(-7))]
    for s in (Fraction(2), Fraction(5, 2), Fraction(3), Fraction(-13)):
        for x, y in points:
            gen = _generating_coeffs(s, x, y, top)
            for N in range(top + 1):
                checked += 2
                if g_eval(N, s, x, y) != gen[N]:
                    failures.append(f"generating function: s={s} N={N} at ({x},{y})")
                # G_N^s = N! g_N^s / (s)_ceil(N/2)
                if G_eval(N, s, x, y) * rising_factorial(s, (N + 1) // 2) != factorial(N) * gen[N]:
                    failures.append(f"normalized generating function: s={s} N={N} at ({x},{y})")
    for N in range(13):
        for n1 in range(N // 2 + 1):
            checked += 1
            if any(Fraction(c).denominator != 1 for c in G_coefficient_in_s(N, n1)):
                failures.append(f"G_{N} coefficient of y^{n1} is not in Z[s]")
    rng = random.Random(7)
    for _ in range(40):
        N = rng.randint(0, 10)
        s = Fraction(rng.randint(-30, 30), rng.randint(1, 4))
        x, y = Fraction(rng.randint(-9, 9), rng.randint(1, 3)), Fraction(rng.randint(-9, 9), rng.randint(1, 3))
        a = Fraction(rng.choice([-3, -2, 2, 3]), rng.randint(1, 3))
        checked += 1
        if G_eval(N, s, a * x, a * a * y) != a ** N * G_eval(N, s, x, y):
            failures.append(f"homogeneity: N={N} s={s} a={a}")
    for _ in range(25):
        N = rng.randint(0, 5)
        d = rng.randint(1, 3)
        s = Fraction(rng.randint(-10, 10), rng.choice([1, 2]))
        r = [Fraction(rng.randint(-4, 4)) for _ in range(d)]
        m = [[0] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                m[i][j] = m[j][i] = Fraction(rng.randint(-3, 3))
        T = G_multilinear(N, s, r, m)
        v = [Fraction(rng.randint(-3, 3)) for _ in range(d)]
        x = sum(a * b for a, b in zip(r, v))
        y = sum(v[i] * m[i][j] * v[j] for i in range(d) for j in range(d))
        checked += 1
        if T(*([v] * N)) != G_eval(N, s, x, y):
            failures.append(f"multilinear diagonal: N={N} d={d} s={s}")

        def diag(w, s=s, r=r, m=m, N=N, d=d):
            return G_eval(N, s, sum(a * b for a, b in zip(r, w)),
                          sum(w[i] * m[i][j] * w[j] for i in range(d) for j in range(d)))
        checked += 1
        if polarize(diag, N, d) != T:
            failures.append(f"polarized diagonal differs from the multilinear form: N={N} d={d} s={s}")
    return _report(checked, failures)


# ---------------------------------------------------------------- Weil representation

def small_even_lattices() -> List[GramLattice]:
    """Even lattices of rank 1 and 2 with |det| <= 8, one Gram matrix per isometry class."""
    grams = [[[2 * a]] for a in (1, 2, 3, 4, -1, -2, -3, -4)]
    definite = [[[2, 0], [0, 2]], [[2, 0], [0, 4]], [[2, 1], [1, 2]], [[2, 1], [1, 4]]]
    grams += definite + [[[-x for x in row] for row in g] for g in definite]
    # [2] + [-4] and [-2] + [4] are isometric via (1, 1), (2, 1)
    grams += [[[0, 1], [1, 0]], [[0, 2], [2, 0]], [[2, 0], [0, -2]], [[2, 1], [1, -2]], [[2, 0], [0, -4]]]
    return [GramLattice(g) for g in grams]


def _splits(lat: GramLattice) -> List[SublatticeSplit]:
    n = lat.rank
    if n == 1:
        return [SublatticeSplit(lat, [(1,)], [])]
    out = []
    for v in ((1, 0), (0, 1), (1, 1), (1, -1)):
        if lat.Q(v) != 0:
            split = SublatticeSplit(lat, [v])
            out.append((len(GlueMap(split).tilde_group), split))
    # the two splits with the smallest glue groups keep the suite fast
    return [sp for _, sp in sorted(out, key=lambda t: t[0])[:2]]


def _eq(a: Dict, b: Dict) -> bool:
    for k in set(a) | set(b):
        x, y = a.get(k), b.get(k)
        x = x if isinstance(x, CyclotomicNumber) else CyclotomicNumber.rational(x or 0)
        y = y if isinstance(y, CyclotomicNumber) else CyclotomicNumber.rational(y or 0)
        if x != y:
            return False
    return True


def _basis_vectors(keys) -> List[Dict]:
    return [{k: Fraction(1)} for k in keys]


def _relation_check(lat: GramLattice) -> bool:
    """(ST)^3 = S^2 on every basis vector."""
    A = discriminant_group(lat)
    for v in _basis_vectors(A.elements()):
        left = v
        for _ in range(3):
            left = weil_action(lat, "S", weil_action(lat, "T", left))
        right = weil_action(lat, "S", weil_action(lat, "S", v))
        if not _eq(left, right):
            return False
    return True


def _trace_check(L: GramLattice, C: GramLattice, rng: random.Random) -> int:
    """Tr after rho_L (x) rho_C (x) rho_C(-1) equals rho_L after Tr; returns the number of failed generators.

    The tensor action is applied to a random element of the triple group algebra,
    contracting the last two factors before the first.
    """
    AL, AC = discriminant_group(L), discriminant_group(C)
    Cm = C.scaled(-1)
    ACm = discriminant_group(Cm)
    # C(-1)'/C(-1) and C'/C share their dual vectors
    to_c = {g: AC.key(ACm.representative(g)) for g in ACm.elements()}
    x: Dict[tuple, Fraction] = {}
    for _ in range(3):
        x[(rng.choice(AL.elements()), rng.choice(AC.elements()), rng.choice(AC.elements()))] = Fraction(rng.randint(1, 5))
    g = rng.choice(AC.elements())
    x[(rng.choice(AL.elements()), g, g)] = Fraction(rng.randint(1, 5))
    bad = 0
    for gen in ("S", "T"):
        mL, mC = weil_matrix(L, gen), weil_matrix(C, gen)
        mCm = {(to_c[b], to_c[g]): v for (b, g), v in weil_matrix(Cm, gen).items()}
        left: Dict = {}
        for (b, g, d), c in x.items():
            inner = CyclotomicNumber.rational(0)
            for g2 in AC.elements():
                u, w = mC.get((g2, g)), mCm.get((g2, d))
                if u is not None and w is not None:
                    inner = inner + u * w
            inner = inner * c
            for b2 in AL.elements():
                u = mL.get((b2, b))
                if u is not None:
                    left[b2] = left[b2] + u * inner if b2 in left else u * inner
        right = weil_action(L, gen, trace_map(x))
        if not _eq(left, right):
            bad += 1
    return bad


def _jacobi_roundtrip(phi: JacobiFormExpansion) -> bool:
    F = theta_decompose(phi)
    back = theta_recompose(F)
    want = {k: c for k, c in phi.coeffs.items() if k[0] <= back.bound}
    return back.coeffs == want


def _random_vvmf(lat: GramLattice, weight, bound, rng: random.Random, density: float = 0.5) -> VVMFExpansion:
    A = discriminant_group(lat)
    coeffs = {}
    for g in A.elements():
        n = A.qvalue(g)
        if n == 0:
            n = Fraction(1)
        while n <= bound:
            if rng.random() < density:
                c = rng.randint(-9, 9)
                if c:
                    coeffs[(g, n)] = c
            n += 1
    return VVMFExpansion(lat, weight, coeffs, bound)


def suite_weil(seed: int = 1) -> dict:
    rng = random.Random(seed)
    failures: List[str] = []
    checked = 0
    lats = small_even_lattices()
    for lat in lats:
        name = [list(r) for r in lat.gram]
        checked += 1
        if not _relation_check(lat):
            failures.append(f"(ST)^3 != S^2 for {name}")
        for split in _splits(lat):
            glue = GlueMap(split)
            amb = discriminant_group(lat).elements()
            til = glue.tilde_group.elements()
            for gen in ("S", "T"):
                for v in _basis_vectors(amb):
                    checked += 1
                    if not _eq(arrow_down_vector(glue, weil_action(lat, gen, v)),
                               weil_action(glue.tilde, gen, arrow_down_vector(glue, v))):
                        failures.append(f"arrow down vs rho({gen}) on {name}, sub {split.sub}")
                for w in _basis_vectors(til):
                    checked += 1
                    if not _eq(arrow_up_vector(glue, weil_action(glue.tilde, gen, w)),
                               weil_action(lat, gen, arrow_up_vector(glue, w))):
                        failures.append(f"arrow up vs rho({gen}) on {name}, sub {split.sub}")
    rank1 = [l for l in lats if l.rank == 1]
    for L in lats:
        for C in rank1 + [l for l in lats if l.rank == 2 and abs(l.det) <= 4]:
            checked += 2
            bad = _trace_check(L, C, rng)
            if bad:
                failures.append(f"trace equivariance: L={[list(r) for r in L.gram]}, C={[list(r) for r in C.gram]}")
    for phi in (phi10_1(6), phi_m2_1(6), phi_m1_2(6)):
        checked += 1
        if not _jacobi_roundtrip(phi):
            failures.append(f"theta round trip: {phi!r}")
    for lat in lats:
        if not lat.is_negative_definite():
            continue
        F = _random_vvmf(lat, Fraction(rng.randint(2, 12)) + Fraction(lat.rank, 2), 5, rng)
        phi = theta_recompose(F)
        back = theta_decompose(phi)
        checked += 1
        want = {k: c for k, c in F.coeffs.items() if k[1] <= back.bound}
        if back.coeffs != want or back.weight != F.weight or back.lattice != F.lattice:
            failures.append(f"vector-valued theta round trip on {[list(r) for r in lat.gram]}")
        checked += 1
        if not _jacobi_roundtrip(phi):
            failures.append(f"Jacobi theta round trip on {[list(r) for r in lat.gram]}")
    return _report(checked, failures, lattices=len(lats))


# ---------------------------------------------------------------- random data

def random_ortho(lat: GramLattice, weight, w0: Sequence, bound, rng: random.Random, density: float = 0.5,
                 cusp: bool = True) -> OrthoFormExpansion:
    """Random integer coefficients on the (open, if ``cusp``) cone up to height ``bound``."""
    coeffs = {}
    for nu in enumerate_dual(lat, bound, w0=w0, strict=cusp):
        if any(nu) and rng.random() < density:
            c = rng.randint(-9, 9)
            if c:
                coeffs[nu] = c
    return OrthoFormExpansion(lat, weight, coeffs, w0, bound, cusp=cusp)


def _small_vectors(n: int, size: int = 2):
    for v in product(range(-size, size + 1), repeat=n):
        if any(v) and next(x for x in v if x) > 0:
            yield v


LIFT_LATTICES = [
    [[0, 1], [1, 0]], [[2, 0], [0, -2]], [[2, 1], [1, -2]], [[2, 0], [0, -4]], [[2, 0], [0, -6]],
    [[4, 0], [0, -2]],
    [[0, 0, 1], [0, -2, 0], [1, 0, 0]], [[0, 0, 1], [0, -4, 0], [1, 0, 0]], [[0, 0, 1], [0, -6, 0], [1, 0, 0]],
    [[2, 0, 0], [0, -2, 0], [0, 0, -2]], [[2, 0, 0], [0, -2, -1], [0, -1, -2]], [[0, 1, 0], [1, 0, 0], [0, 0, -4]],
]


def random_lift_setup(rng: random.Random, height=6):
    """A Lorentzian lattice of rank 2 or 3, a split into a Lorentzian piece and a
    negative-definite piece, a height vector in the Lorentzian piece and random
    cusp-supported input data."""
    lat = GramLattice(rng.choice(LIFT_LATTICES))
    n = lat.rank
    vecs = list(_small_vectors(n))
    if n == 3 and rng.random() < 0.3:
        p = rng.choice([v for v in vecs if lat.Q(v) > 0])
        split = SublatticeSplit(lat, [p], integer_kernel([[int(x) for x in lat.lower(p)]], n))
        w0 = p
    else:
        v = rng.choice([v for v in vecs if lat.Q(v) < 0])
        split = heegner_split(lat, v)
        split = SublatticeSplit(lat, split.sub, split.complement)
        cands = []
        for c in product(range(-5, 6), repeat=len(split.sub)):
            w = split.embed_sub(c)
            if lat.Q(w) > 0:
                cands.append(tuple(int(x) for x in w))
        w0 = min(cands, key=lambda w: (lat.Q(w), w))
    kk = rng.randint(2, 6)
    weight = Fraction(kk + 1) - Fraction(n, 2)
    qmax = Fraction(height * height) / (4 * lat.Q(w0))
    F = _random_vvmf(lat, weight, qmax, rng, density=0.8)
    return F, split, w0


def suite_prop57(trials: int = 100, orders: Sequence[int] = (0, 1, 2, 3), height=6, seed: int = 57,
                 progress: Optional[Callable[[int, dict], None]] = None) -> dict:
    rng = random.Random(seed)
    failures: List[str] = []
    checked = 0
    complements = set()
    for t in range(trials):
        F, split, w0 = random_lift_setup(rng, height)
        complements.add(split.complement_lattice.gram)
        for N in orders:
            r = verify_prop57(F, split, N, w0, height)
            checked += r["checked"]
            if not r["ok"]:
                failures.append(f"trial {t}: lattice {[list(x) for x in F.lattice.gram]}, complement "
                                f"{split.complement}, N={N}: {len(r['diff'])} mismatches, omitted {r['omitted']}")
        if progress:
            progress(t, {"failures": len(failures)})
    return _report(checked, failures, trials=trials, complements=sorted(complements))


FJ_INDEX_LATTICES = [[[2]], [[4]], [[6]], [[2, 1], [1, 2]], [[2, 0], [0, 2]], [[2, 1], [1, 4]], [[2, 0], [0, 4]],
                [[4, 2], [2, 4]]]


def _tensor_dict(phi: JacobiFormExpansion) -> Dict:
    return {k: t for k, t in phi.coeffs.items() if t}


def suite_prop56(trials: int = 30, orders: Sequence[int] = (0, 1, 2, 3), bound=5, seed: int = 56) -> dict:
    """Fourier-Jacobi coefficients of a cycle pullback against partial development coefficients."""
    rng = random.Random(seed)
    failures: List[str] = []
    checked = 0
    for t in range(trials):
        L = GramLattice(rng.choice(FJ_INDEX_LATTICES))
        lat = hyperbolic_lattice(L)
        n = L.rank
        K = [] if n == 1 or rng.random() < 0.3 else [rng.choice([(1, 0), (0, 1), (1, 1), (1, -1)])]
        inner = SublatticeSplit(L, K)
        sub = [(1,) + (0,) * (n + 1)] + [(0,) + tuple(k) + (0,) for k in inner.sub] + [(0,) * (n + 1) + (1,)]
        comp = [(0,) + tuple(c) + (0,) for c in inner.complement]
        split = SublatticeSplit(lat, sub, comp)
        w0 = (1,) + (0,) * n + (1,)
        F = random_ortho(lat, rng.randint(2, 12), w0, bound, rng)
        phis = fourier_jacobi(F)
        for N in orders:
            P = pullback_cycle(F, split, N)
            fj = fourier_jacobi(P)
            for a, psi in fj.items():
                checked += 1
                if a == 0:
                    if _tensor_dict(psi):
                        failures.append(f"trial {t}: nonzero index-zero coefficient")
                    continue
                want = partial_dev_coeff(phis[a], inner.sub, N, complement=inner.complement)
                if (_tensor_dict(psi) != _tensor_dict(want) or psi.bound != want.bound
                        or psi.weight != want.weight or psi.lattice != want.lattice):
                    failures.append(f"trial {t}: index {[list(r) for r in L.gram]}, K={list(inner.sub)}, N={N}, a={a}")
    return _report(checked, failures, trials=trials)


# ---------------------------------------------------------------- structural invariants

STRUCTURAL_LATTICES = LIFT_LATTICES[6:] + [[[0, 0, 0, 1], [0, -2, -1, 0], [0, -1, -2, 0], [1, 0, 0, 0]]]


def suite_structural(trials: int = 20, orders: Sequence[int] = (0, 1, 2, 3), bound=6, seed: int = 8) -> dict:
    """Cusp support, weights, homogeneity in lambda and rank-one polarization, on random data."""
    rng = random.Random(seed)
    failures: List[str] = []
    checked = 0
    for t in range(trials):
        lat = GramLattice(rng.choice(STRUCTURAL_LATTICES))
        n = lat.rank
        w0 = min((v for v in _small_vectors(n, 1) if lat.Q(v) > 0), key=lambda v: (lat.Q(v), v))
        k = rng.randint(2, 12)
        F = random_ortho(lat, k, w0, bound, rng, cusp=False)
        lam = rng.choice([v for v in _small_vectors(n, 1) if lat.Q(v) < 0])
        c = rng.choice([2, 3, -1, -2])
        split = heegner_split(lat, lam)
        scaled = SublatticeSplit(lat, split.sub, [tuple(c * x for x in lam)])
        for N in orders:
            P = pullback_heegner(F, lam, N, split=split)
            E = P.expansion
            checked += 1
            if E.weight != k + N:
                failures.append(f"trial {t}: Heegner weight {E.weight} != {k + N}")
            if N >= 1:
                for r, v in E.coeffs.items():
                    checked += 1
                    if v and E.lattice.Q(r) == 0:
                        failures.append(f"trial {t}: N={N} pullback has a boundary coefficient at {r}")
            Pc = pullback_heegner(F, scaled.complement[0], N, split=scaled).expansion
            checked += 1
            if Pc.coeffs != {r: v * c ** N for r, v in E.coeffs.items()}:
                failures.append(f"trial {t}: homogeneity in lambda fails for c={c}, N={N}")
            T = pullback_cycle(F, split, N)
            checked += 2
            if T.weight != k + N:
                failures.append(f"trial {t}: cycle weight {T.weight} != {k + N}")
            if T.evaluate(*([(1,)] * N)).coeffs != E.coeffs or T.diagonal((1,)).coeffs != E.coeffs:
                failures.append(f"trial {t}: cycle pullback along span(lambda) differs from the Heegner pullback, N={N}")
    return _report(checked, failures, trials=trials)


# ---------------------------------------------------------------- special cases

def suite_prop62() -> dict:
    failures: List[str] = []
    checked = 0
    lams = [(1, 0), (Fraction(3, 2), Fraction(1, 2)), (3, 1)]
    samples = [(a, b) for a in range(-3, 4) for b in range(-3, 4)]
    samples += [(Fraction(a, 2), Fraction(b, 2)) for a in range(-5, 6, 2) for b in range(-5, 6, 2)]
    for lam in lams:
        mu = (5 * lam[1], lam[0])  # lambda * sqrt(5)
        for k in range(4, 13):
            for N in range(5):
                r = verify_prop62(k, N, lam, mu, samples)
                checked += r["checked"]
                if not r["ok"]:
                    failures.append(f"lambda={lam} k={k} N={N}: {len(r['failures'])} mismatches")
    return _report(checked, failures)


def suite_lemma63(degree: int = 8) -> dict:
    failures: List[str] = []
    checked = 0
    for k in (Fraction(2), Fraction(5, 2), Fraction(3), Fraction(7, 2)):
        r = cohen_generating_identity(k, degree)
        checked += (degree + 1) * (degree + 2) // 2
        if not r["ok"]:
            failures.append(f"k={k}: differs at {sorted(r['diff'])[:5]}")
    return _report(checked, failures)


def suite_ex64(height: int = 6) -> dict:
    r = run_ex64(height)
    failures = []
    if not r["block_ok"]:
        failures.append(f"leading block differs at {sorted(r['block_residual'])[:5]}")
    for N, p in sorted(r["pullbacks"].items()):
        if not p["ok"]:
            failures.append(f"P{N} should be {p['claim']}; residual at {sorted(p['residual'])[:5]}")
    checked = 1 + sum(max(p["terms"], 1) for p in r["pullbacks"].values())
    return _report(checked, failures, through=r["through"], result=r)


def suite_ex65() -> dict:
    r = run_ex65()
    failures = [f"{name}: residual {c['residual']}" for name, c in r["checks"].items() if not c["ok"]]
    return _report(len(r["checks"]), failures, through=r["through"], result=r)


SUITES: Dict[str, Callable[[], dict]] = {
    "gegenbauer": suite_gegenbauer,
    "weil": suite_weil,
    "prop56": suite_prop56,
    "prop57": suite_prop57,
    "structural": suite_structural,
    "prop62": suite_prop62,
    "lemma63": suite_lemma63,
    "ex64": suite_ex64,
    "ex65": suite_ex65,
}


def run_suite(name: str) -> dict:
    if name == "all":
        parts = {k: fn() for k, fn in SUITES.items()}
        return {"ok": all(p["ok"] for p in parts.values()), "checked": sum(p["checked"] for p in parts.values()),
                "failures": [f"{k}: {f}" for k, p in parts.items() for f in p["failures"]], "suites": parts}
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    return SUITES[name]()
