"""The additive theta lift and the check that it commutes with pullbacks."""

from __future__ import annotations

import warnings
from fractions import Fraction
from math import gcd
from typing import Dict, Optional, Sequence

from .jacobi import JacobiFormExpansion, VVMFExpansion, dev_coeff_vvmf, theta_decompose
from .lattice import GramLattice, LatticeError, SublatticeSplit, Vector, discriminant_group, enumerate_dual, vec
from .ortho import OrthoFormExpansion, PrecisionError, pullback_cycle


def _content(lattice: GramLattice, v: Sequence) -> int:
    """Largest d with v/d still a dual vector."""
    g = 0
    for x in lattice.lower(v):
        g = gcd(g, int(x))
    return g


def lift_weight(F: VVMFExpansion) -> Fraction:
    return F.weight - 1 + Fraction(F.lattice.rank, 2)


def theta_lift(F: VVMFExpansion, w0: Sequence, bound, k=None) -> OrthoFormExpansion:
    """a(nu) = sum over d >= 1 with nu/d dual of d^(k-1) c(Q(nu/d), nu/d), for nu in the open cone."""
    lat = F.lattice
    if not lat.is_lorentzian():
        raise LatticeError("the theta lift needs a Lorentzian lattice")
    kk = lift_weight(F)
    if k is not None and Fraction(k) != kk:
        raise ValueError(f"input weight {F.weight} lifts to weight {kk}, not {k}")
    if kk < 2:
        warnings.warn(f"lift weight {kk} < 2: the lift is only formal", stacklevel=2)
    if not F.is_cusp():
        warnings.warn("input has constant terms; boundary contributions are ignored", stacklevel=2)
    if kk.denominator != 1:
        raise ValueError("the lift weight must be integral")
    e = int(kk) - 1
    A = F.group
    out: Dict[Vector, Fraction] = {}
    for nu in enumerate_dual(lat, bound, w0=w0, strict=True):
        q = lat.Q(nu)
        g = _content(lat, nu)
        tot = Fraction(0)
        for d in range(1, g + 1):
            if g % d:
                continue
            qd = q / (d * d)
            if qd > F.bound:
                raise PrecisionError(f"coefficient at {nu} needs c({qd}, .) beyond the known bound {F.bound}")
            c = F[(A.key(tuple(x / d for x in nu)), qd)]
            if c:
                tot += d ** e * c
        if tot:
            out[nu] = tot
    return OrthoFormExpansion(lat, kk, out, w0, bound, cusp=True, check=False)


def hyperbolic_lattice(L: GramLattice) -> GramLattice:
    """II_{1,1} + L(-1) with coordinates (a, x, b)."""
    n = L.rank + 2
    g = [[0] * n for _ in range(n)]
    g[0][n - 1] = g[n - 1][0] = 1
    for i in range(L.rank):
        for j in range(L.rank):
            g[i + 1][j + 1] = -L.gram[i][j]
    return GramLattice(g)


def hyperbolic_extension(F: VVMFExpansion) -> VVMFExpansion:
    """Move a form on L(-1) to II_{1,1} + L(-1).

    The class of x in L(-1)'/L(-1) is sent to the class of (0, -x, 0), so
    that the first Fourier-Jacobi coefficient of the lift is the Jacobi form
    itself under the (a, x, b) -> r = -x/a convention.
    """
    Lm = F.lattice
    Lam = hyperbolic_lattice(Lm.scaled(-1) if Lm.rank else Lm)
    A, B = F.group, discriminant_group(Lam)
    image = {}
    for g in A.elements():
        x = A.representative(g)
        image[g] = B.key((Fraction(0),) + tuple(-t for t in x) + (Fraction(0),))
    out = {(image[g], n): c for (g, n), c in F.coeffs.items()}
    return VVMFExpansion(Lam, F.weight, out, F.bound, check=False)


def gritsenko_lift(phi: JacobiFormExpansion, bound, w0: Optional[Sequence] = None) -> OrthoFormExpansion:
    """Lift a Jacobi cusp form of index L to II_{1,1} + L(-1); the weight is kept."""
    F = hyperbolic_extension(theta_decompose(phi))
    n = F.lattice.rank
    if w0 is None:
        w0 = (1,) + (0,) * (n - 2) + (1,)
    return theta_lift(F, w0, bound, k=phi.weight)


def verify_prop57(F: VVMFExpansion, split: SublatticeSplit, N: int, w0: Sequence, bound) -> dict:
    """Compare the N-th pullback of the lift with the lift of the N-th development coefficient.

    ``split.sub`` is the Lorentzian piece and ``split.complement`` the
    negative-definite piece.  ``w0`` (ambient coordinates) should lie in the
    Lorentzian piece.  Returns {"ok", "diff", "checked"}.
    """
    Phi = theta_lift(F, w0, bound)
    P = pullback_cycle(Phi, split, N)
    D = dev_coeff_vvmf(F, split, N)
    w_sub = split.coords_sub(vec(w0))
    monos = set()
    for t in list(P.coeffs.values()) + list(D.coeffs.values()):
        monos.update(t.poly)
    diff = {}
    checked = 0
    for e in sorted(monos):
        lifted = theta_lift(D.monomial_part(e), w_sub, P.bound)
        if lifted.weight != P.weight:
            raise ValueError(f"weight mismatch: {lifted.weight} vs {P.weight}")
        keys = set(lifted.coeffs) | {r for r, t in P.coeffs.items() if t.poly.get(e)}
        for r in keys:
            left = P.coeffs[r].poly.get(e, Fraction(0)) if r in P.coeffs else Fraction(0)
            right = lifted[r]
            checked += 1
            if left != right:
                diff[(r, e)] = (left, right)
    return {"ok": not diff and not P.omitted, "diff": diff, "checked": checked, "omitted": P.omitted}
