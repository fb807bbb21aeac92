"""Command-line interface: ``omfq <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from .classical import delta, eisenstein, eta_power, phi10_1, phi_m2_1
from .fileformat import CoefficientFileError, emit_coefficient_file, parse_coefficient_file
from .gegenbauer import G_eval
from .jacobi import JacobiFormExpansion, VVMFExpansion, dev_coeff, fourier_jacobi, partial_dev_coeff
from .lattice import LatticeError, SublatticeSplit
from .lift import gritsenko_lift, theta_lift
from .ortho import DivisorError, OrthoFormExpansion, PrecisionError, pullback_cycle, pullback_heegner
from .verify import SUITES, run_suite


class InputError(Exception):
    pass


# ---------------------------------------------------------------- parsing helpers

def _vector(text: str) -> tuple:
    try:
        return tuple(Fraction(t) for t in text.replace(" ", "").split(",") if t)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad vector {text!r}; expected comma-separated numbers") from None


def _int_vector(text: str) -> tuple:
    v = _vector(text)
    if any(x.denominator != 1 for x in v):
        raise InputError(f"{text!r} must have integer entries")
    return tuple(int(x) for x in v)


def _vectors(text: Optional[str]) -> List[tuple]:
    if not text:
        return []
    return [_vector(part) for part in text.split(";") if part.strip()]


def _int_vectors(text: Optional[str]) -> List[tuple]:
    if not text:
        return []
    return [_int_vector(part) for part in text.split(";") if part.strip()]


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad number {text!r}") from None


def _read(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return parse_coefficient_file(text)


def _expect(obj, kind, path):
    if not isinstance(obj, kind):
        raise InputError(f"{path} holds a {type(obj).__name__}, expected {kind.__name__}")
    return obj


def _write(obj, out: Optional[str]):
    text = emit_coefficient_file(obj)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _evaluation_vectors(vectors: List[tuple], N: int, dim: int) -> List[tuple]:
    """N vectors to feed a symmetric N-form; a single vector is repeated."""
    if N == 0:
        return []
    if not vectors:
        if dim == 1:
            return [(Fraction(1),)] * N
        raise InputError("tensor-valued output: pass --vectors with N vectors (or one, for the diagonal)")
    if len(vectors) == 1:
        vectors = vectors * N
    if len(vectors) != N:
        raise InputError(f"need {N} vectors (or one), got {len(vectors)}")
    for v in vectors:
        if len(v) != dim:
            raise InputError(f"vector {v} should have {dim} coordinates")
    return vectors


# ---------------------------------------------------------------- commands

def cmd_pullback(a) -> int:
    F = _expect(_read(a.input), OrthoFormExpansion, a.input)
    lam = _int_vector(a.lam)
    if len(lam) != F.lattice.rank:
        raise InputError(f"lambda has {len(lam)} coordinates, the lattice has rank {F.lattice.rank}")
    res = pullback_heegner(F, lam, a.order, bound=a.bound)
    if res.omitted:
        sys.stderr.write(f"omitted {len(res.omitted)} output indices beyond the certified precision:\n")
        for r in res.omitted:
            sys.stderr.write("  " + " ".join(str(x) for x in r) + "\n")
    _write(res.expansion, a.out)
    return 0


def cmd_cycle_pullback(a) -> int:
    F = _expect(_read(a.input), OrthoFormExpansion, a.input)
    normal = _int_vectors(a.sublattice)
    if not normal:
        raise InputError("--sublattice needs at least one vector")
    lat = F.lattice
    split = SublatticeSplit(lat, normal).swapped()
    T = pullback_cycle(F, split, a.order, bound=a.bound)
    vs = _evaluation_vectors(_vectors(a.vectors), a.order, len(normal))
    if T.omitted:
        sys.stderr.write(f"omitted {len(T.omitted)} output indices beyond the certified precision\n")
    _write(T.evaluate(*vs), a.out)
    return 0


def cmd_devcoeff(a) -> int:
    phi = _expect(_read(a.input), JacobiFormExpansion, a.input)
    D = dev_coeff(phi, a.order)
    vs = _evaluation_vectors(_vectors(a.vectors), a.order, phi.lattice.rank)
    _write(D.evaluate(*vs), a.out)
    return 0


def cmd_partial_devcoeff(a) -> int:
    phi = _expect(_read(a.input), JacobiFormExpansion, a.input)
    K = _int_vectors(a.sublattice)
    D = partial_dev_coeff(phi, K, a.order)
    vs = _evaluation_vectors(_vectors(a.vectors), a.order, phi.lattice.rank - len(K))
    _write(D.evaluate(*vs), a.out)
    return 0


def cmd_lift(a) -> int:
    obj = _read(a.input)
    if isinstance(obj, VVMFExpansion):
        if not a.w0:
            raise InputError("lifting a vector-valued form needs --w0")
        out = theta_lift(obj, _vector(a.w0), a.bound)
    elif isinstance(obj, JacobiFormExpansion):
        out = gritsenko_lift(obj, a.bound, w0=_vector(a.w0) if a.w0 else None)
    else:
        raise InputError("lift needs a vvmf or jacobi file")
    _write(out, a.out)
    return 0


def cmd_fourier_jacobi(a) -> int:
    F = _expect(_read(a.input), OrthoFormExpansion, a.input)
    phis = fourier_jacobi(F)
    if a.index not in phis:
        raise InputError(f"index {a.index} is beyond the known precision (largest known index {max(phis)})")
    _write(phis[a.index], a.out)
    return 0


CLASSICAL = {
    "e4": lambda B: eisenstein(4, B),
    "e6": lambda B: eisenstein(6, B),
    "delta": delta,
    "eta": lambda B: eta_power(B, 1),
    "phi-2-1": lambda B: phi_m2_1(int(B)),
    "phi10-1": lambda B: phi10_1(int(B)),
}


def cmd_classical(a) -> int:
    B = _fraction(a.prec)
    if B < 0:
        raise InputError("--prec must be nonnegative")
    if a.series.startswith("phi") and B.denominator != 1:
        raise InputError("Jacobi forms need an integral --prec")
    _write(CLASSICAL[a.series](B), a.out)
    return 0


def cmd_gegenbauer(a) -> int:
    if a.N < 0:
        raise InputError("N must be nonnegative")
    v = G_eval(a.N, _fraction(a.s), _fraction(a.x), _fraction(a.y))
    print(v)
    return 0


def _monomial(abc) -> str:
    parts = []
    for name, e in zip(("E4", "E6", "Delta"), abc):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return " ".join(parts) or "1"


def _linear_combination(coords) -> str:
    if not coords:
        return "0"
    return " + ".join(f"{c} {_monomial(m)}" for m, c in sorted(coords.items()))


def _print_summary(name: str, r: dict):
    if name == "ex65":
        res = r["result"]
        mem = res["checks"]["membership"]
        print(f"P2(B1⊗B2) = {_linear_combination(mem['coords'])} (through q^{res['through']})")
        for key, c in res["checks"].items():
            if key != "membership":
                print(f"  {key}: {'ok' if c['ok'] else 'MISMATCH'}")
    elif name == "ex64":
        res = r["result"]
        print(f"Psi10 leading block: {'matches' if res['block_ok'] else 'DIFFERS'}")
        for N, p in sorted(res["pullbacks"].items()):
            claim = p["claim"] or "no closed form asserted"
            print(f"  P{N}: {claim}: {'ok' if p['ok'] else 'MISMATCH'} ({p['terms']} terms)")
        print(f"  (through total q-degree {res['through']})")
    status = "PASS" if r["ok"] else "FAIL"
    print(f"{name}: {status} ({r['checked']} checks)")
    for f in r["failures"]:
        print(f"  diff: {f}")


def cmd_verify(a) -> int:
    names = list(SUITES) if a.suite == "all" else [a.suite]
    ok = True
    machine = {}
    for name in names:
        r = run_suite(name)
        ok = ok and r["ok"]
        if a.json:
            machine[name] = {"ok": r["ok"], "checked": r["checked"], "failures": r["failures"]}
        else:
            _print_summary(name, r)
    if a.json:
        print(json.dumps(machine, indent=2, sort_keys=True))
    return 0 if ok else 1


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="omfq", description="Exact higher pullbacks of orthogonal modular forms.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="coefficient file")
        sp.add_argument("--out", help="output file (default: standard output)")

    sp = sub.add_parser("pullback", help="N-th pullback to a Heegner divisor")
    common(sp)
    sp.add_argument("--lambda", dest="lam", required=True, help="lattice vector c1,c2,... with Q < 0")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--bound", type=Fraction, help="output height bound (default: the certified one)")
    sp.set_defaults(fn=cmd_pullback)

    sp = sub.add_parser("cycle-pullback", help="N-th pullback to the orthogonal complement of a negative-definite sublattice")
    common(sp)
    sp.add_argument("--sublattice", required=True, help="basis of the negative-definite sublattice, v1;v2;...")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--vectors", help="N vectors in sublattice coordinates, u1;u2;... (one vector: diagonal)")
    sp.add_argument("--bound", type=Fraction)
    sp.set_defaults(fn=cmd_cycle_pullback)

    sp = sub.add_parser("devcoeff", help="development coefficient of a Jacobi form")
    common(sp)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--vectors", help="N vectors in index-lattice coordinates")
    sp.set_defaults(fn=cmd_devcoeff)

    sp = sub.add_parser("partial-devcoeff", help="partial development coefficient along the complement of K")
    common(sp)
    sp.add_argument("--sublattice", default="", help="basis of K in index-lattice coordinates")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--vectors", help="N vectors in complement coordinates")
    sp.set_defaults(fn=cmd_partial_devcoeff)

    sp = sub.add_parser("lift", help="theta lift (vvmf input) or Gritsenko lift (jacobi input)")
    common(sp)
    sp.add_argument("--w0", help="height vector c1,c2,...")
    sp.add_argument("--bound", type=Fraction, required=True, help="height bound of the output")
    sp.set_defaults(fn=cmd_lift)

    sp = sub.add_parser("fourier-jacobi", help="a Fourier-Jacobi coefficient")
    common(sp)
    sp.add_argument("--index", type=int, required=True)
    sp.set_defaults(fn=cmd_fourier_jacobi)

    sp = sub.add_parser("classical", help="q-expansions of classical forms")
    common(sp, needs_input=False)
    sp.add_argument("--series", required=True, choices=sorted(CLASSICAL))
    sp.add_argument("--prec", required=True, help="known through q^prec")
    sp.set_defaults(fn=cmd_classical)

    sp = sub.add_parser("gegenbauer", help="evaluate G_N^s(x, y)")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--s", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.set_defaults(fn=cmd_gegenbauer)

    sp = sub.add_parser("verify", help="run a self-check suite")
    sp.add_argument("--suite", required=True, choices=list(SUITES) + ["all"])
    sp.add_argument("--json", action="store_true", help="machine-readable report")
    sp.set_defaults(fn=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.fn(args)
    except DivisorError as e:
        sys.stderr.write(f"invalid divisor: {e}\n")
    except (InputError, CoefficientFileError, LatticeError, PrecisionError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
    return 2


if __name__ == "__main__":
    sys.exit(main())
