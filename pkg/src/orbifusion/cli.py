"""Command-line entry point: ``orbifusion an | verify <suite> | fuse``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, List, Optional

from .report import Check, Report

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return n


def threads() -> int:
    raw = os.environ.get("ORBIFUSION_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def run_jobs(jobs: List[Callable[[], object]]) -> list:
    """Run independent checks, at most ORBIFUSION_THREADS at a time; order is kept."""
    n = min(threads(), len(jobs)) or 1
    if n == 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda job: job(), jobs))


def _flatten(results) -> List[Check]:
    out: List[Check] = []
    for r in results:
        if isinstance(r, Check):
            out.append(r)
        else:
            out.extend(r)
    return out


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _sample_vectors():
    from .boson import GradedVector, alpha_vector, conformal_vector, vacuum
    return [vacuum(), alpha_vector(1), conformal_vector(), GradedVector.monomial(0, (1, 1))]


def suite_delta(k: int, cutoff: int, lam: Fraction) -> List[Check]:
    from .boson import alpha_vector, highest_weight
    from .delta import (apply_delta, omega_image_expected, verify_delta_conjugation,
                        verify_derivative_identity, verify_l_minus_one_bracket, verify_phi_conjugation)
    from .boson import conformal_vector
    from .report import compare_maps

    jobs = [lambda: compare_maps("delta omega image", apply_delta(k, conformal_vector()).entries,
                                 omega_image_expected(k), None, {"k": k})]
    for w in _sample_vectors():
        jobs.append(lambda w=w: verify_derivative_identity(k, w, cutoff))
        jobs.append(lambda w=w: verify_l_minus_one_bracket(k, w, cutoff))
    hw = highest_weight(lam)
    jobs.append(lambda: verify_delta_conjugation(k, alpha_vector(1), hw, cutoff))
    jobs.append(lambda: verify_phi_conjugation(k, alpha_vector(1), hw, cutoff))
    return _flatten(run_jobs(jobs))


def suite_jacobi(k: int, cutoff: int, lam: Fraction) -> List[Check]:
    from .boson import GradedVector, highest_weight
    from .twisted import (TensorAction, expected_twisted_virasoro, ground_weight, twisted_module,
                          twisted_virasoro, verify_slot_commutator, verify_twisted_jacobi)

    T = twisted_module(lam, k)
    vecs = _sample_vectors()
    hw = highest_weight(lam)

    def virasoro_check():
        checked = 0
        for n in range(-2, 3):
            for m in T.module.basis(T.module.base.min_weight + 4):
                s = GradedVector.monomial(lam, m)
                checked += 1
                left, right = twisted_virasoro(T, n, s), expected_twisted_virasoro(T, n, s)
                if left != right:
                    return Check("twisted Virasoro modes", False, {"n": [-2, 2], "depth": 4}, checked,
                                 {"n": n, "s": m, "left": left, "right": right}, {"k": k})
        return Check("twisted Virasoro modes", True, {"n": [-2, 2], "depth": 4}, checked, None, {"k": k})

    def ground():
        gw = ground_weight(twisted_module(0, k))
        want = Fraction(1, 24) * (k - Fraction(1, k))
        return Check("ground weight", gw == want, None, 1, None if gw == want else {"got": gw, "want": want},
                     {"k": k, "ground weight": gw})

    jobs: List[Callable] = [virasoro_check, ground]
    for u in vecs:
        for v in vecs:
            for i in range(1, k + 1):
                for j in range(1, k + 1):
                    jobs.append(lambda u=u, v=v, i=i, j=j: verify_twisted_jacobi(T, u, i, v, j, hw, cutoff))
    untw = TensorAction([lam] + [0] * (k - 1))
    w0 = untw.state()
    for u in vecs[1:]:
        for v in vecs[1:]:
            jobs.append(lambda u=u, v=v: verify_slot_commutator(untw, u, 1, v, 2, w0, min(cutoff, 3)))
    return _flatten(run_jobs(jobs))


def suite_transport(k: int, window: int, lam: Fraction, mu: Fraction) -> List[Check]:
    from .boson import FockIntertwiner, alpha_vector, conformal_vector, highest_weight, vacuum
    from .transport import (InverseTransport, ModuleMapInsertion, TransportedIntertwiner, compare_families,
                            verify_delta_property, verify_transport_associativity,
                            verify_transport_commutator)
    from .twisted import twisted_module

    base = FockIntertwiner(lam, mu)
    fw = TransportedIntertwiner(base, k)
    inserts = [(), (1,), (2,), (1, 1)]
    srcs = [(), (1,)]
    params = {"k": k, "lambda": lam, "mu": mu}
    T = twisted_module(mu, k)
    mm = ModuleMapInsertion(T)
    Y = InverseTransport(fw, k)
    hw_l, hw_m = highest_weight(lam), highest_weight(mu)
    samples = [(alpha_vector(1), hw_l, hw_m), (conformal_vector(), hw_l, hw_m),
               (alpha_vector(1), alpha_vector(1, lam), hw_m), (conformal_vector(), hw_l, alpha_vector(1, mu)),
               (alpha_vector(2), hw_l, hw_m), (vacuum(), hw_l, hw_m)]
    jobs: List[Callable] = [
        lambda: compare_families("inverse after forward", Y, base, inserts, srcs, window, params),
        lambda: compare_families("forward after inverse", TransportedIntertwiner(InverseTransport(mm, k), k),
                                 mm, inserts, srcs, window, params),
        lambda: compare_families("transported module map", TransportedIntertwiner(FockIntertwiner(0, mu), k),
                                 mm, inserts, srcs, window, params),
    ]
    for u, w, a in samples:
        jobs.append(lambda u=u, w=w, a=a: verify_transport_commutator(Y, u, w, a, 3))
        jobs.append(lambda u=u, w=w, a=a: verify_transport_associativity(Y, u, w, a, 3))
    for u, w in [(alpha_vector(1), hw_l), (conformal_vector(), vacuum()), (alpha_vector(1), alpha_vector(1)),
                 (conformal_vector(), hw_l), (alpha_vector(2), hw_m)]:
        jobs.append(lambda u=u, w=w: verify_delta_property(k, u, w, 3))
    return _flatten(run_jobs(jobs))


def suite_genint(k: int, cutoff: int, lam: Fraction, mu: Fraction) -> List[Check]:
    from .boson import FockIntertwiner, alpha_vector, conformal_vector, highest_weight
    from .genint import (GeneralizedIntertwiner, verify_H_axioms, verify_bracket, verify_homomorphism,
                         verify_vacuum_identity, verify_vacuum_like)
    from .transport import TransportedIntertwiner
    from .twisted import TensorVector

    fam = TransportedIntertwiner(FockIntertwiner(lam, mu), k)
    hw = highest_weight(lam)
    phi = GeneralizedIntertwiner(fam, hw)
    gens = [alpha_vector(1), conformal_vector(), alpha_vector(2)]
    jobs: List[Callable] = [lambda: verify_vacuum_identity(phi), lambda: verify_bracket(phi)]
    for u in gens:
        for slot in range(2, k + 1):
            for n in range(0, 2):
                jobs.append(lambda u=u, slot=slot, n=n: verify_vacuum_like(phi, u, slot, n))
        for n in range(-2, 2):
            jobs.append(lambda u=u, n=n: verify_homomorphism(fam, u, hw, n))
    for u in gens[:2]:
        for slot in (1, 2):
            U = TensorVector.single(u, slot, k)
            jobs.append(lambda U=U: verify_H_axioms(U, U, phi, cutoff=cutoff))
    return _flatten(run_jobs(jobs))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_an(args) -> Report:
    from .delta import solve_an
    co = solve_an(args.k, args.count)
    rep = Report("an", {"k": args.k, "count": args.count})
    rep.results = [f"a{n} = {co[n]}" for n in range(1, args.count + 1)]
    return rep


def cmd_verify(args) -> Report:
    suite = args.suite
    params = {"suite": suite, "k": args.k, "cutoff": args.cutoff, "lambda": args.lam}
    if suite == "delta":
        checks = suite_delta(args.k, args.cutoff, args.lam)
    elif suite == "jacobi":
        checks = suite_jacobi(args.k, args.cutoff, args.lam)
    elif suite == "transport":
        params.update(mu=args.mu, window=args.window)
        checks = suite_transport(args.k, args.window, args.lam, args.mu)
    else:
        params.update(mu=args.mu)
        checks = suite_genint(args.k, min(args.cutoff, 4), args.lam, args.mu)
    rep = Report(f"verify {suite}", params)
    rep.extend(checks)
    return rep


def _labels(text: Optional[str], ring) -> List[str]:
    if text is None:
        return []
    parts = [p.strip() for p in text.split(",")]
    out = []
    for pos, p in enumerate(parts, start=1):
        if not p:
            raise InputError(f"empty label at position {pos}")
        try:
            out.append(ring.resolve(p))
        except Exception as exc:
            raise InputError(f"label {p!r} at position {pos}: {exc}")
    return out


def cmd_fuse(args) -> Report:
    from .fusion import (Permutation, Twisted, all_untwisted, classify_twisted, format_multiset,
                         iterated_fuse, load_ring, orbifold_fuse)

    ring = load_ring(args.ring)
    sigma = Permutation.parse(args.perm, args.k) if args.perm else Permutation.identity(args.k)
    params = {"ring": ring.name, "k": args.k, "perm": str(sigma)}
    rep = Report("fuse", params)
    if args.table:
        rows = []
        bad = None
        count = 0
        for M in all_untwisted(ring, args.k):
            for T in classify_twisted(ring, sigma):
                got = orbifold_fuse(ring, M, T)
                count += 1
                if bad is None and got != iterated_fuse(ring, M, T):
                    bad = {"modules": M, "twisted": str(T)}
                rows.append(f"({', '.join(M)}) x {T} = {format_multiset(got)}")
        rep.add(Check("iterated single-slot agreement", bad is None, {"cases": count}, count, bad, params))
        rep.results = rows
        return rep
    M = _labels(args.modules, ring) or [ring.unit] * args.k
    if len(M) != args.k:
        raise InputError(f"--modules needs {args.k} labels, got {len(M)}")
    N = _labels(args.twisted, ring) or [ring.unit] * len(sigma.cycles)
    if len(N) != len(sigma.cycles):
        raise InputError(f"--twisted needs {len(sigma.cycles)} labels (one per cycle of {sigma}), got {len(N)}")
    T = Twisted(sigma, tuple(N))
    got = orbifold_fuse(ring, M, T)
    params.update(modules=M, twisted=str(T))
    rep.add(Check("iterated single-slot agreement", got == iterated_fuse(ring, M, T), None, 1, None, params))
    rep.results = format_multiset(got)
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbifusion", description="Exact permutation-orbifold calculus and fusion.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to this file")
    common.add_argument("--format", choices=["json", "text"], default="json")
    sub = p.add_subparsers(dest="command", required=True)

    an = sub.add_parser("an", parents=[common], help="print the coefficients a_1..a_count of Delta_k")
    an.add_argument("--k", type=_positive, required=True)
    an.add_argument("--count", type=_positive, default=12)

    ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ver.add_argument("suite", choices=["delta", "jacobi", "transport", "genint"])
    ver.add_argument("--k", type=_positive, default=2)
    ver.add_argument("--cutoff", type=_positive, default=4)
    ver.add_argument("--window", type=_positive, default=30, help="number of lowest exponents compared")
    ver.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1, 2))
    ver.add_argument("--mu", type=_fraction, default=Fraction(1, 3))

    fu = sub.add_parser("fuse", parents=[common], help="fuse untwisted with twisted labels")
    fu.add_argument("--ring", required=True, help="shipped ring name or path to a ring file")
    fu.add_argument("--k", type=_positive, required=True)
    fu.add_argument("--perm", default=None, help='cycle notation, e.g. "(1 2)(3)"')
    fu.add_argument("--modules", default=None, help="comma-separated untwisted labels")
    fu.add_argument("--twisted", default=None, help="comma-separated labels, one per cycle")
    fu.add_argument("--table", action="store_true", help="enumerate all inputs")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    from .fusion import LabelError, RingError

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.k > 6:
        parser.error("--k must be at most 6 for verification suites")
    start = time.perf_counter()
    try:
        if args.command == "an":
            rep = cmd_an(args)
        elif args.command == "verify":
            rep = cmd_verify(args)
        else:
            rep = cmd_fuse(args)
    except (InputError, LabelError, RingError, FileNotFoundError, ValueError) as exc:
        print(f"orbifusion: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rep.timing = {"seconds": round(time.perf_counter() - start, 3)}
    text = rep.to_json() if args.format == "json" else rep.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
