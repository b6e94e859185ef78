"""Batch front-end: ``rspadic <group> <action> [options]``, JSON (or CSV) reports."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from typing import Any

from . import characters, hecke, magic, measure, weights, zeta_local
from .fields import valuation_in
from .local_arith import LocalRingDesc, iwahori_member
from .magic import EnumerationGuardError, FactorizationError, MagicContext

EXIT_GUARD = 3


class GuardViolation(Exception):
    pass


# descriptive anchor for each verified identity
ANCHORS = {
    "interlacing": "critical points of a weight pair",
    "phantom_bound": "critical points of a weight pair",
    "identity": "magic factorization",
    "iwahori": "magic factorization",
    "det": "magic factorization: determinant congruence",
    "surjective": "magic factorization: determinant map",
    "uniform": "magic factorization: determinant map",
    "count_V": "Hecke operators: coset decomposition",
    "count_V_prime": "Hecke operators: coset decomposition",
    "disjoint": "Hecke operators: coset decomposition",
    "gauss_norm": "Gauss sums of finite-order characters",
    "A3": "tower axioms: Hecke eigen-relation",
    "distribution_relation": "distribution property of the tower measure",
    "growth": "boundedness and growth of the tower measure",
    "descends": "ordinary stabilization",
    "u_p_eigen": "ordinary stabilization",
    "interpolation": "interpolation of twisted L-values",
    "l_factor": "unramified local zeta integral",
}


def _check(name: str, ok: bool, identity: str, **detail) -> dict:
    out = {"name": name, "ok": bool(ok), "identity": identity, "anchor": ANCHORS[name]}
    out.update(detail)
    return out


def _enc(x) -> Any:
    """Exact values as strings; containers recursively."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _enc(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


def _guard(cond: bool, msg: str) -> None:
    if not cond:
        raise GuardViolation(msg)


# ---------------------------------------------------------------------------
# handlers: each returns (result, checks)


def cmd_weights(args) -> tuple[dict, list]:
    if args.input:
        with open(args.input) as fh:
            data = json.load(fh)
    elif args.example == "phantom":
        data = {"field": weights.imaginary_quadratic().to_json(), "mu": {"i": [1, 0], "ic": [1, 0]}, "nu": {"i": [0], "ic": [5]}}
    else:
        data = {"field": weights.rationals().to_json(), "mu": {"id": [1, -1]}, "nu": {"id": [0]}}
    pair = weights.pair_from_json(data)
    res = weights.analyze(pair)
    checks = [
        _check(
            "interlacing",
            res["critical_set"] == sorted(set.intersection(*(set(r) for r in weights.embedding_ranges(pair).values()))),
            "critical set = intersection of per-embedding interlacing ranges",
        ),
        _check(
            "phantom_bound",
            res["invariant_dimension"] >= len(res["critical_set"]),
            "invariant dimension >= number of critical points",
        ),
    ]
    return res, checks


def _ring(args, p: int, f: int) -> LocalRingDesc:
    return LocalRingDesc(p, f, args.precision or 10)


def cmd_magic(args) -> tuple[dict, list]:
    ring = _ring(args, args.p, args.f)
    ctx = MagicContext(args.n, ring, 1, args.v)
    rng = random.Random(args.seed)
    checks = []
    if args.action == "factor":
        _guard(args.v >= 1, "the factorization needs depth v >= 1")
        ok_id = ok_iw = ok_det = True
        for _ in range(args.samples):
            u, w = magic.random_pair(ctx, rng)
            fac = magic.magic_factor(ctx, u, w)
            ok_id &= fac.identity_ok
            ok_iw &= iwahori_member(fac.k, 1, strict=False) and iwahori_member(fac.k_prime, 1, strict=False)
            ok_det &= magic.det_congruence_ok(ctx, fac)
        checks += [
            _check("identity", ok_id, "t^-1 j(w)^-1 H_v u t = j(k') H_(v+1) k", samples=args.samples),
            _check("iwahori", ok_iw, "k, k' in the Iwahori subgroup of level 1"),
            _check("det", ok_det, "det(k) det(k') = 1 mod ϖ^(v+1)"),
        ]
        return {"n": args.n, "p": args.p, "f": args.f, "v": args.v, "samples": args.samples}, checks
    img = magic.det_map_image(ctx)
    sizes = set(img.values())
    surj = len(img) == ring.q
    checks.append(_check("surjective", surj, "det(k_(u,w)) hits every class of (1+ϖ^v)/(1+ϖ^(v+1))"))
    checks.append(_check("uniform", len(sizes) == 1, "fibers of the det map have equal size"))
    return {"image": {",".join(map(str, k)): c for k, c in sorted(img.items())}}, checks


def cmd_hecke(args) -> tuple[dict, list]:
    if args.action == "poly":
        hp = hecke.hecke_polynomial(args.n, args.q)
        return {"polynomial": str(hp), "coefficients": [str(c) for c in hp.coeffs]}, []
    ring = _ring(args, args.p, args.f)
    ctx = MagicContext(args.n, ring)
    V, Vp = hecke.decompose_V(ctx), hecke.decompose_V_prime(ctx)
    checks = [
        _check("count_V", len(V.reps) == hecke.index_formula(ring.q, args.n + 1), "#reps(V) = index formula"),
        _check("count_V_prime", len(Vp.reps) == hecke.index_formula(ring.q, args.n), "#reps(V') = index formula"),
        _check("disjoint", hecke.check_disjoint(V) and hecke.check_disjoint(Vp), "representatives lie in distinct cosets"),
    ]
    return {"reps_V": len(V.reps), "reps_V_prime": len(Vp.reps)}, checks


def cmd_char(args) -> tuple[dict, list]:
    _guard(args.p**args.v <= characters.TOWER_GUARD, "modulus exceeds the tower guard")
    chars = characters.primitive_characters(args.p, args.v)
    ok = True
    for chi in chars:
        K = chi.field()
        ok &= characters.gauss_sum(chi, K) * characters.gauss_sum(chi.conj(), K) == K(chi.sign() * chi.modulus)
    res = {"modulus": args.p**args.v, "primitive": len(chars), "characters": [c.to_json() for c in chars]}
    return res, [_check("gauss_norm", ok, "G(χ) G(χ̄) = χ(-1) N(f)", count=len(chars))]


def _provider(args):
    if args.provider == "constant":
        return measure.constant_provider(args.n, args.p, precision=args.precision or 30)
    if args.provider == "synthetic":
        return measure.synthetic_provider(args.n, args.p, args.vmax, seed=args.seed, precision=args.precision or 30)
    if args.provider == "slope":
        return measure.slope_provider(args.n, args.p, args.slope, args.vmax, precision=args.precision or 30)
    raise GuardViolation(f"unknown provider {args.provider}")


def cmd_measure(args) -> tuple[dict, list]:
    guard = magic.max_enum()
    _guard(args.p**args.vmax <= guard, f"{args.p}^{args.vmax} cells exceed the guard {guard}")
    prov = _provider(args)
    d = measure.build_distribution(prov, args.vmax)
    rel = measure.check_distribution_relation(d)
    if args.provider == "slope":
        slope = Fraction(args.slope)
    else:
        slope = valuation_in(prov.coeff, prov.kappa, args.p)
    bnd = measure.check_boundedness(d, slope)
    checks = [
        _check("A3", measure.check_A3(prov, 1, measure.cells(args.p, 1)[0]), "κ P(h t^v, t'^v, x) = I Σ P(h t^v u t, t'^v w t', x)"),
        _check("distribution_relation", rel.ok, "μ(x + p^v) = Σ_a μ(x + a p^v + p^(v+1))", cells=rel.checked),
    ]
    if args.provider != "synthetic":
        checks.append(_check("growth", bnd.ok, "min v(μ) >= c - s·v"))
    res = {"distribution": d.to_json(), "boundedness": bnd.to_json()} if args.full else {"boundedness": bnd.to_json(), "kappa": str(prov.kappa)}
    return res, checks


def cmd_gl2(args) -> tuple[dict, list]:
    from .gl2 import backend as B
    from .gl2.manin import build_space

    if args.action == "build":
        _guard(args.N * (args.k - 1) <= 5000, "space too large")
        sp = build_space(args.N, args.k)
        res = {"N": args.N, "k": args.k, "dim": sp.dim, "cuspidal_dim": sp.cuspidal_dim, "cusps": sp.cusp_count}
        q = next(q for q in (2, 3, 5, 7, 11, 13) if args.N % q)
        res[f"T{q}_cuspidal_eigenvalues"] = [str(x) for x in B.cuspidal_eigenvalues(sp, q)]
        return res, []
    es = B.newform_11a(args.sign) if args.form == "11a" else B.delta_symbol(args.sign)
    st = B.stabilize(es, args.p, args.root)
    if args.action == "stabilize":
        chk = B.check_u_p(st)
        res = {"a_p": str(st.a_p), "alpha": str(st.alpha), "slope": str(st.slope), "ordinary": st.ordinary}
        return res, [
            _check("descends", chk.well_defined, "φ_α defines a symbol at level Np"),
            _check("u_p_eigen", chk.eigen, "φ_α U_p = α φ_α"),
        ]
    if args.action == "measure":
        d = measure.build_distribution(B.provider(st), args.vmax)
        rel = measure.check_distribution_relation(d)
        bnd = measure.check_boundedness(d, st.slope)
        return {"boundedness": bnd.to_json(), "alpha": str(st.alpha)}, [
            _check("distribution_relation", rel.ok, "μ(x + p^v) = Σ_a μ(x + a p^v + p^(v+1))", cells=rel.checked),
            _check("growth", bnd.ok, "min v(μ) >= c - slope·v"),
        ]
    # lvalue: characters of conductor p^v
    from .fields import CyclotomicField

    d = measure.build_distribution(B.provider(st), args.v)
    rows = []
    ok = True
    for chi in characters.primitive_characters(args.p, args.v):
        K = CyclotomicField(chi.field().M, st.coeff)
        lhs = measure.integrate_character(d, chi, target=K)[0]
        c = characters.interpolation_constant(chi, Fraction(1, 2), Fraction(1, 2), 1 / st.alpha, 1, field=K)
        rhs = c.total * B.algebraic_L(es, chi.conj(), 0, K)
        ok &= lhs == rhs
        rows.append({"character": chi.to_json(), "integral": lhs.to_json(), "L": B.algebraic_L(es, chi.conj(), 0, CyclotomicField(chi.field().M)).to_json()})
    return {"values": rows}, [_check("interpolation", ok, "∫χ dμ = c(χ, s) L(f, χ̄)")]


def cmd_zeta(args) -> tuple[dict, list]:
    F, r = zeta_local.sqrt_field(args.q)
    alpha, beta = Fraction(args.alpha), Fraction(args.beta)
    datum = zeta_local.UnramifiedDatum(args.q, alpha, beta, Fraction(args.chi))
    res = zeta_local.local_integral(datum, args.T)
    out = res.to_json()
    if args.s is not None:
        out["value"] = _enc(zeta_local.evaluate(datum, Fraction(args.s)))
    return out, [_check("l_factor", res.certified, "Σ W(m) χ^m q^(-m(s-1/2)) = L(s, π × χ)", matched_degree=res.matched_degree)]


HANDLERS = {
    "weights": cmd_weights,
    "magic": cmd_magic,
    "hecke": cmd_hecke,
    "char": cmd_char,
    "measure": cmd_measure,
    "gl2": cmd_gl2,
    "zeta": cmd_zeta,
}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    def flags(top: bool) -> argparse.ArgumentParser:
        # subcommand copies must not overwrite values given before the subcommand
        d = (lambda x: x) if top else (lambda x: argparse.SUPPRESS)
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--precision", type=int, default=d(None), help="p-adic precision cap N")
        g.add_argument("--seed", type=int, default=d(0))
        g.add_argument("--out", default=d(None), help="output file (default stdout)")
        g.add_argument("--format", choices=("json", "csv"), default=d("json"))
        return g

    common = flags(False)
    ap = argparse.ArgumentParser(prog="rspadic", parents=[flags(True)], description=__doc__)
    sub = ap.add_subparsers(dest="group", required=True)

    w = sub.add_parser("weights", parents=[common]).add_subparsers(dest="action", required=True)
    wa = w.add_parser("analyze", parents=[common])
    wa.add_argument("--input", default=None, help="JSON file with field, mu, nu")
    wa.add_argument("--example", choices=("phantom", "rational"), default="rational")

    m = sub.add_parser("magic", parents=[common]).add_subparsers(dest="action", required=True)
    for name in ("factor", "detmap"):
        mp = m.add_parser(name, parents=[common])
        mp.add_argument("--n", type=int, default=1)
        mp.add_argument("--p", type=int, default=2)
        mp.add_argument("--f", type=int, default=1)
        mp.add_argument("--v", type=int, default=1)
        mp.add_argument("--samples", type=int, default=20)

    h = sub.add_parser("hecke", parents=[common]).add_subparsers(dest="action", required=True)
    hd = h.add_parser("decompose", parents=[common])
    hd.add_argument("--n", type=int, default=1)
    hd.add_argument("--p", type=int, default=2)
    hd.add_argument("--f", type=int, default=1)
    hp = h.add_parser("poly", parents=[common])
    hp.add_argument("--n", type=int, default=1)
    hp.add_argument("--q", type=int, default=2)

    c = sub.add_parser("char", parents=[common]).add_subparsers(dest="action", required=True)
    cg = c.add_parser("gauss", parents=[common])
    cg.add_argument("--p", type=int, default=3)
    cg.add_argument("--v", type=int, default=1)

    me = sub.add_parser("measure", parents=[common]).add_subparsers(dest="action", required=True)
    mc = me.add_parser("check", parents=[common])
    mc.add_argument("--provider", choices=("constant", "synthetic", "slope"), default="constant")
    mc.add_argument("--n", type=int, default=1)
    mc.add_argument("--p", type=int, default=3)
    mc.add_argument("--vmax", type=int, default=3)
    mc.add_argument("--slope", type=int, default=1)
    mc.add_argument("--full", action="store_true", help="include every cell value")

    g = sub.add_parser("gl2", parents=[common]).add_subparsers(dest="action", required=True)
    gb = g.add_parser("build", parents=[common])
    gb.add_argument("--N", type=int, default=11)
    gb.add_argument("--k", type=int, default=2)
    for name in ("stabilize", "measure", "lvalue"):
        gp = g.add_parser(name, parents=[common])
        gp.add_argument("--form", choices=("11a", "delta"), default="11a")
        gp.add_argument("--sign", type=int, choices=(1, -1), default=1)
        gp.add_argument("--p", type=int, default=3)
        gp.add_argument("--root", choices=("unit", "other"), default="unit")
        if name == "measure":
            gp.add_argument("--vmax", type=int, default=3)
        if name == "lvalue":
            gp.add_argument("--v", type=int, default=1, help="conductor exponent of the characters")

    z = sub.add_parser("zeta", parents=[common]).add_subparsers(dest="action", required=True)
    zl = z.add_parser("local", parents=[common])
    zl.add_argument("--q", type=int, required=True)
    zl.add_argument("--alpha", required=True)
    zl.add_argument("--beta", required=True)
    zl.add_argument("--chi", default="1")
    zl.add_argument("--s", default=None)
    zl.add_argument("--T", type=int, default=30)
    return ap


# ---------------------------------------------------------------------------
# output


def _to_csv(report: dict) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["check", "ok", "identity", "anchor"])
    for c in report["checks"]:
        wr.writerow([c["name"], c["ok"], c["identity"], c["anchor"]])
    return buf.getvalue()


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".rspadic-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}
    try:
        result, checks = HANDLERS[args.group](args)
    except (GuardViolation, EnumerationGuardError, FactorizationError, ValueError, NotImplementedError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "config": config}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return EXIT_GUARD
    report = {"config": config, "result": _enc(result), "checks": checks, "ok": all(c["ok"] for c in checks)}
    text = _to_csv(report) if args.format == "csv" else json.dumps(report, sort_keys=True, indent=2) + "\n"
    _write(text, args.out)
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
