"""Batch command-line front end.

Subcommands: construct, homology, degree, invariant, cylinder,
emit-instance, oracle, verify, selftest.  All outputs are deterministic;
reports echo the command, input digests, and the certificates used
(regular values, bounds, witness vectors).  Exit codes: 0 success /
extendable, 1 refuted, 2 inconclusive, >= 3 usage or internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from fractions import Fraction


def _out_dir(args) -> str:
    d = args.out or "."
    os.makedirs(d, exist_ok=True)
    return d


def _write(args, name, text) -> str:
    path = os.path.join(_out_dir(args), name)
    with open(path, "w") as fh:
        fh.write(text)
    print(f"wrote {path} ({hashlib.sha256(text.encode()).hexdigest()[:12]})")
    return path


def _apply_budget(args):
    if getattr(args, "budget", None):
        os.environ["WFORGE_BUDGET"] = str(args.budget)


def cmd_construct(args):
    from .complexes import geometric_sphere, product_sphere
    from .formats import emit_scx, emit_smap
    from .plmaps import degree_map
    from .whitehead import WhiteheadSpec, whitehead_family

    _apply_budget(args)
    if args.what == "sphere":
        gc = geometric_sphere(args.k)
        _write(args, f"sphere_{args.k}.scx", emit_scx(gc))
        return 0
    if args.what == "product-sphere":
        ps = product_sphere(args.l)
        _write(args, f"product_{args.l}.scx", emit_scx(ps.product))
        bc = ps.boundary.as_complex()
        _write(args, f"product_boundary_{args.l}.scx", emit_scx(bc, None))
        return 0
    if args.what == "degree":
        m = degree_map(args.coef, args.l)
        src = _write(args, f"hat{args.coef}_l{args.l}_src.scx", emit_scx(m.source.geometric()))
        dst = _write(args, f"hat{args.coef}_l{args.l}_dst.scx", emit_scx(m.target.geometric()))
        from .formats import emit_smap

        _write(
            args,
            f"hat{args.coef}_l{args.l}.smap",
            emit_smap_from(m, os.path.basename(src), os.path.basename(dst)),
        )
        return 0
    if args.what == "whitehead":
        spec = WhiteheadSpec(args.l, args.kind, args.coef)
        m = whitehead_family(spec)
        src = _write(
            args, f"{args.kind}{args.coef}_l{args.l}_src.scx", emit_scx(m.source.geometric())
        )
        dst = _write(
            args, f"{args.kind}{args.coef}_l{args.l}_dst.scx", emit_scx(m.target.geometric())
        )
        from .plmaps import simplicial_approximation

        approx = simplicial_approximation(m)
        _write(
            args,
            f"{args.kind}{args.coef}_l{args.l}.smap",
            emit_smap_from(approx, os.path.basename(src), os.path.basename(dst)),
        )
        return 0
    print(f"unknown construction {args.what!r}", file=sys.stderr)
    return 3


def emit_smap_from(m, src_name, dst_name):
    from .formats import emit_smap
    from .plmaps import SimplicialMap

    sm = SimplicialMap(m.source_complex, m.target_complex, m.assignment)
    return emit_smap(sm, src_name, dst_name)


def cmd_homology(args):
    from .formats import parse_scx
    from .homology import homology_groups

    with open(args.file) as fh:
        cx = parse_scx(fh.read())
    print(homology_groups(cx))
    return 0


def cmd_degree(args):
    from .plmaps import degree_map
    from .invariants import degree_of

    m = degree_map(args.coef, args.l)
    d = degree_of(m)
    print(f"degree {d} (two independent regular values agree)")
    return 0


def cmd_invariant(args):
    from .invariants import composite_invariant, hopf_like
    from .whitehead import WhiteheadSpec, whitehead_family

    _apply_budget(args)
    t0 = time.time()
    if args.mode == "degree":
        return cmd_degree(args)
    kind = "W" if args.mode == "hopf" else "W2"
    m = whitehead_family(WhiteheadSpec(args.l, kind, args.coef))
    val = hopf_like(m, "H" if args.mode == "hopf" else "H_vee")
    name = "H" if args.mode == "hopf" else "H_vee"
    print(f"{name}({kind}({args.coef})) = {val}")
    print(f"certificate: two regular value pairs agreed; wall {time.time() - t0:.1f}s")
    return 0


def cmd_cylinder(args):
    from .cylinder import mapping_cylinder
    from .formats import emit_scx
    from .homology import homology_groups
    from .plmaps import degree_map, validate_simplicial_map

    m = degree_map(args.coef, args.l)
    g = validate_simplicial_map(m.source_complex, m.target_complex, m.assignment)
    trip = mapping_cylinder(g)
    _write(args, f"cyl_hat{args.coef}_l{args.l}.scx", emit_scx(trip.cylinder, None))
    print(homology_groups(trip.cylinder))
    return 0


def _system_from_args(args):
    from .reduction import DiophantineSystem, index_pairs

    coeffs = [int(x) for x in args.a.split(",")]
    b = [int(x) for x in args.b.split(",")]
    m = len(b)
    pairs = index_pairs(args.s)
    per_q = len(pairs)
    if len(coeffs) == per_q * m:
        rows = [
            {pairs[i]: coeffs[q * per_q + i] for i in range(per_q)} for q in range(m)
        ]
    elif len(coeffs) == m:
        rows = [{pairs[0]: coeffs[q]} for q in range(m)]
    else:
        raise SystemExit(f"need {per_q * m} or {m} coefficients, got {len(coeffs)}")
    return DiophantineSystem.make(args.flavor, args.s, m, rows, b)


def cmd_oracle(args):
    from .reduction import oracle_solve

    sys_ = _system_from_args(args)
    r = oracle_solve(sys_, args.bound)
    print(f"status: {r.status}")
    if r.x is not None:
        print(f"witness x = {r.x}" + (f", y = {r.y}" if r.y else ""))
    if r.certificate:
        print(f"certificate: {r.certificate}")
    print(f"assignments searched: {r.searched}")
    return {"witness": 0, "exhausted": 1, "parity-refuted": 1, "overflow": 2}[r.status]


def cmd_emit_instance(args):
    from .formats import emit_xti
    from .reduction import compile_instance

    _apply_budget(args)
    sys_ = _system_from_args(args)
    inst = compile_instance(sys_, args.l, args.kind)
    name = f"instance_{args.flavor.replace(chr(39), 'p')}_{args.kind}.xti"
    _write(args, name, emit_xti(inst))
    return 0


def cmd_verify(args):
    from .formats import parse_xti
    from .reduction import compile_instance, verify_instance

    _apply_budget(args)
    if args.file:
        with open(args.file) as fh:
            _X, _A, _beta, _Y, system, l, kind = parse_xti(fh.read())
        inst = compile_instance(system, l, kind)
    else:
        inst = compile_instance(_system_from_args(args), args.l, args.kind)
    v = verify_instance(inst, args.bound)
    print(f"verdict: {v.status}")
    print(f"report: {v.report}")
    if v.invariants:
        print(f"invariant pairs per sphere: {v.invariants}")
    return v.exit_code


def cmd_selftest(args):
    from .complexes import sphere_complex
    from .homology import homology_groups, profile_of_sphere
    from .invariants import degree_of, hopf_like
    from .plmaps import degree_map, pinch_sum
    from .whitehead import WhiteheadSpec, whitehead_family

    t0 = time.time()
    checks = []
    for k in range(5):
        checks.append((f"S^{k} homology", homology_groups(sphere_complex(k)) == profile_of_sphere(k)))
    for k in (-2, 0, 3):
        checks.append((f"degree hat{k}", degree_of(degree_map(k, 2)) == k))
    s = pinch_sum(degree_map(2, 2), degree_map(1, 2))
    checks.append(("pinch additivity 2+1", degree_of(s) == 3))
    w = whitehead_family(WhiteheadSpec(2, "w"))
    checks.append(("|H_vee(w)| = 1", abs(hopf_like(w, "H_vee")) == 1))
    W1 = whitehead_family(WhiteheadSpec(2, "W", 1))
    checks.append(("|H(W(1))| = 2", abs(hopf_like(W1, "H")) == 2))
    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok = ok and passed
    print(f"selftest {'passed' if ok else 'FAILED'} in {time.time() - t0:.1f}s")
    return 0 if ok else 4


def build_parser():
    p = argparse.ArgumentParser(prog="wforge", description=__doc__)
    p.add_argument("--out", help="output directory", default=None)
    p.add_argument("--budget", type=int, help="facet budget (WFORGE_BUDGET)", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="emit SCX/SMAP files for standard objects")
    c.add_argument("what", choices=["sphere", "product-sphere", "degree", "whitehead"])
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--l", type=int, default=2)
    c.add_argument("--coef", type=int, default=1)
    c.add_argument("--kind", choices=["w", "W2", "W"], default="w")
    c.set_defaults(func=cmd_construct)

    h = sub.add_parser("homology", help="homology profile of an SCX file")
    h.add_argument("file")
    h.set_defaults(func=cmd_homology)

    d = sub.add_parser("degree", help="degree of the standard degree-k map")
    d.add_argument("--coef", type=int, required=True)
    d.add_argument("--l", type=int, default=2)
    d.set_defaults(func=cmd_degree)

    i = sub.add_parser("invariant", help="degree / Hopf / wedge invariants")
    i.add_argument("mode", choices=["degree", "hopf", "wedge"])
    i.add_argument("--coef", type=int, default=1)
    i.add_argument("--l", type=int, default=2)
    i.set_defaults(func=cmd_invariant)

    cy = sub.add_parser("cylinder", help="mapping cylinder of a winding map")
    cy.add_argument("--coef", type=int, default=2)
    cy.add_argument("--l", type=int, default=1)
    cy.set_defaults(func=cmd_cylinder)

    for name, fn in (("emit-instance", cmd_emit_instance), ("oracle", cmd_oracle), ("verify", cmd_verify)):
        e = sub.add_parser(name)
        if name == "verify":
            e.add_argument("file", nargs="?", default=None, help="XTI instance file")
        e.add_argument("--flavor", choices=["SYM", "SKEW", "SKEW'"], default="SYM")
        e.add_argument("--s", type=int, default=2)
        e.add_argument("--a", default="1", help="comma-separated coefficients")
        e.add_argument("--b", default="1", help="comma-separated targets")
        e.add_argument("--l", type=int, default=2)
        e.add_argument("--kind", choices=["extension", "retraction"], default="extension")
        e.add_argument("--bound", type=int, default=6)
        e.set_defaults(func=fn)

    st = sub.add_parser("selftest", help="run the desk-scale acceptance corpus")
    st.set_defaults(func=cmd_selftest)
    return p


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 3 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except Exception as e:  # surface module context, exit >= 3
        print(f"error [{type(e).__module__}.{type(e).__name__}]: {e}", file=sys.stderr)
        return 4


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
