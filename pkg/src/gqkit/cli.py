"""Command-line driver.

Subcommands: build, verify, enumerate-subgqs, ovoid-report, decompose,
export, import.  Reports are JSON with ``report_v`` 1; the exit code is 0
only when every assertion passes.  The worker count comes from
``--workers`` or the ``GQKIT_WORKERS`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import coverings as cov
from .constructions.quadrics import build_elliptic, build_parabolic
from .constructions.tits import build_tits_t2
from .galois import make_field
from .incidence import GeometryError, Morphism, export_geometry, import_geometry, validate_gq
from .subtension import (
    OmegaClass,
    SubtensionError,
    exterior_points,
    special_line_analysis,
    subtended_ovoid,
    subtension_multiplicity,
    translation_ovoid_certificate,
)
from .suites import SUITES, SuiteConfig, Report, _jsonable, context, default_workers, run_suite


def _config(args, suite: str = "") -> SuiteConfig:
    return SuiteConfig(
        suite=suite,
        q=args.q,
        sigma=args.sigma,
        m=args.m,
        exhaustive=getattr(args, "exhaustive", False),
        workers=args.workers if args.workers else default_workers(),
        seed=args.seed,
        samples=getattr(args, "samples", None),
        output=getattr(args, "json", None),
    )


def _emit(obj: dict, path: str | None):
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=False)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)


def _build(kind: str, q: int, sigma: int, m: int | None, args):
    if kind == "parabolic":
        return build_parabolic(make_field(*_pq(q)))[0]
    if kind == "elliptic":
        return build_elliptic(make_field(*_pq(q)))[0]
    if kind == "kantor-knuth":
        return context(_config(args)).G
    if kind == "tits":
        from .constructions.tits import CONIC_Q3

        if q != 3:
            raise SystemExit("the tits builder ships the q = 3 conic only")
        return build_tits_t2(make_field(3, 1), CONIC_Q3)[0]
    raise SystemExit(f"unknown geometry kind {kind!r}")


def _pq(q: int):
    cfg = SuiteConfig("", q=q)
    return cfg.p, cfg.h


def cmd_build(args) -> int:
    t = time.perf_counter()
    g = _build(args.kind, args.q, args.sigma, args.m, args)
    out = {"report_v": 1, "kind": args.kind, "q": args.q, "points": g.P, "lines": g.L,
           "seconds": round(time.perf_counter() - t, 3)}
    if args.validate:
        r = validate_gq(g, exhaustive=True if args.exhaustive else None, seed=args.seed)
        out["gq"] = r.to_dict()
    if args.out:
        export_geometry(g, args.out)
        out["written"] = args.out
    _emit(out, args.json)
    return 0 if out.get("gq", {"is_gq": True})["is_gq"] else 1


def cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    reports = [run_suite(_config(args, n)) for n in names]
    if len(reports) == 1:
        _emit(reports[0].to_dict(), args.json)
    else:
        _emit({"report_v": 1, "passed": all(r.passed for r in reports), "suites": [r.to_dict() for r in reports]}, args.json)
    return 0 if all(r.passed for r in reports) else 1


def cmd_enumerate(args) -> int:
    ctx = context(_config(args))
    t = time.perf_counter()
    c = ctx.census
    out = {
        "report_v": 1,
        "q": args.q,
        "seed": args.seed,
        "subgqs": len(c.handles),
        "grids": c.n_grids,
        "escaped": c.escaped,
        "omega_counts": c.omega_counts,
        "seconds": round(time.perf_counter() - t, 3),
    }
    if args.list:
        out["handles"] = [{"index": h.index, "omega": h.omega.value, "multiplicity": h.multiplicity,
                           "first_points": h.points[:4].tolist()} for h in c.handles]
    _emit(out, args.json)
    return 0 if c.escaped == 0 else 1


def cmd_ovoid_report(args) -> int:
    ctx = context(_config(args))
    h = ctx.h1 if args.omega == 1 else ctx.h2
    G = ctx.G
    ext = exterior_points(G, h.sub)
    x = int(ext[0]) if args.point is None else int(args.point)
    O = subtended_ovoid(G, h.sub, x)
    theta, subs = subtension_multiplicity(G, h.sub, O)
    on = G.line(ctx.I)
    u = int(on[G.col[x, on]][0])
    O.special_point = u
    cert = translation_ovoid_certificate(G, h.sub, x, ctx.I, T=ctx.translation(u))
    out = {
        "report_v": 1,
        "omega": h.omega.value,
        "point": x,
        "ovoid_size": len(O),
        "multiplicity": theta,
        "subtenders": subs,
        "special_point": u,
        "translation_certificate": {"valid": cert.valid, "order": cert.order, "orbit": cert.orbit_size},
    }
    if args.omega == 1:
        from .subtension import embed_subgq

        emb = ctx.emb1 if h is ctx.h1 else embed_subgq(h, ctx.field)
        out["special_lines"] = special_line_analysis(emb, O, u, ctx.I).to_dict()
    _emit(out, args.json)
    return 0 if cert.valid else 1


def _read_ints(path: str) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        return np.array([int(v) for v in fh.read().split()], dtype=np.int64)


def cmd_decompose(args) -> int:
    ctx = context(_config(args))
    E = ctx.E1 if args.omega == 1 else ctx.E2
    if args.write_sample:
        el = ctx.q1_stabilizer_sample[args.sample_index % len(ctx.q1_stabilizer_sample)]
        gam = cov.cover_from_automorphism(E, el)
        np.savetxt(args.cover_points, gam.point_map, fmt="%d")
        np.savetxt(args.cover_lines, gam.line_map, fmt="%d")
    try:
        gam = Morphism(E.affine.geometry, E.geometry, _read_ints(args.cover_points), _read_ints(args.cover_lines))
        res = cov.decompose(E, gam, ctx.I)
        out = {"report_v": 1, "seed": args.seed, **res.to_dict()}
        if not args.full:
            out.pop("alpha_points")
            out.pop("abar_points")
        code = 0 if res.ok else 1
    except (cov.CoverError, GeometryError, OSError) as exc:
        out = {"report_v": 1, "ok": False, "error": f"{type(exc).__name__}: {exc}"}
        code = 1
    _emit(out, args.json)
    return code


def cmd_export(args) -> int:
    g = _build(args.kind, args.q, args.sigma, args.m, args)
    export_geometry(g, args.out)
    _emit({"report_v": 1, "written": args.out, "points": g.P, "lines": g.L}, args.json)
    return 0


def cmd_import(args) -> int:
    try:
        g = import_geometry(args.path)
    except (GeometryError, OSError) as exc:
        _emit({"report_v": 1, "ok": False, "error": f"{type(exc).__name__}: {exc}"}, args.json)
        return 2
    out = {"report_v": 1, "ok": True, "points": g.P, "lines": g.L}
    if args.validate:
        out["gq"] = validate_gq(g, exhaustive=True if args.exhaustive else None, seed=args.seed).to_dict()
    _emit(out, args.json)
    return 0


def _common(p: argparse.ArgumentParser):
    p.add_argument("--q", type=int, default=9)
    p.add_argument("--sigma", type=int, default=1, help="sigma = x -> x^(p^k); k = 0 is the classical case")
    p.add_argument("--m", type=int, default=None, help="nonsquare override (default: smallest nonsquare)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--exhaustive", action="store_true", help="force full pair scans")
    p.add_argument("--json", default=None, help="also write the report here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gqkit", description="Generalized quadrangles, subquadrangles and covers.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("build", help="build a geometry and optionally validate it")
    p.add_argument("--kind", choices=["parabolic", "elliptic", "kantor-knuth", "tits"], default="kantor-knuth")
    p.add_argument("--out", default=None)
    p.add_argument("--validate", action="store_true")
    _common(p)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("verify", help="run a named suite")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], required=True)
    p.add_argument("--samples", type=int, default=None)
    _common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("enumerate-subgqs", help="census of order-q subquadrangles on the special line")
    p.add_argument("--list", action="store_true")
    _common(p)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("ovoid-report", help="report on one subtended ovoid")
    p.add_argument("--omega", type=int, choices=[1, 2], default=1)
    p.add_argument("--point", type=int, default=None, help="exterior point (default: the first)")
    _common(p)
    p.set_defaults(fn=cmd_ovoid_report)

    p = sub.add_parser("decompose", help="factor a cover A -> E given as point and line map files")
    p.add_argument("--cover-points", required=True)
    p.add_argument("--cover-lines", required=True)
    p.add_argument("--omega", type=int, choices=[1, 2], default=1)
    p.add_argument("--write-sample", action="store_true", help="first write a cover induced by a sampled automorphism")
    p.add_argument("--sample-index", type=int, default=0)
    p.add_argument("--full", action="store_true", help="include the full permutations")
    _common(p)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("export", help="write a geometry in the canonical text format")
    p.add_argument("--kind", choices=["parabolic", "elliptic", "kantor-knuth", "tits"], default="kantor-knuth")
    p.add_argument("--out", required=True)
    _common(p)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("import", help="read a geometry file")
    p.add_argument("path")
    p.add_argument("--validate", action="store_true")
    _common(p)
    p.set_defaults(fn=cmd_import)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return int(args.fn(args))


if __name__ == "__main__":
    sys.exit(main())
