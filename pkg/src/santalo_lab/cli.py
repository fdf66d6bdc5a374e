"""Command-line drivers: body generation, experiments, CSV/JSON/figure output.

Exit codes: 0 success, 1 numeric non-convergence, 2 input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import exact2d
from .bodies import (
    BodySpec,
    direction_from_angle,
    ellipse_chord_aligned,
    generate_body,
    write_body,
)
from .duality import polar, santalo_point, volume_product
from .errors import GeometryError, NoConvergence
from .experiments import (
    convexity_profile,
    ellipsoid_test,
    local_max_probe,
    symmetrization_flow,
    rigidity_certificate,
)
from .geometry import centroid, volume
from .symmetrization import steiner_snapshot, steiner_symmetral

from .bodies import _atomic_write


def _body_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--body", default="cube", help="body kind (see README)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--m", type=int, help="vertex count for polygon kinds")
    p.add_argument("--a", type=float, help="first semi-axis")
    p.add_argument("--b", type=float, help="second semi-axis")
    p.add_argument("--c-axis", type=float, dest="c_axis", help="third semi-axis")
    p.add_argument("--rot", type=float, help="rotation angle (2D ellipse)")
    p.add_argument("--npoints", type=int, help="point count for random kinds")
    p.add_argument("--subdivisions", type=int, help="icosphere subdivisions")
    p.add_argument("--file", help="body file for kind from-file")
    p.add_argument("--seed", type=int, default=0)


def _out_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--no-plot", action="store_true", help="skip figure output")
    p.add_argument("--rational", action="store_true",
                   help="exact rational 2D arithmetic (3D: ignored with a warning)")


def _direction_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--u-angle", type=float,
                   help="direction angle in radians (2D)")
    p.add_argument("--u", help="explicit direction, comma separated")


def _spec_from_args(args) -> BodySpec:
    params = {}
    mapping = {"m": args.m, "a": args.a, "b": args.b, "c": args.c_axis,
               "rot": args.rot, "npoints": args.npoints,
               "subdivisions": args.subdivisions, "path": args.file}
    for k, v in mapping.items():
        if v is not None:
            params[k] = v
    return BodySpec(args.body, args.dim, params, args.seed)


def _get_body(args):
    return generate_body(_spec_from_args(args))


def _get_direction(args, dim: int) -> np.ndarray:
    if args.u is not None:
        u = np.array([float(x) for x in args.u.split(",")])
        if len(u) != dim:
            raise GeometryError(f"direction needs {dim} coordinates")
        return u / np.linalg.norm(u)
    if args.u_angle is not None:
        if dim != 2:
            raise GeometryError("--u-angle only applies in dimension 2")
        return direction_from_angle(args.u_angle)
    u = np.zeros(dim)
    u[-1] = 1.0
    return u


def _write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating))
                    else x for x in row])
    _atomic_write(path, buf.getvalue())


def _write_summary(out_dir: str, command: str, params: dict, results: dict) -> None:
    payload = {"command": command, "params": params, "results": results}
    _atomic_write(os.path.join(out_dir, "summary.json"),
                  json.dumps(payload, indent=1, default=_jsonable))


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _body_csv(P, out_dir: str, name: str) -> None:
    _write_csv(os.path.join(out_dir, f"{name}.csv"),
               [f"x{i}" for i in range(P.dim)], [list(v) for v in P.vertices])


def _maybe_plot(args, fn, *fargs, **fkw) -> None:
    if not args.no_plot:
        fn(*fargs, **fkw)


def _rational_warning(args, dim: int) -> bool:
    if not args.rational:
        return False
    if dim != 2:
        print("warning: --rational applies to dimension 2 only; ignored",
              file=sys.stderr)
        return False
    return True


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    P = _get_body(args)
    os.makedirs(args.out, exist_ok=True)
    write_body(P, os.path.join(args.out, "body.json"))
    _body_csv(P, args.out, "body")
    _write_summary(args.out, "gen", vars_of(args),
                   {"dim": P.dim, "n_vertices": P.n_vertices,
                    "n_facets": P.n_facets, "volume": volume(P)})
    if not args.no_plot:
        from .plots import plot_bodies
        plot_bodies([P], ["body"], os.path.join(args.out, "body.png"))
    return 0


def cmd_product(args) -> int:
    P = _get_body(args)
    rep = volume_product(P)
    os.makedirs(args.out, exist_ok=True)
    results = {
        "volume": rep.body_volume,
        "polar_volume": rep.santalo.polar_volume,
        "santalo_point": list(rep.santalo.point),
        "product": rep.product,
        "ratio_to_ball": rep.ratio_to_ball,
        "iterations": rep.santalo.iterations,
        "residual": rep.santalo.residual,
    }
    if _rational_warning(args, P.dim):
        exact = exact2d.volume_product(P.vertices, rep.santalo.point)
        results["product"] = float(exact)
        results["product_exact"] = f"{exact.numerator}/{exact.denominator}"
    _write_csv(os.path.join(args.out, "product.csv"),
               ["volume", "polar_volume", "product", "ratio_to_ball"],
               [[rep.body_volume, rep.santalo.polar_volume,
                 results["product"], rep.ratio_to_ball]])
    _write_summary(args.out, "product", vars_of(args), results)
    if not args.no_plot:
        from .plots import plot_bodies
        Q = polar(P, rep.santalo.point)
        plot_bodies([P, Q], ["K", "K*"], os.path.join(args.out, "product.png"),
                    title=f"product = {results['product']:.6g}")
    return 0


def cmd_polar(args) -> int:
    P = _get_body(args)
    z = centroid(P) if args.z is None else \
        np.array([float(x) for x in args.z.split(",")])
    Q = polar(P, z)
    os.makedirs(args.out, exist_ok=True)
    write_body(Q, os.path.join(args.out, "polar.json"))
    _body_csv(Q, args.out, "polar")
    _write_summary(args.out, "polar", vars_of(args),
                   {"pole": list(map(float, z)), "polar_volume": volume(Q),
                    "n_vertices": Q.n_vertices})
    if not args.no_plot:
        from .plots import plot_bodies
        plot_bodies([P, Q], ["K", "K^z"], os.path.join(args.out, "polar.png"))
    return 0


def cmd_santalo(args) -> int:
    P = _get_body(args)
    res = santalo_point(P)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "santalo.csv"),
               ["coordinate", "value"],
               [[f"s{i}", v] for i, v in enumerate(res.point)])
    _write_summary(args.out, "santalo", vars_of(args),
                   {"point": list(res.point), "polar_volume": res.polar_volume,
                    "iterations": res.iterations, "residual": res.residual,
                    "converged": res.converged})
    return 0


def cmd_symmetrize(args) -> int:
    P = _get_body(args)
    u = _get_direction(args, P.dim)
    if args.t is not None:
        Q = steiner_snapshot(P, u, args.t)
        name = "snapshot"
    else:
        Q = steiner_symmetral(P, u)
        name = "symmetral"
    os.makedirs(args.out, exist_ok=True)
    write_body(Q, os.path.join(args.out, f"{name}.json"))
    _body_csv(Q, args.out, name)
    _write_summary(args.out, "symmetrize", vars_of(args),
                   {"direction": list(u), "t": args.t,
                    "volume_before": volume(P), "volume_after": volume(Q)})
    if not args.no_plot:
        from .plots import plot_bodies
        plot_bodies([P, Q], ["K", name], os.path.join(args.out, f"{name}.png"))
    return 0


def cmd_profile(args) -> int:
    P = _get_body(args)
    u = _get_direction(args, P.dim)
    prof = convexity_profile(P, u, args.grid)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "profile.csv"),
               ["t", "f", "volume"],
               list(zip(prof.t_grid, prof.f_values, prof.body_volumes)))
    _write_summary(args.out, "profile", vars_of(args),
                   {"direction": list(u),
                    "max_midpoint_violation": prof.max_midpoint_violation,
                    "evenness_defect": prof.evenness_defect,
                    "f_scale": prof.f_scale})
    if not args.no_plot:
        from .plots import plot_profile
        plot_profile(prof, os.path.join(args.out, "profile.png"))
    return 0


def cmd_certify(args) -> int:
    spec = _spec_from_args(args)
    if spec.kind == "ellipse":
        # chord-aligned discretization keeps the snapshot family exactly
        # affine, which the rigidity fit requires
        u = _get_direction(args, 2)
        P = ellipse_chord_aligned(spec.params.get("a", 2.0),
                                  spec.params.get("b", 1.0),
                                  spec.params.get("rot", 0.0), u,
                                  int(spec.params.get("m", 256)))
    else:
        P = generate_body(spec)
        u = _get_direction(args, P.dim)
    cert = rigidity_certificate(P, u, args.grid)
    os.makedirs(args.out, exist_ok=True)
    prof = cert.profile
    _write_csv(os.path.join(args.out, "certify.csv"),
               ["t", "f", "volume"],
               list(zip(prof.t_grid, prof.f_values, prof.body_volumes)))
    shear = None
    if cert.shear_fit is not None:
        shear = {"v": list(cert.shear_fit.v), "c": cert.shear_fit.c,
                 "residual": cert.shear_fit.residual}
    _write_summary(args.out, "certify", vars_of(args),
                   {"direction": list(u), "verdict": cert.verdict.value,
                    "f_convex": cert.f_convex, "f_even": cert.f_even,
                    "f_constant": cert.f_constant, "shear_fit": shear})
    if not args.no_plot:
        from .plots import plot_profile
        plot_profile(prof, os.path.join(args.out, "certify.png"),
                     title=cert.verdict.value)
    print(cert.verdict.value)
    return 0


def cmd_ellipsoid_test(args) -> int:
    P = _get_body(args)
    res = ellipsoid_test(P, args.num_directions, args.tol)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "ellipsoid_test.csv"),
               ["direction_index", "deviation"],
               [[i, d] for i, d in enumerate(res.deviations)])
    _write_summary(args.out, "ellipsoid-test", vars_of(args),
                   {"passed": res.passed,
                    "worst_direction": list(res.worst_direction),
                    "worst_deviation": res.worst_deviation})
    if not args.no_plot:
        from .plots import plot_deviations
        plot_deviations(res.deviations,
                        os.path.join(args.out, "ellipsoid_test.png"),
                        title="pass" if res.passed else "fail")
    print("pass" if res.passed else "fail")
    return 0


def cmd_flow(args) -> int:
    P = _get_body(args)
    trace = symmetrization_flow(P, args.steps, args.seed)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "flow.csv"),
               ["step", "product", "ball_distance"],
               [[r.step, r.product, r.ball_distance] for r in trace])
    _write_summary(args.out, "flow", vars_of(args),
                   {"steps_completed": trace[-1].step,
                    "final_product": trace[-1].product,
                    "final_ball_distance": trace[-1].ball_distance})
    if not args.no_plot:
        from .plots import plot_flow
        plot_flow(trace, os.path.join(args.out, "flow.png"))
    return 0


def cmd_probe(args) -> int:
    P = _get_body(args)
    rep = local_max_probe(P, args.family, args.budget, args.seed)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "probe.csv"),
               ["base_product", "best_product", "improvement"],
               [[rep.base_product, rep.best_product, rep.improvement]])
    _write_summary(args.out, "probe", vars_of(args),
                   {"base_product": rep.base_product,
                    "best_product": rep.best_product,
                    "improvement": rep.improvement,
                    "best_perturbation": rep.best_perturbation})
    return 0


def vars_of(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="santalo-lab")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, direction=False):
        p = sub.add_parser(name)
        _body_args(p)
        _out_args(p)
        if direction:
            _direction_args(p)
        p.set_defaults(func=fn)
        return p

    add("gen", cmd_gen)
    add("product", cmd_product)
    p = add("polar", cmd_polar)
    p.add_argument("--z", help="pole, comma separated (default: centroid)")
    add("santalo", cmd_santalo)
    p = add("symmetrize", cmd_symmetrize, direction=True)
    p.add_argument("--t", type=float, help="snapshot parameter in [-1, 1]")
    p = add("profile", cmd_profile, direction=True)
    p.add_argument("--grid", type=int, default=21)
    p = add("certify", cmd_certify, direction=True)
    p.add_argument("--grid", type=int, default=21)
    p = add("ellipsoid-test", cmd_ellipsoid_test)
    p.add_argument("--num-directions", type=int, default=16)
    p.add_argument("--tol", type=float, default=5e-3)
    p = add("flow", cmd_flow)
    p.add_argument("--steps", type=int, default=50)
    p = add("probe", cmd_probe)
    p.add_argument("--family", default="VertexCuts",
                   choices=["VertexCuts", "VertexMoves"])
    p.add_argument("--budget", type=int, default=200)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
