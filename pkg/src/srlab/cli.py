"""Command-line interface: scene validation, reports, sweeps, and checks.

Exit codes: 0 success, 2 usage error, 3 validation failure, 4 numerical
failure. All floating-point output uses shortest round-trip formatting
(Python repr), so identical invocations produce byte-identical text.
"""

import argparse
import json
import sys

import numpy as np

from . import curvature as cv
from . import measures as ms
from .errors import NumericalError, ValidationError
from .frame import ConnectionFormsL, SF_KEYS, koszul_connection_oracle, scaled_form_deviation, validate_model
from .scenes import BUILTIN_SCENES, resolve_scene
from .surface import SurfaceGeometry

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


def _fmt(x) -> str:
    return repr(float(x))


def _parse_pair(text: str, what: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"{what} must be two comma-separated numbers, got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_L_list(text: str):
    values = tuple(float(p) for p in text.split(",") if p.strip())
    if not values:
        raise ValueError("expected at least one L value")
    if any(L <= 0 for L in values):
        raise ValueError("L values must be positive")
    return values


def _write_lines(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    scene = resolve_scene(args.scene)
    uu, vv = ms.region_scan_grid(scene.region, samples=15)
    points = scene.patch.point(uu, vv)
    report = validate_model(scene.model, points)

    lines = [
        f"scene {scene.name or '(inline)'}: region {scene.region.kind} "
        f"(chi {scene.region.chi}), {len(scene.boundary)} boundary curve(s)"
    ]
    failed = []
    lines.append(f"model checks at {uu.size} region grid points:")
    for key, entry in report.items():
        word = "pass" if entry["passed"] else "FAIL"
        bound = "min" if entry["kind"] == "min" else "max"
        lines.append(
            f"  {key}: {bound} {_fmt(entry['value'])} "
            f"(tolerance {_fmt(entry['tolerance'])}): {word}"
        )
        if not entry["passed"]:
            failed.append(key)

    fr = scene.model.frame(points, order=3)
    sfv = fr.sf_values()
    lines.append("structure functions over the grid (min, max):")
    for key in SF_KEYS:
        vals = np.asarray(sfv[key])
        lines.append(f"  {key}: ({_fmt(np.min(vals))}, {_fmt(np.max(vals))})")

    geom = SurfaceGeometry(scene.model, scene.patch, uu, vv)
    margin = np.min(np.asarray(geom.margin))
    lines.append(f"characteristic margin over the region: min {_fmt(margin)}")
    for i, curve in enumerate(scene.boundary):
        t = np.linspace(curve.t0, curve.t1, 32, endpoint=False)
        ju, jv = curve.jets(t, order=0)
        dist = scene.region.boundary_distance(np.asarray(ju.value), np.asarray(jv.value))
        lines.append(f"boundary curve {i}: max distance to region edge {_fmt(np.max(dist))}")

    lines.append("validation: " + ("ok" if not failed else "FAILED " + ", ".join(failed)))
    _write_lines(lines, args.out)
    return EXIT_OK if not failed else EXIT_VALIDATION


def cmd_frame_report(args) -> int:
    scene = resolve_scene(args.scene)
    u, v = _parse_pair(args.uv, "--uv")
    geom = SurfaceGeometry(scene.model, scene.patch, u, v)
    fr = geom.frame
    forms = ConnectionFormsL(fr, args.L)

    lines = [f"scene {scene.name}: frame report at (u, v) = ({_fmt(u)}, {_fmt(v)})"]
    pt = [float(np.asarray(j.value)) for j in geom.phi]
    lines.append(f"chart point: ({', '.join(_fmt(c) for c in pt)})")
    lines.append(f"contact factor tau: {_fmt(np.asarray(fr.tau.value))}")
    lines.append(f"characteristic margin: {_fmt(geom.margin)}")
    sfv = fr.sf_values()
    lines.append("structure functions:")
    for key in SF_KEYS:
        lines.append(f"  {key}: {_fmt(np.asarray(sfv[key]))}")
    lines.append(f"connection form coefficients at L = {_fmt(args.L)}")
    lines.append("  (rows w_i^j; columns scaled duals e^1, e^2, sqrt(L) e^3):")
    vals = forms.values()
    for i, j in ((1, 2), (1, 3), (2, 3)):
        row = ", ".join(_fmt(vals[i - 1, j - 1, k]) for k in range(3))
        lines.append(f"  w{i}{j}: [{row}]")
    lines.append("scaled deviation from the limit forms:")
    for key, dev in scaled_form_deviation(fr, args.L).items():
        lines.append(f"  {key}: {_fmt(dev)}")
    lines.append(f"surface quantities: A = {_fmt(np.asarray(geom.A.value))}, "
                 f"area density = {_fmt(np.asarray(geom.wedge.value))}")
    _write_lines(lines, args.out)
    return EXIT_OK


def cmd_curvature(args) -> int:
    scene = resolve_scene(args.scene)
    u, v = _parse_pair(args.uv, "--uv")
    geom = SurfaceGeometry(scene.model, scene.patch, u, v)
    sample = cv.gauss_equation_decomposition(geom, args.L)

    lines = [
        f"scene {scene.name}: curvature at (u, v) = ({_fmt(u)}, {_fmt(v)}), "
        f"L = {_fmt(args.L)}",
        f"K_L: {_fmt(sample.K_L)}",
        f"K (limit): {_fmt(sample.K_limit)}",
        f"decomposition K_L = Kbar_L + II_L:",
        f"  Kbar_L: {_fmt(sample.Kbar_L)}",
        f"  II_L: {_fmt(sample.II_L)}",
        f"identity residual: {_fmt(sample.K_L - sample.Kbar_L - sample.II_L)}",
        f"gap |K_L - K|: {_fmt(abs(sample.K_L - sample.K_limit))}",
    ]
    _write_lines(lines, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scene = resolve_scene(args.scene)
    grid = _parse_L_list(args.L) if args.L else (scene.L_grid or (1e2, 1e3, 1e4))

    rows = []
    if args.quantity == "K":
        if args.uv is None:
            raise ValueError("--quantity K needs --uv")
        u, v = _parse_pair(args.uv, "--uv")
        geom = SurfaceGeometry(scene.model, scene.patch, u, v)
        limit = float(cv.gauss_curvature_limit(geom))
        rows.append(("L", "K_L", "K_limit", "abs_gap"))
        for L in grid:
            kl = float(cv.gauss_curvature_L(geom, L))
            rows.append((_fmt(L), _fmt(kl), _fmt(limit), _fmt(abs(kl - limit))))
    else:
        if args.t is None:
            raise ValueError("--quantity kn needs --t")
        if not scene.boundary:
            raise ValueError("scene has no boundary curves to sweep over")
        if not 0 <= args.curve < len(scene.boundary):
            raise ValueError(f"--curve must be in [0, {len(scene.boundary) - 1}]")
        curve = scene.boundary[args.curve]
        t = np.asarray([args.t])
        limit = float(cv.normal_curvature_limit(scene.model, scene.patch, curve, t)[0])
        rows.append(("L", "kn_L", "kn_limit", "abs_gap"))
        for L in grid:
            kn = float(cv.normal_curvature_L(scene.model, scene.patch, curve, t, L)[0])
            rows.append((_fmt(L), _fmt(kn), _fmt(limit), _fmt(abs(kn - limit))))

    _write_lines([",".join(row) for row in rows], args.out)
    return EXIT_OK


def cmd_gauss_bonnet(args) -> int:
    scene = resolve_scene(args.scene)
    grid = _parse_L_list(args.L) if args.L else scene.L_grid
    report = ms.gauss_bonnet_residual(scene, L_values=grid)

    def quad_result(res):
        return {
            "value": res.value,
            "error_estimate": res.error,
            "converged": res.converged,
            "refinements": res.refinements,
        }

    payload = {
        "scene": scene.name,
        "euler_characteristic": report.chi,
        "area_integral": quad_result(report.area),
        "boundary_integrals": [quad_result(res) for res in report.boundary],
        "residual": report.residual,
        "finite_L": [
            {
                "L": row.L,
                "scaled_sum": row.scaled_sum,
                "target": row.target,
                "gap": row.gap,
                "area_part": row.area_part,
                "boundary_part": row.boundary_part,
            }
            for row in report.finite_rows
        ],
    }
    if "residual" in scene.tolerances:
        tol = scene.tolerances["residual"]
        scale = max(abs(report.area.value), 2.0 * np.pi)
        payload["residual_tolerance"] = tol * scale
        payload["residual_ok"] = bool(abs(report.residual) <= tol * scale)
    _write_lines([json.dumps(payload, indent=2)], args.out)
    if payload.get("residual_ok") is False:
        return EXIT_NUMERICAL
    return EXIT_OK


def _sample_region_points(region, n, rng):
    (u0, u1), (v0, v1) = region.bounding_box()
    uu, vv = [], []
    while len(uu) < n:
        u = rng.uniform(u0, u1)
        v = rng.uniform(v0, v1)
        if region.contains(u, v) and region.boundary_distance(u, v) > 1e-3:
            uu.append(u)
            vv.append(v)
    return np.asarray(uu), np.asarray(vv)


def cmd_oracle_check(args) -> int:
    scene = resolve_scene(args.scene)
    grid = _parse_L_list(args.L)
    rng = np.random.default_rng(args.seed)
    uu, vv = _sample_region_points(scene.region, args.samples, rng)
    points = scene.patch.point(uu, vv)
    geom = SurfaceGeometry(scene.model, scene.patch, uu, vv)
    fr = scene.model.frame(points, order=3)

    lines = [f"scene {scene.name}: oracle check at {args.samples} region points"]
    worst = 0.0
    for L in grid:
        lines.append(f"L = {_fmt(L)}:")
        gap_conn = float(np.max(np.abs(
            ConnectionFormsL(fr, L).values() - koszul_connection_oracle(fr, L))))
        lines.append(f"  connection forms vs Koszul formula: max gap {_fmt(gap_conn)}")
        worst = max(worst, gap_conn)

        kl = np.asarray(cv.gauss_curvature_L(geom, L))
        oracle = np.asarray(cv.induced_metric_gauss_oracle(geom, L))
        gap_k = float(np.max(np.abs(kl - oracle) / np.maximum(1.0, np.abs(oracle))))
        lines.append(f"  surface curvature vs induced-metric oracle: max relative gap {_fmt(gap_k)}")
        worst = max(worst, gap_k)

        for i, curve in enumerate(scene.boundary):
            t = rng.uniform(curve.t0, curve.t1, args.samples)
            kn = np.asarray(cv.normal_curvature_L(scene.model, scene.patch, curve, t, L))
            kg = np.asarray(cv.geodesic_curvature_oracle(scene.model, scene.patch, curve, t, L))
            gap_n = float(np.max(np.abs(kn - kg) / np.maximum(1.0, np.abs(kg))))
            lines.append(
                f"  boundary curvature vs geodesic-curvature oracle "
                f"(curve {i}): max relative gap {_fmt(gap_n)}"
            )
            worst = max(worst, gap_n)

    ok = worst <= args.tol
    lines.append(
        f"oracle check: {'ok' if ok else 'FAILED'} "
        f"(worst gap {_fmt(worst)}, tolerance {_fmt(args.tol)})"
    )
    _write_lines(lines, args.out)
    return EXIT_OK if ok else EXIT_NUMERICAL


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srlab",
        description="Surfaces in 3D sub-Riemannian manifolds: frames, "
                    "curvatures, limits, and Gauss-Bonnet checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scene", required=True,
                       help=f"shipped scene name ({', '.join(BUILTIN_SCENES)}) or JSON path")
        p.add_argument("--out", default=None, help="write output to a file instead of stdout")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate,
        "validate a scene and print frame checks and structure functions")

    p = add("frame-report", cmd_frame_report,
            "structure functions and connection forms at a surface point")
    p.add_argument("--uv", required=True, help="surface parameters, e.g. 1.0,0.0")
    p.add_argument("--L", type=float, default=1.0, help="metric parameter (default 1.0)")

    p = add("curvature", cmd_curvature,
            "K_L, the limit K, and the Gauss-equation decomposition at a point")
    p.add_argument("--uv", required=True, help="surface parameters, e.g. 1.0,0.0")
    p.add_argument("--L", type=float, default=100.0, help="metric parameter (default 100.0)")

    p = add("sweep", cmd_sweep, "CSV convergence sweep over an L grid")
    p.add_argument("--L", default=None, help="comma-separated L grid (default: scene L_grid)")
    p.add_argument("--quantity", choices=("K", "kn"), default="K")
    p.add_argument("--uv", default=None, help="surface parameters for --quantity K")
    p.add_argument("--curve", type=int, default=0, help="boundary curve index for --quantity kn")
    p.add_argument("--t", type=float, default=None, help="curve parameter for --quantity kn")

    p = add("gauss-bonnet", cmd_gauss_bonnet,
            "JSON Gauss-Bonnet report with the finite-L table")
    p.add_argument("--L", default=None, help="comma-separated L values for the finite-L table")

    p = add("oracle-check", cmd_oracle_check,
            "max discrepancies against the independent oracles")
    p.add_argument("--L", default="1,10,100", help="comma-separated L values")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6, help="worst allowed gap")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
