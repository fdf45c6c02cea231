"""Scene files: a model, a surface patch, a region, and its boundary curves.

Scenes are JSON with expression strings; the expressions carry all the math
and are re-parsed by the calculus layer, so the file format itself has no
semantics beyond structure. Loading validates everything up front: schema
shape (errors carry a $.field path), expression parsing, region containment
in the surface domain, an immersion scan and a characteristic-point scan
over the region, and a check that each boundary curve actually runs along
the region's edge.

The boundary curves are taken exactly as written, orientation included.
Gauss-Bonnet cancellation expects the convention induced from the region in
the parameter plane: counterclockwise outer boundary, clockwise holes.
"""

import json
import math
import os
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .curvature import CurveOnSurface
from .errors import CharacteristicPointError, ImmersionError, SceneError, ValidationError
from .frame import ensure_valid
from .measures import QuadratureSpec, Region, ensure_region_in_domain, region_scan_grid, scan_region_regular
from .models import builtin_model, inline_model
from .surface import SurfacePatch

BUILTIN_SCENES = ("heisenberg_annulus", "rt_disk")
BOUNDARY_SAMPLES = 32
BOUNDARY_TOL = 1e-8
IMMERSION_SCAN_RTOL = 1e-8


@dataclass(frozen=True)
class Scene:
    """A fully validated scene, plus the normalized config it came from."""

    name: str
    model: object
    patch: SurfacePatch
    region: Region
    boundary: tuple
    quadrature: QuadratureSpec
    tolerances: dict
    L_grid: tuple
    config: dict

    def with_quadrature(self, quad: QuadratureSpec) -> "Scene":
        return replace(self, quadrature=quad)


# -- schema helpers -----------------------------------------------------------


def _need(obj: dict, key: str, path: str):
    if key not in obj:
        raise SceneError("missing required field", f"{path}.{key}")
    return obj[key]


def _as_dict(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SceneError("expected an object", path)
    return value


def _as_list(value, path: str, length: int = None) -> list:
    if not isinstance(value, list):
        raise SceneError("expected an array", path)
    if length is not None and len(value) != length:
        raise SceneError(f"expected exactly {length} entries, got {len(value)}", path)
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError("expected a number", path)
    out = float(value)
    if not math.isfinite(out):
        raise SceneError("expected a finite number", path)
    return out


def _as_exprs(value, path: str, length: int) -> tuple:
    items = _as_list(value, path, length)
    for i, item in enumerate(items):
        if not isinstance(item, str):
            raise SceneError("expected an expression string", f"{path}[{i}]")
    return tuple(items)


def _interval(value, path: str) -> tuple:
    pair = _as_list(value, path, 2)
    a, b = (_as_number(x, f"{path}[{i}]") for i, x in enumerate(pair))
    if not b > a:
        raise SceneError("interval must have positive length", path)
    return a, b


def _reject_unknown(obj: dict, known: set, path: str):
    extra = sorted(set(obj) - known)
    if extra:
        raise SceneError(f"unknown fields: {', '.join(extra)}", path)


# -- section builders ---------------------------------------------------------


def _build_model(cfg, path: str):
    cfg = _as_dict(cfg, path)
    if "builtin" in cfg:
        _reject_unknown(cfg, {"builtin"}, path)
        name = cfg["builtin"]
        if not isinstance(name, str):
            raise SceneError("expected a model name string", f"{path}.builtin")
        try:
            return builtin_model(name)
        except ValidationError as exc:
            raise SceneError(str(exc), f"{path}.builtin") from exc
    if "frame" in cfg:
        _reject_unknown(cfg, {"frame"}, path)
        frame = _as_dict(cfg["frame"], f"{path}.frame")
        _reject_unknown(frame, {"e1", "e2"}, f"{path}.frame")
        e1 = _as_exprs(_need(frame, "e1", f"{path}.frame"), f"{path}.frame.e1", 3)
        e2 = _as_exprs(_need(frame, "e2", f"{path}.frame"), f"{path}.frame.e2", 3)
        try:
            return inline_model(e1, e2)
        except ValidationError as exc:
            raise SceneError(str(exc), f"{path}.frame") from exc
    raise SceneError("model needs either a 'builtin' name or inline 'frame' expressions", path)


def _build_surface(cfg, path: str) -> SurfacePatch:
    cfg = _as_dict(cfg, path)
    _reject_unknown(cfg, {"phi", "domain"}, path)
    phi = _as_exprs(_need(cfg, "phi", path), f"{path}.phi", 3)
    dom = _as_dict(_need(cfg, "domain", path), f"{path}.domain")
    _reject_unknown(dom, {"u", "v"}, f"{path}.domain")
    domain = {
        "u": _interval(_need(dom, "u", f"{path}.domain"), f"{path}.domain.u"),
        "v": _interval(_need(dom, "v", f"{path}.domain"), f"{path}.domain.v"),
    }
    try:
        return SurfacePatch.parse(phi, domain)
    except (ValidationError, ValueError) as exc:
        raise SceneError(str(exc), f"{path}.phi") from exc


def _build_region(cfg, path: str) -> Region:
    cfg = _as_dict(cfg, path)
    kind = _need(cfg, "type", path)
    chi = _need(cfg, "euler_characteristic", path)
    if not isinstance(chi, int) or isinstance(chi, bool):
        raise SceneError("expected an integer", f"{path}.euler_characteristic")
    try:
        if kind == "rectangle":
            _reject_unknown(cfg, {"type", "u", "v", "euler_characteristic"}, path)
            region = Region.rectangle(
                _interval(_need(cfg, "u", path), f"{path}.u"),
                _interval(_need(cfg, "v", path), f"{path}.v"),
            )
        elif kind == "disk":
            _reject_unknown(cfg, {"type", "center", "radius", "euler_characteristic"}, path)
            center = [_as_number(x, f"{path}.center[{i}]")
                      for i, x in enumerate(_as_list(_need(cfg, "center", path), f"{path}.center", 2))]
            region = Region.disk(center, _as_number(_need(cfg, "radius", path), f"{path}.radius"))
        elif kind == "annulus":
            _reject_unknown(cfg, {"type", "center", "radii", "euler_characteristic"}, path)
            center = [_as_number(x, f"{path}.center[{i}]")
                      for i, x in enumerate(_as_list(_need(cfg, "center", path), f"{path}.center", 2))]
            radii = [_as_number(x, f"{path}.radii[{i}]")
                     for i, x in enumerate(_as_list(_need(cfg, "radii", path), f"{path}.radii", 2))]
            region = Region.annulus(center, radii)
        else:
            raise SceneError(f"unknown region type {kind!r}", f"{path}.type")
    except ValueError as exc:
        raise SceneError(str(exc), path) from exc
    if chi != region.chi:
        raise SceneError(
            f"euler_characteristic {chi} does not match region type "
            f"{region.kind!r} (expected {region.chi})",
            f"{path}.euler_characteristic",
        )
    return region


def _build_boundary(cfg, path: str) -> tuple:
    items = _as_list(cfg, path)
    curves = []
    for i, item in enumerate(items):
        here = f"{path}[{i}]"
        item = _as_dict(item, here)
        _reject_unknown(item, {"curve", "t", "orientation"}, here)
        exprs = _as_exprs(_need(item, "curve", here), f"{here}.curve", 2)
        interval = _interval(_need(item, "t", here), f"{here}.t")
        if "orientation" in item and not isinstance(item["orientation"], str):
            raise SceneError("expected an orientation note string", f"{here}.orientation")
        try:
            curves.append(CurveOnSurface.parse(exprs, interval))
        except (ValidationError, ValueError) as exc:
            raise SceneError(str(exc), f"{here}.curve") from exc
    return tuple(curves)


def _build_tolerances(cfg, path: str) -> dict:
    cfg = _as_dict(cfg, path)
    out = {}
    for key, value in cfg.items():
        num = _as_number(value, f"{path}.{key}")
        if num <= 0:
            raise SceneError("tolerance must be positive", f"{path}.{key}")
        out[key] = num
    return out


def _build_L_grid(cfg, path: str) -> tuple:
    items = _as_list(cfg, path)
    grid = []
    for i, item in enumerate(items):
        num = _as_number(item, f"{path}[{i}]")
        if num <= 0:
            raise SceneError("L values must be positive", f"{path}[{i}]")
        grid.append(num)
    return tuple(grid)


# -- cross-validation ---------------------------------------------------------


def _scan_immersion(patch: SurfacePatch, region: Region):
    uu, vv = region_scan_grid(region)
    jets = patch.jets(uu, vv, order=1)
    cols = []
    for idx in (0, 1):
        cols.append(np.stack([np.asarray(j.deriv(idx).value) for j in jets], axis=-1))
    jac = np.stack(cols, axis=-1)
    sv = np.linalg.svd(jac, compute_uv=False)
    worst = float(np.min(sv[..., -1] / np.maximum(sv[..., 0], 1e-300)))
    if worst < IMMERSION_SCAN_RTOL:
        raise ImmersionError(
            f"surface fails the immersion check on the region grid: relative "
            f"smallest singular value {worst:.3e}"
        )


def _check_boundary_on_edge(region: Region, boundary, path: str):
    for i, curve in enumerate(boundary):
        t = np.linspace(curve.t0, curve.t1, BOUNDARY_SAMPLES, endpoint=False)
        ju, jv = curve.jets(t, order=0)
        dist = region.boundary_distance(np.asarray(ju.value), np.asarray(jv.value))
        worst = float(np.max(dist))
        if worst > BOUNDARY_TOL:
            raise SceneError(
                f"boundary curve leaves the region edge: max distance "
                f"{worst:.3e} over {BOUNDARY_SAMPLES} samples "
                f"(tolerance {BOUNDARY_TOL:.0e})",
                f"{path}[{i}]",
            )


# -- loading and writing ------------------------------------------------------

_TOP_KEYS = {"model", "surface", "region", "boundary", "quadrature", "tolerances", "L_grid"}


def scene_from_config(cfg: dict, name: str = "") -> Scene:
    """Build and fully validate a scene from a parsed JSON object."""
    cfg = _as_dict(cfg, "$")
    _reject_unknown(cfg, _TOP_KEYS, "$")
    model = _build_model(_need(cfg, "model", "$"), "$.model")
    patch = _build_surface(_need(cfg, "surface", "$"), "$.surface")
    region = _build_region(_need(cfg, "region", "$"), "$.region")
    boundary = _build_boundary(cfg.get("boundary", []), "$.boundary")
    try:
        quadrature = QuadratureSpec.from_config(_as_dict(cfg.get("quadrature", {}), "$.quadrature"))
    except ValueError as exc:
        raise SceneError(str(exc), "$.quadrature") from exc
    tolerances = _build_tolerances(cfg.get("tolerances", {}), "$.tolerances")
    L_grid = _build_L_grid(cfg.get("L_grid", []), "$.L_grid")

    ensure_region_in_domain(patch, region)
    _scan_immersion(patch, region)
    uu, vv = region_scan_grid(region)
    try:
        ensure_valid(model, patch.point(uu, vv))
    except ValidationError as exc:
        raise SceneError(str(exc), "$.model") from exc
    try:
        scan_region_regular(model, patch, region)
    except CharacteristicPointError as exc:
        raise SceneError(str(exc), "$.region") from exc
    _check_boundary_on_edge(region, boundary, "$.boundary")

    return Scene(name=name, model=model, patch=patch, region=region,
                 boundary=boundary, quadrature=quadrature,
                 tolerances=tolerances, L_grid=L_grid,
                 config=_normalize(cfg))


def _normalize(cfg: dict) -> dict:
    """Round-trip-stable copy of the config, in canonical key order."""
    out = {}
    for key in ("model", "surface", "region", "boundary", "quadrature",
                "tolerances", "L_grid"):
        if key in cfg:
            out[key] = json.loads(json.dumps(cfg[key]))
    return out


def load_scene(path) -> Scene:
    """Read and validate a scene JSON file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"invalid JSON: {exc}", "$") from exc
    name = os.path.splitext(os.path.basename(str(path)))[0]
    return scene_from_config(cfg, name=name)


def write_scene(scene: Scene, path):
    """Serialize a scene's validated parameters back to JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene.config, fh, indent=2)
        fh.write("\n")


def builtin_scene(name: str) -> Scene:
    """Load one of the scenes shipped with the package."""
    if name not in BUILTIN_SCENES:
        raise SceneError(
            f"unknown scene {name!r}; shipped scenes: {', '.join(BUILTIN_SCENES)}"
        )
    text = resources.files("srlab").joinpath("scenes", f"{name}.json").read_text(encoding="utf-8")
    return scene_from_config(json.loads(text), name=name)


def resolve_scene(ref: str) -> Scene:
    """Resolve a CLI scene reference: shipped scene name or JSON file path."""
    if ref in BUILTIN_SCENES:
        return builtin_scene(ref)
    if os.path.exists(ref):
        return load_scene(ref)
    raise SceneError(
        f"no scene named {ref!r} and no such file; shipped scenes: "
        f"{', '.join(BUILTIN_SCENES)}"
    )
