"""Area and length measures, region quadrature, and Gauss-Bonnet checks.

Densities against the parameter measures:

    dsigma   = (f^2 ^ f^3)(Tu, Tv) du dv        (limit area, positive)
    dsigma_L = sqrt(L + A^2) dsigma              (area under the L metric)
    ds       = |e^3(gamma')| dt                  (limit length, transverse curves)

The Gauss-Bonnet residual integrates K dsigma over a region and A e^3(gamma')
along its boundary curves; the two cancel for correctly oriented scenes
(counterclockwise outer boundary, clockwise holes, in the parameter plane).
The finite-L variant integrates (1/sqrt(L)) K_L dsigma_L and the matching
boundary term and compares against 2 pi chi / sqrt(L).

Quadrature is composite Gauss-Legendre with a fixed summation order
(lexicographic over cells, pairwise within and across cells), so results are
bitwise reproducible. Disk and annulus regions integrate in polar parameters
with the Jacobian folded into the weights.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import curvature as cv
from .calculus.jets import jsqrt
from .errors import CharacteristicPointError, SceneError
from .surface import EPS_CHAR, SurfaceGeometry, characteristic_report

CHUNK = 16384
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre quadrature controls for regions and boundary curves."""

    order: int = 16
    cells: tuple = (8, 8)
    segments: int = 64
    rel_tol: float = 1e-8
    max_refine: int = 3

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("quadrature order must be at least 2")
        if self.rel_tol <= 0:
            raise ValueError("quadrature tolerance must be positive")
        if min(self.cells) < 1 or self.segments < 1 or self.max_refine < 0:
            raise ValueError("subdivision counts must be positive")

    @staticmethod
    def from_config(cfg: dict) -> "QuadratureSpec":
        known = {"order", "cells", "segments", "rel_tol", "max_refine"}
        extra = set(cfg) - known
        if extra:
            raise ValueError(f"unknown quadrature settings: {sorted(extra)}")
        kwargs = dict(cfg)
        if "cells" in kwargs:
            kwargs["cells"] = tuple(int(c) for c in kwargs["cells"])
        return QuadratureSpec(**kwargs)


@dataclass(frozen=True)
class Region:
    """Subset of the parameter plane: rectangle, disk, or annulus.

    The Euler characteristic is determined by the region type: rectangles
    and disks are contractible (chi 1), annuli have chi 0.
    """

    kind: str
    u_interval: tuple = None
    v_interval: tuple = None
    center: tuple = None
    radii: tuple = None

    def __post_init__(self):
        if self.kind == "rectangle":
            if self.u_interval is None or self.v_interval is None:
                raise ValueError("rectangle region needs u and v intervals")
            (a, b), (c, d) = self.u_interval, self.v_interval
            if not (b > a and d > c):
                raise ValueError("rectangle intervals must have positive length")
        elif self.kind == "disk":
            if self.center is None or self.radii is None:
                raise ValueError("disk region needs a center and a radius")
            if not self.radii[1] > 0 or self.radii[0] != 0.0:
                raise ValueError("disk radius must be positive")
        elif self.kind == "annulus":
            if self.center is None or self.radii is None:
                raise ValueError("annulus region needs a center and two radii")
            r1, r2 = self.radii
            if not (0 < r1 <= r2):
                raise ValueError("annulus radii must satisfy 0 < inner <= outer")
        else:
            raise ValueError(f"unknown region type: {self.kind!r}")

    @staticmethod
    def rectangle(u_interval, v_interval) -> "Region":
        return Region("rectangle", u_interval=tuple(map(float, u_interval)),
                      v_interval=tuple(map(float, v_interval)))

    @staticmethod
    def disk(center, radius) -> "Region":
        return Region("disk", center=tuple(map(float, center)),
                      radii=(0.0, float(radius)))

    @staticmethod
    def annulus(center, radii) -> "Region":
        return Region("annulus", center=tuple(map(float, center)),
                      radii=tuple(map(float, radii)))

    @property
    def chi(self) -> int:
        return 0 if self.kind == "annulus" else 1

    def bounding_box(self):
        if self.kind == "rectangle":
            return self.u_interval, self.v_interval
        (cu, cvv), r = self.center, self.radii[1]
        return (cu - r, cu + r), (cvv - r, cvv + r)

    def contains(self, u, v):
        """Pointwise membership in the closed region."""
        u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
        if self.kind == "rectangle":
            (a, b), (c, d) = self.u_interval, self.v_interval
            return (u >= a) & (u <= b) & (v >= c) & (v <= d)
        rho = np.hypot(u - self.center[0], v - self.center[1])
        return (rho >= self.radii[0]) & (rho <= self.radii[1])

    def boundary_distance(self, u, v):
        """Distance in the parameter plane from (u, v) to the region edge."""
        u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
        if self.kind == "rectangle":
            (a, b), (c, d) = self.u_interval, self.v_interval
            qu = np.abs(u - 0.5 * (a + b)) - 0.5 * (b - a)
            qv = np.abs(v - 0.5 * (c + d)) - 0.5 * (d - c)
            outside = np.hypot(np.maximum(qu, 0.0), np.maximum(qv, 0.0))
            inside = np.minimum(np.maximum(qu, qv), 0.0)
            return np.abs(outside + inside)
        rho = np.hypot(u - self.center[0], v - self.center[1])
        r1, r2 = self.radii
        if self.kind == "disk":
            return np.abs(rho - r2)
        return np.minimum(np.abs(rho - r1), np.abs(rho - r2))


def ensure_region_in_domain(patch, region: Region):
    """Check the region closure against the patch parameter domain."""
    if patch.domain is None:
        return
    (u0, u1), (v0, v1) = region.bounding_box()
    du, dv = patch.domain["u"], patch.domain["v"]
    if u0 < du[0] or u1 > du[1] or v0 < dv[0] or v1 > dv[1]:
        raise SceneError(
            f"region extends outside the surface domain "
            f"u in [{u0:g}, {u1:g}], v in [{v0:g}, {v1:g}] vs "
            f"u in [{du[0]:g}, {du[1]:g}], v in [{dv[0]:g}, {dv[1]:g}]",
            "$.region",
        )


def region_scan_grid(region: Region, samples: int = 25):
    """Sample grid covering the closed region, boundary included."""
    if region.kind == "rectangle":
        (a, b), (c, d) = region.u_interval, region.v_interval
        uu, vv = np.meshgrid(np.linspace(a, b, samples),
                             np.linspace(c, d, samples), indexing="ij")
        return uu.ravel(), vv.ravel()
    r1, r2 = region.radii
    rho = np.linspace(r1, r2, samples)
    th = np.linspace(0.0, TWO_PI, 2 * samples, endpoint=False)
    rr, tt = np.meshgrid(rho, th, indexing="ij")
    uu = region.center[0] + (rr * np.cos(tt)).ravel()
    vv = region.center[1] + (rr * np.sin(tt)).ravel()
    return uu, vv


def scan_region_regular(model, patch, region: Region, samples: int = 25):
    """Raise if the closed region comes near a characteristic point."""
    uu, vv = region_scan_grid(region, samples)
    report = characteristic_report(model, patch, uu, vv)
    margin = float(np.min(report.margin))
    if margin < EPS_CHAR:
        raise CharacteristicPointError(
            f"region contains a characteristic point "
            f"(pre-scan margin {margin:.3e} on a {samples}-per-axis grid)"
        )


# -- quadrature ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _gauss_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _composite_axis(a: float, b: float, cells: int, order: int):
    """Nodes and weights per cell on [a, b]: arrays of shape (cells, order)."""
    x, w = _gauss_rule(order)
    edges = np.linspace(a, b, cells + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = centers[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes, weights


def region_nodes(region: Region, spec: QuadratureSpec, factor: int = 1):
    """Quadrature nodes (u, v, w) in lexicographic cell order.

    Disk and annulus regions are mapped from polar coordinates with the
    Jacobian rho folded into the weights.
    """
    n1 = spec.cells[0] * factor
    n2 = spec.cells[1] * factor
    shape = (n1, n2, spec.order, spec.order)
    if region.kind == "rectangle":
        (a, b), (c, d) = region.u_interval, region.v_interval
        un, uw = _composite_axis(a, b, n1, spec.order)
        vn, vw = _composite_axis(c, d, n2, spec.order)
        # axes (u cell, v cell, u node, v node): C-order ravel walks cells
        # lexicographically with each cell's nodes contiguous
        u = np.broadcast_to(un[:, None, :, None], shape)
        v = np.broadcast_to(vn[None, :, None, :], shape)
        w = uw[:, None, :, None] * vw[None, :, None, :]
        return u.ravel(), v.ravel(), np.broadcast_to(w, shape).ravel()
    r1, r2 = region.radii
    rn, rw = _composite_axis(r1, r2, n1, spec.order)
    tn, tw = _composite_axis(0.0, TWO_PI, n2, spec.order)
    rho = np.broadcast_to(rn[:, None, :, None], shape)
    th = np.broadcast_to(tn[None, :, None, :], shape)
    w = (rn * rw)[:, None, :, None] * tw[None, :, None, :]
    u = region.center[0] + rho * np.cos(th)
    v = region.center[1] + rho * np.sin(th)
    return u.ravel(), v.ravel(), np.broadcast_to(w, shape).ravel()


def curve_nodes(t0: float, t1: float, spec: QuadratureSpec, factor: int = 1):
    nodes, weights = _composite_axis(t0, t1, spec.segments * factor, spec.order)
    return nodes.ravel(), weights.ravel()


def _chunked_values(fn, *coords):
    total = coords[0].size
    out = np.empty(total)
    for start in range(0, total, CHUNK):
        sl = slice(start, min(start + CHUNK, total))
        out[sl] = np.broadcast_to(fn(*(c[sl] for c in coords)), (sl.stop - sl.start,))
    return out


def _reduce(values, weights, per_cell: int):
    """Deterministic weighted sum: pairwise within cells, then across."""
    prods = (values * weights).reshape(-1, per_cell)
    return float(np.sum(np.sum(prods, axis=1)))


@dataclass(frozen=True)
class QuadratureResult:
    """A quadrature value with its refinement-based error estimate."""

    value: float
    error: float
    converged: bool
    refinements: int

    def __float__(self):
        return self.value


def _refine(passes, spec: QuadratureSpec) -> QuadratureResult:
    """Run quadrature passes at doubling resolution until stable.

    The reported error is the change under the last doubling, floored at a
    few units of rounding so it stays a usable bound even when consecutive
    levels agree bitwise.
    """
    prev = None
    value = err = 0.0
    k = 0
    for k in range(spec.max_refine + 1):
        value = passes(2 ** k)
        if prev is not None:
            err = abs(value - prev)
            if err <= spec.rel_tol * max(1.0, abs(value)):
                return QuadratureResult(value, _floor_err(err, value), True, k)
        prev = value
    return QuadratureResult(value, _floor_err(err, value), False, k)


def _floor_err(err: float, value: float) -> float:
    return max(err, 16.0 * np.finfo(float).eps * max(1.0, abs(value)))


def integrate_region(fn, region: Region, spec: QuadratureSpec) -> QuadratureResult:
    """Integrate fn(u, v) du dv over the region with refinement control."""

    def single(factor):
        u, v, w = region_nodes(region, spec, factor)
        if u.size == 0 or np.all(w == 0.0):
            return 0.0
        vals = _chunked_values(fn, u, v)
        return _reduce(vals, w, spec.order * spec.order)

    return _refine(single, spec)


def integrate_curve(fn, t0: float, t1: float, spec: QuadratureSpec) -> QuadratureResult:
    """Integrate fn(t) dt over [t0, t1] with refinement control."""

    def single(factor):
        t, w = curve_nodes(t0, t1, spec, factor)
        vals = _chunked_values(fn, t)
        return _reduce(vals, w, spec.order)

    return _refine(single, spec)


# -- densities ----------------------------------------------------------------


def hausdorff_area_density(model, patch, u, v):
    """Density of the limit (Hausdorff) surface measure against du dv."""
    geom = SurfaceGeometry(model, patch, u, v)
    return np.asarray(geom.wedge.value)


def area_density_L(model, patch, u, v, L: float):
    """Density of the surface measure under the L metric: sqrt(L + A^2) dsigma."""
    if L <= 0:
        raise ValueError("the metric parameter L must be positive")
    geom = SurfaceGeometry(model, patch, u, v)
    A = np.asarray(geom.A.value)
    return np.sqrt(L + A * A) * np.asarray(geom.wedge.value)


def hausdorff_length_density(model, patch, curve, t):
    """Density |e^3(gamma')| of the limit length measure against dt."""
    cg = cv.CurveGeometry(model, patch, curve, t)
    return np.abs(np.asarray(cg.y.value))


def length_density_L(model, patch, curve, t, L: float):
    """Density of induced arclength under the L metric against dt."""
    if L <= 0:
        raise ValueError("the metric parameter L must be positive")
    cg = cv.CurveGeometry(model, patch, curve, t)
    x, y, A = cg.x, cg.y, cg.A
    return np.asarray(jsqrt(x * x + y * y * (A * A + L)).value)


def boundary_integrand_limit(cg: cv.CurveGeometry):
    """k_n ds against dt: A e^3(gamma'), smooth through isolated tangencies."""
    return np.asarray((cg.A * cg.y).value)


def boundary_integrand_L(cg: cv.CurveGeometry, L: float):
    """k_n^L ds_L against dt, in the form that needs no transversality."""
    x, y, A = cg.x, cg.y, cg.A
    norm = jsqrt(x * x + y * y * (A * A + L))
    xl = x / norm
    yl = y * jsqrt(A * A + L) / norm
    form = cv.projected_connection_form(cg.geom, L)
    along = cg.pull(form.P) * cg.udot + cg.pull(form.Q) * cg.vdot
    return np.asarray((-yl * xl.deriv(0) + xl * yl.deriv(0) + along).value)


# -- scene integrals ----------------------------------------------------------


def integrate_K_dsigma(scene, quad: QuadratureSpec = None) -> QuadratureResult:
    """Integral of the limit Gaussian curvature against the limit measure."""
    quad = quad or scene.quadrature
    ensure_region_in_domain(scene.patch, scene.region)
    scan_region_regular(scene.model, scene.patch, scene.region)

    def fn(u, v):
        geom = SurfaceGeometry(scene.model, scene.patch, u, v)
        return cv.gauss_curvature_limit(geom) * np.asarray(geom.wedge.value)

    return integrate_region(fn, scene.region, quad)


def integrate_kn_ds(scene, quad: QuadratureSpec = None) -> tuple:
    """Limit boundary integrals, one QuadratureResult per boundary curve."""
    quad = quad or scene.quadrature
    out = []
    for curve in scene.boundary:
        def fn(t, curve=curve):
            cg = cv.CurveGeometry(scene.model, scene.patch, curve, t)
            return boundary_integrand_limit(cg)

        out.append(integrate_curve(fn, curve.t0, curve.t1, quad))
    return tuple(out)


def stokes_consistency_gap(scene, quad: QuadratureSpec = None):
    """Relative gap between the region integral of d(A e^3) and the boundary sum.

    An independent route to Gauss-Bonnet: the exterior derivative of the limit
    form is integrated as a plain two-form (no densities), and Stokes' theorem
    says it must match the boundary line integrals.
    """
    quad = quad or scene.quadrature
    ensure_region_in_domain(scene.patch, scene.region)
    scan_region_regular(scene.model, scene.patch, scene.region)

    def fn(u, v):
        geom = SurfaceGeometry(scene.model, scene.patch, u, v)
        return cv.limit_connection_form(geom).curl()

    region_val = integrate_region(fn, scene.region, quad).value
    boundary_val = 0.0
    for res in integrate_kn_ds(scene, quad):
        boundary_val += res.value
    scale = max(1.0, abs(region_val), abs(boundary_val))
    return abs(region_val - boundary_val) / scale


@dataclass(frozen=True)
class FiniteLRow:
    """One row of the finite-L Gauss-Bonnet table."""

    L: float
    scaled_sum: float
    target: float
    area_part: float
    boundary_part: float

    @property
    def gap(self) -> float:
        return self.scaled_sum - self.target


def finite_L_gauss_bonnet(scene, L: float, quad: QuadratureSpec = None) -> FiniteLRow:
    """The scaled finite-L Gauss-Bonnet sum against 2 pi chi / sqrt(L)."""
    if L <= 0:
        raise ValueError("the metric parameter L must be positive")
    quad = quad or scene.quadrature
    ensure_region_in_domain(scene.patch, scene.region)
    scan_region_regular(scene.model, scene.patch, scene.region)
    root = math.sqrt(L)

    def area_fn(u, v):
        geom = SurfaceGeometry(scene.model, scene.patch, u, v)
        A = np.asarray(geom.A.value)
        dens = np.sqrt(L + A * A) * np.asarray(geom.wedge.value)
        return cv.gauss_curvature_L(geom, L) * dens / root

    area_part = integrate_region(area_fn, scene.region, quad).value

    boundary_part = 0.0
    for curve in scene.boundary:
        def fn(t, curve=curve):
            cg = cv.CurveGeometry(scene.model, scene.patch, curve, t)
            return boundary_integrand_L(cg, L) / root

        boundary_part += integrate_curve(fn, curve.t0, curve.t1, quad).value

    chi = scene.region.chi
    return FiniteLRow(
        L=float(L),
        scaled_sum=area_part + boundary_part,
        target=TWO_PI * chi / root,
        area_part=area_part,
        boundary_part=boundary_part,
    )


@dataclass(frozen=True)
class GaussBonnetReport:
    """Limit Gauss-Bonnet accounting for one scene."""

    chi: int
    area: QuadratureResult
    boundary: tuple
    residual: float
    finite_rows: tuple = ()


def gauss_bonnet_residual(scene, quad: QuadratureSpec = None,
                          L_values=()) -> GaussBonnetReport:
    """Residual of the limit Gauss-Bonnet identity, with optional finite-L rows.

    The residual is the area integral plus the boundary integrals, summed
    left to right in the reported order, and vanishes for correctly oriented
    scenes.
    """
    quad = quad or scene.quadrature
    area = integrate_K_dsigma(scene, quad)
    boundary = integrate_kn_ds(scene, quad)
    residual = area.value
    for res in boundary:
        residual += res.value
    rows = tuple(finite_L_gauss_bonnet(scene, L, quad) for L in L_values)
    return GaussBonnetReport(chi=scene.region.chi, area=area,
                             boundary=boundary, residual=residual,
                             finite_rows=rows)
