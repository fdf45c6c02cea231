"""Parametrized surface patches and the frames adapted to them.

A patch is an immersion Phi(u, v) into the chart. At a regular (that is,
non-characteristic) point the tangent plane meets the horizontal distribution
in a line; the unit horizontal direction of that line is f2, the horizontal
normal is f1, and f3 = e3 + A f1 completes a tangent basis, where the
function A is read off the horizontal conormal f^1. A one-parameter family
of orthonormal tangent frames (X2, X3) with normal X1 tracks the metric
family; the angle beta between the normal and f1 closes to zero as L grows.

All quantities are carried as jets in (u, v) so the curvature layer can take
exact derivatives. Parameter inputs may be numpy arrays for batch work.
"""

from dataclasses import dataclass

import numpy as np

from .calculus import Jet, ScalarField, jatan2, pair_oneform
from .calculus.jets import Composer, jsqrt
from .errors import CharacteristicPointError, ImmersionError, TransversalityError
from .frame import FrameData, SubRiemannianModel, _cross, _val

SURFACE_VARS = ("u", "v")
EPS_CHAR = 1e-8
IMMERSION_RTOL = 1e-10
SURFACE_ORDER = 3


@dataclass(frozen=True)
class SurfacePatch:
    """Immersed surface given by three chart-coordinate expressions of u, v."""

    phi: tuple
    domain: dict | None = None

    @staticmethod
    def parse(texts, domain=None) -> "SurfacePatch":
        if len(texts) != 3:
            raise ValueError("a surface patch needs 3 coordinate expressions")
        comps = tuple(ScalarField.parse(t, SURFACE_VARS) for t in texts)
        return SurfacePatch(comps, domain)

    def jets(self, u, v, order: int = SURFACE_ORDER) -> list:
        su, sv = Jet.seeds([np.asarray(u, dtype=float), np.asarray(v, dtype=float)], order)
        bindings = {"u": su, "v": sv}
        return [c.jet(bindings) for c in self.phi]

    def point(self, u, v) -> np.ndarray:
        vals = [np.asarray(_val(j)) for j in self.jets(u, v, order=0)]
        shape = np.broadcast_shapes(*(x.shape for x in vals))
        return np.stack([np.broadcast_to(x, shape) for x in vals])


@dataclass(frozen=True)
class CharacteristicReport:
    """Relative size of the contact form on the tangent plane."""

    margin: object

    @property
    def characteristic(self):
        return np.asarray(self.margin) < EPS_CHAR

    @property
    def classification(self) -> str:
        flag = self.characteristic
        if np.asarray(flag).ndim:
            raise ValueError("classification string is for scalar reports; use labels()")
        return "characteristic" if flag else "regular"

    def labels(self) -> np.ndarray:
        return np.where(self.characteristic, "characteristic", "regular")


def _tangents(phi_jets):
    tu = [c.deriv(0) for c in phi_jets]
    tv = [c.deriv(1) for c in phi_jets]
    return tu, tv


def characteristic_report(model: SubRiemannianModel, patch: SurfacePatch, u, v) -> CharacteristicReport:
    """Classify parameter points without building the adapted frame."""
    phi = patch.jets(u, v, order=1)
    p0 = [np.asarray(j.value) for j in phi]
    tu, tv = _tangents(phi)
    fr = model.frame(p0, order=3)   # the frame chain eats three derivative levels
    wvals = [np.asarray(c.value) for c in fr.omega]
    tuv = [np.asarray(c.value) for c in tu]
    tvv = [np.asarray(c.value) for c in tv]
    pu = sum(w * t for w, t in zip(wvals, tuv))
    pv = sum(w * t for w, t in zip(wvals, tvv))
    size = np.sqrt(sum(np.square(t) for t in tuv)) + np.sqrt(sum(np.square(t) for t in tvv))
    margin = np.maximum(np.abs(pu), np.abs(pv)) / size
    return CharacteristicReport(float(margin) if margin.ndim == 0 else margin)


class SurfaceGeometry:
    """Adapted frame data at parameter points, all stored as (u, v) jets.

    The constructor refuses characteristic points (margin below EPS_CHAR)
    and immersion failures. Batch construction with array-valued u, v is the
    intended mode for quadrature.
    """

    def __init__(self, model: SubRiemannianModel, patch: SurfacePatch, u, v,
                 order: int = SURFACE_ORDER):
        self.model = model
        self.patch = patch
        self.u = np.asarray(u, dtype=float)
        self.v = np.asarray(v, dtype=float)

        phi = patch.jets(u, v, order)
        self.phi = phi
        p0 = [np.asarray(j.value) for j in phi]
        self.point = p0
        self.Tu, self.Tv = _tangents(phi)

        self._immersion_check()

        self.frame: FrameData = model.frame(p0, order=order + 1)
        self.pullback = Composer([j - j.value for j in phi])

        pull = self.pullback.pull
        self.omega_s = tuple(pull(c) for c in self.frame.omega)
        self.cof1_s = tuple(pull(c) for c in self.frame.coframe[0])
        self.cof2_s = tuple(pull(c) for c in self.frame.coframe[1])
        self.e1_s = [pull(c) for c in self.frame.e1]
        self.e2_s = [pull(c) for c in self.frame.e2]
        self.e3_s = [pull(c) for c in self.frame.e3]

        self.omega_Tu = pair_oneform(self.omega_s, self.Tu)
        self.omega_Tv = pair_oneform(self.omega_s, self.Tv)
        self._characteristic_check()

        # horizontal tangent direction: t = -omega(Tv) Tu + omega(Tu) Tv
        t = [self.omega_Tu * b - self.omega_Tv * a for a, b in zip(self.Tu, self.Tv)]
        x_raw = pair_oneform(self.cof1_s, t)
        y_raw = pair_oneform(self.cof2_s, t)
        norm_h = jsqrt(x_raw * x_raw + y_raw * y_raw)

        # orientation: require (f^2 ^ f^3)(Tu, Tv) > 0, flipping f2 if needed
        f2_Tu = x_raw * pair_oneform(self.cof1_s, self.Tu) + y_raw * pair_oneform(self.cof2_s, self.Tu)
        f2_Tv = x_raw * pair_oneform(self.cof1_s, self.Tv) + y_raw * pair_oneform(self.cof2_s, self.Tv)
        wedge_raw = f2_Tu * self.omega_Tv - f2_Tv * self.omega_Tu
        self.sign = np.where(np.asarray(wedge_raw.value) >= 0.0, 1.0, -1.0)

        self.x = self.sign * x_raw / norm_h
        self.y = self.sign * y_raw / norm_h
        self.wedge = self.sign * wedge_raw / norm_h   # (f^2 ^ f^3)(Tu, Tv) > 0

        self.f1 = [self.y * a - self.x * b for a, b in zip(self.e1_s, self.e2_s)]
        self.f2 = [self.x * a + self.y * b for a, b in zip(self.e1_s, self.e2_s)]

        normal = _cross(self.Tu, self.Tv)
        pairing = pair_oneform(normal, self.f1)
        pv = np.asarray(pairing.value)
        if np.any(np.abs(pv) < 1e-14):
            raise TransversalityError(
                "horizontal normal is tangent to the surface "
                f"(min pairing {float(np.min(np.abs(pv))):.3e})"
            )
        self.f1cov = tuple(c / pairing for c in normal)

        self.A = -pair_oneform(self.f1cov, self.e3_s)
        self.f3 = [a + self.A * b for a, b in zip(self.e3_s, self.f1)]
        self.f2cov = tuple(self.x * a + self.y * b for a, b in zip(self.cof1_s, self.cof2_s))
        self.f3cov = self.omega_s

    # -- construction checks ------------------------------------------------

    def _immersion_check(self):
        cols = []
        for vec in (self.Tu, self.Tv):
            vals = [np.asarray(_val(c)) for c in vec]
            shape = np.broadcast_shapes(*(x.shape for x in vals))
            cols.append(np.stack([np.broadcast_to(x, shape) for x in vals]))
        jac = np.stack(cols, axis=-1)               # (3, ..., 2)
        jac = np.moveaxis(jac, 0, -2)               # (..., 3, 2)
        sv = np.linalg.svd(jac, compute_uv=False)   # (..., 2)
        smin, smax = np.min(sv, axis=-1), np.max(sv, axis=-1)
        worst = float(np.min(smin / np.maximum(smax, 1e-300)))
        if worst < IMMERSION_RTOL:
            raise ImmersionError(
                f"parametrization fails the immersion check: relative smallest "
                f"singular value {worst:.3e}"
            )

    def _characteristic_check(self):
        size = None
        for vec in (self.Tu, self.Tv):
            n = jsqrt(sum(c * c for c in vec))
            size = n if size is None else size + n
        margin = np.maximum(
            np.abs(np.asarray(self.omega_Tu.value)), np.abs(np.asarray(self.omega_Tv.value))
        ) / np.asarray(size.value)
        self.margin = float(margin) if margin.ndim == 0 else margin
        if np.any(margin < EPS_CHAR):
            raise CharacteristicPointError(
                "surface patch touches a characteristic point: min margin "
                f"{float(np.min(margin)):.3e} (threshold {EPS_CHAR:.0e})"
            )

    # -- reporting helpers ----------------------------------------------------

    @property
    def alpha(self):
        """Frame angle in (-pi, pi]: f1 = cos(alpha) e1 + sin(alpha) e2."""
        return jatan2(-np.asarray(self.x.value), np.asarray(self.y.value))

    @property
    def A_value(self):
        return _val(self.A)

    def vector_values(self, vec) -> np.ndarray:
        shape = np.broadcast_shapes(*(np.asarray(_val(c)).shape for c in vec))
        return np.stack([np.broadcast_to(np.asarray(_val(c)), shape) for c in vec])

    def l_frame(self, L: float) -> "LAdaptedFrame":
        return LAdaptedFrame(self, L)


class LAdaptedFrame:
    """Orthonormal frame of the metric family adapted to the surface.

    X1 is normal to the surface, (X2, X3) = (f2, f3 / sqrt(L + A^2)) frame
    the tangent plane, and cos(beta) = sqrt(L / (L + A^2)) measures the tilt
    of the normal away from the horizontal conormal direction.
    """

    def __init__(self, geom: SurfaceGeometry, L: float):
        if L <= 0:
            raise ValueError("the metric parameter L must be positive")
        self.geom = geom
        self.L = float(L)
        s = self.L ** 0.5
        A = geom.A
        self.denom = jsqrt(A * A + self.L)
        self.cosb = s / self.denom
        self.sinb = A / self.denom

        e3_scaled = [c / s for c in geom.e3_s]
        self.X1 = [self.cosb * a - self.sinb * b for a, b in zip(geom.f1, e3_scaled)]
        self.X2 = geom.f2
        self.X3 = [c / self.denom for c in geom.f3]

        self.X1cov = tuple(self.cosb * c for c in geom.f1cov)
        self.X2cov = geom.f2cov
        self.X3cov = tuple(
            self.denom * a + (A / self.denom) * b
            for a, b in zip(geom.f3cov, geom.f1cov)
        )

    @property
    def beta(self):
        return jatan2(np.asarray(self.sinb.value), np.asarray(self.cosb.value))


def continuity_ok(f2_values: np.ndarray) -> bool:
    """Check that consecutive f2 samples never reverse direction.

    `f2_values` has shape (3, n) with columns ordered along a path of nearby
    regular points. Returns False if any adjacent pair has a non-positive
    dot product, which would indicate the orientation rule flipped between
    neighbors.
    """
    dots = np.einsum("ck,ck->k", f2_values[:, 1:], f2_values[:, :-1])
    return bool(np.all(dots > 0.0))
