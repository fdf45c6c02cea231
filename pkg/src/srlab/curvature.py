"""Curvature of surfaces under the metric family, finite L and in the limit.

The projected connection form of the tangent frame (X2, X3) is assembled
from the ambient connection forms and the frame angles,

    W23_L = -sin(b) (d(alpha) + w12_L) + cos(b) (-sin(a) w13_L + cos(a) w23_L),

pulled back to the parameter plane as P du + Q dv. The finite-L Gaussian
curvature is K_L = -d(W23_L)(X2, X3); its limit is K = -dA(f2) - A^2, and
the rescaled form W23_L / sqrt(L) converges to A f^3. The Gauss-equation
split K_L = Kbar_L + II_L uses the companion forms

    W12_L = cos(b) (d(alpha) + w12_L) - sin(b) (sin(a) w13_L - cos(a) w23_L),
    W13_L = -d(beta) + cos(a) w13_L + sin(a) w23_L,

whose wedge gives the extrinsic term II_L that diverges linearly in L.

Independent oracles: the Gaussian curvature of the induced two-dimensional
metric by the Brioschi second-derivative formula, and the signed geodesic
curvature of boundary curves in that same metric via Christoffel symbols.
"""

import math
from dataclasses import dataclass

import numpy as np

from .calculus import Jet, ScalarField, pair_oneform
from .calculus.jets import Composer, jsqrt
from .errors import NumericalError, TransversalityError
from .frame import ConnectionFormsL
from .surface import SurfaceGeometry

EPS_TRANS = 1e-6


def _v(x):
    return np.asarray(x.value if isinstance(x, Jet) else x)


@dataclass
class SurfaceOneForm:
    """One-form on the parameter plane, P du + Q dv, with jet components."""

    P: Jet
    Q: Jet

    def curl(self):
        """Coefficient of d(P du + Q dv) on du ^ dv."""
        return _v(self.Q.deriv(0)) - _v(self.P.deriv(1))

    def __call__(self, a, b):
        """Evaluate on a vector a * d/du + b * d/dv (values)."""
        return _v(self.P) * a + _v(self.Q) * b

    def values(self):
        return _v(self.P), _v(self.Q)


def tangent_components(geom: SurfaceGeometry, vec) -> tuple:
    """Components (a, b) with vec = a Tu + b Tv, solved per point.

    Uses Euclidean normal equations in chart components; exact for vectors
    lying in the tangent plane, which is the only supported input.
    """
    tu = [_v(c) for c in geom.Tu]
    tv = [_v(c) for c in geom.Tv]
    w = [_v(c) for c in vec]
    e = sum(a * a for a in tu)
    f = sum(a * b for a, b in zip(tu, tv))
    g = sum(b * b for b in tv)
    r1 = sum(a * c for a, c in zip(tu, w))
    r2 = sum(b * c for b, c in zip(tv, w))
    det = e * g - f * f
    return (r1 * g - r2 * f) / det, (e * r2 - f * r1) / det


def _coframe_on_tangents(geom: SurfaceGeometry):
    """Jets of e^k(Tu), e^k(Tv), k = 1..3, cached on the geometry."""
    cached = getattr(geom, "_coframe_pairings", None)
    if cached is None:
        rows = (geom.cof1_s, geom.cof2_s, geom.omega_s)
        cached = (
            tuple(pair_oneform(r, geom.Tu) for r in rows),
            tuple(pair_oneform(r, geom.Tv) for r in rows),
        )
        geom._coframe_pairings = cached
    return cached


class LFormAssembly:
    """Connection forms of the L-adapted frame pulled to the parameter plane.

    Builds, as jets in (u, v): the three ambient connection forms restricted
    to the surface, the angle differentials d(alpha) and d(beta), and the
    assembled forms W23_L, W12_L, W13_L. Reuses the geometry's pullback
    composer, so constructing several assemblies for one geometry (an L
    sweep) repeats no chart-level work.
    """

    def __init__(self, geom: SurfaceGeometry, L: float):
        if L <= 0:
            raise ValueError("the metric parameter L must be positive")
        self.geom = geom
        self.L = float(L)
        s = math.sqrt(self.L)

        forms = ConnectionFormsL(geom.frame, self.L)
        pull = geom.pullback.pull
        on_tu, on_tv = _coframe_on_tangents(geom)
        # scaled dual pairings e_L^k(T.): the third dual picks up sqrt(L)
        pu = (on_tu[0], on_tu[1], s * on_tu[2])
        pv = (on_tv[0], on_tv[1], s * on_tv[2])

        def restrict(i, j):
            coef = [pull(forms.coefficient(i, j, k)) for k in (1, 2, 3)]
            return SurfaceOneForm(pair_oneform(coef, pu), pair_oneform(coef, pv))

        self.w12 = restrict(1, 2)
        self.w13 = restrict(1, 3)
        self.w23 = restrict(2, 3)

        x, y, A = geom.x, geom.y, geom.A
        sin_a, cos_a = -x, y
        # d(alpha) through the angle's sine and cosine, never the branch
        self.dalpha = SurfaceOneForm(
            cos_a * sin_a.deriv(0) - sin_a * cos_a.deriv(0),
            cos_a * sin_a.deriv(1) - sin_a * cos_a.deriv(1),
        )
        denom2 = A * A + self.L
        self.dbeta = SurfaceOneForm(
            (s / denom2) * A.deriv(0), (s / denom2) * A.deriv(1)
        )
        denom = jsqrt(denom2)
        self.sinb = A / denom
        self.cosb = s / denom
        self.denom = denom

        def mix(c1, f1, c2, f2):
            return SurfaceOneForm(c1 * f1.P + c2 * f2.P, c1 * f1.Q + c2 * f2.Q)

        horiz = mix(-sin_a, self.w13, cos_a, self.w23)      # -sin(a) w13 + cos(a) w23
        anti = mix(sin_a, self.w13, -cos_a, self.w23)       # sin(a) w13 - cos(a) w23
        dplus = mix(1.0, self.dalpha, 1.0, self.w12)        # d(alpha) + w12

        self.omega23 = mix(-self.sinb, dplus, self.cosb, horiz)
        self.omega12 = mix(self.cosb, dplus, -self.sinb, anti)
        self.omega13 = SurfaceOneForm(
            -self.dbeta.P + (cos_a * self.w13.P + sin_a * self.w23.P),
            -self.dbeta.Q + (cos_a * self.w13.Q + sin_a * self.w23.Q),
        )

    def frame_components(self):
        """(a, b) parameter components of X2 and X3 (values)."""
        geom = self.geom
        a2, b2 = tangent_components(geom, geom.f2)
        f3n = [c / self.denom for c in geom.f3]
        a3, b3 = tangent_components(geom, f3n)
        return (a2, b2), (a3, b3)

    def gauss_curvature(self):
        """K_L = d(W32_L)(X2, X3) = -d(W23_L)(X2, X3)."""
        (a2, b2), (a3, b3) = self.frame_components()
        return -self.omega23.curl() * (a2 * b3 - b2 * a3)

    def second_fundamental(self):
        """II_L = (W12_L ^ W13_L)(X2, X3)."""
        (a2, b2), (a3, b3) = self.frame_components()
        p12, q12 = self.omega12.values()
        p13, q13 = self.omega13.values()
        return (p12 * q13 - q12 * p13) * (a2 * b3 - b2 * a3)


def projected_connection_form(geom: SurfaceGeometry, L: float) -> SurfaceOneForm:
    """W23_L pulled back to the parameter plane."""
    return LFormAssembly(geom, L).omega23


def gauss_curvature_L(geom: SurfaceGeometry, L: float):
    return LFormAssembly(geom, L).gauss_curvature()


def omega23_koszul_values(geom: SurfaceGeometry, L: float):
    """W23_L on (Tu, Tv) assembled from the Koszul connection oracle.

    Expands X2 and X3 in the orthonormal frame (e1, e2, e3 / sqrt(L)) and
    differentiates the component functions directly:

        <D_V X2, X3> = sum_m V(c2_m) c3_m + sum_ijk v_k c2_i c3_j Koszul[ijk].

    Shares no code with the structure-function connection coefficients, so
    it cross-checks the assembled form end to end.
    """
    from .frame import koszul_connection_oracle

    gam = koszul_connection_oracle(geom.frame, L)
    s = math.sqrt(L)
    x, y, A = geom.x, geom.y, geom.A
    denom = jsqrt(A * A + L)
    c2 = (x, y, Jet.constant(0.0, 2, x.order, x.point))
    c3 = (A * y / denom, -(A * x) / denom, s / denom)
    on_tu, on_tv = _coframe_on_tangents(geom)
    base = np.broadcast_shapes(*(np.shape(_v(c)) for c in (x, A)))

    def along(vec_index, pairings):
        vk = [_v(pairings[0]), _v(pairings[1]), s * _v(pairings[2])]
        total = sum(_v(c.deriv(vec_index)) * _v(d) for c, d in zip(c2, c3))
        total = np.broadcast_to(np.asarray(total, dtype=float), base).copy()
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    total += _v(c2[i]) * _v(c3[j]) * vk[k] * gam[i, j, k]
        return total

    return along(0, on_tu), along(1, on_tv)


def gauss_curvature_limit(geom: SurfaceGeometry):
    """K = -dA(f2) - A^2."""
    a2, b2 = tangent_components(geom, geom.f2)
    dA = (_v(geom.A.deriv(0)), _v(geom.A.deriv(1)))
    A = _v(geom.A)
    return -(a2 * dA[0] + b2 * dA[1]) - A * A


def limit_connection_form(geom: SurfaceGeometry) -> SurfaceOneForm:
    """The limit of W23_L / sqrt(L): the pullback of A e^3."""
    return SurfaceOneForm(geom.A * geom.omega_Tu, geom.A * geom.omega_Tv)


def gauss_curvature_limit_via_form(geom: SurfaceGeometry):
    """Second route to K: -d(pullback of A e^3) evaluated on (f2, f3)."""
    form = limit_connection_form(geom)
    a2, b2 = tangent_components(geom, geom.f2)
    a3, b3 = tangent_components(geom, geom.f3)
    return -form.curl() * (a2 * b3 - b2 * a3)


@dataclass(frozen=True)
class CurvatureSample:
    """Finite-L curvature with its Gauss-equation split and the limit."""

    L: float
    K_L: object
    K_limit: object
    Kbar_L: object
    II_L: object


def gauss_equation_decomposition(geom: SurfaceGeometry, L: float) -> CurvatureSample:
    asm = LFormAssembly(geom, L)
    k = asm.gauss_curvature()
    ii = asm.second_fundamental()
    return CurvatureSample(L=float(L), K_L=k, K_limit=gauss_curvature_limit(geom),
                           Kbar_L=k - ii, II_L=ii)


def scaled_form_limit_deviation(geom: SurfaceGeometry, L: float):
    """Max-abs gap between W23_L / sqrt(L) and the limit form, per component."""
    finite = LFormAssembly(geom, L).omega23
    limit = limit_connection_form(geom)
    s = math.sqrt(L)
    dp = np.max(np.abs(_v(finite.P) / s - _v(limit.P)))
    dq = np.max(np.abs(_v(finite.Q) / s - _v(limit.Q)))
    return max(float(dp), float(dq))


# -- independent curvature oracle (induced metric) ---------------------------


def metric_gauss_curvature(E: Jet, F: Jet, G: Jet):
    """Gaussian curvature of a 2D metric from its component jets.

    Brioschi's formula: second derivatives of E, F, G only, no connection
    machinery. Component jets must carry (u, v) order at least 2.
    """
    e, f, g = _v(E), _v(F), _v(G)
    eu, ev = _v(E.deriv(0)), _v(E.deriv(1))
    gu, gv = _v(G.deriv(0)), _v(G.deriv(1))
    fu, fv = _v(F.deriv(0)), _v(F.deriv(1))
    evv = _v(E.deriv(1).deriv(1))
    guu = _v(G.deriv(0).deriv(0))
    fuv = _v(F.deriv(0).deriv(1))

    def det3(m):
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    m1 = [
        [-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev],
        [fv - 0.5 * gu, e, f],
        [0.5 * gv, f, g],
    ]
    m2 = [
        [np.zeros_like(e), 0.5 * ev, 0.5 * gu],
        [0.5 * ev, e, f],
        [0.5 * gu, f, g],
    ]
    det_g = e * g - f * f
    return (det3(m1) - det3(m2)) / (det_g * det_g)


def induced_metric_components(geom: SurfaceGeometry, L: float):
    """E, F, G jets of the induced metric g_L(T_i, T_j) on the patch."""
    on_tu, on_tv = _coframe_on_tangents(geom)
    weights = (1.0, 1.0, float(L))
    E = sum(w * p * p for w, p in zip(weights, on_tu))
    G = sum(w * p * p for w, p in zip(weights, on_tv))
    F = sum(w * p * q for w, p, q in zip(weights, on_tu, on_tv))
    return E, F, G


def induced_metric_gauss_oracle(geom: SurfaceGeometry, L: float):
    """Gaussian curvature via the induced metric; independent of the forms."""
    return metric_gauss_curvature(*induced_metric_components(geom, L))


# -- curves on the surface ----------------------------------------------------


@dataclass(frozen=True)
class CurveOnSurface:
    """Parameter-plane curve t -> (u(t), v(t)) with its parameter interval."""

    u: ScalarField
    v: ScalarField
    t0: float
    t1: float

    @staticmethod
    def parse(texts, interval) -> "CurveOnSurface":
        if len(texts) != 2:
            raise ValueError("a curve needs expressions for u(t) and v(t)")
        cu = ScalarField.parse(texts[0], ("t",))
        cv = ScalarField.parse(texts[1], ("t",))
        t0, t1 = float(interval[0]), float(interval[1])
        if not t1 > t0:
            raise ValueError("curve interval must have positive length")
        return CurveOnSurface(cu, cv, t0, t1)

    def jets(self, t, order: int = 3):
        tj = Jet.seeds([np.asarray(t, dtype=float)], order)[0]
        return self.u.jet({"t": tj}), self.v.jet({"t": tj})


class CurveGeometry:
    """Adapted-frame data along a curve, as jets in the curve parameter.

    Solves gamma' = x f2 + y f3 by normal equations in chart components and
    cross-checks y against the contact-form shortcut e^3(gamma').
    """

    def __init__(self, model, patch, curve: CurveOnSurface, t):
        self.curve = curve
        cu, cv = curve.jets(t)
        self.udot = cu.deriv(0)
        self.vdot = cv.deriv(0)
        u0, v0 = np.asarray(cu.value), np.asarray(cv.value)
        self.geom = SurfaceGeometry(model, patch, u0, v0)
        self.pull = Composer([cu - u0, cv - v0]).pull

        phi_t = [self.pull(p) for p in self.geom.phi]
        self.gamma_dot = [p.deriv(0) for p in phi_t]
        speed2 = sum(c * c for c in self.gamma_dot)
        sp = _v(speed2)
        if np.any(sp <= 0):
            raise NumericalError("curve has a stationary point in the sampled range")
        self.chart_speed = np.sqrt(sp)

        f2_t = [self.pull(c) for c in self.geom.f2]
        f3_t = [self.pull(c) for c in self.geom.f3]
        m11 = sum(c * c for c in f2_t)
        m12 = sum(a * b for a, b in zip(f2_t, f3_t))
        m22 = sum(c * c for c in f3_t)
        r1 = sum(a * b for a, b in zip(f2_t, self.gamma_dot))
        r2 = sum(a * b for a, b in zip(f3_t, self.gamma_dot))
        det = m11 * m22 - m12 * m12
        self.x = (r1 * m22 - r2 * m12) / det
        self.y = (m11 * r2 - m12 * r1) / det

        omega_t = [self.pull(c) for c in self.geom.omega_s]
        shortcut = pair_oneform(omega_t, self.gamma_dot)
        gap = np.max(np.abs(_v(self.y) - _v(shortcut)))
        scale = 1.0 + float(np.max(self.chart_speed))
        if gap > 1e-10 * scale:
            raise NumericalError(
                f"tangent decomposition disagrees with the contact pairing by {gap:.3e}"
            )

        self.A = self.pull(self.geom.A)

    def transversality(self):
        """min |y| / |gamma'| over the sampled parameters."""
        return float(np.min(np.abs(_v(self.y)) / self.chart_speed))

    def require_transverse(self):
        worst = self.transversality()
        if worst < EPS_TRANS:
            raise TransversalityError(
                f"curve is tangent to the horizontal line field: min |y|/|gamma'| "
                f"= {worst:.3e} (threshold {EPS_TRANS:.0e})"
            )


def curve_decomposition(model, patch, curve, t):
    """Components (x, y) of gamma' in the (f2, f3) tangent basis."""
    cg = CurveGeometry(model, patch, curve, t)
    return _v(cg.x), _v(cg.y)


def normal_curvature_limit(model, patch, curve, t):
    """Limit normal curvature sign(y) A along a transverse curve."""
    cg = CurveGeometry(model, patch, curve, t)
    cg.require_transverse()
    return np.sign(_v(cg.y)) * _v(cg.A)


def normal_curvature_L(model, patch, curve, t, L: float, cg: CurveGeometry = None):
    """Signed curvature of the curve in the surface under the L metric.

    Evaluates -y_L (x_L)' + x_L (y_L)' + W23_L(gamma') per unit of induced
    arclength: the derivative and form terms are divided by |gamma'|_L so any
    parametrization may be used.
    """
    if cg is None:
        cg = CurveGeometry(model, patch, curve, t)
    cg.require_transverse()
    x, y, A = cg.x, cg.y, cg.A
    norm = jsqrt(x * x + y * y * (A * A + L))
    xl = x / norm
    yl = y * jsqrt(A * A + L) / norm

    form = projected_connection_form(cg.geom, L)
    p_t, q_t = cg.pull(form.P), cg.pull(form.Q)
    along = p_t * cg.udot + q_t * cg.vdot

    num = -yl * xl.deriv(0) + xl * yl.deriv(0) + along
    return _v(num) / _v(norm)


def metric_geodesic_curvature(comps, dcomps, cdot, cddot):
    """Signed geodesic curvature of a curve in a 2D metric, via Christoffels.

    comps = (E, F, G) values along the curve, dcomps = ((Eu, Ev), (Fu, Fv),
    (Gu, Gv)) their parameter derivatives, cdot and cddot the curve's
    velocity and acceleration. The sign convention takes the normal as the
    +90 degree rotation of the tangent in the (du, dv) orientation.
    """
    e, f, g = comps
    det = e * g - f * f
    inv = ((g / det, -f / det), (-f / det, e / det))
    # d_k g_ij indexed [i][j][k]
    dg = ((dcomps[0], dcomps[1]), (dcomps[1], dcomps[2]))

    acc = []
    for i in range(2):
        term = cddot[i]
        for j in range(2):
            for k in range(2):
                chris = sum(
                    0.5 * inv[i][m] * (dg[m][j][k] + dg[m][k][j] - dg[j][k][m])
                    for m in range(2)
                )
                term = term + chris * cdot[j] * cdot[k]
        acc.append(term)

    v2 = e * cdot[0] ** 2 + 2 * f * cdot[0] * cdot[1] + g * cdot[1] ** 2
    # n = J(cdot) / |cdot| with J the +90 degree rotation
    root = np.sqrt(det)
    jn = ((-f * cdot[0] - g * cdot[1]) / root, (e * cdot[0] + f * cdot[1]) / root)
    pairing = e * acc[0] * jn[0] + f * (acc[0] * jn[1] + acc[1] * jn[0]) + g * acc[1] * jn[1]
    return pairing / (v2 * np.sqrt(v2))  # g(a, J cdot) / v^3 = g(a, n) / v^2


def geodesic_curvature_oracle(model, patch, curve, t, L: float, cg: CurveGeometry = None):
    """Geodesic curvature of the curve in the induced 2D metric.

    Independent of the connection-form pipeline: only the induced metric
    components, their parameter derivatives, and the curve's first two
    derivatives enter. The orientation matches N_L = -y_L X2 + x_L X3.
    """
    if cg is None:
        cg = CurveGeometry(model, patch, curve, t)
    cg.require_transverse()
    E, F, G = induced_metric_components(cg.geom, L)

    comps = tuple(_v(cg.pull(c)) for c in (E, F, G))
    dcomps = tuple(
        (_v(cg.pull(c.deriv(0))), _v(cg.pull(c.deriv(1)))) for c in (E, F, G)
    )
    cdot = (_v(cg.udot), _v(cg.vdot))
    cddot = (_v(cg.udot.deriv(0)), _v(cg.vdot.deriv(0)))
    return metric_geodesic_curvature(comps, dcomps, cdot, cddot)
