"""Expression-backed fields on the chart and jet-level exterior calculus.

Scalar fields, coordinate vector fields, and one/two-forms wrap parsed
expressions over fixed context variables. The jet-level helpers at the bottom
(bracket, exterior derivative, pairings) operate on plain sequences of jets
and are shared by the frame/surface/curvature pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import EvaluationError
from . import expr as E
from .jets import JET_FUNCTIONS, Jet, jpow

__all__ = [
    "CHART_VARS",
    "eval_jet",
    "chart_seeds",
    "ScalarField",
    "VectorFieldC",
    "OneFormC",
    "TwoFormValues",
    "directional_derivative",
    "lie_bracket",
    "exterior_derivative_oneform",
    "bracket_jets",
    "d_oneform_jets",
    "pair_oneform",
    "eval_twoform",
]

CHART_VARS = ("x", "y", "z")


def _eval(node, b):
    if isinstance(node, E.Num):
        return node.value
    if isinstance(node, E.Var):
        try:
            return b[node.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {node.name!r}", node.pos) from None
    if isinstance(node, E.Neg):
        return -_eval(node.arg, b)
    if isinstance(node, E.BinOp):
        left = _eval(node.left, b)
        right = _eval(node.right, b)
        try:
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if node.op == "/":
                return left / right
            return jpow(left, right)
        except ZeroDivisionError:
            raise EvaluationError("division by zero", node.pos) from None
        except EvaluationError as err:
            if err.position is None:
                raise EvaluationError(err.message, node.pos) from None
            raise
    if isinstance(node, E.Call):
        args = [_eval(a, b) for a in node.args]
        try:
            return JET_FUNCTIONS[node.name](*args)
        except ZeroDivisionError:
            raise EvaluationError("division by zero", node.pos) from None
        except EvaluationError as err:
            if err.position is None:
                raise EvaluationError(err.message, node.pos) from None
            raise
    raise EvaluationError(f"unknown AST node {node!r}")


def eval_jet(ast, bindings: dict) -> Jet:
    """Evaluate a parsed expression on jet bindings, exact to the binding order.

    All bindings must share the variable set, order, and base point. Domain
    errors and non-finite results raise EvaluationError rather than leaking
    NaN/inf into downstream geometry.
    """
    ref = None
    for jet in bindings.values():
        if isinstance(jet, Jet):
            if ref is None:
                ref = jet
            elif jet.nvars != ref.nvars or jet.order != ref.order:
                raise EvaluationError("bindings must share variable set and order")
    if ref is None:
        raise EvaluationError("eval_jet needs at least one jet binding")
    out = _eval(ast, bindings)
    if not isinstance(out, Jet):
        out = Jet.constant(out, ref.nvars, ref.order, ref.point)
    for c in out.coef:
        if not np.all(np.isfinite(c)):
            raise EvaluationError("non-finite value in evaluation")
    return out


def chart_seeds(p: Sequence, order: int) -> dict:
    """Jet seeds for the chart variables (x, y, z) at a point."""
    jets = Jet.seeds(list(p), order)
    return dict(zip(CHART_VARS, jets))


@dataclass(frozen=True)
class ScalarField:
    """A scalar function given by an expression over named variables."""

    ast: object
    variables: tuple[str, ...] = CHART_VARS
    source: str = ""

    @staticmethod
    def parse(text: str, variables: tuple[str, ...] = CHART_VARS) -> "ScalarField":
        return ScalarField(E.parse(text, variables), tuple(variables), text)

    def jet(self, bindings: dict) -> Jet:
        return eval_jet(self.ast, bindings)

    def at(self, p: Sequence) -> float:
        bindings = dict(zip(self.variables, Jet.seeds(list(p), 0)))
        return float(np.asarray(self.jet(bindings).value))


@dataclass(frozen=True)
class VectorFieldC:
    """Vector field in chart components (coefficients of d/dx, d/dy, d/dz)."""

    components: tuple[ScalarField, ScalarField, ScalarField]

    @staticmethod
    def parse(texts: Sequence[str]) -> "VectorFieldC":
        if len(texts) != 3:
            raise EvaluationError("a chart vector field needs 3 components")
        return VectorFieldC(tuple(ScalarField.parse(t) for t in texts))

    def jets(self, bindings: dict) -> list[Jet]:
        return [c.jet(bindings) for c in self.components]

    def at(self, p: Sequence) -> np.ndarray:
        return np.array([c.at(p) for c in self.components])


@dataclass(frozen=True)
class OneFormC:
    """One-form in chart components (coefficients of dx, dy, dz)."""

    components: tuple[ScalarField, ScalarField, ScalarField]

    @staticmethod
    def parse(texts: Sequence[str]) -> "OneFormC":
        if len(texts) != 3:
            raise EvaluationError("a chart one-form needs 3 components")
        return OneFormC(tuple(ScalarField.parse(t) for t in texts))

    def jets(self, bindings: dict) -> list[Jet]:
        return [c.jet(bindings) for c in self.components]

    def at(self, p: Sequence) -> np.ndarray:
        return np.array([c.at(p) for c in self.components])


@dataclass(frozen=True)
class TwoFormValues:
    """Two-form sample: coefficients on dx^dy, dx^dz, dy^dz at a point."""

    dxdy: float
    dxdz: float
    dydz: float

    def __call__(self, v: Sequence, w: Sequence):
        return eval_twoform((self.dxdy, self.dxdz, self.dydz), v, w)


def directional_derivative(f: ScalarField, v: VectorFieldC, p: Sequence) -> float:
    """(Vf)(p) = sum_m v^m(p) d_m f(p)."""
    bindings = chart_seeds(p, 1)
    fj = f.jet(bindings)
    out = 0.0
    for m, comp in enumerate(v.components):
        out = out + comp.at(p) * fj.partial(m)
    return float(np.asarray(out))


def lie_bracket(v: VectorFieldC, w: VectorFieldC, p: Sequence) -> np.ndarray:
    """[v, w](p) in chart components."""
    bindings = chart_seeds(p, 2)
    out = bracket_jets(v.jets(bindings), w.jets(bindings))
    return np.array([float(np.asarray(c.value)) for c in out])


def exterior_derivative_oneform(theta: OneFormC, p: Sequence) -> TwoFormValues:
    """d(theta) at p on the basis dx^dy, dx^dz, dy^dz."""
    bindings = chart_seeds(p, 2)
    c = d_oneform_jets(theta.jets(bindings))
    return TwoFormValues(*(float(np.asarray(x.value)) for x in c))


# -- jet-level helpers shared with the geometry pipeline ---------------------


def bracket_jets(v: Sequence[Jet], w: Sequence[Jet]) -> list[Jet]:
    """Lie bracket of jet-valued chart vector fields; order drops by one."""
    out = []
    for i in range(3):
        terms = [v[m] * w[i].deriv(m) - w[m] * v[i].deriv(m) for m in range(3)]
        out.append(terms[0] + terms[1] + terms[2])
    return out


def d_oneform_jets(theta: Sequence[Jet]) -> tuple[Jet, Jet, Jet]:
    """Exterior derivative coefficients (dx^dy, dx^dz, dy^dz); order drops by one.

    For theta = sum theta_n dx^n the coefficient on dx^m ^ dx^n (m < n) is
    d_m theta_n - d_n theta_m.
    """
    c_xy = theta[1].deriv(0) - theta[0].deriv(1)
    c_xz = theta[2].deriv(0) - theta[0].deriv(2)
    c_yz = theta[2].deriv(1) - theta[1].deriv(2)
    return c_xy, c_xz, c_yz


def pair_oneform(theta: Sequence, v: Sequence):
    """theta(v) = sum_m theta_m v^m for jet or float entries."""
    out = theta[0] * v[0]
    for m in (1, 2):
        out = out + theta[m] * v[m]
    return out


def eval_twoform(c: Sequence, v: Sequence, w: Sequence):
    """Evaluate a two-form (coeffs on dx^dy, dx^dz, dy^dz) on a vector pair."""
    return (
        c[0] * (v[0] * w[1] - v[1] * w[0])
        + c[1] * (v[0] * w[2] - v[2] * w[0])
        + c[2] * (v[1] * w[2] - v[2] * w[1])
    )
