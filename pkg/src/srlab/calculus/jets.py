"""Truncated multivariate Taylor arithmetic (jets).

A Jet stores the Taylor coefficients c_alpha = (d^alpha f)(p) / alpha! of a
smooth function at a base point, for all multi-indices alpha of total order
up to `order` in up to three independent variables. Arithmetic, the fixed
function set, derivative extraction, and truncated composition are all exact
to the stored order, so no finite-difference noise enters downstream
geometry. Coefficients may be floats or numpy arrays of equal shape, which
evaluates a whole batch of base points in one pass.

Orders are tracked structurally: an operation between jets of different
orders truncates to the lower one, and derivative extraction lowers the
order by one, so a jet of order k always carries exact coefficients through
total degree k. The public evaluation entry points use order 3; the frame
chain internally seeds chart jets at order 4 (the hard cap) because contact
normalization costs one extra derivative for general inline frames.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..errors import EvaluationError

__all__ = [
    "MAX_ORDER",
    "Jet",
    "compose",
    "jsin",
    "jcos",
    "jtan",
    "jsinh",
    "jcosh",
    "jtanh",
    "jexp",
    "jlog",
    "jsqrt",
    "jatan2",
    "jpow",
    "JET_FUNCTIONS",
]

MAX_ORDER = 4
MAX_VARS = 3


class _Tables:
    __slots__ = ("nvars", "order", "indices", "pos", "ncoef", "mul_pairs", "deriv_maps")

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        idx = [
            a
            for a in itertools.product(range(order + 1), repeat=nvars)
            if sum(a) <= order
        ]
        # degree-major ordering, so truncation to a lower order is a prefix slice
        idx.sort(key=lambda a: (sum(a), a))
        self.indices = tuple(idx)
        self.pos = {a: i for i, a in enumerate(idx)}
        self.ncoef = len(idx)
        pairs: list[list[tuple[int, int]]] = [[] for _ in idx]
        for i, a in enumerate(idx):
            for j, b in enumerate(idx):
                g = tuple(x + y for x, y in zip(a, b))
                if sum(g) <= order:
                    pairs[self.pos[g]].append((i, j))
        self.mul_pairs = tuple(tuple(p) for p in pairs)
        # deriv_maps[k][out_position] = (source_position, integer_factor)
        maps = []
        for k in range(nvars):
            lower = [a for a in idx if sum(a) <= order - 1]
            entries = []
            for b in lower:
                src = list(b)
                src[k] += 1
                entries.append((self.pos[tuple(src)], b[k] + 1))
            maps.append(tuple(entries))
        self.deriv_maps = tuple(maps)


@lru_cache(maxsize=None)
def _tables(nvars: int, order: int) -> _Tables:
    if not 1 <= nvars <= MAX_VARS:
        raise ValueError(f"jets support 1..{MAX_VARS} variables, got {nvars}")
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jets support orders 0..{MAX_ORDER}, got {order}")
    return _Tables(nvars, order)


def _any(cond) -> bool:
    return bool(np.any(cond))


class Jet:
    """Taylor expansion of a scalar quantity at a base point, exact to `order`."""

    __slots__ = ("nvars", "order", "coef", "point")

    # keep numpy from broadcasting ndarray <op> Jet elementwise
    __array_ufunc__ = None

    def __init__(self, nvars: int, order: int, coef: list, point=None):
        self.nvars = nvars
        self.order = order
        self.coef = coef
        self.point = point

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(value, nvars: int, order: int, point=None) -> "Jet":
        t = _tables(nvars, order)
        coef = [0.0] * t.ncoef
        coef[0] = value
        return Jet(nvars, order, coef, point)

    @staticmethod
    def variable(value, index: int, nvars: int, order: int, point=None) -> "Jet":
        t = _tables(nvars, order)
        coef = [0.0] * t.ncoef
        coef[0] = value
        if order >= 1:
            unit = tuple(1 if k == index else 0 for k in range(nvars))
            coef[t.pos[unit]] = 1.0
        return Jet(nvars, order, coef, point)

    @staticmethod
    def seeds(values: Sequence, order: int) -> list["Jet"]:
        """Independent-variable seeds at a common base point."""
        nvars = len(values)
        point = tuple(values)
        return [Jet.variable(v, i, nvars, order, point) for i, v in enumerate(values)]

    # -- accessors ----------------------------------------------------------

    @property
    def value(self):
        return self.coef[0]

    def partial(self, i: int):
        """First partial derivative with respect to variable i."""
        t = _tables(self.nvars, self.order)
        unit = tuple(1 if k == i else 0 for k in range(self.nvars))
        return self.coef[t.pos[unit]]

    def partial2(self, i: int, j: int):
        """Second mixed partial; symmetric in (i, j) by construction."""
        t = _tables(self.nvars, self.order)
        a = [0] * self.nvars
        a[i] += 1
        a[j] += 1
        fact = 2.0 if i == j else 1.0
        return self.coef[t.pos[tuple(a)]] * fact

    def derivative(self, alpha: Sequence[int]):
        """Mixed partial d^alpha f at the base point (Taylor coef times alpha!)."""
        t = _tables(self.nvars, self.order)
        fact = 1.0
        for a in alpha:
            fact *= math.factorial(a)
        return self.coef[t.pos[tuple(alpha)]] * fact

    def deriv(self, k: int) -> "Jet":
        """Jet of the partial derivative with respect to variable k (order drops by 1)."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        t = _tables(self.nvars, self.order)
        coef = [self.coef[src] * fac if fac != 1 else self.coef[src]
                for src, fac in t.deriv_maps[k]]
        return Jet(self.nvars, self.order - 1, coef, self.point)

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        n = _tables(self.nvars, order).ncoef
        return Jet(self.nvars, order, self.coef[:n], self.point)

    # -- arithmetic ---------------------------------------------------------

    def _meta(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets combine only over a shared variable set")
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order)
        return None

    def __add__(self, other):
        pair = self._meta(other)
        if pair is None:
            coef = list(self.coef)
            coef[0] = coef[0] + other
            return Jet(self.nvars, self.order, coef, self.point)
        a, b = pair
        coef = [x + y for x, y in zip(a.coef, b.coef)]
        return Jet(a.nvars, a.order, coef, a.point or b.point)

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._meta(other)
        if pair is None:
            coef = list(self.coef)
            coef[0] = coef[0] - other
            return Jet(self.nvars, self.order, coef, self.point)
        a, b = pair
        coef = [x - y for x, y in zip(a.coef, b.coef)]
        return Jet(a.nvars, a.order, coef, a.point or b.point)

    def __rsub__(self, other):
        coef = [-c for c in self.coef]
        coef[0] = other + coef[0]
        return Jet(self.nvars, self.order, coef, self.point)

    def __neg__(self):
        return Jet(self.nvars, self.order, [-c for c in self.coef], self.point)

    def __mul__(self, other):
        pair = self._meta(other)
        if pair is None:
            return Jet(self.nvars, self.order, [c * other for c in self.coef], self.point)
        a, b = pair
        ac, bc = a.coef, b.coef
        out = []
        for plist in _tables(a.nvars, a.order).mul_pairs:
            i, j = plist[0]
            s = ac[i] * bc[j]
            for i, j in plist[1:]:
                s = s + ac[i] * bc[j]
            out.append(s)
        return Jet(a.nvars, a.order, out, a.point or b.point)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * _reciprocal(other)
        return Jet(self.nvars, self.order, [c / other for c in self.coef], self.point)

    def __rtruediv__(self, other):
        return _reciprocal(self) * other

    def __pow__(self, other):
        return jpow(self, other)

    def __rpow__(self, other):
        return jpow(other, self)

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, value={self.value!r})"


# -- series composition -----------------------------------------------------


def _compose_series(u: Jet, derivs: list) -> Jet:
    """Evaluate f(u) where derivs[k] = f^(k)(u.value), k = 0..u.order."""
    du = u - u.value
    acc = Jet.constant(derivs[0], u.nvars, u.order, u.point)
    power = None
    fact = 1.0
    for k in range(1, u.order + 1):
        power = du if power is None else power * du
        fact *= k
        acc = acc + power * (derivs[k] / fact)
    return acc


def _reciprocal(u: Jet) -> Jet:
    v = u.value
    if _any(v == 0):
        raise EvaluationError("division by zero")
    derivs = [1.0 / v]
    for k in range(1, u.order + 1):
        derivs.append(derivs[-1] * (-k) / v)
    return _compose_series(u, derivs)


def _unary(np_func):
    """Wrap a value-level function for transparent use on plain numbers."""

    def decorate(jet_impl):
        def wrapper(u):
            if isinstance(u, Jet):
                return jet_impl(u)
            return np_func(u)

        wrapper.__name__ = jet_impl.__name__
        return wrapper

    return decorate


@_unary(np.sin)
def jsin(u: Jet) -> Jet:
    s, c = np.sin(u.value), np.cos(u.value)
    cycle = [s, c, -s, -c]
    return _compose_series(u, [cycle[k % 4] for k in range(u.order + 1)])


@_unary(np.cos)
def jcos(u: Jet) -> Jet:
    s, c = np.sin(u.value), np.cos(u.value)
    cycle = [c, -s, -c, s]
    return _compose_series(u, [cycle[k % 4] for k in range(u.order + 1)])


@_unary(np.tan)
def jtan(u: Jet) -> Jet:
    return jsin(u) / jcos(u)


@_unary(np.sinh)
def jsinh(u: Jet) -> Jet:
    sh, ch = np.sinh(u.value), np.cosh(u.value)
    return _compose_series(u, [sh if k % 2 == 0 else ch for k in range(u.order + 1)])


@_unary(np.cosh)
def jcosh(u: Jet) -> Jet:
    sh, ch = np.sinh(u.value), np.cosh(u.value)
    return _compose_series(u, [ch if k % 2 == 0 else sh for k in range(u.order + 1)])


@_unary(np.tanh)
def jtanh(u: Jet) -> Jet:
    return jsinh(u) / jcosh(u)


@_unary(np.exp)
def jexp(u: Jet) -> Jet:
    e = np.exp(u.value)
    return _compose_series(u, [e] * (u.order + 1))


@_unary(np.log)
def jlog(u: Jet) -> Jet:
    v = u.value
    if _any(v <= 0):
        raise EvaluationError("log of a non-positive value")
    derivs = [np.log(v)]
    for k in range(1, u.order + 1):
        # d^k log = (-1)^(k-1) (k-1)! v^-k
        derivs.append(derivs[-1] * (-(k - 1)) / v if k > 1 else 1.0 / v)
    return _compose_series(u, derivs)


@_unary(np.sqrt)
def jsqrt(u: Jet) -> Jet:
    v = u.value
    if u.order == 0:
        if _any(v < 0):
            raise EvaluationError("sqrt of a negative value")
        return Jet(u.nvars, 0, [np.sqrt(v)], u.point)
    if _any(v <= 0):
        raise EvaluationError("sqrt of a non-positive value (derivative undefined)")
    s = np.sqrt(v)
    derivs = [s]
    for k in range(1, u.order + 1):
        # d^k sqrt / d^(k-1) sqrt = (1/2 - (k-1)) / v
        derivs.append(derivs[-1] * (1.5 - k) / v)
    return _compose_series(u, derivs)


def _atan_jet(u: Jet) -> Jet:
    v = u.value
    w = 1.0 + v * v
    derivs = [np.arctan(v), 1.0 / w]
    if u.order >= 2:
        derivs.append(-2.0 * v / (w * w))
    if u.order >= 3:
        derivs.append((6.0 * v * v - 2.0) / (w * w * w))
    if u.order >= 4:
        derivs.append(24.0 * v * (1.0 - v * v) / (w * w * w * w))
    return _compose_series(u, derivs)


def jatan2(y, x):
    """Two-argument arctangent; defined away from the origin, errors at (0, 0)."""
    if not isinstance(y, Jet) and not isinstance(x, Jet):
        return np.arctan2(y, x)
    if not isinstance(y, Jet):
        y = Jet.constant(y, x.nvars, x.order, x.point)
    if not isinstance(x, Jet):
        x = Jet.constant(x, y.nvars, y.order, y.point)
    x0, y0 = x.value, y.value
    r2 = x0 * x0 + y0 * y0
    if _any(r2 == 0):
        raise EvaluationError("atan2 undefined at the origin")
    base = np.arctan2(y0, x0)
    # atan2(y, x) - atan2(y0, x0) = atan((y x0 - x y0) / (x x0 + y y0)) as a germ;
    # the denominator equals r2 > 0 at the base point
    num = y * x0 - x * y0
    den = x * x0 + y * y0
    return _atan_jet(num / den) + base


def _constant_exponent(expo: Jet):
    """Exponent value if the jet has no derivative content, else None."""
    for c in expo.coef[1:]:
        if _any(np.asarray(c) != 0):
            return None
    return expo.value


def _int_pow(base: Jet, n: int) -> Jet:
    if n == 0:
        return Jet.constant(base.value * 0.0 + 1.0, base.nvars, base.order, base.point)
    if n < 0:
        return _int_pow(_reciprocal(base), -n)
    acc = None
    sq = base
    while n:
        if n & 1:
            acc = sq if acc is None else acc * sq
        n >>= 1
        if n:
            sq = sq * sq
    return acc


def jpow(base, expo):
    """base ** expo; integer constant exponents work for any base value."""
    if not isinstance(base, Jet) and not isinstance(expo, Jet):
        return np.power(base, expo)
    if not isinstance(expo, Jet):
        e = expo
    else:
        e = _constant_exponent(expo)
        if e is None:
            # genuinely variable exponent: base must stay positive
            if not isinstance(base, Jet):
                base = Jet.constant(base, expo.nvars, expo.order, expo.point)
            if _any(base.value <= 0):
                raise EvaluationError("power with variable exponent needs a positive base")
            return jexp(expo * jlog(base))
    if not isinstance(base, Jet):
        return np.power(base, e)
    ev = np.asarray(e, dtype=float)
    if np.all(ev == np.floor(ev)) and ev.size >= 1 and np.all(ev == ev.flat[0]) and abs(ev.flat[0]) <= 1024:
        return _int_pow(base, int(ev.flat[0]))
    if _any(base.value <= 0):
        raise EvaluationError("non-integer power of a non-positive value")
    v = base.value
    # d^k (v^e) = e (e-1) ... (e-k+1) v^(e-k)
    derivs = [np.power(v, e)]
    coeff = 1.0
    for k in range(1, base.order + 1):
        coeff = coeff * (e - (k - 1))
        derivs.append(coeff * np.power(v, e - k))
    return _compose_series(base, derivs)


class Composer:
    """Reusable truncated Taylor composition against fixed displacements.

    Monomial powers of the displacement jets are built once; each pull of an
    outer jet is then a coefficient-weighted sum. Displacements must have an
    exactly zero constant term (subtract the base value before constructing).
    """

    def __init__(self, displacements: Sequence[Jet]):
        inner0 = displacements[0]
        self.outer_nvars = len(displacements)
        self.order = min(d.order for d in displacements)
        self.inner_nvars = inner0.nvars
        self.point = inner0.point
        ds = [d.truncate(self.order) for d in displacements]
        for d in ds:
            if d.nvars != self.inner_nvars:
                raise ValueError("displacements must share a variable set")
        self.powers: dict[tuple, Jet] = {}
        for a in _tables(self.outer_nvars, self.order).indices:
            if sum(a) == 0:
                continue
            k = next(i for i, ai in enumerate(a) if ai > 0)
            b = list(a)
            b[k] -= 1
            prev = self.powers.get(tuple(b))
            self.powers[a] = ds[k] if prev is None else prev * ds[k]

    def pull(self, outer: Jet) -> Jet:
        """Compose: result is exact to min(outer.order, displacement order)."""
        if not isinstance(outer, Jet):
            return Jet.constant(outer, self.inner_nvars, self.order, self.point)
        if outer.nvars != self.outer_nvars:
            raise ValueError("need one displacement per outer variable")
        order = min(outer.order, self.order)
        out_pos = _tables(outer.nvars, outer.order).pos
        acc = Jet.constant(outer.coef[0], self.inner_nvars, order, self.point)
        for a in _tables(outer.nvars, order).indices:
            if sum(a) == 0:
                continue
            acc = acc + self.powers[a].truncate(order) * outer.coef[out_pos[a]]
        return acc


def compose(outer: Jet, displacements: Sequence[Jet]) -> Jet:
    """Truncated Taylor composition: outer evaluated at base + displacements.

    Each displacement is a jet over a common inner variable set whose constant
    term is exactly zero. The result is exact to min(outer.order, inner order).
    """
    if len(displacements) != outer.nvars:
        raise ValueError("need one displacement per outer variable")
    return Composer(displacements).pull(outer)


JET_FUNCTIONS = {
    "sin": jsin,
    "cos": jcos,
    "tan": jtan,
    "sinh": jsinh,
    "cosh": jcosh,
    "tanh": jtanh,
    "exp": jexp,
    "log": jlog,
    "sqrt": jsqrt,
    "atan2": jatan2,
}
