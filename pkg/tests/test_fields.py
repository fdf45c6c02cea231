"""Chart-level field calculus: brackets, exterior derivatives, pairings.

The oracles here are hand-worked classical identities (the Heisenberg frame
bracket, d of an explicit one-form) plus structural identities that hold for
any smooth fields: antisymmetry of the bracket, d(df) = 0, and Jacobi.
"""

import numpy as np
import pytest

from srlab.calculus import (
    OneFormC,
    ScalarField,
    VectorFieldC,
    bracket_jets,
    chart_seeds,
    d_oneform_jets,
    directional_derivative,
    eval_jet,
    eval_twoform,
    exterior_derivative_oneform,
    lie_bracket,
    pair_oneform,
    parse,
)

E1 = VectorFieldC.parse(("1", "0", "-y/2"))
E2 = VectorFieldC.parse(("0", "1", "x/2"))
OMEGA = OneFormC.parse(("y/2", "-x/2", "1"))


class TestDirectionalDerivative:
    def test_product_along_first_frame_field(self):
        f = ScalarField.parse("x*y")
        # e1 = d/dx - (y/2) d/dz and f has no z dependence, so e1 f = y
        assert directional_derivative(f, E1, (1.0, 2.0, 0.0)) == pytest.approx(2.0)

    def test_coordinate_direction(self):
        f = ScalarField.parse("sin(z)*x")
        v = VectorFieldC.parse(("0", "0", "1"))
        p = (2.0, -1.0, 0.4)
        assert directional_derivative(f, v, p) == pytest.approx(2.0 * np.cos(0.4))


class TestLieBracket:
    @pytest.mark.parametrize("p", [(0.0, 0.0, 0.0), (1.0, -2.0, 0.5), (0.3, 0.7, -1.1)])
    def test_heisenberg_frame_bracket_is_vertical(self, p):
        # [e1, e2] = d/dz everywhere for this frame
        got = lie_bracket(E1, E2, p)
        assert got == pytest.approx([0.0, 0.0, 1.0], abs=1e-14)

    def test_antisymmetry_exact(self):
        v = VectorFieldC.parse(("y*z", "sin(x)", "exp(0.2*x*y)"))
        w = VectorFieldC.parse(("cos(z)", "x^2", "y"))
        p = (0.4, -0.8, 1.2)
        assert np.all(lie_bracket(v, w, p) == -lie_bracket(w, v, p))

    def test_jacobi_identity(self):
        u = VectorFieldC.parse(("y", "z*x", "sin(x)"))
        v = VectorFieldC.parse(("exp(0.2*y)", "x+z", "1"))
        w = VectorFieldC.parse(("cos(z)", "x^2", "y"))

        def nested(a, b, c, p):
            bind = chart_seeds(p, 2)
            inner = bracket_jets(b.jets(bind), c.jets(bind))
            outer = bracket_jets(a.jets(bind), inner)
            return np.array([float(np.asarray(t.value)) for t in outer])

        p = (0.3, -0.5, 0.9)
        total = nested(u, v, w, p) + nested(v, w, u, p) + nested(w, u, v, p)
        assert np.max(np.abs(total)) <= 1e-8


class TestExteriorDerivative:
    @pytest.mark.parametrize("p", [(0.0, 0.0, 0.0), (2.0, 3.0, -1.0)])
    def test_contact_form_of_heisenberg(self, p):
        d = exterior_derivative_oneform(OMEGA, p)
        assert (d.dxdy, d.dxdz, d.dydz) == pytest.approx((-1.0, 0.0, 0.0), abs=1e-14)
        # paired with the frame: d(omega)(e1, e2) = -1
        assert d(E1.at(p), E2.at(p)) == pytest.approx(-1.0, abs=1e-14)

    def test_d_of_exact_form_vanishes(self):
        # theta = d(x^2 y) written out by hand
        theta = OneFormC.parse(("2*x*y", "x^2", "0"))
        d = exterior_derivative_oneform(theta, (1.3, -0.7, 0.2))
        assert (d.dxdy, d.dxdz, d.dydz) == pytest.approx((0.0, 0.0, 0.0), abs=1e-14)

    def test_d_of_d_scalar_vanishes_for_random_fields(self):
        rng = np.random.default_rng(20260819)
        for _ in range(20):
            a, b, c, d = rng.uniform(-2.0, 2.0, size=4)
            text = (
                f"({a})*x^2*y + ({b})*sin(x+2*z) + ({c})*exp(0.3*y*z) + ({d})*x*y*z"
            )
            p = rng.uniform(-1.0, 1.0, size=3)
            f = eval_jet(parse(text), chart_seeds(tuple(p), 3))
            grad = [f.deriv(m) for m in range(3)]
            for coeff in d_oneform_jets(grad):
                assert abs(float(np.asarray(coeff.value))) <= 1e-12


class TestPairings:
    def test_pair_oneform_is_componentwise_sum(self):
        assert pair_oneform((1.0, 2.0, 3.0), (4.0, 5.0, 6.0)) == pytest.approx(32.0)

    def test_eval_twoform_antisymmetric(self):
        c = (0.5, -1.0, 2.0)
        v, w = (1.0, 2.0, 3.0), (-1.0, 0.5, 2.0)
        assert eval_twoform(c, v, w) == -eval_twoform(c, w, v)
        assert eval_twoform(c, v, v) == 0.0

    def test_oneform_values_at_point(self):
        p = (2.0, 4.0, 0.0)
        assert OMEGA.at(p) == pytest.approx([2.0, -1.0, 1.0])
        assert pair_oneform(OMEGA.at(p), E1.at(p)) == pytest.approx(0.0, abs=1e-15)
        assert pair_oneform(OMEGA.at(p), E2.at(p)) == pytest.approx(0.0, abs=1e-15)
