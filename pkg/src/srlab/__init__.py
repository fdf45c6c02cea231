"""Numerical laboratory for surfaces in 3D sub-Riemannian manifolds.

The package evaluates adapted frames, Riemannian-approximation curvatures,
their large-parameter limits, and Hausdorff-measure Gauss-Bonnet checks for
surfaces given by parametrizations over a contact 3-manifold chart.
"""

__version__ = "0.1.0"

from .calculus import Jet, ScalarField, VectorFieldC, parse

__all__ = ["Jet", "ScalarField", "VectorFieldC", "parse", "__version__"]
