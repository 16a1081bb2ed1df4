"""Tensor apparatus of parametric hypersurfaces in R^n and numerical checks
of integral identities for the unit normal, curvature normal, and Gaussian
(scalar) curvature."""

from .identities import IdentityReport
from .quadrature import QuadratureRule, enclosed_volume, integrate_boundary, integrate_surface, rule_for
from .surface_geometry import (GeometrySample, ParametricSurface, boundary_frame, codazzi_residual,
                               gauss_residual, patch_boundary, sample, surface_christoffel,
                               weingarten_residual)
from .zoo import from_selector

__version__ = "0.1.0"
