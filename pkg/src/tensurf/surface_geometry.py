"""Pointwise geometry of parametric hypersurfaces in R^n.

Conventions
-----------
* Ambient components are Cartesian, so ambient covariant derivatives are
  plain partial derivatives.
* ``B_ab = N . d_a d_b R``.  The Christoffel part of the second covariant
  derivative of R is tangential and drops out of the dot product.
* Closed zoo surfaces carry the exterior normal.  Under that choice the unit
  sphere has ``B^a_b = -delta^a_b`` and mean curvature ``H = B^a_a = -2``.
  ``H`` is the plain trace and is not divided by the dimension.

Every evaluation accepts a batch of parameter points with shape ``(..., d)``.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .tensor_algebra import (
    ALTERNATING_2,
    DELTA_SYSTEM_2,
    check_finite,
    det2_via_delta,
    generalized_cross,
    raise_first_index,
)

FD_STEP_ANALYTIC = 1e-5
FD_STEP_COMPUTED = 1e-4


class DegenerateSurfaceError(ValueError):
    pass


class UnsupportedDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class ParametricSurface:
    """Analytic map from a parameter box into R^n with jets to order two.

    ``jet1(S)`` returns shape ``(..., d, n)`` and ``jet2(S)`` shape
    ``(..., d, d, n)``; ``jet2`` must be symmetric in its parameter indices.
    ``degenerate_edges`` holds ``(axis, side)`` pairs (side 0 = lower bound)
    where the parametrization collapses, e.g. the poles of a sphere.
    """

    name: str
    ambient_dim: int
    lower: tuple
    upper: tuple
    periodic: tuple
    position: Callable
    jet1: Callable
    jet2: Callable
    closed: bool = False
    volume_hint: Optional[float] = None
    area_hint: Optional[float] = None
    degenerate_edges: frozenset = frozenset()
    orientation: int = 1
    euler_characteristic: Optional[int] = None
    offset: tuple = field(default=None)

    def __post_init__(self):
        d = len(self.lower)
        if self.ambient_dim not in (3, 4) or d != self.ambient_dim - 1:
            raise UnsupportedDimensionError(
                f"{self.name}: need n in (3, 4) and d = n - 1, got n={self.ambient_dim}, d={d}")
        if len(self.upper) != d or len(self.periodic) != d:
            raise ValueError(f"{self.name}: domain bounds and periodicity flags must have length {d}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def param_dim(self):
        return self.ambient_dim - 1

    def R(self, S):
        S = np.asarray(S, dtype=float)
        out = self.position(S)
        if self.offset is not None:
            out = out + np.asarray(self.offset)
        return out

    def translated(self, shift):
        """Same surface with every position moved by ``shift``; jets are unchanged."""
        shift = np.asarray(shift, dtype=float)
        if shift.shape != (self.ambient_dim,):
            raise ValueError(f"shift must have length {self.ambient_dim}")
        base = np.zeros(self.ambient_dim) if self.offset is None else np.asarray(self.offset)
        return replace(self, offset=tuple(base + shift))

    def scaled(self, lam):
        """The surface lam * R(S)."""
        lam = float(lam)
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        pos, j1, j2 = self.position, self.jet1, self.jet2
        n, d = self.ambient_dim, self.param_dim
        return replace(
            self,
            name=f"{self.name}*{lam:g}",
            position=lambda S: lam * pos(S),
            jet1=lambda S: lam * j1(S),
            jet2=lambda S: lam * j2(S),
            volume_hint=None if self.volume_hint is None else self.volume_hint * lam ** n,
            area_hint=None if self.area_hint is None else self.area_hint * lam ** d,
            offset=None if self.offset is None else tuple(lam * np.asarray(self.offset)),
        )


@dataclass(frozen=True)
class GeometrySample:
    """Geometry at a batch of parameter points (leading axes shared by all fields)."""

    S: np.ndarray
    R: np.ndarray
    S_cov: np.ndarray      # (..., d, n)
    S_contra: np.ndarray   # (..., d, n)
    g_cov: np.ndarray      # (..., d, d)
    g_contra: np.ndarray   # (..., d, d)
    sqrt_g: np.ndarray     # (...)
    N: np.ndarray          # (..., n)
    B_cov: np.ndarray      # (..., d, d)
    B_mixed: np.ndarray    # (..., d, d), row = upper index
    H: np.ndarray
    R_scalar: np.ndarray
    orientation: int = 1

    @property
    def param_dim(self):
        return self.g_cov.shape[-1]

    @property
    def K(self):
        if self.param_dim != 2:
            raise UnsupportedDimensionError(
                f"Gaussian curvature is defined for d = 2 only (d = {self.param_dim}); "
                "use R_scalar")
        return det2_via_delta(self.B_mixed)

    @property
    def eps_lower(self):
        """Surface Levi-Civita symbol with lower indices (d = 2)."""
        if self.param_dim != 2:
            raise UnsupportedDimensionError("Levi-Civita symbols are provided for d = 2 only")
        return self.orientation * self.sqrt_g[..., None, None] * ALTERNATING_2

    @property
    def eps_upper(self):
        if self.param_dim != 2:
            raise UnsupportedDimensionError("Levi-Civita symbols are provided for d = 2 only")
        return self.orientation * ALTERNATING_2 / self.sqrt_g[..., None, None]


def _metric(S_cov):
    return np.einsum("...an,...bn->...ab", S_cov, S_cov)


def _check_regular(surface, S, g_cov):
    det = np.linalg.det(g_cov)
    scale = np.max(np.abs(np.diagonal(g_cov, axis1=-2, axis2=-1)), axis=-1) ** g_cov.shape[-1]
    bad = ~(det > 1e-24 * scale)
    if np.any(bad):
        where = np.asarray(S)[bad][0]
        raise DegenerateSurfaceError(
            f"{surface.name}: degenerate metric at parameter point {tuple(float(x) for x in where)}")
    return det


def unit_normal(surface, S):
    """Unit normal, oriented by ``surface.orientation``."""
    S = np.asarray(S, dtype=float)
    S_cov = surface.jet1(S)
    g = _metric(S_cov)
    _check_regular(surface, S, g)
    w = generalized_cross(S_cov)
    return surface.orientation * w / np.linalg.norm(w, axis=-1, keepdims=True)


def sample(surface, S):
    S = np.asarray(S, dtype=float)
    if S.shape[-1] != surface.param_dim:
        raise ValueError(f"parameter points must have {surface.param_dim} components")
    check_finite(S, what="parameter point")
    S_cov = surface.jet1(S)
    d2R = surface.jet2(S)
    g_cov = _metric(S_cov)
    det = _check_regular(surface, S, g_cov)
    g_contra = np.linalg.inv(g_cov)
    S_contra = np.einsum("...ab,...bn->...an", g_contra, S_cov)
    w = generalized_cross(S_cov)
    N = surface.orientation * w / np.linalg.norm(w, axis=-1, keepdims=True)
    B_cov = np.einsum("...n,...abn->...ab", N, d2R)
    B_cov = 0.5 * (B_cov + np.swapaxes(B_cov, -1, -2))
    B_mixed = raise_first_index(B_cov, g_contra)
    H = np.trace(B_mixed, axis1=-2, axis2=-1)
    BB = np.einsum("...ab,...ba->...", B_mixed, B_mixed)
    return GeometrySample(
        S=S, R=surface.R(S), S_cov=S_cov, S_contra=S_contra, g_cov=g_cov,
        g_contra=g_contra, sqrt_g=np.sqrt(det), N=N, B_cov=B_cov, B_mixed=B_mixed,
        H=H, R_scalar=H * H - BB, orientation=surface.orientation,
    )


def surface_christoffel(surface, S):
    """Gamma^c_{ab} = S^c . d_a d_b R, indexed [..., c, a, b]."""
    S = np.asarray(S, dtype=float)
    S_cov = surface.jet1(S)
    g_cov = _metric(S_cov)
    _check_regular(surface, S, g_cov)
    S_contra = np.einsum("...ab,...bn->...an", np.linalg.inv(g_cov), S_cov)
    gamma = np.einsum("...cn,...abn->...cab", S_contra, surface.jet2(S))
    return 0.5 * (gamma + np.swapaxes(gamma, -1, -2))


def _central_difference(fn, S, axis, h):
    step = np.zeros(S.shape[-1])
    step[axis] = h
    return (fn(S + step) - fn(S - step)) / (2 * h)


def weingarten_residual(surface, S, h=FD_STEP_ANALYTIC):
    """max |d_a N + B^b_a S_b| over components, with d_a N by central differences."""
    S = np.asarray(S, dtype=float)
    geo = sample(surface, S)
    dN = np.stack([_central_difference(lambda P: unit_normal(surface, P), S, a, h)
                   for a in range(surface.param_dim)], axis=-2)
    # B_a^b = S^{bc} B_ac equals B^b_a because B_ab is symmetric
    predicted = -np.einsum("...ba,...bn->...an", geo.B_mixed, geo.S_cov)
    return np.max(np.abs(dN - predicted), axis=(-2, -1))


def _B_field(surface):
    def fn(P):
        N = unit_normal(surface, P)
        return np.einsum("...n,...abn->...ab", N, surface.jet2(P))
    return fn


def covariant_derivative_B(surface, S, h=FD_STEP_COMPUTED):
    """nabla_a B_bc indexed [..., a, b, c]; partials of B by central differences."""
    S = np.asarray(S, dtype=float)
    B_of = _B_field(surface)
    dB = np.stack([_central_difference(B_of, S, a, h) for a in range(surface.param_dim)], axis=-3)
    B = B_of(S)
    gamma = surface_christoffel(surface, S)
    return (dB
            - np.einsum("...mab,...mc->...abc", gamma, B)
            - np.einsum("...mac,...bm->...abc", gamma, B))


def codazzi_residual(surface, S, h=FD_STEP_COMPUTED):
    """max over (a, b, c) of |nabla_a B_bc - nabla_b B_ac|."""
    nabla_B = covariant_derivative_B(surface, S, h)
    return np.max(np.abs(nabla_B - np.swapaxes(nabla_B, -3, -2)), axis=(-3, -2, -1))


def gauss_residual(surface, S):
    geo = sample(surface, S)
    if geo.param_dim != 2:
        raise UnsupportedDimensionError("the Gauss equation check is for d = 2 surfaces")
    B = geo.B_mixed
    K = geo.K
    lhs = np.einsum("...ac,...bd->...abcd", B, B) - np.einsum("...ad,...bc->...abcd", B, B)
    return np.max(np.abs(lhs - K[..., None, None, None, None] * DELTA_SYSTEM_2), axis=(-4, -3, -2, -1))


# ----------------------------------------------------------------------------
# boundaries of rectangular patches

@dataclass(frozen=True)
class BoundaryEdge:
    """One side of the parameter rectangle of a d = 2 patch.

    The edge fixes parameter ``axis`` at its lower (side 0) or upper
    (side 1) bound and runs along the other axis.
    """

    axis: int
    side: int
    t_lower: float
    t_upper: float
    periodic: bool
    degenerate: bool
    fixed_value: float

    @property
    def free_axis(self):
        return 1 - self.axis

    @property
    def outward(self):
        v = np.zeros(2)
        v[self.axis] = 1.0 if self.side == 1 else -1.0
        return v

    def point(self, t):
        t = np.asarray(t, dtype=float)
        S = np.empty(t.shape + (2,))
        S[..., self.axis] = self.fixed_value
        S[..., self.free_axis] = t
        return S


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed boundary of a patch, stored as the edges of its parameter rectangle.

    The traversal sense of every edge is fixed by ``boundary_frame`` so that
    the in-surface normal n is exterior and ``n_a eps^{ab} = T^b`` holds.
    """

    parent: ParametricSurface
    edges: tuple


def patch_boundary(surface):
    if surface.param_dim != 2:
        raise UnsupportedDimensionError("patch boundaries are implemented for d = 2")
    if surface.closed:
        raise ValueError(f"{surface.name} is closed and has no boundary")
    edges = []
    for axis in (0, 1):
        if surface.periodic[axis]:
            continue
        free = 1 - axis
        for side in (0, 1):
            value = surface.lower[axis] if side == 0 else surface.upper[axis]
            edges.append(BoundaryEdge(
                axis=axis, side=side, t_lower=surface.lower[free], t_upper=surface.upper[free],
                periodic=bool(surface.periodic[free]),
                degenerate=(axis, side) in surface.degenerate_edges, fixed_value=value))
    return BoundaryCurve(surface, tuple(edges))


@dataclass(frozen=True)
class BoundaryFrame:
    S: np.ndarray
    T: np.ndarray       # unit tangent, ambient
    n: np.ndarray       # exterior in-surface unit normal, ambient
    n_cov: np.ndarray   # n_a
    speed: np.ndarray   # |dR/dt| for the edge parameter
    geometry: GeometrySample


def boundary_frame(surface, edge, t):
    if edge.degenerate:
        raise DegenerateSurfaceError(
            f"{surface.name}: edge axis={edge.axis} side={edge.side} is degenerate")
    S = edge.point(t)
    geo = sample(surface, S)
    dR = geo.S_cov[..., edge.free_axis, :]
    speed = np.linalg.norm(dR, axis=-1)
    if np.any(speed <= 1e-300):
        raise DegenerateSurfaceError(f"{surface.name}: zero speed on unflagged boundary edge")
    T = dR / speed[..., None]
    T_up = np.einsum("...an,...n->...a", geo.S_contra, T)
    n_cov = np.einsum("...ab,...b->...a", geo.eps_lower, T_up)
    n_up = np.einsum("...ab,...b->...a", geo.g_contra, n_cov)
    # reverse traversal where needed so n leaves the parameter rectangle
    sign = np.where(n_up @ edge.outward >= 0, 1.0, -1.0)
    T = sign[..., None] * T
    n_cov = sign[..., None] * n_cov
    n = np.einsum("...a,...an->...n", n_cov, geo.S_contra)
    return BoundaryFrame(S=S, T=T, n=n, n_cov=n_cov, speed=speed, geometry=geo)
