"""Tensor-product quadrature over parameter boxes and boundary edges.

Non-periodic axes use Gauss-Legendre (nodes never touch the interval ends,
hence never touch pole degeneracies); periodic axes use the trapezoid rule,
which is spectrally accurate for smooth periodic integrands.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .surface_geometry import boundary_frame, sample

GAUSS_LEGENDRE = "gauss-legendre"
PERIODIC_TRAPEZOID = "periodic-trapezoid"


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class AxisRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str


def gauss_legendre(count, a, b):
    x, w = np.polynomial.legendre.leggauss(count)
    half = 0.5 * (b - a)
    return AxisRule(a + half * (x + 1.0), half * w, GAUSS_LEGENDRE)


def periodic_trapezoid(count, a, b):
    h = (b - a) / count
    return AxisRule(a + h * np.arange(count), np.full(count, h), PERIODIC_TRAPEZOID)


@dataclass(frozen=True)
class QuadratureRule:
    axes: tuple

    @property
    def resolution(self):
        return tuple(len(ax.nodes) for ax in self.axes)

    @property
    def description(self):
        return "x".join(str(r) for r in self.resolution)

    def grid(self):
        """Nodes with shape (m, d) and matching product weights with shape (m,)."""
        mesh = np.meshgrid(*[ax.nodes for ax in self.axes], indexing="ij")
        wmesh = np.meshgrid(*[ax.weights for ax in self.axes], indexing="ij")
        nodes = np.stack([m.ravel() for m in mesh], axis=-1)
        weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=-1), axis=-1)
        return nodes, weights


def rule_for(surface, resolution, kinds=None):
    """Build a rule for ``surface``; ``resolution`` is an int or one count per axis.

    ``kinds`` optionally overrides the per-axis rule kind; the trapezoid rule
    is only accepted on periodic axes.
    """
    d = surface.param_dim
    counts = (resolution,) * d if np.isscalar(resolution) else tuple(resolution)
    if len(counts) != d:
        raise QuadratureError(f"{surface.name}: need {d} per-axis node counts, got {counts}")
    if any(int(c) < 1 for c in counts):
        raise QuadratureError("node counts must be positive")
    axes = []
    for i, count in enumerate(counts):
        kind = kinds[i] if kinds else (PERIODIC_TRAPEZOID if surface.periodic[i] else GAUSS_LEGENDRE)
        if kind == PERIODIC_TRAPEZOID and not surface.periodic[i]:
            raise QuadratureError(f"{surface.name}: axis {i} is not periodic")
        make = periodic_trapezoid if kind == PERIODIC_TRAPEZOID else gauss_legendre
        axes.append(make(int(count), surface.lower[i], surface.upper[i]))
    return QuadratureRule(tuple(axes))


def pairwise_sum(values):
    """Sum along axis 0 with a fixed binary tree; the result depends only on the input order."""
    values = np.asarray(values, dtype=float)
    while values.shape[0] > 1:
        if values.shape[0] % 2:
            values = np.concatenate([values, np.zeros((1,) + values.shape[1:])], axis=0)
        values = values[0::2] + values[1::2]
    return values[0] if values.shape[0] else np.zeros(values.shape[1:])


@dataclass(frozen=True)
class IntegralValue:
    value: object
    rule: str
    element_count: int


def _weighted_sum(values, weights, nodes, what):
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values.reshape(values.shape[0], -1)).all(axis=1)
    if not finite.all():
        bad = nodes[np.argmin(finite)]
        raise QuadratureError(f"{what} is non-finite at node {tuple(np.atleast_1d(bad).tolist())}")
    w = weights.reshape((-1,) + (1,) * (values.ndim - 1))
    total = pairwise_sum(values * w)
    return float(total) if total.ndim == 0 else total


def integrate_surface(field, surface, rule, geometry=None):
    """Integrate ``field(GeometrySample)`` against the area element.

    ``field`` returns shape (m,) for scalars or (m, n) for ambient vectors,
    integrated componentwise.  A precomputed ``geometry`` on the rule grid may
    be passed to avoid resampling.
    """
    nodes, weights = rule.grid()
    geo = sample(surface, nodes) if geometry is None else geometry
    values = np.asarray(field(geo), dtype=float)
    if values.ndim == 0:
        values = np.full(len(nodes), float(values))
    value = _weighted_sum(values, weights * geo.sqrt_g, nodes, "surface integrand")
    return IntegralValue(value, rule.description, len(nodes))


def surface_geometry_on(surface, rule):
    nodes, _ = rule.grid()
    return sample(surface, nodes)


def edge_rule(edge, count):
    make = periodic_trapezoid if edge.periodic else gauss_legendre
    return make(int(count), edge.t_lower, edge.t_upper)


def integrate_boundary(field, curve, count):
    """Integrate ``field(BoundaryFrame)`` along every non-degenerate edge of ``curve``.

    ``count`` nodes are used per edge.  Degenerate edges contribute zero.
    """
    total = None
    nodes_used = 0
    for edge in curve.edges:
        if edge.degenerate:
            continue
        ax = edge_rule(edge, count)
        frame = boundary_frame(curve.parent, edge, ax.nodes)
        values = np.asarray(field(frame), dtype=float)
        part = _weighted_sum(values, ax.weights * frame.speed, ax.nodes, "boundary integrand")
        total = part if total is None else total + part
        nodes_used += len(ax.nodes)
    if total is None:
        total = 0.0
    return IntegralValue(total, f"{count}/edge", nodes_used)


# ----------------------------------------------------------------------------
# enclosed volume

@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    stderr: float
    method: str


def _triangulate(surface, m):
    axes = []
    for i in range(2):
        if surface.periodic[i]:
            axes.append(np.linspace(surface.lower[i], surface.upper[i], m, endpoint=False))
        else:
            axes.append(np.linspace(surface.lower[i], surface.upper[i], m + 1))
    U, V = np.meshgrid(*axes, indexing="ij")
    P = surface.R(np.stack([U, V], axis=-1))
    nu, nv = P.shape[:2]
    iu = np.arange(nu if surface.periodic[0] else nu - 1)
    iv = np.arange(nv if surface.periodic[1] else nv - 1)
    I, J = np.meshgrid(iu, iv, indexing="ij")
    I1, J1 = (I + 1) % nu, (J + 1) % nv
    a, b, c, dd = P[I, J], P[I1, J], P[I1, J1], P[I, J1]
    tris = np.concatenate([
        np.stack([a, b, c], axis=-2).reshape(-1, 3, 3),
        np.stack([a, c, dd], axis=-2).reshape(-1, 3, 3),
    ])
    return tris, P.reshape(-1, 3)


def _upward_crossings(points, tris, lo, hi, cells=48):
    """Count crossings of the rays from each point in the +z direction.

    Triangles are bucketed by the xy cells their projections overlap, so each
    point is only tested against nearby triangles.
    """
    xy = tris[:, :, :2]
    e1 = xy[:, 1] - xy[:, 0]
    e2 = xy[:, 2] - xy[:, 0]
    area2 = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    keep = np.abs(area2) > 1e-14
    tris, xy, e1, e2, area2 = tris[keep], xy[keep], e1[keep], e2[keep], area2[keep]

    size = (hi[:2] - lo[:2]) / cells

    def cell_of(q):
        return np.clip(((q - lo[:2]) / size).astype(int), 0, cells - 1)

    cmin, cmax = cell_of(xy.min(axis=1)), cell_of(xy.max(axis=1))
    buckets = {}
    for t in range(len(tris)):
        for i in range(cmin[t, 0], cmax[t, 0] + 1):
            for j in range(cmin[t, 1], cmax[t, 1] + 1):
                buckets.setdefault(i * cells + j, []).append(t)

    pc = cell_of(points[:, :2])
    keys = pc[:, 0] * cells + pc[:, 1]
    counts = np.zeros(len(points), dtype=int)
    for key in np.unique(keys):
        cand = buckets.get(int(key))
        if not cand:
            continue
        cand = np.asarray(cand)
        idx = np.nonzero(keys == key)[0]
        d = points[idx, None, :2] - xy[None, cand, 0]
        u = (d[..., 0] * e2[cand, 1] - d[..., 1] * e2[cand, 0]) / area2[cand]
        v = (e1[cand, 0] * d[..., 1] - e1[cand, 1] * d[..., 0]) / area2[cand]
        z = (tris[cand, 0, 2] + u * (tris[cand, 1, 2] - tris[cand, 0, 2])
             + v * (tris[cand, 2, 2] - tris[cand, 0, 2]))
        hit = (u >= 0) & (v >= 0) & (u + v <= 1) & (z > points[idx, None, 2])
        counts[idx] = hit.sum(axis=1)
    return counts


def enclosed_volume(surface, use_hint=True, samples=4000, seed=42, mesh=96):
    """Volume enclosed by a closed surface.

    Returns the analytic hint when available.  Otherwise a Monte Carlo
    estimate: uniform points in a padded bounding box, classified by the
    parity of ray crossings against a triangulation of the parametrization.
    The reported stderr is one binomial sigma.
    """
    if not surface.closed:
        raise ValueError(f"{surface.name} is not closed")
    if use_hint and surface.volume_hint is not None:
        return VolumeEstimate(float(surface.volume_hint), 0.0, "hint")
    if surface.ambient_dim != 3:
        raise NotImplementedError("Monte Carlo volume is implemented for surfaces in R^3")
    tris, verts = _triangulate(surface, mesh)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    box = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    pts = lo + (hi - lo) * rng.random((samples, 3))
    inside = _upward_crossings(pts, tris, lo, hi) % 2 == 1
    frac = inside.mean()
    return VolumeEstimate(box * frac, box * np.sqrt(frac * (1 - frac) / samples), "monte-carlo")
