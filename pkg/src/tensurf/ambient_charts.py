"""Curvilinear coordinate charts of Euclidean space.

The rest of the package works in Cartesian components.  This module checks
the curvilinear apparatus directly: bases, metrics, Kronecker relations,
Christoffel symbols, and the vanishing covariant derivative of the metric and
the basis.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .tensor_algebra import check_finite

FD_STEP = 1e-5
AXIS_MARGIN = 1e-3
SINGULAR_CONDITION = 1e12


class ChartError(ValueError):
    pass


class ChartSingularityError(ChartError):
    pass


@dataclass(frozen=True)
class AmbientChart:
    """Coordinate map Z -> Cartesian R with its analytic Jacobian.

    ``jet1(Z)`` returns the covariant basis as rows: ``jet1(Z)[i] = dR/dZ^i``.
    """

    name: str
    dim: int
    map: Callable
    jet1: Callable
    lower: tuple
    upper: tuple

    def contains(self, Z, margin=0.0):
        Z = np.asarray(Z, dtype=float)
        return bool(np.all(Z >= np.asarray(self.lower) + margin)
                    and np.all(Z <= np.asarray(self.upper) - margin))

    def random_points(self, count, rng, margin=0.0):
        lo = np.asarray(self.lower) + margin
        hi = np.asarray(self.upper) - margin
        return lo + (hi - lo) * rng.random((count, self.dim))


@dataclass(frozen=True)
class AmbientFrame:
    Z_cov: np.ndarray       # rows Z_i
    Z_contra: np.ndarray    # rows Z^i
    g_cov: np.ndarray
    g_contra: np.ndarray
    christoffel: np.ndarray  # [k, i, j] = Gamma^k_ij


def _basis(chart, Z):
    Z = np.asarray(Z, dtype=float)
    if Z.shape != (chart.dim,):
        raise ChartError(f"{chart.name}: expected {chart.dim} coordinates, got shape {Z.shape}")
    check_finite(Z, what="coordinates")
    if not chart.contains(Z):
        raise ChartError(f"{chart.name}: point {Z.tolist()} is outside the chart domain")
    return np.asarray(chart.jet1(Z), dtype=float)


def _partials(fn, Z, h, order=2):
    """Central differences of fn along every coordinate; result indexed [k, ...]."""
    out = []
    for k in range(len(Z)):
        e = np.zeros(len(Z))
        e[k] = h
        if order == 2:
            out.append((fn(Z + e) - fn(Z - e)) / (2 * h))
        else:
            out.append((-fn(Z + 2 * e) + 8 * fn(Z + e) - 8 * fn(Z - e) + fn(Z - 2 * e)) / (12 * h))
    return np.stack(out)


def frame_at(chart, Z, h=FD_STEP):
    Z = np.asarray(Z, dtype=float)
    Z_cov = _basis(chart, Z)
    g_cov = Z_cov @ Z_cov.T
    if np.linalg.cond(g_cov) > SINGULAR_CONDITION:
        raise ChartSingularityError(f"{chart.name}: metric is singular at {Z.tolist()}")
    g_contra = np.linalg.inv(g_cov)
    Z_contra = g_contra @ Z_cov
    dZ = _partials(lambda P: chart.jet1(P), Z, h)      # [j, i, :] = d Z_i / d Z^j
    christoffel = np.einsum("kn,jin->kij", Z_contra, dZ)
    return AmbientFrame(Z_cov, Z_contra, g_cov, g_contra, christoffel)


@dataclass(frozen=True)
class MetrinilicResidual:
    r_metric: float
    r_basis: float


def metrinilic_residual(chart, Z, h=FD_STEP):
    """Residuals of nabla_k Z_ij = 0 and nabla_k Z_i = 0.

    The Christoffel symbols come from second-order central differences of the
    basis with step h.  The partial derivatives they are compared against use
    a fourth-order stencil with the same step, so both residuals measure the
    O(h^2) truncation error of the Christoffel symbols.
    """
    Z = np.asarray(Z, dtype=float)
    frame = frame_at(chart, Z, h)
    if not chart.contains(Z - 2 * h) or not chart.contains(Z + 2 * h):
        raise ChartError(f"{chart.name}: no room for the difference stencil at {Z.tolist()}")
    G = frame.christoffel
    dg = _partials(lambda P: chart.jet1(P) @ chart.jet1(P).T, Z, h, order=4)   # [k, i, j]
    nabla_g = (dg - np.einsum("mki,mj->kij", G, frame.g_cov)
               - np.einsum("mkj,im->kij", G, frame.g_cov))
    dbasis = _partials(lambda P: chart.jet1(P), Z, h, order=4)               # [k, i, :]
    nabla_basis = dbasis - np.einsum("mki,mn->kin", G, frame.Z_cov)
    return MetrinilicResidual(float(np.max(np.abs(nabla_g))), float(np.max(np.abs(nabla_basis))))


def kronecker_residuals(chart, Z):
    """(max |Z^ij Z_jk - delta|, max |Z^i . Z_j - delta|)."""
    f = frame_at(chart, Z)
    eye = np.eye(chart.dim)
    return (float(np.max(np.abs(f.g_contra @ f.g_cov - eye))),
            float(np.max(np.abs(f.Z_contra @ f.Z_cov.T - eye))))


# ----------------------------------------------------------------------------
# built-in charts

def cartesian_chart(dim=3):
    return AmbientChart(
        "cartesian", dim, lambda Z: np.asarray(Z, dtype=float), lambda Z: np.eye(dim),
        (-10.0,) * dim, (10.0,) * dim)


def _spherical_map(Z):
    r, t, p = Z
    return np.array([r * np.sin(t) * np.cos(p), r * np.sin(t) * np.sin(p), r * np.cos(t)])


def _spherical_jet(Z):
    r, t, p = Z
    st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
    return np.array([
        [st * cp, st * sp, ct],
        [r * ct * cp, r * ct * sp, -r * st],
        [-r * st * sp, r * st * cp, 0.0],
    ])


def spherical_chart(r_max=10.0):
    """Coordinates (r, colatitude, azimuth); the origin and the polar axis are excluded."""
    m = AXIS_MARGIN
    return AmbientChart("spherical", 3, _spherical_map, _spherical_jet,
                        (m, m, 0.0), (r_max, np.pi - m, 2 * np.pi))


def _cylindrical_map(Z):
    rho, p, z = Z
    return np.array([rho * np.cos(p), rho * np.sin(p), z])


def _cylindrical_jet(Z):
    rho, p, _ = Z
    return np.array([
        [np.cos(p), np.sin(p), 0.0],
        [-rho * np.sin(p), rho * np.cos(p), 0.0],
        [0.0, 0.0, 1.0],
    ])


def cylindrical_chart(rho_max=10.0, z_max=10.0):
    """Coordinates (rho, azimuth, z); the axis rho = 0 is excluded."""
    return AmbientChart("cylindrical", 3, _cylindrical_map, _cylindrical_jet,
                        (AXIS_MARGIN, 0.0, -z_max), (rho_max, 2 * np.pi, z_max))


CHARTS = {"cartesian": cartesian_chart, "spherical": spherical_chart,
          "cylindrical": cylindrical_chart}


def chart_by_name(name):
    if name not in CHARTS:
        raise ChartError(f"unknown chart {name!r}; valid: {', '.join(CHARTS)}")
    return CHARTS[name]()
