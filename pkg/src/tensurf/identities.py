"""Both sides of the closed-surface and patch integral identities, evaluated
numerically and packaged as :class:`IdentityReport` values.

Identity ids
------------
Closed surfaces: ``IN=0``, ``INH=0``, ``INK=0``, ``IR.N``, ``IR.NH``,
``IR.NK``, and for n = 3 ``RxN=0``, ``RxNH=0``, ``RxNK=0``.  For d = 3
the K-based ids use the scalar curvature ``R_scalar`` instead.
Patches: ``patch-N``, ``patch-NH``, ``patch-NK``.
Opt-in: ``GB`` (integral of K against 2*pi*chi).
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .quadrature import enclosed_volume, integrate_boundary, integrate_surface, surface_geometry_on
from .surface_geometry import patch_boundary

DEFAULT_TOLERANCE = 1e-8
FD_TOLERANCE = 1e-6
MC_SIGMAS = 4.0
DEFAULT_BOUNDARY_NODES = 256

CLOSED_IDS = ("IN=0", "INH=0", "INK=0", "IR.N", "IR.NH", "IR.NK", "RxN=0", "RxNH=0", "RxNK=0")
PATCH_IDS = ("patch-N", "patch-NH", "patch-NK")
EXTRA_IDS = ("GB",)
ALL_IDS = CLOSED_IDS + PATCH_IDS + EXTRA_IDS
MOMENT_IDS = ("IR.N", "IR.NH", "IR.NK")


class IdentityError(ValueError):
    pass


@dataclass
class IdentityReport:
    identity_id: str
    surface: str
    resolution: str
    lhs: object
    rhs: object
    residual: float
    tolerance: float
    passed: bool
    notes: str = ""
    wall_time_ms: object = None
    extras: dict = field(default_factory=dict)

    def as_record(self):
        return {
            "identity_id": self.identity_id,
            "surface": self.surface,
            "resolution": self.resolution,
            "lhs": _plain(self.lhs),
            "rhs": _plain(self.rhs),
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": bool(self.passed),
            "wall_time_ms": self.wall_time_ms,
        }


def _plain(value):
    arr = np.asarray(value, dtype=float)
    return float(arr) if arr.ndim == 0 else [float(x) for x in arr.ravel()]


def _report(identity_id, surface, resolution, lhs, rhs, tolerance, notes=""):
    diff = np.atleast_1d(np.asarray(lhs, dtype=float) - np.asarray(rhs, dtype=float))
    residual = float(np.max(np.abs(diff)))
    if not np.isfinite(residual):
        raise IdentityError(f"{identity_id} on {surface.name}: non-finite residual")
    return IdentityReport(identity_id, surface.name, resolution, lhs, rhs, residual,
                          float(tolerance), residual <= tolerance, notes)


def _require_closed(surface, identity_id):
    if not surface.closed:
        raise IdentityError(f"{identity_id} needs a closed surface; {surface.name} has a boundary")


def _require_patch(surface, identity_id):
    if surface.closed:
        raise IdentityError(f"{identity_id} needs a patch with boundary; {surface.name} is closed")
    if surface.ambient_dim != 3:
        raise IdentityError(f"{identity_id} is implemented for patches in R^3")


def _curvature_weight(geo):
    """K for d = 2, scalar curvature for d >= 3."""
    return geo.K if geo.param_dim == 2 else geo.R_scalar


def _integral(field, surface, rule, geo):
    return integrate_surface(field, surface, rule, geometry=geo).value


def _zero(surface):
    return np.zeros(surface.ambient_dim)


def check_closed_normal(surface, rule, tol=DEFAULT_TOLERANCE, geo=None):
    _require_closed(surface, "IN=0")
    geo = geo or surface_geometry_on(surface, rule)
    lhs = _integral(lambda g: g.N, surface, rule, geo)
    return _report("IN=0", surface, rule.description, lhs, _zero(surface), tol)


def check_closed_curvature_normal(surface, rule, tol=DEFAULT_TOLERANCE, geo=None):
    _require_closed(surface, "INH=0")
    geo = geo or surface_geometry_on(surface, rule)
    lhs = _integral(lambda g: g.N * g.H[:, None], surface, rule, geo)
    return _report("INH=0", surface, rule.description, lhs, _zero(surface), tol)


def check_closed_curvature_scalar(surface, rule, tol=DEFAULT_TOLERANCE, geo=None):
    _require_closed(surface, "INK=0")
    geo = geo or surface_geometry_on(surface, rule)
    lhs = _integral(lambda g: g.N * _curvature_weight(g)[:, None], surface, rule, geo)
    note = "" if surface.param_dim == 2 else "scalar curvature in place of K"
    return _report("INK=0", surface, rule.description, lhs, _zero(surface), tol, note)


def check_cross_identities(surface, rule, tol=DEFAULT_TOLERANCE, geo=None):
    _require_closed(surface, "RxN=0")
    if surface.ambient_dim != 3:
        raise IdentityError("cross-product identities need n = 3")
    geo = geo or surface_geometry_on(surface, rule)
    reports = []
    for ident, weight in (("RxN=0", lambda g: 1.0), ("RxNH=0", lambda g: g.H[:, None]),
                          ("RxNK=0", lambda g: g.K[:, None])):
        lhs = _integral(lambda g: np.cross(g.R, g.N) * weight(g), surface, rule, geo)
        reports.append(_report(ident, surface, rule.description, lhs, np.zeros(3), tol))
    return reports


def _moment_integrand(identity_id, shift=None):
    def rdotn(g):
        R = g.R if shift is None else g.R + shift
        return np.einsum("in,in->i", R, g.N)

    if identity_id == "IR.N":
        return rdotn
    if identity_id == "IR.NH":
        return lambda g: rdotn(g) * g.H
    if identity_id == "IR.NK":
        return lambda g: rdotn(g) * _curvature_weight(g)
    raise IdentityError(f"{identity_id!r} is not a moment identity; choose from {MOMENT_IDS}")


def check_R_dot_N(surface, rule, tol=DEFAULT_TOLERANCE, geo=None, use_volume_hint=True, seed=42):
    _require_closed(surface, "IR.N")
    geo = geo or surface_geometry_on(surface, rule)
    lhs = _integral(_moment_integrand("IR.N"), surface, rule, geo)
    vol = enclosed_volume(surface, use_hint=use_volume_hint, seed=seed)
    n = surface.ambient_dim
    notes = f"volume by {vol.method}"
    if vol.stderr > 0:
        tol = max(tol, MC_SIGMAS * n * vol.stderr)
        notes += f", stderr {vol.stderr:.3g}"
    rep = _report("IR.N", surface, rule.description, lhs, n * vol.value, tol, notes)
    rep.extras["volume"] = vol
    return rep


def check_R_dot_NH(surface, rule, tol=DEFAULT_TOLERANCE, geo=None):
    _require_closed(surface, "IR.NH")
    geo = geo or surface_geometry_on(surface, rule)
    lhs = _integral(_moment_integrand("IR.NH"), surface, rule, geo)
    area = _integral(lambda g: np.ones(len(g.H)), surface, rule, geo)
    return _report("IR.NH", surface, rule.description, lhs,
                   -(surface.ambient_dim - 1) * area, tol)


def check_R_dot_NK(surface, rule, tol=DEFAULT_TOLERANCE, geo=None):
    _require_closed(surface, "IR.NK")
    geo = geo or surface_geometry_on(surface, rule)
    lhs = _integral(_moment_integrand("IR.NK"), surface, rule, geo)
    total_H = _integral(lambda g: g.H, surface, rule, geo)
    if surface.param_dim == 2:
        rhs, note = -0.5 * total_H, ""
    else:
        rhs, note = -(surface.ambient_dim - 2) * total_H, "scalar curvature in place of K"
    return _report("IR.NK", surface, rule.description, lhs, rhs, tol, note)


def check_origin_invariance(identity_id, surface, shift, rule, tol=DEFAULT_TOLERANCE, geo=None):
    """|moment(R + shift) - moment(R)| for a moment identity."""
    _require_closed(surface, identity_id)
    shift = np.asarray(shift, dtype=float)
    if shift.shape != (surface.ambient_dim,):
        raise IdentityError(f"shift must have {surface.ambient_dim} components")
    geo = geo or surface_geometry_on(surface, rule)
    base = _integral(_moment_integrand(identity_id), surface, rule, geo)
    moved = _integral(_moment_integrand(identity_id, shift), surface, rule, geo)
    return _report(f"origin:{identity_id}", surface, rule.description, moved, base, tol,
                   f"shift {shift.tolist()}")


def _patch_setup(patch, rule, boundary, geo):
    boundary = boundary or patch_boundary(patch)
    geo = geo or surface_geometry_on(patch, rule)
    return boundary, geo


def check_patch_normal(patch, rule, boundary_nodes=DEFAULT_BOUNDARY_NODES, tol=DEFAULT_TOLERANCE,
                       boundary=None, geo=None):
    """Integral of N against half the boundary integral of R x T."""
    _require_patch(patch, "patch-N")
    boundary, geo = _patch_setup(patch, rule, boundary, geo)
    lhs = _integral(lambda g: g.N, patch, rule, geo)
    rhs = 0.5 * integrate_boundary(lambda f: np.cross(f.geometry.R, f.T), boundary,
                                   boundary_nodes).value
    return _report("patch-N", patch, f"{rule.description}/{boundary_nodes}", lhs, rhs, tol)


def check_patch_curvature_normal(patch, rule, boundary_nodes=DEFAULT_BOUNDARY_NODES,
                                 tol=DEFAULT_TOLERANCE, boundary=None, geo=None):
    """Integral of N H against the boundary integral of the exterior in-surface normal."""
    _require_patch(patch, "patch-NH")
    boundary, geo = _patch_setup(patch, rule, boundary, geo)
    lhs = _integral(lambda g: g.N * g.H[:, None], patch, rule, geo)
    rhs = integrate_boundary(lambda f: f.n, boundary, boundary_nodes).value
    return _report("patch-NH", patch, f"{rule.description}/{boundary_nodes}", lhs, rhs, tol)


def _patch_nk_flux(frame):
    g = frame.geometry
    # (n_b H - n_a B^a_b) S^b
    first = g.H[:, None] * frame.n
    second = np.einsum("ia,iab,ibn->in", frame.n_cov, g.B_mixed, g.S_contra)
    return first - second


def check_patch_curvature_scalar(patch, rule, boundary_nodes=DEFAULT_BOUNDARY_NODES,
                                 tol=DEFAULT_TOLERANCE, boundary=None, geo=None):
    _require_patch(patch, "patch-NK")
    boundary, geo = _patch_setup(patch, rule, boundary, geo)
    lhs = _integral(lambda g: g.N * g.K[:, None], patch, rule, geo)
    rhs = 0.5 * integrate_boundary(_patch_nk_flux, boundary, boundary_nodes).value
    return _report("patch-NK", patch, f"{rule.description}/{boundary_nodes}", lhs, rhs, tol)


def gauss_bonnet_integral(surface, rule, geo=None):
    geo = geo or surface_geometry_on(surface, rule)
    return _integral(lambda g: g.K, surface, rule, geo)


def check_gauss_bonnet(surface, rule, tol=DEFAULT_TOLERANCE, geo=None):
    _require_closed(surface, "GB")
    if surface.euler_characteristic is None:
        raise IdentityError(f"{surface.name} has no recorded Euler characteristic")
    lhs = gauss_bonnet_integral(surface, rule, geo)
    return _report("GB", surface, rule.description, lhs,
                   2 * np.pi * surface.euler_characteristic, tol)


def check_topological_invariance(resolution=64, tol=1e-7, torus_tol=1e-8):
    """Integral of K over sphere, ellipsoid (same topology, other shape) and torus.

    lhs = (sphere, ellipsoid, torus, sphere - ellipsoid), rhs = (4 pi, 4 pi, 0, 0).
    """
    from .quadrature import rule_for
    from .zoo import make_ellipsoid, make_sphere, make_torus

    values = [gauss_bonnet_integral(e.surface, rule_for(e.surface, resolution))
              for e in (make_sphere(), make_ellipsoid(1.0, 1.3, 0.7), make_torus(2.0, 0.5))]
    lhs = np.array(values + [values[0] - values[1]])
    rhs = np.array([4 * np.pi, 4 * np.pi, 0.0, 0.0])
    err = np.abs(lhs - rhs)
    passed = bool(err[[0, 1, 3]].max() <= tol and err[2] <= torus_tol)
    return IdentityReport("GB-invariance", "sphere/ellipsoid/torus", str(resolution), lhs, rhs,
                          float(err.max()), tol, passed, f"torus tolerance {torus_tol:g}")


def applicable_ids(surface):
    if not surface.closed:
        return PATCH_IDS if surface.ambient_dim == 3 else ()
    ids = CLOSED_IDS[:6]
    if surface.ambient_dim == 3:
        ids += CLOSED_IDS[6:]
    return ids


def run_identity(identity_id, surface, rule, tol=DEFAULT_TOLERANCE,
                 boundary_nodes=DEFAULT_BOUNDARY_NODES, seed=42, geo=None, timing=False):
    """Evaluate one identity by id; cross-product ids are split out individually."""
    start = time.perf_counter()
    geo = geo or surface_geometry_on(surface, rule)
    if identity_id in ("RxN=0", "RxNH=0", "RxNK=0"):
        rep = {r.identity_id: r for r in check_cross_identities(surface, rule, tol, geo)}[identity_id]
    elif identity_id == "IR.N":
        rep = check_R_dot_N(surface, rule, tol, geo, seed=seed)
    elif identity_id in PATCH_IDS:
        fn = {"patch-N": check_patch_normal, "patch-NH": check_patch_curvature_normal,
              "patch-NK": check_patch_curvature_scalar}[identity_id]
        rep = fn(surface, rule, boundary_nodes, tol, geo=geo)
    else:
        fn = {"IN=0": check_closed_normal, "INH=0": check_closed_curvature_normal,
              "INK=0": check_closed_curvature_scalar, "IR.NH": check_R_dot_NH,
              "IR.NK": check_R_dot_NK, "GB": check_gauss_bonnet}.get(identity_id)
        if fn is None:
            raise IdentityError(f"unknown identity {identity_id!r}; valid: {', '.join(ALL_IDS)}")
        rep = fn(surface, rule, tol, geo)
    if timing:
        rep.wall_time_ms = round(1000 * (time.perf_counter() - start), 3)
    return rep
