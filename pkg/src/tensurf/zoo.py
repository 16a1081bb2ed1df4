"""Analytic test surfaces with exact jets, closed-form invariants, and the
classical minimal-surface residuals (catenary ODE, Lagrange's graph PDE).

Selectors such as ``torus:R=2,r=0.5`` address entries from the command line.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .surface_geometry import ParametricSurface, unit_normal

PI = np.pi
TWO_PI = 2 * np.pi


class ZooError(ValueError):
    pass


@dataclass(frozen=True)
class ZooEntry:
    surface: ParametricSurface
    closed_forms: dict = field(default_factory=dict)
    degenerate_loci: tuple = ()


def _split(S):
    S = np.asarray(S, dtype=float)
    return [S[..., i] for i in range(S.shape[-1])]


def _vec(*components):
    return np.stack(np.broadcast_arrays(*components), axis=-1)


def _zero_like(x):
    return np.zeros_like(x)


def orient_exterior(surface, grid=24):
    """Flip the normal of a closed surface so that it points out of the enclosed region.

    At the grid point farthest from the centroid of the samples, the outward
    normal is parallel to the ray from the centroid.
    """
    axes = []
    for lo, hi, per in zip(surface.lower, surface.upper, surface.periodic):
        h = (hi - lo) / grid
        axes.append(lo + h * (np.arange(grid) + (0.0 if per else 0.5)))
    S = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=-1)
    R = surface.R(S)
    ray = R - R.mean(axis=0)
    k = int(np.argmax(np.einsum("ij,ij->i", ray, ray)))
    from dataclasses import replace
    oriented = replace(surface, orientation=1)
    sign = np.sign(unit_normal(oriented, S[k]) @ ray[k])
    return replace(surface, orientation=int(sign) if sign else 1)


def _positive(**params):
    for key, value in params.items():
        if not np.isfinite(value) or value <= 0:
            raise ZooError(f"parameter {key} must be positive, got {value}")


# ----------------------------------------------------------------------------
# spheres and ellipsoids, parametrized by colatitude and azimuth

def _ellipsoid_jets(a, b, c):
    scale = np.array([a, b, c], dtype=float)

    def position(S):
        t, p = _split(S)
        return scale * _vec(np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t))

    def jet1(S):
        t, p = _split(S)
        st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
        return scale * np.stack([
            _vec(ct * cp, ct * sp, -st),
            _vec(-st * sp, st * cp, _zero_like(t)),
        ], axis=-2)

    def jet2(S):
        t, p = _split(S)
        st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
        tt = _vec(-st * cp, -st * sp, -ct)
        tp = _vec(-ct * sp, ct * cp, _zero_like(t))
        pp = _vec(-st * cp, -st * sp, _zero_like(t))
        return scale * np.stack([np.stack([tt, tp], axis=-2), np.stack([tp, pp], axis=-2)], axis=-3)

    return position, jet1, jet2


def _spherical_patch(name, a, b, c, theta_range, phi_range, closed, center=None, **extra):
    position, jet1, jet2 = _ellipsoid_jets(a, b, c)
    full_phi = np.isclose(phi_range[1] - phi_range[0], TWO_PI)
    degenerate = set()
    if np.isclose(theta_range[0], 0.0):
        degenerate.add((0, 0))
    if np.isclose(theta_range[1], PI):
        degenerate.add((0, 1))
    return ParametricSurface(
        name=name, ambient_dim=3, lower=(theta_range[0], phi_range[0]),
        upper=(theta_range[1], phi_range[1]), periodic=(False, bool(full_phi)),
        position=position, jet1=jet1, jet2=jet2, closed=closed,
        degenerate_edges=frozenset(degenerate),
        offset=None if center is None else tuple(float(x) for x in center), **extra)


def make_sphere(rho=1.0, center=(0.0, 0.0, 0.0)):
    _positive(rho=rho)
    surface = _spherical_patch(
        f"sphere(r={rho:g})", rho, rho, rho, (0.0, PI), (0.0, TWO_PI), True,
        center=center if np.any(center) else None,
        volume_hint=4 * PI * rho ** 3 / 3, area_hint=4 * PI * rho ** 2, euler_characteristic=2)
    return ZooEntry(orient_exterior(surface), {
        "area": 4 * PI * rho ** 2, "volume": 4 * PI * rho ** 3 / 3,
        "H": -2 / rho, "K": 1 / rho ** 2, "R_scalar": 2 / rho ** 2,
        "int_H": -8 * PI * rho, "int_K": 4 * PI,
    }, ("theta = 0", "theta = pi"))


def make_ellipsoid(a=1.0, b=1.3, c=0.7):
    _positive(a=a, b=b, c=c)
    surface = _spherical_patch(
        f"ellipsoid({a:g},{b:g},{c:g})", a, b, c, (0.0, PI), (0.0, TWO_PI), True,
        volume_hint=4 * PI * a * b * c / 3, euler_characteristic=2)
    return ZooEntry(orient_exterior(surface),
                    {"volume": 4 * PI * a * b * c / 3, "int_K": 4 * PI},
                    ("theta = 0", "theta = pi"))


def make_hemisphere(rho=1.0):
    """Upper hemisphere with the outward (upward at the pole) normal."""
    _positive(rho=rho)
    surface = _spherical_patch(f"hemisphere(r={rho:g})", rho, rho, rho,
                               (0.0, PI / 2), (0.0, TWO_PI), False, area_hint=TWO_PI * rho ** 2)
    return ZooEntry(surface, {
        "area": TWO_PI * rho ** 2, "int_N": np.array([0.0, 0.0, PI * rho ** 2]),
        "int_NH": np.array([0.0, 0.0, -TWO_PI * rho]), "H": -2 / rho, "K": 1 / rho ** 2,
    }, ("theta = 0",))


def make_spherical_cap(theta0=PI / 4, rho=1.0):
    _positive(rho=rho, theta0=theta0)
    if theta0 >= PI:
        raise ZooError("cap colatitude must be below pi")
    surface = _spherical_patch(f"cap(theta0={theta0:g})", rho, rho, rho,
                               (0.0, theta0), (0.0, TWO_PI), False)
    s = np.sin(theta0)
    return ZooEntry(surface, {
        "area": TWO_PI * rho ** 2 * (1 - np.cos(theta0)),
        "int_N": np.array([0.0, 0.0, PI * rho ** 2 * s * s]),
    }, ("theta = 0",))


def make_lune(width=PI / 2, rho=1.0):
    """Pole-to-pole slice of the sphere between two meridians."""
    _positive(rho=rho, width=width)
    surface = _spherical_patch(f"lune(width={width:g})", rho, rho, rho,
                               (0.0, PI), (0.0, width), False)
    return ZooEntry(surface, {"area": 2 * width * rho ** 2}, ("theta = 0", "theta = pi"))


# ----------------------------------------------------------------------------
# tori

def _torus_jets(R0, r):
    def position(S):
        t, p = _split(S)
        w = R0 + r * np.cos(t)
        return _vec(w * np.cos(p), w * np.sin(p), r * np.sin(t))

    def jet1(S):
        t, p = _split(S)
        st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
        w = R0 + r * ct
        return np.stack([_vec(-r * st * cp, -r * st * sp, r * ct),
                         _vec(-w * sp, w * cp, _zero_like(t))], axis=-2)

    def jet2(S):
        t, p = _split(S)
        st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
        w = R0 + r * ct
        tt = _vec(-r * ct * cp, -r * ct * sp, -r * st)
        tp = _vec(r * st * sp, -r * st * cp, _zero_like(t))
        pp = _vec(-w * cp, -w * sp, _zero_like(t))
        return np.stack([np.stack([tt, tp], axis=-2), np.stack([tp, pp], axis=-2)], axis=-3)

    return position, jet1, jet2


def _check_torus(R0, r):
    _positive(R=R0, r=r)
    if R0 <= r:
        raise ZooError(f"torus needs R > r, got R={R0}, r={r}")


def make_torus(R_major=2.0, r_minor=0.5):
    """Torus; parameters are (tube angle, azimuth)."""
    _check_torus(R_major, r_minor)
    position, jet1, jet2 = _torus_jets(R_major, r_minor)
    surface = ParametricSurface(
        name=f"torus(R={R_major:g},r={r_minor:g})", ambient_dim=3, lower=(0.0, 0.0),
        upper=(TWO_PI, TWO_PI), periodic=(True, True), position=position, jet1=jet1,
        jet2=jet2, closed=True, volume_hint=2 * PI ** 2 * R_major * r_minor ** 2,
        area_hint=4 * PI ** 2 * R_major * r_minor, euler_characteristic=0)
    return ZooEntry(orient_exterior(surface), {
        "area": 4 * PI ** 2 * R_major * r_minor,
        "volume": 2 * PI ** 2 * R_major * r_minor ** 2,
        "int_H": -4 * PI ** 2 * R_major, "int_K": 0.0,
    })


def make_half_torus(R_major=2.0, r_minor=0.5):
    """Torus cut along the meridians at azimuth 0 and pi; normal as for the closed torus."""
    _check_torus(R_major, r_minor)
    position, jet1, jet2 = _torus_jets(R_major, r_minor)
    surface = ParametricSurface(
        name=f"half-torus(R={R_major:g},r={r_minor:g})", ambient_dim=3, lower=(0.0, 0.0),
        upper=(TWO_PI, PI), periodic=(True, False), position=position, jet1=jet1, jet2=jet2,
        orientation=-1, area_hint=2 * PI ** 2 * R_major * r_minor)
    return ZooEntry(surface, {"area": 2 * PI ** 2 * R_major * r_minor})


# ----------------------------------------------------------------------------
# the 3-sphere in R^4, parameters (chi, theta, phi)

def make_hypersphere3(rho=1.0):
    _positive(rho=rho)

    def unit2(t, p):
        st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
        z = _zero_like(t)
        u = _vec(st * cp, st * sp, ct)
        ut = _vec(ct * cp, ct * sp, -st)
        up = _vec(-st * sp, st * cp, z)
        utt = -u
        utp = _vec(-ct * sp, ct * cp, z)
        upp = _vec(-st * cp, -st * sp, z)
        return u, ut, up, utt, utp, upp

    def lift(v, last):
        return np.concatenate([v, np.asarray(last)[..., None] * np.ones(v.shape[:-1] + (1,))], axis=-1)

    def position(S):
        c, t, p = _split(S)
        u = unit2(t, p)[0]
        return rho * lift(np.sin(c)[..., None] * u, np.cos(c))

    def jet1(S):
        c, t, p = _split(S)
        u, ut, up, *_ = unit2(t, p)
        sc, cc = np.sin(c)[..., None], np.cos(c)[..., None]
        z = _zero_like(c)
        return rho * np.stack([lift(cc * u, -np.sin(c)), lift(sc * ut, z), lift(sc * up, z)], axis=-2)

    def jet2(S):
        c, t, p = _split(S)
        u, ut, up, utt, utp, upp = unit2(t, p)
        sc, cc = np.sin(c)[..., None], np.cos(c)[..., None]
        z = _zero_like(c)
        cc_ = lift(-sc * u, -np.cos(c))
        ct_, cp_ = lift(cc * ut, z), lift(cc * up, z)
        tt_, tp_, pp_ = lift(sc * utt, z), lift(sc * utp, z), lift(sc * upp, z)
        return rho * np.stack([
            np.stack([cc_, ct_, cp_], axis=-2),
            np.stack([ct_, tt_, tp_], axis=-2),
            np.stack([cp_, tp_, pp_], axis=-2),
        ], axis=-3)

    area = 2 * PI ** 2 * rho ** 3
    surface = ParametricSurface(
        name=f"hypersphere3(r={rho:g})", ambient_dim=4, lower=(0.0, 0.0, 0.0),
        upper=(PI, PI, TWO_PI), periodic=(False, False, True), position=position,
        jet1=jet1, jet2=jet2, closed=True, volume_hint=PI ** 2 * rho ** 4 / 2, area_hint=area,
        degenerate_edges=frozenset({(0, 0), (0, 1), (1, 0), (1, 1)}))
    return ZooEntry(orient_exterior(surface, grid=12), {
        "area": area, "volume": PI ** 2 * rho ** 4 / 2, "H": -3 / rho,
        "R_scalar": 6 / rho ** 2, "int_H": -3 / rho * area,
    }, ("chi = 0", "chi = pi", "theta = 0", "theta = pi"))


# ----------------------------------------------------------------------------
# minimal surfaces and graphs

class Profile(NamedTuple):
    """Profile r(z) of a surface of revolution with its first two derivatives."""

    value: Callable
    first: Callable
    second: Callable


def cosh_profile(a=1.0):
    return Profile(lambda z: a * np.cosh(z / a), lambda z: np.sinh(z / a),
                   lambda z: np.cosh(z / a) / a)


def catenary_residual(r, z):
    """r''(z) r(z) - r'(z)^2 - 1 for a profile of revolution."""
    return r.second(z) * r.value(z) - r.first(z) ** 2 - 1.0


def make_catenoid(a=1.0, z_range=(-1.0, 1.0)):
    """Catenoid r(z) = a cosh(z/a); parameters (z, azimuth)."""
    _positive(a=a)
    z0, z1 = z_range
    if not (np.isfinite(z0) and np.isfinite(z1) and z0 < z1):
        raise ZooError(f"invalid z range {z_range}")

    def position(S):
        z, p = _split(S)
        w = a * np.cosh(z / a)
        return _vec(w * np.cos(p), w * np.sin(p), z)

    def jet1(S):
        z, p = _split(S)
        sh, ch = np.sinh(z / a), np.cosh(z / a)
        sp, cp = np.sin(p), np.cos(p)
        return np.stack([_vec(sh * cp, sh * sp, np.ones_like(z)),
                         _vec(-a * ch * sp, a * ch * cp, _zero_like(z))], axis=-2)

    def jet2(S):
        z, p = _split(S)
        sh, ch = np.sinh(z / a), np.cosh(z / a)
        sp, cp = np.sin(p), np.cos(p)
        zz = _vec(ch * cp / a, ch * sp / a, _zero_like(z))
        zp = _vec(-sh * sp, sh * cp, _zero_like(z))
        pp = _vec(-a * ch * cp, -a * ch * sp, _zero_like(z))
        return np.stack([np.stack([zz, zp], axis=-2), np.stack([zp, pp], axis=-2)], axis=-3)

    surface = ParametricSurface(
        name=f"catenoid(a={a:g},z=[{z0:g},{z1:g}])", ambient_dim=3, lower=(z0, 0.0),
        upper=(z1, TWO_PI), periodic=(False, True), position=position, jet1=jet1, jet2=jet2)
    return ZooEntry(surface, {"H": 0.0})


@dataclass(frozen=True)
class MongeFunction:
    """Height function F(x, y) with gradient and Hessian callables."""

    name: str
    value: Callable
    grad: Callable   # -> (F_x, F_y)
    hess: Callable   # -> (F_xx, F_xy, F_yy)


def lagrange_residual(F, x, y):
    """F_xx + F_yy + F_xx F_y^2 + F_yy F_x^2 - 2 F_x F_y F_xy."""
    Fx, Fy = F.grad(x, y)
    Fxx, Fxy, Fyy = F.hess(x, y)
    return Fxx + Fyy + Fxx * Fy ** 2 + Fyy * Fx ** 2 - 2 * Fx * Fy * Fxy


def _const(c):
    return lambda x, y: c * np.ones_like(np.asarray(x, dtype=float) + np.asarray(y, dtype=float))


def _mf(name, value, grad, hess):
    return MongeFunction(name, value, grad, hess)


HEIGHT_FUNCTIONS = {
    "zero": _mf("zero", _const(0.0), lambda x, y: (_const(0.0)(x, y),) * 2,
                lambda x, y: (_const(0.0)(x, y),) * 3),
    "linear": _mf("linear", lambda x, y: 0.3 * x - 0.7 * y + 1.0,
                  lambda x, y: (_const(0.3)(x, y), _const(-0.7)(x, y)),
                  lambda x, y: (_const(0.0)(x, y),) * 3),
    "paraboloid": _mf("paraboloid", lambda x, y: x ** 2 + y ** 2,
                      lambda x, y: (2 * x, 2 * y),
                      lambda x, y: (_const(2.0)(x, y), _const(0.0)(x, y), _const(2.0)(x, y))),
    "saddle": _mf("saddle", lambda x, y: x ** 2 - y ** 2,
                  lambda x, y: (2 * x, -2 * y),
                  lambda x, y: (_const(2.0)(x, y), _const(0.0)(x, y), _const(-2.0)(x, y))),
    "wave": _mf("wave", lambda x, y: np.sin(x) * np.cos(y),
                lambda x, y: (np.cos(x) * np.cos(y), -np.sin(x) * np.sin(y)),
                lambda x, y: (-np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y),
                              -np.sin(x) * np.cos(y))),
    "bump": _mf("bump", lambda x, y: np.exp(-(x ** 2 + y ** 2)),
                lambda x, y: (-2 * x * np.exp(-(x ** 2 + y ** 2)), -2 * y * np.exp(-(x ** 2 + y ** 2))),
                lambda x, y: ((4 * x ** 2 - 2) * np.exp(-(x ** 2 + y ** 2)),
                              4 * x * y * np.exp(-(x ** 2 + y ** 2)),
                              (4 * y ** 2 - 2) * np.exp(-(x ** 2 + y ** 2)))),
    # Scherk's first surface, minimal on |x|, |y| < pi/2
    "scherk": _mf("scherk", lambda x, y: np.log(np.cos(y) / np.cos(x)),
                  lambda x, y: (np.tan(x), -np.tan(y)),
                  lambda x, y: (1 / np.cos(x) ** 2, _const(0.0)(x, y), -1 / np.cos(y) ** 2)),
}


def make_monge_graph(F, xy_domain=((-1.0, 1.0), (-1.0, 1.0))):
    """Graph patch R = (x, y, F(x, y)); the normal has positive z-component."""
    if isinstance(F, str):
        if F not in HEIGHT_FUNCTIONS:
            raise ZooError(f"unknown height function {F!r}; choose from {sorted(HEIGHT_FUNCTIONS)}")
        F = HEIGHT_FUNCTIONS[F]
    (x0, x1), (y0, y1) = xy_domain
    if not (x0 < x1 and y0 < y1):
        raise ZooError(f"invalid domain {xy_domain}")

    def position(S):
        x, y = _split(S)
        return _vec(x, y, F.value(x, y))

    def jet1(S):
        x, y = _split(S)
        Fx, Fy = F.grad(x, y)
        one, zero = np.ones_like(x), _zero_like(x)
        return np.stack([_vec(one, zero, Fx), _vec(zero, one, Fy)], axis=-2)

    def jet2(S):
        x, y = _split(S)
        Fxx, Fxy, Fyy = F.hess(x, y)
        zero = _zero_like(x)
        xx, xy_, yy = _vec(zero, zero, Fxx), _vec(zero, zero, Fxy), _vec(zero, zero, Fyy)
        return np.stack([np.stack([xx, xy_], axis=-2), np.stack([xy_, yy], axis=-2)], axis=-3)

    name = "plane" if F.name == "zero" else f"monge({F.name})"
    surface = ParametricSurface(
        name=name, ambient_dim=3, lower=(x0, y0), upper=(x1, y1), periodic=(False, False),
        position=position, jet1=jet1, jet2=jet2, area_hint=(x1 - x0) * (y1 - y0) if F.name == "zero" else None)
    forms = {"H": 0.0, "K": 0.0} if F.name in ("zero", "linear") else {}
    return ZooEntry(surface, forms)


def make_disk(rho=1.0):
    """Flat disk in polar parameters (radius, azimuth) with upward normal."""
    _positive(rho=rho)

    def position(S):
        s, p = _split(S)
        return _vec(s * np.cos(p), s * np.sin(p), _zero_like(s))

    def jet1(S):
        s, p = _split(S)
        z = _zero_like(s)
        return np.stack([_vec(np.cos(p), np.sin(p), z), _vec(-s * np.sin(p), s * np.cos(p), z)], axis=-2)

    def jet2(S):
        s, p = _split(S)
        z = _zero_like(s)
        ss = _vec(z, z, z)
        sp = _vec(-np.sin(p), np.cos(p), z)
        pp = _vec(-s * np.cos(p), -s * np.sin(p), z)
        return np.stack([np.stack([ss, sp], axis=-2), np.stack([sp, pp], axis=-2)], axis=-3)

    surface = ParametricSurface(
        name=f"disk(r={rho:g})", ambient_dim=3, lower=(0.0, 0.0), upper=(rho, TWO_PI),
        periodic=(False, True), position=position, jet1=jet1, jet2=jet2,
        degenerate_edges=frozenset({(0, 0)}), area_hint=PI * rho ** 2)
    return ZooEntry(surface, {"area": PI * rho ** 2, "H": 0.0, "K": 0.0,
                              "int_N": np.array([0.0, 0.0, PI * rho ** 2])}, ("radius = 0",))


# ----------------------------------------------------------------------------
# selectors

def _sphere_sel(r=1.0, x=0.0, y=0.0, z=0.0):
    return make_sphere(r, (x, y, z))


def _catenoid_sel(a=1.0, z0=-1.0, z1=1.0):
    return make_catenoid(a, (z0, z1))


def _cap_sel(theta0=PI / 4, r=1.0):
    return make_spherical_cap(theta0, r)


REGISTRY = {
    "sphere": (_sphere_sel, {"r": 1.0, "x": 0.0, "y": 0.0, "z": 0.0}),
    "ellipsoid": (make_ellipsoid, {"a": 1.0, "b": 1.3, "c": 0.7}),
    "torus": (lambda R=2.0, r=0.5: make_torus(R, r), {"R": 2.0, "r": 0.5}),
    "hypersphere3": (make_hypersphere3, {"r": 1.0}),
    "hemisphere": (make_hemisphere, {"r": 1.0}),
    "cap": (_cap_sel, {"theta0": PI / 4, "r": 1.0}),
    "lune": (lambda width=PI / 2, r=1.0: make_lune(width, r), {"width": PI / 2, "r": 1.0}),
    "half-torus": (lambda R=2.0, r=0.5: make_half_torus(R, r), {"R": 2.0, "r": 0.5}),
    "disk": (make_disk, {"r": 1.0}),
    "catenoid": (_catenoid_sel, {"a": 1.0, "z0": -1.0, "z1": 1.0}),
    "plane": (lambda: make_monge_graph("zero"), {}),
    "monge": (None, {"f": "paraboloid"}),
}

_ARGNAMES = {"sphere": None, "hypersphere3": {"r": "rho"}, "hemisphere": {"r": "rho"},
             "disk": {"r": "rho"}}


def parse_selector(text):
    """Split ``name:key=value,...`` into the name and a parameter dict."""
    name, _, rest = text.strip().partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ZooError(f"malformed parameter {item!r} in selector {text!r}")
            params[key.strip()] = value.strip()
    return name, params


def from_selector(text):
    """Build a zoo entry from a selector such as ``torus:R=2,r=0.5``."""
    name, params = parse_selector(text)
    if name not in REGISTRY:
        raise ZooError(f"unknown surface {name!r}; valid: {', '.join(sorted(REGISTRY))}")
    factory, defaults = REGISTRY[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise ZooError(f"unknown parameter(s) {sorted(unknown)} for {name}; valid: {sorted(defaults)}")
    if name == "monge":
        return make_monge_graph(params.get("f", defaults["f"]))
    try:
        values = {k: float(v) for k, v in params.items()}
    except ValueError as exc:
        raise ZooError(f"non-numeric parameter in {text!r}") from exc
    rename = _ARGNAMES.get(name) or {}
    return factory(**{rename.get(k, k): v for k, v in values.items()})


def available_surfaces():
    return {name: dict(defaults) for name, (_, defaults) in REGISTRY.items()}
