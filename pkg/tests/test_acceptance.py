"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS`` or ``FAIL`` line with the worst observed value next
to its threshold.  Run alone with ``pytest tests/test_acceptance.py -v``; the
lines are written straight to the terminal even when output capture is on.
"""
import json
import time

import numpy as np
import pytest

from tensurf import identities as ids
from tensurf import zoo
from tensurf.ambient_charts import chart_by_name, kronecker_residuals, metrinilic_residual
from tensurf.cli import main, pointwise_residuals
from tensurf.quadrature import rule_for
from tensurf.report import to_json
from tensurf.surface_geometry import sample

PI = np.pi


@pytest.fixture
def verdict(capsys):
    def emit(number, title, checks):
        """checks: list of (label, value, threshold); passes iff every value <= threshold."""
        failed = [(lab, v, t) for lab, v, t in checks if not v <= t]
        worst = max(checks, key=lambda c: c[1] / c[2] if c[2] else (np.inf if c[1] else 0.0))
        status = "PASS" if not failed else "FAIL"
        with capsys.disabled():
            print(f"\n{status} criterion {number}: {title} "
                  f"[{len(checks)} checks, worst {worst[0]} = {worst[1]:.3g} vs {worst[2]:.0e}]")
            for lab, v, t in failed:
                print(f"    failed {lab}: {v:.3g} > {t:.0e}")
        assert not failed, failed
    return emit


def _entries():
    return {
        "sphere": zoo.make_sphere(1.0).surface,
        "ellipsoid": zoo.make_ellipsoid(1.0, 1.3, 0.7).surface,
        "torus": zoo.make_torus(2.0, 0.5).surface,
        "hypersphere3": zoo.make_hypersphere3(1.0).surface,
    }


def _inf(v):
    return float(np.max(np.abs(v)))


def test_criterion_01_closed_vanishing(verdict):
    checks = []
    s = _entries()
    for name in ("sphere", "ellipsoid", "torus"):
        rule = rule_for(s[name], 64)
        checks.append((f"{name} IN", ids.check_closed_normal(s[name], rule).residual, 1e-8))
        checks.append((f"{name} INH", ids.check_closed_curvature_normal(s[name], rule).residual, 1e-8))
        checks.append((f"{name} INK", ids.check_closed_curvature_scalar(s[name], rule).residual, 1e-8))
    h = s["hypersphere3"]
    rule = rule_for(h, (32, 32, 64))
    checks.append(("hypersphere3 IN", ids.check_closed_normal(h, rule).residual, 1e-6))
    checks.append(("hypersphere3 IN.Rs", ids.check_closed_curvature_scalar(h, rule).residual, 1e-6))
    verdict(1, "closed-surface vanishing integrals", checks)


def test_criterion_02_moment_identities(verdict):
    s = _entries()
    sph, tor, hyp = s["sphere"], s["torus"], s["hypersphere3"]
    rs, rt, rh = rule_for(sph, 64), rule_for(tor, 64), rule_for(hyp, (32, 32, 64))
    nk = ids.check_R_dot_NK(sph, rs)
    hnk = ids.check_R_dot_NK(hyp, rh)
    checks = [
        ("sphere R.N - 4pi", abs(ids.check_R_dot_N(sph, rs).lhs - 4 * PI), 1e-8),
        ("sphere R.NH + 8pi", abs(ids.check_R_dot_NH(sph, rs).lhs + 8 * PI), 1e-7),
        ("sphere R.NK - 4pi", abs(nk.lhs - 4 * PI), 1e-7),
        ("sphere R.NK vs -H/2", nk.residual, 1e-8),
        ("torus R.N - 3pi^2", abs(ids.check_R_dot_N(tor, rt).lhs - 3 * PI ** 2), 1e-7),
        ("torus R.NH + 8pi^2", abs(ids.check_R_dot_NH(tor, rt).lhs + 8 * PI ** 2), 1e-7),
        ("hypersphere3 R.N - 2pi^2", abs(ids.check_R_dot_N(hyp, rh).lhs - 2 * PI ** 2), 1e-6),
        ("hypersphere3 R.N Rs - 12pi^2", abs(hnk.lhs - 12 * PI ** 2), 1e-5),
        ("hypersphere3 R.N Rs vs -(n-2)H", hnk.residual, 1e-6),
    ]
    verdict(2, "moment identities", checks)


def test_criterion_03_cross_products(verdict):
    s = _entries()
    checks = []
    for name in ("sphere", "torus"):
        for rep in ids.check_cross_identities(s[name], rule_for(s[name], 64)):
            checks.append((f"{name} {rep.identity_id}", rep.residual, 1e-8))
    verdict(3, "cross-product identities", checks)


def test_criterion_04_patch_identities(verdict):
    hemi = zoo.make_hemisphere(1.0).surface
    rule = rule_for(hemi, 64)
    pn = ids.check_patch_normal(hemi, rule, 256)
    pnh = ids.check_patch_curvature_normal(hemi, rule, 256)
    pnk = ids.check_patch_curvature_scalar(hemi, rule, 256)
    checks = [
        ("hemisphere int N - (0,0,pi)", _inf(pn.lhs - [0, 0, PI]), 1e-8),
        ("hemisphere int N vs R x T", pn.residual, 1e-8),
        ("hemisphere int NH - (0,0,-2pi)", _inf(pnh.lhs - [0, 0, -2 * PI]), 1e-7),
        ("hemisphere int NH vs n", pnh.residual, 1e-7),
        ("hemisphere int NK vs flux", pnk.residual, 1e-7),
    ]
    cap = zoo.make_spherical_cap(PI / 4).surface
    crule = rule_for(cap, 64)
    for fn in (ids.check_patch_normal, ids.check_patch_curvature_normal,
               ids.check_patch_curvature_scalar):
        rep = fn(cap, crule, 256)
        checks.append((f"cap {rep.identity_id}", rep.residual, 1e-7))
    verdict(4, "patch boundary identities", checks)


def test_criterion_05_origin_invariance(verdict):
    rng = np.random.default_rng(5)
    shifts = [np.array(v, float) for v in ((10, 0, 0), (0, -10, 0), (0, 0, 10), (0.3, -1, 2))]
    for _ in range(4):
        v = rng.standard_normal(3)
        shifts.append(v / np.linalg.norm(v) * rng.uniform(0, 10))
    s = _entries()
    checks = []
    for name in ("sphere", "torus"):
        rule = rule_for(s[name], 64)
        for identity_id in ids.MOMENT_IDS:
            for d in shifts:
                rep = ids.check_origin_invariance(identity_id, s[name], d, rule)
                checks.append((f"{name} {identity_id} d={np.round(d, 2).tolist()}", rep.residual, 1e-7))
    verdict(5, "origin invariance of moment integrals", checks)


def _zoo_surfaces():
    sels = list(zoo.REGISTRY) + [f"monge:f={f}" for f in zoo.HEIGHT_FUNCTIONS]
    return {sel: zoo.from_selector(sel).surface for sel in sels}


def test_criterion_06_pointwise_structure(verdict):
    limits = {"gauss": 1e-13, "weingarten": 1e-8, "codazzi": 1e-6, "R=2K": 1e-10,
              "H-routes": 1e-12}
    checks = []
    for sel, s in _zoo_surfaces().items():
        values, count = pointwise_residuals(s, grid=20, h_weingarten=1e-5, h_codazzi=1e-4)
        checks.append((f"{sel} sample count shortfall", max(0, 400 - count), 0))
        for key, value in values.items():
            checks.append((f"{sel} {key}", value, limits[key]))
    verdict(6, "pointwise structural equations", checks)


def test_criterion_07_minimal_surfaces(verdict):
    cat = zoo.make_catenoid(1.0, (-1.0, 1.0)).surface
    z = np.linspace(-1, 1, 50)
    phi = np.linspace(0, 2 * PI, 50)
    S = np.stack(np.meshgrid(z, phi, indexing="ij"), axis=-1).reshape(-1, 2)
    checks = [("catenoid max|H|", _inf(sample(cat, S).H), 1e-10)]
    zc = np.linspace(-1, 1, 201)
    for a in (0.5, 1.0, 2.0):
        checks.append((f"catenary a={a}", _inf(zoo.catenary_residual(zoo.cosh_profile(a), zc)), 1e-12))
    rng = np.random.default_rng(7)
    for name in ("paraboloid", "wave", "bump"):
        F = zoo.HEIGHT_FUNCTIONS[name]
        s = zoo.make_monge_graph(F).surface
        pts = rng.uniform(s.lower, s.upper, size=(100, 2))
        x, y = pts[:, 0], pts[:, 1]
        Fx, Fy = F.grad(x, y)
        ratio = zoo.lagrange_residual(F, x, y) / (sample(s, pts).H * (1 + Fx ** 2 + Fy ** 2) ** 1.5)
        sign = np.sign(ratio[0])
        checks.append((f"monge {name} |ratio - (+-1)|", _inf(ratio - sign), 1e-10))
    verdict(7, "minimal-surface equations", checks)


def test_criterion_08_topological_invariance(verdict):
    rep = ids.check_topological_invariance(resolution=64)
    sphere, ellipsoid, torus = rep.lhs[:3]
    checks = [
        ("sphere int K - 4pi", abs(sphere - 4 * PI), 1e-7),
        ("ellipsoid int K - 4pi", abs(ellipsoid - 4 * PI), 1e-7),
        ("torus int K", abs(torus), 1e-8),
    ]
    verdict(8, "topological invariance of total curvature", checks)


def test_criterion_09_ambient_apparatus(verdict):
    rng = np.random.default_rng(9)
    checks = []
    for name in ("spherical", "cylindrical"):
        chart = chart_by_name(name)
        pts = chart.random_points(50, rng, margin=0.05)
        kron, metr, orders = 0.0, 0.0, []
        for Z in pts:
            kron = max(kron, *kronecker_residuals(chart, Z))
            m = metrinilic_residual(chart, Z, 1e-5)
            metr = max(metr, m.r_metric, m.r_basis)
            a, b = metrinilic_residual(chart, Z, 1e-2), metrinilic_residual(chart, Z, 5e-3)
            orders += [np.log2(a.r_metric / b.r_metric), np.log2(a.r_basis / b.r_basis)]
        checks += [(f"{name} kronecker", kron, 1e-12), (f"{name} metrinilic", metr, 1e-8),
                   (f"{name} order shortfall below 1.7", max(0.0, 1.7 - min(orders)), 0.0)]
    verdict(9, "ambient chart apparatus", checks)


DEFAULT_SUITE = (
    [["verify", "--surface", sel, "--format", "json"] for sel in zoo.REGISTRY]
    + [["pointwise", "--format", "json"] + sum((["--surface", s] for s in zoo.REGISTRY), [])]
    + [["ambient-check", "--format", "json"]]
)


def test_criterion_10_engineering_contract(verdict, tmp_path, capsys):
    start = time.perf_counter()
    codes, outputs = [], []
    for argv in DEFAULT_SUITE:
        out = tmp_path / f"run{len(outputs)}.json"
        codes.append(main(argv + ["--seed", "42", "--out", str(out)]))
        outputs.append(out.read_bytes())
    elapsed = time.perf_counter() - start
    rerun = []
    for k, argv in enumerate(DEFAULT_SUITE):
        out = tmp_path / f"again{k}.json"
        main(argv + ["--seed", "42", "--out", str(out)])
        rerun.append(out.read_bytes())
    mismatches = sum(a != b for a, b in zip(outputs, rerun))
    round_trip = sum(to_json(json.loads(o)).encode() != o for o in outputs)
    capsys.readouterr()
    fail_code = main(["verify", "--surface", "ellipsoid", "--identity", "IR.NK", "--res", "16"])
    bad_code = main(["verify", "--surface", "sphere:r=1", "--identity", "bogus"])
    capsys.readouterr()
    checks = [
        ("default suite nonzero exits", sum(c != 0 for c in codes), 0),
        ("byte mismatches on rerun", mismatches, 0),
        ("JSON re-serialisation mismatches", round_trip, 0),
        ("failing run exit code - 1", abs(fail_code - 1), 0),
        ("bad selector exit code - 2", abs(bad_code - 2), 0),
        ("default suite seconds", elapsed, 60),
    ]
    verdict(10, "determinism, exit codes and runtime", checks)
