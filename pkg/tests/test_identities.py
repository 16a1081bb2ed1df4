import numpy as np
import pytest

from tensurf import identities as ids
from tensurf import zoo
from tensurf.quadrature import rule_for

PI = np.pi


@pytest.fixture(scope="module")
def rules(sphere, torus, ellipsoid, hypersphere):
    return {
        "sphere": rule_for(sphere, (32, 64)),
        "torus": rule_for(torus, 64),
        "ellipsoid": rule_for(ellipsoid, 64),
        "hyper": rule_for(hypersphere, (32, 32, 64)),
    }


def test_closed_normal(sphere, ellipsoid, hypersphere, rules):
    assert ids.check_closed_normal(sphere, rules["sphere"]).residual < 1e-10
    assert ids.check_closed_normal(ellipsoid, rules["ellipsoid"]).residual < 1e-8
    rep = ids.check_closed_normal(hypersphere, rules["hyper"])
    assert rep.residual < 1e-8 and rep.lhs.shape == (4,)


def test_closed_curvature_normal(sphere, torus, ellipsoid, rules):
    assert ids.check_closed_curvature_normal(sphere, rules["sphere"]).residual < 1e-9
    assert ids.check_closed_curvature_normal(torus, rules["torus"]).residual < 1e-9
    assert ids.check_closed_curvature_normal(ellipsoid, rules["ellipsoid"]).residual < 1e-7


def test_closed_curvature_scalar(sphere, torus, hypersphere, rules):
    assert ids.check_closed_curvature_scalar(sphere, rules["sphere"]).residual < 1e-9
    assert ids.check_closed_curvature_scalar(torus, rules["torus"]).residual < 1e-9
    assert ids.check_closed_curvature_scalar(hypersphere, rules["hyper"]).residual < 1e-7


def test_cross_identities(sphere, torus, rules):
    reps = ids.check_cross_identities(sphere, rules["sphere"])
    assert [r.identity_id for r in reps] == ["RxN=0", "RxNH=0", "RxNK=0"]
    assert max(r.residual for r in reps) < 1e-9
    moved = sphere.translated([0.3, -1.0, 2.0])
    assert max(r.residual for r in ids.check_cross_identities(moved, rules["sphere"])) < 1e-9
    assert max(r.residual for r in ids.check_cross_identities(torus, rules["torus"])) < 1e-8


def test_cross_identities_need_three_dimensions(hypersphere, rules):
    with pytest.raises(ids.IdentityError):
        ids.check_cross_identities(hypersphere, rules["hyper"])


def test_moment_identities_sphere(sphere, rules):
    r = ids.check_R_dot_N(sphere, rules["sphere"])
    assert r.lhs == pytest.approx(4 * PI, abs=1e-10) and r.rhs == pytest.approx(4 * PI)
    r = ids.check_R_dot_NH(sphere, rules["sphere"])
    assert r.lhs == pytest.approx(-8 * PI, abs=1e-10) and r.passed
    r = ids.check_R_dot_NK(sphere, rules["sphere"])
    assert r.lhs == pytest.approx(4 * PI, abs=1e-10) and r.rhs == pytest.approx(4 * PI, abs=1e-10)


def test_moment_identities_torus(torus, rules):
    r = ids.check_R_dot_N(torus, rules["torus"])
    assert r.lhs == pytest.approx(3 * PI ** 2, abs=1e-9)
    assert ids.check_R_dot_NH(torus, rules["torus"]).lhs == pytest.approx(-8 * PI ** 2, abs=1e-9)
    r = ids.check_R_dot_NK(torus, rules["torus"])
    assert r.rhs == pytest.approx(4 * PI ** 2, abs=1e-9) and r.residual < 1e-8


def test_moment_identities_hypersphere(hypersphere, rules):
    r = ids.check_R_dot_N(hypersphere, rules["hyper"])
    assert r.lhs == pytest.approx(2 * PI ** 2, abs=1e-9)
    assert ids.check_R_dot_NH(hypersphere, rules["hyper"]).lhs == pytest.approx(-6 * PI ** 2, abs=1e-8)
    r = ids.check_R_dot_NK(hypersphere, rules["hyper"])
    assert r.lhs == pytest.approx(12 * PI ** 2, abs=1e-8)
    assert r.rhs == pytest.approx(12 * PI ** 2, abs=1e-8)


def test_R_dot_N_against_monte_carlo_volume(sphere, torus, rules):
    for s, key in ((sphere, "sphere"), (torus, "torus")):
        rep = ids.check_R_dot_N(s, rules[key], use_volume_hint=False, seed=42)
        assert rep.passed
        sigma = rep.extras["volume"].stderr
        assert sigma > 0
        assert abs(rep.lhs - rep.rhs) <= 4 * 3 * sigma


@pytest.mark.parametrize("check", [ids.check_closed_normal, ids.check_closed_curvature_normal,
                                   ids.check_closed_curvature_scalar, ids.check_R_dot_N,
                                   ids.check_R_dot_NH, ids.check_R_dot_NK])
def test_closed_checks_reject_open(check):
    hemi = zoo.make_hemisphere().surface
    with pytest.raises(ids.IdentityError):
        check(hemi, rule_for(hemi, 16))


def test_origin_invariance(sphere, torus, hypersphere, rules):
    assert ids.check_origin_invariance("IR.N", sphere, [10, 0, 0], rules["sphere"]).residual < 1e-8
    assert ids.check_origin_invariance("IR.NH", torus, [0, 5, -3], rules["torus"]).residual < 1e-8
    rep = ids.check_origin_invariance("IR.NK", hypersphere, [1, 1, 1, 1], rules["hyper"])
    assert rep.residual < 1e-7 and rep.identity_id == "origin:IR.NK"
    with pytest.raises(ids.IdentityError):
        ids.check_origin_invariance("IN=0", sphere, [1, 0, 0], rules["sphere"])
    with pytest.raises(ids.IdentityError):
        ids.check_origin_invariance("IR.N", sphere, [1, 0], rules["sphere"])


def _patch(entry, res=64):
    s = entry.surface
    return s, rule_for(s, res)


def test_patch_normal():
    s, r = _patch(zoo.make_hemisphere())
    rep = ids.check_patch_normal(s, r)
    assert np.allclose(rep.lhs, [0, 0, PI], atol=1e-10) and np.allclose(rep.rhs, [0, 0, PI], atol=1e-10)
    s, r = _patch(zoo.make_disk())
    rep = ids.check_patch_normal(s, r)
    assert np.allclose(rep.lhs, [0, 0, PI], atol=1e-10) and np.allclose(rep.rhs, [0, 0, PI], atol=1e-10)
    s, r = _patch(zoo.make_lune(PI / 2))
    assert ids.check_patch_normal(s, r).residual < 1e-8


def test_patch_curvature_normal():
    s, r = _patch(zoo.make_hemisphere())
    rep = ids.check_patch_curvature_normal(s, r)
    assert np.allclose(rep.lhs, [0, 0, -2 * PI], atol=1e-10)
    assert np.allclose(rep.rhs, [0, 0, -2 * PI], atol=1e-10)
    s, r = _patch(zoo.make_disk())
    rep = ids.check_patch_curvature_normal(s, r)
    assert np.allclose(rep.lhs, 0, atol=1e-12) and np.allclose(rep.rhs, 0, atol=1e-12)
    s, r = _patch(zoo.make_half_torus())
    assert ids.check_patch_curvature_normal(s, r).residual < 1e-7


def test_patch_curvature_scalar():
    s, r = _patch(zoo.make_hemisphere())
    rep = ids.check_patch_curvature_scalar(s, r)
    assert np.allclose(rep.lhs, [0, 0, PI], atol=1e-10) and rep.residual < 1e-8
    s, r = _patch(zoo.make_disk())
    rep = ids.check_patch_curvature_scalar(s, r)
    assert np.allclose(rep.lhs, 0, atol=1e-12) and np.allclose(rep.rhs, 0, atol=1e-12)
    s, r = _patch(zoo.make_spherical_cap(PI / 4))
    assert ids.check_patch_curvature_scalar(s, r).residual < 1e-8


@pytest.mark.parametrize("check", [ids.check_patch_normal, ids.check_patch_curvature_normal,
                                   ids.check_patch_curvature_scalar])
def test_patch_checks_reject_closed(check, sphere, rules):
    with pytest.raises(ids.IdentityError):
        check(sphere, rules["sphere"])


def test_topological_invariance():
    rep = ids.check_topological_invariance()
    assert rep.passed
    assert rep.lhs[0] == pytest.approx(4 * PI, abs=1e-7)
    assert rep.lhs[1] == pytest.approx(4 * PI, abs=1e-7)
    assert abs(rep.lhs[2]) < 1e-8


def test_gauss_bonnet_opt_in(sphere, rules):
    assert "GB" not in ids.applicable_ids(sphere)
    assert ids.run_identity("GB", sphere, rules["sphere"]).passed


def test_applicable_ids(sphere, hypersphere):
    assert len(ids.applicable_ids(sphere)) == 9
    assert len(ids.applicable_ids(hypersphere)) == 6
    assert tuple(ids.applicable_ids(zoo.make_hemisphere().surface)) == ids.PATCH_IDS


def test_pass_iff_residual_within_tolerance(sphere, rules):
    rep = ids.run_identity("IR.NH", sphere, rules["sphere"])
    for tol in (rep.residual * 2, rep.residual, rep.residual / 2, 0.0):
        again = ids.run_identity("IR.NH", sphere, rules["sphere"], tol=tol)
        assert again.passed == (again.residual <= tol)


def test_report_record_schema(sphere, rules):
    rec = ids.run_identity("IN=0", sphere, rules["sphere"]).as_record()
    assert {"identity_id", "surface", "resolution", "lhs", "rhs", "residual", "tolerance",
            "pass", "wall_time_ms"} <= set(rec)
    assert rec["wall_time_ms"] is None and isinstance(rec["lhs"], list)
    assert ids.run_identity("IN=0", sphere, rules["sphere"], timing=True).wall_time_ms >= 0


def test_unknown_identity(sphere, rules):
    with pytest.raises(ids.IdentityError, match="valid"):
        ids.run_identity("IQ", sphere, rules["sphere"])


@pytest.mark.parametrize("selector", ["ellipsoid", "torus", "sphere:x=0.3,y=-1,z=2"])
def test_closed_residuals_decrease_until_floor(selector):
    s = zoo.from_selector(selector).surface
    for identity_id in ids.CLOSED_IDS:
        res = [ids.run_identity(identity_id, s, rule_for(s, m)).residual for m in (8, 16, 32, 64)]
        for coarse, fine in zip(res, res[1:]):
            assert fine <= 2 * max(coarse, 1e-12), (identity_id, res)
