import numpy as np
import pytest

from imcflab.errors import (
    CurvatureCollapseError,
    InsufficientDataError,
    NumericalBlowupError,
    StarShapeLossError,
)
from imcflab.flow import (
    FlowConfig,
    IMCF,
    MCF,
    SpeedFunction,
    eigen_rescale,
    fit_H_decay,
    rescale_snapshot,
    run,
    step,
)
from imcflab.geometry import Ellipsoid, Sphere, compute_tensors, embed


def test_speed_tags():
    H = np.array([2.0, 4.0])
    A2 = np.array([2.0, 8.0])
    assert np.allclose(IMCF.evaluate(H, A2), [0.5, 0.25])
    assert np.allclose(MCF.evaluate(H, A2), [-2.0, -4.0])
    custom = SpeedFunction("custom", fn=lambda H, A2: A2 / H)
    assert np.allclose(custom.evaluate(H, A2), [1.0, 2.0])
    with pytest.raises(ValueError):
        SpeedFunction("custom")
    with pytest.raises(ValueError):
        SpeedFunction("imfc")


def test_step_sphere_imcf(icosphere):
    surf = embed(icosphere(3), Sphere(1.0))
    out = step(surf, compute_tensors(surf), IMCF, 0.01)
    assert np.allclose(out.radii, 1.005, atol=2e-4)
    assert out.t == pytest.approx(0.01)


def test_step_circle_imcf_exact(circle):
    surf = embed(circle(128), Sphere(1.0))
    out = step(surf, compute_tensors(surf), IMCF, 0.001)
    # circle curvature is exact, so the update is exact
    assert np.max(np.abs(out.radii - 1.001)) < 1e-12


def test_step_sphere_mcf_sign(icosphere):
    surf = embed(icosphere(3), Sphere(1.0))
    out = step(surf, compute_tensors(surf), MCF, 0.01)
    assert np.allclose(out.radii, 0.98, atol=2e-4)


def test_step_curvature_floor(icosphere):
    surf = embed(icosphere(2), Sphere(1.0))
    tens = compute_tensors(surf)
    with pytest.raises(CurvatureCollapseError) as err:
        step(surf, tens, IMCF, 0.01, h_min_abort=10.0)
    assert err.value.vertex is not None


def test_step_star_shape_loss(circle):
    surf = embed(circle(64), Sphere(0.5))
    tens = compute_tensors(surf)  # H = 2, speed -2
    with pytest.raises(StarShapeLossError):
        step(surf, tens, MCF, 0.5)


def test_flow_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(t_end=-1.0, dt=1e-3)
    with pytest.raises(ValueError):
        FlowConfig(t_end=1.0)  # neither dt nor cfl
    with pytest.raises(ValueError):
        FlowConfig(t_end=1.0, dt=1e-3, cfl_factor=0.2)
    with pytest.raises(ValueError):
        FlowConfig(t_end=1.0, dt=1e-3, space_curvature=1.0)
    assert FlowConfig(t_end=1.0, dt=1e-3).interval == pytest.approx(0.02)


@pytest.fixture(scope="module")
def sphere_run(icosphere):
    surf = embed(icosphere(3), Sphere(1.0))
    cfg = FlowConfig(t_end=1.0, dt=1e-3, sample_interval=0.05)
    return run(surf, IMCF, cfg)


def test_run_sphere_radius_law(sphere_run):
    r_final = sphere_run.column("r_mean")[-1]
    assert abs(r_final - np.e**0.5) / np.e**0.5 < 0.005


def test_run_sphere_area_law(sphere_run):
    t = sphere_run.times
    area = sphere_run.column("area")
    assert np.max(np.abs(np.log(area / area[0]) - t)) <= 0.01


def test_run_sphere_stays_spherical(sphere_run):
    # discrete curvature inhomogeneity excites a bounded, tiny radial spread
    spread = sphere_run.column("r_std") / sphere_run.column("r_mean")
    assert np.max(spread) < 1e-5


def test_run_times_strictly_increasing(sphere_run):
    assert np.all(np.diff(sphere_run.times) > 0)
    assert sphere_run.times[0] == 0.0
    assert sphere_run.times[-1] == pytest.approx(1.0, abs=1e-9)
    for col in sphere_run.columns.values():
        assert np.all(np.isfinite(col))


def test_run_observer_columns(circle):
    surf = embed(circle(64), Sphere(1.0))
    cfg = FlowConfig(t_end=0.1, dt=1e-3, sample_interval=0.05)
    calls = []

    def obs(t, surface, tensors):
        calls.append(t)
        return {"probe": float(np.max(tensors.mean_curvature))}

    trace = run(surf, IMCF, cfg, observers=(obs,))
    assert len(calls) == len(trace)
    assert "probe" in trace.columns


def test_run_adaptive_cfl(circle):
    surf = embed(circle(64), Sphere(1.0))
    cfg = FlowConfig(t_end=0.05, cfl_factor=0.1, sample_interval=0.05)
    trace = run(surf, IMCF, cfg)
    assert trace.times[-1] == pytest.approx(0.05, abs=1e-9)


def test_run_blowup_carries_partial_trace(circle):
    surf = embed(circle(64), Sphere(1.0))
    bad = SpeedFunction("custom", fn=lambda H, A2: H * np.inf)
    cfg = FlowConfig(t_end=1.0, dt=1e-3)
    with pytest.raises((NumericalBlowupError, Exception)) as err:
        run(surf, bad, cfg)
    assert hasattr(err.value, "partial_trace")
    assert err.value.partial_trace.status == "aborted"


def test_rescale_identity_at_t0(icosphere):
    surf = embed(icosphere(2), Ellipsoid(1.5, 1.0, 1.0))
    back = rescale_snapshot(surf)
    assert np.array_equal(back.radii, surf.radii)


def test_rescale_sphere_fixed_point(sphere_run):
    for surf in sphere_run.snapshots[:: max(1, len(sphere_run.snapshots) // 5)]:
        tilde = rescale_snapshot(surf)
        assert np.max(np.abs(tilde.radii - 1.0)) < 1e-3


def test_rescale_tilde_relations(icosphere):
    surf = embed(icosphere(2), Ellipsoid(1.5, 1.0, 1.0)).with_radii(
        1.7 * np.ones(162), t=0.8)
    tilde = rescale_snapshot(surf)
    h_orig = compute_tensors(surf).mean_curvature
    h_tilde = compute_tensors(tilde).mean_curvature
    # uniform scaling is exactly covariant: H_tilde = e^{t/n} H
    assert np.max(np.abs(h_tilde - np.exp(0.8 / 2) * h_orig)) < 1e-10
    a_orig = np.sum(compute_tensors(surf).dual_areas)
    a_tilde = np.sum(compute_tensors(tilde).dual_areas)
    assert a_tilde == pytest.approx(np.exp(-0.8) * a_orig, rel=1e-12)


def test_eigen_rescale_values():
    assert eigen_rescale(2.0, 0.0, 2, 2.0) == 2.0
    # round sphere: lambda(t) = 2 e^{-t} pulls back to the constant 2
    for t in (0.3, 1.0, 2.5):
        lam = 2.0 * np.exp(-t)
        assert eigen_rescale(lam, t, 2, 2.0) == pytest.approx(2.0, rel=1e-12)
    assert eigen_rescale(1.0, 1.0, 2, 3.0) == pytest.approx(np.exp(1.5))
    with pytest.raises(ValueError):
        eigen_rescale(-1.0, 0.0, 2)


def test_eigen_rescale_matches_resolved_mesh(sphere_run):
    # dual path: algebraic rescaling vs eigensolve on the rescaled snapshot
    from imcflab.spectral import assemble, lambda1_laplace

    surf = sphere_run.snapshots[len(sphere_run.snapshots) // 2]
    tens = compute_tensors(surf)
    lam = lambda1_laplace(assemble(surf, tens)).eigenvalue
    tilde = rescale_snapshot(surf)
    lam_tilde_mesh = lambda1_laplace(
        assemble(tilde, compute_tensors(tilde))).eigenvalue
    lam_tilde_alg = eigen_rescale(lam, surf.t, 2, 2.0)
    assert abs(lam_tilde_alg - lam_tilde_mesh) / lam_tilde_mesh < 0.005


def test_fit_h_decay_sphere(sphere_run):
    fit = fit_H_decay(sphere_run)
    assert fit.slope == pytest.approx(-0.5, rel=0.01)
    assert fit.slope_hmin == pytest.approx(-0.5, rel=0.01)
    assert fit.deviation_from_sphere_rate < 0.01
    assert fit.deviation_from_unit_rate > 0.4  # the flagged disagreement


def test_fit_h_decay_circle(circle):
    surf = embed(circle(128), Sphere(1.0))
    cfg = FlowConfig(t_end=1.0, dt=1e-3, sample_interval=0.05)
    trace = run(surf, IMCF, cfg)
    fit = fit_H_decay(trace)
    assert fit.slope == pytest.approx(-1.0, rel=0.01)


def test_fit_h_decay_needs_samples(circle):
    surf = embed(circle(64), Sphere(1.0))
    cfg = FlowConfig(t_end=0.1, dt=1e-3, sample_interval=0.05)
    trace = run(surf, IMCF, cfg)
    with pytest.raises(InsufficientDataError):
        fit_H_decay(trace)


def test_dt_halving_first_order(circle):
    # fixed mesh, exact circle curvature: the time error dominates cleanly
    errs = []
    for dt in (2e-3, 1e-3):
        surf = embed(circle(128), Sphere(1.0))
        cfg = FlowConfig(t_end=0.5, dt=dt, sample_interval=0.5)
        trace = run(surf, IMCF, cfg)
        errs.append(abs(trace.column("r_mean")[-1] - np.exp(0.5)))
    assert errs[0] / errs[1] >= 1.9
