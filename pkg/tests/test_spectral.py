import json

import numpy as np
import pytest
import scipy.sparse as sp

from imcflab.errors import DegenerateSpectrumError
from imcflab.geometry import (
    Ellipsoid,
    PerturbedSphere,
    Sphere,
    compute_tensors,
    embed,
    total_area,
)
from imcflab.spectral import (
    DiscreteOperator,
    PLaplaceConfig,
    assemble,
    circle_plaplace_oracle,
    lambda1_laplace,
    lambda1_plaplace,
    rayleigh_p,
    write_eigenfunction_csv,
)


def make_op(surface):
    return assemble(surface, compute_tensors(surface))


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def test_circle_four_point_stiffness(circle):
    surf = embed(circle(4), Sphere(1.0))
    op = make_op(surf)
    h = np.pi / 2
    expected = (1.0 / h) * np.array(
        [[2, -1, 0, -1], [-1, 2, -1, 0], [0, -1, 2, -1], [-1, 0, -1, 2]],
        dtype=float)
    assert np.allclose(op.stiffness.toarray(), expected, atol=1e-14)
    assert np.allclose(op.mass, h, atol=1e-14)


def test_stiffness_kernel_and_symmetry(icosphere):
    surf = embed(icosphere(3), Ellipsoid(1.5, 1.0, 1.0))
    op = make_op(surf)
    ones = np.ones(op.count)
    assert np.max(np.abs(op.stiffness @ ones)) < 1e-10
    assert abs(op.stiffness - op.stiffness.T).max() == 0.0


def test_mass_equals_dual_areas_and_area(icosphere):
    surf = embed(icosphere(3), Sphere(1.0))
    tens = compute_tensors(surf)
    op = assemble(surf, tens)
    assert np.array_equal(op.mass, tens.dual_areas)
    area = total_area(surf, tens)
    assert abs(np.sum(op.mass) - area) / area < 1e-12
    assert np.all(op.mass > 0)


# ---------------------------------------------------------------------------
# Laplace eigenvalue
# ---------------------------------------------------------------------------


def test_lambda1_circle(circle):
    res = lambda1_laplace(make_op(embed(circle(512), Sphere(1.0))))
    assert abs(res.eigenvalue - 1.0) < 1e-3
    assert res.residual <= 1e-9


def test_lambda1_sphere_level4(icosphere):
    res = lambda1_laplace(make_op(embed(icosphere(4), Sphere(1.0))))
    assert abs(res.eigenvalue - 2.0) / 2.0 < 0.02
    assert res.cluster_width < 1e-6  # near-triple eigenvalue, tiny splitting


def test_lambda1_sphere_radius_two(icosphere):
    res = lambda1_laplace(make_op(embed(icosphere(3), Sphere(2.0))))
    assert abs(res.eigenvalue - 0.5) / 0.5 < 0.02


def test_lambda1_dilation_covariance(icosphere):
    surf = embed(icosphere(3), Sphere(1.0))
    lam1 = lambda1_laplace(make_op(surf)).eigenvalue
    lam2 = lambda1_laplace(make_op(surf.with_radii(2 * surf.radii))).eigenvalue
    assert abs(4 * lam2 - lam1) / lam1 < 1e-6


def test_lambda1_deflation(icosphere):
    surf = embed(icosphere(3), Ellipsoid(1.5, 1.0, 1.0))
    tens = compute_tensors(surf)
    res = lambda1_laplace(assemble(surf, tens))
    area = total_area(surf, tens)
    moment = abs(np.sum(tens.dual_areas * res.eigenfunction))
    assert moment <= 1e-8 * np.linalg.norm(res.eigenfunction) * np.sqrt(area)
    assert res.normalization_defect < 1e-10


def test_lambda1_refinement_monotone(icosphere):
    errs = []
    for level in (2, 3, 4, 5):
        res = lambda1_laplace(make_op(embed(icosphere(level), Sphere(1.0))))
        errs.append(abs(res.eigenvalue - 2.0))
    assert all(errs[i + 1] < errs[i] for i in range(len(errs) - 1))


def test_lambda1_determinism(icosphere):
    op = make_op(embed(icosphere(2), Ellipsoid(1.3, 1.0, 1.0)))
    a = lambda1_laplace(op)
    b = lambda1_laplace(op)
    assert a.eigenvalue == b.eigenvalue
    assert np.array_equal(a.eigenfunction, b.eigenfunction)


def test_degenerate_spectrum():
    op = DiscreteOperator(stiffness=sp.csr_matrix((30, 30)),
                          mass=np.ones(30), n=1)
    with pytest.raises(DegenerateSpectrumError):
        lambda1_laplace(op)


def test_eigenresult_json(icosphere):
    res = lambda1_laplace(make_op(embed(icosphere(2), Sphere(1.0))))
    payload = json.loads(res.to_json())
    assert payload["p"] == 2.0
    assert payload["eigenvalue"] == pytest.approx(2.0, rel=0.02)
    assert "constraint_violations" in payload
    assert payload["iterations"] > 0


def test_eigenfunction_csv(tmp_path, circle):
    res = lambda1_laplace(make_op(embed(circle(64), Sphere(1.0))))
    path = tmp_path / "u.csv"
    write_eigenfunction_csv(res.eigenfunction, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "u"
    values = np.array([float(x) for x in lines[1:]])
    assert np.allclose(values, res.eigenfunction, atol=0)


# ---------------------------------------------------------------------------
# p-Rayleigh quotient
# ---------------------------------------------------------------------------


def test_rayleigh_matches_eigenvalue(icosphere):
    surf = embed(icosphere(3), Sphere(1.0))
    tens = compute_tensors(surf)
    res = lambda1_laplace(assemble(surf, tens))
    q = rayleigh_p(surf, tens, res.eigenfunction, 2.0)
    assert abs(q - res.eigenvalue) / res.eigenvalue < 1e-10


def test_rayleigh_constant_is_zero(circle):
    surf = embed(circle(64), Sphere(1.0))
    tens = compute_tensors(surf)
    assert rayleigh_p(surf, tens, np.ones(64), 3.0) == 0.0
    with pytest.raises(ValueError):
        rayleigh_p(surf, tens, np.zeros(64), 2.0)


def test_rayleigh_matches_onedim_formula(circle):
    # cross-implementation check against the independent 1-D quotient for
    # the same discrete vector
    N, L, p = 512, 2 * np.pi, 3.0
    surf = embed(circle(N), Sphere(1.0))
    tens = compute_tensors(surf)
    s = L * np.arange(N) / N
    u = np.sin(s)
    q_mesh = rayleigh_p(surf, tens, u, p)
    h = L / N
    d = (np.roll(u, -1) - u) / h
    q_direct = (h * np.sum(np.abs(d) ** p)) / (h * np.sum(np.abs(u) ** p))
    assert abs(q_mesh - q_direct) / q_direct < 1e-10


# ---------------------------------------------------------------------------
# p-Laplace minimization
# ---------------------------------------------------------------------------


def test_plaplace_p2_matches_laplace(icosphere):
    for shape in (Sphere(1.0), Ellipsoid(1.5, 1.0, 1.0)):
        surf = embed(icosphere(3), shape)
        tens = compute_tensors(surf)
        lam = lambda1_laplace(assemble(surf, tens)).eigenvalue
        lam_p = lambda1_plaplace(surf, tens, PLaplaceConfig(p=2.0)).eigenvalue
        assert 0.99 * lam <= lam_p <= 1.01 * lam


def test_plaplace_nonnegative_and_constraints(circle):
    surf = embed(circle(128), PerturbedSphere(1.0, 0.1, seed=3))
    tens = compute_tensors(surf)
    res = lambda1_plaplace(surf, tens, PLaplaceConfig(p=3.0, max_iter=600))
    assert res.eigenvalue > 0
    assert res.normalization_defect < 1e-8
    assert res.orthogonality_defect < 1e-6
    assert res.restarts == 4


def test_plaplace_dilation_scaling(circle):
    surf = embed(circle(128), Sphere(1.0))
    tens = compute_tensors(surf)
    cfg = PLaplaceConfig(p=3.0, max_iter=800)
    lam = lambda1_plaplace(surf, tens, cfg).eigenvalue
    big = surf.with_radii(2 * surf.radii)
    lam_big = lambda1_plaplace(big, compute_tensors(big), cfg).eigenvalue
    assert abs(lam_big * 2**3 - lam) / lam < 0.02


def test_plaplace_config_validation():
    with pytest.raises(ValueError):
        PLaplaceConfig(p=1.0)
    with pytest.raises(ValueError):
        PLaplaceConfig(p=2.0, restarts=2)


def test_plaplace_determinism(circle):
    surf = embed(circle(96), Sphere(1.0))
    tens = compute_tensors(surf)
    cfg = PLaplaceConfig(p=2.5, max_iter=400, seed=9)
    a = lambda1_plaplace(surf, tens, cfg).eigenvalue
    b = lambda1_plaplace(surf, tens, cfg).eigenvalue
    assert a == b


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def test_oracle_p2_exact_rates():
    # frozen: agrees with the finite element eigenvalue to ten digits
    r = circle_plaplace_oracle(2 * np.pi, 2.0, 512, detail=True)
    assert r.value == pytest.approx(0.999987450212, rel=1e-9)
    assert r.dispersion < 1e-6
    assert abs(r.value - 1.0) < 1e-4
    r2 = circle_plaplace_oracle(4 * np.pi, 2.0, 512)
    assert abs(r2 - 0.25) < 1e-4


def test_oracle_validation():
    with pytest.raises(ValueError):
        circle_plaplace_oracle(-1.0, 2.0, 512)
    with pytest.raises(ValueError):
        circle_plaplace_oracle(1.0, 1.0, 512)
    with pytest.raises(ValueError):
        circle_plaplace_oracle(1.0, 2.0, 32)
