import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from cmclab.errors import DegenerateMetric, DomainViolation, InconsistentMeanCurvature, NonPositiveU, OutOfDomain
from cmclab.freeboundary import shoot, spherical_cap
from cmclab.rotation import (
    MeridianStart,
    RotationSurface,
    axis_distance_for_curvature,
    chart_coords,
    embed,
    gauss_product,
    mesh,
    phi_norm_sq,
    principal_from_u,
    radial_from_origin,
    reconstruct_meridian,
    sample,
    unit_normal,
    second_fundamental_form_fd,
    write_samples_csv,
)
from cmclab.spaceform import SpaceForm, distance, grad_r

from builders import cylinder, delaunay_surface
from oracles import catenoid_height, catenoid_radius, euclidean_cap_area


@pytest.mark.parametrize("u,a,H,expected", [(1, 1, 0, (1, -1)), (1, 1, 1, (2, 0)), (2, -1, 0.5, (0, 1))])
def test_principal_from_u(u, a, H, expected):
    assert tuple(map(float, principal_from_u(u, a, H))) == pytest.approx(expected, abs=1e-15)


def test_principal_from_u_rejects_nonpositive():
    with pytest.raises(NonPositiveU):
        principal_from_u(0.0, 1, 0.0)


@pytest.mark.parametrize("l1,l2,H,expected", [(1, 1, 1, 0), (1, -1, 0, 2), (2, 0, 1, 2)])
def test_phi_norm_sq(l1, l2, H, expected):
    assert phi_norm_sq(l1, l2, H) == pytest.approx(expected)


def test_phi_norm_sq_checks_mean():
    with pytest.raises(InconsistentMeanCurvature):
        phi_norm_sq(1.0, 1.0, 0.5)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_phi_norm_sq_symmetric_and_vanishes_only_when_umbilic(l1, l2):
    H = 0.5 * (l1 + l2)
    p = phi_norm_sq(l1, l2, H)
    assert p == phi_norm_sq(l2, l1, H)
    assert (p == 0) == (l1 == l2)
    assert gauss_product(H, p) == pytest.approx(l1 * l2, abs=1e-12 * max(1, l1 * l1, l2 * l2))


@pytest.mark.parametrize("H,phi_sq,expected", [(0, 2, -1), (1, 0, 1), (1, 2, 0)])
def test_gauss_product(H, phi_sq, expected):
    assert gauss_product(H, phi_sq) == expected


def test_catenoid_meridian():
    lam = lambda s: 1.0 / (1.0 + s * s)
    mu = lambda s: -lam(s)
    prof = reconstruct_meridian(SpaceForm(0), lam, mu, 2.0, 1e-3)
    assert np.max(np.abs(prof.rho - catenoid_radius(prof.s))) < 1e-10
    assert np.max(np.abs(prof.h - catenoid_height(prof.s))) < 1e-10
    assert np.max(np.abs(prof.lambda_from_frame() - prof.lam)) < 1e-10


def test_cylinder_meridian():
    prof = cylinder().profile
    np.testing.assert_allclose(prof.rho, 0.5, atol=1e-14)
    np.testing.assert_allclose(prof.h, prof.s, atol=1e-14)


def test_clifford_torus_meridian():
    sf = SpaceForm(1)
    prof = reconstruct_meridian(sf, lambda s: 1.0, lambda s: -1.0, 3.0)
    np.testing.assert_allclose(prof.rho, math.pi / 4, atol=1e-12)
    np.testing.assert_allclose(prof.lambda_from_frame(), 1.0, atol=1e-12)


def test_reconstruct_rejects_varying_mean_curvature():
    with pytest.raises(InconsistentMeanCurvature):
        reconstruct_meridian(SpaceForm(0), lambda s: 1.0 + s, lambda s: -1.0, 1.0)


def test_axis_distance_domain():
    assert axis_distance_for_curvature(SpaceForm(0), 2.0) == 0.5
    assert axis_distance_for_curvature(SpaceForm(1), 1.0) == pytest.approx(math.pi / 4)
    assert axis_distance_for_curvature(SpaceForm(0), -2.0) == -0.5
    with pytest.raises(OutOfDomain):
        axis_distance_for_curvature(SpaceForm(-1), 0.9)


@pytest.mark.parametrize("c,H,u0", [(1, 0.5, 0.8), (-1, 2, 0.7), (-0.5, 1, 1.5), (0, 0.3, 1.2)])
def test_profile_curvatures_match_finite_differences(c, H, u0):
    surf = delaunay_surface(c, H, u0, 0.8)
    sf = surf.sf
    for s in (-0.5, 0.2, 0.7):
        lam, mu = surf.profile.curvatures_at(np.array([s]))
        rho, h, phi = surf.profile.state_at(s)
        nu = surf.normal_at(s, 0.4)
        l1, l2, Hfd, _ = second_fundamental_form_fd(sf, surf.patch, s, 0.4, orient=nu)
        assert sorted([l1, l2]) == pytest.approx(sorted([lam[0], mu[0]]), abs=1e-5)
        assert Hfd == pytest.approx(H, abs=1e-5)


def test_frame_curvatures_consistent_with_inputs():
    prof = delaunay_surface(-1, 2, 0.7, 1.5).profile
    assert np.max(np.abs(prof.lambda_from_frame() - prof.lam)) < 1e-9
    assert np.max(np.abs(prof.mu_from_frame() - prof.mu)[5:-5]) < 1e-6


def test_second_fundamental_form_examples():
    sf = SpaceForm(0)
    sphere = lambda u, v: 2 * np.array([math.sin(u) * math.cos(v), math.sin(u) * math.sin(v), math.cos(u)])
    l1, l2, H, _ = second_fundamental_form_fd(sf, sphere, 1.0, 0.3, orient=-sphere(1.0, 0.3))
    assert (l1, l2) == pytest.approx((0.5, 0.5), abs=1e-6)
    cat = lambda u, v: np.array([math.cosh(u) * math.cos(v), math.cosh(u) * math.sin(v), u])
    l1, l2, H, _ = second_fundamental_form_fd(sf, cat, 0.0, 0.0, orient=np.array([-1.0, 0, 0]))
    assert (l1, l2) == pytest.approx((1, -1), abs=1e-5)
    plane = lambda u, v: np.array([u, v, 0.0])
    assert second_fundamental_form_fd(sf, plane, 0.3, 0.1) == pytest.approx((0, 0, 0, 0), abs=1e-8)
    with pytest.raises(DegenerateMetric):
        second_fundamental_form_fd(sf, lambda u, v: np.array([u, u, 0.0]), 0.0, 0.0)


def test_mirror_symmetry():
    prof = shoot(0, 0.3, 1.0).surface.profile
    n = len(prof.s) // 2
    np.testing.assert_allclose(prof.rho[:n], prof.rho[::-1][:n], atol=1e-15)
    np.testing.assert_allclose(prof.h[:n], -prof.h[::-1][:n], atol=1e-15)
    for s in (0.3, 1.1):
        a, b = np.array(prof.state_at(s)), np.array(prof.state_at(-s))
        assert b == pytest.approx([a[0], -a[1], math.pi - a[2]], abs=1e-9)


def test_sample_flat_disk():
    pts = sample(spherical_cap(0, 0, 1).surface, n_s=11, n_theta=6)
    assert len(pts) == 66
    assert all(p.phi_sq == 0 and abs(p.grad_nu_f) < 1e-15 for p in pts)


def test_sample_catenoid_neck_normal_is_radial():
    piece = shoot(0, 0, 1)
    pts = sample(piece.surface, n_s=51, n_theta=8)
    neck = [p for p in pts if abs(p.s) < 1e-12]
    assert len(neck) == 8
    for p in neck:
        assert abs(p.grad_nu_f / p.r) == pytest.approx(1.0, abs=1e-12)


def test_sample_cylinder():
    for p in sample(cylinder(), n_s=11, n_theta=5):
        assert p.lambda1 * p.lambda2 == 0 and p.K == 0


def test_sample_domain_violation():
    surf = RotationSurface(reconstruct_meridian(SpaceForm(1), lambda s: 1.0, lambda s: -1.0, 3.0))
    with pytest.raises(DomainViolation):
        sample(surf, n_s=11, n_theta=4)
    pts = sample(surf, n_s=11, n_theta=4, strict=False)
    assert any(math.isnan(p.grad_nu_f) for p in pts)


def test_mesh_combinatorics():
    m = mesh(cylinder(), 2, 3)
    assert m.vertices.shape == (6, 3) and m.triangles.shape == (6, 3)
    edges = {}
    for t in m.triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            key = frozenset((int(a), int(b)))
            edges[key] = edges.get(key, 0) + 1
    for key, count in edges.items():
        same_ring = len({v // 3 for v in key}) == 1
        assert count == (1 if same_ring else 2)
    # the ring closes through the seam between angle indices 2 and 0
    assert frozenset((2, 0)) in edges and frozenset((5, 3)) in edges


def test_cap_mesh_area_converges_quadratically():
    piece = spherical_cap(0, 1, 1)
    exact = euclidean_cap_area(1.0, 1.0)
    errs = [abs(mesh(piece.surface, n, 2 * n).area() - exact) for n in (20, 40, 80)]
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(1.8 < r < 2.2 for r in rates), rates


def test_obj_export_roundtrip(tmp_path):
    m = mesh(cylinder(), 4, 6)
    path = tmp_path / "m.obj"
    m.to_obj(path)
    lines = path.read_text().splitlines()
    verts = [l for l in lines if l.startswith("v ")]
    faces = [l for l in lines if l.startswith("f ")]
    assert len(verts) == 24 and len(faces) == len(m.triangles)
    back = np.array([[float(x) for x in l.split()[1:]] for l in verts])
    np.testing.assert_array_equal(back, m.vertices)


def test_curved_charts():
    sf = SpaceForm(1)
    x = embed(sf, np.array([0.3]), np.array([0.2]), np.array([0.0]))
    assert chart_coords(sf, x).shape == (1, 3)
    with pytest.raises(ValueError):
        chart_coords(sf, x, "klein")
    m = mesh(delaunay_surface(-1, 2, 0.7, 0.5), 5, 6)
    xyz = chart_coords(m.sf, m.vertices)
    assert xyz.shape == (30, 3) and np.all(np.linalg.norm(xyz, axis=1) < 1)


def test_samples_csv_full_precision(tmp_path):
    pts = sample(cylinder(), n_s=3, n_theta=3)
    write_samples_csv(pts, tmp_path / "s.csv")
    rows = (tmp_path / "s.csv").read_text().splitlines()
    assert rows[0] == "s,theta,r,lambda1,lambda2,H,phi_sq,K,grad_nu_f"
    assert float(rows[1].split(",")[2]) == pts[0].r


def test_cap_start_from_apex():
    start = MeridianStart(0.0, 0.5, 0.0)
    prof = reconstruct_meridian(SpaceForm(0), lambda s: 1.0, lambda s: 1.0, 1.0, start=start)
    assert prof.starts_on_axis
    # unit sphere whose centre lies one unit from the apex along the normal
    np.testing.assert_allclose(prof.rho**2 + (prof.h - 1.5) ** 2, 1.0, atol=1e-12)


@pytest.mark.parametrize("c", [-1.0, 0.0, 1.0, -4.0])
def test_intrinsic_radial_data_matches_ambient(c):
    sf = SpaceForm(c)
    rng = np.random.default_rng(11)
    rho, h, phi = rng.uniform(-0.7, 0.7, 20), rng.uniform(-0.7, 0.7, 20), rng.uniform(0, 2 * math.pi, 20)
    r, g = radial_from_origin(sf, rho, h, phi)
    pos = embed(sf, rho, h, 0.0)
    nu = unit_normal(sf, rho, h, phi, 0.0)
    np.testing.assert_allclose(r, distance(sf, sf.origin, pos), atol=1e-12)
    np.testing.assert_allclose(g, sf.inner(nu, grad_r(sf, sf.origin, pos)), atol=1e-12)
    assert radial_from_origin(sf, 0.0, 0.0, 0.3)[1] == 0.0
