import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weitzenbock import catalog, domains, geometry
from weitzenbock.errors import DegenerateGradient, NotStarShaped, RankJump

DIV3 = catalog.divergence_symbol(3)
ELLIPSOID = domains.ellipsoid([1.0, 1.5, 2.0])


def test_ball_normal_and_off_boundary_error():
    dom = domains.ball(2.0)
    x = np.array([0.0, 2.0, 0.0])
    assert np.allclose(geometry.normal(dom, x), [0, 1, 0])
    with pytest.raises(ValueError):
        geometry.normal(dom, [0.5, 0.0, 0.0])


def test_degenerate_gradient_is_reported():
    with pytest.raises(DegenerateGradient) as info:
        geometry.normal(domains.ball(), np.zeros(3), check_boundary=False)
    assert info.value.grad_norm == 0


def test_finite_difference_normal_matches_analytic():
    a = np.array([1.0, 1.5, 2.0])
    fd = domains.from_function(lambda x: np.sum((x / a) ** 2, axis=-1) - 1, 3)
    pts = geometry.boundary_samples(ELLIPSOID, 6)
    assert np.allclose(geometry.normal(fd, pts), geometry.normal(ELLIPSOID, pts), atol=1e-9)
    k1, _ = geometry.shape_operator(fd, pts)
    k2, _ = geometry.shape_operator(ELLIPSOID, pts)
    assert np.allclose(k1, k2, atol=1e-5)


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_sphere_curvatures(R):
    dom = domains.ball(R)
    k, frame = geometry.shape_operator(dom, geometry.boundary_samples(dom, 6))
    assert np.allclose(k, 1 / R, rtol=1e-13)
    assert np.allclose(np.einsum("pij,pik->pjk", frame, frame), np.eye(2), atol=1e-13)


def test_ellipsoid_vertex_curvatures():
    k, frame = geometry.shape_operator(ELLIPSOID, np.array([1.0, 0.0, 0.0]))
    assert np.allclose(k, [1 / 4, 1 / 2.25], atol=1e-12)
    k, _ = geometry.shape_operator(ELLIPSOID, np.array([0.0, 0.0, 2.0]))
    assert np.allclose(k, [2 / 2.25, 2.0], atol=1e-12)


def test_ellipsoid_sampled_min_curvature():
    r = geometry.strict_convexity(ELLIPSOID)
    assert r["verdict"] and 0.25 <= r["min_kappa"] <= 0.25 * 1.05


def test_divergence_levi_on_ball_is_scaled_identity():
    for R in (1.0, 2.0):
        dom = domains.ball(R)
        x = np.array([0.6, 0.0, 0.8]) * R
        for fn in (geometry.levi_matrix_curvature, geometry.levi_matrix_hessian):
            L = fn(DIV3, dom, x)
            assert np.allclose(L, np.eye(2) / R, atol=1e-13)
        assert np.allclose(geometry.levi_matrix_extension(DIV3, dom, x).compressed, np.eye(2) / R, atol=1e-13)


def test_curl_levi_on_unit_ball():
    L = geometry.levi_matrix_curvature(catalog.curl_symbol(), domains.ball(), np.array([0.0, 1.0, 0.0]))
    assert L.shape == (1, 1) and np.isclose(L[0, 0], 2.0)


def test_superellipsoid_face_centre_is_flat():
    dom = domains.superellipsoid([1.0, 1.0, 1.0], 4)
    x = np.array([1.0, 0.0, 0.0])
    k, _ = geometry.shape_operator(dom, x)
    assert np.allclose(k, 0.0)
    assert np.allclose(geometry.levi_matrix_curvature(DIV3, dom, x), 0.0)


def test_cassini_neck_is_concave():
    dom = domains.cassini_oval(1.1, n=2)
    neck = np.array([0.0, np.sqrt(1.1**2 - 1)])
    assert abs(dom.rho(neck)) < 1e-12
    k, _ = geometry.shape_operator(dom, neck)
    assert k[0] < 0
    L = geometry.levi_matrix_curvature(catalog.divergence_symbol(2), dom, neck)
    assert L[0, 0] < 0
    assert not geometry.strict_convexity(dom, 16)["verdict"]


def test_polynomial_domain_must_be_negative_at_center():
    with pytest.raises(NotStarShaped):
        domains.polynomial([(1.0, [0, 0]), (-1.0, [2, 0]), (-1.0, [0, 2])])


def test_polynomial_disk_radial_profile():
    dom = domains.polynomial([(-4.0, [0, 0]), (1.0, [2, 0]), (1.0, [0, 2])])
    assert np.allclose(dom.radial(domains.sphere_grid(2, 8)), 2.0)


def _random_boundary_points(dom, rng, count):
    th = rng.normal(size=(count, dom.n))
    th /= np.linalg.norm(th, axis=1, keepdims=True)
    return dom.boundary_point(th)


def test_three_levi_formulas_agree_on_ellipsoid():
    rng = np.random.default_rng(0)
    B = catalog.de_rham(3, 2).pair.B
    for x in _random_boundary_points(ELLIPSOID, rng, 20):
        K = geometry.boundary_point_data(B, ELLIPSOID, x).kernel_basis
        a = geometry.levi_matrix_curvature(B, ELLIPSOID, x, K)
        b = geometry.levi_matrix_hessian(B, ELLIPSOID, x, K)
        c = geometry.levi_matrix_extension(B, ELLIPSOID, x, K).compressed
        assert np.allclose(a, b, atol=1e-12) and np.allclose(a, c, atol=1e-12)


def test_hessian_formula_ignores_reweighting():
    rng = np.random.default_rng(1)
    g = lambda x: 2.0 + np.sin(x[..., 0])  # noqa: E731
    dg = lambda x: np.stack([np.cos(x[..., 0]), 0 * x[..., 0], 0 * x[..., 0]], axis=-1)  # noqa: E731

    def hg(x):
        H = np.zeros(np.shape(x)[:-1] + (3, 3))
        H[..., 0, 0] = -np.sin(x[..., 0])
        return H

    heavy = domains.reweight(ELLIPSOID, g, dg, hg)
    for x in _random_boundary_points(ELLIPSOID, rng, 10):
        K = geometry.boundary_point_data(DIV3, ELLIPSOID, x).kernel_basis
        assert np.allclose(geometry.levi_matrix_hessian(DIV3, heavy, x, K),
                           geometry.levi_matrix_hessian(DIV3, ELLIPSOID, x, K), atol=1e-12)


def test_levi_eigenvalues_do_not_depend_on_kernel_frame():
    rng = np.random.default_rng(2)
    x = _random_boundary_points(ELLIPSOID, rng, 1)[0]
    K = geometry.boundary_point_data(DIV3, ELLIPSOID, x).kernel_basis
    U, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    a = np.linalg.eigvalsh(geometry.levi_matrix_curvature(DIV3, ELLIPSOID, x, K))
    b = np.linalg.eigvalsh(geometry.levi_matrix_curvature(DIV3, ELLIPSOID, x, K @ U))
    assert np.allclose(a, b, atol=1e-13)


@settings(max_examples=20, deadline=None)
@given(R=st.floats(0.25, 4.0), seed=st.integers(0, 2**32 - 1))
def test_dilation_scales_levi_form_inversely(R, seed):
    rng = np.random.default_rng(seed)
    x = _random_boundary_points(ELLIPSOID, rng, 1)[0]
    big = domains.dilate(ELLIPSOID, R)
    K = geometry.boundary_point_data(DIV3, ELLIPSOID, x).kernel_basis
    a = geometry.levi_matrix_curvature(DIV3, ELLIPSOID, x, K)
    b = geometry.levi_matrix_curvature(DIV3, big, R * x, K)
    assert np.allclose(b, a / R, atol=1e-10)


def test_strong_pseudoconvexity_cases():
    r = geometry.strong_pseudoconvexity(DIV3, domains.ball())
    assert r["verdict"] and abs(r["min_eig"] - 1) < 1e-12
    r = geometry.strong_pseudoconvexity(catalog.noncocanceling_example(), domains.ball(n=2))
    assert not r["verdict"] and r["min_eig"] <= 1e-10
    # an elliptic boundary symbol leaves nothing to test
    r = geometry.strong_pseudoconvexity(catalog.gradient_symbol(3), domains.ball())
    assert r["verdict"] and r["vacuous_points"] == r["samples"]


def test_superellipsoid_curl_pseudoconvex_on_samples():
    dom = domains.superellipsoid([1.0, 1.0, 1.0], 4)
    assert geometry.strict_convexity(dom)["verdict"]
    assert geometry.strong_pseudoconvexity(catalog.curl_symbol(), dom)["verdict"]


def test_projector_field_divergence_is_tangential():
    dom = domains.ball()
    P = geometry.kernel_projector_field(DIV3, dom)
    x = np.array([[0.0, 0.6, 0.8], [1.0, 0.0, 0.0]])
    nu = geometry.normal(dom, x)
    assert P.kernel_dim == 2
    assert np.allclose(P(x), np.eye(3) - nu[:, :, None] * nu[:, None, :], atol=1e-13)


def test_projector_field_of_elliptic_symbol_vanishes():
    P = geometry.kernel_projector_field(catalog.gradient_symbol(3), domains.ball())
    assert P.kernel_dim == 0
    assert np.allclose(P(np.array([[0.0, 0.0, 1.0]])), 0.0, atol=1e-13)


def test_dolbeault_kernel_has_constant_dimension():
    B = catalog.dolbeault(2, 1).pair.B
    P = geometry.kernel_projector_field(B, domains.ball(n=4), resolution=3)
    assert P.kernel_dim == 1
    rng = np.random.default_rng(3)
    x = _random_boundary_points(domains.ball(n=4), rng, 100)
    assert np.allclose(np.trace(P(x), axis1=1, axis2=2).real, 1.0, atol=1e-10)


def test_rank_jump_detected():
    with pytest.raises(RankJump) as info:
        geometry.kernel_projector_field(catalog.noncocanceling_example(), domains.ball(n=2), resolution=15)
    assert set(info.value.dims) == {1, 2}


def test_sphere_grid_is_unit_and_off_coordinate_planes():
    g = domains.sphere_grid(3, 8)
    assert g.shape == (8 * 16, 3)
    assert np.allclose(np.linalg.norm(g, axis=1), 1.0)
    assert np.min(np.abs(g)) > 1e-3
