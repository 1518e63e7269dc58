import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weitzenbock import catalog, domains, fields, geometry, quadrature, verify
from weitzenbock.errors import SupportError

DE_RHAM = catalog.de_rham(3, 1).pair
BALL = domains.ball()
ELLIPSOID = domains.ellipsoid([1.0, 1.5, 2.0])
ONE = lambda x: np.ones(len(x))  # noqa: E731


@pytest.mark.parametrize("dom,volume,surface", [
    (domains.ball(), 4 * np.pi / 3, 4 * np.pi),
    (domains.ball(2.0), 32 * np.pi / 3, 16 * np.pi),
    (domains.ball(n=2), np.pi, 2 * np.pi),
    (domains.ball(n=4), np.pi**2 / 2, 2 * np.pi**2),
    (domains.ellipsoid([1.0, 1.5, 2.0]), 4 * np.pi, None),
])
def test_volumes_and_surfaces(dom, volume, surface):
    order = quadrature.default_order(dom.n)
    assert abs(quadrature.volume_integral(dom, ONE, order) - volume) <= 1e-12 * volume
    if surface is not None:
        assert abs(quadrature.surface_integral(dom, ONE, order) - surface) <= 1e-12 * surface


def test_ellipse_perimeter():
    # complete elliptic integral for semi-axes (1, 2)
    from scipy.special import ellipe
    dom = domains.ellipsoid([1.0, 2.0])
    assert abs(quadrature.surface_integral(dom, ONE, 48) - 4 * 2 * ellipe(1 - 1 / 4)) < 1e-12


def test_weights_are_positive():
    for dom in (BALL, ELLIPSOID, domains.superellipsoid([1, 1, 1], 4), domains.ball(n=4)):
        rule = quadrature.build_rule(dom, 8)
        assert np.all(rule.volume_weights > 0) and np.all(rule.surface_weights > 0)


def test_order_doubling_error_small_for_smooth_integrand():
    f = lambda x: np.exp(x[:, 0] - 0.5 * x[:, 1]) * np.cos(x[:, 2])  # noqa: E731
    _, err = quadrature.volume_integral(ELLIPSOID, f, 24, error=True)
    assert err <= 1e-8
    _, err = quadrature.surface_integral(ELLIPSOID, f, 24, error=True)
    assert err <= 1e-8


def test_polynomial_domain_volume():
    dom = domains.polynomial([(-1.0, [0, 0, 0]), (1.0, [2, 0, 0]), (1.0, [0, 2, 0]), (1.0, [0, 0, 2])])
    assert abs(quadrature.volume_integral(dom, ONE, 12) - 4 * np.pi / 3) < 1e-10


def test_distance_matches_dense_boundary_sampling():
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.5, 0.5, size=(20, 3))
    d = quadrature.distance_to_boundary(ELLIPSOID, x)
    dense = ELLIPSOID.boundary_point(domains.sphere_grid(3, 160))
    oracle = np.array([np.min(np.linalg.norm(dense - p, axis=1)) for p in x])
    assert np.all(d <= oracle + 1e-12)
    assert np.max(oracle - d) < 2e-3


def test_ball_distance_is_exact():
    assert np.allclose(quadrature.distance_to_boundary(BALL, [[0.2, 0.0, 0.0], [0.0, 0.0, 0.0]]), [0.8, 1.0])


def test_bump_field_basics():
    value = np.array([1.0, -2.0, 0.5])
    fld = fields.make_bump_field(BALL, [0.1, 0.0, 0.0], 0.5, (value, np.eye(3)))
    assert np.allclose(fld.u([[0.1, 0.0, 0.0]]), value)
    assert np.allclose(fld.u([[0.7, 0.0, 0.0]]), 0.0)
    rng = np.random.default_rng(1)
    pts = np.array([0.1, 0.0, 0.0]) + 0.3 * rng.normal(size=(30, 3)) / 2
    assert fields.jacobian_spot_check(fld, pts) <= 1e-6
    r = verify.weitzenbock_residual(DE_RHAM, BALL, fld)
    assert r.rhs_boundary == 0.0 and r.residual <= 1e-12


def test_bump_must_fit_inside():
    with pytest.raises(SupportError):
        fields.make_bump_field(BALL, [0.6, 0.0, 0.0], 0.5, np.ones(3))
    with pytest.raises(SupportError):
        fields.make_bump_field(BALL, [0.0, 0.0, 0.0], 0.0, np.ones(3))


def _constant_ambient(value):
    return fields.PolynomialField(np.atleast_2d(value), [[0, 0, 0]])


def test_projected_constant_field_is_tangential_on_boundary():
    fld = fields.make_projected_field(DE_RHAM, ELLIPSOID, _constant_ambient([1.0, 2.0, -1.0]))
    assert fld.compat_residual <= 1e-12
    pts = geometry.boundary_samples(ELLIPSOID, 10)
    nu = geometry.normal(ELLIPSOID, pts)
    assert np.max(np.abs(np.einsum("mi,mi->m", fld.u(pts), nu))) <= 1e-12
    # untouched away from the collar
    assert np.allclose(fld.u([[0.0, 0.0, 0.0]]), [1.0, 2.0, -1.0])


def test_projected_field_for_elliptic_boundary_symbol_vanishes_on_boundary():
    p = catalog.pair_with_boundary_symbol(catalog.gradient_symbol(3, 1))
    amb = fields.PolynomialField([[1.0], [0.5]], [[0, 0, 0], [1, 0, 0]])
    fld = fields.make_projected_field(p, BALL, amb)
    pts = geometry.boundary_samples(BALL, 8)
    assert np.max(np.abs(fld.u(pts))) <= 1e-12
    assert np.max(np.abs(fld.u(0.5 * pts))) > 0.1


def test_projected_field_reproduces_tangential_rotation():
    # a x x with a = (0, 0, 1): components (-y, x, 0)
    amb = fields.PolynomialField([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0, 1, 0], [1, 0, 0]])
    fld = fields.make_projected_field(DE_RHAM, BALL, amb)
    rng = np.random.default_rng(2)
    x = rng.uniform(-0.57, 0.57, size=(200, 3))
    assert np.allclose(fld.u(x), np.cross([0.0, 0.0, 1.0], x), atol=1e-13)
    assert np.allclose(fld.jac(x), fields.rotation_field([0.0, 0.0, 1.0]).jac(x), atol=1e-12)


def test_projected_field_jacobian_in_collar():
    rng = np.random.default_rng(3)
    amb = fields.random_polynomial_field(3, 3, 3, rng)
    fld = fields.make_projected_field(DE_RHAM, ELLIPSOID, amb)
    th = rng.normal(size=(40, 3))
    th /= np.linalg.norm(th, axis=1, keepdims=True)
    x = ELLIPSOID.center + (ELLIPSOID.radial(th) * rng.uniform(0.85, 0.98, 40))[:, None] * th
    assert fields.jacobian_spot_check(fld, x) <= 1e-5


def test_constant_field_in_common_kernel_gives_zero_identity():
    p = catalog.pair_with_boundary_symbol(catalog.noncocanceling_example())
    disk = domains.ball(n=2)
    fld = fields.constant_field(np.array([0.0, 1.0]), 2, p.B, disk)
    r = verify.weitzenbock_residual(p, disk, fld)
    assert r.lhs_interior == 0 and r.rhs_boundary == 0


def test_identity_residual_does_not_grow_with_order():
    rng = np.random.default_rng(4)
    fld = fields.make_projected_field(DE_RHAM, ELLIPSOID, fields.random_polynomial_field(3, 3, 2, rng))
    coarse = verify.weitzenbock_residual(DE_RHAM, ELLIPSOID, fld, 16).residual
    fine = verify.weitzenbock_residual(DE_RHAM, ELLIPSOID, fld, 32).residual
    assert fine <= max(coarse, 1e-10)


def test_rotation_quotients_on_unit_ball():
    fld = fields.rotation_field([0.0, 0.6, 0.8], DE_RHAM.B, BALL)
    assert abs(verify.coercivity_quotient(DE_RHAM, BALL, [fld]) - 6 / 11) < 1e-12
    assert abs(verify.coercivity_quotient(DE_RHAM, BALL, [fld.scaled(3.0)]) - 6 / 11) < 1e-12
    assert abs(verify.morrey_quotient(DE_RHAM, BALL, [fld])["max_quotient"] - 0.5) < 1e-12
    assert abs(verify.square_function_quotient(DE_RHAM, BALL, [fld])["max_quotient"] - 0.125) < 1e-10


def test_square_function_quotient_scales_with_dilation():
    big = domains.dilate(BALL, 2.0)
    fld = fields.rotation_field([1.0, 0.0, 0.0], DE_RHAM.B, big)
    assert abs(verify.square_function_quotient(DE_RHAM, big, [fld])["max_quotient"] - 0.25) < 1e-10


def test_quotients_need_fields():
    for fn in (verify.coercivity_quotient, verify.morrey_quotient, verify.square_function_quotient):
        with pytest.raises(ValueError):
            fn(DE_RHAM, BALL, [])


def test_bump_quotients():
    fld = fields.make_bump_field(BALL, [0.0, 0.2, 0.0], 0.6, (np.ones(3), np.eye(3)))
    assert verify.morrey_quotient(DE_RHAM, BALL, [fld])["max_quotient"] == 0
    assert 0 < verify.square_function_quotient(DE_RHAM, BALL, [fld])["max_quotient"] < 1


def test_noncocanceling_constant_field_violates_morrey():
    p = catalog.pair_with_boundary_symbol(catalog.noncocanceling_example())
    disk = domains.ball(n=2)
    fld = fields.constant_field(np.array([0.0, 1.0]), 2, p.B, disk)
    r = verify.morrey_quotient(p, disk, [fld])
    assert r["violations"] == [fld.descriptor] and r["per_field"] == [np.inf]


def test_incompatible_field_is_rejected():
    fld = fields.constant_field(np.array([1.0, 0.0, 0.0]), 3, DE_RHAM.B, BALL)
    assert not fld.is_compatible
    with pytest.raises(ValueError):
        verify.weitzenbock_residual(DE_RHAM, BALL, fld)


def test_quintic_blend():
    t = np.linspace(-0.5, 1.5, 41)
    b = fields.quintic_blend(t)
    assert b[0] == 0 and b[-1] == 1 and np.all(np.diff(b) >= 0)
    h = 1e-6
    inner = np.linspace(0.05, 0.95, 10)
    fd = (fields.quintic_blend(inner + h) - fields.quintic_blend(inner - h)) / (2 * h)
    assert np.allclose(fd, fields.quintic_blend_derivative(inner), atol=1e-8)


@settings(max_examples=15, deadline=None)
@given(c=st.floats(0.1, 10.0), seed=st.integers(0, 2**32 - 1))
def test_quotients_are_scale_invariant(c, seed):
    rng = np.random.default_rng(seed)
    fld = fields.make_bump_field(BALL, [0.0, 0.0, 0.0], 0.7, (rng.normal(size=3), rng.normal(size=(3, 3))))
    a = verify.square_function_quotient(DE_RHAM, BALL, [fld], order=12)["max_quotient"]
    b = verify.square_function_quotient(DE_RHAM, BALL, [fld.scaled(c)], order=12)["max_quotient"]
    assert abs(a - b) <= 1e-12 * max(1, a)
    a = verify.coercivity_quotient(DE_RHAM, BALL, [fld], order=12)
    b = verify.coercivity_quotient(DE_RHAM, BALL, [fld.scaled(c)], order=12)
    assert abs(a - b) <= 1e-12 * max(1, a)
