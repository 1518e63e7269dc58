"""Test fields u: R^n -> F with analytic Jacobians.

Jacobians follow the convention X[a, j] = d_j u_a, batched as (N, dim_F, n).
Three families are provided: compactly supported bumps, fields projected
onto Ker B(nu) near the boundary, and closed-form exact fields.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry
from .domains import FD_STEP, Polynomial, sphere_grid
from .errors import SupportError
from .symbols import eval_symbol

COMPACT = "compact_support"
PROJECTED = "projected_boundary_compatible"
EXACT = "exact_family"
COMPAT_TOL = 1e-8
COLLAR_FRACTION = 0.2
BUMP_POWER = 4


@dataclass(frozen=True, eq=False)
class TestField:
    """A C^2 field with its Jacobian.

    ``support`` is (center, radius) for compactly supported fields, ``breaks``
    gives radial quadrature breakpoints (see quadrature.build_rule) where the
    field is only piecewise smooth.
    """

    __test__ = False  # not a pytest class

    u: callable
    jac: callable
    kind: str
    descriptor: str = ""
    compat_residual: float = 0.0
    sup_norm: float = 1.0
    support: tuple = None
    breaks: callable = None
    meta: dict = field(default_factory=dict)

    def scaled(self, c):
        """The field c * u (same kind and certificate scaled)."""
        return replace(self, u=lambda x: c * self.u(x), jac=lambda x: c * self.jac(x),
                       compat_residual=abs(c) * self.compat_residual, sup_norm=abs(c) * self.sup_norm,
                       descriptor=f"{c:g}*{self.descriptor}")

    @property
    def is_compatible(self):
        return self.kind == COMPACT or self.compat_residual <= COMPAT_TOL * max(self.sup_norm, 1e-300)


def _as_points(x):
    return np.atleast_2d(np.asarray(x, dtype=float))


def affine_profile(value, linear=None):
    """v(x) = value + linear (x - x0) as a (v, Dv) pair of callables of (x, x0)."""
    value = np.asarray(value)
    dim_F = value.size
    linear = None if linear is None else np.asarray(linear)

    def v(x, x0):
        out = np.broadcast_to(value, (len(x), dim_F)).astype(np.result_type(value, float))
        if linear is not None:
            out = out + (x - x0) @ linear.T
        return out

    def dv(x, x0):
        n = x.shape[-1]
        if linear is None:
            return np.zeros((len(x), dim_F, n), dtype=np.result_type(value, float))
        return np.broadcast_to(linear, (len(x),) + linear.shape).astype(np.result_type(value, linear, float))

    return v, dv


def make_bump_field(dom, center, radius, value_profile, power=BUMP_POWER):
    """u = (1 - |x - c|^2 / R^2)_+^power v(x) with v = value + linear (x - c).

    ``value_profile`` is a constant vector or a pair (value, linear matrix).
    The bump is C^{power - 1}, and a polynomial inside its support, so
    Gauss rules on the support ball integrate field energies exactly.
    """
    center = np.asarray(center, dtype=float)
    R = float(radius)
    if R <= 0:
        raise SupportError("bump radius must be positive")
    probe = center + R * sphere_grid(dom.n, 16)
    if dom.rho(center) >= 0 or np.any(dom.rho(probe) >= 0):
        raise SupportError(f"closed ball of radius {R} about {center.tolist()} is not inside the domain")
    if isinstance(value_profile, tuple):
        value, linear = value_profile
    else:
        value, linear = value_profile, None
    v, dv = affine_profile(value, linear)

    def parts(x):
        x = _as_points(x)
        y = x - center
        t2 = np.sum(y**2, axis=1) / R**2
        inside = t2 < 1
        base = np.where(inside, 1 - t2, 0.0)
        beta = base**power
        dbeta = (-2 * power / R**2) * (base ** (power - 1))[:, None] * y
        return x, beta, dbeta

    def u(x):
        x, beta, _ = parts(x)
        return beta[:, None] * v(x, center)

    def jac(x):
        x, beta, dbeta = parts(x)
        return beta[:, None, None] * dv(x, center) + v(x, center)[:, :, None] * dbeta[:, None, :]

    sup = float(np.max(np.abs(np.asarray(value)))) + (0 if linear is None else R * np.linalg.norm(linear, 2))
    return TestField(u, jac, COMPACT, descriptor=f"bump(c={np.round(center, 4).tolist()}, R={R:g})",
                     compat_residual=0.0, sup_norm=sup, support=(center, R))


class PolynomialField:
    """Vector field with polynomial components sum_t c_t x^{e_t} (c_t in F)."""

    def __init__(self, coeffs, exps):
        self.coeffs = np.asarray(coeffs)  # (terms, dim_F)
        self.poly = Polynomial([(1.0, e) for e in exps])

    def _combine(self, table, weights=None):
        c = self.coeffs if weights is None else self.coeffs * weights[:, None]
        if np.iscomplexobj(c):
            return (c.real.T @ table).T + 1j * (c.imag.T @ table).T
        return (c.T @ table).T

    def __call__(self, x):
        return self._combine(self.poly.monomial_table(_as_points(x), self.poly.exps))

    def jacobian(self, x):
        x = _as_points(x)
        cols = []
        for j in range(self.poly.n):
            e = self.poly.exps.copy()
            c = e[:, j].astype(float)
            e[:, j] -= 1
            cols.append(self._combine(self.poly.monomial_table(x, e), c))
        return np.stack(cols, axis=-1)


def monomial_exponents(n, degree):
    out = [[]]
    for _ in range(n):
        out = [e + [k] for e in out for k in range(degree + 1)]
    return [e for e in out if sum(e) <= degree]


def random_polynomial_field(dim_F, n, degree, rng, complex_=False, scale=1.0):
    exps = monomial_exponents(n, degree)
    c = rng.normal(size=(len(exps), dim_F))
    if complex_:
        c = c + 1j * rng.normal(size=(len(exps), dim_F))
    return PolynomialField(scale * c, exps)


def quintic_blend(t):
    """C^2 step: 0 for t <= 0, 1 for t >= 1, 6t^5 - 15t^4 + 10t^3 in between."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10 - 15 * t + 6 * t**2)


def quintic_blend_derivative(t):
    inside = (t > 0) & (t < 1)
    t = np.clip(t, 0.0, 1.0)
    return np.where(inside, 30 * t**2 * (1 - t) ** 2, 0.0)


def _boundary_map(dom, x):
    """Radial boundary projection xbar(x) = c + r(theta) theta and its Jacobian."""
    y = x - dom.center
    dist = np.linalg.norm(y, axis=1)
    theta = y / dist[:, None]
    R = dom.radial(theta)
    xbar = dom.center + R[:, None] * theta
    g = dom.grad(xbar)
    tang = np.eye(dom.n) - theta[:, :, None] * theta[:, None, :]
    grad_R = -(R / (dist * np.einsum("mi,mi->m", g, theta)))[:, None] * np.einsum("mij,mj->mi", tang, g)
    J = theta[:, :, None] * grad_R[:, None, :] + (R / dist)[:, None, None] * tang
    return xbar, J, dist, R, theta, grad_R


def _projector_and_derivative(B, dom, xbar):
    """P(y) = I - B(N)^+ B(N) at y and dP/dy_m, shape (N, f, f, n)."""
    g = dom.grad(xbar)
    gn = np.linalg.norm(g, axis=1)
    N = g / gn[:, None]
    H = dom.hess(xbar)
    f = B.dim_src
    eye = np.eye(f)
    K = eval_symbol(B, N)
    if B.dim_dst == 0:
        P = np.broadcast_to(eye, (len(xbar), f, f)).astype(B.coeffs.dtype)
        return P, np.zeros(P.shape + (dom.n,), dtype=P.dtype)
    Kp = np.linalg.pinv(K, rcond=geometry.RANK_TOL)
    Pi = Kp @ K
    # dN/dy_m = H e_m / |g| - g <g, H e_m> / |g|^3
    dN = H / gn[:, None, None] - g[:, :, None] * np.einsum("mi,mij->mj", g, H)[:, None, :] / gn[:, None, None] ** 3
    dP = []
    for m in range(dom.n):
        dK = eval_symbol(B, dN[:, :, m])
        T = Kp @ dK @ (eye - Pi)
        dP.append(-(T + np.conj(np.swapaxes(T, 1, 2))))
    return eye - Pi, np.stack(dP, axis=-1)


def make_projected_field(p, dom, ambient, collar_fraction=COLLAR_FRACTION, check_resolution=16):
    """u = v + chi (P(xbar) - I) v with v the ambient field and P the Ker B(N) projector.

    chi is a quintic blend rising from 0 to 1 across a collar of width
    collar_fraction * inradius inside the boundary, and xbar is the radial
    projection onto the boundary; on the boundary u = P v, so B(nu) u = 0.
    ``ambient`` is a PolynomialField (or anything with __call__ and jacobian).
    """
    B = p.B
    geometry.kernel_projector_field(B, dom, resolution=check_resolution)  # raises RankJump
    inradius = dom.inradius
    width = collar_fraction * inradius
    if width < 1e-3 or width >= inradius:
        raise ValueError(f"collar width {width:.3g} unusable for inradius {inradius:.3g}")

    def pieces(x):
        x = _as_points(x)
        v = ambient(x)
        dv = ambient.jacobian(x)
        dist = np.linalg.norm(x - dom.center, axis=1)
        theta = np.where(dist[:, None] > 0, x - dom.center, np.eye(dom.n)[0]) / np.where(dist > 0, dist, 1.0)[:, None]
        R_all = dom.radial(theta) if len(x) else dist
        in_collar = dist > R_all - width
        return x, v, dv, in_collar

    def u(x):
        x, v, dv, col = pieces(x)
        out = v.astype(np.result_type(v, B.coeffs))
        if np.any(col):
            xc = x[col]
            xbar, _, dist, R, _, _ = _boundary_map(dom, xc)
            chi = quintic_blend((dist - (R - width)) / width)
            P, _ = _projector_and_derivative(B, dom, xbar)
            corr = np.einsum("mab,mb->ma", P, v[col]) - v[col]
            out[col] = v[col] + chi[:, None] * corr
        return out

    def jac(x):
        x, v, dv, col = pieces(x)
        out = dv.astype(np.result_type(dv, B.coeffs))
        if np.any(col):
            xc, vc, dvc = x[col], v[col], dv[col]
            xbar, Jbar, dist, R, theta, grad_R = _boundary_map(dom, xc)
            tau = (dist - (R - width)) / width
            chi = quintic_blend(tau)
            grad_chi = quintic_blend_derivative(tau)[:, None] * (theta - grad_R) / width
            P, dP = _projector_and_derivative(B, dom, xbar)
            corr = np.einsum("mab,mb->ma", P, vc) - vc
            # d/dx_k [P(xbar) v] = sum_m dP/dy_m (dxbar_m/dx_k) v + P dv/dx_k
            dPx = np.einsum("mabl,mlk->mabk", dP, Jbar)
            dcorr = np.einsum("mabk,mb->mak", dPx, vc) + np.einsum("mab,mbk->mak", P, dvc) - dvc
            out[col] = dvc + chi[:, None, None] * dcorr + corr[:, :, None] * grad_chi[:, None, :]
        return out

    def breaks(theta, r):
        return np.clip(1 - width / r, 0.0, 1.0)[:, None]

    fld = TestField(u, jac, PROJECTED, descriptor=f"projected({getattr(ambient, 'name', 'polynomial')})",
                    breaks=breaks, meta=dict(collar_width=width))
    res, sup = boundary_compatibility(B, dom, fld, resolution=check_resolution)
    sup = max(sup, _sample_sup(dom, fld))
    fld = replace(fld, compat_residual=res, sup_norm=sup)
    if not fld.is_compatible:
        raise ValueError(f"projected field fails the boundary condition: residual {res:.3e}, sup {sup:.3e}")
    return fld


def boundary_compatibility(B, dom, fld, resolution=16):
    """max |B(nu) u| over boundary samples, and max |u| there."""
    pts = geometry.boundary_samples(dom, resolution)
    nu = geometry.normal(dom, pts)
    uu = fld.u(pts)
    Bu = np.einsum("mef,mf->me", eval_symbol(B, nu), uu) if B.dim_dst else np.zeros((len(pts), 0))
    res = float(np.max(np.linalg.norm(Bu, axis=1))) if Bu.size else 0.0
    return res, float(np.max(np.linalg.norm(uu, axis=1)))


def _sample_sup(dom, fld, resolution=8):
    theta = sphere_grid(dom.n, resolution)
    r = dom.radial(theta)
    s = np.linspace(0.0, 1.0, 6)[1:]
    pts = dom.center + (s[:, None, None] * r[None, :, None]) * theta[None]
    return float(np.max(np.linalg.norm(fld.u(pts.reshape(-1, dom.n)), axis=1)))


def rotation_field(a, B=None, dom=None):
    """u(x) = a x x in R^3 (tangential on spheres about the origin); Du = [a]_x."""
    a = np.asarray(a, dtype=float)
    skew = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])

    def u(x):
        return np.cross(a, _as_points(x))

    def jac(x):
        return np.broadcast_to(skew, (len(_as_points(x)), 3, 3)).copy()

    fld = TestField(u, jac, EXACT, descriptor=f"rotation(a={a.tolist()})", sup_norm=float(np.linalg.norm(a)))
    return _certify(fld, B, dom)


def constant_field(value, n, B=None, dom=None):
    value = np.asarray(value)

    def u(x):
        return np.broadcast_to(value, (len(_as_points(x)), value.size)).copy()

    def jac(x):
        return np.zeros((len(_as_points(x)), value.size, n), dtype=value.dtype)

    fld = TestField(u, jac, EXACT, descriptor=f"constant({np.round(value, 4).tolist()})",
                    sup_norm=float(np.linalg.norm(value)))
    return _certify(fld, B, dom)


def _certify(fld, B, dom):
    if B is None or dom is None:
        return fld
    res, _ = boundary_compatibility(B, dom, fld)
    return replace(fld, compat_residual=res)


def jacobian_spot_check(fld, points, step=FD_STEP):
    """Largest relative deviation of jac from central differences of u at the points."""
    x = _as_points(points)
    n = x.shape[1]
    J = fld.jac(x)
    h = step * (1 + np.linalg.norm(x, axis=1))
    cols = [(fld.u(x + h[:, None] * e) - fld.u(x - h[:, None] * e)) / (2 * h[:, None]) for e in np.eye(n)]
    fd = np.stack(cols, axis=-1)
    scale = max(float(np.max(np.abs(J))), float(np.max(np.abs(fd))), 1e-300)
    return float(np.max(np.abs(J - fd)) / scale)
