"""Bounded C^2 domains {rho < 0} that are star-shaped about a center.

Defining functions and their derivatives are vectorised over leading axes:
``rho(x)`` maps (..., n) to (...), ``grad`` to (..., n) and ``hess`` to
(..., n, n). Each domain also knows its radial profile r(theta), so that
x = center + r(theta) theta parametrises the boundary.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import NotStarShaped

FD_STEP = np.finfo(float).eps ** (1 / 3)


@dataclass(frozen=True, eq=False)
class ImplicitDomain:
    n: int
    rho: callable
    grad: callable
    hess: callable
    radial: callable
    center: np.ndarray
    name: str = ""
    params: dict = field(default_factory=dict)
    exact_distance: callable = None
    analytic_hessian: bool = True
    # linear map A with the domain close to c + A(ball); quadrature uses it
    shape_matrix: np.ndarray = None

    def boundary_point(self, theta):
        """Boundary point(s) in the unit direction(s) theta."""
        theta = np.asarray(theta, dtype=float)
        return self.center + self.radial(theta)[..., None] * theta

    def contains(self, x):
        return self.rho(np.asarray(x, dtype=float)) < 0

    @property
    def inradius(self):
        """Smallest radial extent about the center (estimated on a sphere grid)."""
        return float(self.radial(sphere_grid(self.n, 24)).min())

    @property
    def outer_radius(self):
        return float(self.radial(sphere_grid(self.n, 24)).max())

    def __repr__(self):
        return f"ImplicitDomain({self.name or 'custom'}, n={self.n})"


def hyperspherical_to_cartesian(angles):
    """Unit vectors from hyperspherical angles (phi_1..phi_{n-2} in [0, pi], phi_{n-1} in [0, 2 pi])."""
    angles = np.asarray(angles, dtype=float)
    m = angles.shape[-1]
    out = np.ones(angles.shape[:-1] + (m + 1,))
    s = np.ones(angles.shape[:-1])
    for i in range(m):
        out[..., i] = s * np.cos(angles[..., i])
        s = s * np.sin(angles[..., i])
    out[..., m] = s
    return out


def sphere_grid(n, resolution):
    """Cell-centred hyperspherical grid on S^{n-1}.

    ``resolution`` cells per polar angle and ``2 * resolution`` in azimuth.
    Cell centres avoid the coordinate hyperplanes for even ``resolution``.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]])
    polar = (np.arange(resolution) + 0.5) * np.pi / resolution
    azim = (np.arange(2 * resolution) + 0.5) * np.pi / resolution
    axes = [polar] * (n - 2) + [azim]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
    return hyperspherical_to_cartesian(mesh)


def ball(radius=1.0, center=None, n=3):
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    n = center.size
    R = float(radius)

    def rho(x):
        return np.sum((x - center) ** 2, axis=-1) - R**2

    def grad(x):
        return 2 * (x - center)

    def hess(x):
        return np.broadcast_to(2 * np.eye(n), np.shape(x)[:-1] + (n, n)).copy()

    def radial(theta):
        return np.full(np.shape(theta)[:-1], R)

    def distance(x):
        return np.abs(R - np.linalg.norm(x - center, axis=-1))

    return ImplicitDomain(n, rho, grad, hess, radial, center, name="ball",
                          params=dict(radius=R, center=center.tolist()), exact_distance=distance)


def ellipsoid(semi_axes, center=None):
    a = np.asarray(semi_axes, dtype=float)
    n = a.size
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    def rho(x):
        return np.sum(((x - center) / a) ** 2, axis=-1) - 1

    def grad(x):
        return 2 * (x - center) / a**2

    def hess(x):
        return np.broadcast_to(np.diag(2 / a**2), np.shape(x)[:-1] + (n, n)).copy()

    def radial(theta):
        return 1 / np.sqrt(np.sum((theta / a) ** 2, axis=-1))

    return ImplicitDomain(n, rho, grad, hess, radial, center, name="ellipsoid",
                          params=dict(semi_axes=a.tolist(), center=center.tolist()), shape_matrix=np.diag(a))


def superellipsoid(semi_axes, exponent, center=None):
    """sum |x_i / a_i|^p < 1 with p >= 2 (C^2 for p >= 2)."""
    a = np.asarray(semi_axes, dtype=float)
    p = float(exponent)
    if p < 2:
        raise ValueError(f"superellipsoid exponent must be >= 2 for a C^2 boundary, got {p}")
    n = a.size
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    def rho(x):
        return np.sum(np.abs((x - center) / a) ** p, axis=-1) - 1

    def grad(x):
        y = (x - center) / a
        return p * np.abs(y) ** (p - 1) * np.sign(y) / a

    def hess(x):
        y = (x - center) / a
        d = p * (p - 1) * np.abs(y) ** (p - 2) / a**2
        return d[..., None] * np.eye(n)

    def radial(theta):
        return np.sum(np.abs(theta / a) ** p, axis=-1) ** (-1 / p)

    return ImplicitDomain(n, rho, grad, hess, radial, center, name="superellipsoid",
                          params=dict(semi_axes=a.tolist(), exponent=p, center=center.tolist()),
                          shape_matrix=np.diag(a))


class Polynomial:
    """Real polynomial sum_t c_t x^{e_t} with exact gradient and Hessian."""

    def __init__(self, terms):
        self.coeffs = np.array([float(c) for c, _ in terms])
        self.exps = np.array([list(e) for _, e in terms], dtype=int)
        if self.exps.ndim != 2:
            raise ValueError("polynomial terms need exponent lists of equal length")
        self.n = self.exps.shape[1]

    def monomial_table(self, x, exps):
        """x^e for every exponent row e as a (terms, points) array; rows with a negative entry give 0."""
        xt = np.ascontiguousarray(np.asarray(x, dtype=float).reshape(-1, self.n).T)
        top = max(int(exps.max()), 0) if exps.size else 0
        powers = np.empty((self.n, top + 1, xt.shape[1]))
        powers[:, 0] = 1.0
        for k in range(1, top + 1):
            powers[:, k] = powers[:, k - 1] * xt
        safe = np.where(exps >= 0, exps, 0)
        out = np.ones((len(exps), xt.shape[1]))
        for j in range(self.n):
            out *= powers[j, safe[:, j]]
        out[~np.all(exps >= 0, axis=1)] = 0.0
        return out

    def _monomials(self, x, exps):
        lead = np.shape(x)[:-1]
        return self.monomial_table(x, exps).T.reshape(lead + (len(exps),))

    def __call__(self, x):
        return self._monomials(x, self.exps) @ self.coeffs

    def grad(self, x):
        out = []
        for j in range(self.n):
            e = self.exps.copy()
            c = self.coeffs * e[:, j]
            e[:, j] -= 1
            out.append(self._monomials(x, e) @ c)
        return np.stack(out, axis=-1)

    def hess(self, x):
        out = np.zeros(np.shape(x)[:-1] + (self.n, self.n))
        for j in range(self.n):
            for k in range(j, self.n):
                e = self.exps.copy()
                c = self.coeffs * e[:, j]
                e[:, j] -= 1
                c = c * e[:, k]
                e[:, k] -= 1
                out[..., j, k] = out[..., k, j] = self._monomials(x, e) @ c
        return out


def _ray_radius(rho, center, theta, bound, scan):
    ts = np.linspace(0, bound, scan + 1)
    vals = rho(center + ts[:, None] * theta)
    if vals[0] >= 0:
        raise NotStarShaped(f"defining function is not negative at the center {center.tolist()}")
    if vals[-1] <= 0:
        raise NotStarShaped(f"no boundary crossing within radius {bound} in direction {theta.tolist()}")
    outside = vals > 0
    crossings = np.flatnonzero(outside[:-1] != outside[1:])
    if len(crossings) != 1:
        raise NotStarShaped(f"{len(crossings)} boundary crossings in direction {theta.tolist()}")
    i = crossings[0]
    return brentq(lambda t: rho(center + t * theta), ts[i], ts[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _radial_by_rays(rho, center, bound, scan):
    def radial(theta):
        theta = np.asarray(theta, dtype=float)
        flat = theta.reshape(-1, theta.shape[-1])
        r = np.array([_ray_radius(rho, center, t, bound, scan) for t in flat])
        return r.reshape(theta.shape[:-1])
    return radial


def polynomial(terms, center=None, bound=10.0, scan=400):
    """Domain {rho < 0} for a polynomial rho given as [(coefficient, exponents), ...].

    Must be star-shaped about ``center``: every ray must cross {rho = 0}
    exactly once inside radius ``bound`` (checked by sign scan, else
    NotStarShaped).
    """
    poly = Polynomial(terms)
    n = poly.n
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    radial = _radial_by_rays(poly, center, bound, scan)
    radial(sphere_grid(n, 8))  # fail early if not star-shaped
    return ImplicitDomain(n, poly, poly.grad, poly.hess, radial, center, name="polynomial",
                          params=dict(terms=[[float(c), list(map(int, e))] for c, e in terms],
                                      center=center.tolist(), bound=bound))


def cassini_oval(c, n=3):
    """(|x|^2 + 1)^2 - 4 x_1^2 - c^4: a peanut with a neck at x_1 = 0 for c slightly above 1."""
    def mono(**powers):
        e = [0] * n
        for k, v in powers.items():
            e[int(k[1:])] = v
        return e
    terms = [(1.0, [0] * n), (-c**4, [0] * n)]
    for i in range(n):
        terms.append((2.0, mono(**{f"x{i}": 2})))
        terms.append((1.0, mono(**{f"x{i}": 4})))
        for j in range(i + 1, n):
            terms.append((2.0, mono(**{f"x{i}": 2, f"x{j}": 2})))
    terms.append((-4.0, mono(x0=2)))
    return polynomial(terms, bound=2 * c + 2)


def finite_difference_gradient(f, x, step=FD_STEP):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    h = step * (1 + np.linalg.norm(x, axis=-1))[..., None]
    E = np.eye(n)
    return np.stack([(f(x + h * E[j]) - f(x - h * E[j])) / (2 * h[..., 0]) for j in range(n)], axis=-1)


def finite_difference_hessian(grad, x, step=FD_STEP):
    """Central differences of the gradient with step eps^(1/3) (1 + |x|), symmetrised."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    h = step * (1 + np.linalg.norm(x, axis=-1))[..., None, None]
    E = np.eye(n)
    cols = np.stack([grad(x + h[..., 0] * E[j]) - grad(x - h[..., 0] * E[j]) for j in range(n)], axis=-1)
    H = cols / (2 * h)
    return 0.5 * (H + np.swapaxes(H, -1, -2))


def from_function(rho, n, center=None, grad=None, hess=None, bound=10.0, scan=400, name="custom"):
    """Wrap a user defining function; missing derivatives use central differences."""
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    if grad is None:
        grad = lambda x: finite_difference_gradient(rho, x)  # noqa: E731
    analytic = hess is not None
    if hess is None:
        hess = lambda x: finite_difference_hessian(grad, x)  # noqa: E731
    radial = _radial_by_rays(rho, center, bound, scan)
    radial(sphere_grid(n, 8))  # fail early if not star-shaped
    return ImplicitDomain(n, rho, grad, hess, radial, center,
                          name=name, analytic_hessian=analytic)


def dilate(dom, factor):
    """The domain factor * (dom - center) + center."""
    R = float(factor)
    c = dom.center
    dist = None
    if dom.exact_distance is not None:
        dist = lambda x: R * dom.exact_distance(c + (x - c) / R)  # noqa: E731
    return ImplicitDomain(
        dom.n,
        lambda x: dom.rho(c + (x - c) / R),
        lambda x: dom.grad(c + (x - c) / R) / R,
        lambda x: dom.hess(c + (x - c) / R) / R**2,
        lambda theta: R * dom.radial(theta),
        c, name=dom.name, params=dict(dom.params, dilation=R), exact_distance=dist,
        analytic_hessian=dom.analytic_hessian,
        shape_matrix=None if dom.shape_matrix is None else R * dom.shape_matrix)


def reweight(dom, g, grad_g, hess_g):
    """Same domain with defining function g * rho for a smooth g > 0."""
    def rho(x):
        return g(x) * dom.rho(x)

    def grad(x):
        return grad_g(x) * dom.rho(x)[..., None] + g(x)[..., None] * dom.grad(x)

    def hess(x):
        r, dr, dg = dom.rho(x), dom.grad(x), grad_g(x)
        return (hess_g(x) * r[..., None, None] + dg[..., :, None] * dr[..., None, :]
                + dr[..., :, None] * dg[..., None, :] + g(x)[..., None, None] * dom.hess(x))

    return ImplicitDomain(dom.n, rho, grad, hess, dom.radial, dom.center, name=dom.name,
                          params=dict(dom.params, reweighted=True), exact_distance=dom.exact_distance,
                          analytic_hessian=dom.analytic_hessian, shape_matrix=dom.shape_matrix)


BUILTINS = {
    "ball": lambda radius=1.0, center=None, n=3: ball(radius, center, n),
    "ellipsoid": lambda semi_axes, center=None: ellipsoid(semi_axes, center),
    "superellipsoid": lambda semi_axes, exponent, center=None: superellipsoid(semi_axes, exponent, center),
    "polynomial": lambda terms, center=None, bound=10.0: polynomial(terms, center, bound),
}


def build_domain(kind, **params):
    if kind not in BUILTINS:
        raise KeyError(f"unknown domain kind {kind!r}; known: {', '.join(sorted(BUILTINS))}")
    return BUILTINS[kind](**params)
