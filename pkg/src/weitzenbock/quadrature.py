"""Tensor Gauss rules on star-shaped domains and their boundaries.

Points are written x = c + s r(theta) theta with theta on S^{n-1} in
hyperspherical angles. Polar angles use Gauss-Jacobi rules in cos(phi)
(Gauss-Legendre when n = 3), the azimuth uses the trapezoid rule (spectrally accurate
for periodic integrands), and the radial variable s in [0, 1] uses composite
Gauss-Legendre with optional per-direction breakpoints.

    dx     = s^{n-1} r^n ds dOmega
    dsigma = r^{n-1} |grad rho| / <grad rho, theta> dOmega

Ellipsoid-like domains carry a shape matrix A and are integrated in the
coordinates of the ball they are the image of.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .domains import ball, hyperspherical_to_cartesian, sphere_grid

DEFAULT_ORDER = 24


def default_order(n):
    """Order 24 up to three dimensions; 12 above, where the angular grid gains a factor per dimension."""
    return DEFAULT_ORDER if n <= 3 else DEFAULT_ORDER // 2


@dataclass(frozen=True)
class QuadratureRule:
    volume_nodes: np.ndarray
    volume_weights: np.ndarray
    surface_nodes: np.ndarray
    surface_weights: np.ndarray
    order: int


def gauss_legendre(order, a=0.0, b=1.0):
    t, w = np.polynomial.legendre.leggauss(order)
    return a + (b - a) * (t + 1) / 2, w * (b - a) / 2


def angular_rule(n, order):
    """Directions and weights integrating over S^{n-1}; sum of weights = |S^{n-1}|.

    Polar angle i carries the weight sin^m(phi) dphi = (1 - z^2)^{(m-1)/2} dz
    in z = cos(phi), m = n - 2 - i, integrated by Gauss-Jacobi in z.
    """
    if n < 2:
        raise ValueError("angular rule needs n >= 2")
    n_azim = 2 * order
    azim = 2 * np.pi * np.arange(n_azim) / n_azim
    axes, weights = [], []
    for i in range(n - 2):
        alpha = (n - 3 - i) / 2
        z, w = roots_jacobi(order, alpha, alpha)
        axes.append(np.arccos(z))
        weights.append(w)
    axes.append(azim)
    weights.append(np.full(n_azim, 2 * np.pi / n_azim))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
    wmesh = np.ones(len(mesh))
    for wk in np.meshgrid(*weights, indexing="ij"):
        wmesh = wmesh * wk.reshape(-1)
    return hyperspherical_to_cartesian(mesh), wmesh


def _radial_nodes(order, breaks):
    """Composite Gauss nodes on [0, 1] per direction; breaks has shape (m, k) with values in (0, 1)."""
    m = breaks.shape[0]
    edges = np.concatenate([np.zeros((m, 1)), np.sort(breaks, axis=1), np.ones((m, 1))], axis=1)
    t, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:, :-1, None], edges[:, 1:, None]
    s = a + (b - a) * (t + 1) / 2
    ws = w * (b - a) / 2
    return s.reshape(m, -1), ws.reshape(m, -1)


def build_rule(dom, order=DEFAULT_ORDER, breaks=None):
    """Volume and surface nodes for a star-shaped domain.

    Reference directions t are pushed through the domain's shape matrix A
    (identity if absent): x = c + s rt A t with rt = r(theta) / |A t| and
    theta = A t / |A t|, so dx = |det A| s^{n-1} rt^n ds dOmega(t) and
    dsigma = |det A| rt^{n-1} |grad rho| / <A^T grad rho, t> dOmega(t).

    ``breaks`` optionally maps physical directions (m, n) and radii (m,) to
    radial breakpoints (m, k) in s-coordinates, e.g. the inner edge of a
    blending collar.
    """
    n = dom.n
    A = np.eye(n) if dom.shape_matrix is None else np.asarray(dom.shape_matrix, dtype=float)
    det = abs(np.linalg.det(A))
    t, w_ang = angular_rule(n, order)
    At = t @ A.T
    stretch = np.linalg.norm(At, axis=-1)
    theta = At / stretch[:, None]
    r = dom.radial(theta)
    rt = r / stretch
    br = np.zeros((len(t), 0)) if breaks is None else np.atleast_2d(breaks(theta, r))
    s, w_rad = _radial_nodes(order, br)
    vol_nodes = dom.center + (s * r[:, None])[..., None] * theta[:, None, :]
    vol_weights = det * w_rad * s ** (n - 1) * (rt**n * w_ang)[:, None]
    surf_nodes = dom.center + r[:, None] * theta
    g = dom.grad(surf_nodes)
    surf_weights = det * w_ang * rt ** (n - 1) * np.linalg.norm(g, axis=-1) / np.einsum("mi,mi->m", g @ A, t)
    return QuadratureRule(vol_nodes.reshape(-1, n), vol_weights.reshape(-1), surf_nodes, surf_weights, order)


def _integrate(nodes, weights, f):
    vals = np.asarray(f(nodes))
    return np.tensordot(weights, vals, axes=([0], [0]))


def volume_integral(dom, f, order=DEFAULT_ORDER, error=False, breaks=None):
    """Integral of f over the domain; f maps (N, n) points to (N, ...) values.

    With ``error=True`` returns (value, |I(2 order) - I(order)|).
    """
    val = _integrate(*_volume(dom, order, breaks), f)
    if not error:
        return val
    fine = _integrate(*_volume(dom, 2 * order, breaks), f)
    return fine, np.abs(fine - val)


def surface_integral(dom, f, order=DEFAULT_ORDER, error=False):
    """Integral of f over the boundary with respect to surface measure."""
    rule = build_rule(dom, order)
    val = _integrate(rule.surface_nodes, rule.surface_weights, f)
    if not error:
        return val
    fine = build_rule(dom, 2 * order)
    fine_val = _integrate(fine.surface_nodes, fine.surface_weights, f)
    return fine_val, np.abs(fine_val - val)


def _volume(dom, order, breaks):
    rule = build_rule(dom, order, breaks)
    return rule.volume_nodes, rule.volume_weights


def support_ball(center, radius):
    """Ball used to integrate fields supported in B(center, radius)."""
    return ball(radius, center)


def distance_to_boundary(dom, x, iterations=20, seed_resolution=8):
    """Euclidean distance from points x (N, n) to {rho = 0}.

    Uses the domain's exact formula when available, otherwise Newton on the
    Lagrange system y - x + mu grad rho(y) = 0, rho(y) = 0 started from the
    nearest boundary sample; points where Newton fails keep the sample distance.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if dom.exact_distance is not None:
        return dom.exact_distance(x)
    seeds = dom.boundary_point(sphere_grid(dom.n, seed_resolution))
    out = np.empty(len(x))
    for start in range(0, len(x), 4096):
        xs = x[start:start + 4096]
        d2 = np.sum((xs[:, None, :] - seeds[None]) ** 2, axis=-1)
        nearest = np.argmin(d2, axis=1)
        fallback = np.sqrt(d2[np.arange(len(xs)), nearest])
        out[start:start + len(xs)] = _lagrange_newton(dom, xs, seeds[nearest], fallback, iterations)
    return out


def _lagrange_newton(dom, x, y, fallback, iterations):
    n = dom.n
    g = dom.grad(y)
    mu = -np.einsum("mi,mi->m", x - y, g) / np.einsum("mi,mi->m", g, g)
    for _ in range(iterations):
        g = dom.grad(y)
        H = dom.hess(y)
        F = np.concatenate([y - x + mu[:, None] * g, dom.rho(y)[:, None]], axis=1)
        J = np.zeros((len(x), n + 1, n + 1))
        J[:, :n, :n] = np.eye(n) + mu[:, None, None] * H
        J[:, :n, n] = g
        J[:, n, :n] = g
        try:
            step = np.linalg.solve(J, -F[..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        y = y + step[:, :n]
        mu = mu + step[:, n]
        if np.max(np.abs(step)) < 1e-14:
            break
    d = np.linalg.norm(x - y, axis=1)
    ok = np.isfinite(d) & (np.abs(dom.rho(y)) < 1e-10) & (d <= fallback + 1e-12)
    return np.where(ok, d, fallback)
