"""Boundary geometry of implicit domains and the generalised Levi form.

For a symbol B the Levi form at a boundary point x is the quadratic form
u -> <u, L_B(x) u> restricted to u in Ker B(nu(x)). Three independent
formulas are provided:

* extension: L = sum_j B_j^* B(d_j N) with N = grad rho / |grad rho|
  (the full matrix depends on the extension N; only the restriction
  to the kernel does not),
* curvature: sum_j kappa_j |B(e_j) u|^2 over a principal frame,
* hessian: (1 / |grad rho|) sum_jk rho_jk <B_j u, B_k u>.

Compressed forms are Hermitian matrices in an orthonormal basis of the kernel.
"""

from dataclasses import dataclass

import numpy as np

from .checks import RANK_TOL
from .domains import sphere_grid
from .errors import DegenerateGradient, RankJump
from .symbols import eval_symbol

GRAD_TOL = 1e-10
BOUNDARY_TOL = 1e-8
LEVI_TOL = 1e-8
DEFAULT_RESOLUTION = 32


@dataclass(frozen=True)
class BoundaryPointData:
    x: np.ndarray
    nu: np.ndarray
    frame: np.ndarray  # columns e_j
    kappas: np.ndarray
    kernel_basis: np.ndarray
    levi: np.ndarray


@dataclass(frozen=True)
class LeviMatrix:
    """Full Levi matrix from a particular extension of the normal.

    ``full`` depends on the extension (here grad rho / |grad rho|);
    ``compressed`` is the extension-independent restriction to Ker B(nu).
    """

    full: np.ndarray
    compressed: np.ndarray
    kernel_basis: np.ndarray
    extension_dependent: bool = True


def _gradient(dom, x, check_boundary=True):
    x = np.asarray(x, dtype=float)
    if check_boundary:
        r = np.abs(dom.rho(x))
        if np.any(r > BOUNDARY_TOL):
            raise ValueError(f"point not on the boundary: |rho| = {float(np.max(r)):.3e}")
    g = dom.grad(x)
    gn = np.linalg.norm(g, axis=-1)
    if np.any(gn < GRAD_TOL):
        i = np.unravel_index(np.argmin(gn), gn.shape)
        raise DegenerateGradient(x[i], float(gn[i]))
    return g, gn


def normal(dom, x, check_boundary=True):
    """Outward unit normal grad rho / |grad rho| (batched over leading axes)."""
    g, gn = _gradient(dom, x, check_boundary)
    return g / gn[..., None]


def tangent_basis(nu):
    """Orthonormal basis (columns) of the orthogonal complement of each unit vector nu."""
    n = nu.shape[-1]
    proj = np.eye(n) - nu[..., :, None] * nu[..., None, :]
    _, V = np.linalg.eigh(proj)
    return V[..., :, 1:]


def shape_operator(dom, x, check_boundary=True):
    """Principal curvatures (ascending) and principal frame (columns) at boundary point(s) x.

    Sign convention: the unit sphere has all curvatures +1.
    """
    x = np.asarray(x, dtype=float)
    g, gn = _gradient(dom, x, check_boundary)
    nu = g / gn[..., None]
    T = tangent_basis(nu)
    S = np.swapaxes(T, -1, -2) @ dom.hess(x) @ T / gn[..., None, None]
    kappas, W = np.linalg.eigh(0.5 * (S + np.swapaxes(S, -1, -2)))
    return kappas, T @ W


def kernel_basis(mat, tol=RANK_TOL, scale=0.0):
    """Orthonormal basis (columns) of ker mat via the SVD.

    Singular values below tol * max(sigma_max, scale) count as zero; pass the
    symbol norm as ``scale`` so a symbol evaluated where it vanishes up to
    rounding is not mistaken for a full-rank matrix.
    """
    mat = np.asarray(mat)
    f = mat.shape[-1]
    if mat.shape[0] == 0:
        return np.eye(f, dtype=mat.dtype)
    _, s, Vh = np.linalg.svd(mat)
    ref = max(float(s[0]) if s.size else 0.0, scale)
    r = int(np.sum(s >= tol * ref)) if ref > 0 else 0
    return np.conj(Vh[r:].T)


def _symbol_kernel(B, nu):
    return kernel_basis(eval_symbol(B, nu), scale=B.norm)


def _compress(L, K):
    C = np.conj(K.T) @ L @ K
    return 0.5 * (C + np.conj(C.T))


def _normal_derivatives(g, gn, H):
    """Columns d_j N for N = g / |g|."""
    He = H  # column j is H e_j
    return He / gn - np.outer(g, g @ He) / gn**3


def levi_matrix_extension(B, dom, x, basis=None):
    """L_B(x) = sum_j B_j^* B(d_j N(x)) for the extension N = grad rho / |grad rho|."""
    x = np.asarray(x, dtype=float)
    g, gn = _gradient(dom, x)
    nu = g / gn
    dN = _normal_derivatives(g, gn, dom.hess(x))
    Bh = B.adjoint_coeffs()
    L = sum(Bh[j] @ eval_symbol(B, dN[:, j]) for j in range(B.n))
    K = _symbol_kernel(B, nu) if basis is None else basis
    return LeviMatrix(full=L, compressed=_compress(L, K), kernel_basis=K)


def levi_matrix_curvature(B, dom, x, basis=None):
    """Compressed form u -> sum_j kappa_j |B(e_j) u|^2 on Ker B(nu(x))."""
    x = np.asarray(x, dtype=float)
    kappas, frame = shape_operator(dom, x)
    nu = normal(dom, x)
    K = _symbol_kernel(B, nu) if basis is None else basis
    L = np.zeros((K.shape[1], K.shape[1]), dtype=np.result_type(B.coeffs, K, float))
    for j, kappa in enumerate(kappas):
        BK = eval_symbol(B, frame[:, j]) @ K
        L = L + kappa * (np.conj(BK.T) @ BK)
    return 0.5 * (L + np.conj(L.T))


def levi_matrix_hessian(B, dom, x, basis=None):
    """Compressed form (1 / |grad rho|) sum_jk rho_jk <B_j u, B_k u> on Ker B(nu(x))."""
    x = np.asarray(x, dtype=float)
    g, gn = _gradient(dom, x)
    H = dom.hess(x)
    K = _symbol_kernel(B, g / gn) if basis is None else basis
    BK = np.einsum("jef,fd->jed", B.coeffs, K)
    L = np.einsum("jk,jed,kec->dc", H, np.conj(BK), BK) / gn
    return 0.5 * (L + np.conj(L.T))


def boundary_point_data(B, dom, x):
    kappas, frame = shape_operator(dom, x)
    nu = normal(dom, x)
    K = _symbol_kernel(B, nu)
    return BoundaryPointData(x=np.asarray(x, dtype=float), nu=nu, frame=frame, kappas=kappas,
                             kernel_basis=K, levi=levi_matrix_curvature(B, dom, x, basis=K))


def boundary_samples(dom, resolution=DEFAULT_RESOLUTION):
    """Boundary points on the radial image of a cell-centred sphere grid."""
    return dom.boundary_point(sphere_grid(dom.n, resolution))


def _kernel_census(B, nus):
    mats = eval_symbol(B, nus)
    if mats.shape[1] == 0:
        return np.zeros(len(nus), dtype=int) + B.dim_src, None
    _, s, Vh = np.linalg.svd(mats)
    ref = np.maximum(s[:, :1], B.norm)
    ranks = np.where(ref[:, 0] > 0, np.sum(s >= RANK_TOL * np.maximum(ref, 1e-300), axis=1), 0)
    return B.dim_src - ranks, Vh


def levi_forms_batch(B, dom, points):
    """Compressed curvature Levi forms at many boundary points.

    Returns a list with one Hermitian matrix per point (possibly 0 x 0).
    """
    kappas, frames = shape_operator(dom, points)
    nus = normal(dom, points)
    dims, Vh = _kernel_census(B, nus)
    # B(e_j) for every frame vector: (N, n-1, e, f)
    Be = np.einsum("pkj,kef->pjef", frames, B.coeffs)
    forms = []
    for i in range(len(points)):
        if Vh is None:
            K = np.eye(B.dim_src)
        else:
            K = np.conj(Vh[i, B.dim_src - dims[i]:].T)
        BK = Be[i] @ K
        L = np.einsum("j,jed,jec->dc", kappas[i], np.conj(BK), BK)
        forms.append(0.5 * (L + np.conj(L.T)))
    return forms


def strong_pseudoconvexity(B, dom, resolution=DEFAULT_RESOLUTION, tol=LEVI_TOL):
    """Smallest eigenvalue of the compressed Levi form over sampled boundary points.

    Points where Ker B(nu) = {0} are vacuous (+inf). The verdict is only
    certified at the sampled points.
    """
    points = boundary_samples(dom, resolution)
    forms = levi_forms_batch(B, dom, points)
    mins = np.array([np.linalg.eigvalsh(L)[0] if L.size else np.inf for L in forms])
    i = int(np.argmin(mins))
    return dict(verdict=bool(mins[i] > tol), min_eig=float(mins[i]), worst_point=points[i],
                samples=len(points), vacuous_points=int(np.sum(np.isinf(mins))), tolerance=tol,
                method=f"curvature formula on {len(points)} radial grid points (resolution {resolution})")


def strict_convexity(dom, resolution=DEFAULT_RESOLUTION, tol=LEVI_TOL):
    points = boundary_samples(dom, resolution)
    kappas, _ = shape_operator(dom, points)
    mins = kappas[:, 0]
    i = int(np.argmin(mins))
    return dict(verdict=bool(mins[i] > tol), min_kappa=float(mins[i]), worst_point=points[i],
                samples=len(points), tolerance=tol)


def kernel_projector_field(B, dom, resolution=16):
    """x -> I - B(N(x))^+ B(N(x)), the projection onto Ker B(N(x)).

    The kernel dimension is checked on boundary samples first; a change
    raises RankJump since the projector would not be smooth.
    """
    points = boundary_samples(dom, resolution)
    dims, _ = _kernel_census(B, normal(dom, points))
    if dims.min() != dims.max():
        i, j = int(np.argmin(dims)), int(np.argmax(dims))
        raise RankJump(points[i], points[j], (int(dims[i]), int(dims[j])))
    kernel_dim = int(dims[0])

    def projector(x):
        N = normal(dom, x, check_boundary=False)
        Bn = eval_symbol(B, N)
        eye = np.eye(B.dim_src)
        if B.dim_dst == 0:
            return np.broadcast_to(eye, N.shape[:-1] + eye.shape).astype(B.coeffs.dtype)
        return eye - np.linalg.pinv(Bn, rcond=RANK_TOL) @ Bn

    projector.kernel_dim = kernel_dim
    return projector
