"""Algebraic verdicts on symbols and pairs.

Ellipticity-type questions are decided numerically: the smallest singular
value of the symbol is minimised over the unit sphere (real, or the complex
unit sphere seen as S^{2n-1}) by a quasi-random grid followed by local
descent from the best grid points. Everything else reduces to finite
identities between coefficient matrices.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy import optimize
from scipy.stats import qmc, norm as normal_dist

from .symbols import FirstOrderSymbol, eval_symbol

#: elliptic iff the refined minimal singular value exceeds TOL_ELL * |S|
TOL_ELL = 1e-6
#: numerical rank threshold relative to the largest singular value
RANK_TOL = 1e-9
GRID_POINTS = 2**14
REFINE_STARTS = 16
EXACTNESS_SAMPLES = 64


@dataclass(frozen=True)
class EllipticityVerdict:
    """Outcome of a sphere scan for injectivity of a symbol.

    ``min_singular`` is the smallest singular value found (an upper bound
    on the true minimum); ``witness`` attains it. ``conclusive`` is False
    when the value falls in the gray zone (tol, 1000 tol] or when two
    refinement levels disagree.
    """

    is_elliptic: bool
    min_singular: float
    witness: np.ndarray
    threshold: float
    conclusive: bool
    method_detail: dict = field(default_factory=dict)

    @property
    def status(self):
        if not self.conclusive:
            return "inconclusive"
        return "elliptic" if self.is_elliptic else "not elliptic"


@dataclass(frozen=True)
class CocancelSpace:
    """Orthonormal basis (columns) of the common kernel of all B_j."""

    basis: np.ndarray
    dim: int

    @property
    def is_cocanceling(self):
        return self.dim == 0


def sphere_points(dim, count, seed=0):
    """Quasi-uniform points on the unit sphere of R^dim.

    Nested in ``count`` for a fixed seed: the first m points do not depend on
    how many are requested (m, count powers of two for dim >= 3).
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        t = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    sampler = qmc.Sobol(dim, scramble=True, seed=seed)
    u = sampler.random(count)
    z = normal_dist.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _complexify(x, n):
    return x[..., :n] + 1j * x[..., n:]


def _lambda_min_batch(S, pts, complex_freq):
    n = S.n
    xi = _complexify(pts, n) if complex_freq else pts
    D = eval_symbol(S, xi)
    G = np.einsum("mda,mdb->mab", np.conj(D), D)
    return np.linalg.eigvalsh(G)[:, 0]


def _lambda_min_and_grad(x, S, complex_freq):
    """lambda_min(D(y)^* D(y)) at y = x / |x| and its gradient in x."""
    n = S.n
    r = np.linalg.norm(x)
    y = x / r
    xi = _complexify(y, n) if complex_freq else y
    D = eval_symbol(S, xi)
    w, V = np.linalg.eigh(np.conj(D.T) @ D)
    v = V[:, 0]
    Dv = D @ v
    # d lambda / d y_j = 2 Re <D v, dD/dy_j v>
    partial = np.array([np.vdot(Dv, Bj @ v) for Bj in S.coeffs])
    if complex_freq:
        g = np.concatenate([2 * partial.real, 2 * (1j * partial).real])
    else:
        g = 2 * partial.real
    g = (g - y * (y @ g)) / r
    return float(w[0]), g


def minimize_singular_on_sphere(S, complex_freq=False, points=GRID_POINTS, starts=REFINE_STARTS, seed=0):
    """Minimise sigma_min(S(xi)) over the unit sphere; returns (value, witness, detail)."""
    dim = 2 * S.n if complex_freq else S.n
    if S.dim_dst < S.dim_src:
        # a wide matrix is never injective
        pts = sphere_points(dim, 2, seed)
        w = _complexify(pts[0], S.n) if complex_freq else pts[0]
        return 0.0, w, dict(grid_points=0, starts=0, seed=seed, reason="dim_dst < dim_src")
    pts = sphere_points(dim, points, seed)
    lam = _lambda_min_batch(S, pts, complex_freq)
    best = np.argsort(lam)[:starts]
    best_val, best_x = float(lam[best[0]]), pts[best[0]]
    iters = 0
    for idx in best:
        res = optimize.minimize(_lambda_min_and_grad, pts[idx], args=(S, complex_freq), jac=True,
                                method="BFGS", options=dict(gtol=1e-14, maxiter=200))
        iters += int(res.nit)
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x / np.linalg.norm(res.x)
    value = float(np.sqrt(max(best_val, 0.0)))
    witness = _complexify(best_x, S.n) if complex_freq else best_x
    detail = dict(grid_points=int(len(pts)), starts=int(len(best)), descent_iterations=iters,
                  seed=int(seed), grid_min=float(np.sqrt(max(lam.min(), 0.0))))
    return value, witness, detail


def _verdict(S, complex_freq, points, starts, seed, tol):
    threshold = tol * max(S.norm, np.finfo(float).tiny)
    coarse = minimize_singular_on_sphere(S, complex_freq, max(points // 2, 2), starts, seed)
    fine = minimize_singular_on_sphere(S, complex_freq, points, starts, seed)
    # keep the best value seen so refinement is monotone
    value, witness, detail = fine if fine[0] <= coarse[0] else (coarse[0], coarse[1], fine[2])
    stable = (coarse[0] > threshold) == (fine[0] > threshold)
    conclusive = stable and not (threshold < value <= 1e3 * threshold)
    detail = dict(detail, levels=[coarse[2]["grid_points"], fine[2]["grid_points"]],
                  level_values=[coarse[0], fine[0]], stable=stable, tolerance=tol,
                  frequencies="complex" if complex_freq else "real")
    return EllipticityVerdict(is_elliptic=bool(value > threshold), min_singular=value,
                              witness=np.asarray(witness), threshold=threshold,
                              conclusive=bool(conclusive), method_detail=detail)


def check_ellipticity(S, points=GRID_POINTS, starts=REFINE_STARTS, seed=0, tol=TOL_ELL):
    """Is S(xi) injective for every real xi != 0?"""
    return _verdict(S, False, points, starts, seed, tol)


def check_c_ellipticity(S, points=GRID_POINTS, starts=REFINE_STARTS, seed=0, tol=TOL_ELL):
    """Is S(zeta) injective for every complex zeta != 0?"""
    return _verdict(S, True, points, starts, seed, tol)


def numerical_rank(mat, tol=RANK_TOL):
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s >= tol * s[0]))


def check_constant_rank(S, samples=64, seed=0):
    """Numerical rank of S(xi) at quasi-random sphere points and the basis directions.

    Returns a dict with ``is_constant_rank`` and ``rank`` (an int, or a
    (min, max) tuple when the rank varies).
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    pts = np.vstack([sphere_points(S.n, max(samples, 2), seed), np.eye(S.n)])
    ranks = [numerical_rank(m) for m in eval_symbol(S, pts)]
    lo, hi = min(ranks), max(ranks)
    return dict(is_constant_rank=lo == hi, rank=lo if lo == hi else (lo, hi), samples=len(pts))


def _null_space(mat, tol=RANK_TOL):
    m = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(m, dtype=mat.dtype)
    s_max = np.linalg.norm(mat, 2) if mat.size else 0.0
    if s_max == 0:
        return np.eye(m, dtype=mat.dtype)
    return sla.null_space(mat, rcond=tol)


def cocancel_space(S, order=None):
    """Common kernel of the B_j, by successive null-space intersection.

    K_B is defined as the intersection of Ker B(xi) over the unit sphere.
    Since B(e_j) = B_j, that intersection sits inside the intersection of the
    Ker B_j; conversely B(xi) = sum_j xi_j B_j kills every vector killed by all
    B_j. Hence the two intersections coincide and n kernels suffice.
    ``order`` permutes the coordinates (for completeness checks).
    """
    order = range(S.n) if order is None else order
    Q = np.eye(S.dim_src, dtype=S.coeffs.dtype)
    for j in order:
        if Q.shape[1] == 0:
            break
        N = _null_space(S.coeffs[j] @ Q)
        Q = Q @ N
        if Q.shape[1]:
            Q, _ = np.linalg.qr(Q)
    return CocancelSpace(basis=Q, dim=int(Q.shape[1]))


def _orth(mat):
    if mat.size == 0:
        return np.zeros((mat.shape[0], 0), dtype=mat.dtype)
    r = numerical_rank(mat)
    U, _, _ = np.linalg.svd(mat)
    return U[:, :r]


def check_exact_complex(p, samples=EXACTNESS_SAMPLES, seed=0, tol=1e-10):
    """Complex property A B^* = 0 and exactness ker A(xi) = im B(xi)^*.

    ``worst_defect`` is the largest sine of the principal angles between
    ker A(xi) and im B(xi)^* over the samples (1 when the dimensions differ).
    """
    A, B = p.A.coeffs, p.B.coeffs
    Bh = p.B.adjoint_coeffs()
    scale = max(p.A.norm * p.B.norm, 1.0)
    complex_defect = 0.0
    for i in range(p.n):
        for j in range(i, p.n):
            term = A[i] @ Bh[j] + A[j] @ Bh[i]
            if term.size:
                complex_defect = max(complex_defect, float(np.linalg.norm(term, 2)))
    is_complex = complex_defect <= tol * scale
    pts = np.vstack([sphere_points(p.n, max(samples, 2), seed), np.eye(p.n)])
    worst = 0.0
    witness = None
    for xi in pts:
        K = _null_space(eval_symbol(p.A, xi))
        R = _orth(np.conj(eval_symbol(p.B, xi).T))
        if K.shape[1] != R.shape[1]:
            defect = 1.0
        elif K.shape[1] == 0:
            defect = 0.0
        else:
            defect = float(np.sin(np.max(sla.subspace_angles(K, R))))
        if defect > worst:
            worst, witness = defect, xi
    return dict(is_complex=bool(is_complex), is_exact=bool(is_complex and worst <= 1e-8),
                worst_defect=worst, complex_defect=complex_defect,
                witness=None if witness is None else np.asarray(witness), samples=len(pts))


def legendre_hadamard_constant(p, **kwargs):
    """min over unit u, v of |D(v) u|^2, i.e. the squared minimal singular value of the stack."""
    return check_ellipticity(p.D, **kwargs).min_singular ** 2


def _is_projection(P, tol=1e-12):
    return (np.allclose(P @ P, P, atol=tol, rtol=0) and np.allclose(P, np.conj(P.T), atol=tol, rtol=0))


def invariant_subspace_check(S, P, samples=64, seed=0, tol=1e-10):
    """Is the range E of the orthogonal projection P invariant under D(xi) D(xi)^* for all xi?

    ``invariant`` is decided at sampled frequencies; ``complex_condition``
    checks A B^* = 0 for the induced split A = (I - P) D, B = P D through
    the coefficient identities (I - P)(D_i D_j^* + D_j D_i^*) P = 0.
    """
    P = np.asarray(P)
    if P.shape != (S.dim_dst, S.dim_dst) or not _is_projection(P):
        raise ValueError("P must be an orthogonal projection on the target space")
    Q = np.eye(S.dim_dst) - P
    scale = max(S.norm**2, 1.0)
    pts = np.vstack([sphere_points(S.n, max(samples, 2), seed), np.eye(S.n)])
    D = eval_symbol(S, pts)
    DD = np.einsum("mab,mcb->mac", D, np.conj(D))
    inv_defect = float(np.max(np.abs(Q @ DD @ P))) if DD.size else 0.0
    C, Ch = S.coeffs, S.adjoint_coeffs()
    cx_defect = 0.0
    for i in range(S.n):
        for j in range(i, S.n):
            term = Q @ (C[i] @ Ch[j] + C[j] @ Ch[i]) @ P
            cx_defect = max(cx_defect, float(np.max(np.abs(term))) if term.size else 0.0)
    return dict(invariant=bool(inv_defect <= tol * scale), complex_condition=bool(cx_defect <= tol * scale),
                invariant_defect=inv_defect, complex_defect=cx_defect)


def dirac_type_check(S, tol=1e-12):
    """Clifford relations D_i^* D_j + D_j^* D_i = +-2 delta_ij and the same with adjoints swapped.

    Returns ``is_dirac`` (both relations with constant exactly 2), ``sign``,
    ``max_defect``, the separate ``source_defect`` / ``target_defect``, and
    ``scale``: the constant c best fitting D_i^* D_j + D_j^* D_i = 2 c delta_ij.
    """
    C, Ch = S.coeffs, S.adjoint_coeffs()
    n, f, h = S.n, S.dim_src, S.dim_dst
    diag = np.array([np.trace(Ch[i] @ C[i]).real for i in range(n)])
    scale = float(diag.mean() / max(f, 1))
    sign = 1 if scale >= 0 else -1
    src_def = tgt_def = fit_def = 0.0
    for i in range(n):
        for j in range(i, n):
            delta = 2.0 if i == j else 0.0
            s = Ch[i] @ C[j] + Ch[j] @ C[i]
            t = C[i] @ Ch[j] + C[j] @ Ch[i]
            src_def = max(src_def, float(np.linalg.norm(s - sign * delta * np.eye(f), 2)))
            fit_def = max(fit_def, float(np.linalg.norm(s - scale * delta * np.eye(f), 2)))
            if h:
                tgt_def = max(tgt_def, float(np.linalg.norm(t - sign * delta * np.eye(h), 2)))
    return dict(is_dirac=bool(max(src_def, tgt_def) <= tol), sign=sign,
                max_defect=max(src_def, tgt_def), source_defect=src_def, target_defect=tgt_def,
                source_identity=bool(src_def <= tol), scale=abs(scale),
                source_identity_up_to_scale=bool(fit_def <= tol * max(1.0, abs(scale))))
