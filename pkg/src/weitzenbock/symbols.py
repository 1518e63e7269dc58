"""Constant-coefficient first-order symbols, operator pairs and Laplace coefficients.

A homogeneous first-order operator sum_j B_j d_j is stored through its
coefficient stack ``coeffs[j] = B_j``. Over complex spaces every quadratic
quantity uses the real part of the Hermitian inner product.

Jacobians X in L(R^n, F) are stored as (dim_F, n) arrays, X[a, j] = d_j u_a,
and flattened row-major, so the Gram index of v_a (x) e_j is a * n + j.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, NotPositiveSemiDefinite

REAL = "real"
COMPLEX = "complex"

#: relative tolerance used when deciding positive semi-definiteness
TOL_PSD = 1e-9


@dataclass(frozen=True, eq=False)
class FirstOrderSymbol:
    """Symbol xi -> sum_j xi_j B_j of a constant-coefficient first-order operator.

    Attributes:
        coeffs: array of shape (n, dim_dst, dim_src), one matrix per coordinate.
        name: optional label used in reports.
    """

    coeffs: np.ndarray
    name: str = ""

    def __post_init__(self):
        c = self.coeffs
        if not isinstance(c, np.ndarray):
            mats = [np.asarray(m) for m in c]
            if not mats:
                raise DimensionMismatch("a symbol needs at least one coefficient matrix")
            shapes = {m.shape for m in mats}
            if len(shapes) != 1:
                raise DimensionMismatch(f"coefficient matrices have differing shapes {sorted(shapes)}")
            c = np.stack(mats)
        if c.ndim != 3:
            raise DimensionMismatch(f"coefficient stack must be 3-dimensional (n, dst, src), got shape {c.shape}")
        if c.shape[0] < 1:
            raise DimensionMismatch("a symbol needs at least one coefficient matrix")
        dtype = np.complex128 if np.iscomplexobj(c) else np.float64
        c = np.array(c, dtype=dtype)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self):
        return self.coeffs.shape[0]

    @property
    def dim_dst(self):
        return self.coeffs.shape[1]

    @property
    def dim_src(self):
        return self.coeffs.shape[2]

    @property
    def scalar_field(self):
        return COMPLEX if np.iscomplexobj(self.coeffs) else REAL

    @property
    def norm(self):
        """Largest spectral norm among the coefficient matrices."""
        if self.coeffs.size == 0:
            return 0.0
        return float(max(np.linalg.norm(m, 2) for m in self.coeffs))

    def __call__(self, xi):
        return eval_symbol(self, xi)

    def __eq__(self, other):
        if not isinstance(other, FirstOrderSymbol):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<FirstOrderSymbol{label} n={self.n} {self.dim_src}->{self.dim_dst} {self.scalar_field}>"

    def adjoint_coeffs(self):
        """Conjugate transposes B_j^* stacked like ``coeffs``."""
        return np.conj(np.swapaxes(self.coeffs, 1, 2))


def eval_symbol(S, xi):
    """Evaluate sum_j xi_j B_j.

    ``xi`` may be a single frequency of length n (real or complex) or a batch of
    shape (m, n), in which case an (m, dim_dst, dim_src) array is returned.
    """
    xi = np.asarray(xi)
    if xi.shape[-1:] != (S.n,):
        raise DimensionMismatch(f"frequency of length {S.n} expected, got shape {xi.shape}")
    return np.tensordot(xi, S.coeffs, axes=([-1], [0]))


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """A pair (A, B) of first-order symbols acting on the same space F."""

    A: FirstOrderSymbol
    B: FirstOrderSymbol
    name: str = ""

    def __post_init__(self):
        if self.A.n != self.B.n:
            raise DimensionMismatch(f"A acts in dimension {self.A.n} but B in dimension {self.B.n}")
        if self.A.dim_src != self.B.dim_src:
            raise DimensionMismatch(f"A acts on F of dimension {self.A.dim_src} but B on {self.B.dim_src}")

    @property
    def n(self):
        return self.A.n

    @property
    def dim_F(self):
        return self.A.dim_src

    @property
    def dim_G(self):
        return self.A.dim_dst

    @property
    def dim_E(self):
        return self.B.dim_dst

    @property
    def scalar_field(self):
        return COMPLEX if COMPLEX in (self.A.scalar_field, self.B.scalar_field) else REAL

    @cached_property
    def D(self):
        """The stacked symbol [A; B]."""
        return stack_symbol(self)

    @cached_property
    def M(self):
        """Laplace coefficients of the pair."""
        return laplace_form(self)

    def __eq__(self, other):
        if not isinstance(other, OperatorPair):
            return NotImplemented
        return self.A == other.A and self.B == other.B

    __hash__ = None

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return (f"<OperatorPair{label} n={self.n} F={self.dim_F} G={self.dim_G} "
                f"E={self.dim_E} {self.scalar_field}>")


def make_pair(A, B, name=""):
    """Build an OperatorPair from coefficient lists or symbols."""
    if not isinstance(A, FirstOrderSymbol):
        A = FirstOrderSymbol(A)
    if not isinstance(B, FirstOrderSymbol):
        B = FirstOrderSymbol(B)
    return OperatorPair(A, B, name=name)


def zero_symbol(n, dim_src, dim_dst=0, complex_=False):
    dtype = np.complex128 if complex_ else np.float64
    return FirstOrderSymbol(np.zeros((n, dim_dst, dim_src), dtype=dtype))


def stack_symbol(p):
    """Symbol of D = [A; B], with target G (+) E."""
    c = np.concatenate([p.A.coeffs, p.B.coeffs], axis=1)
    return FirstOrderSymbol(c, name=f"stack({p.name})" if p.name else "")


@dataclass(frozen=True, eq=False)
class LaplaceForm:
    """Laplace coefficients M of a pair, as blocks and as a real Gram matrix.

    Attributes:
        n: space dimension.
        dim_F: dimension of F over its scalar field.
        blocks: (n, n, dim_F, dim_F) array with blocks[i, j] = A_i^* A_j + B_j^* B_i.
        hermitian: (n dim_F)-square matrix of M on L(R^n, F) over the scalar field.
        gram: real symmetric Gram matrix of the real quadratic form X -> <X, M X>.
            Its size is n dim_F for real F and 2 n dim_F for complex F (real
            coordinates ordered as Re vec X followed by Im vec X).
    """

    n: int
    dim_F: int
    scalar_field: str
    blocks: np.ndarray
    hermitian: np.ndarray
    gram: np.ndarray

    @cached_property
    def eigenvalues(self):
        """Eigenvalues of the quadratic form (each counted once, ascending)."""
        return np.linalg.eigvalsh(self.hermitian)

    @property
    def min_eigenvalue(self):
        return float(self.eigenvalues[0])

    def is_psd(self, tol=TOL_PSD):
        ev = self.eigenvalues
        scale = max(float(np.max(np.abs(ev))), np.finfo(float).tiny) if ev.size else 1.0
        return bool(ev[0] >= -tol * scale) if ev.size else True

    def is_identity(self, atol=1e-12):
        return bool(np.allclose(self.hermitian, np.eye(self.hermitian.shape[0]), rtol=0, atol=atol))

    def witness(self):
        """Unit Jacobian attaining the smallest eigenvalue."""
        w, V = np.linalg.eigh(self.hermitian)
        return V[:, 0].reshape(self.dim_F, self.n), float(w[0])

    def __call__(self, X):
        return quadratic_form(self, X)


def laplace_form(p, symmetry_tol=1e-12):
    """Assemble M_ij = A_i^* A_j + B_j^* B_i and the Gram matrix of <X, M X>."""
    A, B = p.A.coeffs, p.B.coeffs
    Ah, Bh = p.A.adjoint_coeffs(), p.B.adjoint_coeffs()
    n, N = p.n, p.dim_F
    # blocks[i, j] = A_i^* A_j + B_j^* B_i
    blocks = np.einsum("iab,jbc->ijac", Ah, A) + np.einsum("jab,ibc->ijac", Bh, B)
    # entry (a*n + i, b*n + j) is the (a, b) entry of M_ij
    H = blocks.transpose(2, 0, 3, 1).reshape(N * n, N * n)
    asym = np.max(np.abs(H - np.conj(H.T))) if H.size else 0.0
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    if asym > symmetry_tol * scale:
        raise AssertionError(f"Laplace coefficients not self-adjoint: defect {asym:.3g}")
    H = 0.5 * (H + np.conj(H.T))
    if p.scalar_field == COMPLEX:
        H = H.astype(np.complex128)
        G = np.block([[H.real, -H.imag], [H.imag, H.real]])
    else:
        H = H.real.astype(np.float64)
        G = H.copy()
    # exact symmetry by construction
    G = 0.5 * (G + G.T)
    return LaplaceForm(n=n, dim_F=N, scalar_field=p.scalar_field, blocks=blocks, hermitian=H, gram=G)


def _check_jacobian(M, X):
    if X.shape[-2:] != (M.dim_F, M.n):
        raise DimensionMismatch(f"Jacobian of shape {(M.dim_F, M.n)} expected, got {X.shape[-2:]}")


def quadratic_form(M, X):
    """<X, M X> with the real pairing Re tr(X^* Y).

    Accepts a single Jacobian (dim_F, n) or a batch (..., dim_F, n), real or
    complex. The Gram matrix is used, so this is independent of the block
    formula in :func:`rank_one_blocks_value`.
    """
    X = np.asarray(X)
    _check_jacobian(M, X)
    flat = X.reshape(X.shape[:-2] + (-1,))
    G = M.gram
    if M.scalar_field == COMPLEX:
        v = np.concatenate([flat.real, flat.imag], axis=-1)
        return np.einsum("...p,pq,...q->...", v, G, v)
    # real M extended to complex X: the cross terms are purely imaginary
    re, im = flat.real, np.imag(flat)
    out = np.einsum("...p,pq,...q->...", re, G, re)
    if np.iscomplexobj(flat):
        out = out + np.einsum("...p,pq,...q->...", im, G, im)
    return out


def rank_one_blocks_value(M, X):
    """Re sum_ij <x_i, M_ij x_j> straight from the blocks (x_i = column i of X)."""
    X = np.asarray(X)
    _check_jacobian(M, X)
    return float(np.real(np.einsum("ai,ijab,bj->", np.conj(X), M.blocks, X)))


def outer(u, v):
    """Jacobian u (x) v : w -> <v, w> u, i.e. X[a, j] = u_a v_j (bilinear in v)."""
    return np.multiply.outer(np.asarray(u), np.asarray(v))


def complex_rank_one_value(p, u, zeta):
    """(|A(zeta) u|^2, |B(conj zeta) u|^2) for u in F and zeta in C^n.

    Their sum is <u (x) zeta, M (u (x) zeta)>.
    """
    zeta = np.asarray(zeta, dtype=np.complex128)
    u = np.asarray(u)
    a = eval_symbol(p.A, zeta) @ u
    b = eval_symbol(p.B, np.conj(zeta)) @ u
    return float(np.vdot(a, a).real), float(np.vdot(b, b).real)


def rescale_pair(p, A0, B0, cond_limit=1e12):
    """Replace (A, B) by (A0 A, B0 B) for invertible A0 on G and B0 on E.

    Ellipticity and the boundary condition are unchanged; M generally is not.
    Raises LinAlgError when A0 or B0 is numerically singular.
    """
    A0 = np.atleast_2d(np.asarray(A0))
    B0 = np.atleast_2d(np.asarray(B0))
    for label, T, dim in (("A0", A0, p.dim_G), ("B0", B0, p.dim_E)):
        if T.shape != (dim, dim):
            if dim == 0 and T.size <= 1:
                continue
            raise DimensionMismatch(f"{label} must be {dim}x{dim}, got {T.shape}")
        if dim and np.linalg.cond(T) > cond_limit:
            raise np.linalg.LinAlgError(f"{label} is numerically singular (condition number {np.linalg.cond(T):.3g})")
    newA = p.A.coeffs if p.dim_G == 0 else np.einsum("gh,jhf->jgf", A0, p.A.coeffs)
    newB = p.B.coeffs if p.dim_E == 0 else np.einsum("gh,jhf->jgf", B0, p.B.coeffs)
    return OperatorPair(FirstOrderSymbol(newA), FirstOrderSymbol(newB),
                        name=f"rescaled({p.name})" if p.name else "")


def rescale_condition(A0, B0):
    """Condition numbers of the two rescaling matrices."""
    return float(np.linalg.cond(np.atleast_2d(A0))), float(np.linalg.cond(np.atleast_2d(B0)))


def restrict_pair(p, basis):
    """Restrict a pair to the subspace of F spanned by the orthonormal columns of ``basis``."""
    Q = np.asarray(basis)
    if Q.shape[0] != p.dim_F:
        raise DimensionMismatch(f"basis must have {p.dim_F} rows, got {Q.shape[0]}")
    A = np.einsum("jgf,fk->jgk", p.A.coeffs, Q)
    B = np.einsum("jgf,fk->jgk", p.B.coeffs, Q)
    return OperatorPair(FirstOrderSymbol(A), FirstOrderSymbol(B), name=f"{p.name}|V" if p.name else "")


def psd_sqrt(H, tol=TOL_PSD):
    """Square root of a Hermitian positive semi-definite matrix.

    Eigenvalues in [-tol * max|eig|, 0) are clamped to zero; anything more
    negative raises :class:`NotPositiveSemiDefinite`.
    """
    w, V = np.linalg.eigh(H)
    scale = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    if w[0] < -tol * scale:
        raise NotPositiveSemiDefinite(w[0], V[:, 0])
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ np.conj(V.T)


def sqrt_laplace_symbol(M, tol=TOL_PSD):
    """Symbol of D_M u = sqrt(M)(Du): xi -> (u -> sqrt(M)(u (x) xi)).

    The target L(R^n, F) is flattened row-major, so the result maps F to a
    space of dimension n * dim_F over the same scalar field.
    """
    try:
        S = psd_sqrt(M.hermitian, tol=tol)
    except NotPositiveSemiDefinite as exc:
        raise NotPositiveSemiDefinite(exc.min_eigenvalue, exc.witness.reshape(M.dim_F, M.n)) from None
    n = M.n
    # column a*n + j of sqrt(M) is sqrt(M)(v_a (x) e_j)
    coeffs = np.stack([S[:, j::n] for j in range(n)])
    if M.scalar_field == REAL:
        coeffs = coeffs.real
    return FirstOrderSymbol(coeffs, name="D_M")
