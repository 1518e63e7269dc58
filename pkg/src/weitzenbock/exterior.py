"""Dense exterior algebra of R^n.

Multi-vectors of degree k are stored as coordinate vectors in the basis
e_I = e_{i1} ^ ... ^ e_{ik}, i1 < ... < ik, with multi-indices I in
lexicographic order. Signs of wedge and interior products follow the
shuffle parity: e_i ^ e_I = (-1)^{#{m in I : m < i}} e_{I + i}.
"""

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np


class KFormBasis:
    """Lexicographic basis of Lambda^k R^n."""

    def __init__(self, n, k):
        if n < 0 or not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
        self.n = n
        self.k = k
        self.indices = list(combinations(range(n), k))
        self.position = {I: p for p, I in enumerate(self.indices)}

    @property
    def dim(self):
        return comb(self.n, self.k)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"KFormBasis(n={self.n}, k={self.k})"


def _degree_dim(n, k):
    return comb(n, k) if 0 <= k <= n else 0


@lru_cache(maxsize=None)
def _basis_wedge(n, k, i):
    """Matrix of e_i ^ . : Lambda^k -> Lambda^{k+1}."""
    out = np.zeros((_degree_dim(n, k + 1), _degree_dim(n, k)))
    if k + 1 > n:
        return out
    src = KFormBasis(n, k)
    dst = KFormBasis(n, k + 1)
    for p, I in enumerate(src.indices):
        if i in I:
            continue
        sign = (-1) ** sum(1 for m in I if m < i)
        J = tuple(sorted(I + (i,)))
        out[dst.position[J], p] = sign
    out.setflags(write=False)
    return out


def wedge_matrix(n, k, v):
    """Matrix of u -> v ^ u from Lambda^k R^n to Lambda^{k+1} R^n.

    ``v`` may be complex; the result is then complex.
    """
    v = np.asarray(v)
    if v.shape != (n,):
        raise ValueError(f"vector of length {n} expected, got shape {v.shape}")
    return sum(v[i] * _basis_wedge(n, k, i) for i in range(n))


def interior_matrix(n, k, v):
    """Matrix of u -> v _| u (left interior product) from Lambda^k to Lambda^{k-1}.

    This is the adjoint of wedge by v with respect to the real inner product,
    so complex ``v`` enters linearly, not conjugated.
    """
    v = np.asarray(v)
    if v.shape != (n,):
        raise ValueError(f"vector of length {n} expected, got shape {v.shape}")
    if k == 0:
        return np.zeros((0, 1), dtype=np.result_type(v, float))
    return sum(v[i] * _basis_wedge(n, k - 1, i).T for i in range(n))


def hodge_star(n, k):
    """Matrix of the Hodge star Lambda^k -> Lambda^{n-k} for the orientation e_1 ^ ... ^ e_n."""
    src = KFormBasis(n, k)
    dst = KFormBasis(n, n - k)
    out = np.zeros((dst.dim, src.dim))
    for p, I in enumerate(src.indices):
        rest = tuple(m for m in range(n) if m not in I)
        perm = I + rest
        # parity of the shuffle (I, rest)
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        out[dst.position[rest], p] = (-1) ** inversions
    return out


def compound_matrix(J, k):
    """k-th exterior power of a linear map: e_I -> J e_{i1} ^ ... ^ J e_{ik}.

    Entry (I, K) is the minor det J[I, K].
    """
    J = np.asarray(J)
    n = J.shape[0]
    basis = KFormBasis(n, k)
    out = np.zeros((basis.dim, basis.dim), dtype=J.dtype)
    if k == 0:
        out[0, 0] = 1
        return out
    for a, I in enumerate(basis.indices):
        for b, K in enumerate(basis.indices):
            out[a, b] = np.linalg.det(J[np.ix_(I, K)])
    return out


def full_algebra_offsets(n):
    """Start offsets of each degree block in the full algebra Lambda R^n (dimension 2^n)."""
    offsets = [0]
    for k in range(n + 1):
        offsets.append(offsets[-1] + comb(n, k))
    return offsets


def full_wedge_matrix(n, v):
    """Wedge by ``v`` on the full exterior algebra, block-ordered by degree."""
    off = full_algebra_offsets(n)
    v = np.asarray(v)
    out = np.zeros((2**n, 2**n), dtype=np.result_type(v, float))
    for k in range(n):
        out[off[k + 1]:off[k + 2], off[k]:off[k + 1]] = wedge_matrix(n, k, v)
    return out


def full_interior_matrix(n, v):
    """Interior product by ``v`` on the full exterior algebra."""
    return full_wedge_matrix(n, v).T
