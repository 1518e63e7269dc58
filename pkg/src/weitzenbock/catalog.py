"""Ready-made operator pairs with their known verdicts.

Every constructor returns a :class:`CatalogEntry`; ``expected`` lists the
verdicts the analysis pipeline must reproduce. Keys:

    elliptic         stack symbol D injective on real frequencies
    c_elliptic       D injective on complex frequencies
    m_psd            Laplace coefficients positive semi-definite
    m_identity       Laplace coefficients equal the identity
    dm_c_elliptic    sqrt(M) symbol injective on complex frequencies (only if m_psd)
    b_cocanceling    intersection of the kernels of B_j is trivial
    complex          A B^* = 0 as operators
    exact            ker A(xi) = im B(xi)^* for real xi != 0
    q_values         list of (X, value) regression points for <X, M X>
"""

from dataclasses import dataclass, field

import numpy as np

from . import exterior as ext
from .symbols import FirstOrderSymbol, OperatorPair, restrict_pair


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    pair: OperatorPair
    name: str
    expected: dict = field(default_factory=dict)
    notes: str = ""


def _symbol(mats, name=""):
    return FirstOrderSymbol(np.stack(mats), name=name)


def standard_symplectic(n):
    """Block form [[0, -I], [I, 0]] on R^n, n even."""
    if n % 2:
        raise ValueError(f"the standard symplectic structure needs even n, got {n}")
    h = n // 2
    J = np.zeros((n, n))
    J[:h, h:] = -np.eye(h)
    J[h:, :h] = np.eye(h)
    return J


def de_rham(n, k):
    """A = d (xi ^ .) and B = delta (xi _| .) on Lambda^k R^n."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    E = np.eye(n)
    A = _symbol([ext.wedge_matrix(n, k, E[j]) for j in range(n)], "d")
    B = _symbol([ext.interior_matrix(n, k, E[j]) for j in range(n)], "delta")
    pair = OperatorPair(A, B, name=f"de_rham:{n}:{k}")
    expected = dict(elliptic=True, m_psd=True, m_identity=True, dm_c_elliptic=True,
                    complex=True, exact=True, dirac_source=True)
    if k == 0:
        expected["b_cocanceling"] = False  # B = 0
    else:
        expected["b_cocanceling"] = True
    return CatalogEntry(pair, pair.name, expected)


def hodge_dirac(n):
    """Full Hodge-Dirac symbol xi ^ . + xi _| . on Lambda R^n, split by parity of the target degree.

    A keeps the odd-degree part and B the even-degree part of the output, so
    the stack is isometric to the Dirac symbol itself.
    """
    E = np.eye(n)
    off = ext.full_algebra_offsets(n)
    odd = np.concatenate([np.arange(off[k], off[k + 1]) for k in range(1, n + 1, 2)])
    even = np.concatenate([np.arange(off[k], off[k + 1]) for k in range(0, n + 1, 2)])
    dirac = [ext.full_wedge_matrix(n, E[j]) + ext.full_interior_matrix(n, E[j]) for j in range(n)]
    A = _symbol([m[odd] for m in dirac], "odd(d+delta)")
    B = _symbol([m[even] for m in dirac], "even(d+delta)")
    pair = OperatorPair(A, B, name=f"hodge_dirac:{n}")
    expected = dict(elliptic=True, dirac=True, dirac_sign=1)
    return CatalogEntry(pair, pair.name, expected)


def scaled_curl_div(epsilon):
    """n = 2: B = divergence on 1-forms, A = epsilon * curl."""
    base = de_rham(2, 1).pair
    A = FirstOrderSymbol(epsilon * base.A.coeffs, name="eps d")
    pair = OperatorPair(A, base.B, name=f"scaled_curl_div:{epsilon:g}")
    X = np.array([[0.0, -1.0], [1.0, 0.0]])
    q = -2.0 + 4.0 * epsilon**2
    expected = dict(elliptic=epsilon != 0, m_psd=q >= 0 and abs(epsilon) >= 1 / np.sqrt(2) - 1e-15,
                    q_values=[(X, q)])
    if epsilon == 1:
        expected["m_identity"] = True
    return CatalogEntry(pair, pair.name, expected)


def _dolbeault_operators(m, q):
    """dz_j-bar ^ and dz_j-bar _| on Lambda^{0,q} C^m, realised on Lambda^q C^m."""
    E = np.eye(m)
    wedge = [ext.wedge_matrix(m, q, E[j]) for j in range(m)]
    inner = [ext.interior_matrix(m, q, E[j]) for j in range(m)]
    return wedge, inner


def dolbeault(n_complex, q):
    """A = dbar and B = -dbar^* on (0, q)-forms in C^m = R^{2m}.

    Real coordinates are ordered (x_1..x_m, y_1..y_m). With the Wirtinger
    derivatives, A(e_j) = 1/2 dz_j ^, A(e_{m+j}) = i/2 dz_j ^,
    B(e_j) = 1/2 dz_j _| and B(e_{m+j}) = -i/2 dz_j _|.
    """
    m = n_complex
    if not 0 <= q <= m:
        raise ValueError(f"need 0 <= q <= n_complex, got q={q}, n_complex={m}")
    wedge, inner = _dolbeault_operators(m, q)
    A = [0.5 * w + 0j for w in wedge] + [0.5j * w for w in wedge]
    B = [0.5 * b + 0j for b in inner] + [-0.5j * b for b in inner]
    pair = OperatorPair(_symbol(A, "dbar"), _symbol(B, "-dbar*"), name=f"dolbeault:{m}:{q}")
    expected = dict(m_psd=True, m_min_eigenvalue=0.0, dm_c_elliptic=False,
                    b_cocanceling=q >= 1, complex=True)
    return CatalogEntry(pair, pair.name, expected)


def dolbeault_c_pattern(n_complex):
    """The 2m x 2m scalar pattern c with M_jk = 1/4 c_jk I."""
    m = n_complex
    c = np.zeros((2 * m, 2 * m), dtype=complex)
    for j in range(m):
        c[j, j] = c[m + j, m + j] = 1
        c[j, m + j] = 1j
        c[m + j, j] = -1j
    return c


def donaldson_sullivan(orientation=1):
    """n = 4: A = d^+ = 1/2 (1 + *) d on 1-forms, B = d^* (divergence).

    The self-dual projection is taken inside Lambda^2 R^4 with the standard
    wedge inner product; ``orientation=-1`` uses the opposite orientation,
    i.e. the projection 1/2 (1 - *).
    """
    n = 4
    E = np.eye(n)
    P = 0.5 * (np.eye(6) + orientation * ext.hodge_star(4, 2))
    # orthonormal basis of the +1 eigenspace of the star (dimension 3)
    w, V = np.linalg.eigh(P)
    Q = V[:, w > 0.5]
    A = _symbol([Q.T @ ext.wedge_matrix(n, 1, E[j]) for j in range(n)], "d+")
    B = _symbol([ext.interior_matrix(n, 1, E[j]) for j in range(n)], "d*")
    pair = OperatorPair(A, B, name="donaldson_sullivan" + ("" if orientation == 1 else ":-1"))
    X = np.zeros((4, 4))
    X[1, 0] = 1.0
    X[0, 1] = -1.0
    X[3, 2] = 1.0
    expected = dict(elliptic=True, m_psd=False, complex=True, exact=True, q_values=[(X, -1.0)])
    return CatalogEntry(pair, pair.name, expected)


def symmetric_gradient_2d(halved=False):
    """Symmetric gradient in R^2 as a single operator (B = 0).

    Default rows (d_1 u_1, d_2 u_1 + d_1 u_2, d_2 u_2); ``halved=True`` uses
    the middle row 1/2 (d_2 u_1 + d_1 u_2) of Def u.
    """
    h = 0.5 if halved else 1.0
    P1 = np.array([[1.0, 0.0], [0.0, h], [0.0, 0.0]])
    P2 = np.array([[0.0, 0.0], [h, 0.0], [0.0, 1.0]])
    A = _symbol([P1, P2], "sym grad")
    B = FirstOrderSymbol(np.zeros((2, 0, 2)))
    pair = OperatorPair(A, B, name="symmetric_gradient_2d" + (":halved" if halved else ""))
    expected = dict(elliptic=True, c_elliptic=True, dirac=False)
    return CatalogEntry(pair, pair.name, expected)


def cauchy_riemann():
    """P = [[d_x, -d_y], [d_y, d_x]] as a single operator (B = 0)."""
    P1 = np.eye(2)
    P2 = np.array([[0.0, -1.0], [1.0, 0.0]])
    A = _symbol([P1, P2], "CR")
    B = FirstOrderSymbol(np.zeros((2, 0, 2)))
    pair = OperatorPair(A, B, name="cauchy_riemann")
    expected = dict(elliptic=True, c_elliptic=False)
    return CatalogEntry(pair, pair.name, expected)


def symplectic_de_rham(n, k, J=None, eigenspace=None):
    """A = d and B(xi) u = -(J^* xi) _| u on Lambda^k R^n.

    ``J`` defaults to the standard symplectic structure. Only even k is
    accepted. With ``eigenspace=+1`` (or -1) the pair is restricted to the
    corresponding eigenspace of the exterior power of J on Lambda^k.
    """
    if k % 2:
        raise ValueError(f"symplectic de Rham pair is only defined here for even k, got k={k}")
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    standard = J is None
    J = standard_symplectic(n) if standard else np.asarray(J, dtype=float)
    E = np.eye(n)
    A = _symbol([ext.wedge_matrix(n, k, E[j]) for j in range(n)], "d")
    B = _symbol([-ext.interior_matrix(n, k, J.T @ E[j]) for j in range(n)], "-(J* xi)_|")
    name = f"symplectic_de_rham:{n}:{k}" + ("" if standard else ":J")
    pair = OperatorPair(A, B, name=name)
    expected = {}
    if np.allclose(J, np.eye(n)):
        expected.update(elliptic=True, m_identity=True)
    elif standard and 0 < k < n:
        expected.update(elliptic=False)
    if eigenspace is not None:
        Jk = ext.compound_matrix(J, k)
        w, V = np.linalg.eigh(0.5 * (Jk + Jk.T))
        V = V[:, np.abs(w - eigenspace) < 1e-9]
        if V.shape[1] == 0:
            raise ValueError(f"eigenvalue {eigenspace} does not occur for the exterior power of J")
        pair = restrict_pair(pair, V)
        pair = OperatorPair(pair.A, pair.B, name=f"{name}|V{'+' if eigenspace > 0 else '-'}")
        expected = dict(elliptic=True)
    return CatalogEntry(pair, pair.name, expected)


def symbol_from_rows(rows):
    """Single-row symbol xi -> [c . xi] on F = R^m from a list of coefficient vectors per coordinate."""
    rows = np.asarray(rows, dtype=float)
    return FirstOrderSymbol(rows[:, None, :])


def divergence_symbol(n):
    """B_j = e_j^T."""
    return FirstOrderSymbol(np.eye(n)[:, None, :], name="div")


def curl_symbol():
    """B(xi) u = xi x u in R^3."""
    E = np.eye(3)
    # column f of B_j is e_j x e_f
    mats = [np.stack([np.cross(E[j], E[f]) for f in range(3)], axis=1) for j in range(3)]
    return FirstOrderSymbol(np.stack(mats), name="curl")


def gradient_symbol(n, dim_F=1):
    """Full gradient u -> u (x) xi, target L(R^n, F) flattened row-major."""
    mats = []
    for j in range(n):
        m = np.zeros((dim_F * n, dim_F))
        for a in range(dim_F):
            m[a * n + j, a] = 1.0
        mats.append(m)
    return FirstOrderSymbol(np.stack(mats), name="grad")


def noncocanceling_example():
    """B(xi) = [xi_1, 0] on F = R^2 (B_2 = 0)."""
    return symbol_from_rows([[1.0, 0.0], [0.0, 0.0]])


def pair_with_boundary_symbol(B, dim_G=0):
    """Pair (0, B): only B matters for the boundary condition and the Levi form."""
    A = FirstOrderSymbol(np.zeros((B.n, dim_G, B.dim_src), dtype=B.coeffs.dtype))
    return OperatorPair(A, B, name=f"(0,{B.name})" if B.name else "")


_REGISTRY = {
    "de_rham": lambda n, k: de_rham(int(n), int(k)),
    "hodge_dirac": lambda n: hodge_dirac(int(n)),
    "scaled_curl_div": lambda eps: scaled_curl_div(float(eps)),
    "dolbeault": lambda m, q: dolbeault(int(m), int(q)),
    "donaldson_sullivan": lambda orientation=1: donaldson_sullivan(int(orientation)),
    "symmetric_gradient_2d": lambda halved="": symmetric_gradient_2d(halved == "halved"),
    "cauchy_riemann": lambda: cauchy_riemann(),
    "symplectic_de_rham": lambda n, k, eig=None: symplectic_de_rham(
        int(n), int(k), eigenspace=None if eig is None else int(eig)),
}


def names():
    return sorted(_REGISTRY)


def get(spec):
    """Look up ``name:arg1:arg2`` (e.g. ``de_rham:3:1``) in the registry."""
    name, *args = spec.split(":")
    if name not in _REGISTRY:
        raise KeyError(f"unknown catalog pair {name!r}; known: {', '.join(names())}")
    try:
        return _REGISTRY[name](*args)
    except TypeError as exc:
        raise ValueError(f"bad arguments for {name}: {args}") from exc


def standard_entries():
    """One representative of every catalog family, used for property sweeps."""
    return [
        de_rham(3, 1),
        de_rham(2, 1),
        hodge_dirac(2),
        scaled_curl_div(0.1),
        scaled_curl_div(1.0),
        dolbeault(2, 1),
        donaldson_sullivan(),
        symmetric_gradient_2d(),
        cauchy_riemann(),
        symplectic_de_rham(4, 2),
    ]
