"""Compressed Levi forms of a few boundary symbols on convex and nonconvex domains.

Run: python3 demos/levi_forms.py
"""

import numpy as np

from weitzenbock import catalog, domains, geometry

SYMBOLS = {
    "divergence": catalog.divergence_symbol(3),
    "curl": catalog.curl_symbol(),
    "2-forms codifferential": catalog.de_rham(3, 2).pair.B,
}
DOMAINS = {
    "unit ball": domains.ball(),
    "ellipsoid (1, 1.5, 2)": domains.ellipsoid([1.0, 1.5, 2.0]),
    "superellipsoid p=4": domains.superellipsoid([1.0, 1.0, 1.0], 4),
    "cassini c=1.1": domains.cassini_oval(1.1),
}

if __name__ == "__main__":
    for dname, dom in DOMAINS.items():
        cv = geometry.strict_convexity(dom, 16)
        print(f"{dname}: min principal curvature {cv['min_kappa']:+.4f} at {np.round(cv['worst_point'], 3)}")
        for sname, B in SYMBOLS.items():
            r = geometry.strong_pseudoconvexity(B, dom, 16)
            print(f"    {sname:24s} min Levi eigenvalue {r['min_eig']:+.4f}  pseudoconvex: {r['verdict']}")

    # the three formulas at one point agree once restricted to Ker B(nu)
    dom, B = DOMAINS["ellipsoid (1, 1.5, 2)"], SYMBOLS["2-forms codifferential"]
    x = dom.boundary_point(np.array([0.6, 0.0, 0.8]))
    K = geometry.boundary_point_data(B, dom, x).kernel_basis
    print("curvature :", np.round(geometry.levi_matrix_curvature(B, dom, x, K), 10))
    print("hessian   :", np.round(geometry.levi_matrix_hessian(B, dom, x, K), 10))
    print("extension :", np.round(geometry.levi_matrix_extension(B, dom, x, K).compressed, 10))
