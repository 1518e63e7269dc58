"""Algebraic verdicts for every catalog family.

Run: python3 demos/verdict_table.py
"""

from weitzenbock import catalog, checks
from weitzenbock.symbols import laplace_form, sqrt_laplace_symbol

FAST = dict(points=2**12)


def row(entry):
    p = entry.pair
    M = laplace_form(p)
    ell = checks.check_ellipticity(p.D, **FAST)
    cell = checks.check_c_ellipticity(p.D, **FAST)
    dm = "-"
    if M.is_psd():
        dm = checks.check_c_ellipticity(sqrt_laplace_symbol(M), **FAST).is_elliptic
    return (entry.name, ell.is_elliptic, f"{ell.min_singular:.3g}", cell.is_elliptic,
            f"{M.min_eigenvalue:+.3g}", M.is_identity(), dm)


if __name__ == "__main__":
    head = ("pair", "elliptic", "margin", "C-elliptic", "min eig M", "M = I", "D_M C-elliptic")
    rows = [head] + [tuple(map(str, row(e))) for e in catalog.standard_entries()]
    widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))
