"""Quadrature checks of the Weitzenboeck identity and the estimate quotients.

For a pair (A, B), a domain and a boundary-compatible field u:

    int |Au|^2 + |Bu|^2 - <Du, M Du> dx  =  int <u, L_B u> dsigma

The quotients below are desk-scale evidence: maxima over finitely many
fields, i.e. lower bounds on the best constants, never proofs.
"""

import csv
from dataclasses import asdict, dataclass

import numpy as np

from . import geometry
from .fields import COMPACT
from .quadrature import DEFAULT_ORDER, build_rule, distance_to_boundary, support_ball
from .symbols import laplace_form, quadratic_form

ZERO_ENERGY_TOL = 1e-12


@dataclass(frozen=True)
class IdentityReport:
    lhs_interior: float
    rhs_boundary: float
    residual: float
    order: int
    field: str
    energy: float
    laplace_term: float


def _energy_density(p, X):
    Au = np.einsum("jgf,mfj->mg", p.A.coeffs, X)
    Bu = np.einsum("jef,mfj->me", p.B.coeffs, X)
    return np.sum(np.abs(Au) ** 2, axis=1) + np.sum(np.abs(Bu) ** 2, axis=1)


def _volume_rule(dom, fld, order):
    if fld.support is not None:
        return build_rule(support_ball(*fld.support), order)
    return build_rule(dom, order, fld.breaks)


def levi_boundary_density(B, dom, points, values):
    """sum_j kappa_j |B(e_j) u|^2 at boundary points (curvature formula)."""
    kappas, frames = geometry.shape_operator(dom, points)
    Be = np.einsum("pkj,kef->pjef", frames, B.coeffs)
    Bu = np.einsum("pjef,pf->pje", Be, values)
    return np.einsum("pj,pj->p", kappas, np.sum(np.abs(Bu) ** 2, axis=2))


def _check_compatible(fld):
    if not fld.is_compatible:
        raise ValueError(f"field {fld.descriptor} violates B(nu) u = 0: residual {fld.compat_residual:.3e}")


def weitzenbock_residual(p, dom, fld, order=DEFAULT_ORDER):
    """Both sides of the identity by quadrature; residual = |lhs - rhs| / (1 + |lhs| + |rhs|)."""
    _check_compatible(fld)
    M = laplace_form(p)
    rule = _volume_rule(dom, fld, order)
    X = fld.jac(rule.volume_nodes)
    energy = float(rule.volume_weights @ _energy_density(p, X))
    q = float(rule.volume_weights @ quadratic_form(M, X))
    lhs = energy - q
    if fld.kind == COMPACT:
        rhs = 0.0
    else:
        surf = build_rule(dom, order)
        rhs = float(surf.surface_weights @ levi_boundary_density(p.B, dom, surf.surface_nodes,
                                                                  fld.u(surf.surface_nodes)))
    return IdentityReport(lhs_interior=lhs, rhs_boundary=rhs, residual=abs(lhs - rhs) / (1 + abs(lhs) + abs(rhs)),
                          order=order, field=fld.descriptor, energy=energy, laplace_term=q)


def field_integrals(p, dom, fld, order=DEFAULT_ORDER, weighted=False):
    """Energy, L^2 norms and (optionally) the distance-weighted gradient integral of a field."""
    rule = _volume_rule(dom, fld, order)
    x = rule.volume_nodes
    X = fld.jac(x)
    uu = fld.u(x)
    w = rule.volume_weights
    grad_sq = np.sum(np.abs(X) ** 2, axis=(1, 2))
    out = dict(energy=float(w @ _energy_density(p, X)), grad_l2=float(w @ grad_sq),
               l2=float(w @ np.sum(np.abs(uu) ** 2, axis=1)))
    if fld.kind == COMPACT:
        out["boundary_l2"] = 0.0
    else:
        surf = build_rule(dom, order)
        ub = fld.u(surf.surface_nodes)
        out["boundary_l2"] = float(surf.surface_weights @ np.sum(np.abs(ub) ** 2, axis=1))
    if weighted:
        out["weighted_grad"] = float(w @ (grad_sq * distance_to_boundary(dom, x)))
    return out


def suite_integrals(p, dom, fields, order=DEFAULT_ORDER):
    """field_integrals (with the weighted term) for every field, for reuse across quotients."""
    return [field_integrals(p, dom, fld, order, weighted=True) for fld in fields]


def coercivity_quotient(p, dom, fields, order=DEFAULT_ORDER, integrals=None):
    """max over fields of (|u|_{L2}^2 + |Du|_{L2}^2) / (energy + |u|_{L2}^2)."""
    if not fields:
        raise ValueError("at least one field is required")
    best = None
    for k, fld in enumerate(fields):
        I = integrals[k] if integrals else field_integrals(p, dom, fld, order)
        denom = I["energy"] + I["l2"]
        if denom <= ZERO_ENERGY_TOL:
            continue
        qv = (I["l2"] + I["grad_l2"]) / denom
        best = qv if best is None else max(best, qv)
    if best is None:
        raise ValueError("all fields vanish")
    return best


def _ratio_quotient(p, dom, fields, order, key, weighted, integrals):
    if not fields:
        raise ValueError("at least one field is required")
    per_field, violations = [], []
    for k, fld in enumerate(fields):
        _check_compatible(fld)
        I = integrals[k] if integrals else field_integrals(p, dom, fld, order, weighted=weighted)
        num, energy = I[key], I["energy"]
        scale = max(I["grad_l2"], I["l2"], 1e-300)
        if energy <= ZERO_ENERGY_TOL * scale:
            if num > ZERO_ENERGY_TOL * scale:
                violations.append(fld.descriptor)
                per_field.append(np.inf)
            else:
                per_field.append(np.nan)  # zero field: no information
            continue
        per_field.append(num / energy)
    finite = [v for v in per_field if not np.isnan(v)]
    if not finite:
        raise ValueError("all fields vanish")
    return dict(max_quotient=float(max(finite)), per_field=per_field, violations=violations)


def morrey_quotient(p, dom, fields, order=DEFAULT_ORDER, integrals=None):
    """Boundary L^2 mass over interior energy, per field.

    A field with zero energy but nonzero boundary mass is reported in
    ``violations`` (quotient +inf).
    """
    return _ratio_quotient(p, dom, fields, order, "boundary_l2", False, integrals)


def square_function_quotient(p, dom, fields, order=DEFAULT_ORDER, integrals=None):
    """int |Du|^2 dist(x, boundary) dx over interior energy, per field."""
    return _ratio_quotient(p, dom, fields, order, "weighted_grad", True, integrals)


CSV_COLUMNS = ["pair", "domain", "field", "order", "lhs", "rhs", "residual", "energy",
               "morrey", "square_function", "coercivity"]


def identity_row(pair_name, domain_name, report, **quotients):
    row = dict(pair=pair_name, domain=domain_name, field=report.field, order=report.order,
               lhs=report.lhs_interior, rhs=report.rhs_boundary, residual=report.residual, energy=report.energy)
    row.update(quotients)
    return row


def write_csv(rows, target):
    """One row per (pair, domain, field, order); missing quotient columns stay empty.

    ``target`` is a path or an open text stream.
    """
    if hasattr(target, "write"):
        _write_rows(rows, target)
        return
    with open(target, "w", newline="") as fh:
        _write_rows(rows, fh)


def _write_rows(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()})


def report_dict(report):
    return asdict(report)
