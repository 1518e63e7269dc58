"""Pair/domain spec files and the full analysis report.

Pair spec (JSON)::

    {
      "schema": "weitzenbock-pair/1",
      "name": "de_rham:3:1",
      "scalar_field": "real",            # or "complex"
      "n": 3, "dim_F": 3, "dim_G": 3, "dim_E": 1,
      "A": [A_1, ..., A_n],              # dim_G x dim_F nested lists
      "B": [B_1, ..., B_n],              # dim_E x dim_F nested lists
      "A0": [[...]], "B0": [[...]]       # optional rescaling matrices
    }

Complex entries are written as [re, im] pairs. Domain specs are JSON
objects with a ``kind`` (ball, ellipsoid, superellipsoid, polynomial) and
that kind's parameters, or the shorthand strings ``ball``, ``ball:R``,
``ellipsoid:a,b,c`` and ``superellipsoid:a,b,c:p``.

The analysis report is a JSON document with a mandatory ``schema_version``.
Wall-clock timings live only under the top-level ``timing`` key, so two runs
with equal inputs and seed agree byte for byte once that key is dropped.
"""

import json
import time
from pathlib import Path

import numpy as np

from . import catalog, checks, domains, fields, geometry, quadrature, verify
from .errors import DimensionMismatch, NotPositiveSemiDefinite, RankJump, SpecParseError
from .symbols import FirstOrderSymbol, OperatorPair, laplace_form, rescale_pair, sqrt_laplace_symbol, stack_symbol

SCHEMA_VERSION = "1.0"
PAIR_SCHEMA = "weitzenbock-pair/1"


# ---------------------------------------------------------------- pair specs

def _encode_matrix(m, complex_):
    if complex_:
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return [[float(z) for z in row] for row in m]


def export_pair_spec(pair, A0=None, B0=None):
    complex_ = pair.scalar_field == "complex"
    doc = dict(schema=PAIR_SCHEMA, name=pair.name, scalar_field=pair.scalar_field, n=pair.n,
               dim_F=pair.dim_F, dim_G=pair.dim_G, dim_E=pair.dim_E,
               A=[_encode_matrix(m, complex_) for m in pair.A.coeffs],
               B=[_encode_matrix(m, complex_) for m in pair.B.coeffs])
    if A0 is not None:
        doc["A0"] = _encode_matrix(np.asarray(A0), complex_)
    if B0 is not None:
        doc["B0"] = _encode_matrix(np.asarray(B0), complex_)
    return json.dumps(doc, indent=1)


def _decode_matrix(obj, rows, cols, complex_, where):
    if not isinstance(obj, list) or len(obj) != rows:
        got = len(obj) if isinstance(obj, list) else type(obj).__name__
        raise DimensionMismatch(f"{where}: expected {rows} rows, got {got}")
    out = np.zeros((rows, cols), dtype=complex if complex_ else float)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise DimensionMismatch(f"{where}: row {i} should have {cols} entries, got {got}")
        for j, z in enumerate(row):
            if complex_ and isinstance(z, list):
                if len(z) != 2 or not all(isinstance(t, (int, float)) for t in z):
                    raise SpecParseError(f"complex entry must be [re, im], got {z!r}", f"{where}[{i}][{j}]")
                out[i, j] = complex(z[0], z[1])
            elif isinstance(z, (int, float)) and not isinstance(z, bool):
                out[i, j] = z
            else:
                raise SpecParseError(f"bad matrix entry {z!r}", f"{where}[{i}][{j}]")
    return out


def _load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None


def _read_text(path_or_text):
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and not path_or_text.lstrip().startswith("{")):
        return Path(path_or_text).read_text()
    return path_or_text


def parse_pair_spec(path_or_text):
    """OperatorPair from a JSON pair spec (file path or document text)."""
    doc = _load_json(_read_text(path_or_text))
    if not isinstance(doc, dict):
        raise SpecParseError("top level must be an object")
    for key in ("n", "dim_F", "A", "B"):
        if key not in doc:
            raise SpecParseError(f"missing field {key!r}", key)
    field = doc.get("scalar_field", "real")
    if field not in ("real", "complex"):
        raise SpecParseError(f"scalar_field must be 'real' or 'complex', got {field!r}", "scalar_field")
    complex_ = field == "complex"
    n, dim_F = doc["n"], doc["dim_F"]
    mats = {}
    for label, dim_key in (("A", "dim_G"), ("B", "dim_E")):
        seq = doc[label]
        if not isinstance(seq, list) or len(seq) != n:
            raise DimensionMismatch(f"{label}: expected {n} coefficient matrices, got "
                                    f"{len(seq) if isinstance(seq, list) else type(seq).__name__}")
        rows = doc.get(dim_key, len(seq[0]) if seq else 0)
        mats[label] = np.stack([_decode_matrix(m, rows, dim_F, complex_, f"{label}_{j + 1} ({label}[{j}])")
                                for j, m in enumerate(seq)]) if n else np.zeros((0, rows, dim_F))
    pair = OperatorPair(FirstOrderSymbol(mats["A"]), FirstOrderSymbol(mats["B"]), name=doc.get("name", ""))
    if "A0" in doc or "B0" in doc:
        A0 = _decode_matrix(doc["A0"], pair.dim_G, pair.dim_G, complex_, "A0") if "A0" in doc else np.eye(pair.dim_G)
        B0 = _decode_matrix(doc["B0"], pair.dim_E, pair.dim_E, complex_, "B0") if "B0" in doc else np.eye(pair.dim_E)
        scaled = rescale_pair(pair, A0, B0)
        pair = OperatorPair(scaled.A, scaled.B, name=pair.name)
    return pair


def resolve_pair(spec):
    """Catalog name (``de_rham:3:1``) or a pair spec file/text."""
    text = str(spec)
    if text.lstrip().startswith("{") or Path(text).is_file():
        return parse_pair_spec(text)
    return catalog.get(text).pair


# -------------------------------------------------------------- domain specs

def parse_domain_spec(spec):
    """ImplicitDomain from a JSON object/text/file or a shorthand string."""
    if isinstance(spec, dict):
        doc = dict(spec)
    else:
        text = str(spec).strip()
        if text.startswith("{") or Path(text).is_file():
            doc = _load_json(_read_text(text))
        else:
            kind, *args = text.split(":")
            doc = dict(kind=kind)
            try:
                if kind == "ball" and args:
                    doc["radius"] = float(args[0])
                    if len(args) > 1:
                        doc["n"] = int(args[1])
                elif kind == "ellipsoid":
                    doc["semi_axes"] = [float(a) for a in args[0].split(",")]
                elif kind == "superellipsoid":
                    doc["semi_axes"] = [float(a) for a in args[0].split(",")]
                    doc["exponent"] = float(args[1])
            except (IndexError, ValueError):
                raise SpecParseError(f"cannot read domain shorthand {text!r}") from None
    if "kind" not in doc:
        raise SpecParseError("domain spec needs a 'kind'", "kind")
    kind = doc.pop("kind")
    try:
        return domains.build_domain(kind, **doc)
    except KeyError as exc:
        raise SpecParseError(str(exc.args[0]), "kind") from None
    except TypeError as exc:
        raise SpecParseError(f"bad parameters for {kind}: {exc}") from None


def domain_for_pair(spec, n):
    """Parse a domain spec, giving shorthand balls the pair's dimension."""
    if isinstance(spec, str) and spec.strip().split(":")[0] == "ball" and not spec.strip().startswith("{"):
        parts = spec.strip().split(":")
        radius = float(parts[1]) if len(parts) > 1 else 1.0
        return domains.ball(radius, n=n)
    dom = parse_domain_spec(spec)
    if dom.n != n:
        raise DimensionMismatch(f"domain has dimension {dom.n}, pair has n = {n}")
    return dom


def describe_domain(dom):
    return dict(kind=dom.name, **_jsonable(dom.params))


# ---------------------------------------------------------------- reporting

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        if np.isnan(v):
            return "nan"
        return v
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


DEFAULT_CONFIG = dict(seed=0, order=None, grid_points=checks.GRID_POINTS, refine_starts=checks.REFINE_STARTS,
                      levi_resolution=None, bump_fields=4, projected_fields=4, quotient_order=None)


class _Recorder:
    def __init__(self):
        self.records, self.timing = [], {}

    def add(self, name, fn, render):
        t = time.perf_counter()
        try:
            rec = dict(name=name, **render(fn()))
        except (NotPositiveSemiDefinite, RankJump, DimensionMismatch, ValueError) as exc:
            rec = dict(name=name, verdict=None, error=f"{type(exc).__name__}: {exc}")
        self.timing[name] = time.perf_counter() - t
        self.records.append(rec)
        return rec


def _verdict_record(v, seed):
    return dict(verdict=v.is_elliptic, status=v.status, margin=v.min_singular, witness=v.witness,
                tolerance=v.threshold, seed=seed, method=dict(v.method_detail, kind="sphere grid + BFGS multistart"))


def run_full_analysis(pair, domain_list=(), config=None):
    """Run every algebraic check, the Levi analysis and the identity/quotient measurements.

    Returns a JSON-ready dict. Quotients are maxima over a finite random field
    suite and are labelled as lower bounds on the best constants.
    """
    cfg = dict(DEFAULT_CONFIG, **(config or {}))
    seed = int(cfg["seed"])
    rec = _Recorder()
    D = stack_symbol(pair)
    ell_kw = dict(points=int(cfg["grid_points"]), starts=int(cfg["refine_starts"]), seed=seed)
    M = laplace_form(pair)
    psd_tol = 1e-9

    ell = rec.add("ellipticity", lambda: checks.check_ellipticity(D, **ell_kw), lambda v: _verdict_record(v, seed))
    cell = rec.add("c_ellipticity", lambda: checks.check_c_ellipticity(D, **ell_kw), lambda v: _verdict_record(v, seed))
    rec.add("laplace_psd", lambda: M, lambda m: dict(
        verdict=m.is_psd(psd_tol), margin=m.min_eigenvalue, witness=m.witness(), tolerance=psd_tol,
        method="eigvalsh of the realified Gram matrix, relative to max |eigenvalue|"))
    rec.add("laplace_identity", lambda: M, lambda m: dict(verdict=m.is_identity(), tolerance=1e-12,
                                                          method="entrywise comparison of the Gram matrix"))
    dm = rec.add("dm_c_ellipticity", lambda: checks.check_c_ellipticity(sqrt_laplace_symbol(M), **ell_kw),
                 lambda v: _verdict_record(v, seed))
    cx = rec.add("exact_complex", lambda: checks.check_exact_complex(pair, seed=seed), lambda r: dict(
        verdict=r["is_exact"], complex=r["is_complex"], margin=r["worst_defect"], complex_defect=r["complex_defect"],
        witness=r["witness"], tolerance=1e-8, seed=seed,
        method=f"principal angles between ker A and im B^* at {r['samples']} frequencies"))
    cc = rec.add("cocanceling", lambda: checks.cocancel_space(pair.B), lambda s: dict(
        verdict=s.is_cocanceling, margin=s.dim, witness=s.basis, tolerance=checks.RANK_TOL,
        method="successive null-space intersection of the B_j"))
    rec.add("dirac_type", lambda: checks.dirac_type_check(D), lambda r: dict(
        verdict=r["is_dirac"], margin=r["max_defect"], source_defect=r["source_defect"],
        target_defect=r["target_defect"], fitted_scale=r["scale"], sign=r["sign"], tolerance=1e-12,
        method="anticommutators on all basis pairs"))
    rec.add("constant_rank_A", lambda: checks.check_constant_rank(pair.A, seed=seed), lambda r: dict(
        verdict=r["is_constant_rank"], margin=r["rank"], tolerance=checks.RANK_TOL, seed=seed,
        method=f"numerical rank at {r['samples']} frequencies"))
    rec.add("constant_rank_B", lambda: checks.check_constant_rank(pair.B, seed=seed), lambda r: dict(
        verdict=r["is_constant_rank"], margin=r["rank"], tolerance=checks.RANK_TOL, seed=seed,
        method=f"numerical rank at {r['samples']} frequencies"))

    elliptic = ell.get("verdict")
    psd = M.is_psd(psd_tol)
    conclusive = all(r.get("status", "ok") != "inconclusive" for r in rec.records)
    theorems = dict(
        interior_coercivity=dict(
            hypotheses=dict(laplace_psd=psd, dm_c_elliptic=dm.get("verdict")),
            satisfied=bool(psd and dm.get("verdict")),
            conclusion="W^{1,2} estimate up to the boundary for all fields (no boundary condition needed)"),
    )
    notes = ["quotients are maxima over a finite field suite: lower bounds on best constants, not proofs",
             "pseudoconvexity and convexity are certified only at the sampled boundary points"]
    if elliptic is False:
        notes.append("stack symbol is not elliptic: no coercive, Morrey or square-function estimate can hold "
                     "for this pair")

    domain_reports = []
    for dom in domain_list:
        domain_reports.append(_analyze_domain(pair, dom, cfg, rec, psd, cc.get("verdict"), elliptic))
    report = dict(schema_version=SCHEMA_VERSION, pair=dict(name=pair.name, n=pair.n, dim_F=pair.dim_F,
                                                          dim_G=pair.dim_G, dim_E=pair.dim_E,
                                                          scalar_field=pair.scalar_field),
                  config=cfg, checks=rec.records, theorems=theorems, domains=domain_reports, notes=notes,
                  conclusive=bool(conclusive and all(d["conclusive"] for d in domain_reports)))
    out = _jsonable(report)
    out["timing"] = {k: round(v, 6) for k, v in rec.timing.items()}
    return out


def _field_suite(pair, dom, cfg, rng):
    n, f = pair.n, pair.dim_F
    complex_ = pair.scalar_field == "complex"
    suite = []
    inr = dom.inradius
    for _ in range(int(cfg["bump_fields"])):
        radius = inr * rng.uniform(0.3, 0.6)
        direction = rng.normal(size=n)
        center = dom.center + (inr - radius) * 0.8 * rng.uniform() * direction / np.linalg.norm(direction)
        value = rng.normal(size=f) + (1j * rng.normal(size=f) if complex_ else 0)
        linear = rng.normal(size=(f, n)) + (1j * rng.normal(size=(f, n)) if complex_ else 0)
        suite.append(fields.make_bump_field(dom, center, radius, (value, linear)))
    for _ in range(int(cfg["projected_fields"])):
        amb = fields.random_polynomial_field(f, n, 3, rng, complex_=complex_)
        suite.append(fields.make_projected_field(pair, dom, amb))
    return suite


def _analyze_domain(pair, dom, cfg, rec, psd, cocanceling, elliptic):
    label = dom.name
    res = cfg["levi_resolution"] or (32 if dom.n <= 3 else 12)
    order = int(cfg["order"] or quadrature.default_order(dom.n))
    q_order = int(cfg["quotient_order"] or order)
    rng = np.random.default_rng([int(cfg["seed"]), dom.n, len(label)])
    convex = rec.add(f"{label}:strict_convexity", lambda: geometry.strict_convexity(dom, res), lambda r: dict(
        verdict=r["verdict"], margin=r["min_kappa"], witness=r["worst_point"], tolerance=r["tolerance"],
        method=f"principal curvatures at {r['samples']} boundary points"))
    pc = rec.add(f"{label}:strong_pseudoconvexity", lambda: geometry.strong_pseudoconvexity(pair.B, dom, res),
                 lambda r: dict(verdict=r["verdict"], margin=r["min_eig"], witness=r["worst_point"],
                                tolerance=r["tolerance"], vacuous_points=r["vacuous_points"], method=r["method"]))
    identity, quotients, conclusive = [], {}, True
    try:
        suite = _field_suite(pair, dom, cfg, rng)
    except (RankJump, ValueError) as exc:
        suite = []
        identity.append(dict(error=f"{type(exc).__name__}: {exc}"))
    t = time.perf_counter()
    for fld in suite:
        r = verify.weitzenbock_residual(pair, dom, fld, order)
        identity.append(dict(field=fld.descriptor, kind=fld.kind, lhs=r.lhs_interior, rhs=r.rhs_boundary,
                             residual=r.residual, order=order, tolerance=1e-6,
                             method="tensor Gauss quadrature; boundary term by the curvature formula"))
    rec.timing[f"{label}:identity"] = time.perf_counter() - t
    if suite:
        t = time.perf_counter()
        ints = verify.suite_integrals(pair, dom, suite, q_order)
        mq = verify.morrey_quotient(pair, dom, suite, q_order, integrals=ints)
        sq = verify.square_function_quotient(pair, dom, suite, q_order, integrals=ints)
        cq = verify.coercivity_quotient(pair, dom, suite, q_order, integrals=ints)
        quotients = dict(
            morrey=dict(max_quotient=mq["max_quotient"], violations=mq["violations"], per_field=mq["per_field"]),
            square_function=dict(max_quotient=sq["max_quotient"], violations=sq["violations"],
                                 per_field=sq["per_field"], reading="quadratic: int |Du|^2 dist <= C energy"),
            coercivity=dict(max_quotient=cq),
            order=q_order, label="desk-scale evidence: lower bounds on best constants")
        rec.timing[f"{label}:quotients"] = time.perf_counter() - t
    boundary = dict(hypotheses=dict(laplace_psd=psd, strongly_pseudoconvex=pc.get("verdict"),
                                    b_cocanceling=cocanceling, elliptic=elliptic),
                    satisfied=bool(psd and pc.get("verdict")),
                    conclusion="Morrey and square-function estimates for fields with B(nu) u = 0")
    return dict(domain=describe_domain(dom), strict_convexity=convex, strong_pseudoconvexity=pc,
                boundary_estimates=boundary, identity=identity, quotients=quotients, conclusive=conclusive)


def dumps_report(report, include_timing=True):
    doc = dict(report)
    if not include_timing:
        doc.pop("timing", None)
    return json.dumps(doc, indent=1, sort_keys=True)
