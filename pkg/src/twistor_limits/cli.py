"""Batch front-end: ``twistor-limits run|validate <manifest>``.

A manifest is a strict JSON document::

    {"version": 1,
     "tasks": [{"id": "hk", "kind": "check-pluricomplex",
                "input": {"X": [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]]},
                "output": {"csv": "hk.csv"}}]}

Complex numbers are always ``[re, im]`` pairs; matrices are nested lists of
them.  Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.linalg

from . import __version__
from .exceptions import ManifestError, ParseError, SchemaError, VersionError
from .extrapolation import halving_steps
from .lhc import FamilySampler, LHCData, a_tilde, extract_limit, reconstruct_A
from .minitwistor import (
    Curve11,
    SpacePoint,
    curve_to_point,
    point_to_curve,
)
from .monopole import (
    SpectralCurveEuc,
    SpectralCurveHyp,
    bundle_cocycle,
    euclid_limit,
    hyp_family,
    sigma_residual,
)
from .pluripencil import (
    PluriPencil,
    char_poly,
    cohomology_report,
    is_hypercomplex,
)

MANIFEST_VERSION = 1
CSV_HEADER = ["task_id", "zeta_re", "zeta_im", "w_or_eta_re", "w_or_eta_im", "t"]
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# kind -> (required input keys, optional input keys)
KINDS = {
    "check-pluricomplex": ({"X"}, {"Y"}),
    "char-curve": ({"X"}, {"Y"}),
    "limit": ({"family"}, set()),
    "reconstruct": ({"X0", "P", "Q", "zeta0"}, set()),
    "minitwistor": ({"point"}, set()),
    "monopole-limit": (set(), {"points", "family", "steps"}),
    "cocycle": ({"s", "zeta", "w", "t"}, {"a", "b"}),
}
OUTPUT_KEYS = {"csv", "samples", "tol"}
DEFAULT_TOL = {
    "check-pluricomplex": 1e-9,
    "char-curve": 1e-9,
    "limit": 0.2,  # allowed deviation of the residual slope from 1
    "reconstruct": 1e-9,
    "minitwistor": 1e-10,
    "monopole-limit": 1e-8,
    "cocycle": 1e-12,
}


@dataclass(frozen=True)
class Task:
    index: int
    id: str
    kind: str
    input: dict
    output: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Manifest:
    version: int
    tasks: tuple


# -- parsing -----------------------------------------------------------------------


def _reject_constants(token):
    raise ValueError(f"non-finite constant {token} is not allowed")


def _complex(v, where):
    if (
        not isinstance(v, list)
        or len(v) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    ):
        raise SchemaError(f"{where}: complex numbers must be [re, im] pairs")
    return complex(v[0], v[1])


def _real(v, where):
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise SchemaError(f"{where}: expected a real number")
    return float(v)


def _int(v, where):
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{where}: expected an integer")
    return v


def _matrix(v, where):
    if not isinstance(v, list) or not v or not all(isinstance(r, list) and r for r in v):
        raise SchemaError(f"{where}: matrices are non-empty lists of rows")
    widths = {len(r) for r in v}
    if len(widths) != 1:
        raise SchemaError(f"{where}: matrix rows differ in length {sorted(widths)}")
    return np.array([[_complex(x, where) for x in r] for r in v], dtype=np.complex128)


def _square(v, where):
    m = _matrix(v, where)
    if m.shape[0] != m.shape[1]:
        raise SchemaError(f"{where}: matrix must be square, got {m.shape}")
    return m


def _point3(v, where):
    if not isinstance(v, list) or len(v) != 3:
        raise SchemaError(f"{where}: expected [x, y, z]")
    return tuple(_real(x, where) for x in v)


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise SchemaError(f"{where}: unknown keys {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        raise SchemaError(f"{where}: missing keys {missing}")


def _parse_input(kind, raw, where):
    req, opt = KINDS[kind]
    _check_keys(raw, req | opt, req, f"{where}.input")
    w = f"{where}.input"
    if kind in ("check-pluricomplex", "char-curve"):
        X = _square(raw["X"], f"{w}.X")
        Y = _square(raw["Y"], f"{w}.Y") if "Y" in raw else np.zeros_like(X)
        if X.shape != Y.shape:
            raise SchemaError(f"{w}: X and Y differ in shape")
        return {"X": X, "Y": Y}
    if kind == "limit":
        fam = raw["family"]
        if not isinstance(fam, list) or len(fam) < 5:
            raise SchemaError(f"{w}.family: need t = 0 and at least four further samples")
        rows = []
        for i, row in enumerate(fam):
            if not isinstance(row, list) or len(row) != 3:
                raise SchemaError(f"{w}.family[{i}]: expected [t, X_t, Y_t]")
            rows.append((_real(row[0], f"{w}.family[{i}]"), _square(row[1], f"{w}.family[{i}]"),
                         _square(row[2], f"{w}.family[{i}]")))
        if len({r[1].shape for r in rows} | {r[2].shape for r in rows}) != 1:
            raise SchemaError(f"{w}.family: samples differ in shape")
        if 0.0 not in [r[0] for r in rows]:
            raise SchemaError(f"{w}.family: a sample at t = 0 is required")
        return {"family": rows}
    if kind == "reconstruct":
        mats = {k: _square(raw[k], f"{w}.{k}") for k in ("X0", "P", "Q")}
        if len({m.shape for m in mats.values()}) != 1:
            raise SchemaError(f"{w}: X0, P, Q differ in shape")
        mats["zeta0"] = _complex(raw["zeta0"], f"{w}.zeta0")
        return mats
    if kind == "minitwistor":
        p = raw["point"]
        if not isinstance(p, list) or len(p) != 4:
            raise SchemaError(f"{w}.point: expected [x, y, z, t]")
        return {"point": tuple(_real(x, f"{w}.point") for x in p)}
    if kind == "monopole-limit":
        if ("points" in raw) == ("family" in raw):
            raise SchemaError(f"{w}: give exactly one of 'points' or 'family'")
        out = {}
        if "points" in raw:
            pts = raw["points"]
            if not isinstance(pts, list) or not pts:
                raise SchemaError(f"{w}.points: expected a non-empty list")
            out["points"] = [_point3(p, f"{w}.points[{i}]") for i, p in enumerate(pts)]
        else:
            fam = raw["family"]
            if not isinstance(fam, list) or len(fam) < 2:
                raise SchemaError(f"{w}.family: need at least two curves")
            curves = []
            for i, row in enumerate(fam):
                if not isinstance(row, list) or len(row) != 2:
                    raise SchemaError(f"{w}.family[{i}]: expected [t, grid]")
                grid = _square(row[1], f"{w}.family[{i}]")
                t = _real(row[0], f"{w}.family[{i}]")
                try:
                    curves.append(SpectralCurveHyp(grid.shape[0] - 1, t, grid))
                except ValueError as exc:
                    raise SchemaError(f"{w}.family[{i}]: {exc}") from None
            out["family"] = curves
        if "steps" in raw:
            st = raw["steps"]
            if not isinstance(st, list) or len(st) < 2:
                raise SchemaError(f"{w}.steps: expected a list of at least two t values")
            out["steps"] = [_real(t, f"{w}.steps") for t in st]
        return out
    # cocycle
    return {
        "s": _real(raw["s"], f"{w}.s"),
        "a": _int(raw.get("a", 0), f"{w}.a"),
        "b": _int(raw.get("b", 0), f"{w}.b"),
        "t": _real(raw["t"], f"{w}.t"),
        "zeta": _complex(raw["zeta"], f"{w}.zeta"),
        "w": _complex(raw["w"], f"{w}.w"),
    }


def _parse_output(raw, where):
    _check_keys(raw, OUTPUT_KEYS, set(), f"{where}.output")
    out = {}
    if "csv" in raw:
        if not isinstance(raw["csv"], str) or not raw["csv"]:
            raise SchemaError(f"{where}.output.csv: expected a file name")
        out["csv"] = raw["csv"]
    if "samples" in raw:
        s = _int(raw["samples"], f"{where}.output.samples")
        if s < 1:
            raise SchemaError(f"{where}.output.samples: must be positive")
        out["samples"] = s
    if "tol" in raw:
        tol = _real(raw["tol"], f"{where}.output.tol")
        if tol <= 0:
            raise SchemaError(f"{where}.output.tol: must be positive")
        out["tol"] = tol
    return out


def parse_manifest(text: str) -> Manifest:
    """Parse and validate a manifest document."""
    try:
        doc = json.loads(text, parse_constant=_reject_constants)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    _check_keys(doc, {"version", "tasks"}, {"version", "tasks"}, "manifest")
    if doc["version"] != MANIFEST_VERSION or isinstance(doc["version"], bool):
        raise VersionError(f"unsupported manifest version {doc['version']!r}")
    if not isinstance(doc["tasks"], list):
        raise SchemaError("manifest.tasks: expected a list")
    tasks = []
    seen = set()
    for i, raw in enumerate(doc["tasks"]):
        where = f"task {i}"
        _check_keys(raw, {"id", "kind", "input", "output"}, {"kind", "input"}, where)
        kind = raw["kind"]
        if kind not in KINDS:
            raise SchemaError(f"{where}: unknown kind {kind!r}")
        tid = raw.get("id", f"task{i}")
        if not isinstance(tid, str) or not tid:
            raise SchemaError(f"{where}.id: expected a non-empty string")
        if tid in seen:
            raise SchemaError(f"{where}.id: duplicate id {tid!r}")
        seen.add(tid)
        tasks.append(Task(i, tid, kind, _parse_input(kind, raw["input"], where),
                          _parse_output(raw.get("output", {}), where)))
    return Manifest(MANIFEST_VERSION, tuple(tasks))


# -- formatting ---------------------------------------------------------------------

_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def fmt_c(z, digits=12):
    z = complex(z)
    re = float(f"{z.real:.{digits}g}") + 0.0
    im = float(f"{z.imag:.{digits}g}") + 0.0
    if im == 0.0:
        return f"{re:.{digits}g}"
    if re == 0.0:
        return f"{im:.{digits}g}i"
    return f"{re:.{digits}g}{'+' if im > 0 else '-'}{abs(im):.{digits}g}i"


def fmt_matrix(m):
    return "[" + "; ".join(", ".join(fmt_c(x) for x in row) for row in np.asarray(m)) + "]"


def fmt_poly(poly, names=("ζ", "η"), tol=1e-12):
    terms = []
    for i, j, c in poly.monomials(tol * max(1.0, float(np.max(np.abs(poly.coeffs))))):
        mono = "".join(
            v + (str(e).translate(_SUPERSCRIPT) if e > 1 else "")
            for v, e in ((names[0], i), (names[1], j))
            if e
        )
        coef = fmt_c(c)
        if mono and coef == "1":
            coef = ""
        elif mono and coef == "-1":
            coef = "-"
        elif mono and ("+" in coef[1:] or "-" in coef[1:]):
            coef = f"({coef})"
        terms.append(coef + mono if mono else coef)
    return " + ".join(terms) if terms else "0"


def _is_diagonal_power(poly, n, tol=1e-8):
    """``poly == (zeta - eta)**n`` after normalising the zeta**n coefficient."""
    c = np.asarray(poly.padded((n, n)).coeffs) if poly.bidegree[0] <= n and poly.bidegree[1] <= n else None
    if c is None or abs(c[n, 0]) == 0:
        return False
    target = np.zeros((n + 1, n + 1), dtype=np.complex128)
    for j in range(n + 1):
        target[n - j, j] = (-1) ** j * comb(n, j)
    return float(np.max(np.abs(c / c[n, 0] - target))) <= tol


def _unit_circle(samples):
    return np.exp(2j * np.pi * np.arange(samples) / samples)


# -- task execution -----------------------------------------------------------------


@dataclass
class TaskResult:
    task: Task
    ok: bool
    lines: list
    rows: list  # CSV rows, written only on success
    error: str | None = None


def _check_pluricomplex(task):
    X, Y = task.input["X"], task.input["Y"]
    p = PluriPencil(X, Y)
    poly = char_poly(p)
    rep = cohomology_report(p)
    hyper = is_hypercomplex(p, task.output.get("tol", DEFAULT_TOL[task.kind]))
    cp = (
        ("(ζ−η)" + (str(p.n).translate(_SUPERSCRIPT) if p.n > 1 else ""))
        if _is_diagonal_power(poly, p.n)
        else fmt_poly(poly)
    )
    lines = [f"hypercomplex: {'true' if hyper else 'false'}; char poly = {cp}; "
             f"vanishing: {'pass' if rep.vanishing else 'fail'}"]
    for tw, tc in rep.twists.items():
        lines.append(f"h0/h1 at {tw}: {tc.h0}/{tc.h1} (chi {tc.chi}, expected {tc.chi_expected})")
    for tw, cr in rep.criteria.items():
        lines.append(f"criterion {tw}: det {fmt_c(cr.det)}, rank {cr.rank}, cond {cr.cond:.6g}")
    lines.extend(f"warning: {w}" for w in rep.warnings)
    rows = _pencil_rows(task, p) if "csv" in task.output else []
    return rep.vanishing, lines, rows


def _pencil_rows(task, p):
    """Points ``(zeta, eta)`` of the characteristic curve over sampled zeta."""
    rows = []
    Xb, Yb = p.X.conj(), p.Y.conj()
    for z in _unit_circle(task.output.get("samples", 16)):
        L = p.X + z * p.Y
        etas = scipy.linalg.eigvals(Yb @ L - z * np.eye(p.n), Xb @ L)
        for e in sorted((e for e in etas if np.isfinite(e)), key=lambda e: (e.real, e.imag)):
            rows.append([task.id, z.real, z.imag, e.real, e.imag, 1.0])
    return rows


def _char_curve(task):
    p = PluriPencil(task.input["X"], task.input["Y"])
    poly = char_poly(p)
    lines = [f"char poly = {fmt_poly(poly)}", f"bidegree: {poly.bidegree}"]
    rows = _pencil_rows(task, p) if "csv" in task.output else []
    return True, lines, rows


def _limit(task):
    rows_in = task.input["family"]
    sampler = FamilySampler.from_table(rows_in)
    steps = sorted((t for t in sampler.ts if t > 0), reverse=True)
    data, diag = extract_limit(sampler, steps)
    tol = task.output.get("tol", DEFAULT_TOL[task.kind])
    linear = max(diag.residuals) <= 1e-12 or abs(diag.residual_slope - 1.0) <= tol
    lines = [
        f"P = {fmt_matrix(data.P)}",
        f"Q = {fmt_matrix(data.Q)}",
        "r(t) = " + ", ".join(f"{r:.6g}" for r in diag.residuals),
        f"residual slope: {diag.residual_slope:.6g}; linear: {'pass' if linear else 'fail'}",
    ]
    rows = []
    if "csv" in task.output:
        a = a_tilde(data)
        for z in _unit_circle(task.output.get("samples", 16)):
            for w in sorted(np.linalg.eigvals(a(z)), key=lambda w: (w.real, w.imag)):
                rows.append([task.id, z.real, z.imag, w.real, w.imag, 0.0])
    return linear, lines, rows


def _reconstruct(task):
    d = LHCData(task.input["X0"], task.input["P"], task.input["Q"])
    tol = task.output.get("tol", DEFAULT_TOL[task.kind])
    rep = reconstruct_A(d, task.input["zeta0"], tol)
    ok = rep.residual <= tol
    lines = [
        "eigenvalues: " + ", ".join(fmt_c(w) for w in rep.eigenvalues),
        f"round-trip residual: {rep.residual:.6g} ({'pass' if ok else 'fail'})",
        f"anticommutator: {rep.anticommutator:.6g}",
    ]
    return ok, lines, []


def _minitwistor(task):
    x, y, z, t = task.input["point"]
    s = SpacePoint(x, y, z, t)
    c = point_to_curve(s)
    back = curve_to_point(c)
    err = float(np.max(np.abs(back.as_array() - s.as_array())))
    tol = task.output.get("tol", DEFAULT_TOL[task.kind])
    rows = []
    if isinstance(c, Curve11):
        curve = SpectralCurveHyp.from_curve11(c)
        lines = [f"curve: a00 = {fmt_c(c.a00)}, a10 = {fmt_c(c.a10)}, a01 = {fmt_c(c.a01)}, "
                 f"a11 = {fmt_c(c.a11)}"]
        for zz in _unit_circle(task.output.get("samples", 16)):
            den = c.a01 + c.a11 * zz
            if den != 0:
                eta = -(c.a00 + c.a10 * zz) / den
                rows.append([task.id, zz.real, zz.imag, eta.real, eta.imag, t])
    else:
        curve = SpectralCurveEuc.from_euclid1(c)
        lines = [f"curve: w = {fmt_c(c.A00)} + ({fmt_c(c.A10)})ζ + ({fmt_c(c.A11)})ζ²"]
        for zz in _unit_circle(task.output.get("samples", 16)):
            w = c(zz)
            rows.append([task.id, zz.real, zz.imag, w.real, w.imag, 0.0])
    sig = sigma_residual(curve)
    ok = err <= tol and sig <= 1e-9
    lines.append(f"round-trip error: {err:.6g}; sigma residual: {sig:.6g} ({'pass' if ok else 'fail'})")
    return ok, lines, rows if "csv" in task.output else []


def _monopole_limit(task):
    tol = task.output.get("tol", DEFAULT_TOL[task.kind])
    if "points" in task.input:
        pts = task.input["points"]
        k = len(pts)
        steps = task.input.get("steps") or halving_steps(3, 12 if k == 1 else 9)
        family = hyp_family(pts, steps)
        expected = SpectralCurveEuc.from_points(pts)
    else:
        family = task.input["family"]
        expected = None
    lim = euclid_limit(family)
    sig = sigma_residual(lim)
    lines = []
    for j, p in enumerate(lim.a, start=1):
        lines.append(f"a_{j} = " + ", ".join(fmt_c(c) for c in p))
    if lim.k == 1:
        A = -lim.a[0]
        lines.append(f"limit curve: w = {fmt_c(A[0])} + ({fmt_c(A[1])})ζ + ({fmt_c(A[2])})ζ²")
    ok = sig <= 1e-9
    if expected is not None:
        err = max(float(np.max(np.abs(x - y))) for x, y in zip(lim.a, expected.a))
        ok = ok and err <= tol
        lines.append(f"closed-form error: {err:.6g}")
    lines.append(f"sigma residual: {sig:.6g} ({'pass' if ok else 'fail'})")
    rows = []
    if "csv" in task.output:
        for z in _unit_circle(task.output.get("samples", 16)):
            coeffs = [1.0] + [np.polynomial.polynomial.polyval(z, p) for p in lim.a]
            for w in sorted(np.roots(coeffs), key=lambda w: (w.real, w.imag)):
                rows.append([task.id, z.real, z.imag, w.real, w.imag, 0.0])
    return ok, lines, rows


def _cocycle(task):
    i = task.input
    val = bundle_cocycle(i["s"], i["a"], i["b"], i["t"], i["zeta"], i["w"])
    lim = bundle_cocycle(i["s"], i["a"], i["b"], 0.0, i["zeta"], i["w"])
    lines = [f"value: {fmt_c(val)}", f"t = 0 value: {fmt_c(lim)}", f"difference: {abs(val - lim):.6g}"]
    return True, lines, []


HANDLERS = {
    "check-pluricomplex": _check_pluricomplex,
    "char-curve": _char_curve,
    "limit": _limit,
    "reconstruct": _reconstruct,
    "minitwistor": _minitwistor,
    "monopole-limit": _monopole_limit,
    "cocycle": _cocycle,
}


def execute(task: Task) -> TaskResult:
    try:
        ok, lines, rows = HANDLERS[task.kind](task)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        msg = f"{type(exc).__name__}: {exc}"
        return TaskResult(task, False, [f"error: {msg}"], [], msg)
    return TaskResult(task, ok, lines, rows, None if ok else "invariant check failed")


def _csv_text(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r[0]] + [repr(float(x)) for x in r[1:]])
    return buf.getvalue()


def _write_atomic(path, text):
    tmp = path + ".partial"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def run(m: Manifest, out_dir=".", parallel=False):
    """Execute all tasks; returns ``(exit_status, report_text)``."""
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(execute, m.tasks))
    else:
        results = [execute(t) for t in m.tasks]
    out = []
    first_failure = None
    for r in results:
        t = r.task
        out.append(f"[{t.index}] {t.id} ({t.kind})")
        out.extend("  " + line for line in r.lines)
        csv_name = t.output.get("csv")
        path = os.path.join(out_dir, csv_name) if csv_name else None
        if r.ok and path:
            os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
            _write_atomic(path, _csv_text(r.rows))
            out.append(f"  csv: {csv_name} ({len(r.rows)} rows)")
        elif path and os.path.exists(path):
            os.remove(path)
        out.append(f"  status: {'ok' if r.ok else 'FAILED'}")
        if not r.ok and first_failure is None:
            first_failure = r
    if first_failure is None:
        out.append(f"summary: {len(results)} task(s), all passed")
        return EXIT_OK, "\n".join(out) + "\n"
    failed = sum(not r.ok for r in results)
    out.append(f"summary: {len(results)} task(s), {failed} failed; first failure: "
               f"task {first_failure.task.index} ({first_failure.task.id}): {first_failure.error}")
    return EXIT_FAIL, "\n".join(out) + "\n"


# -- entry point ---------------------------------------------------------------------


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_manifest(text)


def build_parser():
    ap = argparse.ArgumentParser(prog="twistor-limits", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="execute a manifest")
    r.add_argument("manifest")
    r.add_argument("--parallel", action="store_true", help="run tasks concurrently")
    r.add_argument("--out-dir", default=".", help="directory for CSV output")
    v = sub.add_parser("validate", help="parse and validate a manifest")
    v.add_argument("manifest")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        m = _load(args.manifest)
    except ManifestError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "validate":
        print(f"valid: {len(m.tasks)} task(s)")
        return EXIT_OK
    status, report = run(m, out_dir=args.out_dir, parallel=args.parallel)
    sys.stdout.write(report)
    return status


if __name__ == "__main__":
    sys.exit(main())
