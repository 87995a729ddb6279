"""Command-line front end.

Subcommands: validate, exponent, finite-n, tradeoff, fekete, hypergraph,
combinatorial. Inputs are JSON files (complex numbers as [re, im] pairs);
outputs go to stdout as small tables, optionally mirrored to --csv/--json.
Exit codes: 0 success, 2 schema or validation failure, 3 numerical
infeasibility. Set DEGENEX_LOG=INFO (or DEBUG) for progress logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import degeneration as degmod
from . import exponent as expmod
from . import finiten as finmod
from . import potential as potmod
from . import tradeoff as trmod
from .core import LaurentMatrix, MultipartiteState
from .degeneration import CombinatorialSpec, Degeneration, Hypergraph
from .errors import (
    CoincidentPoints,
    DegenerateRate,
    DegenexError,
    Disconnected,
    EmptyPhi,
    GridTooSmall,
    Infeasible,
    NotPSD,
    NotReproducingTarget,
    NotSymmetric,
    RankDeficient,
    SchemaError,
    ShapeMismatch,
    SingularMoment,
    SupportMismatch,
    ValidationFailure,
)

__all__ = ["JobSpec", "parse_degeneration_file", "serialize", "run", "main"]

log = logging.getLogger("degenex")

_LN2 = math.log(2.0)

# error families -> exit codes
_VALIDATION_ERRORS = (SchemaError, ValidationFailure, ShapeMismatch, Disconnected,
                      EmptyPhi, DegenerateRate, SupportMismatch, NotReproducingTarget,
                      GridTooSmall)
_NUMERICAL_ERRORS = (Infeasible, SingularMoment, NotSymmetric, RankDeficient,
                     NotPSD, CoincidentPoints)


# ---------------------------------------------------------------------------
# JSON schema: loading


def _expect(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise SchemaError("%s: %s" % (path, msg))


def _as_complex(v, path: str) -> complex:
    _expect(isinstance(v, (list, tuple)) and len(v) == 2, path,
            "complex numbers are [re, im] pairs")
    re, im = v
    _expect(isinstance(re, (int, float)) and isinstance(im, (int, float)),
            path, "re/im must be numbers")
    return complex(float(re), float(im))


def _as_matrix(v, rows: int, cols: int, path: str) -> np.ndarray:
    _expect(isinstance(v, list) and len(v) == rows, path, "expected %d rows" % rows)
    out = np.zeros((rows, cols), dtype=np.complex128)
    for i, row in enumerate(v):
        _expect(isinstance(row, list) and len(row) == cols,
                "%s[%d]" % (path, i), "expected %d entries" % cols)
        for j, entry in enumerate(row):
            out[i, j] = _as_complex(entry, "%s[%d][%d]" % (path, i, j))
    return out


def _as_laurent(obj, path: str) -> LaurentMatrix:
    _expect(isinstance(obj, dict), path, "a Laurent map is an object")
    for key in ("rows", "cols", "terms"):
        _expect(key in obj, path, "missing field %r" % key)
    rows, cols = obj["rows"], obj["cols"]
    _expect(isinstance(rows, int) and rows > 0, path + ".rows", "positive integer required")
    _expect(isinstance(cols, int) and cols > 0, path + ".cols", "positive integer required")
    _expect(isinstance(obj["terms"], list) and obj["terms"], path + ".terms",
            "need at least one term")
    terms: dict[int, np.ndarray] = {}
    for t, term in enumerate(obj["terms"]):
        tp = "%s.terms[%d]" % (path, t)
        _expect(isinstance(term, dict) and "power" in term and "matrix" in term,
                tp, "terms carry power and matrix")
        p = term["power"]
        _expect(isinstance(p, int), tp + ".power", "integer power required")
        _expect(p not in terms, tp + ".power", "duplicate power %d" % p)
        terms[p] = _as_matrix(term["matrix"], rows, cols, tp + ".matrix")
    return LaurentMatrix(terms)


def _as_state(obj, path: str) -> MultipartiteState:
    _expect(isinstance(obj, dict) and "dims" in obj and "amplitudes" in obj,
            path, "states carry dims and amplitudes")
    dims = obj["dims"]
    _expect(isinstance(dims, list) and dims and all(isinstance(d, int) and d > 0 for d in dims),
            path + ".dims", "positive integer list required")
    total = 1
    for d in dims:
        total *= d
    amps = obj["amplitudes"]
    _expect(isinstance(amps, list) and len(amps) == total, path + ".amplitudes",
            "expected %d amplitudes" % total)
    vec = np.array([_as_complex(a, "%s.amplitudes[%d]" % (path, i)) for i, a in enumerate(amps)])
    try:
        return MultipartiteState(tuple(dims), vec)
    except ValueError as exc:
        raise SchemaError("%s: %s" % (path, exc)) from exc


def load_degeneration_parts(obj):
    """(maps, psi, phi) from a degeneration JSON object, schema-checked."""
    _expect(isinstance(obj, dict), "$", "top level must be an object")
    for key in ("k", "maps", "psi", "phi"):
        _expect(key in obj, "$", "missing field %r" % key)
    k = obj["k"]
    _expect(isinstance(k, int) and k >= 1, "$.k", "positive integer required")
    _expect(isinstance(obj["maps"], list) and len(obj["maps"]) == k, "$.maps",
            "expected %d maps" % k)
    maps = tuple(_as_laurent(m, "$.maps[%d]" % j) for j, m in enumerate(obj["maps"]))
    psi = _as_state(obj["psi"], "$.psi")
    phi = _as_state(obj["phi"], "$.phi")
    return maps, psi, phi


def load_combinatorial(obj) -> CombinatorialSpec:
    for key in ("k", "index_sizes", "psi_support", "phi", "u"):
        _expect(key in obj, "$", "missing field %r" % key)
    support = []
    _expect(isinstance(obj["psi_support"], list), "$.psi_support", "list required")
    for i, item in enumerate(obj["psi_support"]):
        p = "$.psi_support[%d]" % i
        _expect(isinstance(item, dict) and "index" in item and "amplitude" in item,
                p, "entries carry index and amplitude")
        support.append((tuple(item["index"]), _as_complex(item["amplitude"], p + ".amplitude")))
    return CombinatorialSpec(obj["k"], obj["index_sizes"], support,
                             [tuple(i) for i in obj["phi"]], obj["u"])


def load_hypergraph(obj) -> Hypergraph:
    for key in ("vertices", "edges"):
        _expect(key in obj, "$", "missing field %r" % key)
    _expect(isinstance(obj["vertices"], int), "$.vertices", "integer required")
    _expect(isinstance(obj["edges"], list), "$.edges", "list required")
    try:
        return Hypergraph(obj["vertices"], obj["edges"])
    except ValueError as exc:
        raise SchemaError("$.edges: %s" % exc) from exc


def parse_degeneration_file(path: str, tol: float = 1e-9):
    """Load and validate a fixture file; the schema is picked by key shape.

    Returns a Degeneration (for Laurent-map files), a CombinatorialSpec or a
    Hypergraph. Laurent inputs are run through the full expansion validator,
    so the error degree of the result is derived, never trusted from the
    file.
    """
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError("%s: file not found" % path) from exc
    except json.JSONDecodeError as exc:
        raise SchemaError("%s: invalid JSON at line %d column %d: %s"
                          % (path, exc.lineno, exc.colno, exc.msg)) from exc
    _expect(isinstance(obj, dict), "$", "top level must be an object")
    if "maps" in obj:
        maps, psi, phi = load_degeneration_parts(obj)
        return degmod.build_degeneration(maps, psi, phi, tol=tol)
    if "psi_support" in obj:
        return load_combinatorial(obj)
    if "edges" in obj:
        return load_hypergraph(obj)
    raise SchemaError("$: expected one of the keys 'maps', 'psi_support', 'edges'")


# ---------------------------------------------------------------------------
# JSON schema: serialization


def _c2j(c: complex):
    c = complex(c)
    return [c.real, c.imag]


def _laurent_to_json(L: LaurentMatrix) -> dict:
    return {
        "rows": L.rows,
        "cols": L.cols,
        "terms": [
            {"power": p, "matrix": [[_c2j(x) for x in row] for row in L.terms[p].tolist()]}
            for p in sorted(L.terms)
        ],
    }


def _state_to_json(s: MultipartiteState) -> dict:
    return {"dims": list(s.local_dims), "amplitudes": [_c2j(a) for a in s.amplitudes]}


def serialize(obj) -> dict:
    """Dict form of a Degeneration / CombinatorialSpec / Hypergraph that
    parse_degeneration_file accepts back (round-trips within 1e-12)."""
    if isinstance(obj, Degeneration):
        return {
            "k": obj.k,
            "maps": [_laurent_to_json(L) for L in obj.maps],
            "psi": _state_to_json(obj.psi),
            "phi": _state_to_json(obj.phi),
        }
    if isinstance(obj, CombinatorialSpec):
        return {
            "k": obj.k,
            "index_sizes": list(obj.index_sizes),
            "psi_support": [
                {"index": list(idx), "amplitude": _c2j(a)} for idx, a in obj.psi_support
            ],
            "phi": [list(idx) for idx in sorted(obj.phi)],
            "u": [list(row) for row in obj.u],
        }
    if isinstance(obj, Hypergraph):
        return {"vertices": obj.vertex_count, "edges": [list(e) for e in obj.edges]}
    raise TypeError("cannot serialize %r" % type(obj).__name__)


# ---------------------------------------------------------------------------
# job plumbing


@dataclass
class JobSpec:
    command: str
    input_path: str | None = None
    method: str = "symmetric"
    tol: float = 1e-9
    grid: str | None = None
    radius: float = 1.0
    radius_bracket: tuple[float, float] = (-8.0, 8.0)
    threads: int | None = None
    csv: str | None = None
    json_out: str | None = None
    seed: int | None = None
    nats: bool = False
    n_list: tuple[int, ...] = ()
    strategy: str = "optimize"
    truncation: int = 64
    domain: str | None = None
    weights: str = "trivial"
    n_points: int = 16
    emit: str | None = None


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    def fmt(x):
        if isinstance(x, float):
            return "%.17g" % x
        return str(x)

    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")
    log.info("wrote %s (%d rows)", path, len(rows))


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %s", path)


def _as_exponent_input(obj) -> Degeneration:
    if isinstance(obj, Degeneration):
        return obj
    if isinstance(obj, CombinatorialSpec):
        deg, _q = degmod.from_combinatorial(obj)
        return deg
    raise ValidationFailure("this command needs a degeneration, got %s" % type(obj).__name__)


def _cmd_validate(job: JobSpec) -> int:
    try:
        with open(job.input_path) as fh:
            obj = json.load(fh)
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        raise SchemaError("%s: %s" % (job.input_path, exc)) from exc
    _expect(isinstance(obj, dict), "$", "top level must be an object")

    if "maps" in obj:
        maps, psi, phi = load_degeneration_parts(obj)
        report = degmod.validate(maps, psi, phi, tol=job.tol)
        print("kind:                 degeneration (%d parties)" % len(maps))
        print("error degree:         %d" % report.error_degree)
        print("negative residual:    %.3g" % report.max_negative_residual)
        print("constant-term error:  %.3g" % report.constant_term_error)
        print("restriction:          %s" % ("yes" if report.is_restriction() else "no"))
        print("grid min norm:        %.6g" % report.nowhere_zero_min_grid_norm)
        print("common roots/factor:  %s" % (report.factor_common_roots,))
        print("verdict:              %s" % ("valid" if report.is_degeneration else "INVALID"))
        return 0 if report.is_degeneration else 2
    if "psi_support" in obj:
        spec = load_combinatorial(obj)
        deg, q = degmod.from_combinatorial(spec)
        print("kind:            combinatorial degeneration (%d parties)" % spec.k)
        print("q:               %.12g" % q)
        print("exponent:        %.12g bits/copy" % degmod.combinatorial_exponent(spec))
        print("error degree:    %d" % deg.error_degree)
        print("verdict:         valid")
        return 0
    if "edges" in obj:
        H = load_hypergraph(obj)
        lam = degmod.edge_connectivity(H)  # Disconnected -> exit 2
        print("kind:            hypergraph (%d vertices, %d edges)"
              % (H.vertex_count, len(H.edges)))
        print("connectivity:    %d" % lam)
        print("verdict:         connected")
        return 0
    raise SchemaError("$: expected one of the keys 'maps', 'psi_support', 'edges'")


def _cmd_exponent(job: JobSpec) -> int:
    deg = _as_exponent_input(parse_degeneration_file(job.input_path, tol=job.tol))
    if job.method == "symmetric":
        res = expmod.symmetric_exponent(deg, bracket=job.radius_bracket)
    elif job.method == "norm-min":
        res = expmod.norm_min_lower_bound(deg)
    elif job.method == "circle-average":
        res = expmod.circle_average_bound(deg, bracket=job.radius_bracket)
    elif job.method == "fourier":
        res = expmod.fourier_circle_exponent(deg, job.radius, M=job.truncation)
    else:
        raise ValidationFailure("unknown exponent method %r" % job.method)
    print("method:  %s" % res.method)
    if "radius" in res.certificate:
        print("radius:  %.6g" % res.certificate["radius"])
    print("value:   %.4f bits/copy" % res.value)
    if job.json_out:
        _write_json(job.json_out, {"method": res.method, "value_bits": res.value,
                                   **res.certificate})
    return 0


def _cmd_finite_n(job: JobSpec) -> int:
    deg = _as_exponent_input(parse_degeneration_file(job.input_path, tol=job.tol))
    n_list = job.n_list or (1, 2, 4, 8, 16, 32)
    rows = finmod.finite_n_exponent_table(deg, n_list, strategy=job.strategy,
                                          radius=job.radius, bracket=job.radius_bracket)
    e = deg.error_degree
    print("n      radius        log2(objective)  bits/copy     extrapolated")
    out_rows = []
    for r in rows:
        extr = finmod.extrapolate_exponent(r.bits_per_copy, r.n, e)
        print("%-6d %-13.6g %-16.10g %-13.10g %-13.10g"
              % (r.n, r.radius, r.log2_objective, r.bits_per_copy, extr))
        out_rows.append([r.n, r.radius, r.log2_objective, r.bits_per_copy])
    if job.csv:
        _write_csv(job.csv, ["n", "radius", "log2_objective", "bits_per_copy"], out_rows)
    return 0


def _cmd_tradeoff(job: JobSpec) -> int:
    deg = _as_exponent_input(parse_degeneration_file(job.input_path, tol=job.tol))
    g = int(job.grid) if job.grid else 50
    if g < 2:
        raise ValidationFailure("--grid must be >= 2")
    R_grid = [i / (g - 1) for i in range(g)]
    points, baseline = trmod.tradeoff_curve(deg, R_grid, threads=job.threads)
    print("R           r_bits        method")
    for p in points:
        print("%-11.6g %-13.10g %s" % (p.R, p.r, p.method))
    print("r(1) = %.6g bits/copy; time-sharing baseline in %s"
          % (points[-1].r, (job.csv or "memory")))
    if job.csv:
        _write_csv(job.csv, ["R", "r_bits", "method"],
                   [[p.R, p.r, p.method] for p in points])
        base_path = _baseline_path(job.csv)
        _write_csv(base_path, ["R", "r_bits", "method"],
                   [[p.R, p.r, p.method] for p in baseline])
    if job.json_out:
        _write_json(job.json_out, {
            "points": [{"R": p.R, "r_bits": p.r, "method": p.method,
                        "radius": p.radius} for p in points],
            "baseline": [{"R": p.R, "r_bits": p.r, "method": p.method} for p in baseline],
        })
    return 0


def _baseline_path(csv_path: str) -> str:
    root, ext = os.path.splitext(csv_path)
    return root + "_baseline" + (ext or ".csv")


def _parse_domain(spec: str) -> potmod.CompactDomain:
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "annulus" and len(parts) == 3:
            return potmod.CompactDomain.annulus(float(parts[1]), float(parts[2]))
        if kind == "disk" and len(parts) == 2:
            return potmod.CompactDomain.disk(float(parts[1]))
        if kind == "circle" and len(parts) == 2:
            return potmod.CompactDomain.circle(float(parts[1]))
    except ValueError as exc:
        raise ValidationFailure("bad domain %r: %s" % (spec, exc)) from exc
    raise ValidationFailure(
        "bad domain %r (use annulus:r_in:r_out, disk:r or circle:r)" % spec)


def _cmd_fekete(job: JobSpec) -> int:
    if not job.domain:
        raise ValidationFailure("--domain is required (annulus:r_in:r_out, disk:r, circle:r)")
    domain = _parse_domain(job.domain)
    if job.grid:
        try:
            nr, na = (int(x) for x in job.grid.lower().split("x"))
        except ValueError as exc:
            raise ValidationFailure("--grid expects RADIIxANGLES, e.g. 128x256") from exc
        domain = potmod.CompactDomain(domain.kind, domain.params, nr, na)
    if job.weights == "trivial":
        weights = potmod.WeightPair.trivial()
    elif job.weights == "from-degeneration":
        if not job.input_path:
            raise ValidationFailure("--weights from-degeneration needs an input file")
        deg = _as_exponent_input(parse_degeneration_file(job.input_path, tol=job.tol))
        weights = potmod.WeightPair.from_degeneration(deg)
    else:
        raise ValidationFailure("unknown weights %r" % job.weights)
    res = potmod.weighted_fekete(domain, weights, job.n_points)
    if job.nats:
        print("delta_%d = %.10g nats" % (res.n, res.delta_n * _LN2))
    else:
        print("delta_%d = %.10g bits" % (res.n, res.delta_n))
    if job.csv:
        _write_csv(job.csv, ["re", "im"],
                   [[float(z.real), float(z.imag)] for z in res.points.points])
    return 0


def _cmd_hypergraph(job: JobSpec) -> int:
    H = parse_degeneration_file(job.input_path, tol=job.tol)
    if not isinstance(H, Hypergraph):
        raise ValidationFailure("this command needs a hypergraph file")
    rate, exponent = degmod.hypergraph_ghz_exponent(H)
    print("vertices:   %d" % H.vertex_count)
    print("edges:      %d" % len(H.edges))
    print("rate:       %g" % rate)
    print("exponent:   %g" % exponent)
    return 0


def _cmd_combinatorial(job: JobSpec) -> int:
    spec = parse_degeneration_file(job.input_path, tol=job.tol)
    if not isinstance(spec, CombinatorialSpec):
        raise ValidationFailure("this command needs a combinatorial file")
    deg, q = degmod.from_combinatorial(spec)
    print("parties:       %d" % spec.k)
    print("q:             %.12g" % q)
    print("exponent:      %.6f bits/copy" % degmod.combinatorial_exponent(spec))
    print("error degree:  %d" % deg.error_degree)
    if job.emit:
        _write_json(job.emit, serialize(deg))
    return 0


_HANDLERS = {
    "validate": _cmd_validate,
    "exponent": _cmd_exponent,
    "finite-n": _cmd_finite_n,
    "tradeoff": _cmd_tradeoff,
    "fekete": _cmd_fekete,
    "hypergraph": _cmd_hypergraph,
    "combinatorial": _cmd_combinatorial,
}


def run(job: JobSpec) -> int:
    """Execute a job; returns the process exit code (0 / 2 / 3)."""
    if job.seed is not None:
        np.random.seed(job.seed)
    try:
        return _HANDLERS[job.command](job)
    except _VALIDATION_ERRORS as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3
    except DegenexError as exc:  # anything else package-specific: validation bucket
        print("error: %s" % exc, file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="degenex",
                                 description="degeneration-to-protocol toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_file=True):
        if needs_file:
            p.add_argument("file", help="input JSON file")
        p.add_argument("--tol", type=float, default=1e-9, help="validation tolerance")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--csv", default=None, help="write results as CSV")
        p.add_argument("--json", dest="json_out", default=None, help="write results as JSON")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--radius-bracket", default="-8:8",
                       help="log2-radius search bracket, LO:HI")

    p = sub.add_parser("validate", help="validate a fixture file")
    common(p)

    p = sub.add_parser("exponent", help="single-letter exponent evaluation")
    common(p)
    p.add_argument("--method", default="symmetric",
                   choices=["symmetric", "norm-min", "circle-average", "fourier"])
    p.add_argument("--radius", type=float, default=1.0, help="circle radius (fourier)")
    p.add_argument("--truncation", type=int, default=64, help="Fourier truncation M")

    p = sub.add_parser("finite-n", help="finite-copy objective table")
    common(p)
    p.add_argument("--n-list", default=None, help="comma-separated copy counts")
    p.add_argument("--strategy", default="optimize",
                   choices=["fixed", "optimize", "optimize+exchange"])
    p.add_argument("--radius", type=float, default=1.0, help="radius for --strategy fixed")

    p = sub.add_parser("tradeoff", help="rate-exponent trade-off curve")
    common(p)
    p.add_argument("--grid", default="50", help="number of R grid points")

    p = sub.add_parser("fekete", help="weighted Fekete points on a domain")
    common(p, needs_file=False)
    p.add_argument("file", nargs="?", default=None,
                   help="degeneration file (for --weights from-degeneration)")
    p.add_argument("--domain", required=True, help="annulus:r_in:r_out | disk:r | circle:r")
    p.add_argument("--weights", default="trivial", choices=["trivial", "from-degeneration"])
    p.add_argument("--n", dest="n_points", type=int, default=16, help="n (n+1 points)")
    p.add_argument("--grid", default=None, help="grid resolution RADIIxANGLES")
    p.add_argument("--nats", action="store_true", help="report delta in nats")

    p = sub.add_parser("hypergraph", help="GHZ network rate/exponent")
    common(p)

    p = sub.add_parser("combinatorial", help="combinatorial degeneration summary")
    common(p)
    p.add_argument("--emit", default=None, help="write the induced degeneration JSON here")

    return ap


def _job_from_args(args: argparse.Namespace) -> JobSpec:
    lo, _, hi = args.radius_bracket.partition(":")
    try:
        bracket = (float(lo), float(hi))
    except ValueError as exc:
        raise SchemaError("--radius-bracket expects LO:HI in log2 units") from exc
    n_list: tuple[int, ...] = ()
    if getattr(args, "n_list", None):
        try:
            n_list = tuple(int(x) for x in args.n_list.split(","))
        except ValueError as exc:
            raise SchemaError("--n-list expects comma-separated integers") from exc
    return JobSpec(
        command=args.command,
        input_path=getattr(args, "file", None),
        method=getattr(args, "method", "symmetric"),
        tol=args.tol,
        grid=getattr(args, "grid", None),
        radius=getattr(args, "radius", 1.0),
        radius_bracket=bracket,
        threads=args.threads,
        csv=args.csv,
        json_out=args.json_out,
        seed=args.seed,
        nats=getattr(args, "nats", False),
        n_list=n_list,
        strategy=getattr(args, "strategy", "optimize"),
        truncation=getattr(args, "truncation", 64),
        domain=getattr(args, "domain", None),
        weights=getattr(args, "weights", "trivial"),
        n_points=getattr(args, "n_points", 16),
        emit=getattr(args, "emit", None),
    )


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("DEGENEX_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        job = _job_from_args(args)
    except SchemaError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
