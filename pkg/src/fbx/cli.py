"""Command-line interface: ``fbx <command> job.json [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Sequence

import jsonschema

from . import cohomology as coh
from .boundary import DEFAULT_CAP, StabilizationError, restrict_form
from .connection import Connection, CurveError, CurveSpec
from .exactlin import ExpressionError, RegFun, TruncLaurent, parse_regfun
from .tate import hodge_pieces, laurent_tate, serre_duality_stage_check

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_STABILIZATION, EXIT_INVARIANT = 0, 2, 3, 4

_SCALAR = {"type": ["string", "integer"]}
JOB_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["curve", "connection"],
    "properties": {
        "curve": {
            "type": "object",
            "additionalProperties": False,
            "required": ["finite_points"],
            "properties": {
                "finite_points": {"type": "array", "items": _SCALAR},
                "include_infinity": {"type": "boolean"},
            },
        },
        "connection": {
            "type": "object",
            "additionalProperties": False,
            "required": ["rank", "matrix"],
            "properties": {
                "rank": {"type": "integer", "minimum": 1},
                "matrix": {"type": "array", "items": {"type": "array", "items": _SCALAR}},
            },
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "truncation": {"type": "integer", "minimum": 1},
                "max_truncation": {"type": "integer", "minimum": 1},
                "depth": {"type": "integer", "minimum": 1},
                "format": {"enum": ["json", "table"]},
            },
        },
    },
}


class JobError(ValueError):
    def __init__(self, errors: Sequence[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class JobSpec:
    finite_points: tuple[Fraction, ...]
    rank: int
    matrix: tuple[tuple[str, ...], ...]
    include_infinity: bool = True
    options: tuple[tuple[str, Any], ...] = field(default=())

    @property
    def curve(self) -> CurveSpec:
        return CurveSpec(self.finite_points, self.include_infinity)

    def connection(self) -> Connection:
        pts = self.finite_points
        return Connection.from_entries(self.curve, [[parse_regfun(x, pts) for x in row] for row in self.matrix])

    def option(self, name: str, default=None):
        return dict(self.options).get(name, default)

    def to_dict(self) -> dict:
        out = {
            "curve": {"finite_points": [str(c) for c in self.finite_points], "include_infinity": self.include_infinity},
            "connection": {"rank": self.rank, "matrix": [list(row) for row in self.matrix]},
        }
        if self.options:
            out["options"] = dict(self.options)
        return out

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def parse_job(text: str | bytes) -> JobSpec:
    """Validate a job document, collecting every error before failing."""
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise JobError([f"malformed JSON: {exc}"]) from None
    validator = jsonschema.Draft202012Validator(JOB_SCHEMA)
    errors = [
        f"{'/'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    ]
    if not isinstance(data, dict):
        raise JobError(errors)
    curve = data.get("curve") if isinstance(data.get("curve"), dict) else {}
    conn = data.get("connection") if isinstance(data.get("connection"), dict) else {}
    points = []
    raw_points = curve.get("finite_points", [])
    for raw in raw_points if isinstance(raw_points, list) else []:
        try:
            points.append(Fraction(str(raw).strip()))
        except (ValueError, ZeroDivisionError):
            errors.append(f"curve/finite_points: {raw!r} is not a rational number")
    if len(set(points)) != len(points):
        errors.append("curve/finite_points: boundary points must be pairwise distinct")
    if curve.get("include_infinity", True) is not True:
        errors.append("curve/include_infinity: infinity must be a boundary point")
    rank = conn.get("rank")
    matrix = conn.get("matrix")
    if isinstance(matrix, list) and all(isinstance(row, list) for row in matrix):
        if isinstance(rank, int) and (len(matrix) != rank or any(len(row) != rank for row in matrix)):
            shape = f"{len(matrix)}x{'/'.join(str(len(r)) for r in matrix) or 0}"
            errors.append(f"connection/matrix: shape {shape} does not match rank {rank}")
        for i, row in enumerate(matrix):
            for j, entry in enumerate(row):
                try:
                    parse_regfun(str(entry), points)
                except ExpressionError as exc:
                    errors.append(f"connection/matrix/{i}/{j}: {exc}")
    opts = data.get("options", {}) if isinstance(data.get("options", {}), dict) else {}
    trunc, cap = opts.get("truncation"), opts.get("max_truncation")
    if isinstance(trunc, int) and isinstance(cap, int) and trunc > cap:
        errors.append("options: truncation exceeds max_truncation")
    if errors:
        raise JobError(errors)
    return JobSpec(
        tuple(sorted(points)),
        rank,
        tuple(tuple(str(x) for x in row) for row in matrix),
        True,
        tuple(sorted(opts.items())),
    )


# ---------------------------------------------------------------------------
# rendering


def _q(x: Fraction) -> str:
    return str(x)


def _series(x: TruncLaurent, terms: int = 6) -> str:
    items = sorted(x.terms().items())
    shown = items[:terms]
    body = " + ".join(f"{c}*s^{e}" for e, c in shown) or "0"
    if len(items) > terms or x.prec is not None:
        top = x.prec + 1 if x.prec is not None else items[-1][0] + 1
        body += f" + O(s^{top})" if len(items) <= terms else " + ..."
    return body


def _vec_series(v: Sequence[TruncLaurent]) -> list[str]:
    return [_series(x) for x in v]


def _vec_fun(v: Sequence[RegFun]) -> list[str]:
    return [str(f) for f in v]


def _global_json(G: coh.GlobalCohomology, verbose: bool) -> dict:
    out = {"dims": list(G.dims)}
    out["h1_basis"] = [[f"({s}) dt" for s in _vec_fun(w)] for w in G.h1.basis]
    if verbose:
        out["h0_basis"] = [_vec_fun(v) for v in G.h0.basis]
    return out


def _boundary_json(B: dict, verbose: bool, point: str | None = None) -> dict:
    per = {}
    for p, lc in B.items():
        if point is not None and str(p) != point:
            continue
        entry = {"dims": list(lc.dims), "truncation_used": lc.truncation_used, "stabilized": lc.stabilized}
        entry["h1_basis"] = [[f"({s}) ds" for s in _vec_series(w)] for w in lc.h1_basis]
        if verbose:
            entry["h0_basis"] = [_vec_series(v) for v in lc.h0_basis]
            entry["pole_order"] = lc.h1.L.pole_order
        per[str(p)] = entry
    total = [sum(e["dims"][0] for e in per.values()), sum(e["dims"][1] for e in per.values())]
    return {"points": per, "total": total}


def _compact_json(C: coh.CompactCohomology, verbose: bool) -> dict:
    out = {"dims": list(C.dims), "rank_rho0": C.rank_rho0, "rank_rho1": C.rank_rho1}
    if verbose:
        classes = {}
        for deg, items in C.classes.items():
            classes[str(deg)] = [
                {
                    "global_part": _vec_fun(c.global_part),
                    "boundary_part": {str(p): _vec_series(h) for p, h in c.boundary_part.items()},
                }
                for c in items
            ]
        out["classes"] = classes
    return out


def _empty_report(job: JobSpec | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "job": job.to_dict() if job else None,
        "h_X": None,
        "h_boundary": None,
        "h_c": None,
        "pairings": None,
        "euler": None,
        "tate": None,
        "diagnostics": None,
    }


# ---------------------------------------------------------------------------
# commands


def _limits(job: JobSpec, args) -> tuple[int | None, int]:
    trunc = args.truncation if args.truncation is not None else job.option("truncation")
    cap = args.max_truncation if args.max_truncation is not None else job.option("max_truncation", DEFAULT_CAP)
    return trunc, cap


def cmd_cohomology(job: JobSpec, args) -> tuple[dict, int]:
    E = job.connection()
    trunc, cap = _limits(job, args)
    R = coh.cohomology_report(E, trunc, cap)
    out = _empty_report(job)
    out["h_X"] = _global_json(R.h_X, args.verbose)
    out["h_boundary"] = _boundary_json(R.h_boundary, args.verbose, args.point)
    out["h_c"] = _compact_json(R.h_c, args.verbose)
    out["euler"] = R.euler
    out["diagnostics"] = {"les": R.les, "truncation": R.truncation}
    code = EXIT_OK
    if not R.les["ok"] or R.euler["chi_boundary"] != 0 or not R.euler.get("chi_c_equals_chi_X_dual", True):
        out["diagnostics"]["error"] = "long exact sequence or Euler characteristic check failed"
        code = EXIT_INVARIANT
    return out, code


def cmd_boundary(job: JobSpec, args) -> tuple[dict, int]:
    E = job.connection()
    trunc, cap = _limits(job, args)
    B = coh.boundary_h(E, trunc, cap)
    out = _empty_report(job)
    out["h_boundary"] = _boundary_json(B, args.verbose, args.point)
    bad = [str(p) for p, lc in B.items() if lc.dims[0] != lc.dims[1]]
    if bad:
        out["diagnostics"] = {"error": f"nonzero local index at {bad}"}
        return out, EXIT_INVARIANT
    return out, EXIT_OK


def cmd_compact(job: JobSpec, args) -> tuple[dict, int]:
    E = job.connection()
    trunc, cap = _limits(job, args)
    C = coh.compact_h(E, trunc, cap)
    out = _empty_report(job)
    out["h_c"] = _compact_json(C, args.verbose)
    out["h_X"] = {"dims": list(coh.global_h(E).dims)}
    return out, EXIT_OK


def cmd_duality(job: JobSpec, args) -> tuple[dict, int]:
    E = job.connection()
    trunc, cap = _limits(job, args)
    bp = coh.boundary_pairing(E, trunc, cap)
    dp = coh.duality_pairing_c(E, trunc, cap)
    well = coh.pairing_well_defined(E, trunc, cap)
    out = _empty_report(job)
    out["pairings"] = {
        "boundary": {str(k): v.as_dict() for k, v in bp.items()},
        "compact": {str(k): v.as_dict() for k, v in dp.items()},
        "compact_well_defined": well,
    }
    ok = well and all(v.perfect for v in bp.values()) and all(v.perfect for v in dp.values())
    if not ok:
        out["diagnostics"] = {"error": "duality failure: a pairing is degenerate or not square"}
        return out, EXIT_INVARIANT
    return out, EXIT_OK


def cmd_tangent(job: JobSpec, args) -> tuple[dict, int]:
    E = job.connection()
    T = coh.tangent_complex(E)
    F = coh.fredholm_check(E)
    inj = coh.injectivity_check(E)
    out = _empty_report(job)
    out["h_X"] = {"tangent": {str(k): v for k, v in sorted(T.items())}, "end_dims": list(F.end_dims)}
    out["diagnostics"] = {"fredholm": F.fredholm, "injective_on_boundary": inj}
    return out, EXIT_OK if inj else EXIT_INVARIANT


def cmd_residues(job: JobSpec, args) -> tuple[dict, int]:
    text = args.form.strip()
    if text.endswith("dt"):
        text = text[:-2].strip()
    f = parse_regfun(text, job.finite_points)
    res = {str(p): restrict_form(f, p, 0).coeff(-1) for p in job.curve.points()}
    total = sum(res.values(), Fraction(0))
    out = _empty_report(job)
    out["pairings"] = {"residues": {k: _q(v) for k, v in res.items()}, "sum": _q(total), "form": args.form}
    if total != 0:
        out["diagnostics"] = {"error": "residues of a global form do not sum to zero"}
        return out, EXIT_INVARIANT
    return out, EXIT_OK


def cmd_tate(job: JobSpec | None, args) -> tuple[dict, int]:
    curve = job.curve if job else CurveSpec.affine_line()
    depth = args.depth or (job.option("depth") if job else None) or 4
    rep = serre_duality_stage_check(args.twist, curve, depth)
    out = _empty_report(job)
    tate = {"serre": rep.as_dict(), "laurent_exact": laurent_tate(depth).exact()}
    code = EXIT_OK if rep.ok else EXIT_INVARIANT
    if job:
        E = job.connection()
        chi_c = coh.cohomology_report(E, with_dual=False).euler["chi_c"]
        tate["hodge"] = hodge_pieces(E, depth, chi_c).as_dict()
    out["tate"] = tate
    return out, code


def _golden_files() -> list:
    root = resources.files("fbx") / "golden"
    return sorted((p for p in root.iterdir() if p.name.endswith(".json")), key=lambda p: p.name)


def cmd_selftest(args) -> tuple[dict, int]:
    results = {}
    ok = True
    for path in _golden_files():
        case = json.loads(path.read_text())
        job = parse_job(json.dumps(case["job"]))
        E = job.connection()
        R = coh.cohomology_report(E)
        got = {
            "h_X": list(R.h_X.dims),
            "h_boundary": {str(p): list(lc.dims) for p, lc in R.h_boundary.items()},
            "h_c": list(R.h_c.dims),
        }
        exp = case["expect"]
        passed = got == exp and R.les["ok"]
        ok = ok and passed
        results[path.name] = {"passed": passed, "got": got, "expected": exp}
    out = _empty_report(None)
    out["diagnostics"] = {"selftest": results, "passed": ok}
    return out, EXIT_OK if ok else EXIT_INVARIANT


COMMANDS = {
    "cohomology": cmd_cohomology,
    "boundary": cmd_boundary,
    "compact": cmd_compact,
    "duality": cmd_duality,
    "tangent": cmd_tangent,
    "residues": cmd_residues,
    "tate": cmd_tate,
}


def _table(report: dict) -> str:
    lines = []
    if report.get("job"):
        curve = report["job"]["curve"]["finite_points"]
        lines.append(f"X = P1 minus {{{', '.join(curve + ['inf'])}}}")
        lines.append(f"matrix: {report['job']['connection']['matrix']}")
    if report.get("h_X"):
        hx = report["h_X"]
        if "dims" in hx:
            lines.append(f"H(X, E)          dims {hx['dims']}")
        if "tangent" in hx:
            lines.append(f"tangent complex  {hx['tangent']}   End-dims {hx['end_dims']}")
        for k, rep in enumerate(hx.get("h1_basis", [])):
            lines.append(f"  H1 class {k}: {rep}")
    if report.get("h_boundary"):
        for p, e in report["h_boundary"]["points"].items():
            lines.append(f"H(bd_{p:<4})      dims {e['dims']}  (N = {e['truncation_used']})")
        lines.append(f"H(bd) total      dims {report['h_boundary']['total']}")
    if report.get("h_c"):
        lines.append(f"H_c(X, E)        dims {report['h_c']['dims']}")
    if report.get("euler"):
        lines.append("euler            " + ", ".join(f"{k}={v}" for k, v in sorted(report["euler"].items())))
    if report.get("pairings"):
        pr = report["pairings"]
        for group in ("boundary", "compact"):
            for k, v in pr.get(group, {}).items():
                lines.append(f"pairing {v['name']:<24} shape {v['shape']} rank {v['rank']} perfect {v['perfect']}")
        if "residues" in pr:
            for p, v in pr["residues"].items():
                lines.append(f"res_{p} = {v}")
            lines.append(f"sum = {pr['sum']}")
    if report.get("tate"):
        s = report["tate"]["serre"]
        lines.append(f"Serre duality stages, twist {s['twist']}, D = {s['points']}: ok = {s['ok']}")
        for st in s["stages"]:
            lines.append(f"  m={st['m']}: H_c = ({st['h0_c']}, {st['h1_c']}), filtration dim {st['filtration_dim']}")
        if "hodge" in report["tate"]:
            h = report["tate"]["hodge"]
            lines.append(f"Hodge pieces chi {h['chi_sum']} vs chi_c {h['chi_c']}: matches = {h['matches']}")
    diag = report.get("diagnostics") or {}
    if "selftest" in diag:
        for name, r in diag["selftest"].items():
            lines.append(f"{name:<28} {'ok' if r['passed'] else 'FAILED'}")
    if "error" in diag:
        lines.append(f"ERROR: {diag['error']}")
    return "\n".join(lines)


def _dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default)


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbx", description="de Rham cohomology of connections on punctured lines")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, job_required=True):
        p.add_argument("job", nargs=None if job_required else "?", help="job JSON file")
        p.add_argument("--truncation", type=int, default=None, help="initial local truncation N")
        p.add_argument("--max-truncation", type=int, default=None, help="truncation cap")
        p.add_argument("--json", action="store_true", help="emit JSON")
        p.add_argument("--point", default=None, help="restrict boundary output to one point")
        p.add_argument("--verbose", action="store_true", help="include bases and representatives")

    for name in ("cohomology", "boundary", "compact", "duality", "tangent"):
        common(sub.add_parser(name))
    p = sub.add_parser("residues")
    common(p)
    p.add_argument("--form", required=True, help='a 1-form "<expr> dt"')
    p = sub.add_parser("tate")
    common(p, job_required=False)
    p.add_argument("--twist", type=int, required=True)
    p.add_argument("--depth", type=int, default=None)
    p = sub.add_parser("selftest")
    p.add_argument("--json", action="store_true")
    p.add_argument("--verbose", action="store_true")
    return parser


def run(command: str, job: JobSpec | None, args) -> tuple[dict, int]:
    if command == "selftest":
        return cmd_selftest(args)
    return COMMANDS[command](job, args)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    job = None
    try:
        if getattr(args, "job", None):
            try:
                with open(args.job, "rb") as fh:
                    text = fh.read()
            except OSError as exc:
                raise JobError([f"cannot read job file: {exc}"]) from None
            job = parse_job(text)
        report, code = run(args.command, job, args)
    except (JobError, ExpressionError, CurveError) as exc:
        errors = exc.errors if isinstance(exc, JobError) else [str(exc)]
        report, code = _empty_report(job), EXIT_INVALID
        report["diagnostics"] = {"errors": errors}
    except StabilizationError as exc:
        report, code = _empty_report(job), EXIT_STABILIZATION
        report["diagnostics"] = {"error": str(exc).split("; diagnostics")[0], "details": _plain(exc.diagnostics)}
    except coh.InvariantError as exc:
        report, code = _empty_report(job), EXIT_INVARIANT
        report["diagnostics"] = {"error": str(exc), "details": _plain(exc.diagnostics)}
    if args.json:
        sys.stdout.write(_dumps(report) + "\n")
    else:
        text = _table(report)
        if code == EXIT_INVALID:
            text = "\n".join(["invalid input:"] + [f"  {e}" for e in report["diagnostics"]["errors"]])
        elif code == EXIT_STABILIZATION:
            text = f"stabilization failed: {report['diagnostics']['error']}"
        sys.stdout.write(text + "\n")
    return code


def _plain(x):
    return json.loads(json.dumps(x, default=str))


if __name__ == "__main__":
    sys.exit(main())
