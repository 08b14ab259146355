"""System and report files.

The system format is a small self-describing line format, version tagged,
with floats printed by shortest round-trip representation so that
parse(serialize(x)) is coefficient-identical.  Reports are JSON plus a
companion CSV whose layout mirrors the experiment tables: one column per
system, rows for per-root condition numbers, the system condition number,
and the step counts.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SystemFormatError
from .polynomials import HomoPoly, MultiIndex, PolySystem
from .projective import ProjectivePoint
from .search import AvgSteps, CandidateReport, SearchReport

FORMAT_TAG = "homsearch-system"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ParsedSystem:
    """A system read from disk, with optional roots and provenance flags."""

    system: PolySystem
    roots: tuple[ProjectivePoint, ...] | None
    homogenized: bool  # True when the file carried affine polynomials


def dehomogenize(p: HomoPoly) -> dict[MultiIndex, complex]:
    """Affine coefficient map of p at X0 = 1 (exponents over X1..Xn)."""
    return {alpha[1:]: value for alpha, value in p.terms()}


def homogenize(affine: dict[MultiIndex, complex], degree: int, num_vars: int) -> HomoPoly:
    """Homogenize an affine coefficient map with X0 to the given degree.

    Inverse of dehomogenize on already-homogeneous input of the same
    degree.
    """
    coeffs: dict[MultiIndex, complex] = {}
    for alpha, value in affine.items():
        if len(alpha) != num_vars - 1:
            raise ValueError(f"affine exponent {alpha} needs {num_vars - 1} entries")
        total = sum(alpha)
        if total > degree:
            raise ValueError(f"term {alpha} exceeds declared degree {degree}")
        coeffs[(degree - total,) + tuple(alpha)] = complex(value)
    return HomoPoly(degree, num_vars, coeffs)


def write_system(system: PolySystem, path, roots=None) -> None:
    """Serialize a system (and optionally its roots) to a text file."""
    lines = [f"{FORMAT_TAG} v{FORMAT_VERSION}", "form homogeneous",
             f"nvars {system.num_vars}",
             "degrees " + " ".join(str(d) for d in system.degrees)]
    for p in system.polys:
        terms = list(p.terms())
        lines.append(f"poly degree={p.degree} terms={len(terms)}")
        for alpha, value in terms:
            exps = " ".join(str(a) for a in alpha)
            lines.append(f"term {exps} {float(value.real)!r} {float(value.imag)!r}")
    if roots is not None:
        roots = list(roots)
        lines.append(f"roots {len(roots)}")
        for z in roots:
            coords = z.coords if isinstance(z, ProjectivePoint) else np.asarray(z)
            flat = " ".join(f"{float(c.real)!r} {float(c.imag)!r}" for c in coords)
            lines.append(f"root {flat}")
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n")


def parse_system(path) -> ParsedSystem:
    """Read a system file; malformed input raises with line diagnostics."""
    text = Path(path).read_text()
    lines = text.splitlines()

    def fail(msg: str, lineno: int):
        raise SystemFormatError(msg, line=lineno)

    if not lines or not lines[0].startswith(FORMAT_TAG):
        fail(f"missing '{FORMAT_TAG}' header", 1)
    version = lines[0].split("v")[-1]
    if version != str(FORMAT_VERSION):
        fail(f"unsupported format version {version!r}", 1)

    form = None
    num_vars = None
    degrees: list[int] | None = None
    polys: list[HomoPoly] = []
    roots: list[ProjectivePoint] | None = None
    i = 1
    n_lines = len(lines)

    def next_content():
        nonlocal i
        while i < n_lines:
            stripped = lines[i].strip()
            i += 1
            if stripped and not stripped.startswith("#"):
                return stripped, i
        return None, i

    while True:
        entry, lineno = next_content()
        if entry is None:
            fail("missing 'end' line", n_lines)
        fieldsv = entry.split()
        key = fieldsv[0]
        try:
            if key == "form":
                form = fieldsv[1]
                if form not in ("homogeneous", "affine"):
                    fail(f"unknown form {form!r}", lineno)
            elif key == "nvars":
                num_vars = int(fieldsv[1])
            elif key == "degrees":
                degrees = [int(x) for x in fieldsv[1:]]
            elif key == "poly":
                if form is None or num_vars is None or degrees is None:
                    fail("poly before form/nvars/degrees headers", lineno)
                opts = dict(part.split("=") for part in fieldsv[1:])
                degree = int(opts["degree"])
                n_terms = int(opts["terms"])
                exp_len = num_vars if form == "homogeneous" else num_vars - 1
                coeffs: dict[tuple[int, ...], complex] = {}
                for _ in range(n_terms):
                    term, term_line = next_content()
                    if term is None or not term.startswith("term"):
                        fail("expected 'term' line", term_line)
                    parts = term.split()
                    if len(parts) != 1 + exp_len + 2:
                        fail(f"term needs {exp_len} exponents and re/im", term_line)
                    try:
                        alpha = tuple(int(x) for x in parts[1 : 1 + exp_len])
                        value = complex(float(parts[-2]), float(parts[-1]))
                    except ValueError as exc:
                        fail(f"malformed term: {exc}", term_line)
                    coeffs[alpha] = value
                if form == "homogeneous":
                    polys.append(HomoPoly(degree, num_vars, coeffs))
                else:
                    polys.append(homogenize(coeffs, degree, num_vars))
            elif key == "roots":
                count = int(fieldsv[1])
                roots = []
                for _ in range(count):
                    entry2, root_line = next_content()
                    if entry2 is None or not entry2.startswith("root"):
                        fail("expected 'root' line", root_line)
                    values = [float(x) for x in entry2.split()[1:]]
                    if len(values) % 2:
                        fail("root needs re/im pairs", root_line)
                    coords = np.array(values[0::2]) + 1j * np.array(values[1::2])
                    roots.append(ProjectivePoint(coords))
            elif key == "end":
                break
            else:
                fail(f"unknown directive {key!r}", lineno)
        except (ValueError, IndexError, KeyError) as exc:
            if isinstance(exc, SystemFormatError):
                raise
            fail(f"malformed field: {exc}", lineno)

    if degrees is None or not polys:
        raise SystemFormatError("file declares no polynomials")
    if [p.degree for p in polys] != degrees:
        raise SystemFormatError(
            f"declared degrees {degrees} do not match polynomials "
            f"{[p.degree for p in polys]}"
        )
    system = PolySystem(polys)
    # Affine inputs were homogenized with X0; the flag records it.
    return ParsedSystem(system, tuple(roots) if roots is not None else None,
                        homogenized=(form == "affine"))


def _system_terms(system: PolySystem):
    return [
        {
            "degree": p.degree,
            "terms": [[list(alpha), float(value.real), float(value.imag)] for alpha, value in p.terms()],
        }
        for p in system.polys
    ]


def _avg_dict(avg: AvgSteps | None):
    return dataclasses.asdict(avg) if avg is not None else None


def _candidate_dict(row: CandidateReport):
    return {
        "system_id": row.system_id,
        "per_root_mu": list(row.per_root_mu),
        "mu": row.mu,
        "avg_steps_certified": _avg_dict(row.avg_steps_certified),
        "avg_steps_heuristic": _avg_dict(row.avg_steps_heuristic),
        "num_paths_failed": row.num_paths_failed,
        "draw_index": row.draw_index,
        "pilot_mean": row.pilot_mean,
        "system": _system_terms(row.system) if row.system is not None else None,
    }


def report_to_json(report: SearchReport, include_timing: bool = False) -> str:
    """Deterministic JSON serialization of a report.

    Timing is excluded unless requested: identical (config, seed) must
    produce identical bytes.
    """
    doc = {
        "format": "homsearch-report",
        "version": 1,
        "library_version": __version__,
        "git_hash": None,
        "config": dataclasses.asdict(report.config),
        "candidates": [_candidate_dict(c) for c in report.candidates],
        "constructed": [_candidate_dict(c) for c in report.constructed],
        "one_root": (
            {tracker: {kind: _avg_dict(avg) for kind, avg in kinds.items()}
             for tracker, kinds in report.one_root.items()}
            if report.one_root is not None else None
        ),
        "num_discarded_candidates": report.num_discarded_candidates,
        "notes": list(report.notes),
    }
    if include_timing:
        doc["wall_seconds"] = report.wall_seconds
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def report_to_csv(report: SearchReport) -> str:
    """Companion CSV mirroring the experiment tables (systems as columns)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if report.one_root is not None:
        kinds = ("good", "total", "random")
        writer.writerow([""] + list(kinds))
        for tracker, per_kind in report.one_root.items():
            writer.writerow([f"#steps ({tracker})"] + [repr(per_kind[k].mean) for k in kinds])
            writer.writerow([f"stderr ({tracker})"] + [repr(per_kind[k].stderr) for k in kinds])
        return out.getvalue()

    columns = list(report.candidates) + list(report.constructed)
    if not columns:
        return ""
    writer.writerow([""] + [c.system_id for c in columns])
    n_roots = max(len(c.per_root_mu) for c in columns)
    for i in range(n_roots):
        writer.writerow(
            [f"mu(g,z{i + 1})"]
            + [repr(c.per_root_mu[i]) if i < len(c.per_root_mu) else "" for c in columns]
        )
    writer.writerow(["mu(g)"] + [repr(c.mu) for c in columns])
    for label, getter in (
        ("#steps (certified)", lambda c: c.avg_steps_certified),
        ("#steps (heuristic)", lambda c: c.avg_steps_heuristic),
    ):
        if any(getter(c) is not None for c in columns):
            writer.writerow(
                [label] + [repr(getter(c).mean) if getter(c) else "" for c in columns]
            )
            writer.writerow(
                [label.replace("#steps", "stderr")]
                + [repr(getter(c).stderr) if getter(c) else "" for c in columns]
            )
    return out.getvalue()


def write_report(report: SearchReport, path, include_timing: bool = False):
    """Write <path>.json and <path>.csv (or use path's stem when it has a suffix)."""
    base = Path(path)
    if base.suffix:
        base = base.with_suffix("")
    json_path = base.with_suffix(".json")
    csv_path = base.with_suffix(".csv")
    json_path.write_text(report_to_json(report, include_timing=include_timing))
    csv_path.write_text(report_to_csv(report))
    return json_path, csv_path
