"""Command-line front end: ``qmt compute | sweep | verify-set | mc-check``.

Exit codes: 0 success, 2 validation or parse error, 3 incomplete measurement
set, 4 Monte Carlo disagreement.
"""

from __future__ import annotations

import argparse
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence, TextIO

import yaml

from . import example_class as ex
from .errors import DimensionMismatch, IncompleteSet, QmtError
from .oracle_mc import check_spectrum, default_suite, thread_count
from .quantities import averages, efficiency_limits, outcome_probabilities, report
from .spectrum import (
    COMPLETENESS_TOL,
    DEFAULT_GROUP_TOL,
    MeasurementSet,
    SingularSpectrum,
    completeness_defect,
    validate,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCOMPLETE = 3
EXIT_STATISTICAL = 4

COMPUTE_COLUMNS = ("d", "sigma_sq", "tau", "I_bits", "F", "R", "G", "Q", "E_F", "E_R")
SWEEP_FILES = {
    "I": "information.csv",
    "F": "fidelity.csv",
    "R": "reversibility.csv",
    "E_F": "efficiency_fidelity.csv",
    "E_R": "efficiency_reversibility.csv",
}


class ParseError(QmtError):
    """Malformed input document; the message names the line or field."""


def fmt(x: float | int | None) -> str:
    """Fixed CSV number format: 12 significant digits in scientific notation."""
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.11e}"


def write_csv(out: TextIO, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")


# input documents

def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{where}: expected a number, got {x!r}")
    return float(x)


def parse_document(text: str, source: str = "<input>") -> dict:
    """Load ``{d, spectra, labels}`` from YAML/JSON text.

    A bare list of numbers is one spectrum; a bare list of lists is a set.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        pos = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ParseError(f"{source}: {pos}: {exc.problem}") from None
    except yaml.YAMLError as exc:
        raise ParseError(f"{source}: {exc}") from None
    if isinstance(doc, list):
        doc = {"spectra": doc if doc and all(isinstance(v, list) for v in doc) else [doc]}
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: expected a mapping with a 'spectra' field")
    spectra = doc.get("spectra")
    if not isinstance(spectra, list) or not spectra:
        raise ParseError(f"{source}: field 'spectra' must be a nonempty list of lists")
    rows = []
    for i, sp in enumerate(spectra):
        if not isinstance(sp, list):
            raise ParseError(f"{source}: spectra[{i}]: expected a list of numbers")
        rows.append([_number(v, f"{source}: spectra[{i}][{j}]") for j, v in enumerate(sp)])
    d = doc.get("d")
    if d is not None:
        if isinstance(d, bool) or not isinstance(d, int):
            raise ParseError(f"{source}: field 'd' must be an integer")
        for i, sp in enumerate(rows):
            if len(sp) != d:
                raise DimensionMismatch(f"{source}: spectra[{i}] has {len(sp)} values, d = {d}")
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != len(rows):
            raise ParseError(f"{source}: field 'labels' must list one label per spectrum")
        labels = [str(x) for x in labels]
    return {"d": d, "spectra": rows, "labels": labels}


def _load(args) -> dict:
    if args.input is not None:
        path = Path(args.input)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"{path}: {exc.strerror}") from None
        return parse_document(text, str(path))
    if getattr(args, "spectrum", None):
        return parse_document(args.spectrum, "<command line>")
    raise ParseError("no input: give a spectrum such as '[1, 0.5]' or --input PATH")


# commands

def cmd_compute(args, out: TextIO, err: TextIO) -> int:
    doc = _load(args)
    spectra = [validate(v, auto_rescale=args.auto_rescale) for v in doc["spectra"]]
    labels = doc["labels"]
    header = (("label",) if labels else ()) + COMPUTE_COLUMNS
    rows = []
    for i, s in enumerate(spectra):
        rep = report(s, args.group_tol)
        row = [*rep.as_dict().values()]
        if labels:
            row.insert(0, labels[i])
        rows.append(row)
        if rep.eff_fidelity is None or rep.eff_reversibility is None:
            e_f, e_r = efficiency_limits(s.d)
            err.write(
                f"spectrum {i}: efficiencies undefined at the identity; "
                f"limits E_F -> {fmt(e_f)}, E_R -> {fmt(e_r)}\n"
            )
    write_csv(out, header, rows)
    return EXIT_OK


def parse_pairs(text: str, d: int) -> list[tuple[int, int]]:
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            k, l = (int(part) for part in item.split(":"))
        except ValueError:
            raise ParseError(f"--pairs: cannot read {item!r}, expected k:l") from None
        ex.ExampleParams(d, k, l, 0.5)
        pairs.append((k, l))
    if not pairs:
        raise ParseError("--pairs: no pairs given")
    return pairs


def _endpoint(d: int, rank: int) -> dict:
    rep = ex.projective(d, rank)
    e_f, e_r = rep.eff_fidelity, rep.eff_reversibility
    if rank == d:
        e_f, e_r = efficiency_limits(d)
    return {"I": rep.info_bits, "F": rep.fidelity, "R": rep.reversibility, "E_F": e_f, "E_R": e_r}


def sweep_point(d: int, k: int, l: int, lam: float) -> dict:
    """All five curve values of one family member; endpoints from the projectors."""
    if lam <= 0.0:
        return _endpoint(d, k)
    if lam >= 1.0:
        return _endpoint(d, k + l)
    p = ex.ExampleParams(d, k, l, lam)
    info = ex.information_ex(p)
    fid = ex.fidelity_ex(p)
    rev = ex.reversibility_ex(p)
    return {"I": info, "F": fid, "R": rev, "E_F": info / (1 - fid), "E_R": info / (1 - rev)}


def sweep_tables(d: int, pairs: Sequence[tuple[int, int]], grid: int) -> dict[str, tuple]:
    """Header and rows for each of the five quantities, keyed like :data:`SWEEP_FILES`."""
    lams = [i / (grid - 1) for i in range(grid)]
    jobs = [(k, l, lam) for lam in lams for (k, l) in pairs]
    threads = thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(lambda j: sweep_point(d, *j), jobs))
    else:
        points = [sweep_point(d, *j) for j in jobs]
    refs = [_endpoint(d, r) for r in range(1, d + 1)]
    header = ["lambda"] + [f"k{k}_l{l}" for k, l in pairs] + [f"P{r}" for r in range(1, d + 1)]
    tables = {}
    for key in SWEEP_FILES:
        rows = []
        for i, lam in enumerate(lams):
            chunk = points[i * len(pairs) : (i + 1) * len(pairs)]
            rows.append([lam] + [pt[key] for pt in chunk] + [ref[key] for ref in refs])
        tables[key] = (header, rows)
    return tables


def cmd_sweep(args, out: TextIO, err: TextIO) -> int:
    if args.grid < 2:
        raise ParseError("--grid must be at least 2")
    if args.output is None:
        raise ParseError("sweep needs --output DIR")
    pairs = parse_pairs(args.pairs, args.d) if args.pairs else ex.valid_pairs(args.d)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for key, (header, rows) in sweep_tables(args.d, pairs, args.grid).items():
        buf = io.StringIO()
        write_csv(buf, header, rows)
        (outdir / SWEEP_FILES[key]).write_bytes(buf.getvalue().encode("utf-8"))
        out.write(f"wrote {outdir / SWEEP_FILES[key]}\n")
    return EXIT_OK


def cmd_verify_set(args, out: TextIO, err: TextIO) -> int:
    doc = _load(args)
    mset = MeasurementSet(tuple(validate(v, auto_rescale=args.auto_rescale) for v in doc["spectra"]))
    tol = args.tol if args.tol is not None else COMPLETENESS_TOL * mset.d
    defect = completeness_defect(mset)
    out.write(f"d: {mset.d}\n")
    out.write(f"outcomes: {len(mset)}\n")
    out.write(f"completeness_defect: {fmt(defect)}\n")
    out.write(f"tolerance: {fmt(tol)}\n")
    if defect > tol:
        err.write(f"incomplete measurement set: defect {fmt(defect)} > {fmt(tol)}\n")
        return EXIT_INCOMPLETE
    probs = outcome_probabilities(mset)
    out.write("p(m): " + ", ".join(fmt(p) for p in probs) + "\n")
    avg = averages(mset, tol=tol, group_tol=args.group_tol)
    out.write(f"I_bits: {fmt(avg.mutual_info_bits)}\n")
    out.write(f"F: {fmt(avg.mean_fidelity)}\n")
    out.write(f"R: {fmt(avg.mean_reversibility)}\n")
    out.write(f"G: {fmt(avg.mean_estimation)}\n")
    return EXIT_OK


def cmd_mc_check(args, out: TextIO, err: TextIO) -> int:
    if args.samples < 10_000:
        raise ParseError("--samples must be at least 10000")
    if args.input is None and not args.spectrum:
        suite = default_suite()
    else:
        doc = _load(args)
        labels = doc["labels"] or [f"spectrum{i}" for i in range(len(doc["spectra"]))]
        suite = [
            (lab, validate(v, auto_rescale=args.auto_rescale))
            for lab, v in zip(labels, doc["spectra"])
        ]
    header = ("label", "quantity", "target", "estimate", "std_error", "z", "status")
    rows = []
    failed = False
    for label, s in suite:
        for row in check_spectrum(s, args.samples, args.seed, label):
            failed |= row.status == "FAIL"
            rows.append(
                [row.label, row.quantity, row.target, row.estimate.mean,
                 row.estimate.std_error, row.z, row.status]
            )
    write_csv(out, header, rows)
    if failed:
        err.write("Monte Carlo check failed: some |z| > 4\n")
        return EXIT_STATISTICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qmt",
        description="Information, fidelity and reversibility of quantum measurements "
        "from singular values.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spectrum=True):
        if spectrum:
            sp.add_argument("spectrum", nargs="?", help="inline spectrum, e.g. '[1, 0.5]'")
        sp.add_argument("--input", metavar="PATH", help="YAML/JSON document with 'spectra'")
        sp.add_argument("--auto-rescale", action="store_true",
                        help="divide spectra with values above 1 by their maximum")
        sp.add_argument("--group-tol", type=float, default=DEFAULT_GROUP_TOL,
                        help="relative tolerance for grouping squared singular values")

    sp = sub.add_parser("compute", help="report I, F, R, G, Q, E_F, E_R per spectrum")
    common(sp)
    sp.add_argument("--output", metavar="PATH", help="write the CSV here instead of stdout")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("sweep", help="tabulate the (k, l, lambda) family as CSV files")
    sp.add_argument("--d", type=int, default=4)
    sp.add_argument("--pairs", help="comma-separated k:l pairs (default: all valid)")
    sp.add_argument("--grid", type=int, default=101, help="number of lambda points")
    sp.add_argument("--output", metavar="DIR", help="directory for the CSV files")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify-set", help="check completeness and print averaged quantities")
    common(sp)
    sp.add_argument("--tol", type=float, default=None, help="completeness tolerance")
    sp.set_defaults(func=cmd_verify_set)

    sp = sub.add_parser("mc-check", help="compare closed forms with Monte Carlo integration")
    common(sp)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_mc_check)
    return p


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    if args.command == "compute" and args.output:
        target = Path(args.output)
        buf = io.StringIO()
        code = _dispatch(args, buf, err)
        if code == EXIT_OK:
            target.write_bytes(buf.getvalue().encode("utf-8"))
        return code
    return _dispatch(args, out, err)


def _dispatch(args, out: TextIO, err: TextIO) -> int:
    try:
        return args.func(args, out, err)
    except IncompleteSet as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INCOMPLETE
    except QmtError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INVALID


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
