"""Command-line interface.

Exit status: 0 success, 2 some threshold did not converge (rows are still
written), 64 usage error, 65 malformed or invalid input matrix.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import emit, entropy
from .errors import CstreError, MatrixParseError
from .matrixio import load_matrix
from .qlinalg import DensityMatrix, Partition, n_qubits_for
from .separability import (
    ALL_CRITERIA,
    DEFAULT_Q_SCHEDULE,
    Criterion,
    SweepConfig,
    criteria_table,
    criterion_value,
    curve_data,
    isospectral_verdict,
    limit_threshold,
    ppt_min_eigenvalue,
)
from .states import Family, FamilySpec, isospectral_pair, noisy_family

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65

MEASURES = ("cstre", "ar", "vn", "tsallis", "renyi", "entropy")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_qgrid(text: str) -> tuple[float, ...]:
    """``lo:hi:n`` -> ``n`` geometrically spaced values from ``lo`` to ``hi``."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise UsageError(f"--qgrid expects lo:hi:n, got {text!r}") from None
    if n < 1 or lo <= 0 or hi < lo or (n > 1 and hi == lo):
        raise UsageError(f"--qgrid needs 0 < lo < hi and n >= 1, got {text!r}")
    if n == 1:
        return (lo,)
    return tuple(float(v) for v in np.geomspace(lo, hi, n))


def parse_xgrid(text: str) -> list[float]:
    """``lo:hi:step`` -> ``lo, lo + step, ...`` up to ``hi`` inclusive."""
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"--xgrid expects lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo or lo < 0 or hi > 1:
        raise UsageError(f"--xgrid needs 0 <= lo <= hi <= 1 and step > 0, got {text!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def _split(text: str | None) -> list[str]:
    if text is None:
        return []
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _criteria(text: str | None, default=ALL_CRITERIA) -> list[Criterion]:
    if text is None:
        return list(default)
    items = _split(text)
    if not items:
        raise UsageError("--criteria must name at least one of cstre, ar, vn, ppt")
    try:
        return [Criterion.parse(c) for c in items]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _families(args) -> list[Family]:
    try:
        return [Family.parse(f) for f in _split(args.family)] or [Family.W, Family.GHZ]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _nqubits_list(args) -> list[int]:
    try:
        return [int(n) for n in _split(args.nqubits)] or [3, 4]
    except ValueError:
        raise UsageError(f"--nqubits expects integers, got {args.nqubits!r}") from None


def _partition(text: str | None, n: int) -> Partition:
    if text is None:
        return Partition(n, tuple(range(1, n)))
    try:
        return Partition.parse(text, n)
    except CstreError as exc:
        raise UsageError(str(exc)) from None


def _partition_list(text: str | None) -> list[str] | None:
    if text is None:
        return None
    # Letter partitions contain no commas; index partitions use ';' between them.
    sep = ";" if any(ch.isdigit() for ch in text) else ","
    items = [t.strip() for t in text.split(sep) if t.strip()]
    if not items:
        raise UsageError("--partitions must not be empty")
    return items


def _sweep_config(args) -> SweepConfig:
    qs = parse_qgrid(args.qgrid) if getattr(args, "qgrid", None) else DEFAULT_Q_SCHEDULE
    return SweepConfig(q_schedule=qs)


def _single_family(args) -> tuple[Family, int]:
    fams = _families(args)
    ns = _nqubits_list(args)
    if len(fams) != 1 or len(ns) != 1:
        raise UsageError("this command needs exactly one --family and one --nqubits")
    if ns[0] < 2:
        raise UsageError("--nqubits must be >= 2")
    return fams[0], ns[0]


def _load_state(args) -> DensityMatrix:
    if args.input:
        try:
            m = load_matrix(args.input)
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
        except MatrixParseError as exc:
            raise MatrixParseError(f"{args.input}: {exc}") from None
        try:
            n = n_qubits_for(m.shape[0])
            return DensityMatrix(m, n)
        except CstreError as exc:
            raise MatrixParseError(f"{args.input}: not a valid density matrix: {exc}") from None
    if args.state:
        ent, sep = isospectral_pair()
        return ent if args.state == "iso-entangled" else sep
    fam, n = _single_family(args)
    if args.x is None:
        raise UsageError("give --input FILE, --state, or --family/--nqubits/--x")
    try:
        return noisy_family(FamilySpec(fam, n, args.x))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write(args, text: str):
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_table(args) -> int:
    criteria = _criteria(args.criteria)
    cfg = _sweep_config(args)
    partitions = _partition_list(args.partitions)
    if args.family is None and args.nqubits is None and partitions is None:
        reports = criteria_table(None, None, criteria, cfg, workers=args.jobs)
    else:
        fams = [(f, n) for n in _nqubits_list(args) for f in _families(args)]
        try:
            reports = criteria_table(fams, partitions, criteria, cfg, workers=args.jobs)
        except CstreError as exc:
            raise UsageError(str(exc)) from None
    text = emit.reports_csv(reports) if args.format == "csv" else emit.reports_json(reports)
    _write(args, text)
    return EXIT_OK if all(r.converged for r in reports) else EXIT_PARTIAL


def cmd_curve(args) -> int:
    fam, n = _single_family(args)
    part = _partition(args.partition, n)
    crit = _criteria(args.criterion, [Criterion.CSTRE])
    if len(crit) != 1:
        raise UsageError("curve takes a single --criterion")
    grid = parse_xgrid(args.xgrid)
    points = curve_data(fam, n, part, crit[0], args.q, grid)
    if args.format == "csv":
        text = emit.to_csv(("x", "value"), points)
    else:
        text = emit.to_json({
            "family": fam.value, "n_qubits": n, "partition": part.label,
            "criterion": crit[0].value, "q": args.q,
            "points": [{"x": x, "value": v} for x, v in points],
        })
    _write(args, text)
    return EXIT_OK


def cmd_implicit(args) -> int:
    fam, n = _single_family(args)
    part = _partition(args.partition, n)
    crits = _criteria(args.criteria or args.criterion, [Criterion.CSTRE, Criterion.AR])
    cfg = _sweep_config(args)
    reports = [limit_threshold(fam, n, part, c, cfg) for c in crits]
    if args.format == "csv":
        rows = []
        for r in reports:
            rows += [(r.criterion.value, "sample", q, x) for q, x in r.samples]
            rows.append((r.criterion.value, "limit", None, r.x_star))
        text = emit.to_csv(("criterion", "kind", "q", "x_star"), rows)
    else:
        text = emit.reports_json(reports)
    _write(args, text)
    return EXIT_OK if all(r.converged for r in reports) else EXIT_PARTIAL


def _measure(rho: DensityMatrix, args) -> tuple[float, entropy.EntropyResult | None]:
    q = args.q
    measure = args.measure
    if measure in ("cstre", "ar", "vn"):
        part = _partition(args.partition, rho.n_qubits)
        if measure == "cstre":
            res = entropy.cstre(rho, part, q)
            return res.value, res
        if measure == "ar":
            return entropy.ar_q_conditional(rho, part, q), None
        return entropy.vn_conditional(rho, part), None
    if measure == "tsallis":
        return entropy.tsallis_entropy(rho, q), None
    if measure == "renyi":
        return entropy.renyi_entropy(rho, q), None
    return entropy.von_neumann_entropy(rho), None


def cmd_entropy(args) -> int:
    rho = _load_state(args)
    value, res = _measure(rho, args)
    if args.format == "json":
        out = {"measure": args.measure, "q": args.q, "value": value}
        if args.verbose and res is not None and res.gammas is not None:
            out["gammas"] = list(res.gammas)
            out["q_tilde"] = res.q_tilde
        text = emit.to_json(out)
    else:
        lines = [repr(float(value))]
        if args.verbose and res is not None and res.gammas is not None:
            lines.append("gammas " + " ".join(repr(g) for g in res.gammas))
            lines.append(f"q_tilde {res.q_tilde!r}")
        text = "\n".join(lines) + "\n"
    _write(args, text)
    return EXIT_OK


def cmd_check(args) -> int:
    rho = _load_state(args)
    crit = _criteria(args.criterion, [Criterion.CSTRE])
    if len(crit) != 1:
        raise UsageError("check takes a single --criterion")
    crit = crit[0]
    part = _partition(args.partition, rho.n_qubits)
    if crit is Criterion.PPT:
        value = ppt_min_eigenvalue(rho, part)
    else:
        value = criterion_value(rho, part, crit, args.q)
    if value < -entropy.WITNESS_TOL:
        verdict = "ENTANGLED"
    elif crit is Criterion.PPT and rho.n_qubits == 2:
        verdict = "SEPARABLE"
    else:
        verdict = "INCONCLUSIVE"
    if args.format == "json":
        text = emit.to_json({"verdict": verdict, "criterion": crit.value, "q": args.q,
                             "partition": part.label, "value": value})
    else:
        text = verdict + "\n"
        if args.verbose:
            text += f"{crit.value} {part.label} q={args.q!r} value={value!r}\n"
    _write(args, text)
    return EXIT_OK


def cmd_isospectral(args) -> int:
    rep = isospectral_verdict()
    if args.format == "csv":
        rows = list(zip(rep.qs, rep.entangled_values, rep.separable_values))
        rows.append((1.0, rep.entangled_q1, rep.separable_q1))
        text = emit.to_csv(("q", "entangled", "separable"), rows)
    else:
        text = emit.to_json(rep.to_dict())
    _write(args, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cstre", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default="json", formats=("json", "csv")):
        sp.add_argument("--format", choices=formats, default=fmt_default)
        sp.add_argument("--output", metavar="FILE", help="write here instead of standard output")
        sp.add_argument("--verbose", action="store_true")

    def family_opts(sp):
        sp.add_argument("--family", help="w or ghz (comma list for table)")
        sp.add_argument("--nqubits", help="register size (comma list for table)")

    t = sub.add_parser("table", help="separability thresholds for families x partitions x criteria",
                       description="JSON: list of reports {family, n_qubits, partition, criterion, x_star, "
                                   "converged, q_at_convergence, x_last, message, samples[]}. "
                                   "CSV columns: family,n_qubits,partition,criterion,kind,q,x_star,converged "
                                   "with kind=sample per (q, x*) and kind=summary per report.")
    family_opts(t)
    t.add_argument("--partitions", "--partition", dest="partitions",
                   help="e.g. A:BC,AB:C or 0:1,2;0,1:2 (default: all contiguous cuts)")
    t.add_argument("--criteria", "--criterion", dest="criteria", help="comma list of cstre,ar,vn,ppt")
    t.add_argument("--qgrid", help="lo:hi:n geometric q schedule (default 1,2,5,...,800)")
    t.add_argument("--jobs", type=int, default=None, help="worker processes")
    common(t)
    t.set_defaults(func=cmd_table)

    c = sub.add_parser("curve", help="criterion value against x at fixed q",
                       description="CSV columns: x,value (empty value where evaluation failed).")
    family_opts(c)
    c.add_argument("--partition")
    c.add_argument("--criterion", default="cstre")
    c.add_argument("--q", type=float, default=2.0)
    c.add_argument("--xgrid", default="0:1:0.01", help="lo:hi:step")
    common(c)
    c.set_defaults(func=cmd_curve)

    i = sub.add_parser("implicit", help="zero crossing x*(q) along a q schedule",
                       description="CSV columns: criterion,kind,q,x_star; kind=sample per q and "
                                   "kind=limit for the extrapolated q -> infinity threshold.")
    family_opts(i)
    i.add_argument("--partition")
    i.add_argument("--criteria", "--criterion", dest="criteria", help="comma list (default cstre,ar)")
    i.add_argument("--qgrid", help="lo:hi:n geometric q schedule")
    common(i)
    i.set_defaults(func=cmd_implicit, criterion=None)

    for name, func, helptext in (("entropy", cmd_entropy, "evaluate one entropy measure"),
                                 ("check", cmd_check, "entanglement verdict from one criterion")):
        e = sub.add_parser(name, help=helptext)
        family_opts(e)
        e.add_argument("--x", type=float, help="mixing parameter for --family states")
        e.add_argument("--state", choices=("iso-entangled", "iso-separable"),
                       help="one of the isospectral pair of two-qubit states")
        e.add_argument("--input", metavar="FILE", help="matrix text file")
        e.add_argument("--partition")
        e.add_argument("--q", type=float, default=2.0)
        if name == "entropy":
            e.add_argument("--measure", "--criterion", dest="measure", choices=MEASURES, default="cstre")
        else:
            e.add_argument("--criterion", default="cstre")
        common(e, "text", ("text", "json"))
        e.set_defaults(func=func)

    s = sub.add_parser("isospectral", help="CSTRE of the isospectral pair against q",
                       description="CSV columns: q,entangled,separable; the last row is q=1.")
    common(s)
    s.set_defaults(func=cmd_isospectral)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "q", None) is not None and not args.q > 0:
        parser.error("--q must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cstre: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MatrixParseError as exc:
        print(f"cstre: input error: {exc}", file=sys.stderr)
        return EXIT_DATAERR


if __name__ == "__main__":
    sys.exit(main())
