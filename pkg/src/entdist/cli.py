"""Command-line front end.

Reports are JSON lines (or CSV) with floats at 12 significant digits.
Exit codes: 0 success, 2 input error, 3 capability error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correlations import (
    BoundReport,
    MeasurementBasis,
    OptimizerOpts,
    SeparableEnsemble,
    discord,
    ree,
)
from .infotheory import mutual_information, von_neumann_entropy
from .qstate import CapabilityError, CutSpec, DensityMatrix, PureState, StateError

EXIT_OK, EXIT_INPUT, EXIT_CAPABILITY, EXIT_FAIL = 0, 2, 3, 4
SIG_DIGITS = 12
OK_STATUSES = ("certified", "supported")
# lighter per-suite counts when every suite runs in one go
ALL_N = {"theorem1": 500, "eq2": 20, "eq4": 200, "eq6": 10, "eq7": 500,
         "lemma1": 4, "theorem3": 1000, "theorem4": 6}


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    fmt: str = "json"
    out: str | None = None
    seed: int = 42
    restarts: int = 32
    grid: int = 64
    tol: float = 1e-9
    deterministic: bool = False

    def __post_init__(self):
        if self.fmt not in ("json", "csv"):
            raise InputError(f"unknown format {self.fmt!r}")
        if self.out is not None and not self.out:
            raise InputError("--out needs a path")
        if self.restarts < 1 or self.grid < 2 or self.tol <= 0:
            raise InputError("--restarts >= 1, --grid >= 2 and --tol > 0 required")

    @property
    def opts(self) -> OptimizerOpts:
        return OptimizerOpts(seed=self.seed, restarts=self.restarts, grid=self.grid, tol=self.tol)


# formatting -----------------------------------------------------------------


def fmt_num(x):
    """Round floats to 12 significant digits; non-finite values become strings."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        if x == 0.0:
            return 0.0
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {k: fmt_num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt_num(v) for v in x]
    if isinstance(x, np.ndarray):
        return fmt_num(x.tolist())
    if isinstance(x, complex):
        return [fmt_num(x.real), fmt_num(x.imag)]
    return x


def _complex_array(a) -> dict:
    a = np.asarray(a)
    return {"re": fmt_num(a.real), "im": fmt_num(a.imag)}


def certificate_json(rep: BoundReport):
    """JSON-friendly certificate payload."""
    cert = rep.certificate
    if cert is None:
        return None
    out = {"kind": cert.kind}
    p = cert.payload
    if isinstance(p, MeasurementBasis):
        out["subsystem"] = p.subsystem
        out["vectors"] = _complex_array(p.vectors)
        if p.vectors.shape == (2, 2):
            b0 = p.vectors[:, 0]
            out["theta"] = fmt_num(float(np.arccos(min(1.0, abs(b0[0])))))
            out["phi"] = fmt_num(float(np.angle(b0[1]) - np.angle(b0[0])) % (2 * math.pi))
    elif isinstance(p, SeparableEnsemble):
        out["weights"] = fmt_num(p.weights)
        out["left_labels"], out["right_labels"] = list(p.left_labels), list(p.right_labels)
        out["left"] = _complex_array(p.left)
        out["right"] = _complex_array(p.right)
    elif isinstance(p, dict) and "parts" in p:
        out["parts"] = [{"p": fmt_num(q), "value": fmt_num(r.value), "direction": r.direction,
                         "certificate": certificate_json(r)} for q, r in p["parts"]]
    return out


class Writer:
    """Single writer for JSON lines or CSV rows."""

    def __init__(self, cfg: RunConfig, stream):
        self.cfg = cfg
        self.stream = stream
        self._csv = None
        self._fields = None

    def emit(self, row: dict):
        row = fmt_num(row)
        if self.cfg.fmt == "json":
            self.stream.write(json.dumps(row, sort_keys=False) + "\n")
        else:
            flat = {k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in row.items()}
            if self._csv is None or list(flat) != self._fields:
                self._fields = list(flat)
                self._csv = csv.DictWriter(self.stream, fieldnames=self._fields, lineterminator="\n")
                self._csv.writeheader()
            self._csv.writerow(flat)
        self.stream.flush()


def _header(cfg: RunConfig, **extra) -> dict:
    row = {"type": "header", "command": cfg.command, "seed": cfg.seed, "restarts": cfg.restarts,
           "grid": cfg.grid, "tol": cfg.tol}
    row.update(extra)
    if not cfg.deterministic:
        row["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return row


def _record_row(rec, **extra) -> dict:
    row = {"type": "record"}
    row.update(extra)
    row.update(rec.to_dict())
    return row


# state loading ----------------------------------------------------------------


def load_state(path: str) -> DensityMatrix:
    """Read a density-matrix file, or a pure state given by an ``amplitudes`` field."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    if "amplitudes" in obj:
        amp = obj["amplitudes"]
        re = np.asarray(amp.get("re") if isinstance(amp, dict) else amp, dtype=float)
        im = np.asarray(amp.get("im", np.zeros_like(re)) if isinstance(amp, dict) else np.zeros_like(re),
                        dtype=float)
        for key in ("dims", "labels"):
            if key not in obj:
                raise InputError(f"{path}: missing field {key!r}")
        return PureState(re + 1j * im, obj["dims"], obj["labels"]).projector()
    return DensityMatrix.from_dict(obj, repair=bool(obj.get("repair", False)))


# subcommands --------------------------------------------------------------------


def _bound_row(quantity, rep: BoundReport, with_cert: bool, **extra) -> dict:
    row = {"type": "measure", "quantity": quantity}
    row.update(extra)
    row.update(value=rep.value, direction=rep.direction, error_estimate=rep.error_estimate,
               certificate_kind=rep.certificate_kind)
    if with_cert:
        row["certificate"] = certificate_json(rep)
    return row


def cmd_measures(args, cfg: RunConfig, w: Writer) -> int:
    rho = load_state(args.state)
    if args.cut:
        cut = CutSpec.parse(args.cut).check(rho)
    elif len(rho.labels) == 2:
        cut = CutSpec({rho.labels[0]}, {rho.labels[1]})
    else:
        raise InputError("--cut is required for more than two subsystems")
    measured = args.measured
    if measured is None:
        side = cut.right if len(cut.right) == 1 else cut.left
        if len(side) != 1:
            raise InputError("--measured is required when neither side of the cut is a single subsystem")
        measured = next(iter(side))
    rho.index(measured)
    w.emit(_header(cfg, state=args.state, cut=str(cut), measured=measured))
    w.emit({"type": "measure", "quantity": "S", "value": von_neumann_entropy(rho), "direction": "exact"})
    w.emit({"type": "measure", "quantity": "I", "cut": str(cut),
            "value": mutual_information(rho, cut), "direction": "exact"})
    rest = "".join(x for x in rho.labels if x != measured)
    w.emit(_bound_row("D", discord(rho, measured, cfg.opts), args.certificate,
                      measured=measured, label=f"D_{rest}|{measured}"))
    w.emit(_bound_row("E", ree(rho, cut, cfg.opts), args.certificate, cut=str(cut)))
    return EXIT_OK


def _emit_report(w: Writer, rep) -> bool:
    ok = True
    for rec in rep.records:
        w.emit(_record_row(rec, example=rep.name))
        ok &= rec.status in OK_STATUSES
    w.emit({"type": "values", "example": rep.name, **rep.params, **rep.values})
    return ok


def cmd_reproduce(args, cfg: RunConfig, w: Writer) -> int:
    from .examples import Example2Params, Example3Params, example1_build, example2_run, example3_run

    ex = args.example
    w.emit(_header(cfg, example=ex))
    if ex in ("cubitt", "2"):
        p = 1.0 if ex == "cubitt" else (0.5 if args.p is None else args.p)
        _, rep = example2_run(Example2Params(p), cfg.opts)
    elif ex == "3":
        params = Example3Params(0.01 if args.u is None else args.u, args.s)
        _, rep = example3_run(params, cfg.opts)
    elif ex == "1":
        if not args.psi:
            raise InputError("reproduce 1 needs --psi STATE_FILE holding a pure three-party state")
        rho = load_state(args.psi)
        w_, v_ = np.linalg.eigh(rho.data)
        if not rho.is_pure():
            raise InputError(f"{args.psi}: example 1 needs a pure state")
        _, rep = example1_build(PureState.normalized(v_[:, -1], rho.dims, rho.labels))
    else:
        raise InputError(f"unknown example {ex!r}")
    ok = _emit_report(w, rep)
    return EXIT_OK if ok else EXIT_FAIL


def parse_points(spec: str) -> list[float]:
    """``lo:hi:n`` (inclusive linspace) or a comma list."""
    spec = (spec or "").strip()
    if not spec:
        raise InputError("empty grid")
    try:
        if ":" in spec:
            lo, hi, n = spec.split(":")
            n = int(n)
            if n < 1:
                raise InputError("grid needs at least one point")
            return [float(x) for x in np.linspace(float(lo), float(hi), n)]
        pts = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad grid spec {spec!r}; use lo:hi:n or a comma list") from None
    if not pts:
        raise InputError("empty grid")
    return pts


def cmd_sweep(args, cfg: RunConfig, w: Writer) -> int:
    from .examples import example2_sweep, example3_sweep, npt_transition

    if args.example == "3":
        pts = parse_points("0.001:0.13:50" if args.points is None else args.points)
        rows = example3_sweep(pts)
        for r in rows:
            w.emit(r)
        w.emit({"transition_u": npt_transition(rows)})
    else:
        pts = parse_points("0,0.25,0.5,0.75,1" if args.points is None else args.points)
        for r in example2_sweep(pts, cfg.opts):
            w.emit(r)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig, w: Writer) -> int:
    from .protocol import SUITES, sweep

    suites = SUITES if args.suite == "all" else (args.suite,)
    w.emit(_header(cfg, suite=args.suite))
    failed = False
    for suite in suites:
        n = args.n if args.n is not None else (ALL_N[suite] if args.suite == "all" else None)
        trials = args.trials if args.trials is not None else (n if suite == "theorem3" else None)
        counts = {s: 0 for s in ("certified", "supported", "violated", "unsupported")}
        worst, total, start = math.inf, 0, time.perf_counter()
        for i, rec in sweep(suite, n if suite != "theorem3" else None, cfg.seed, cfg.opts, trials):
            w.emit(_record_row(rec, suite=suite, index=i))
            counts[rec.status] += 1
            worst = min(worst, rec.slack)
            total += 1
        summary = {"type": "summary", "suite": suite, "records": total,
                   "pass": counts["certified"], **counts, "worst_slack": worst}
        if not cfg.deterministic:
            summary["elapsed_s"] = time.perf_counter() - start
        w.emit(summary)
        failed |= counts["violated"] > 0 or counts["unsupported"] > 0
    return EXIT_FAIL if failed else EXIT_OK


# entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--restarts", type=int, default=32, help="optimizer restarts")
    common.add_argument("--grid", type=int, default=64, help="discord angle grid per axis")
    common.add_argument("--tol", type=float, default=1e-9, help="optimizer tolerance")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--deterministic", action="store_true",
                        help="omit timestamps and timings for byte-identical reports")

    ap = argparse.ArgumentParser(prog="entdist", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measures", parents=[common], help="entropy, mutual information, discord, REE")
    m.add_argument("state", help="state file (JSON)")
    m.add_argument("--cut", help="bipartition such as A:BC")
    m.add_argument("--measured", help="subsystem measured for discord")
    m.add_argument("--certificate", action="store_true", help="include certificate payloads")

    r = sub.add_parser("reproduce", parents=[common], help="run a worked example end to end")
    r.add_argument("example", choices=("1", "2", "3", "cubitt"))
    r.add_argument("--p", type=float)
    r.add_argument("--u", type=float)
    r.add_argument("--s", type=float)
    r.add_argument("--psi", help="pure three-party state file for example 1")

    s = sub.add_parser("sweep", parents=[common], help="parameter scan of example 2 or 3")
    s.add_argument("example", choices=("2", "3"))
    s.add_argument("--points", help="lo:hi:n or comma list (p for example 2, u for example 3)")

    v = sub.add_parser("verify", parents=[common], help="random-instance verification sweeps")
    v.add_argument("suite", choices=("theorem1", "eq2", "eq4", "eq6", "eq7", "lemma1",
                                     "theorem3", "theorem4", "all"))
    v.add_argument("--n", type=int, default=None, help="instances per suite")
    v.add_argument("--trials", type=int, default=None, help="trials for the theorem3 search")
    return ap


COMMANDS = {"measures": cmd_measures, "reproduce": cmd_reproduce, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.fmt, args.out, args.seed, args.restarts, args.grid,
                        args.tol, args.deterministic)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    buf = io.StringIO() if cfg.out else sys.stdout
    try:
        code = COMMANDS[args.command](args, cfg, Writer(cfg, buf))
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (InputError, StateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if cfg.out:
        Path(cfg.out).write_text(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
