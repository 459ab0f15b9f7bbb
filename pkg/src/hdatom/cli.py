"""Command-line front end.

Every subcommand writes one JSON document (default) or a CSV table. A JSON
document has three keys: ``manifest`` (command, parameters, tool version, UTC
timestamp), ``payload`` (the result) and ``payload_sha256`` (hash of the
canonical payload encoding, which excludes the timestamp).

Exit codes: 0 success, 2 invalid arguments or configuration, 3 numerical
failure, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import enum
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from . import d4, frobenius, specfun, variational
from .core import make_atom_config
from .eigensolve import Grid, Spacing, collapse_study, spectrum
from .errors import ConfigError, HDAtomError, InvariantViolation, NumericalError
from .potentials import PotentialKind, PotentialSpec
from .reduction import reduce, reduced_l

SURVEY_COLUMNS = [
    "d",
    "l",
    "Z",
    "regime",
    "frobenius_verdict",
    "collapse_classification",
    "classical_classification",
]
SURVEY_CUTOFFS = [1e-4 * 2.0**-k for k in range(5)]

COLLAPSE_NOTE = (
    "Dirichlet wall at each cutoff; a ground energy falling without bound as the "
    "cutoff shrinks is consistent with a spectrum unbounded below, not a proof of it."
)
SCALING_NOTE = (
    "E(s) = A/s^2 - B/s^p is the standard dilation argument for a fixed trial shape."
)


@dataclasses.dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict
    tool_version: str
    timestamp: str


def _plain(obj):
    """Convert results to JSON-ready values; non-finite floats become null."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def canonical(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def payload_sha256(payload) -> str:
    return hashlib.sha256(canonical(payload).encode("utf-8")).hexdigest()


# --- subcommands ------------------------------------------------------------


def _potential(args) -> PotentialSpec:
    kind = PotentialKind(args.potential)
    if kind is PotentialKind.EXPLICIT_POWER:
        if args.coupling is None or args.power is None:
            raise ConfigError("ExplicitPower needs --coupling and --power")
        return PotentialSpec.explicit(args.coupling, args.power)
    if args.power is not None:
        raise ConfigError("--power is only valid with --potential ExplicitPower")
    return PotentialSpec(kind, coupling_override=args.coupling)


def _problem_dict(problem) -> dict:
    return _plain(problem)


def cmd_spectrum(args) -> tuple[dict, list[dict]]:
    config = make_atom_config(args.d, args.Z, args.l, _potential(args))
    grid = Grid(args.r_min, args.r_max, args.n, Spacing(args.spacing))
    res = spectrum(config, grid, args.k, refine=not args.no_refine)
    payload = {
        "problem": _problem_dict(reduce(config)),
        "grid": _plain(grid),
        "eigenvalues": _plain(res.eigenvalues),
        "node_counts": _plain(res.node_counts),
        "converged": res.converged,
        "richardson_estimate": _plain(res.richardson_estimate),
        "refined_eigenvalues": _plain(res.refined_eigenvalues),
        "numerov_ground": _plain(res.numerov_ground),
        "numerov_agrees": res.numerov_agrees,
    }
    if args.wavefunctions:
        payload["r"] = _plain(grid.r)
        payload["wavefunctions"] = _plain(res.wavefunctions)
    rows = []
    for i, e in enumerate(res.eigenvalues):
        rows.append(
            {
                "index": i,
                "eigenvalue": e,
                "node_count": res.node_counts[i],
                "richardson_estimate": None if res.richardson_estimate is None else res.richardson_estimate[i],
            }
        )
    return payload, rows


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_collapse(args) -> tuple[dict, list[dict]]:
    config = make_atom_config(args.d, args.Z, args.l, _potential(args))
    study = collapse_study(config, _float_list(args.cutoffs), args.grid_n, args.r_max, Spacing(args.spacing))
    payload = _plain(study)
    payload["problem"] = _problem_dict(reduce(config))
    payload["note"] = COLLAPSE_NOTE
    rows = [
        {"cutoff": a, "ground_energy": e, "lowest_eigenvalue": raw}
        for a, e, raw in zip(study.cutoffs, study.ground_energies, study.lowest_eigenvalues)
    ]
    return payload, rows


def cmd_frobenius(args) -> tuple[dict, list[dict]]:
    if args.d == 4:
        if args.nu_sq is None:
            raise ConfigError("d = 4 needs --nu-sq (the series family with zeta = -nu^2)")
        ode = frobenius.SeriesODE.d4_negative_zeta(Fraction(args.nu_sq))
    else:
        ode = frobenius.SeriesODE.for_atom(
            args.d, args.l, Fraction(args.eta), Fraction(args.lam), potential_power=args.potential_power
        )
    s_values = [Fraction(args.s)] if args.s is not None else None
    reports = frobenius.sweep(ode, args.N, s_values)
    verdict = frobenius.sweep_verdict(reports)
    first = reports[0]
    payload = {
        "d": args.d,
        "l": args.l,
        "N": args.N,
        "verdict": verdict,
        "indicial_roots": frobenius.indicial_roots(ode),
        "forced_zero_prefix": list(range(first.forced_zero_prefix)),
        "printed_forced_prefix": list(range(frobenius.printed_forced_prefix(args.d))),
        "paper_prefix_match": first.printed_prefix_match,
        "per_exponent": [
            {
                "s": r.s,
                "verdict": r.verdict,
                "forced_zero_prefix": r.forced_zero_prefix,
                "free_parameters": r.free_parameters,
                "all_zero": r.all_zero,
            }
            for r in reports
        ],
    }
    if args.d > 4 and ode.potential_power in (None, args.d - 2):
        cmp = frobenius.compare_with_printed_recursion(first, args.d)
        payload["recursion"] = {
            "prefix_match": cmp.prefix_match,
            "recursion_match": cmp.recursion_match,
            "index_offset": cmp.index_offset,
            "mismatch_count": len(cmp.recursion_mismatches),
        }
    payload = _plain(payload)
    rows = payload["per_exponent"]
    return payload, rows


def cmd_zeta(args) -> tuple[dict, list[dict]]:
    payload = _plain(d4.zeta(args.l, args.Z, tol=args.tol))
    return payload, [payload]


def cmd_bessel(args) -> tuple[dict, list[dict]]:
    kinds = ["I", "K"] if args.kind == "both" else [args.kind]
    rows = []
    for x in _float_list(args.x):
        for kind in kinds:
            fn = specfun.bessel_i if kind == "I" else specfun.bessel_k
            ev = fn(args.nu, x)
            row = {"kind": kind, **_plain(ev)}
            rows.append(row)
    payload = {"nu": args.nu, "values": rows}
    if args.kind == "both":
        payload["wronskian"] = [
            {"argument": x, "value": specfun.wronskian(args.nu, x)} for x in _float_list(args.x)
        ]
    return _plain(payload), rows


def cmd_variational(args) -> tuple[dict, list[dict]]:
    curve = variational.scaling_energy(args.d, args.trial, args.kappa, args.l, args.power)
    payload = _plain(curve)
    payload["note"] = SCALING_NOTE
    row = {k: v for k, v in payload.items() if k not in ("infimum_class", "note")}
    row["infimum_kind"] = payload["infimum_class"]["kind"]
    row["s_star"] = payload["infimum_class"]["s_star"]
    return payload, [row]


def cmd_classical(args) -> tuple[dict, list[dict]]:
    payload = _plain(variational.classical_equilibrium(args.d, args.L, args.kappa))
    return payload, [payload]


def _parse_range(text: str) -> list[int]:
    """'3..7' -> [3, ..., 7]; '0,2' -> [0, 2]; '4' -> [4]."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ConfigError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    return out


def _rational(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**6)


def survey_cell(d: int, l: int, Z: float, N: int = 40, grid_n: int = 2000, r_max: float = 1e4) -> dict:
    """One row of the survey table."""
    config = make_atom_config(d, Z, l)
    kappa = config.kappa
    regime = None
    verdict = None
    if d == 4:
        report = d4.zeta(l, Z)
        regime = report.regime.value
        if report.zeta < 0:
            ode = frobenius.SeriesODE.d4_negative_zeta(_rational(-report.zeta))
            verdict = frobenius.sweep_verdict(frobenius.sweep(ode, N)).value
    elif d > 4:
        ode = frobenius.SeriesODE.for_atom(d, l, _rational(kappa), 1)
        verdict = frobenius.sweep_verdict(frobenius.sweep(ode, N)).value
    study = collapse_study(config, SURVEY_CUTOFFS, grid_n, r_max, Spacing.LOG)
    # Langer-corrected angular momentum of the reduced problem
    L = reduced_l(d, l) + 0.5
    classical = variational.classical_equilibrium(d, L, kappa)
    return {
        "d": d,
        "l": l,
        "Z": float(Z),
        "regime": regime,
        "frobenius_verdict": verdict,
        "collapse_classification": study.classification.value,
        "classical_classification": classical.classification.value,
    }


def _workers() -> int:
    raw = os.environ.get("HDATOM_THREADS", "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"HDATOM_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ConfigError("HDATOM_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _cell(args):
    return survey_cell(*args)


def cmd_survey(args) -> tuple[dict, list[dict]]:
    cells = sorted(
        (d, l, Z, args.N, args.grid_n, args.r_max)
        for d in _parse_range(args.d)
        for l in _parse_range(args.l)
        for Z in _float_list(args.Z)
    )
    for d, l, Z, *_ in cells:
        make_atom_config(d, Z, l)
    workers = min(_workers(), len(cells))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cell, cells))
    else:
        rows = [_cell(c) for c in cells]
    payload = {
        "columns": SURVEY_COLUMNS,
        "rows": rows,
        "cutoffs": SURVEY_CUTOFFS,
        "note": COLLAPSE_NOTE,
    }
    return payload, rows


# --- argument parsing -------------------------------------------------------


def _add_potential(p: argparse.ArgumentParser) -> None:
    p.add_argument("--potential", default="GaussLaw", choices=[k.value for k in PotentialKind])
    p.add_argument("--coupling", type=float, default=None, help="kappa override")
    p.add_argument("--power", type=float, default=None, help="p, ExplicitPower only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdatom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", default=None, help="write to FILE instead of stdout")
        p.set_defaults(handler=fn)
        return p

    p = add("spectrum", cmd_spectrum, "lowest bound states on a finite grid")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--Z", type=float, default=1.0)
    p.add_argument("--l", type=int, default=0)
    _add_potential(p)
    p.add_argument("--r-min", type=float, default=1e-4)
    p.add_argument("--r-max", type=float, default=200.0)
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--spacing", choices=[s.value for s in Spacing], default="uniform")
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--wavefunctions", action="store_true", help="include f samples")

    p = add("collapse", cmd_collapse, "ground energy against the inner cutoff")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--Z", type=float, default=1.0)
    p.add_argument("--l", type=int, default=0)
    _add_potential(p)
    p.add_argument("--cutoffs", default="0.1,0.05,0.025,0.0125,0.00625", help="comma list, descending")
    p.add_argument("--grid-n", type=int, default=4000)
    p.add_argument("--r-max", type=float, default=1e4)
    p.add_argument("--spacing", choices=[s.value for s in Spacing], default="log")

    p = add("frobenius", cmd_frobenius, "exact series analysis at the origin")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--eta", default="1", help="positive rational coupling")
    p.add_argument("--lam", default="1", help="positive rational decay constant")
    p.add_argument("--s", default=None, help="single exponent; default sweeps candidates")
    p.add_argument("--nu-sq", default=None, help="d = 4 only: nu^2 = -zeta")
    p.add_argument("--potential-power", type=int, default=None, help="control case, e.g. 1")

    p = add("zeta", cmd_zeta, "d = 4 regime parameter")
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--Z", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("bessel", cmd_bessel, "modified Bessel functions I and K")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--x", required=True, help="comma list of arguments")
    p.add_argument("--kind", choices=["I", "K", "both"], default="both")

    p = add("variational", cmd_variational, "scaling curve of a trial family")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trial", choices=[t.value for t in variational.Trial], default="Exponential")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--power", type=float, default=None)

    p = add("classical", cmd_classical, "circular-orbit equilibrium")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--kappa", type=float, default=1.0)

    p = add("survey", cmd_survey, "verdict table over d x l x Z")
    p.add_argument("--d", default="3..7")
    p.add_argument("--l", default="0..1")
    p.add_argument("--Z", default="1")
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--grid-n", type=int, default=2000)
    p.add_argument("--r-max", type=float, default=1e4)
    return parser


def _parameters(args) -> dict:
    skip = {"handler", "format", "out", "command"}
    return {k: _plain(v) for k, v in sorted(vars(args).items()) if k not in skip}


def render_json(command: str, parameters: dict, payload) -> str:
    manifest = RunManifest(
        command=command,
        parameters=parameters,
        tool_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    doc = {
        "manifest": dataclasses.asdict(manifest),
        "payload": payload,
        "payload_sha256": payload_sha256(payload),
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        columns = list(rows[0].keys())
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in _plain(row).items()})
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, rows = args.handler(args)
        payload = _plain(payload)
        if args.format == "csv":
            text = render_csv(rows)
        else:
            text = render_json(args.command, _parameters(args), payload)
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except ConfigError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ZeroDivisionError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except HDAtomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
