"""Command-line front end.

Commands::

    toricmle models list
    toricmle mle --model S3 --data 3,5,7,11 --method both
    toricmle mldegree --model S5 --trials 5 --seed 42
    toricmle verify --model S3 --samples 100 --seed 7

Output is canonical JSON by default (sorted keys, floats with 17
significant digits) so identical inputs give identical bytes.  Set
``TORICMLE_FORMAT=table`` or pass ``--format table`` for a readable layout.
Random data come from numpy's PCG64 generator seeded with ``--seed``.

Exit status: 0 on success, 2 for usage errors (bad flags, unknown model,
malformed data), 3 when a computation fails; in that case a JSON
diagnostic is written to stderr.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .birch import SolverOptions, solve_birch
from .closedform import SUPPORTED_MODELS, audit_paper_polynomials, mle_closed_form
from .errors import DomainError, MalformedInputError, ToricMLEError
from .lattice import catalog, lookup
from .mldegree import ml_degree
from .model import DataVector

__all__ = ["RunConfig", "main", "run", "canonical_json", "build_parser"]

FORMAT_ENV = "TORICMLE_FORMAT"
EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    data: list | None = None
    method: str = "birch"
    trials: int = 3
    seed: int = 0
    samples: int = 100
    output_format: str = "json"
    tol: float = 1e-12
    extra: dict = field(default_factory=dict)


# output ----------------------------------------------------------------

def _canon(obj):
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(json.dumps(k) + ":" + _canon(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _canon(obj.tolist())
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return "null" if not math.isfinite(x) else "%.17g" % x
    if isinstance(obj, complex):
        return _canon([obj.real, obj.imag])
    return json.dumps(str(obj))


def canonical_json(obj):
    """Deterministic JSON text: sorted keys, no spaces, ``%.17g`` floats, non-finite as null."""
    return _canon(obj)


def _table(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.append(_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        if obj and all(isinstance(r, dict) for r in obj):
            keys = sorted({k for r in obj for k in r})
            cells = [[_scalar(r.get(k, "")) for k in keys] for r in obj]
            widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
            lines.append(pad + "  ".join(k.ljust(w) for k, w in zip(keys, widths)))
            for c in cells:
                lines.append(pad + "  ".join(x.ljust(w) for x, w in zip(c, widths)))
        else:
            lines.extend(f"{pad}- {_scalar(v)}" for v in obj)
    else:
        lines.append(pad + _scalar(obj))
    return "\n".join(lines)


def _flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return canonical_json(v)
    return str(v)


def _emit(payload, fmt, stream):
    text = canonical_json(payload) if fmt == "json" else _table(payload)
    stream.write(text + "\n")


# commands --------------------------------------------------------------

def _models_list(cfg):
    rows = []
    for e in catalog():
        rows.append({
            "label": e.label,
            "model": e.model_label or "",
            "degree": e.degree,
            "singularities": str(e.singularities),
            "ideal": list(e.ideal),
            "ml_degree": e.ml_degree,
        })
    return rows


def _resolve_model(label):
    return lookup(label).model()


def _mle(cfg):
    model = _resolve_model(cfg.model)
    u = DataVector(cfg.data)
    if len(u) != model.m:
        raise UsageError(f"model {model.label} needs {model.m} counts, got {len(u)}")
    out = {"model": model.label, "data": list(u)}
    results = {}
    if cfg.method in ("birch", "both"):
        results["birch"] = solve_birch(model, u, SolverOptions(tol=cfg.tol, seed=cfg.seed))
    if cfg.method in ("closed-form", "both"):
        results["closed_form"] = mle_closed_form(model, u)
    for key, res in results.items():
        out[key] = res.to_dict()
    if len(results) == 2:
        out["agreement"] = float(np.max(np.abs(results["birch"].p_hat - results["closed_form"].p_hat)))
    return out


def _mldegree(cfg):
    model = _resolve_model(cfg.model)
    report = ml_degree(model, trials=cfg.trials, seed=cfg.seed)
    out = report.to_dict()
    entry = lookup(cfg.model)
    out["expected"] = entry.ml_degree
    return out


def _verify(cfg):
    entry = lookup(cfg.model)
    if entry.model_label not in SUPPORTED_MODELS:
        raise UsageError(f"verify supports {', '.join(SUPPORTED_MODELS)}; got {cfg.model!r}")
    model = entry.model()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    deltas, roundtrips, moment, variety = [], [], [], []
    sources = {}
    displays = {}
    first_reports = {}
    for _ in range(cfg.samples):
        u = [int(x) for x in rng.integers(1, 1001, size=model.m)]
        b = solve_birch(model, u, SolverOptions(tol=cfg.tol, seed=cfg.seed))
        c = mle_closed_form(model, u)
        deltas.append(float(np.max(np.abs(b.p_hat - c.p_hat))))
        roundtrips.append(c.extra["theta_roundtrip"])
        moment.append(b.moment_residual)
        variety.append(b.variety_residual)
        sources[c.extra["polynomial_source"]] = sources.get(c.extra["polynomial_source"], 0) + 1
        for a in audit_paper_polynomials(model, u, b.p_hat):
            stat = displays.setdefault(a["display"], {"holds": 0, "fails": 0, "max_derived_residual": 0.0})
            stat["holds" if a["holds"] else "fails"] += 1
            stat["max_derived_residual"] = max(stat["max_derived_residual"], a["derived_residual"])
            if a["discrepancy"] and a["display"] not in first_reports:
                first_reports[a["display"]] = a["discrepancy"]
    return {
        "model": model.label,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "max_abs_delta_p": max(deltas),
        "mean_abs_delta_p": float(np.mean(deltas)),
        "max_theta_roundtrip": max(roundtrips),
        "max_birch_moment_residual": max(moment),
        "max_birch_variety_residual": max(variety),
        "polynomial_source_counts": sources,
        "printed_polynomials": displays,
        "discrepancy_reports": [first_reports[k] for k in sorted(first_reports)],
    }


# parsing ---------------------------------------------------------------

def _parse_counts(text):
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"--data must be comma-separated integers, got {text!r}") from None


def _read_csv(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        return [int(ln) for ln in lines]
    except ValueError:
        raise UsageError(f"{path}: expected one integer per line") from None


def build_parser():
    default_fmt = os.environ.get(FORMAT_ENV, "json")
    if default_fmt not in ("json", "table"):
        default_fmt = "json"
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default=default_fmt,
                        help=f"output format (default from ${FORMAT_ENV}, else json)")
    parser = argparse.ArgumentParser(prog="toricmle", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    models = sub.add_parser("models", help="browse the polygon catalog", parents=[common])
    models.add_argument("action", choices=("list",))

    mle = sub.add_parser("mle", help="maximum likelihood estimate", parents=[common])
    mle.add_argument("--model", required=True)
    src = mle.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="comma-separated counts")
    src.add_argument("--csv", help="file with one count per line")
    mle.add_argument("--method", choices=("birch", "closed-form", "both"), default="birch")
    mle.add_argument("--tol", type=float, default=1e-12)
    mle.add_argument("--seed", type=int, default=0, help="seed for Newton restarts")

    mld = sub.add_parser("mldegree", help="ML degree by elimination", parents=[common])
    mld.add_argument("--model", required=True)
    mld.add_argument("--trials", type=int, default=3)
    mld.add_argument("--seed", type=int, default=0)

    ver = sub.add_parser("verify", help="closed form against Newton on random data", parents=[common])
    ver.add_argument("--model", required=True)
    ver.add_argument("--samples", type=int, default=100)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--tol", type=float, default=1e-12)
    return parser


def _config(args):
    cfg = RunConfig(command=args.command, output_format=args.format)
    cfg.model = getattr(args, "model", None)
    if args.command == "mle":
        cfg.data = _parse_counts(args.data) if args.data is not None else _read_csv(args.csv)
        cfg.method = args.method
        cfg.tol = args.tol
        cfg.seed = args.seed
    elif args.command == "mldegree":
        if args.trials < 1:
            raise UsageError("--trials must be at least 1")
        cfg.trials, cfg.seed = args.trials, args.seed
    elif args.command == "verify":
        if args.samples < 1:
            raise UsageError("--samples must be at least 1")
        cfg.samples, cfg.seed, cfg.tol = args.samples, args.seed, args.tol
    if cfg.model is not None:
        lookup(cfg.model)
    return cfg


_COMMANDS = {"models": _models_list, "mle": _mle, "mldegree": _mldegree, "verify": _verify}


def run(cfg: RunConfig):
    """Execute a configuration and return the JSON-ready payload."""
    return _COMMANDS[cfg.command](cfg)


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = _config(args)
        payload = run(cfg)
    except (UsageError, MalformedInputError, DomainError) as exc:
        stderr.write(f"toricmle: error: {exc}\n")
        return EXIT_USAGE
    except ToricMLEError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("residual", "last_iterate", "details"):
            if hasattr(exc, attr):
                diag[attr] = getattr(exc, attr)
        stderr.write(canonical_json(diag) + "\n")
        return EXIT_COMPUTE
    _emit(payload, cfg.output_format, stdout)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
