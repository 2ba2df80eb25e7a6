"""Command-line front end: ``cvdistill <command> [flags]``.

Every command accepts ``--config FILE`` with flat ``key = value`` lines
(``#`` starts a comment); keys are flag names without dashes, with ``-``
or ``_`` interchangeable.  Flags given on the command line win over the
file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, verify
from .entanglement import Bipartition
from .errors import CapacityError, CVDistillError, InvalidArgument
from .experiments import (
    UNBIASED,
    PipelineConfig,
    baseline_study,
    default_bracket,
    n_scaling_study,
    optimize_s,
    run_pipeline,
    sweep_s,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

SWEEP_COLUMNS = ("s", "e_before", "e_after", "p_succ", "deficit")
OPT_COLUMNS = ("s_opt", "e_opt", "p_succ", "e_before", "deficit", "boundary")
SCALING_COLUMNS = ("N", "s_opt", "e_opt", "p_succ")
BASELINE_COLUMNS = ("N", "log10_p")


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.12g}"


def _json_number(x):
    if isinstance(x, float):
        return None if math.isnan(x) else float(fmt(x))
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _json_number(obj)


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file into a dict of strings."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_").lower()] = value
    return out


def _floats(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).replace(",", " ").split()]


def _ints(text) -> list:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    return [int(x) for x in str(text).replace(",", " ").split()]


def _r1(text):
    return UNBIASED if str(text).strip().lower() == UNBIASED else float(text)


CONVERTERS = {
    "n": int,
    "r2": float,
    "r1": _r1,
    "s": _floats,
    "t": float,
    "d": int,
    "mode": int,
    "eta": float,
    "cut": _ints,
    "s_min": float,
    "s_max": float,
    "steps": int,
    "coarse_steps": int,
    "xtol": float,
    "n_list": _ints,
    "jobs": int,
    "out": str,
    "format": str,
}


def resolve(args: argparse.Namespace, defaults: dict, required=()) -> dict:
    """Merge defaults, config file and flags (in increasing precedence)."""
    values = dict(defaults)
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    for key, value in vars(args).items():
        if key in CONVERTERS and value is not None:
            values[key] = value
    unknown = set(values) - set(CONVERTERS)
    if unknown:
        raise InvalidArgument(f"unknown configuration keys: {sorted(unknown)}")
    missing = [k for k in required if values.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))
    return {k: CONVERTERS[k](v) if isinstance(v, str) and CONVERTERS[k] is not str else v for k, v in values.items()}


class UsageError(Exception):
    pass


def pipeline_config(v: dict) -> PipelineConfig:
    cut = None
    if v.get("cut") is not None:
        side_a = frozenset(v["cut"])
        cut = Bipartition(side_a, frozenset(range(v["n"])) - side_a)
    s = v.get("s", [0.0])
    return PipelineConfig(
        N=v["n"],
        r2=v["r2"],
        s=tuple(s) if isinstance(s, (list, tuple)) else s,
        T=v["t"],
        r1=v["r1"],
        detected_mode=v["mode"],
        D=v["d"],
        cut=cut,
        eta=v["eta"],
    )


PIPELINE_DEFAULTS = {"r1": UNBIASED, "t": 0.9, "d": 7, "mode": 0, "eta": 1.0, "cut": None, "jobs": 1, "out": None}


def _emit(text: str, command: str, v: dict, config_dict, out=None) -> None:
    out = out or v.get("out")
    if not out:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    manifest = {
        "command": command,
        "config": config_dict,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": [str(out)],
    }
    Path(str(out) + ".manifest.json").write_text(json.dumps(_clean(manifest), indent=2, sort_keys=True) + "\n")


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def cmd_distill(args) -> int:
    v = resolve(args, PIPELINE_DEFAULTS, required=("n", "r2", "s"))
    cfg = pipeline_config(v)
    res = run_pipeline(cfg)
    text = json.dumps(_clean(res.to_dict()), sort_keys=True) + "\n"
    _emit(text, "distill", v, cfg.to_dict())
    return EXIT_OK


def cmd_sweep(args) -> int:
    v = resolve(args, {**PIPELINE_DEFAULTS, "steps": 21}, required=("n", "r2", "s_min", "s_max"))
    cfg = pipeline_config(v)
    sweep = sweep_s(cfg, v["s_min"], v["s_max"], v["steps"], jobs=v["jobs"])
    rows = []
    for s, res in zip(sweep.s, sweep.results):
        if res is None:
            rows.append({"s": s, "e_before": math.nan, "e_after": math.nan, "p_succ": math.nan, "deficit": math.nan})
        else:
            rows.append({"s": s, "e_before": res.e_before, "e_after": res.e_after, "p_succ": res.p_succ, "deficit": res.deficit})
    _emit(_csv(SWEEP_COLUMNS, rows), "sweep", v, cfg.to_dict())
    return EXIT_OK


def cmd_optimize(args) -> int:
    v = resolve(args, {**PIPELINE_DEFAULTS, "coarse_steps": 9, "xtol": 1e-4, "format": "csv"}, required=("n", "r2"))
    cfg = pipeline_config(v)
    lo, hi = default_bracket(cfg.r2)
    bracket = (v.get("s_min", lo), v.get("s_max", hi))
    opt = optimize_s(cfg, bracket, coarse_steps=v["coarse_steps"], xtol=v["xtol"], jobs=v["jobs"])
    res = opt.result
    if v["format"] == "json":
        payload = res.to_dict()
        payload["s_opt"] = opt.s_opt
        text = json.dumps(_clean(payload), sort_keys=True) + "\n"
    else:
        row = {"s_opt": opt.s_opt, "e_opt": opt.e_opt, "p_succ": opt.p_at_opt, "e_before": res.e_before, "deficit": res.deficit, "boundary": opt.boundary}
        text = _csv(OPT_COLUMNS, [row])
    _emit(text, "optimize", v, {**cfg.to_dict(), "bracket": list(bracket)})
    return EXIT_OK


def cmd_scaling(args) -> int:
    v = resolve(args, {"t": 0.9, "d": 6, "n_list": [2, 3, 4], "jobs": 1, "out": None}, required=("r2",))
    rows = n_scaling_study(v["r2"], v["t"], v["n_list"], D=v["d"], jobs=v["jobs"])
    good = [r for r in rows if "error" not in r]
    for r in rows:
        if "error" in r:
            print(f"skipped N={r['N']}: {r['error']}", file=sys.stderr)
    _emit(_csv(SCALING_COLUMNS, good), "scaling", v, {k: v[k] for k in ("r2", "t", "d", "n_list")})
    return EXIT_OK


def cmd_baseline(args) -> int:
    v = resolve(args, {"t": 0.9, "eta": 0.1, "n_list": [2, 3, 4], "out": None}, required=("r2",))
    rows = baseline_study(v["r2"], v["t"], v["eta"], v["n_list"])
    _emit(_csv(BASELINE_COLUMNS, rows), "baseline", v, {k: v[k] for k in ("r2", "t", "eta", "n_list")})
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify.run_all()
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_FAIL


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="number of modes N")
    p.add_argument("--r2", type=float, help="squeezing r2 of the symmetric state")
    p.add_argument("--r1", type=_r1, help="r1 or 'unbiased' (default)")
    p.add_argument("--s", type=float, nargs="+", help="local squeezing, one value or one per mode")
    p.add_argument("--t", type=float, help="tap beamsplitter transmittance (default 0.9)")
    p.add_argument("--d", type=int, help="Fock cutoff per mode (default 7)")
    p.add_argument("--mode", type=int, help="photon-subtracted mode (default 0)")
    p.add_argument("--cut", type=int, nargs="+", help="modes on side A of the log-neg cut (default: subtracted mode)")
    p.add_argument("--eta", type=float, help="detector efficiency (default 1)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--out", help="write output here and a .manifest.json beside it")
    p.add_argument("--jobs", type=int, help="worker processes for grid evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvdistill", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distill", help="run one pipeline and print JSON")
    _add_pipeline_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("sweep", help="equal-s sweep, CSV output")
    _add_pipeline_flags(p)
    _add_common(p)
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--steps", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="find s_opt, CSV (or JSON) output")
    _add_pipeline_flags(p)
    _add_common(p)
    p.add_argument("--s-min", type=float, help="bracket start (default 0)")
    p.add_argument("--s-max", type=float, help="bracket end (default 4*r2)")
    p.add_argument("--coarse-steps", type=int)
    p.add_argument("--xtol", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("scaling", help="one-subtraction probability at s_opt versus N")
    _add_common(p)
    p.add_argument("--r2", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--n-list", type=int, nargs="+")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("baseline", help="N-fold subtraction probability versus N")
    _add_common(p)
    p.add_argument("--r2", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--n-list", type=int, nargs="+")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("verify", help="run the oracle-equivalence checks")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InvalidArgument as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CVDistillError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
