"""Command-line interface: ``zetalab <subcommand> ...``.

Every subcommand writes a CSV table whose first line is a ``# schema=``
comment.  With ``--out`` a sibling ``<out>.manifest.json`` records the
command line, seed, code version, timestamp and a digest of all inputs;
``--json`` additionally mirrors the table to ``<out>.json`` (or prints
JSON instead of CSV when writing to stdout).

Option values are resolved as: command-line flag, then environment
(``ZETA_WORKERS`` or ``ZETALAB_<OPTION>``), then a ``key = value`` config
file given by ``--config``, then the built-in default.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import math
import os
import shlex
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from . import __version__
from .cue import tail_experiment
from .experiment import CheckpointError, load_checkpoint, run_experiment
from .moments import moment_coefficient
from .prediction import NoRootError, PredictionInput, predict

log = logging.getLogger("zetalab")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

SCHEMAS = {
    "constants": ("zetalab.constants/1", ["k", "a_k", "f_k", "C_k"]),
    "predict": (
        "zetalab.predict/1",
        ["T", "theta", "N", "sigma", "C", "Y_star", "shift", "beta", "fluct_mean",
         "predicted_mean", "predicted_std", "model_expected"],
    ),
    "zeta-results": (
        "zetalab.zeta-results/1",
        ["T", "theta", "sample_size", "empirical_mean", "empirical_std", "std_error",
         "prediction_corrected", "prediction_uncorrected", "ratio_corrected", "ratio_uncorrected"],
    ),
    "cue-tail": (
        "zetalab.cue-tail/1",
        ["n", "k", "V", "p_hat", "gaussian_tail", "ratio", "std_error", "f_k_target"],
    ),
    "ratio-table": (
        "zetalab.ratio-table/1",
        ["T", "theta", "sample_size", "empirical_mean", "std_error", "prediction_uncorrected",
         "prediction_corrected", "ratio_uncorrected", "ratio_corrected"],
    ),
    "mean-curve": (
        "zetalab.mean-curve/1",
        ["theta", "empirical_mean", "std_error", "prediction_uncorrected", "prediction_corrected"],
    ),
    "std-curve": (
        "zetalab.std-curve/1",
        ["theta", "empirical_std", "std_uncorrected", "std_corrected"],
    ),
    "coeff-curve": (
        "zetalab.coeff-curve/1",
        ["theta", "k", "a_k", "f_k", "C_k", "C_k_times_2pi2"],
    ),
    "displacement": (
        "zetalab.displacement/1",
        ["i", "theta", "max", "displacement_uncorrected", "displacement_corrected"],
    ),
}

# option -> built-in default; None means required
DEFAULTS = {
    "prime_limit": 10**6,
    "workers": 1,
    "seed": 0,
    "samples": None,
    "t": None,
    "theta": None,
    "k": None,
    "n": None,
    "point": "cumulant",
}
_INT_OPTIONS = {"prime_limit", "workers", "seed", "samples"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


# --- value parsing ----------------------------------------------------------


def parse_values(text: str) -> list[float]:
    """``"0,1,2"`` or inclusive range ``"start:stop:step"``."""
    text = str(text).strip()
    if not text:
        raise UsageError("empty value list")
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise UsageError(f"bad range {text!r}; expected start:stop:step with step > 0")
            start, stop, step = parts
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"cannot parse value list {text!r}") from None


def _int_value(text) -> int:
    try:
        f = float(text)
    except (TypeError, ValueError):
        raise UsageError(f"expected an integer, got {text!r}") from None
    if not f.is_integer():
        raise UsageError(f"expected an integer, got {text!r}")
    return int(f)


def read_config(path: str | os.PathLike) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_").lower()] = value
    return out


def resolve(args: argparse.Namespace, names: Sequence[str], env=None) -> None:
    """Fill unset options from environment, config file and defaults."""
    env = os.environ if env is None else env
    config = read_config(args.config) if args.config else {}
    for name in names:
        value = getattr(args, name, None)
        if value is None:
            env_key = "ZETA_WORKERS" if name == "workers" else f"ZETALAB_{name.upper()}"
            if env.get(env_key):
                value = env[env_key]
            elif name in config:
                value = config[name]
            else:
                value = DEFAULTS.get(name)
        if value is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")
        if name in _INT_OPTIONS:
            value = _int_value(value)
        elif name == "t":
            try:
                value = float(value)
            except ValueError:
                raise UsageError(f"cannot parse T={value!r}") from None
        setattr(args, name, value)


# --- output -----------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(kind: str, rows: list[dict]) -> str:
    schema, columns = SCHEMAS[kind]
    buf = io.StringIO()
    buf.write(f"# schema={schema}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def render_json(kind: str, rows: list[dict]) -> str:
    schema, columns = SCHEMAS[kind]
    data = {"schema": schema, "columns": columns, "rows": [{c: row[c] for c in columns} for row in rows]}
    return json.dumps(data, indent=1) + "\n"


def input_digest(params: dict, files: Sequence[str | os.PathLike] = ()) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(params, sort_keys=True, default=str).encode())
    for f in files:
        h.update(b"\0file\0")
        h.update(Path(f).read_bytes())
    return "sha256:" + h.hexdigest()


def write_output(
    kind: str,
    rows: list[dict],
    out: str | None,
    as_json: bool,
    manifest: dict | None = None,
) -> None:
    if out is None:
        sys.stdout.write(render_json(kind, rows) if as_json else render_csv(kind, rows))
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(kind, rows))
    if as_json:
        Path(f"{path}.json").write_text(render_json(kind, rows))
    if manifest is not None:
        Path(f"{path}.manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    log.info("wrote %s", path)


def make_manifest(argv: Sequence[str], seed, params: dict, files=()) -> dict:
    return {
        "command_line": shlex.join(["zetalab", *argv]),
        "seed": seed,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "input_digest": input_digest(params, files),
    }


def read_table(path: str | os.PathLike, kind: str) -> list[dict]:
    """Rows of a CSV written by ``render_csv``; floats parsed, schema checked."""
    schema, columns = SCHEMAS[kind]
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise UsageError(f"{path}: empty input")
    if lines[0].strip() != f"# schema={schema}":
        raise UsageError(f"{path}: schema mismatch, expected {schema!r}, found {lines[0].strip()!r}")
    reader = csv.DictReader(lines[1:])
    if reader.fieldnames != columns:
        raise UsageError(f"{path}: column mismatch for {schema}")
    rows = []
    for rec in reader:
        row = {}
        for c in columns:
            v = rec[c]
            if v in ("true", "false"):
                row[c] = v == "true"
            else:
                try:
                    row[c] = int(v) if c in ("sample_size", "n", "i") else float(v)
                except ValueError:
                    raise UsageError(f"{path}: bad value {v!r} in column {c}") from None
        rows.append(row)
    if not rows:
        raise UsageError(f"{path}: empty input, no data rows")
    return rows


# --- subcommands ------------------------------------------------------------


def cmd_constants(args, argv) -> None:
    resolve(args, ["k", "prime_limit"])
    rows = []
    for k in parse_values(args.k):
        mc = moment_coefficient(k, args.prime_limit)
        rows.append({"k": mc.k, "a_k": mc.a_k, "f_k": mc.f_k, "C_k": mc.c_k})
    params = {"cmd": "constants", "k": args.k, "prime_limit": args.prime_limit}
    write_output("constants", rows, args.out, args.json, make_manifest(argv, None, params))


def _prediction_row(T, theta, correct, prime_limit) -> dict:
    p = predict(PredictionInput(T, theta, correct, prime_limit))
    return {
        "T": p.T,
        "theta": p.theta,
        "N": p.n_points,
        "sigma": p.sigma,
        "C": p.c_used,
        "Y_star": p.y_star,
        "shift": p.shift,
        "beta": p.beta,
        "fluct_mean": p.fluct_mean,
        "predicted_mean": p.predicted_mean,
        "predicted_std": p.predicted_std,
        "model_expected": p.model_expected,
    }


def cmd_predict(args, argv) -> None:
    resolve(args, ["t", "theta", "prime_limit"])
    rows = [
        _prediction_row(args.t, th, not args.no_correction, args.prime_limit)
        for th in parse_values(args.theta)
    ]
    params = {"cmd": "predict", "t": args.t, "theta": args.theta,
              "correction": not args.no_correction, "prime_limit": args.prime_limit}
    write_output("predict", rows, args.out, args.json, make_manifest(argv, None, params))


def cmd_sample_zeta(args, argv) -> None:
    resolve(args, ["t", "theta", "samples", "seed", "workers", "prime_limit"])
    if args.out is None and args.checkpoint is None:
        raise UsageError("sample-zeta needs --out or --checkpoint")
    checkpoint = args.checkpoint or f"{args.out}.samples.jsonl"
    thetas = parse_values(args.theta)

    def progress(done, total):
        if done == total or done % 50 == 0:
            log.info("sample-zeta: %d/%d", done, total)

    reports = run_experiment(
        args.t, thetas, args.samples, args.seed, checkpoint_path=checkpoint,
        workers=args.workers, prime_limit=args.prime_limit, progress=progress,
    )
    rows = [r.as_dict() for r in reports]
    params = {"cmd": "sample-zeta", "t": args.t, "theta": thetas, "samples": args.samples,
              "seed": args.seed, "prime_limit": args.prime_limit}
    write_output("zeta-results", rows, args.out, args.json, make_manifest(argv, args.seed, params))


def cmd_sample_cue(args, argv) -> None:
    resolve(args, ["n", "k", "samples", "seed", "workers", "point"])
    rows = []
    for n in parse_values(args.n):
        if not float(n).is_integer():
            raise UsageError(f"--n must be integers, got {n!r}")
        for k in parse_values(args.k):
            r = tail_experiment(int(n), k, args.samples, args.seed, workers=args.workers, point=args.point)
            rows.append({c: getattr(r, c) for c in SCHEMAS["cue-tail"][1]})
    params = {"cmd": "sample-cue", "n": args.n, "k": args.k, "samples": args.samples,
              "seed": args.seed, "point": args.point}
    write_output("cue-tail", rows, args.out, args.json, make_manifest(argv, args.seed, params))


def _results_with_predictions(path, T, prime_limit) -> list[dict]:
    rows = read_table(path, "zeta-results")
    thetas = [r["theta"] for r in rows]
    if len(set(thetas)) != len(thetas):
        raise UsageError(f"{path}: duplicate theta rows")
    out = []
    for r in sorted(rows, key=lambda r: r["theta"]):
        if T is not None and r["T"] != T:
            raise UsageError(f"{path}: results are for T={r['T']!r}, report requested T={T!r}")
        cor = predict(PredictionInput(r["T"], r["theta"], True, prime_limit))
        unc = predict(PredictionInput(r["T"], r["theta"], False, prime_limit))
        out.append({**r, "pred_cor": cor, "pred_unc": unc})
    return out


def ratio_rows(joined: list[dict]) -> list[dict]:
    rows = []
    for r in joined:
        if not float(r["theta"]).is_integer():
            continue
        pc, pu = r["pred_cor"].predicted_mean, r["pred_unc"].predicted_mean
        rows.append({
            "T": r["T"],
            "theta": r["theta"],
            "sample_size": r["sample_size"],
            "empirical_mean": r["empirical_mean"],
            "std_error": r["std_error"],
            "prediction_uncorrected": pu,
            "prediction_corrected": pc,
            "ratio_uncorrected": r["empirical_mean"] / pu,
            "ratio_corrected": r["empirical_mean"] / pc,
        })
    return rows


def mean_rows(joined: list[dict]) -> list[dict]:
    return [
        {
            "theta": r["theta"],
            "empirical_mean": r["empirical_mean"],
            "std_error": r["std_error"],
            "prediction_uncorrected": r["pred_unc"].predicted_mean,
            "prediction_corrected": r["pred_cor"].predicted_mean,
        }
        for r in joined
    ]


def std_rows(joined: list[dict]) -> list[dict]:
    return [
        {
            "theta": r["theta"],
            "empirical_std": r["empirical_std"],
            "std_uncorrected": r["pred_unc"].predicted_std,
            "std_corrected": r["pred_cor"].predicted_std,
        }
        for r in joined
    ]


def _sibling(out: str | None, suffix: str) -> str | None:
    if out is None:
        return None
    p = Path(out)
    return str(p.with_name(f"{p.stem}.{suffix}{p.suffix or '.csv'}"))


def cmd_report(args, argv) -> None:
    resolve(args, ["prime_limit"])
    T = None if args.t is None else float(args.t)
    joined = _results_with_predictions(args.results, T, args.prime_limit)
    ratios = ratio_rows(joined)
    if not ratios:
        raise UsageError(f"{args.results}: missing theta rows, no integer theta present")
    params = {"cmd": "report", "t": T, "prime_limit": args.prime_limit}
    manifest = make_manifest(argv, None, params, [args.results])
    if args.out is None:
        write_output("ratio-table", ratios, None, args.json)
        return
    write_output("ratio-table", ratios, args.out, args.json, manifest)
    write_output("mean-curve", mean_rows(joined), _sibling(args.out, "mean_curve"), args.json, manifest)
    write_output("std-curve", std_rows(joined), _sibling(args.out, "std_curve"), args.json, manifest)


def coeff_curve_rows(prime_limit: int, step: float = 0.02) -> list[dict]:
    rows = []
    for i in range(int(round(3.0 / step)) + 1):
        theta = round(i * step, 12)
        k = math.sqrt(1.0 + theta)
        mc = moment_coefficient(k, prime_limit)
        rows.append({
            "theta": theta,
            "k": k,
            "a_k": mc.a_k,
            "f_k": mc.f_k,
            "C_k": mc.c_k,
            "C_k_times_2pi2": 2.0 * math.pi**2 * mc.c_k,
        })
    return rows


def displacement_rows(checkpoint, T, seed, sample_size, prime_limit) -> list[dict]:
    try:
        records = load_checkpoint(checkpoint, T, seed)
    except CheckpointError as exc:
        raise UsageError(str(exc)) from None
    if not records:
        raise UsageError(f"{checkpoint}: empty input, no samples")
    preds: dict[float, tuple[float, float]] = {}
    rows = []
    for (i, _), rec in sorted(records.items()):
        if sample_size is not None and i >= sample_size:
            continue
        th = rec["theta"]
        if th not in preds:
            preds[th] = (
                predict(PredictionInput(T, th, False, prime_limit)).predicted_mean,
                predict(PredictionInput(T, th, True, prime_limit)).predicted_mean,
            )
        pu, pc = preds[th]
        rows.append({
            "i": i,
            "theta": th,
            "max": rec["max"],
            "displacement_uncorrected": (rec["max"] - pu) / pu,
            "displacement_corrected": (rec["max"] - pc) / pc,
        })
    return rows


def cmd_figure_data(args, argv) -> None:
    resolve(args, ["prime_limit"])
    kind = args.kind
    files: list[str] = []
    if kind == "coeff_curve":
        rows = coeff_curve_rows(args.prime_limit)
        schema = "coeff-curve"
    elif kind in ("mean_curve", "std_curve"):
        if not args.results:
            raise UsageError(f"{kind} needs --results")
        joined = _results_with_predictions(args.results, args.t, args.prime_limit)
        rows = mean_rows(joined) if kind == "mean_curve" else std_rows(joined)
        schema = kind.replace("_", "-")
        files = [args.results]
    elif kind == "displacement":
        if not args.checkpoint:
            raise UsageError("displacement needs --checkpoint")
        resolve(args, ["t", "seed"])
        rows = displacement_rows(args.checkpoint, args.t, args.seed, args.samples, args.prime_limit)
        schema = "displacement"
        files = [args.checkpoint]
    else:  # argparse choices already guard this
        raise UsageError(f"unknown figure kind {kind!r}")
    params = {"cmd": "figure-data", "kind": kind, "t": args.t, "prime_limit": args.prime_limit,
              "samples": args.samples}
    write_output(schema, rows, args.out, args.json, make_manifest(argv, getattr(args, "seed", None), params, files))


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output CSV path (default: stdout, no manifest)")
    common.add_argument("--json", action="store_true", help="also write a JSON mirror")
    common.add_argument("--config", help="key = value config file")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="zetalab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"zetalab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", parents=[common], help="moment constants C_k = a_k f_k")
    p.add_argument("--k", help="k values: list a,b,c or range start:stop:step")
    p.add_argument("--prime-limit", dest="prime_limit")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("predict", parents=[common], help="predicted mean and std of the interval maximum")
    p.add_argument("--t", dest="t")
    p.add_argument("--theta")
    p.add_argument("--no-correction", action="store_true", help="use C = 1")
    p.add_argument("--prime-limit", dest="prime_limit")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sample-zeta", parents=[common], help="Monte Carlo maxima of log|zeta|")
    p.add_argument("--t", dest="t")
    p.add_argument("--theta")
    p.add_argument("--samples")
    p.add_argument("--seed")
    p.add_argument("--workers")
    p.add_argument("--checkpoint", help="JSON-lines sample file (default: <out>.samples.jsonl)")
    p.add_argument("--prime-limit", dest="prime_limit")
    p.set_defaults(func=cmd_sample_zeta)

    p = sub.add_parser("sample-cue", parents=[common], help="CUE tail ratio against f_k")
    p.add_argument("--n")
    p.add_argument("--k")
    p.add_argument("--samples")
    p.add_argument("--seed")
    p.add_argument("--workers")
    p.add_argument("--point", choices=["cumulant", "theorem"])
    p.set_defaults(func=cmd_sample_cue)

    p = sub.add_parser("report", parents=[common], help="ratio table and curve data from sample-zeta output")
    p.add_argument("results", help="CSV written by sample-zeta")
    p.add_argument("--t", dest="t")
    p.add_argument("--prime-limit", dest="prime_limit")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("figure-data", parents=[common], help="plot data files")
    p.add_argument("kind", choices=["coeff_curve", "mean_curve", "std_curve", "displacement"])
    p.add_argument("--results", help="sample-zeta CSV (mean_curve, std_curve)")
    p.add_argument("--checkpoint", help="sample-zeta checkpoint (displacement)")
    p.add_argument("--t", dest="t", type=float)
    p.add_argument("--seed")
    p.add_argument("--samples", type=int, help="use only the first S samples (displacement)")
    p.add_argument("--prime-limit", dest="prime_limit")
    p.set_defaults(func=cmd_figure_data)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"zetalab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    func: Callable = args.func
    try:
        func(args, argv)
    except (ArithmeticError, NoRootError) as exc:
        print(f"zetalab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, CheckpointError) as exc:
        print(f"zetalab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
