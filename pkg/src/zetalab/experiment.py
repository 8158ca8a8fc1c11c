"""Monte Carlo experiment on the maximum of log|zeta| in short intervals.

Heights tau_i are drawn uniformly on [T, 2T] from a stream keyed by
(seed, i).  For each tau_i the grid maximum is taken for every requested
theta (the grids are nested, so one Riemann-Siegel pass serves all).
Completed samples are appended to a JSON-lines checkpoint by the parent
process and a rerun with the same checkpoint skips them.
"""

from __future__ import annotations

import json
import logging
import math
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path

import multiprocessing

from .prediction import PredictionInput, predict
from .rng import uniform_height
from .zeta import interval_maxima

__all__ = [
    "CheckpointError",
    "ExperimentReport",
    "aggregate",
    "default_workers",
    "load_checkpoint",
    "run_experiment",
]

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
_THETA_DIGITS = 12


class CheckpointError(RuntimeError):
    """The checkpoint file is unreadable or belongs to a different run."""


@dataclass(frozen=True)
class ExperimentReport:
    T: float
    theta: float
    sample_size: int
    empirical_mean: float
    empirical_std: float
    std_error: float
    prediction_corrected: float
    prediction_uncorrected: float
    ratio_corrected: float
    ratio_uncorrected: float

    def as_dict(self) -> dict:
        return asdict(self)


def default_workers() -> int:
    value = os.environ.get("ZETA_WORKERS")
    if value:
        try:
            n = int(value)
        except ValueError:
            raise ValueError(f"ZETA_WORKERS must be an integer, got {value!r}") from None
        if n < 1:
            raise ValueError("ZETA_WORKERS must be >= 1")
        return n
    return 1


def _theta_key(theta: float) -> float:
    return round(float(theta), _THETA_DIGITS)


def _compute_sample(T: float, thetas: tuple[float, ...], seed: int, index: int) -> list[dict]:
    tau = uniform_height(seed, index, T)
    return [
        {
            "i": index,
            "theta": s.theta,
            "tau": s.tau,
            "max": s.max_log_abs,
            "argmax": s.argmax_offset,
            "n_points": s.n_points,
        }
        for s in interval_maxima(tau, T, thetas, seed_index=index)
    ]


def load_checkpoint(path: str | os.PathLike, T: float, seed: int) -> dict[tuple[int, float], dict]:
    """Completed (index, theta) records from a checkpoint.

    A trailing line without newline is an interrupted write and is dropped;
    any other malformed line raises :class:`CheckpointError`.
    """
    path = Path(path)
    records: dict[tuple[int, float], dict] = {}
    if not path.exists():
        return records
    text = path.read_text()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    elif lines:
        log.warning("dropping incomplete trailing checkpoint line in %s", path)
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CheckpointError(f"{path}:{lineno}: not valid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise CheckpointError(f"{path}:{lineno}: expected a JSON object")
        if "header" in obj:
            head = obj["header"]
            if head.get("version") != CHECKPOINT_VERSION:
                raise CheckpointError(f"{path}: unsupported checkpoint version {head.get('version')!r}")
            if head.get("T") != T or head.get("seed") != seed:
                raise CheckpointError(
                    f"{path}: checkpoint is for T={head.get('T')!r}, seed={head.get('seed')!r}; "
                    f"requested T={T!r}, seed={seed!r}"
                )
            continue
        try:
            key = (int(obj["i"]), _theta_key(obj["theta"]))
            rec = {
                "i": key[0],
                "theta": float(obj["theta"]),
                "tau": float(obj["tau"]),
                "max": float(obj["max"]),
                "argmax": float(obj["argmax"]),
                "n_points": int(obj["n_points"]),
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise CheckpointError(f"{path}:{lineno}: malformed record ({exc})") from None
        if not math.isfinite(rec["max"]):
            raise CheckpointError(f"{path}:{lineno}: non-finite maximum")
        records[key] = rec
    return records


def _open_checkpoint(path: Path, T: float, seed: int):
    fresh = not path.exists() or path.stat().st_size == 0
    if not fresh:
        # drop an interrupted trailing write before appending
        data = path.read_bytes()
        if data and not data.endswith(b"\n"):
            cut = data.rfind(b"\n") + 1
            with path.open("r+b") as fh:
                fh.truncate(cut)
    fh = path.open("a", encoding="utf-8")
    if fresh:
        fh.write(json.dumps({"header": {"version": CHECKPOINT_VERSION, "T": T, "seed": seed}}) + "\n")
        fh.flush()
    return fh


def aggregate(
    records: Iterable[dict],
    T: float,
    thetas: Iterable[float],
    sample_size: int,
    prime_limit: int = 10**6,
) -> list[ExperimentReport]:
    """Per-theta mean, standard deviation and ratios to both predictions.

    Only indices below ``sample_size`` are used, summed in index order, so
    the result does not depend on the order in which samples completed.
    """
    by_theta: dict[float, dict[int, float]] = {}
    for rec in records:
        if rec["i"] < sample_size:
            by_theta.setdefault(_theta_key(rec["theta"]), {})[rec["i"]] = rec["max"]
    reports = []
    for theta in thetas:
        vals_by_i = by_theta.get(_theta_key(theta), {})
        if len(vals_by_i) != sample_size:
            raise ValueError(
                f"theta={theta}: {len(vals_by_i)} of {sample_size} samples available"
            )
        vals = [vals_by_i[i] for i in range(sample_size)]
        mean = math.fsum(vals) / sample_size
        std = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (sample_size - 1))
        cor = predict(PredictionInput(T, theta, True, prime_limit)).predicted_mean
        unc = predict(PredictionInput(T, theta, False, prime_limit)).predicted_mean
        reports.append(
            ExperimentReport(
                T=float(T),
                theta=float(theta),
                sample_size=sample_size,
                empirical_mean=mean,
                empirical_std=std,
                std_error=std / math.sqrt(sample_size),
                prediction_corrected=cor,
                prediction_uncorrected=unc,
                ratio_corrected=mean / cor,
                ratio_uncorrected=mean / unc,
            )
        )
    return reports


def run_experiment(
    T: float,
    thetas: Iterable[float],
    sample_size: int,
    seed: int,
    checkpoint_path: str | os.PathLike | None = None,
    workers: int | None = None,
    prime_limit: int = 10**6,
    progress: Callable[[int, int], None] | None = None,
) -> list[ExperimentReport]:
    """Sample interval maxima at height T and aggregate them per theta."""
    thetas = tuple(float(th) for th in thetas)
    if sample_size < 10:
        raise ValueError("sample_size must be >= 10")
    if not thetas:
        raise ValueError("no theta values given")
    if not T >= 1e5:
        raise ValueError("T must be >= 1e5 for the Riemann-Siegel evaluator")
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")

    records: dict[tuple[int, float], dict] = {}
    fh = None
    if checkpoint_path is not None:
        path = Path(checkpoint_path)
        records = load_checkpoint(path, T, seed)
        fh = _open_checkpoint(path, T, seed)
    wanted = {_theta_key(th) for th in thetas}
    todo = [
        i for i in range(sample_size)
        if any((i, key) not in records for key in wanted)
    ]
    log.info("T=%g: %d of %d samples to compute, %d worker(s)", T, len(todo), sample_size, workers)

    def accept(recs: list[dict]) -> None:
        lines = []
        for rec in recs:
            key = (rec["i"], _theta_key(rec["theta"]))
            if key not in records:
                records[key] = rec
                lines.append(json.dumps(rec))
        if fh is not None and lines:
            fh.write("\n".join(lines) + "\n")
            fh.flush()

    done = 0
    try:
        if workers == 1 or len(todo) <= 1:
            for i in todo:
                accept(_compute_sample(T, thetas, seed, i))
                done += 1
                if progress:
                    progress(done, len(todo))
        else:
            ctx = multiprocessing.get_context("fork" if os.name == "posix" else "spawn")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                futures = [pool.submit(_compute_sample, T, thetas, seed, i) for i in todo]
                for fut in as_completed(futures):
                    accept(fut.result())
                    done += 1
                    if progress:
                        progress(done, len(todo))
    finally:
        if fh is not None:
            fh.close()
    return aggregate(records.values(), T, thetas, sample_size, prime_limit)
