"""
Command-line harness.

    partial-oracle run      --n 14 --shots 1000 --seed 7 --out report.json
    partial-oracle sweep    --n 8 --shots 200,400,600,800,1000 --reps 20 --out table.csv
    partial-oracle baseline --n 14 --shots 1000 --seed 7
    partial-oracle verify   --max-n 4

Settings resolve as built-in defaults < ``--config`` JSON file < flags.
All randomness derives from ``--seed``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import verify
from .oracle import MAX_CIRCUIT_BITS
from .search import BANDS, band_counts, run_baseline, trial
from .state_model import ENTROPY_SOURCES

SWEEP_COLUMNS = ("n_shots", "rep", "success_prob", "verified", "total_circuit_queries")
SUMMARY_COLUMNS = ("n_shots",) + BANDS


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    n: int = 8
    shots: list[int] = field(default_factory=lambda: [1000])
    reps: int = 1
    seed: int = 0
    bits_per_stage: int = 1
    key: int | None = None
    perm_seed: int | None = None
    entropy_source: str = "counts"
    jobs: int = 1
    output_path: str | None = None
    output_format: str = "json"

    def validate(self):
        if self.n < 2:
            raise UsageError("--n must be >= 2")
        if not self.shots or any(s < 1 for s in self.shots):
            raise UsageError("--shots must be positive")
        if self.reps < 1 or self.jobs < 1:
            raise UsageError("--reps and --jobs must be >= 1")
        if self.seed < 0:
            raise UsageError("--seed must be non-negative")
        if self.bits_per_stage not in (1, 2):
            raise UsageError("--bits-per-stage must be 1 or 2")
        if self.key is not None and not 0 <= self.key < (1 << self.n):
            raise UsageError(f"--key does not fit in {self.n} bits")
        if self.entropy_source not in ENTROPY_SOURCES:
            raise UsageError(f"--entropy-source must be one of {ENTROPY_SOURCES}")
        if self.output_format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        return self

    def to_record(self) -> dict:
        rec = asdict(self)
        rec.pop("output_path")
        rec.pop("jobs")
        return rec


def _parse_shots(text) -> list[int]:
    if isinstance(text, int):
        return [text]
    if isinstance(text, list):
        return [int(s) for s in text]
    try:
        return [int(s) for s in str(text).split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --shots value {text!r}") from exc


def _parse_key(text) -> int | None:
    if text is None or isinstance(text, int):
        return text
    try:
        return int(text, 16)
    except ValueError as exc:
        raise UsageError(f"--key must be hexadecimal, got {text!r}") from exc


def build_config(args: argparse.Namespace, default_format: str = "json") -> ExperimentConfig:
    values = {"output_format": default_format}
    if args.config:
        try:
            with open(args.config) as fh:
                values.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    flag_map = {
        "n": args.n,
        "shots": args.shots,
        "reps": args.reps,
        "seed": args.seed,
        "bits_per_stage": args.bits_per_stage,
        "key": args.key,
        "perm_seed": args.perm_seed,
        "entropy_source": args.entropy_source,
        "jobs": args.jobs,
        "output_path": args.out,
        "output_format": args.format,
    }
    values.update({k: v for k, v in flag_map.items() if v is not None})
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    if "shots" in values:
        values["shots"] = _parse_shots(values["shots"])
    if "key" in values:
        values["key"] = _parse_key(values["key"])
    return ExperimentConfig(**values).validate()


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _dump_json(record: dict) -> str:
    return json.dumps(record, indent=2) + "\n"


def _fmt(p: float) -> str:
    return f"{p:.6f}"


def cmd_run(cfg: ExperimentConfig) -> int:
    shots = cfg.shots[0]
    spec, result = trial(
        cfg.n, shots, cfg.seed, key=cfg.key, perm_seed=cfg.perm_seed,
        bits_per_stage=cfg.bits_per_stage, entropy_source=cfg.entropy_source,
    )
    if cfg.output_format == "json":
        text = _dump_json({"config": cfg.to_record(), "scenario": spec.to_record(), "result": result.to_record()})
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("ell", "flag_bits", "lambda_hat", "g", "alpha", "circuit_queries", "entropy_before", "exact_target_prob"))
        for s in result.stages:
            writer.writerow((s.ell, s.flag_bits, _fmt(s.lambda_hat), s.g, _fmt(s.alpha), s.circuit_queries,
                             _fmt(s.entropy_before), _fmt(s.exact_target_prob)))
        text = buf.getvalue()
    if cfg.output_path is not None:
        _emit(text, cfg.output_path)
    print(
        f"found_key={result.found_key:0{cfg.n}b} verified={result.verified} "
        f"success_prob={_fmt(result.success_prob)} circuit_queries={result.total_circuit_queries} "
        f"shot_queries={result.total_shot_queries}",
        file=sys.stderr if cfg.output_path is None else sys.stdout,
    )
    if cfg.output_path is None:
        _emit(text, None)
    return 0


def _sweep_task(args):
    n, shots, seed, rep, key, perm_seed, bits_per_stage, entropy_source = args
    _, result = trial(n, shots, seed, rep=rep, key=key, perm_seed=perm_seed,
                      bits_per_stage=bits_per_stage, entropy_source=entropy_source)
    return (shots, rep, result.success_prob, result.verified, result.total_circuit_queries)


def sweep_rows(cfg: ExperimentConfig) -> list[tuple]:
    """One row per (shots, rep), ordered by shots then rep regardless of ``jobs``."""
    tasks = [
        (cfg.n, shots, cfg.seed, rep, cfg.key, cfg.perm_seed, cfg.bits_per_stage, cfg.entropy_source)
        for shots in cfg.shots
        for rep in range(cfg.reps)
    ]
    if cfg.jobs == 1:
        rows = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    order = {s: i for i, s in enumerate(cfg.shots)}
    return sorted(rows, key=lambda r: (order[r[0]], r[1]))


def summarize(rows, shots_values) -> list[tuple]:
    out = []
    for shots in shots_values:
        counts = band_counts(r[2] for r in rows if r[0] == shots)
        out.append((shots,) + tuple(counts[b] for b in BANDS))
    return out


def render_sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for shots, rep, prob, verified, queries in rows:
        writer.writerow((shots, rep, _fmt(prob), int(verified), queries))
    return buf.getvalue()


def render_summary_csv(summary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    writer.writerows(summary)
    return buf.getvalue()


def _summary_path(path: str) -> str:
    stem, dot, ext = path.rpartition(".")
    return f"{stem}.summary.{ext}" if dot else f"{path}.summary"


def cmd_sweep(cfg: ExperimentConfig) -> int:
    rows = sweep_rows(cfg)
    summary = summarize(rows, cfg.shots)
    if cfg.output_format == "json":
        record = {
            "config": cfg.to_record(),
            "rows": [dict(zip(SWEEP_COLUMNS, r)) for r in rows],
            "summary": [dict(zip(SUMMARY_COLUMNS, s)) for s in summary],
        }
        _emit(_dump_json(record), cfg.output_path)
    else:
        _emit(render_sweep_csv(rows), cfg.output_path)
        if cfg.output_path is not None:
            _emit(render_summary_csv(summary), _summary_path(cfg.output_path))
    out = sys.stdout if cfg.output_path is not None else sys.stderr
    print("N_shots " + " ".join(f"{b:>9}" for b in BANDS), file=out)
    for s in summary:
        print(f"{s[0]:>7} " + " ".join(f"{c:>9}" for c in s[1:]), file=out)
    return 0


def baseline_record(cfg: ExperimentConfig) -> dict:
    spec, partial = trial(
        cfg.n, cfg.shots[0], cfg.seed, key=cfg.key, perm_seed=cfg.perm_seed,
        bits_per_stage=cfg.bits_per_stage, entropy_source=cfg.entropy_source,
    )
    base = run_baseline(spec)
    return {
        "config": cfg.to_record(),
        "scenario": spec.to_record(),
        "partial_circuit_queries": partial.total_circuit_queries,
        "partial_success_prob": partial.success_prob,
        "partial_verified": partial.verified,
        "baseline_circuit_queries": base.total_circuit_queries,
        "baseline_success_prob": base.success_prob,
        "sqrt_n_estimate": math.sqrt(2 ** cfg.n),
    }


def cmd_baseline(cfg: ExperimentConfig) -> int:
    record = baseline_record(cfg)
    if cfg.output_format == "json":
        text = _dump_json(record)
    else:
        flat = {k: v for k, v in record.items() if k not in ("config", "scenario")}
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(flat.keys())
        writer.writerow(flat.values())
        text = buf.getvalue()
    _emit(text, cfg.output_path)
    out = sys.stdout if cfg.output_path is not None else sys.stderr
    print(
        f"partial: {record['partial_circuit_queries']} queries "
        f"(success {_fmt(record['partial_success_prob'])}); "
        f"baseline: {record['baseline_circuit_queries']} queries "
        f"(success {_fmt(record['baseline_success_prob'])}); "
        f"sqrt(N) estimate: {record['sqrt_n_estimate']:g}",
        file=out,
    )
    return 0


def cmd_verify(max_n: int) -> int:
    if not 2 <= max_n <= MAX_CIRCUIT_BITS:
        raise UsageError(f"--max-n must lie in 2..{MAX_CIRCUIT_BITS}")
    results = verify.run_checks(max_n)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} worst_deviation={r.worst_deviation:.3e}")
    return 0 if all(r.passed for r in results) else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="partial-oracle", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with ExperimentConfig fields")
    common.add_argument("--n", type=int, help="key length in bits")
    common.add_argument("--shots", help="shots per stage; a comma list for sweep")
    common.add_argument("--reps", type=int, help="repetitions per shots value (sweep)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--bits-per-stage", type=int, choices=(1, 2))
    common.add_argument("--key", help="secret key in hex (random if omitted)")
    common.add_argument("--perm-seed", type=int, help="seed for the bit permutation only")
    common.add_argument("--entropy-source", choices=ENTROPY_SOURCES)
    common.add_argument("--jobs", type=int, help="worker processes for sweep repetitions")
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--format", choices=("csv", "json"))

    sub.add_parser("run", parents=[common], help="one partial-oracle search")
    sub.add_parser("sweep", parents=[common], help="repeated searches over a shots list")
    sub.add_parser("baseline", parents=[common], help="partial-oracle vs plain Grover-Long query counts")
    p_verify = sub.add_parser("verify", help="small-n equivalence and determinism checks")
    p_verify.add_argument("--max-n", type=int, default=4)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.max_n)
        cfg = build_config(args, default_format="csv" if args.command == "sweep" else "json")
        return {"run": cmd_run, "sweep": cmd_sweep, "baseline": cmd_baseline}[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
