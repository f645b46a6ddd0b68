"""Command-line entry point.

Every command computes all of its results in memory first and only then
writes files (each through a temporary name and an atomic rename), so a
failing run leaves no partial output behind. Exit codes: 0 success,
1 usage or I/O error, 2 analysis precondition failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bitstream import BitStream, circular_ngram_distribution, concat_series
from .dependency import DEFAULT_MIN_LENGTH, pair_sampling
from .errors import PreconditionError
from .extractor import ExtractorConfig, extract
from .ingest import SYNTH_KINDS, IpiSeries, SynthModel, parse_ipi_file, serialize_ipi, synth_generate
from .secrecy import CSV_HEADER as ENTROPY_HEADER
from .secrecy import report_for
from .sv_delta import CSV_HEADER as SV_HEADER
from .sv_delta import sv_delta
from .testkit import export_raw, import_raw, run_battery, scatter_points

log = logging.getLogger("ipirand")

DEFAULT_ALPHAS = (0.10, 0.05, 0.01)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------- config --

def _int_list(text: str) -> list[int]:
    if text == "all":
        return list(range(1, 9))
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers or 'all', got {text!r}")


def _validate(args) -> None:
    """Check numeric flags against module preconditions before any work starts."""
    ks = getattr(args, "k", [])
    for k in ks if isinstance(ks, list) else [ks]:
        if not 1 <= k <= 8:
            raise PreconditionError(f"bad k: {k} (must be in 1..8)")
    if hasattr(args, "n_max") and not 1 <= args.n_max <= 16:
        raise PreconditionError(f"bad n: --n-max {args.n_max} must be in 1..16")
    if hasattr(args, "n") and not 1 <= args.n <= 16:
        raise PreconditionError(f"bad n: --n {args.n} must be in 1..16")
    if hasattr(args, "t_high") and (args.t_high <= 0 or args.t_low >= 0):
        raise PreconditionError("config: need --t-high > 0 and --t-low < 0")
    if hasattr(args, "seq_len") and args.seq_len < 1:
        raise PreconditionError("config: --seq-len must be positive")
    for a in getattr(args, "alpha", None) or []:
        if not 0 < a < 1:
            raise PreconditionError(f"config: alpha {a} outside (0, 1)")
    if hasattr(args, "trials") and (args.trials < 1 or args.min_length < 1):
        raise PreconditionError("config: --trials and --min-length must be positive")
    if hasattr(args, "word_size") and not 8 <= args.word_size <= 32:
        raise PreconditionError("config: --word-size must lie in 8..32")
    if getattr(args, "synth", None) is not None:
        if args.count < 1 or args.subjects < 1:
            raise PreconditionError("config: --count and --subjects must be positive")
        _synth_model(args, 0).validate()


def _config_echo(args) -> dict:
    # the output location and verbosity do not affect results
    skip = {"func", "out", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def subject_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for synthetic subject ``index``."""
    state = np.random.SeedSequence([seed, index]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def _synth_model(args, index: int) -> SynthModel:
    return SynthModel(
        kind=args.synth,
        mean=args.mean,
        ar_coefficient=args.ar,
        noise_sd=args.noise_sd,
        seed=subject_seed(args.seed, index),
    )


def _load_subjects(args) -> list[IpiSeries]:
    if getattr(args, "synth", None) is not None:
        return [
            synth_generate(_synth_model(args, i), args.count, subject_id=f"synth{i:04d}")
            for i in range(args.subjects)
        ]
    if args.input is None:
        raise UsageError("one of --input or --synth is required")
    path = Path(args.input)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file() and not p.name.startswith("."))
        if not files:
            raise OSError(f"no subject files in {path}")
    elif path.is_file():
        files = [path]
    else:
        raise FileNotFoundError(f"input path does not exist: {path}")
    return [parse_ipi_file(f.read_text(encoding="utf-8")) for f in files]


def _load_bits(args) -> BitStream:
    path = Path(args.input)
    if not path.is_file():
        raise FileNotFoundError(f"bit file does not exist: {path}")
    fmt = args.bits_format
    if fmt == "auto":
        fmt = "ascii" if path.suffix in (".txt", ".bits") else "packed"
    return import_raw(path.read_bytes(), fmt, args.length)


# ---------------------------------------------------------------- output --

def _json_bytes(command: str, args, payload: dict) -> bytes:
    doc = {
        "tool": "ipirand",
        "version": __version__,
        "command": command,
        "config": _config_echo(args),
        **payload,
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _csv_bytes(command: str, args, header: Sequence[str], rows) -> bytes:
    buf = io.StringIO()
    buf.write(f"# ipirand {__version__} {command} {json.dumps(_config_echo(args), separators=(',', ':'))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue().encode("utf-8")


def _commit(out_dir: Path, files: dict[str, bytes]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, data in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            staged.append((tmp, out_dir / name))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)


def _wants(args, fmt: str) -> bool:
    return fmt in (args.format or ["json", "csv"])


# -------------------------------------------------------------- commands --

def cmd_analyze(args) -> dict[str, bytes]:
    subjects = _load_subjects(args)
    entropy_json, sv_json, entropy_rows, sv_rows = [], [], [], []
    for k in args.k:
        pooled = BitStream(np.concatenate([concat_series(s, k).bits for s in subjects]))
        log.info("k=%d: %d pooled bits", k, pooled.length)
        if pooled.length < args.n_max:
            raise PreconditionError(f"too short: {pooled.length} bits < n_max={args.n_max}")
        for n in range(1, args.n_max + 1):
            dist = circular_ngram_distribution(pooled, n)
            ent, sv = report_for(dist), sv_delta(dist)
            d = {"k": k, **ent.to_dict()}
            if args.counts:
                d["counts"] = dist.counts.tolist()
            entropy_json.append(d)
            sv_json.append({"k": k, **sv.to_dict()})
            entropy_rows.append((k, *ent.csv_row()))
            sv_rows.append((k, *sv.csv_row()))
    files = {}
    if _wants(args, "json"):
        files["entropy.json"] = _json_bytes("analyze", args, {"reports": entropy_json})
        files["sv.json"] = _json_bytes("analyze", args, {"reports": sv_json})
    if _wants(args, "csv"):
        files["entropy.csv"] = _csv_bytes("analyze", args, ("k", *ENTROPY_HEADER), entropy_rows)
        files["sv.csv"] = _csv_bytes("analyze", args, ("k", *SV_HEADER), sv_rows)
    return files


def cmd_extract(args) -> dict[str, bytes]:
    subjects = _load_subjects(args)
    cfg = ExtractorConfig(k=args.k, t_high=args.t_high, t_low=args.t_low)
    parts, per_subject = [], []
    for s in subjects:
        res = extract(s, cfg)
        parts.append(res.output.bits)
        per_subject.append({"subject": s.subject_id, **res.to_dict()})
    output = BitStream(np.concatenate(parts))
    total_ipis = sum(len(s) for s in subjects)
    summary = {
        "length": output.length,
        "total_ipis": total_ipis,
        "yield_rate": output.length / total_ipis,
        "ones": output.ones(),
        "subjects": per_subject,
    }
    return {
        "output.bin": export_raw(output, "packed"),
        "output.txt": export_raw(output, "ascii"),
        "yield.json": _json_bytes("extract", args, summary),
    }


def cmd_battery(args) -> dict[str, bytes]:
    bits = _load_bits(args)
    alphas = args.alpha or list(DEFAULT_ALPHAS)
    reports = [run_battery(bits, args.seq_len, a) for a in alphas]
    files = {}
    if _wants(args, "json"):
        files["battery.json"] = _json_bytes(
            "battery", args, {"length": bits.length, "reports": [r.to_dict() for r in reports]}
        )
    if _wants(args, "csv"):
        rows = [
            (r.alpha, t.name, t.m, t.pass_count, t.proportion, t.ci_low, t.ci_high, t.proportion_pass)
            for r in reports
            for t in r.tests
        ]
        header = ("alpha", "test", "m", "pass_count", "proportion", "ci_low", "ci_high", "proportion_pass")
        files["battery.csv"] = _csv_bytes("battery", args, header, rows)
    return files


def cmd_scatter(args) -> dict[str, bytes]:
    bits = _load_bits(args)
    pts = scatter_points(bits, args.word_size)
    files = {
        "scatter.csv": pts.to_csv().encode("utf-8"),
        "scatter.svg": pts.to_svg().encode("utf-8"),
    }
    if _wants(args, "json"):
        summary = {"points": len(pts), "word_size": pts.word_size}
        if len(pts) >= 2560:
            summary["grid_chi2_p"] = pts.uniformity_chi2(16)
        files["scatter.json"] = _json_bytes("scatter", args, summary)
    return files


def cmd_pairdep(args) -> dict[str, bytes]:
    subjects = _load_subjects(args)
    summary = pair_sampling(subjects, args.trials, args.min_length, args.n, args.seed, args.k)
    files = {}
    if _wants(args, "json"):
        files["pairdep.json"] = _json_bytes("pairdep", args, summary.to_dict())
    if _wants(args, "csv"):
        rows = [(t.trial, t.subject_a, t.subject_b, t.e_indp) for t in summary.per_trial]
        files["pairdep_trials.csv"] = _csv_bytes(
            "pairdep", args, ("trial", "subject_a", "subject_b", "e_indp"), rows
        )
    return files


def cmd_synth(args) -> dict[str, bytes]:
    if args.synth is None:
        raise UsageError("synth requires --synth <kind>")
    subjects = _load_subjects(args)
    return {f"{s.subject_id}.txt": serialize_ipi(s).encode("utf-8") for s in subjects}


# ---------------------------------------------------------------- parser --

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--format", action="append", choices=("json", "csv"),
                   help="report format; repeat for several (default: both)")


def _add_ipi_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="subject file or directory of subject files")
    p.add_argument("--synth", choices=SYNTH_KINDS, help="generate synthetic subjects instead")
    p.add_argument("--count", type=int, default=100_000, help="IPIs per synthetic subject")
    p.add_argument("--subjects", type=int, default=1, help="number of synthetic subjects")
    p.add_argument("--mean", type=float, default=80.0, help="synthetic mean IPI (centiseconds)")
    p.add_argument("--ar", type=float, default=0.0, help="AR(1) coefficient for --synth ar1")
    p.add_argument("--noise-sd", type=float, default=5.0, help="synthetic noise sd (centiseconds)")


def _add_bit_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="bit file (.txt = ascii, otherwise packed)")
    p.add_argument("--bits-format", choices=("auto", "packed", "ascii"), default="auto")
    p.add_argument("--length", type=int, help="true bit length of a packed file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ipirand",
        description="Evaluate IPI data as a randomness source and run the martingale extractor.",
    )
    parser.add_argument("--version", action="version", version=f"ipirand {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="entropy measures and SV delta per k-LSB dataset")
    _add_ipi_source(p)
    p.add_argument("--k", type=_int_list, default=[2], help="comma list of k values or 'all'")
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--counts", action="store_true", help="include pattern counts in entropy.json")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("extract", help="martingale extraction to packed and ascii bit files")
    _add_ipi_source(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--t-high", type=int, default=3)
    p.add_argument("--t-low", type=int, default=-3)
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("battery", help="internal statistical battery over a bit file")
    _add_bit_source(p)
    p.add_argument("--seq-len", type=int, default=10_000)
    p.add_argument("--alpha", type=float, action="append",
                   help="significance level; repeat for several (default 0.10, 0.05, 0.01)")
    _add_common(p)
    p.set_defaults(func=cmd_battery)

    p = sub.add_parser("scatter", help="lag-1 scatter points (CSV and SVG)")
    _add_bit_source(p)
    p.add_argument("--word-size", type=int, default=8)
    _add_common(p)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("pairdep", help="random-pair dependency between subjects")
    _add_ipi_source(p)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--min-length", type=int, default=DEFAULT_MIN_LENGTH)
    p.add_argument("--n", type=int, default=8, help="word length in bits")
    p.add_argument("--k", type=int, default=2)
    _add_common(p)
    p.set_defaults(func=cmd_pairdep)

    p = sub.add_parser("synth", help="write synthetic subject files")
    _add_ipi_source(p)
    _add_common(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"ipirand: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _validate(args)
        files = args.func(args)
        _commit(Path(args.out), files)
    except UsageError as exc:
        print(f"ipirand: error: {exc}", file=sys.stderr)
        return 1
    except PreconditionError as exc:
        print(f"ipirand: {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ipirand: {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
