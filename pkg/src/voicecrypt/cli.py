"""Command-line front end: ``voicecrypt <subcommand> ...``.

Exit status is 0 on success, 1 on a usage error and 2 when the input data
is rejected (bad WAV, wrong password format, empty database, ...).
Diagnostics go to stderr; tables go to stdout or to ``--out``.

``--config FILE`` takes a JSON object whose keys are analysis-frame fields
(``frame_len``, ``epsilon``, ...), channel fields (``snr_db``, ``seed``,
``gain``) or ``trials``. Flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import csv
import getpass
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .audio import WORKING_RATE, load, write_wav
from .channel import DEFAULT_TRIALS, ChannelConfig, run_mse_sweep, transmit
from .cipher import CipherText, decrypt, encrypt
from .errors import EmptyTable, InvalidConfig, VoiceCryptError
from .features import FEATURE_NAMES, METHODS, extract
from .identify import TemplateDB, accuracy_bench
from .keys import ascii_encode, caesar_shift, derive_keys, validate_password
from .pitch import FrameConfig, extract_pitch

FRAME_FIELDS = {f.name for f in fields(FrameConfig)}
CHANNEL_FIELDS = {f.name for f in fields(ChannelConfig)}
CONFIG_FIELDS = FRAME_FIELDS | CHANNEL_FIELDS | {"trials"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(table: Table, fmt: str = "csv") -> str:
    """Render a table as CSV or TSV text with a header row.

    Floats use ``repr`` so the text is locale independent and round-trips
    exactly.
    """
    if not table.rows:
        raise EmptyTable("report has no rows")
    if fmt not in ("csv", "tsv"):
        raise InvalidConfig(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="," if fmt == "csv" else "\t", lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _write_output(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- settings

def load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidConfig(f"{path}: expected a JSON object")
    unknown = sorted(set(doc) - CONFIG_FIELDS)
    if unknown:
        raise InvalidConfig(f"{path}: unknown keys {unknown}")
    return doc


def _setting(args, config: dict, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(name, default)


def _frame_config(config: dict) -> FrameConfig:
    return FrameConfig(**{k: v for k, v in config.items() if k in FRAME_FIELDS})


def _password(args) -> str:
    if args.password is not None:
        return args.password
    return getpass.getpass("password: ")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None


def _method_list(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {','.join(METHODS)}")
    return methods


# ----------------------------------------------------------------- commands

def cmd_keygen(args, config):
    password = validate_password(_password(args))
    codes = ascii_encode(password)
    keys = derive_keys(password.text)
    print(f"key1={keys.key1_digits}")
    print(f"key2={keys.key2_digits}")
    if args.show_digits:
        print("ascii=" + ",".join(map(str, codes)))
        print("shifted=" + ",".join(map(str, caesar_shift(codes))))
        print(f"digits={keys.z_digits}")
        print(f"seed1={keys.key1}")
        print(f"seed2={keys.key2}")
    return 0


def cmd_encrypt(args, config):
    signal = load(args.input, WORKING_RATE, normalize=False)
    gain = _setting(args, config, "gain", 1.0)
    encrypt(signal, derive_keys(_password(args)), gain=gain).save(args.out)
    return 0


def cmd_decrypt(args, config):
    cipher = CipherText.load(args.input)
    write_wav(decrypt(cipher, derive_keys(_password(args)), WORKING_RATE), args.out)
    return 0


def cmd_channel(args, config):
    ch = ChannelConfig(snr_db=_setting(args, config, "snr_db", math.inf),
                       seed=_setting(args, config, "seed", 0))
    transmit(CipherText.load(args.input), ch.snr_db, ch.seed).save(args.out)
    return 0


def cmd_pitch(args, config):
    cfg = _frame_config(config)
    track = extract_pitch(load(args.input, cfg.sample_rate), cfg)
    rows = [(f.start_sample, f.voiced, f.f0, f.confidence) for f in track]
    table = Table(["frame_start_sample", "voiced", "f0_hz", "confidence"], rows)
    _write_output(emit_report(table, args.format), args.csv)
    return 0


def cmd_features(args, config):
    cfg = _frame_config(config)
    vec = extract(load(args.input, cfg.sample_rate), args.method, cfg)
    table = Table(list(FEATURE_NAMES[args.method]), [tuple(float(v) for v in vec.values)])
    _write_output(emit_report(table, args.format), args.out)
    return 0


def cmd_enroll(args, config):
    cfg = _frame_config(config)
    db = TemplateDB(args.db, cfg)
    entry = db.enroll(args.speaker, load(args.input, cfg.sample_rate), derive_keys(_password(args)),
                      gain=_setting(args, config, "gain", 1.0))
    print(f"enrolled {entry.speaker_id} as {entry.template_id}", file=sys.stderr)
    return 0


def cmd_identify(args, config):
    cfg = _frame_config(config)
    db = TemplateDB.open(args.db, cfg)
    result = db.identify(load(args.input, cfg.sample_rate), args.method, normalize=not args.raw)
    if args.password is not None:
        db.verify_template(result.ranking[0][1], derive_keys(args.password), args.method)
    rows = [(i + 1, spk, tid, dist) for i, (spk, tid, dist) in enumerate(result.ranking[: args.top])]
    table = Table(["rank", "speaker_id", "template_id", "distance"], rows)
    _write_output(emit_report(table, args.format), args.out)
    return 0


def cmd_bench_mse(args, config):
    trials = _setting(args, config, "trials", DEFAULT_TRIALS)
    seed = _setting(args, config, "seed", 0)
    gain = _setting(args, config, "gain", 1.0)
    ChannelConfig(seed=seed, gain=gain)  # validates
    signal = load(args.input, WORKING_RATE)
    sweep = run_mse_sweep(signal, derive_keys(_password(args)), args.snr_list,
                          trials=trials, seed0=seed, gain=gain)
    table = Table(["snr_db", "mean_mse", "trials"], [(snr, m, trials) for snr, m in sweep])
    _write_output(emit_report(table, args.format), args.out)
    return 0


def cmd_bench_accuracy(args, config):
    cfg = _frame_config(config)
    keys = derive_keys(args.password) if args.password is not None else None
    if keys is None and not (Path(args.db) / "manifest.json").exists():
        keys = derive_keys(_password(args))
    rows = accuracy_bench(args.db, args.test, args.methods, keys=keys, cfg=cfg, normalize=not args.raw)
    _write_output(emit_report(Table(["method", "accuracy"], rows), args.format), args.out)
    return 0


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON overrides (default: none)")

    def with_password(p, required_note="prompted if omitted"):
        p.add_argument("--password", help=f"password ({required_note})")

    def with_format(p):
        p.add_argument("--format", choices=("csv", "tsv"), default="csv", help="report format (default: csv)")

    parser = _Parser(prog="voicecrypt", description="Speech scrambling, pitch analysis and speaker identification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    p = sub.add_parser("keygen", parents=[common], help="print the key pair derived from a password")
    with_password(p)
    p.add_argument("--show-digits", action="store_true", help="also print intermediate digit sequences")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", parents=[common], help="scramble a WAV file into a .vcr ciphertext")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    with_password(p)
    p.add_argument("--gain", type=float, help="coefficient gain (default: 1.0)")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", parents=[common], help="recover a 10 kHz WAV from a .vcr ciphertext")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    with_password(p)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("channel", parents=[common], help="add white Gaussian noise to a ciphertext")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--snr-db", dest="snr_db", type=float, help="SNR in dB (default: inf, noiseless)")
    p.add_argument("--seed", type=int, help="noise seed (default: 0)")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("pitch", parents=[common], help="frame-wise pitch track as CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--csv", help="output file (default: stdout)")
    with_format(p)
    p.set_defaults(func=cmd_pitch)

    p = sub.add_parser("features", parents=[common], help="utterance feature vector as CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=METHODS, default="pitch", help="feature method (default: pitch)")
    p.add_argument("--out", help="output file (default: stdout)")
    with_format(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("enroll", parents=[common], help="add an encrypted template to a database")
    p.add_argument("--db", required=True)
    p.add_argument("--speaker", required=True)
    p.add_argument("--in", dest="input", required=True)
    with_password(p)
    p.add_argument("--gain", type=float, help="coefficient gain (default: 1.0)")
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("identify", parents=[common], help="rank enrolled templates against a recording")
    p.add_argument("--db", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=METHODS, default="pitch", help="feature method (default: pitch)")
    p.add_argument("--password", help="if given, decrypt the best template and check it (default: skip)")
    p.add_argument("--top", type=int, default=1, help="rows to print (default: 1)")
    p.add_argument("--raw", action="store_true", help="unnormalized Euclidean distance")
    p.add_argument("--out", help="output file (default: stdout)")
    with_format(p)
    p.set_defaults(func=cmd_identify)

    bench = sub.add_parser("bench", help="benchmarks")
    bsub = bench.add_subparsers(dest="bench", parser_class=_Parser, metavar="BENCH")

    p = bsub.add_parser("mse", parents=[common], help="decryption MSE versus channel SNR")
    p.add_argument("--in", dest="input", required=True)
    with_password(p)
    p.add_argument("--snr-list", type=_float_list, default=[16.0, 17.0, 18.0, 19.0, 20.0],
                   help="comma-separated SNRs in dB (default: 16,17,18,19,20)")
    p.add_argument("--trials", type=int, help=f"trials per SNR (default: {DEFAULT_TRIALS})")
    p.add_argument("--seed", type=int, help="seed of the first trial (default: 0)")
    p.add_argument("--gain", type=float, help="coefficient gain (default: 1.0)")
    p.add_argument("--out", help="output file (default: stdout)")
    with_format(p)
    p.set_defaults(func=cmd_bench_mse)

    p = bsub.add_parser("accuracy", parents=[common], help="identification accuracy per feature method")
    p.add_argument("--db", required=True, help="template database or labeled enrollment directory")
    p.add_argument("--test", required=True, help="labeled test directory (<speaker>/<file>.wav)")
    p.add_argument("--methods", type=_method_list, default=list(METHODS),
                   help=f"comma-separated methods (default: {','.join(METHODS)})")
    with_password(p, "needed only to enroll a labeled directory")
    p.add_argument("--raw", action="store_true", help="unnormalized Euclidean distance")
    p.add_argument("--out", help="output file (default: stdout)")
    with_format(p)
    p.set_defaults(func=cmd_bench_accuracy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_help(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 1
    if getattr(args, "trials", None) is not None and args.trials < 1:
        print("voicecrypt: error: --trials must be at least 1", file=sys.stderr)
        return 1
    if getattr(args, "top", 1) < 1:
        print("voicecrypt: error: --top must be at least 1", file=sys.stderr)
        return 1
    try:
        config = load_config(getattr(args, "config", None))
        return args.func(args, config)
    except (VoiceCryptError, ValueError, KeyError, OSError, EOFError) as exc:
        print(f"voicecrypt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
