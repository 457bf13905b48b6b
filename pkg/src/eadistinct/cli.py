"""Command-line entry point: ``ead-distinct {score,sweep,correlate,vocab}``.

Exit codes: 0 success, 1 computation error (empty sets, degenerate
statistics, corpus shortfall), 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

from eadistinct.metrics import DEFAULT_VOCAB_SIZE, EmptyInputError, VocabSpec, ead
from eadistinct.samplers import LENGTH_MATCH, REJECTION_POLICIES
from eadistinct.stats import METHODS, DegenerateSampleError, correlate
from eadistinct.sweep import (
    CorpusSource,
    DesignatedSource,
    InsufficientDataError,
    SweepConfig,
    SweepShortfallError,
    iter_sampled_sets,
    run_sweep,
    write_sweep_outputs,
)
from eadistinct.text import (
    TOKENIZER_MODES,
    CorpusParseError,
    ResponseSet,
    count_ngram_vocab,
    count_vocab,
    read_responses,
)

DEFAULT_SEED = 20220522
VOCAB_ENV = "EAD_DEFAULT_VOCAB"

EXIT_OK, EXIT_COMPUTE, EXIT_IO = 0, 1, 2

logger = logging.getLogger("eadistinct")


class UsageError(Exception):
    pass


def _default_vocab() -> VocabSpec:
    env = os.environ.get(VOCAB_ENV)
    if env:
        try:
            return VocabSpec(int(env), "fixed", f"env:{VOCAB_ENV}")
        except ValueError:
            raise UsageError(f"{VOCAB_ENV}={env!r} is not a positive integer") from None
    return VocabSpec(DEFAULT_VOCAB_SIZE, "fixed", "default (BERT WordPiece vocabulary size)")


def resolve_vocab(args) -> VocabSpec:
    """Pick exactly one vocabulary source: flag, corpus count, env var, default."""
    if getattr(args, "vocab", None) is not None and getattr(args, "vocab_from", None):
        raise UsageError("--vocab and --vocab-from are mutually exclusive")
    n = getattr(args, "n", 1)
    if getattr(args, "vocab_from", None):
        texts = read_responses(args.vocab_from, lenient=args.lenient)
        if n > 1:
            size = count_ngram_vocab(texts, n, args.mode)
            source = "ngram-derived"
        else:
            size, _ = count_vocab(texts, args.mode)
            source = "counted-from-corpus"
        if size < 1:
            raise UsageError(f"vocabulary corpus {args.vocab_from} contains no tokens")
        return VocabSpec(size, source, args.vocab_from)
    if getattr(args, "vocab", None) is not None:
        if args.vocab < 1:
            raise UsageError("--vocab must be a positive integer")
        source = "ngram-derived" if getattr(args, "ngram_vocab", False) else "fixed"
        return VocabSpec(args.vocab, source, "--vocab")
    return _default_vocab()


def _add_common(p: argparse.ArgumentParser, vocab: bool = True) -> None:
    p.add_argument("--mode", choices=TOKENIZER_MODES, default="whitespace",
                   help="tokenizer (default: %(default)s)")
    p.add_argument("--lenient", action="store_true",
                   help="skip unparseable JSON-lines records instead of failing")
    if vocab:
        p.add_argument("--vocab", type=int, default=None, metavar="V",
                       help=f"vocabulary size (default: ${VOCAB_ENV} or {DEFAULT_VOCAB_SIZE}, "
                            "the BERT WordPiece vocabulary size)")
        p.add_argument("--vocab-from", metavar="CORPUS",
                       help="count the vocabulary size from CORPUS with the chosen tokenizer")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ead-distinct",
                                     description="Distinct-n and expectation-adjusted Distinct (EAD).")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score response files with Distinct and EAD")
    p.add_argument("files", nargs="+", help="plain text (one response per line) or .jsonl with a 'response' field")
    p.add_argument("-n", type=int, default=1, help="n-gram order (default: %(default)s)")
    p.add_argument("--ngram-vocab", action="store_true",
                   help="declare --vocab as an n-gram vocabulary size (silences the n>1 warning)")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--percent", action="store_true", help="print scores multiplied by 100")
    _add_common(p)

    p = sub.add_parser("sweep", help="metric value versus response length")
    p.add_argument("--source", choices=("designated", "corpus"), default="designated")
    p.add_argument("--v", type=int, default=DEFAULT_VOCAB_SIZE,
                   help="designated-source vocabulary size (default: %(default)s, the BERT WordPiece "
                        "vocabulary size); also the EAD vocabulary unless --vocab/--vocab-from is given")
    p.add_argument("--corpus", help="corpus for --source corpus")
    p.add_argument("--lengths", default="5,10,15,20,30,40,60,80",
                   help="comma-separated, strictly increasing (default: %(default)s)")
    p.add_argument("--set-size", type=int, default=2000, help="responses per set (default: %(default)s)")
    p.add_argument("--trials", type=int, default=10, help="sets per length (default: %(default)s)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base seed (default: %(default)s)")
    p.add_argument("--rejection", choices=REJECTION_POLICIES, default="resample",
                   help="handling of designated draws >= v (default: %(default)s)")
    p.add_argument("--length-match", choices=LENGTH_MATCH, default="exact")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--dump-sets", metavar="DIR", help="also write every sampled set as JSON-lines")
    _add_common(p)

    p = sub.add_parser("correlate", help="correlate two CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", required=True, help="metric column")
    p.add_argument("--y", required=True, help="reference column (e.g. human scores)")
    p.add_argument("--method", choices=METHODS + ("all",), default="all")
    p.add_argument("--exact", action="store_true", help="exact permutation p-value for Spearman (n <= 10)")

    p = sub.add_parser("vocab", help="count the vocabulary size of a corpus")
    p.add_argument("corpus")
    p.add_argument("-n", type=int, default=1, help="count distinct n-grams instead of tokens")
    p.add_argument("--top", type=int, default=0, help="also print the TOP most frequent tokens")
    _add_common(p, vocab=False)
    return parser


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def cmd_score(args, out) -> int:
    vocab = resolve_vocab(args)
    reports = []
    for path in args.files:
        texts = read_responses(path, lenient=args.lenient)
        try:
            report = ead(ResponseSet.from_texts(texts, args.mode), args.n, vocab)
        except EmptyInputError as exc:
            raise EmptyInputError(f"{path}: {exc}") from None
        reports.append((path, report))
    scale = 100.0 if args.percent else 1.0
    if args.format == "json":
        for path, r in reports:
            d = r.to_dict()
            d["distinct"] *= scale
            d["ead"] *= scale
            d["file"] = path
            d["vocab_origin"] = vocab.origin
            out.write(_dumps(d) + "\n")
    else:
        out.write(f"# vocab_size={vocab.size} vocab_source={vocab.source} origin={vocab.origin}\n")
        out.write(f"{'file':<32} {'n':>2} {'N':>8} {'C':>9} {'distinct':>16} {'ead':>16}\n")
        for path, r in reports:
            out.write(f"{path:<32} {r.n_order:>2} {r.n_distinct:>8} {r.n_total:>9} "
                      f"{r.distinct * scale:>16.12g} {r.ead * scale:>16.12g}\n")
    return EXIT_OK


def _parse_lengths(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--lengths must be comma-separated integers, got {s!r}") from None


def cmd_sweep(args, out) -> int:
    lengths = _parse_lengths(args.lengths)
    if args.source == "corpus":
        if not args.corpus:
            raise UsageError("--source corpus requires --corpus PATH")
        texts = tuple(read_responses(args.corpus, lenient=args.lenient))
        source = CorpusSource(texts, args.mode, args.length_match, args.corpus)
        vocab = resolve_vocab(args)
    else:
        source = DesignatedSource(args.v, args.rejection)
        if args.vocab is not None or args.vocab_from:
            vocab = resolve_vocab(args)
        else:
            vocab = VocabSpec(args.v, "fixed", "--v (designated source)")
    try:
        config = SweepConfig(lengths, args.set_size, args.trials, source, vocab, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    try:
        result = run_sweep(config, workers=args.workers)
    except SweepShortfallError as exc:
        if exc.partial is not None:
            write_sweep_outputs(exc.partial, args.out)
        sys.stderr.write(f"error: corpus shortfall at lengths {','.join(map(str, exc.failed_lengths))}\n")
        for f in exc.failures:
            sys.stderr.write(f"  {f}\n")
        return EXIT_COMPUTE
    paths = write_sweep_outputs(result, args.out)
    if args.dump_sets:
        os.makedirs(args.dump_sets, exist_ok=True)
        for L, t, rs in iter_sampled_sets(config):
            with open(os.path.join(args.dump_sets, f"set_L{L}_t{t}.jsonl"), "w", encoding="utf-8") as fh:
                for resp in rs.responses:
                    fh.write(_dumps({"response": " ".join(map(str, resp))}) + "\n")
    for key in sorted(paths):
        out.write(f"{key}: {paths[key]}\n")
    return EXIT_OK


def _read_columns(path: str, xcol: str, ycol: str) -> tuple[list[float], list[float]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in (xcol, ycol) if c not in fields]
        if missing:
            raise UsageError(f"{path}: no column(s) {', '.join(missing)}; available: {', '.join(fields)}")
        xs, ys = [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                xs.append(float(row[xcol]))
                ys.append(float(row[ycol]))
            except (TypeError, ValueError):
                raise UsageError(f"{path}:{lineno}: non-numeric value in {xcol!r} or {ycol!r}") from None
    return xs, ys


def cmd_correlate(args, out) -> int:
    xs, ys = _read_columns(args.csv, args.x, args.y)
    methods = METHODS if args.method == "all" else (args.method,)
    results = [correlate(xs, ys, m, exact=args.exact).to_dict() for m in methods]
    out.write(json.dumps(results if args.method == "all" else results[0], ensure_ascii=False, indent=2) + "\n")
    return EXIT_OK


def cmd_vocab(args, out) -> int:
    texts = read_responses(args.corpus, lenient=args.lenient)
    if args.n > 1:
        out.write(f"{count_ngram_vocab(texts, args.n, args.mode)}\n")
        return EXIT_OK
    size, census = count_vocab(texts, args.mode)
    out.write(f"{size}\n")
    for tok, freq in sorted(census.items(), key=lambda kv: (-kv[1], kv[0]))[:args.top]:
        out.write(f"{tok}\t{freq}\n")
    return EXIT_OK


COMMANDS = {"score": cmd_score, "sweep": cmd_sweep, "correlate": cmd_correlate, "vocab": cmd_vocab}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (OSError, UnicodeDecodeError, CorpusParseError, UsageError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except (EmptyInputError, DegenerateSampleError, InsufficientDataError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
