"""Command-line interface.

Subcommands: normalize, train, encode, decode, stats, compose, align,
freq, crosslang, intersect, crop.  Every command prints a one-object
JSON summary to stdout and writes its declared artifacts; `-` means
stdin/stdout for corpus-like arguments.  Exit codes: 0 success, 1 usage
error, 2 data error.  Flags may be defaulted through CODETOK_*
environment variables (e.g. CODETOK_SEED, CODETOK_THREADS).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import analysis, codec, model as model_store
from .atoms import LANG_BRACED, LANG_INDENTED, NormalizedSeq, deserialize
from .bpe import train_bpe
from .errors import CodetokError
from .normalize import normalize_braced, normalize_indented
from .unigram import train_unigram


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _env(name, fallback):
    return os.environ.get(f"CODETOK_{name.upper()}", fallback)


def _read_lines(path):
    if path == "-":
        return sys.stdin.read().splitlines()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read().splitlines()


def _read_corpus(path) -> list[NormalizedSeq]:
    return [deserialize(line) for line in _read_lines(path)]


def _write_lines(path, lines):
    if path == "-":
        for line in lines:
            sys.stdout.write(line + "\n")
        return
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")


def _emit(summary: dict):
    print(json.dumps(summary, sort_keys=True))


def _normalize_one(args):
    path, lang = args
    with open(path, "r", encoding="utf-8") as fh:
        source = fh.read()
    fn = normalize_indented if lang == LANG_INDENTED else normalize_braced
    return fn(source, path=path).serialize()


def cmd_normalize(args) -> int:
    paths = list(args.inputs)
    if args.manifest:
        paths.extend(p for p in _read_lines(args.manifest) if p.strip())
    if not paths:
        raise CodetokError("no input files given")
    jobs = [(p, args.lang) for p in paths]
    lines = []
    skipped = 0
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = pool.map(_normalize_one_safe, jobs, chunksize=16)
            for line, err in results:
                if err is not None:
                    if not args.skip_errors:
                        raise CodetokError(err)
                    skipped += 1
                else:
                    lines.append(line)
    else:
        for job in jobs:
            line, err = _normalize_one_safe(job)
            if err is not None:
                if not args.skip_errors:
                    raise CodetokError(err)
                skipped += 1
            else:
                lines.append(line)
    _write_lines(args.out, lines)
    _emit({"command": "normalize", "files": len(paths), "skipped": skipped,
           "sequences": len(lines), "out": args.out})
    return 0


def _normalize_one_safe(job):
    try:
        return _normalize_one(job), None
    except CodetokError as exc:
        return None, str(exc)


def cmd_train(args) -> int:
    corpus = _read_corpus(args.inp)
    if args.sample and args.sample < len(corpus):
        corpus = random.Random(args.seed).sample(corpus, args.sample)
    if args.algo == "bpe":
        trained = train_bpe(corpus, level=args.level, vocab_size=args.vocab,
                            coverage=args.coverage)
    else:
        trained = train_unigram(
            corpus, level=args.level, vocab_size=args.vocab,
            coverage=args.coverage, seed_multiplier=args.seed_multiplier,
            shrink_factor=args.shrink_factor, em_iterations=args.em_iterations)
    model_store.save(trained, args.out)
    _emit({"command": "train", "algorithm": args.algo, "level": args.level,
           "vocab_size": trained.vocab_size, "alphabet": len(trained.alphabet),
           "sequences": len(corpus), "out": args.out,
           "checksum": trained.identity()})
    return 0


def cmd_encode(args) -> int:
    m = model_store.load(args.model)
    corpus = _read_corpus(args.inp)
    lines = []
    for i, seq in enumerate(corpus):
        if args.sample_segmentation:
            ts = codec.sample_encode(m, seq, alpha=args.alpha,
                                     rng_seed=args.seed + i,
                                     add_bos=args.bos, add_eos=args.eos)
        else:
            ts = codec.encode(m, seq, add_bos=args.bos, add_eos=args.eos)
        if args.max_len:
            ts = codec.clip(ts, args.max_len)
        lines.append(" ".join(str(i) for i in ts.ids))
    _write_lines(args.out, lines)
    _emit({"command": "encode", "sequences": len(lines), "out": args.out,
           "model": m.identity()})
    return 0


def cmd_decode(args) -> int:
    m = model_store.load(args.model)
    lines = []
    for raw in _read_lines(args.inp):
        ids = [int(tok) for tok in raw.split()]
        lines.append(codec.decode(m, ids).serialize())
    _write_lines(args.out, lines)
    _emit({"command": "decode", "sequences": len(lines), "out": args.out})
    return 0


def cmd_stats(args) -> int:
    models = [model_store.load(p) for p in [args.baseline] + args.models]
    labels = [_label(p) for p in [args.baseline] + args.models]
    corpus = _read_corpus(args.inp)
    report = analysis.length_report(models, corpus, baseline_index=0,
                                    labels=labels)
    doc = report.to_dict()
    if args.out:
        _write_lines(args.out, [json.dumps(doc, indent=1)])
    if args.table:
        _write_lines(args.table, list(_length_table(report)))
    if args.fig:
        from . import plots
        plots.render_length_report(report, args.fig)
    _emit({"command": "stats", **doc})
    return 0


def _length_table(report):
    width = max(len(e.label) for e in report.entries) + 2
    yield f"{'model':<{width}}{'avg tokens':>12}{'vs base':>10}"
    for e in report.entries:
        yield f"{e.label:<{width}}{e.average_tokens:>12.2f}{e.delta_pct:>+9.1f}%"


def _label(path):
    name = os.path.basename(str(path))
    return name[:-len(".codetok.json")] if name.endswith(".codetok.json") else name


def cmd_compose(args) -> int:
    m = model_store.load(args.model)
    report = analysis.vocab_composition(m)
    doc = report.to_dict()
    if args.out:
        _write_lines(args.out, [json.dumps(doc, indent=1)])
    _emit({"command": "compose", "model": _label(args.model), **doc})
    return 0


def cmd_align(args) -> int:
    a = model_store.load(args.model_a)
    b = model_store.load(args.model_b)
    corpus = _read_corpus(args.inp)
    report = analysis.alignment_report(
        a, b, corpus, sample_size=args.sample_size, rng_seed=args.seed,
        labels=(_label(args.model_a), _label(args.model_b)))
    doc = report.to_dict()
    if args.out:
        _write_lines(args.out, [json.dumps(doc, indent=1)])
    _emit({"command": "align", **doc})
    return 0


def cmd_freq(args) -> int:
    m = model_store.load(args.model)
    corpus = _read_corpus(args.inp)
    prof = analysis.frequency_profile(m, corpus, label=_label(args.model))
    _write_lines(args.out, list(prof.to_csv_rows()))
    if args.json:
        _write_lines(args.json, [json.dumps(prof.to_dict(), indent=1)])
    if args.fig:
        from . import plots
        plots.render_frequency_profile([prof], args.fig)
    _emit({"command": "freq", "model": prof.model_label,
           "distinct_tokens": len(prof.entries),
           "total_tokens": prof.total_tokens, "out": args.out})
    return 0


def cmd_crosslang(args) -> int:
    m = model_store.load(args.model)
    report = analysis.cross_language_report(
        m, _read_corpus(args.in_a), _read_corpus(args.in_b),
        f_hi=args.f_hi, f_lo=args.f_lo)
    doc = report.to_dict()
    if args.out:
        _write_lines(args.out, [json.dumps(doc, indent=1)])
    if args.fig:
        from . import plots
        plots.render_crosslang(report, args.fig)
    _emit({"command": "crosslang", **doc})
    return 0


def cmd_intersect(args) -> int:
    m = model_store.load(args.model)
    src = _read_corpus(args.in_src)
    tgt = _read_corpus(args.in_tgt)
    if len(src) != len(tgt):
        raise CodetokError(
            f"parallel corpora differ in length: {len(src)} vs {len(tgt)}")
    report = analysis.io_intersection(m, list(zip(src, tgt)))
    doc = report.to_dict()
    if args.out:
        _write_lines(args.out, [json.dumps(doc, indent=1)])
    _emit({"command": "intersect", **doc})
    return 0


def cmd_crop(args) -> int:
    models = [model_store.load(p) for p in args.models]
    corpus = _read_corpus(args.inp)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = [[] for _ in models]
    for seq in corpus:
        tokenized = [codec.encode(m, seq) for m in models]
        cropped = codec.fair_crop(tokenized, max_len=args.max_len)
        for sink, ts in zip(outputs, cropped):
            sink.append(" ".join(str(i) for i in ts.ids))
    paths = []
    for path, lines in zip(args.models, outputs):
        out = os.path.join(args.out_dir, _label(path) + ".ids")
        _write_lines(out, lines)
        paths.append(out)
    _emit({"command": "crop", "sequences": len(corpus), "outputs": paths})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="codetok", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="lex raw source files into a corpus")
    p.add_argument("inputs", nargs="*", help="source files")
    p.add_argument("--manifest", help="file listing one source path per line")
    p.add_argument("--lang", choices=[LANG_INDENTED, LANG_BRACED], required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--threads", type=int, default=int(_env("threads", 1)))
    p.add_argument("--skip-errors", action="store_true",
                   help="drop unlexable files instead of failing")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("train", help="train a subword model on a corpus")
    p.add_argument("--algo", choices=["bpe", "unigram"], required=True)
    p.add_argument("--level", type=int, choices=range(5), required=True)
    p.add_argument("--vocab", type=int, required=True)
    p.add_argument("--coverage", type=float,
                   default=float(_env("coverage", 0.9999)))
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sample", type=int, default=0,
                   help="train on a seeded random subset of sequences")
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--seed-multiplier", type=int, default=10)
    p.add_argument("--shrink-factor", type=float, default=0.75)
    p.add_argument("--em-iterations", type=int, default=2)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("encode", help="corpus lines -> id lines")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="inp", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--max-len", type=int, default=0, help="clip length")
    p.add_argument("--bos", action="store_true")
    p.add_argument("--eos", action="store_true")
    p.add_argument("--sample-segmentation", action="store_true",
                   help="stochastic segmentation (unigram models)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("decode", help="id lines -> corpus lines")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="inp", default="-")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_decode)

    p = sub.add_parser("stats", help="average-length report")
    p.add_argument("--baseline", required=True)
    p.add_argument("--models", nargs="+", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.add_argument("--table", help="aligned-column text table output")
    p.add_argument("--fig", help="bar-chart PNG output")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("compose", help="vocabulary composition report")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_compose)

    p = sub.add_parser("align", help="native-subtokenization alignment")
    p.add_argument("--model-a", required=True)
    p.add_argument("--model-b", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--sample-size", type=int, default=1000)
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--out")
    p.set_defaults(fn=cmd_align)

    p = sub.add_parser("freq", help="token frequency profile (CSV)")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--json")
    p.add_argument("--fig", help="log-log rank/frequency PNG")
    p.set_defaults(fn=cmd_freq)

    p = sub.add_parser("crosslang", help="cross-language vocabulary contrast")
    p.add_argument("--model", required=True)
    p.add_argument("--in-a", required=True)
    p.add_argument("--in-b", required=True)
    p.add_argument("--f-hi", type=float, default=100.0)
    p.add_argument("--f-lo", type=float, default=1.0)
    p.add_argument("--out")
    p.add_argument("--fig")
    p.set_defaults(fn=cmd_crosslang)

    p = sub.add_parser("intersect", help="input/output textual-subtoken overlap")
    p.add_argument("--model", required=True)
    p.add_argument("--in-src", required=True)
    p.add_argument("--in-tgt", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_intersect)

    p = sub.add_parser("crop", help="fair cropping across models")
    p.add_argument("--models", nargs="+", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--max-len", type=int, default=510)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_crop)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.fn(args)
    except (CodetokError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
