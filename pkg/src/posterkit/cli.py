"""``posterkit`` command line: one subcommand per pipeline stage.

Exit status is 0 on success, 1 on a usage error and 2 on a data error.
Diagnostics go to stderr; data goes to the named output files or stdout.
Outputs are written to temporary files and renamed on success, so a failed
run leaves no partial output behind.
"""

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from . import FORMAT_VERSIONS, __version__
from . import analysis, bleu, btselect, corpus_io, ngram_lm, tagging
from . import ter as terlib
from .errors import DataError

logger = logging.getLogger("posterkit")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# helpers


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) in (None, [], "")]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command}: missing required {flags}")


def _exclusive(args, *names):
    given = [n for n in names if getattr(args, n, None) not in (None, [], "")]
    if len(given) > 1:
        raise UsageError(f"{args.command}: conflicting flags " +
                         " and ".join("--" + n.replace("_", "-") for n in given))


def _inputs(*paths):
    for p in paths:
        if p is not None and not os.path.isfile(p):
            raise FileNotFoundError(f"input file not found: {p}")


def _named(values: Sequence[str], flag: str) -> Dict[str, str]:
    out = {}
    for v in values or ():
        name, sep, path = v.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"{flag} expects NAME=FILE, got {v!r}")
        if name in out:
            raise UsageError(f"{flag}: name {name!r} given twice")
        out[name] = path
    return out


def _emit(args, text: str) -> Optional[str]:
    if getattr(args, "output", None):
        with corpus_io.atomic_open(args.output) as f:
            f.write(text)
        return None
    return text


def _map(fn, items, threads: int):
    if threads <= 1 or len(items) < 2:
        return [fn(*it) for it in items]
    chunk = max(1, len(items) // (threads * 4))
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(_star, [(fn, it) for it in items], chunksize=chunk))


def _star(job):
    fn, it = job
    return fn(*it)


def _score_line(sid, num, den, score) -> str:
    return f"{sid}\t{num}\t{den}\t{_fmt_score(score)}"


def _fmt_score(x: float) -> str:
    return f"{x:.6f}"


def read_scores(path) -> Dict[int, Tuple[float, float, float]]:
    """Per-sentence ``id, numerator, denominator, score`` TSV as written by
    ``ter``/``poster``/``lm-ppl``; header and ``#`` lines are skipped."""
    out = {}
    for lineno, text in corpus_io.iter_text(path):
        if not text or text.startswith("#") or text.startswith("id\t"):
            continue
        fields = text.split("\t")
        if len(fields) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 fields")
        try:
            out[int(fields[0])] = (float(fields[1]), float(fields[2]), float(fields[3]))
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric field") from None
    return out


def _ter_tsv(results: List[terlib.TerResult], ids: Sequence[int]) -> str:
    lines = ["id\tedits\tref_len\tscore"]
    lines += [_score_line(i, r.edits, r.ref_len, r.score) for i, r in zip(ids, results)]
    summary = terlib.corpus_ter(results)
    lines.append(f"#summary\tsentences={summary.sentences}\tmean={_fmt_score(summary.mean)}"
                 f"\tpooled={_fmt_score(summary.pooled)}")
    return "\n".join(lines) + "\n"


def _ratings_sbs(path, systems: Optional[str]):
    scores = analysis.scores_by_system(corpus_io.read_ratings(path), corpus_io.Scheme.SBS)
    if systems:
        names = [s.strip() for s in systems.split(",")]
    else:
        names = list(scores)
    if len(names) != 2:
        raise UsageError(f"need exactly two systems to bin, got {names}")
    for n in names:
        if n not in scores:
            raise DataError(f"{path}: no side-by-side ratings for system {n!r}")
    return analysis.both_intersection(scores[names[0]], scores[names[1]], tuple(names))


def _digests(**paths) -> Dict[str, str]:
    return {k: corpus_io.file_digest(p) for k, p in paths.items() if p}


# ---------------------------------------------------------------------------
# corpus stages


def _read_pairs(args):
    _exclusive(args, "tsv", "src")
    if args.tsv:
        _inputs(args.tsv)
        return corpus_io.read_parallel(args.tsv)
    _need(args, "src", "tgt")
    _inputs(args.src, args.tgt)
    return corpus_io.read_parallel(args.src, args.tgt)


def _write_pairs(args, pairs):
    _exclusive(args, "out_tsv", "out_src")
    if args.out_src or args.out_tgt:
        _need(args, "out_src", "out_tgt")
        corpus_io.write_parallel(pairs, args.out_src, args.out_tgt)
        return None
    text = "".join(f"{p.src.text}\t{p.tgt.text}\n" for p in pairs)
    if args.out_tsv:
        with corpus_io.atomic_open(args.out_tsv) as f:
            f.write(text)
        return None
    return text


def cmd_filter(args):
    pairs = _read_pairs(args)
    kept = corpus_io.filter_pairs(pairs, args.max_len, args.max_ratio)
    logger.info("filter: kept %d of %d pairs", len(kept), len(pairs))
    return _write_pairs(args, kept)


def cmd_dedup(args):
    pairs = _read_pairs(args)
    kept = corpus_io.dedup(pairs)
    logger.info("dedup: kept %d of %d pairs", len(kept), len(pairs))
    return _write_pairs(args, kept)


# ---------------------------------------------------------------------------
# tagging


def cmd_tag(args):
    _need(args, "input", "output")
    _exclusive(args, "train", "model")
    if not (args.train or args.model):
        raise UsageError("tag: give --train CONLLU or --model JSON")
    _inputs(args.input, args.train, args.model)
    if args.train:
        corpus = tagging.read_conllu(args.train, args.column, args.tagset)
        tagger = tagging.train_tagger(corpus)
    else:
        with open(args.model, encoding="utf-8") as f:
            tagger = tagging.LexiconTagger.from_json(f.read())
    sentences = [tagging.tag(tagger, s.tokens, s.id) for s in corpus_io.read_lines(args.input)]
    if args.save_model:
        with corpus_io.atomic_open(args.save_model) as f:
            f.write(tagger.to_json() + "\n")
    tagging.write_conllu(sentences, args.output, args.column)


def cmd_map_tags(args):
    _need(args, "input", "output")
    _inputs(args.input, args.mapping)
    table = tagging.read_mapping(args.mapping) if args.mapping else tagging.tiger_to_ud()
    sentences = tagging.read_conllu(args.input, args.column, args.tagset)
    mapped = [tagging.map_tagset(s, table, args.target_tagset) for s in sentences]
    tagging.write_conllu(mapped, args.output, args.out_column)


# ---------------------------------------------------------------------------
# metrics


def _score_ter(pairs, threads):
    return _map(terlib.ter, pairs, threads)


def cmd_ter(args):
    _need(args, "hyp", "ref")
    _inputs(args.hyp, args.ref)
    hyps, refs = corpus_io.read_lines(args.hyp), corpus_io.read_lines(args.ref)
    if len(hyps) != len(refs):
        raise DataError(f"{len(hyps)} hypothesis lines but {len(refs)} reference lines")
    results = _score_ter([(h.tokens, r.tokens) for h, r in zip(hyps, refs)], args.threads)
    return _emit(args, _ter_tsv(results, [h.id for h in hyps]))


def cmd_poster(args):
    _need(args, "hyp", "ref")
    _inputs(args.hyp, args.ref)
    hyp_col = args.hyp_column or args.column
    ref_col = args.ref_column or args.column
    hyps = tagging.read_conllu(args.hyp, hyp_col, args.tagset)
    refs = tagging.read_conllu(args.ref, ref_col, args.tagset)
    if len(hyps) != len(refs):
        raise DataError(f"{len(hyps)} hypothesis sentences but {len(refs)} reference sentences")
    for h, r in zip(hyps, refs):
        if h.tagset != r.tagset:
            raise DataError(f"sentence {h.id}: tagset mismatch {h.tagset!r} vs {r.tagset!r}")
        if not r.tags:
            raise terlib.UndefinedScoreError(f"sentence {r.id}: empty reference")
    results = _score_ter([(h.tags, r.tags) for h, r in zip(hyps, refs)], args.threads)
    return _emit(args, _ter_tsv(results, [h.id for h in hyps]))


def cmd_tau(args):
    _need(args, "align")
    _inputs(args.align, args.src, args.tgt)
    link_sets = corpus_io.read_alignments(args.align)
    if args.src and args.tgt:
        src, tgt = corpus_io.read_lines(args.src), corpus_io.read_lines(args.tgt)
        if not len(src) == len(tgt) == len(link_sets):
            raise DataError("alignment, source and target files differ in line count")
        for ls, s, t in zip(link_sets, src, tgt):
            ls.validate_against(len(s), len(t))
    lines = ["id\tconcordant\tdiscordant\ttau"]
    taus = []
    for ls in link_sets:
        r = terlib.kendall_tau(ls)
        value = _fmt_score(r.tau) if r.defined else "NA"
        if r.defined:
            taus.append(r.tau)
        lines.append(f"{ls.id}\t{r.concordant}\t{r.discordant}\t{value}")
    mean = _fmt_score(sum(taus) / len(taus)) if taus else "NA"
    lines.append(f"#summary\tsentences={len(link_sets)}\tdefined={len(taus)}\tmean={mean}")
    return _emit(args, "\n".join(lines) + "\n")


def cmd_bleu(args):
    _need(args, "hyp", "ref")
    _inputs(args.hyp, args.ref)
    hyps = [t for _, t in corpus_io.iter_text(args.hyp)]
    refs = [t for _, t in corpus_io.iter_text(args.ref)]
    res = bleu.corpus_bleu(hyps, refs, smoothing=args.smooth, tokenize=args.tok)
    prec = "/".join(f"{p:.1f}" for p in res.precisions)
    ratio = res.hyp_len / res.ref_len if res.ref_len else 0.0
    line = (f"BLEU = {res.score:.2f} {prec} (BP = {res.brevity_penalty:.3f} ratio = {ratio:.3f} "
            f"hyp_len = {res.hyp_len} ref_len = {res.ref_len})")
    sig = bleu.signature(args.tok, args.smooth, lang=args.lang)
    return _emit(args, f"{sig} = {res.score:.2f}\n{line}\n")


# ---------------------------------------------------------------------------
# language models


def _token_lists(path):
    return [s.tokens for s in corpus_io.read_lines(path)]


def cmd_lm_train(args):
    _need(args, "input", "output")
    _inputs(args.input)
    if args.order < 1:
        raise UsageError("lm-train: --order must be >= 1")
    if not 0 <= args.discount < 1:
        raise UsageError("lm-train: --discount must be in [0, 1)")
    model = ngram_lm.train(_token_lists(args.input), args.order, args.discount, args.unk_threshold)
    ngram_lm.dump_arpa(model, args.output)


def cmd_lm_ppl(args):
    _need(args, "model", "input")
    _inputs(args.model, args.input)
    model = ngram_lm.load_arpa(args.model)
    sentences = corpus_io.read_lines(args.input)
    if not sentences:
        raise DataError(f"{args.input}: empty corpus")
    scores = [model.score_sentence(s.tokens) for s in sentences]
    total = sum(lp for lp, _ in scores)
    events = sum(n for _, n in scores)
    ppl = 10.0 ** (-total / events)
    lines = ["id\tlog10prob\tevents\tppl"]
    lines += [_score_line(s.id, repr(lp), n, 10.0 ** (-lp / n)) for s, (lp, n) in zip(sentences, scores)]
    lines.append(f"#summary\tsentences={len(sentences)}\tevents={events}\tppl={_fmt_score(ppl)}")
    return _emit(args, "\n".join(lines) + "\n")


def cmd_lm_contrast(args):
    _need(args, "nlm", "tlm", "system")
    systems = _named(args.system, "--system")
    _inputs(args.nlm, args.tlm, args.ratings, *systems.values())
    nlm, tlm = ngram_lm.load_arpa(args.nlm), ngram_lm.load_arpa(args.tlm)
    corpora = {name: {s.id: s.tokens for s in corpus_io.read_lines(p)} for name, p in systems.items()}
    binned = _ratings_sbs(args.ratings, args.systems or ",".join(systems)) if args.ratings else None
    table = ngram_lm.contrast_report(nlm, tlm, corpora, binned, not args.all_rated)
    table.inputs = _digests(nlm=args.nlm, tlm=args.tlm, ratings=args.ratings, **systems)
    return _emit(args, table.render(args.format))


# ---------------------------------------------------------------------------
# analysis


def cmd_bins(args):
    _need(args, "ratings")
    _inputs(args.ratings)
    binned = _ratings_sbs(args.ratings, args.systems)
    table = analysis.bin_percentages(binned)
    table.inputs = _digests(ratings=args.ratings)
    return _emit(args, table.render(args.format))


def _metric_values(paths: Dict[str, str], reducer: str):
    out = {}
    for name, path in paths.items():
        rows = read_scores(path)
        if reducer == "mean":
            out[name] = {i: r[2] for i, r in rows.items()}
        else:
            out[name] = {i: (r[0], r[1]) for i, r in rows.items()}
    return out


def cmd_aggregate(args):
    _need(args, "ratings", "scores")
    scores = _named(args.scores, "--scores")
    _inputs(args.ratings, *scores.values())
    binned = _ratings_sbs(args.ratings, args.systems or ",".join(scores))
    table = analysis.aggregate_by_bin(
        _metric_values(scores, args.reducer), binned, not args.all_rated,
        analysis.REDUCERS[args.reducer], caption=args.caption or "Per-sentence metric by adequacy bin")
    table.inputs = _digests(ratings=args.ratings, **scores)
    return _emit(args, table.render(args.format))


# ---------------------------------------------------------------------------
# back-translation selection


def cmd_bt_select(args):
    _need(args, "input", "mode", "out_src", "out_tgt", "provenance")
    _inputs(args.input)
    try:
        config = btselect.BtSelectionConfig.parse(args.mode, args.tag_sup, args.tag_unsup)
    except DataError as e:
        raise UsageError(f"bt-select: {e}") from None
    base = 10.0 if args.log_base == "10" else math.e
    pairs = btselect.score_pairs(btselect.read_bt_records(args.input, base))
    outcome = btselect.select(pairs, config)
    btselect.write_selection(outcome, config, args.out_src, args.out_tgt, args.provenance)
    counts = outcome.counts
    logger.info("bt-select: %d unsupervised, %d supervised", counts["unsup"], counts["sup"])


# ---------------------------------------------------------------------------
# report


CAPTIONS = {
    "2": "Share of sentences per adequacy bin (%); Both = same bin for both systems",
    "4": "posTER of translations against the source tag sequence (lower = more monotonic)",
    "5": "posTER of system output against the human reference, grouped by adequacy",
    "6": "Perplexity of system output under natural-text and translated-text LMs, by adequacy",
}


def cmd_report(args):
    _need(args, "table")
    t = args.table
    if t == "2":
        _need(args, "ratings")
        _inputs(args.ratings)
        table = analysis.bin_percentages(_ratings_sbs(args.ratings, args.systems), CAPTIONS[t])
        table.inputs = _digests(ratings=args.ratings)
    elif t == "4":
        _need(args, "scores")
        scores = _named(args.scores, "--scores")
        _inputs(*scores.values())
        reduce = analysis.REDUCERS[args.reducer]
        values = _metric_values(scores, args.reducer)
        cells = [[reduce([values[n][i] for i in sorted(values[n])]) for n in scores]]
        table = analysis.ReportTable(CAPTIONS[t], ["Src"], list(scores), cells, [3] * len(scores))
        table.inputs = _digests(**scores)
    elif t == "5":
        _need(args, "ratings", "scores")
        scores = _named(args.scores, "--scores")
        _inputs(args.ratings, *scores.values())
        binned = _ratings_sbs(args.ratings, args.systems or ",".join(scores))
        table = analysis.aggregate_by_bin(
            _metric_values(scores, args.reducer), binned, not args.all_rated,
            analysis.REDUCERS[args.reducer], CAPTIONS[t], ("Overall", "Low", "Med", "High"))
        table.inputs = _digests(ratings=args.ratings, **scores)
    else:
        _need(args, "ratings", "nlm_scores", "tlm_scores")
        nlm = _named(args.nlm_scores, "--nlm-scores")
        tlm = _named(args.tlm_scores, "--tlm-scores")
        if list(nlm) != list(tlm):
            raise UsageError("report 6: --nlm-scores and --tlm-scores must name the same systems")
        _inputs(args.ratings, *nlm.values(), *tlm.values())
        binned = _ratings_sbs(args.ratings, args.systems or ",".join(nlm))
        parts = []
        for label, paths in (("nLM", nlm), ("tLM", tlm)):
            parts.append(analysis.aggregate_by_bin(
                _metric_values(paths, "ppl"), binned, not args.all_rated,
                analysis.pooled_perplexity, precision=2))
        columns = [f"{lm}:{c}" for lm, p in zip(("nLM", "tLM"), parts) for c in p.column_labels]
        cells = [a + b for a, b in zip(parts[0].cells, parts[1].cells)]
        table = analysis.ReportTable(CAPTIONS[t], parts[0].row_labels, columns, cells,
                                     [2] * len(columns))
        table.inputs = _digests(ratings=args.ratings,
                                **{f"nlm.{k}": v for k, v in nlm.items()},
                                **{f"tlm.{k}": v for k, v in tlm.items()})
    return _emit(args, table.render(args.format))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="posterkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="store_true", help="print tool and format versions")
    parser.add_argument("--config", metavar="FILE", help="key=value defaults for the subcommand")
    parser.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        return p

    def output(p):
        p.add_argument("-o", "--output", help="output file (default stdout)")

    def fmt(p):
        p.add_argument("--format", choices=["tsv", "markdown"], default="tsv")

    def pair_io(p):
        p.add_argument("--src", help="source side, one sentence per line")
        p.add_argument("--tgt", help="target side, one sentence per line")
        p.add_argument("--tsv", help="src<TAB>tgt input instead of --src/--tgt")
        p.add_argument("--out-src")
        p.add_argument("--out-tgt")
        p.add_argument("--out-tsv", help="src<TAB>tgt output (default stdout)")

    p = add("filter", cmd_filter, "drop overlong and length-unbalanced pairs")
    pair_io(p)
    p.add_argument("--max-len", type=int, default=250)
    p.add_argument("--max-ratio", type=float, default=1.5)

    p = add("dedup", cmd_dedup, "drop repeated (src, tgt) pairs")
    pair_io(p)

    p = add("tag", cmd_tag, "POS-tag plain text with a lexicon tagger")
    p.add_argument("--input", help="plain text to tag")
    p.add_argument("--train", help="CoNLL-U training corpus")
    p.add_argument("--model", help="saved tagger JSON")
    p.add_argument("--save-model", help="write the trained tagger here")
    p.add_argument("--column", choices=["upos", "xpos"], default="upos")
    p.add_argument("--tagset")
    output(p)

    p = add("map-tags", cmd_map_tags, "project tags through a mapping table")
    p.add_argument("--input", help="CoNLL-U file")
    p.add_argument("--mapping", help="source<TAB>target TSV (default: shipped TIGER to UD)")
    p.add_argument("--column", choices=["upos", "xpos"], default="xpos")
    p.add_argument("--tagset", default="tiger")
    p.add_argument("--target-tagset", default="ud")
    p.add_argument("--out-column", choices=["upos", "xpos"], default="upos")
    output(p)

    p = add("ter", cmd_ter, "TER between two plain-text symbol files")
    p.add_argument("--hyp")
    p.add_argument("--ref")
    output(p)

    p = add("poster", cmd_poster, "TER over CoNLL-U tag sequences")
    p.add_argument("--hyp", help="hypothesis CoNLL-U")
    p.add_argument("--ref", help="reference CoNLL-U (the source for monotonicity)")
    p.add_argument("--column", choices=["upos", "xpos"], default="upos")
    p.add_argument("--hyp-column", choices=["upos", "xpos"])
    p.add_argument("--ref-column", choices=["upos", "xpos"])
    p.add_argument("--tagset")
    output(p)

    p = add("tau", cmd_tau, "Kendall's tau over Pharaoh alignments")
    p.add_argument("--align")
    p.add_argument("--src", help="optional source text to validate link indices")
    p.add_argument("--tgt", help="optional target text to validate link indices")
    output(p)

    p = add("bleu", cmd_bleu, "corpus BLEU")
    p.add_argument("--hyp")
    p.add_argument("--ref")
    p.add_argument("--tok", choices=["13a", "none"], default="13a")
    p.add_argument("--smooth", choices=["exp", "none"], default="exp")
    p.add_argument("--lang", help="language pair recorded in the signature")
    output(p)

    p = add("lm-train", cmd_lm_train, "train an n-gram LM and write ARPA")
    p.add_argument("--input")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--discount", type=float, default=0.75)
    p.add_argument("--unk-threshold", type=int, default=1)
    output(p)

    p = add("lm-ppl", cmd_lm_ppl, "per-sentence and corpus perplexity")
    p.add_argument("--model")
    p.add_argument("--input")
    output(p)

    p = add("lm-contrast", cmd_lm_contrast, "natural vs translated LM perplexity table")
    p.add_argument("--nlm", help="ARPA model trained on natural text")
    p.add_argument("--tlm", help="ARPA model trained on translated text")
    p.add_argument("--system", action="append", help="NAME=FILE system output")
    p.add_argument("--ratings", help="side-by-side ratings to bin by adequacy")
    p.add_argument("--systems", help="the two rated system names, comma-separated")
    p.add_argument("--all-rated", action="store_true",
                   help="bin each system by its own rating instead of the Both sets")
    fmt(p)
    output(p)

    p = add("bins", cmd_bins, "adequacy bin percentages")
    p.add_argument("--ratings")
    p.add_argument("--systems")
    fmt(p)
    output(p)

    p = add("aggregate", cmd_aggregate, "aggregate a per-sentence metric by adequacy bin")
    p.add_argument("--ratings")
    p.add_argument("--scores", action="append", help="NAME=FILE per-sentence score TSV")
    p.add_argument("--systems")
    p.add_argument("--reducer", choices=sorted(analysis.REDUCERS), default="pooled")
    p.add_argument("--all-rated", action="store_true")
    p.add_argument("--caption")
    fmt(p)
    output(p)

    p = add("bt-select", cmd_bt_select, "select supervised or unsupervised back-translations")
    p.add_argument("--input", help="id, src, sup_bt, sup_logP, unsup_bt, unsup_logP TSV")
    p.add_argument("--mode", help="threshold:T or quantile:q")
    p.add_argument("--tag-sup", default="")
    p.add_argument("--tag-unsup", default="")
    p.add_argument("--log-base", choices=["e", "10"], default="e")
    p.add_argument("--out-src", help="tagged back-translations")
    p.add_argument("--out-tgt", help="original monolingual sentences")
    p.add_argument("--provenance", help="id, chosen, delta_p TSV")

    p = add("report", cmd_report, "render table layouts from stage outputs")
    p.add_argument("--table", choices=["2", "4", "5", "6"])
    p.add_argument("--ratings")
    p.add_argument("--systems")
    p.add_argument("--scores", action="append", help="NAME=FILE posTER TSV")
    p.add_argument("--nlm-scores", action="append", help="NAME=FILE lm-ppl TSV")
    p.add_argument("--tlm-scores", action="append", help="NAME=FILE lm-ppl TSV")
    p.add_argument("--reducer", choices=["mean", "pooled"], default="pooled")
    p.add_argument("--all-rated", action="store_true")
    fmt(p)
    output(p)
    return parser


def _apply_config(parser: _Parser, argv: List[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config or not args.command:
        return args
    if not os.path.isfile(args.config):
        raise FileNotFoundError(f"config file not found: {args.config}")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for lineno, text in corpus_io.iter_text(args.config):
        text = text.strip()
        if not text or text.startswith("#"):
            continue
        key, sep, value = text.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        if not sep or key not in actions or key == "help":
            raise UsageError(f"{args.config}:{lineno}: unknown setting {key!r} for {args.command}")
        action = actions[key]
        value = value.strip()
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes")
        elif isinstance(action, argparse._AppendAction):
            defaults.setdefault(key, []).append(value)
        else:
            try:
                defaults[key] = action.type(value) if action.type else value
            except ValueError:
                raise UsageError(f"{args.config}:{lineno}: bad value for {key}") from None
            if action.choices is not None and defaults[key] not in action.choices:
                raise UsageError(f"{args.config}:{lineno}: {key} must be one of {action.choices}")
    appended = {k: v for k, v in defaults.items() if isinstance(actions[k], argparse._AppendAction)}
    sub.set_defaults(**{k: v for k, v in defaults.items() if k not in appended})
    # explicit flags win, including repeated ones over a config list
    args = parser.parse_args(argv)
    for key, values in appended.items():
        if getattr(args, key) is None:
            setattr(args, key, values)
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 1),
                            format="%(levelname)s: %(message)s", stream=sys.stderr)
        if args.version:
            formats = " ".join(f"{k}/{v}" for k, v in FORMAT_VERSIONS.items())
            print(f"posterkit {__version__} (formats: {formats})")
            return EXIT_OK
        if not args.command:
            raise UsageError("a subcommand is required (see --help)")
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        text = args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    if text:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
