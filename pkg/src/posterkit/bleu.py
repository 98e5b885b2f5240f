"""Corpus BLEU matching the reference tool's ``smooth.exp`` / ``tok.13a`` setup."""

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from . import __version__
from .errors import DataError

MAX_ORDER = 4

_13A_RULES = [
    # punctuation and symbols in the ASCII ranges, always split off
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    # period and comma unless preceded by a digit
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    # period and comma unless followed by a digit
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    # dash after a digit
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
]


def tokenize_13a(text: str) -> List[str]:
    """mteval-v13a tokenization, returned as a token list."""
    text = text.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    if "&" in text:
        text = (text.replace("&quot;", '"').replace("&amp;", "&")
                .replace("&lt;", "<").replace("&gt;", ">"))
    text = f" {text} "
    for pattern, repl in _13A_RULES:
        text = pattern.sub(repl, text)
    return text.split()


def tokenize_none(text: str) -> List[str]:
    return text.split()


TOKENIZERS = {"13a": tokenize_13a, "none": tokenize_none}


@dataclass(frozen=True)
class BleuResult:
    precisions: Tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    score: float
    counts: Tuple[int, ...] = ()
    totals: Tuple[int, ...] = ()


def _ngrams(tokens: Sequence[str], max_order: int = MAX_ORDER) -> Counter:
    c = Counter()
    for n in range(1, max_order + 1):
        for i in range(len(tokens) - n + 1):
            c[tuple(tokens[i:i + n])] += 1
    return c


def sentence_stats(hyp: Sequence[str], ref: Sequence[str]):
    """Clipped match counts and totals per order, plus both lengths."""
    h, r = _ngrams(hyp), _ngrams(ref)
    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    for gram, count in h.items():
        n = len(gram) - 1
        total[n] += count
        correct[n] += min(count, r.get(gram, 0))
    return correct, total, len(hyp), len(ref)


def compute_bleu(correct, total, hyp_len, ref_len, smoothing="exp") -> BleuResult:
    precisions = [0.0] * MAX_ORDER
    smooth = 1.0
    for n in range(MAX_ORDER):
        if total[n] == 0:
            break
        if correct[n] == 0:
            if smoothing == "exp":
                smooth *= 2
                precisions[n] = 100.0 / (smooth * total[n])
        else:
            precisions[n] = 100.0 * correct[n] / total[n]

    if hyp_len == 0:
        bp = 0.0
    elif hyp_len < ref_len:
        bp = math.exp(1 - ref_len / hyp_len)
    else:
        bp = 1.0

    # no matching n-gram of any order scores 0 outright, as the reference tool does
    if bp == 0.0 or not any(correct) or min(precisions) == 0.0:
        score = 0.0
    else:
        # geometric mean over fractions so a perfect match gives exactly 100
        score = 100.0 * bp * math.exp(sum(math.log(p / 100.0) for p in precisions) / MAX_ORDER)
    return BleuResult(tuple(precisions), bp, hyp_len, ref_len, score,
                      tuple(correct), tuple(total))


def corpus_bleu(hyps: Sequence[str], refs: Sequence[str], smoothing: str = "exp",
                tokenize: str = "13a", lowercase: bool = False) -> BleuResult:
    """Single-reference corpus BLEU over raw (untokenized) strings.

    Statistics are pooled over the corpus before the precisions are formed.
    With ``smoothing="exp"`` the k-th order that has no matches gets
    precision ``1 / (2**k * total)``.
    """
    if len(hyps) != len(refs):
        raise DataError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        raise DataError("empty corpus")
    if smoothing not in ("exp", "none"):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    tok = TOKENIZERS[tokenize]
    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    hyp_len = ref_len = 0
    for h, r in zip(hyps, refs):
        if lowercase:
            h, r = h.lower(), r.lower()
        c, t, hl, rl = sentence_stats(tok(h), tok(r))
        for n in range(MAX_ORDER):
            correct[n] += c[n]
            total[n] += t[n]
        hyp_len += hl
        ref_len += rl
    return compute_bleu(correct, total, hyp_len, ref_len, smoothing)


def signature(tokenize="13a", smoothing="exp", lowercase=False, lang=None) -> str:
    parts = ["BLEU", f"case.{'lc' if lowercase else 'mixed'}"]
    if lang:
        parts.append(f"lang.{lang}")
    parts += ["numrefs.1", f"smooth.{smoothing}", f"tok.{tokenize}", f"version.{__version__}"]
    return "+".join(parts)
