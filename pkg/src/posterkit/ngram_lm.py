"""Back-off n-gram language models with interpolated absolute discounting.

Probabilities are stored as log10 values in ARPA layout: every seen n-gram
keeps its interpolated probability, and every history keeps the weight that
scales the lower-order distribution for continuations it never saw.

Estimates, for a history ``h`` seen ``c(h)`` times with ``N1+(h)`` distinct
continuations and discount ``D``::

    p(w | h) = max(c(h, w) - D, 0) / c(h) + D * N1+(h) / c(h) * p(w | h[1:])

At the unigram level the lower-order distribution is uniform over the
vocabulary (``</s>`` and ``<unk>`` included, ``<s>`` excluded).
"""

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .analysis import BINS, BinnedSet, ReportTable, pooled_perplexity
from .corpus_io import atomic_open, iter_text
from .errors import DataError, ParseError

logger = logging.getLogger(__name__)

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
# ARPA convention for log10(0)
LOG_ZERO = -99.0

Ngram = Tuple[str, ...]


@dataclass
class NgramModel:
    order: int
    logprobs: List[Dict[Ngram, float]]
    backoffs: Dict[Ngram, float]
    vocab: frozenset
    unk_threshold: int = 1
    discount: Optional[float] = None
    _cache: Dict[Ngram, float] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.order < 1 or len(self.logprobs) != self.order:
            raise DataError(f"model order {self.order} does not match {len(self.logprobs)} tables")

    def map_token(self, token: str) -> str:
        return token if token in self.vocab else UNK

    def logprob(self, word: str, history: Sequence[str] = ()) -> float:
        """log10 p(word | history); unseen words are scored as ``<unk>``."""
        words = [self.map_token(t) if t != BOS else t for t in history]
        words.append(self.map_token(word))
        ngram = tuple(words[-self.order:])
        return self._logprob(ngram)

    def _logprob(self, ngram: Ngram) -> float:
        cached = self._cache.get(ngram)
        if cached is not None:
            return cached
        key = ngram
        total = 0.0
        while True:
            lp = self.logprobs[len(ngram) - 1].get(ngram)
            if lp is not None:
                total += lp
                break
            if len(ngram) == 1:
                raise DataError(f"token {ngram[0]!r} has probability zero under this model")
            total += self.backoffs.get(ngram[:-1], 0.0)
            ngram = ngram[1:]
        self._cache[key] = total
        return total

    def conditional(self, history: Sequence[str]) -> Dict[str, float]:
        """Full distribution over the predictable vocabulary (probabilities)."""
        return {w: 10.0 ** self.logprob(w, history) for w in sorted(self.vocab - {BOS})}

    def score_sentence(self, tokens: Sequence[str]) -> Tuple[float, int]:
        """Summed log10 probability and number of prediction events.

        Every token is predicted plus one ``</s>``; ``<s>`` is context only.
        """
        history = [BOS]
        total = 0.0
        for tok in list(tokens) + [EOS]:
            total += self.logprob(tok, history[-(self.order - 1):] if self.order > 1 else ())
            history.append(self.map_token(tok))
        return total, len(tokens) + 1


def _sentence_ngrams(seq: Sequence[str], order: int):
    for i in range(1, len(seq)):
        for k in range(1, min(order, i + 1) + 1):
            yield tuple(seq[i - k + 1:i + 1])


def count_ngrams(corpus: Iterable[Sequence[str]], order: int, vocab=None) -> List[Counter]:
    counts = [Counter() for _ in range(order)]
    for tokens in corpus:
        if vocab is not None:
            tokens = [t if t in vocab else UNK for t in tokens]
        seq = [BOS] + list(tokens) + [EOS]
        for ng in _sentence_ngrams(seq, order):
            counts[len(ng) - 1][ng] += 1
    return counts


def train(corpus: Sequence[Sequence[str]], order: int = 3, discount: float = 0.75,
          unk_threshold: int = 1) -> NgramModel:
    """Estimate an interpolated absolute-discounting model.

    Tokens seen fewer than `unk_threshold` times become ``<unk>``. With
    ``discount=0`` the model is maximum likelihood and gives unseen events
    zero probability.
    """
    if order < 1:
        raise DataError("order must be >= 1")
    if not 0 <= discount < 1:
        raise DataError("discount must be in [0, 1)")
    corpus = [list(s) for s in corpus]
    if not corpus:
        raise DataError("cannot train on an empty corpus")

    word_counts = Counter(t for s in corpus for t in s)
    kept = {w for w, c in word_counts.items() if c >= unk_threshold}
    counts = count_ngrams(corpus, order, kept)
    vocab = frozenset(kept | {BOS, EOS, UNK})
    outcomes = len(vocab) - 1  # <s> is never predicted

    logprobs: List[Dict[Ngram, float]] = [dict() for _ in range(order)]
    backoffs: Dict[Ngram, float] = {}

    uni = counts[0]
    n_events = sum(uni.values())
    floor = discount * len(uni) / outcomes
    probs: Dict[Ngram, float] = {}
    for w in sorted(vocab - {BOS}):
        p = (max(uni.get((w,), 0) - discount, 0.0) + floor) / n_events
        if p > 0:
            probs[(w,)] = p
    for k in range(1, order):
        hist_total: Counter = Counter()
        hist_types: Counter = Counter()
        for ng, c in counts[k].items():
            hist_total[ng[:-1]] += c
            hist_types[ng[:-1]] += 1
        for h, total in hist_total.items():
            gamma = discount * hist_types[h] / total
            backoffs[h] = math.log10(gamma) if gamma > 0 else LOG_ZERO
        for ng, c in counts[k].items():
            h = ng[:-1]
            gamma = discount * hist_types[h] / hist_total[h]
            probs[ng] = (c - discount) / hist_total[h] + gamma * probs[ng[1:]]
    for ng, p in probs.items():
        logprobs[len(ng) - 1][ng] = math.log10(p)
    if order > 1:
        logprobs[0][(BOS,)] = LOG_ZERO
    return NgramModel(order, logprobs, backoffs, vocab, unk_threshold, discount)


def perplexity(model: NgramModel, corpus: Iterable[Sequence[str]]) -> float:
    total = 0.0
    events = 0
    for tokens in corpus:
        lp, n = model.score_sentence(tokens)
        total += lp
        events += n
    if events == 0:
        raise DataError("cannot compute perplexity of an empty corpus")
    return 10.0 ** (-total / events)


# ---------------------------------------------------------------------------
# ARPA


def _fmt(value: float, precision: Optional[int]) -> str:
    return repr(float(value)) if precision is None else f"{value:.{precision}f}"


def dump_arpa(model: NgramModel, path, precision: Optional[int] = None) -> None:
    """Write `model` as ARPA text.

    Values are written with full round-trip precision unless `precision`
    (decimal places) is given.
    """
    with atomic_open(path) as f:
        f.write("\\data\\\n")
        for k, table in enumerate(model.logprobs, start=1):
            f.write(f"ngram {k}={len(table)}\n")
        for k, table in enumerate(model.logprobs, start=1):
            f.write(f"\n\\{k}-grams:\n")
            for ng in sorted(table):
                fields = [_fmt(table[ng], precision), " ".join(ng)]
                if k < model.order and ng in model.backoffs:
                    fields.append(_fmt(model.backoffs[ng], precision))
                f.write("\t".join(fields) + "\n")
        f.write("\n\\end\\\n")


_SECTION = re.compile(r"^\\(\d+)-grams:$")
_COUNT = re.compile(r"^ngram (\d+)=(\d+)$")


def load_arpa(path) -> NgramModel:
    declared: Dict[int, int] = {}
    logprobs: List[Dict[Ngram, float]] = []
    backoffs: Dict[Ngram, float] = {}
    state = "start"
    current = 0
    for lineno, text in iter_text(path):
        line = text.strip()
        if state == "start":
            if line == "\\data\\":
                state = "data"
            elif line:
                raise ParseError("expected \\data\\ header", path, lineno)
            continue
        if not line:
            continue
        if line == "\\end\\":
            state = "end"
            break
        m = _SECTION.match(line)
        if m:
            k = int(m.group(1))
            if k != current + 1 or k not in declared:
                raise ParseError(f"unexpected section \\{k}-grams:", path, lineno)
            current = k
            logprobs.append({})
            state = "grams"
            continue
        if state == "data":
            m = _COUNT.match(line)
            if not m:
                raise ParseError(f"malformed count line {line!r}", path, lineno)
            declared[int(m.group(1))] = int(m.group(2))
            continue
        fields = re.split(r"\s+", line)
        try:
            lp = float(fields[0])
            ng = tuple(fields[1:1 + current])
            if len(ng) != current or len(fields) > current + 2:
                raise ValueError
            bo = float(fields[1 + current]) if len(fields) == current + 2 else None
        except (ValueError, IndexError):
            raise ParseError(f"malformed {current}-gram line", path, lineno) from None
        logprobs[-1][ng] = lp
        if bo is not None:
            backoffs[ng] = bo
    if state != "end":
        raise ParseError("missing \\end\\ marker", path)
    if sorted(declared) != list(range(1, len(declared) + 1)) or len(logprobs) != len(declared):
        raise ParseError("declared orders and sections disagree", path)
    for k, table in enumerate(logprobs, start=1):
        if len(table) != declared[k]:
            raise ParseError(f"{k}-grams: declared {declared[k]} entries, found {len(table)}", path)
    vocab = frozenset(ng[0] for ng in logprobs[0]) | {BOS}
    return NgramModel(len(logprobs), logprobs, backoffs, vocab)


# ---------------------------------------------------------------------------
# natural-vs-translated contrast


def sentence_scores(model: NgramModel, sentences: Mapping[int, Sequence[str]]
                    ) -> Dict[int, Tuple[float, int]]:
    return {i: model.score_sentence(toks) for i, toks in sentences.items()}


def contrast_report(nlm: NgramModel, tlm: NgramModel,
                    systems: Mapping[str, Mapping[int, Sequence[str]]],
                    binned: Optional[BinnedSet] = None, restrict_to_both: bool = True,
                    caption: str = "Perplexity of MT output under natural-text and "
                                   "translated-text LMs") -> ReportTable:
    """Perplexity of each system's output under both LMs.

    Low natural-text perplexity and high translated-text perplexity both
    point at more natural output. With `binned`, every LM gets Overall plus
    one column per adequacy bin; sentence sets are pooled, not averaged.
    """
    if not systems:
        raise DataError("contrast needs at least one system")
    lms = (("nLM", nlm), ("tLM", tlm))
    if binned is None:
        columns = [name for name, _ in lms]
    else:
        columns = [f"{name}:{g}" for name, _ in lms for g in ("Overall",) + tuple(b.value for b in BINS)]
    rows, cells = [], []
    for system, sentences in systems.items():
        if not sentences:
            raise DataError(f"system {system!r} has an empty corpus")
        row = []
        for _, lm in lms:
            scores = sentence_scores(lm, sentences)
            if binned is None:
                row.append(pooled_perplexity(list(scores.values())))
                continue
            groups = [binned.scope(system, restrict_to_both)]
            groups += [binned.bin_ids(system, b, restrict_to_both) for b in BINS]
            for ids in groups:
                missing = [i for i in ids if i not in scores]
                if missing:
                    raise DataError(f"system {system!r}: no output for sentence ids {missing[:5]}")
                row.append(pooled_perplexity([scores[i] for i in ids]) if ids else None)
        rows.append(system)
        cells.append(row)
    return ReportTable(caption, rows, columns, cells, [2] * len(columns))
