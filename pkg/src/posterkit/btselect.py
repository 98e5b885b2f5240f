"""Probability-based selection between supervised and unsupervised back-translations.

Both systems back-translate the same monolingual sentences. Each candidate is
scored by an external model; the scores are length-normalized into per-token
probabilities and compared as ``delta_p = pnorm(unsup) / pnorm(sup)``. High
``delta_p`` means the unsupervised candidate is about as likely as the
supervised one, so it is kept; otherwise the supervised candidate is used.
Every input sentence contributes exactly one output pair.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .corpus_io import atomic_outputs, iter_text
from .errors import DataError, ParseError

logger = logging.getLogger(__name__)

SUP, UNSUP = "sup", "unsup"


@dataclass(frozen=True)
class Candidate:
    tokens: Tuple[str, ...]
    logp: float

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class BtRecord:
    """One line of the candidate TSV, before normalization."""
    id: int
    src: str
    sup: Candidate
    unsup: Candidate


@dataclass(frozen=True)
class ScoredPair:
    id: int
    src: str
    sup: Candidate
    unsup: Candidate
    log_pnorm_sup: float
    log_pnorm_unsup: float

    @property
    def pnorm_sup(self) -> float:
        return math.exp(self.log_pnorm_sup)

    @property
    def pnorm_unsup(self) -> float:
        return math.exp(self.log_pnorm_unsup)

    @property
    def delta_p(self) -> float:
        # ratio formed in log space; the pnorms themselves may underflow
        return math.exp(self.log_pnorm_unsup - self.log_pnorm_sup)


class Mode(str, enum.Enum):
    THRESHOLD = "threshold"
    QUANTILE = "quantile"


@dataclass(frozen=True)
class BtSelectionConfig:
    mode: Mode
    value: float
    tag_sup: str = ""
    tag_unsup: str = ""

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.THRESHOLD and not self.value > 0:
            raise DataError(f"threshold must be positive, got {self.value}")
        if self.mode is Mode.QUANTILE and not 0 <= self.value <= 1:
            raise DataError(f"quantile must be in [0, 1], got {self.value}")
        for t in (self.tag_sup, self.tag_unsup):
            if t and (t != t.strip() or len(t.split()) != 1):
                raise DataError(f"tag {t!r} must be a single token")

    @classmethod
    def parse(cls, mode: str, tag_sup: str = "", tag_unsup: str = "") -> "BtSelectionConfig":
        """Build from ``threshold:0.65`` / ``quantile:0.40`` strings."""
        name, sep, value = mode.partition(":")
        if not sep:
            raise DataError(f"mode must look like threshold:T or quantile:q, got {mode!r}")
        try:
            return cls(Mode(name), float(value), tag_sup, tag_unsup)
        except ValueError as e:
            raise DataError(f"bad selection mode {mode!r}: {e}") from None


@dataclass
class SelectionOutcome:
    pairs: List[ScoredPair]
    chosen: Dict[int, str]

    @property
    def counts(self) -> Dict[str, int]:
        n_unsup = sum(1 for c in self.chosen.values() if c == UNSUP)
        return {SUP: len(self.chosen) - n_unsup, UNSUP: n_unsup}

    def candidate(self, pair: ScoredPair) -> Candidate:
        return pair.unsup if self.chosen[pair.id] == UNSUP else pair.sup


def read_bt_records(path, log_base: float = math.e) -> List[BtRecord]:
    """Read ``id, src, sup_bt, sup_logP, unsup_bt, unsup_logP`` rows.

    Log-probabilities are converted to natural log when `log_base` is 10.
    """
    scale = 1.0 if log_base == math.e else math.log(log_base)
    records = []
    for lineno, text in iter_text(path):
        if not text.strip():
            continue
        fields = text.split("\t")
        if lineno == 1 and fields[0] == "id":
            continue
        if len(fields) != 6:
            raise ParseError(f"expected 6 tab-separated fields, got {len(fields)}", path, lineno)
        try:
            rid = int(fields[0])
            sup = Candidate(tuple(fields[2].split()), float(fields[3]) * scale)
            unsup = Candidate(tuple(fields[4].split()), float(fields[5]) * scale)
        except ValueError as e:
            raise ParseError(str(e), path, lineno) from None
        records.append(BtRecord(rid, fields[1], sup, unsup))
    return records


def score_pairs(records: Sequence[BtRecord]) -> List[ScoredPair]:
    """Per-token geometric-mean probabilities and their ratio.

    ``pnorm = exp(logP / token_count)`` removes the length effect; source
    difficulty is shared by both candidates and cancels in the ratio.
    """
    out = []
    for r in records:
        if r.sup is None or r.unsup is None:
            raise DataError(f"record {r.id}: missing candidate")
        for name, cand in ((SUP, r.sup), (UNSUP, r.unsup)):
            if not cand.tokens:
                raise DataError(f"record {r.id}: empty {name} candidate")
            if cand.logp > 0:
                raise DataError(f"record {r.id}: {name} log-probability {cand.logp} > 0")
        out.append(ScoredPair(r.id, r.src, r.sup, r.unsup,
                              r.sup.logp / len(r.sup.tokens),
                              r.unsup.logp / len(r.unsup.tokens)))
    return out


def ranked(pairs: Sequence[ScoredPair]) -> List[ScoredPair]:
    """Descending delta_p, ties by ascending id."""
    return sorted(pairs, key=lambda p: (-(p.log_pnorm_unsup - p.log_pnorm_sup), p.id))


def quantile_count(q: float, n: int) -> int:
    # round before flooring so 0.29 * 100 counts 29, not 28
    return math.floor(round(q * n, 9))


def select(pairs: Sequence[ScoredPair], config: BtSelectionConfig) -> SelectionOutcome:
    if not pairs:
        raise DataError("no pairs to select from")
    if len({p.id for p in pairs}) != len(pairs):
        raise DataError("duplicate pair ids")
    if config.mode is Mode.THRESHOLD:
        # a candidate exactly at T counts as "T as likely" and is kept
        chosen = {p.id: UNSUP if p.delta_p >= config.value else SUP for p in pairs}
    else:
        top = {p.id for p in ranked(pairs)[:quantile_count(config.value, len(pairs))]}
        chosen = {p.id: UNSUP if p.id in top else SUP for p in pairs}
    return SelectionOutcome(list(pairs), chosen)


def unsup_count(pairs: Sequence[ScoredPair], threshold: float) -> int:
    return select(pairs, BtSelectionConfig(Mode.THRESHOLD, threshold)).counts[UNSUP]


def monotonicity_check(pairs: Sequence[ScoredPair], t1: float, t2: float) -> bool:
    """True when the lower threshold keeps at least as many unsupervised BTs."""
    if not t1 < t2:
        raise ValueError("need t1 < t2")
    return unsup_count(pairs, t1) >= unsup_count(pairs, t2)


def tag_corpus(outcome: SelectionOutcome, config: BtSelectionConfig) -> List[Tuple[str, str]]:
    """Synthetic parallel corpus in input order.

    The source side is the chosen back-translation, prefixed with the tag for
    its provenance (no prefix for an empty tag); the target side is the
    original monolingual sentence.
    """
    tags = {SUP: config.tag_sup, UNSUP: config.tag_unsup}
    used = {t for t in tags.values() if t}
    if used:
        for p in outcome.pairs:
            hits = used.intersection(p.sup.tokens + p.unsup.tokens)
            if hits:
                logger.warning("tag %s also occurs as a token in pair %d", sorted(hits)[0], p.id)
                break
    out = []
    for p in outcome.pairs:
        which = outcome.chosen[p.id]
        cand = outcome.candidate(p)
        prefix = tags[which]
        out.append(((prefix + " " if prefix else "") + cand.text, p.src))
    return out


def write_selection(outcome: SelectionOutcome, config: BtSelectionConfig,
                    source_path, target_path, provenance_path) -> None:
    corpus = tag_corpus(outcome, config)
    with atomic_outputs(source_path, target_path, provenance_path) as (fs, ft, fp):
        fp.write("id\tchosen\tdelta_p\n")
        for p, (src, tgt) in zip(outcome.pairs, corpus):
            fs.write(src + "\n")
            ft.write(tgt + "\n")
            fp.write(f"{p.id}\t{outcome.chosen[p.id]}\t{p.delta_p:.6g}\n")
