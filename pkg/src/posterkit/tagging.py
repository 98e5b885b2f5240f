"""POS tag sequences: CoNLL-U ingestion, a lexicon tagger, tagset projection.

Downstream metrics treat tags as opaque symbols, so any tagset works as long
as hypothesis and reference share it.
"""

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .corpus_io import atomic_open, iter_text
from .errors import DataError, ParseError

logger = logging.getLogger(__name__)

MAX_SUFFIX = 5

UD_TAGS = frozenset(
    "ADJ ADP ADV AUX CCONJ DET INTJ NOUN NUM PART PRON PROPN PUNCT SCONJ SYM VERB X".split())

# tags seen in the wild that are spelled differently from the UD inventory
TAG_ALIASES = {"PNOUN": "PROPN", "CONJ": "CCONJ"}


def normalize_tag(tag: str) -> str:
    tag = tag.strip().upper()
    return TAG_ALIASES.get(tag, tag)


@dataclass(frozen=True)
class TagSet:
    name: str
    inventory: FrozenSet[str]

    def __post_init__(self):
        inv = frozenset(normalize_tag(t) for t in self.inventory)
        if not inv or "" in inv:
            raise DataError(f"tagset {self.name!r}: inventory must be non-empty tag strings")
        object.__setattr__(self, "inventory", inv)

    def __contains__(self, tag):
        return tag in self.inventory


@dataclass(frozen=True)
class TaggedSentence:
    id: int
    tokens: Tuple[str, ...]
    tags: Tuple[str, ...]
    tagset: str

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(self.tags))
        if len(self.tokens) != len(self.tags):
            raise DataError(
                f"sentence {self.id}: {len(self.tokens)} tokens but {len(self.tags)} tags")

    def check(self, tagset: TagSet) -> "TaggedSentence":
        bad = sorted({t for t in self.tags if t not in tagset})
        if bad:
            raise DataError(f"sentence {self.id}: tags {bad} not in tagset {tagset.name!r}")
        return self


def read_mapping(path) -> Dict[str, str]:
    """Read a two-column ``source<TAB>target`` tag mapping table."""
    table = {}
    for lineno, text in iter_text(path):
        if not text.strip() or text.startswith("#"):
            continue
        fields = text.split("\t")
        if len(fields) != 2:
            raise ParseError("expected source<TAB>target", path, lineno)
        table[normalize_tag(fields[0])] = normalize_tag(fields[1])
    return table


def tiger_to_ud() -> Dict[str, str]:
    with resources.as_file(resources.files("posterkit.data") / "tiger_ud.tsv") as p:
        return read_mapping(p)


TIGER_TAGS = frozenset(tiger_to_ud())

TAGSETS = {
    "ud": TagSet("ud", UD_TAGS),
    "tiger": TagSet("tiger", TIGER_TAGS),
}


def get_tagset(name: str, observed: Iterable[str] = ()) -> TagSet:
    """Shipped tagset by name, else a custom one built from `observed` tags."""
    if name in TAGSETS:
        return TAGSETS[name]
    return TagSet(name, frozenset(observed))


# ---------------------------------------------------------------------------
# CoNLL-U

_CONLLU_COLUMNS = {"upos": 3, "xpos": 4}


def read_conllu(path, column: str = "upos", tagset: Optional[str] = None) -> List[TaggedSentence]:
    """Read one tagged sentence per CoNLL-U block.

    Comment lines, multiword-token ranges (``1-2``) and empty nodes (``1.1``)
    are skipped. With ``tagset`` naming a shipped tagset, tags are validated
    against its inventory.
    """
    if column not in _CONLLU_COLUMNS:
        raise ValueError(f"column must be one of {sorted(_CONLLU_COLUMNS)}")
    col = _CONLLU_COLUMNS[column]
    name = tagset or ("ud" if column == "upos" else "xpos")
    sentences = []
    tokens: List[str] = []
    tags: List[str] = []

    def flush():
        if tokens:
            sent = TaggedSentence(len(sentences), tokens[:], tags[:], name)
            if name in TAGSETS:
                try:
                    sent.check(TAGSETS[name])
                except DataError as e:
                    raise ParseError(f"sentence {len(sentences)}: {e}", path) from None
            sentences.append(sent)
        tokens.clear()
        tags.clear()

    for lineno, text in iter_text(path):
        if not text.strip():
            flush()
            continue
        if text.startswith("#"):
            continue
        fields = text.split("\t")
        if len(fields) != 10:
            raise ParseError(
                f"sentence {len(sentences)}: expected 10 columns, got {len(fields)}", path, lineno)
        if "-" in fields[0] or "." in fields[0]:
            continue
        tag = fields[col]
        if tag in ("", "_"):
            raise ParseError(f"sentence {len(sentences)}: missing {column} tag", path, lineno)
        tokens.append(fields[1])
        tags.append(normalize_tag(tag))
    flush()
    return sentences


def write_conllu(sentences: Iterable[TaggedSentence], path, column: str = "upos") -> None:
    col = _CONLLU_COLUMNS[column]
    with atomic_open(path) as f:
        for sent in sentences:
            f.write(f"# sent_id = {sent.id}\n")
            for i, (tok, tag) in enumerate(zip(sent.tokens, sent.tags), start=1):
                row = [str(i), tok, "_", "_", "_", "_", "_", "_", "_", "_"]
                row[col] = tag
                f.write("\t".join(row) + "\n")
            f.write("\n")


# ---------------------------------------------------------------------------
# lexicon tagger


def _modal(counts: Mapping[str, int]) -> str:
    # highest count, ties to the lexicographically smallest tag
    return min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]


@dataclass(frozen=True)
class LexiconTagger:
    tagset: TagSet
    token_table: Mapping[str, str]
    suffix_table: Mapping[str, str]
    default_tag: str
    max_suffix: int = field(default=MAX_SUFFIX)

    def to_json(self) -> str:
        return json.dumps({
            "tagset": self.tagset.name,
            "inventory": sorted(self.tagset.inventory),
            "default_tag": self.default_tag,
            "max_suffix": self.max_suffix,
            "token_table": dict(sorted(self.token_table.items())),
            "suffix_table": dict(sorted(self.suffix_table.items())),
        }, ensure_ascii=False, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "LexiconTagger":
        d = json.loads(text)
        ts = TagSet(d["tagset"], frozenset(d["inventory"]))
        tagger = cls(ts, d["token_table"], d["suffix_table"], d["default_tag"], d["max_suffix"])
        stored = set(tagger.token_table.values()) | set(tagger.suffix_table.values())
        stored.add(tagger.default_tag)
        if not stored <= ts.inventory:
            raise DataError(f"tagger tables use tags outside {ts.name!r}: {sorted(stored - ts.inventory)}")
        return tagger


def train_tagger(corpus: Sequence[TaggedSentence], tagset: Optional[TagSet] = None,
                 max_suffix: int = MAX_SUFFIX) -> LexiconTagger:
    """Most-frequent-tag lexicon with a suffix table for unseen words."""
    if not corpus or not any(s.tokens for s in corpus):
        raise DataError("cannot train a tagger on an empty corpus")
    if tagset is None:
        tagset = get_tagset(corpus[0].tagset, {t for s in corpus for t in s.tags})
    token_counts: Dict[str, Counter] = defaultdict(Counter)
    suffix_counts: Dict[str, Counter] = defaultdict(Counter)
    overall: Counter = Counter()
    for sent in corpus:
        sent.check(tagset)
        for tok, tag in zip(sent.tokens, sent.tags):
            token_counts[tok][tag] += 1
            overall[tag] += 1
            for k in range(1, min(max_suffix, len(tok)) + 1):
                suffix_counts[tok[-k:]][tag] += 1
    return LexiconTagger(
        tagset,
        {tok: _modal(c) for tok, c in token_counts.items()},
        {suf: _modal(c) for suf, c in suffix_counts.items()},
        _modal(overall),
        max_suffix,
    )


def tag(tagger: LexiconTagger, tokens: Sequence[str], sent_id: int = 0) -> TaggedSentence:
    tags = []
    for tok in tokens:
        hit = tagger.token_table.get(tok)
        if hit is None:
            for k in range(min(tagger.max_suffix, len(tok)), 0, -1):
                hit = tagger.suffix_table.get(tok[-k:])
                if hit is not None:
                    break
        tags.append(hit if hit is not None else tagger.default_tag)
    return TaggedSentence(sent_id, tokens, tags, tagger.tagset.name)


def map_tagset(tagged: TaggedSentence, mapping: Mapping[str, str],
               target: Optional[str] = None) -> TaggedSentence:
    """Rewrite every tag through `mapping`; an unmapped tag is an error."""
    out = []
    for t in tagged.tags:
        try:
            out.append(mapping[t])
        except KeyError:
            raise DataError(f"sentence {tagged.id}: tag {t!r} has no mapping") from None
    return TaggedSentence(tagged.id, tagged.tokens, out, target or tagged.tagset)
