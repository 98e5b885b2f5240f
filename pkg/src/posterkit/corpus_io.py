"""Readers, writers and filters for corpus-shaped data.

Plain text is one sentence per line, tokens separated by whitespace.
Alignments use the Pharaoh ``i-j`` format with 0-based indices.
Ratings are a TSV with ``sentence_id, system_id, scheme, score`` columns.
"""

import enum
import hashlib
import logging
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Tuple

from .errors import DataError, ParseError

logger = logging.getLogger(__name__)

RATINGS_HEADER = ("sentence_id", "system_id", "scheme", "score")


@dataclass(frozen=True)
class TokenSequence:
    id: int
    tokens: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise DataError(f"sentence {self.id}: invalid token {tok!r}")

    def __len__(self):
        return len(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


class Origin(str, enum.Enum):
    ORIG_SRC = "orig-src"
    ORIG_TGT = "orig-tgt"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ParallelPair:
    id: int
    src: TokenSequence
    tgt: TokenSequence
    origin: Origin = Origin.UNKNOWN

    def __post_init__(self):
        if self.src.id != self.id or self.tgt.id != self.id:
            raise DataError(f"pair {self.id}: side ids {self.src.id}/{self.tgt.id} disagree")
        object.__setattr__(self, "origin", Origin(self.origin))


@dataclass(frozen=True)
class AlignmentLinkSet:
    id: int
    links: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        links = tuple((int(s), int(t)) for s, t in self.links)
        if len(set(links)) != len(links):
            raise DataError(f"alignment {self.id}: duplicate links")
        if any(s < 0 or t < 0 for s, t in links):
            raise DataError(f"alignment {self.id}: negative index")
        object.__setattr__(self, "links", links)

    def validate_against(self, src_len: int, tgt_len: int) -> None:
        for s, t in self.links:
            if s >= src_len or t >= tgt_len:
                raise DataError(
                    f"alignment {self.id}: link {s}-{t} outside sentence lengths "
                    f"{src_len}/{tgt_len}")


class Scheme(str, enum.Enum):
    DA = "direct-assessment-0-100"
    SBS = "side-by-side-0-6"

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        key = text.strip().lower()
        aliases = {"da": cls.DA, "sbs": cls.SBS, cls.DA.value: cls.DA, cls.SBS.value: cls.SBS}
        try:
            return aliases[key]
        except KeyError:
            raise DataError(f"unknown rating scheme {text!r} (expected da or sbs)") from None

    @property
    def short(self) -> str:
        return "da" if self is Scheme.DA else "sbs"

    @property
    def bounds(self) -> Tuple[int, int]:
        return (0, 100) if self is Scheme.DA else (0, 6)


@dataclass(frozen=True)
class RatingRecord:
    sentence_id: int
    system_id: str
    scheme: Scheme
    score: float

    def __post_init__(self):
        scheme = Scheme(self.scheme)
        object.__setattr__(self, "scheme", scheme)
        lo, hi = scheme.bounds
        if not lo <= self.score <= hi:
            raise DataError(
                f"score {self.score} outside {scheme.value} range [{lo}, {hi}]")
        if scheme is Scheme.SBS and float(self.score) != int(self.score):
            raise DataError(f"non-integer score {self.score} under {scheme.value}")


# ---------------------------------------------------------------------------
# readers


def iter_text(path) -> Iterator[Tuple[int, str]]:
    """Yield ``(line_number, text)`` pairs, 1-based, newline stripped.

    Decoding happens per line so an invalid byte sequence is reported with its
    line number instead of an opaque offset.
    """
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f, start=1):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise ParseError(f"invalid UTF-8 at byte {e.start}", path, lineno) from None
            yield lineno, text.rstrip("\r\n")


def read_lines(path) -> List[TokenSequence]:
    return [TokenSequence(lineno - 1, text.split()) for lineno, text in iter_text(path)]


def write_lines(sentences: Iterable, path) -> None:
    with atomic_open(path) as f:
        for sent in sentences:
            tokens = sent.tokens if isinstance(sent, TokenSequence) else sent
            f.write(" ".join(tokens) + "\n")


def read_alignments(path) -> List[AlignmentLinkSet]:
    out = []
    for lineno, text in iter_text(path):
        links = []
        col = 1
        for item in text.split(" "):
            if item:
                s, dash, t = item.partition("-")
                if not dash or not s.isdigit() or not t.isdigit():
                    raise ParseError(f"malformed alignment item {item!r}", path, lineno, col)
                links.append((int(s), int(t)))
            col += len(item) + 1
        try:
            out.append(AlignmentLinkSet(lineno - 1, links))
        except DataError as e:
            raise ParseError(str(e), path, lineno) from None
    return out


def write_alignments(link_sets: Iterable[AlignmentLinkSet], path) -> None:
    with atomic_open(path) as f:
        for ls in link_sets:
            f.write(" ".join(f"{s}-{t}" for s, t in ls.links) + "\n")


def _parse_score(text: str) -> float:
    value = float(text)
    return int(value) if value.is_integer() else value


def read_ratings(path) -> List[RatingRecord]:
    records = []
    for lineno, text in iter_text(path):
        if not text.strip():
            continue
        fields = text.split("\t")
        if tuple(f.strip() for f in fields) == RATINGS_HEADER:
            continue
        if len(fields) != 4:
            raise ParseError(f"expected 4 tab-separated fields, got {len(fields)}", path, lineno)
        sid, system, scheme, score = (f.strip() for f in fields)
        try:
            records.append(RatingRecord(int(sid), system, Scheme.parse(scheme), _parse_score(score)))
        except ValueError as e:
            raise ParseError(str(e), path, lineno) from None
    return records


def write_ratings(records: Iterable[RatingRecord], path) -> None:
    with atomic_open(path) as f:
        f.write("\t".join(RATINGS_HEADER) + "\n")
        for r in records:
            f.write(f"{r.sentence_id}\t{r.system_id}\t{r.scheme.short}\t{r.score}\n")


def read_parallel(src_path, tgt_path=None, origin=Origin.UNKNOWN) -> List[ParallelPair]:
    """Read aligned line files, or a single TSV when `tgt_path` is None.

    The TSV form has ``src<TAB>tgt`` and an optional third ``origin`` column.
    """
    pairs = []
    if tgt_path is None:
        for lineno, text in iter_text(src_path):
            fields = text.split("\t")
            if len(fields) not in (2, 3):
                raise ParseError("expected src<TAB>tgt[<TAB>origin]", src_path, lineno)
            i = lineno - 1
            try:
                org = Origin(fields[2]) if len(fields) == 3 else origin
            except ValueError:
                raise ParseError(f"unknown origin {fields[2]!r}", src_path, lineno) from None
            pairs.append(ParallelPair(i, TokenSequence(i, fields[0].split()),
                                      TokenSequence(i, fields[1].split()), org))
        return pairs
    src = read_lines(src_path)
    tgt = read_lines(tgt_path)
    if len(src) != len(tgt):
        raise DataError(f"{src_path} has {len(src)} lines but {tgt_path} has {len(tgt)}")
    return [ParallelPair(s.id, s, t, origin) for s, t in zip(src, tgt)]


def write_parallel(pairs: Sequence[ParallelPair], src_path, tgt_path) -> None:
    with atomic_outputs(src_path, tgt_path) as (fs, ft):
        for p in pairs:
            fs.write(p.src.text + "\n")
            ft.write(p.tgt.text + "\n")


# ---------------------------------------------------------------------------
# filters


def filter_pairs(pairs: Iterable[ParallelPair], max_len: int = 250,
                 max_ratio: float = 1.5) -> List[ParallelPair]:
    """Drop pairs that are too long or too unbalanced.

    A pair is dropped when either side has more than `max_len` tokens or when
    longer/shorter exceeds `max_ratio`; a ratio exactly at the limit is kept.
    """
    kept = []
    for p in pairs:
        ls, lt = len(p.src), len(p.tgt)
        if ls == 0 or lt == 0:
            raise DataError(f"pair {p.id}: empty side")
        if ls > max_len or lt > max_len:
            continue
        if max(ls, lt) / min(ls, lt) > max_ratio:
            continue
        kept.append(p)
    return kept


def dedup(pairs: Iterable[ParallelPair]) -> List[ParallelPair]:
    """Keep the first occurrence of every (src, tgt) string pair."""
    seen = set()
    kept = []
    for p in pairs:
        key = (p.src.text, p.tgt.text)
        if key in seen:
            continue
        seen.add(key)
        kept.append(p)
    return kept


# ---------------------------------------------------------------------------
# atomic output


def _umask() -> int:
    current = os.umask(0)
    os.umask(current)
    return current


class atomic_outputs:
    """Open several text files for writing; rename all into place on success.

    On an exception every temporary file is removed and no target is touched.
    """

    def __init__(self, *paths):
        self.paths = [os.fspath(p) for p in paths]
        self._tmp: List[Tuple[str, object]] = []

    def __enter__(self):
        try:
            for path in self.paths:
                directory = os.path.dirname(os.path.abspath(path))
                fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
                self._tmp.append((tmp, os.fdopen(fd, "w", encoding="utf-8", newline="\n")))
        except BaseException:
            self._cleanup()
            raise
        return [f for _, f in self._tmp]

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            self._cleanup()
            return False
        mode = 0o666 & ~_umask()
        for tmp, f in self._tmp:
            f.close()
            # mkstemp creates 0600; give outputs the usual permissions
            os.chmod(tmp, mode)
        for (tmp, _), path in zip(self._tmp, self.paths):
            os.replace(tmp, path)
        return False

    def _cleanup(self):
        for tmp, f in self._tmp:
            f.close()
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass


class atomic_open(atomic_outputs):
    def __init__(self, path):
        super().__init__(path)

    def __enter__(self):
        return super().__enter__()[0]


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()[:16]
