"""Translation edit rate with greedy block shifts, posTER, and Kendall's tau.

TER counts the insertions, deletions, substitutions and block shifts needed to
turn a hypothesis into a reference, divided by the reference length. Applied
to POS tag sequences it measures structural difference independent of word
choice (posTER). Against the source's tags it measures monotonicity; against
a human reference's tags it measures structural similarity to that reference.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Hashable, Optional, Sequence, Tuple

from .errors import DataError

logger = logging.getLogger(__name__)

MAX_SHIFT_SIZE = 10
MAX_SHIFT_DIST = 50

Symbols = Sequence[Hashable]


class UndefinedScoreError(DataError):
    pass


@dataclass(frozen=True)
class TerResult:
    insertions: int
    deletions: int
    substitutions: int
    shifts: int
    ref_len: int

    @property
    def edits(self) -> int:
        return self.insertions + self.deletions + self.substitutions + self.shifts

    @property
    def score(self) -> float:
        return self.edits / self.ref_len


@dataclass(frozen=True)
class TauResult:
    concordant: int
    discordant: int

    @property
    def defined(self) -> bool:
        return self.concordant + self.discordant > 0

    @property
    def tau(self) -> float:
        if not self.defined:
            raise UndefinedScoreError("Kendall's tau is undefined without untied link pairs")
        return (self.concordant - self.discordant) / (self.concordant + self.discordant)


@dataclass(frozen=True)
class CorpusTer:
    sentences: int
    mean: float
    pooled: float
    edits: int
    ref_len: int


# ---------------------------------------------------------------------------
# edit distance


def levenshtein(hyp: Symbols, ref: Symbols) -> int:
    """Unit-cost insert/delete/substitute distance."""
    prev = list(range(len(ref) + 1))
    for i, h in enumerate(hyp, start=1):
        cur = [i]
        for j, r in enumerate(ref, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (h != r)))
        prev = cur
    return prev[-1]


# trace ops, read as rewriting hyp into ref
_MATCH, _SUB, _DEL, _INS = "M", "S", "D", "I"


def _trace(hyp: Symbols, ref: Symbols) -> str:
    n, m = len(hyp), len(ref)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        row, above = d[i], d[i - 1]
        row[0] = i
        h = hyp[i - 1]
        for j in range(1, m + 1):
            row[j] = min(above[j] + 1, row[j - 1] + 1, above[j - 1] + (h != ref[j - 1]))
    ops = []
    i, j = n, m
    # preference on equal cost: diagonal, then dropping a hyp symbol, then inserting
    while i or j:
        if i and j and d[i][j] == d[i - 1][j - 1] + (hyp[i - 1] != ref[j - 1]):
            ops.append(_MATCH if hyp[i - 1] == ref[j - 1] else _SUB)
            i, j = i - 1, j - 1
        elif i and d[i][j] == d[i - 1][j] + 1:
            ops.append(_DEL)
            i -= 1
        else:
            ops.append(_INS)
            j -= 1
    return "".join(reversed(ops))


def _alignment(trace: str, n: int, m: int):
    """Per-position error flags and, for each ref position, the hyp position
    it is aligned to (or the last hyp position before it when unaligned)."""
    hyp_err = [False] * n
    ref_err = [False] * m
    align = [0] * m
    i = j = -1
    for op in trace:
        if op in (_MATCH, _SUB):
            i += 1
            j += 1
            align[j] = i
            if op == _SUB:
                hyp_err[i] = ref_err[j] = True
        elif op == _DEL:
            i += 1
            hyp_err[i] = True
        else:
            j += 1
            align[j] = i
            ref_err[j] = True
    return align, hyp_err, ref_err


def _move(seq: tuple, start: int, length: int, point: int) -> Optional[Tuple[tuple, int]]:
    """Move ``seq[start:start+length]`` to insertion `point` (original coordinates).

    Returns the new sequence and the block's start in it, or None for a no-op.
    """
    if start <= point <= start + length:
        return None
    block = seq[start:start + length]
    rest = seq[:start] + seq[start + length:]
    dest = point if point < start else point - length
    return rest[:dest] + block + rest[dest:], dest


def _best_shift(hyp: tuple, ref: tuple, cost: int, distance) -> Optional[Tuple[int, tuple]]:
    n, m = len(hyp), len(ref)
    align, hyp_err, ref_err = _alignment(_trace(hyp, ref), n, m)
    best_key = None
    best = None
    for start_h in range(n):
        for start_r in range(m):
            length = 0
            while (length < MAX_SHIFT_SIZE and start_h + length < n and start_r + length < m
                   and hyp[start_h + length] == ref[start_r + length]):
                length += 1
                # only move blocks that are wrong where they are and would
                # fix an error where they land
                if not any(hyp_err[start_h:start_h + length]):
                    continue
                if not any(ref_err[start_r:start_r + length]):
                    continue
                if start_h <= align[start_r] < start_h + length:
                    continue
                tried = set()
                for offset in range(-1, length):
                    point = 0 if start_r + offset < 0 else align[start_r + offset] + 1
                    if point in tried:
                        continue
                    tried.add(point)
                    moved = _move(hyp, start_h, length, point)
                    if moved is None:
                        continue
                    new, dest = moved
                    if abs(dest - start_h) > MAX_SHIFT_DIST:
                        continue
                    gain = cost - distance(new)
                    if gain <= 0:
                        continue
                    key = (-gain, start_h, dest, length)
                    if best_key is None or key < best_key:
                        best_key, best = key, (gain, new)
    return best


def ter(hyp: Symbols, ref: Symbols) -> TerResult:
    """TER of `hyp` against `ref` with greedy shifts.

    Each round applies the block shift (size <= 10, moved <= 50 positions)
    that lowers the remaining edit distance the most; equal gains go to the
    smallest (start, destination, length). Rounds stop when no shift helps.
    An empty hypothesis scores 1.0 (every reference symbol inserted).
    """
    ref = tuple(ref)
    hyp = tuple(hyp)
    if not ref:
        raise UndefinedScoreError("TER is undefined for an empty reference")
    if not hyp:
        logger.warning("empty hypothesis scored as %d insertions", len(ref))

    cache: Dict[tuple, int] = {}

    def distance(seq):
        d = cache.get(seq)
        if d is None:
            d = cache[seq] = levenshtein(seq, ref)
        return d

    shifts = 0
    cost = distance(hyp)
    while cost > 0:
        found = _best_shift(hyp, ref, cost, distance)
        if found is None:
            break
        gain, hyp = found
        cost -= gain
        shifts += 1

    ops = _trace(hyp, ref)
    return TerResult(
        insertions=ops.count(_INS),
        deletions=ops.count(_DEL),
        substitutions=ops.count(_SUB),
        shifts=shifts,
        ref_len=len(ref),
    )


def poster(hyp_tags, ref_tags) -> TerResult:
    """TER over two tagged sentences' tag sequences.

    Use the source's tags as reference to measure monotonicity, or a human
    translation's tags to measure structural similarity to it.
    """
    if hyp_tags.tagset != ref_tags.tagset:
        raise DataError(
            f"sentence {hyp_tags.id}: tagset mismatch {hyp_tags.tagset!r} vs {ref_tags.tagset!r}")
    if not ref_tags.tags:
        raise UndefinedScoreError(f"sentence {ref_tags.id}: empty reference tag sequence")
    return ter(hyp_tags.tags, ref_tags.tags)


def corpus_ter(results: Sequence[TerResult]) -> CorpusTer:
    """Unweighted mean of sentence scores and the pooled rate."""
    if not results:
        raise DataError("no sentences to aggregate")
    edits = sum(r.edits for r in results)
    ref_len = sum(r.ref_len for r in results)
    return CorpusTer(
        sentences=len(results),
        mean=sum(r.score for r in results) / len(results),
        pooled=edits / ref_len,
        edits=edits,
        ref_len=ref_len,
    )


# ---------------------------------------------------------------------------
# Kendall's tau over raw alignment links


def kendall_tau(links) -> TauResult:
    """Concordant/discordant counts over all pairs of alignment links.

    Links sharing a source or a target index are tied and count as neither,
    so one-to-many links are kept as they are rather than reduced to a
    permutation. Runs in O(L log L) with a Fenwick tree over target ranks.
    """
    links = getattr(links, "links", links)
    if len(links) < 2:
        return TauResult(0, 0)
    targets = sorted({t for _, t in links})
    rank = {t: k + 1 for k, t in enumerate(targets)}
    size = len(targets)
    tree = [0] * (size + 1)

    def add(k):
        while k <= size:
            tree[k] += 1
            k += k & -k

    def prefix(k):
        total = 0
        while k > 0:
            total += tree[k]
            k -= k & -k
        return total

    concordant = discordant = 0
    inserted = 0
    ordered = sorted(links)
    g = 0
    while g < len(ordered):
        h = g
        while h < len(ordered) and ordered[h][0] == ordered[g][0]:
            h += 1
        group = ordered[g:h]
        # only links with a strictly smaller source index are in the tree
        for _, t in group:
            r = rank[t]
            concordant += prefix(r - 1)
            discordant += inserted - prefix(r)
        for _, t in group:
            add(rank[t])
            inserted += 1
        g = h
    return TauResult(concordant, discordant)
