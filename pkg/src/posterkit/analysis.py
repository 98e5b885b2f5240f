"""Adequacy binning, the "Both" intersection, per-bin aggregation and tables."""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .corpus_io import RatingRecord, Scheme
from .errors import DataError

logger = logging.getLogger(__name__)


class AdequacyBin(str, enum.Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


BINS = (AdequacyBin.LOW, AdequacyBin.MEDIUM, AdequacyBin.HIGH)


def bin_score(score) -> AdequacyBin:
    """Side-by-side score 0..6 to Low (0-2), Medium (3-4) or High (5-6)."""
    if isinstance(score, bool) or float(score) != int(score):
        raise DataError(f"side-by-side score must be an integer, got {score!r}")
    s = int(score)
    if not 0 <= s <= 6:
        raise DataError(f"side-by-side score {s} outside 0..6")
    if s <= 2:
        return AdequacyBin.LOW
    if s <= 4:
        return AdequacyBin.MEDIUM
    return AdequacyBin.HIGH


@dataclass(frozen=True)
class BinnedSet:
    systems: Dict[str, Dict[int, AdequacyBin]]
    both: Dict[AdequacyBin, FrozenSet[int]]
    ids: Tuple[int, ...]

    def bin_ids(self, system: str, b: AdequacyBin, restrict_to_both: bool = False) -> List[int]:
        if restrict_to_both:
            return sorted(self.both[b])
        return sorted(i for i, sb in self.systems[system].items() if sb is b)

    def scope(self, system: str, restrict_to_both: bool = False) -> List[int]:
        if restrict_to_both:
            return sorted(set().union(*self.both.values()))
        return sorted(self.systems[system])


def scores_by_system(ratings: Iterable[RatingRecord], scheme: Optional[Scheme] = None
                     ) -> Dict[str, Dict[int, float]]:
    out: Dict[str, Dict[int, float]] = {}
    for r in ratings:
        if scheme is not None and r.scheme is not scheme:
            continue
        per = out.setdefault(r.system_id, {})
        if r.sentence_id in per:
            raise DataError(f"duplicate rating for sentence {r.sentence_id}, system {r.system_id!r}")
        per[r.sentence_id] = r.score
    return out


def both_intersection(ratings_sup: Mapping[int, int], ratings_unsup: Mapping[int, int],
                      names: Tuple[str, str] = ("Sup", "Unsup")) -> BinnedSet:
    """Bin both systems' side-by-side scores and intersect equal bins.

    Sentence ids rated for only one system are dropped with a warning.
    """
    common = sorted(set(ratings_sup) & set(ratings_unsup))
    dropped = len(set(ratings_sup) ^ set(ratings_unsup))
    if dropped:
        logger.warning("%d sentence ids rated for only one system were excluded", dropped)
    sup = {i: bin_score(ratings_sup[i]) for i in common}
    unsup = {i: bin_score(ratings_unsup[i]) for i in common}
    both = {b: frozenset(i for i in common if sup[i] is b and unsup[i] is b) for b in BINS}
    return BinnedSet({names[0]: sup, names[1]: unsup}, both, tuple(common))


def da_average(ratings: Iterable) -> float:
    """Plain mean of raw 0-100 direct-assessment scores, no normalization."""
    ratings = list(ratings)
    if any(isinstance(r, RatingRecord) and r.scheme is not Scheme.DA for r in ratings):
        raise DataError("da_average needs direct-assessment ratings")
    scores = [r.score if isinstance(r, RatingRecord) else r for r in ratings]
    if not scores:
        raise DataError("no ratings to average")
    return sum(scores) / len(scores)


# ---------------------------------------------------------------------------
# tables


@dataclass
class ReportTable:
    caption: str
    row_labels: List[str]
    column_labels: List[str]
    cells: List[List[Optional[float]]]
    precision: List[int]
    inputs: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.column_labels)
        if len(self.cells) != len(self.row_labels):
            raise DataError("table has a different number of rows and row labels")
        if any(len(row) != width for row in self.cells) or len(self.precision) != width:
            raise DataError("table is not rectangular")

    def cell(self, row: str, column: str) -> Optional[float]:
        return self.cells[self.row_labels.index(row)][self.column_labels.index(column)]

    def _fmt(self, value, prec) -> str:
        return "-" if value is None else f"{value:.{prec}f}"

    def _formatted_rows(self):
        return [[self._fmt(v, p) for v, p in zip(row, self.precision)] for row in self.cells]

    def _provenance(self):
        return " ".join(f"{k}={v}" for k, v in sorted(self.inputs.items()))

    def to_tsv(self) -> str:
        lines = [f"# {self.caption}"]
        if self.inputs:
            lines.append(f"# inputs: {self._provenance()}")
        lines.append("\t".join([""] + self.column_labels))
        for label, row in zip(self.row_labels, self._formatted_rows()):
            lines.append("\t".join([label] + row))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        rows = [[""] + self.column_labels]
        rows += [[label] + row for label, row in zip(self.row_labels, self._formatted_rows())]
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]

        def line(r):
            return "| " + " | ".join(v.rjust(w) if c else v.ljust(w)
                                     for c, (v, w) in enumerate(zip(r, widths))) + " |"

        sep = "|" + "|".join(("-" * (w + 1) + ":") if c else "-" * (w + 2)
                             for c, w in enumerate(widths)) + "|"
        out = [f"**{self.caption}**", "", line(rows[0]), sep] + [line(r) for r in rows[1:]]
        if self.inputs:
            out += ["", f"inputs: {self._provenance()}"]
        return "\n".join(out) + "\n"

    def render(self, fmt: str = "tsv") -> str:
        if fmt == "tsv":
            return self.to_tsv()
        if fmt == "markdown":
            return self.to_markdown()
        raise ValueError(f"unknown table format {fmt!r}")


def bin_percentages(binned: BinnedSet, caption: Optional[str] = None) -> ReportTable:
    """Per-system bin shares plus a "Both" row, all over the common id count."""
    total = len(binned.ids)
    if total == 0:
        raise DataError("no sentences rated by both systems")
    rows, cells = [], []
    for system, bins in binned.systems.items():
        rows.append(system)
        cells.append([100.0 * sum(1 for b in bins.values() if b is k) / total for k in BINS])
    rows.append("Both")
    cells.append([100.0 * len(binned.both[k]) / total for k in BINS])
    return ReportTable(
        caption or "Percentage of sentences with low, medium, high adequacy ratings",
        rows, [b.value for b in BINS], cells, [1, 1, 1])


# reducers turn a list of per-sentence values into one cell

def mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def pooled_rate(values: Sequence[Tuple[float, float]]) -> float:
    """Sum of numerators over sum of denominators, e.g. edits / ref length."""
    return sum(v[0] for v in values) / sum(v[1] for v in values)


def pooled_perplexity(values: Sequence[Tuple[float, float]]) -> float:
    """Perplexity from summed (log10 probability, event count) pairs."""
    return 10.0 ** (-sum(v[0] for v in values) / sum(v[1] for v in values))


REDUCERS: Dict[str, Callable] = {"mean": mean, "pooled": pooled_rate, "ppl": pooled_perplexity}


def aggregate_by_bin(metrics: Mapping[str, Mapping[int, object]], binned: BinnedSet,
                     restrict_to_both: bool = True, reducer: Callable = mean,
                     caption: str = "", labels: Sequence[str] = ("Overall", "Low", "Medium", "High"),
                     precision: int = 3) -> ReportTable:
    """Overall and per-bin aggregate of a per-sentence metric for each system.

    With `restrict_to_both`, bin b only holds ids both systems put in b and
    Overall covers the union of those sets. An empty bin yields an absent
    cell. Every id in scope must have a metric value.
    """
    rows, cells = [], []
    for system, values in metrics.items():
        if system not in binned.systems:
            raise DataError(f"no ratings for system {system!r}")
        groups = [binned.scope(system, restrict_to_both)]
        groups += [binned.bin_ids(system, b, restrict_to_both) for b in BINS]
        row = []
        for ids in groups:
            missing = [i for i in ids if i not in values]
            if missing:
                raise DataError(
                    f"system {system!r}: no metric value for sentence ids {missing[:5]}"
                    + (" ..." if len(missing) > 5 else ""))
            row.append(reducer([values[i] for i in ids]) if ids else None)
        rows.append(system)
        cells.append(row)
    return ReportTable(caption, rows, list(labels), cells, [precision] * len(labels))


def is_close_table(a: ReportTable, b: ReportTable, tol: float = 1e-12) -> bool:
    if (a.row_labels, a.column_labels) != (b.row_labels, b.column_labels):
        return False
    for ra, rb in zip(a.cells, b.cells):
        for x, y in zip(ra, rb):
            if (x is None) != (y is None):
                return False
            if x is not None and not math.isclose(x, y, rel_tol=0, abs_tol=tol):
                return False
    return True
