"""Independent reference implementations used only by the tests.

None of these share code with the package; they are written straight from
the definitions and favour obviousness over speed.
"""

import itertools
import math
from collections import Counter
from functools import lru_cache


def levenshtein(a, b):
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
    return d(len(a), len(b))


def kendall_counts(links):
    concordant = discordant = 0
    for (s1, t1), (s2, t2) in itertools.combinations(links, 2):
        sign = (s2 - s1) * (t2 - t1)
        if sign > 0:
            concordant += 1
        elif sign < 0:
            discordant += 1
    return concordant, discordant


def bigram_model(corpus, discount):
    """p(w | v) for an order-2 interpolated absolute-discounting model.

    Returns (vocab of predictable words, function p(w, v)). Counts are taken
    directly from the padded sentences; `v` may be "<s>" or any word.
    """
    uni = Counter()
    bi = Counter()
    for sent in corpus:
        padded = ["<s>"] + list(sent) + ["</s>"]
        for i in range(1, len(padded)):
            uni[padded[i]] += 1
            bi[(padded[i - 1], padded[i])] += 1
    outcomes = sorted(set(w for s in corpus for w in s) | {"</s>", "<unk>"})
    n = sum(uni.values())
    seen_types = sum(1 for w in outcomes if uni[w] > 0)

    def p_uni(w):
        return max(uni[w] - discount, 0) / n + discount * seen_types / n / len(outcomes)

    def p(w, v):
        c_v = sum(c for (a, _), c in bi.items() if a == v)
        if c_v == 0:
            return p_uni(w)
        types = sum(1 for (a, _) in bi if a == v)
        return max(bi[(v, w)] - discount, 0) / c_v + discount * types / c_v * p_uni(w)

    return outcomes, p


def bleu_by_hand(hyp, ref):
    """Single-pair BLEU with exp smoothing, tokens already split."""
    precisions = []
    smooth = 1.0
    for n in range(1, 5):
        h = Counter(tuple(hyp[i:i + n]) for i in range(len(hyp) - n + 1))
        r = Counter(tuple(ref[i:i + n]) for i in range(len(ref) - n + 1))
        match = sum(min(c, r[g]) for g, c in h.items())
        total = max(len(hyp) - n + 1, 0)
        if match == 0:
            smooth *= 2
            precisions.append(1 / (smooth * total))
        else:
            precisions.append(match / total)
    bp = 1.0 if len(hyp) >= len(ref) else math.exp(1 - len(ref) / len(hyp))
    return 100 * bp * math.exp(sum(math.log(p) for p in precisions) / 4)
