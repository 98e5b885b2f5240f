"""Freeze reference-tool BLEU values for the 10-sentence golden fixture.

Needs sacrebleu; run once and commit the resulting golden.json.
"""

import json
import os

import sacrebleu

here = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures", "bleu_golden")


def lines(name):
    with open(os.path.join(here, name), encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f]


hyps, refs = lines("hyp.txt"), lines("ref.txt")
out = {"sacrebleu_version": sacrebleu.__version__, "cases": {}}
for tok in ("13a", "none"):
    b = sacrebleu.corpus_bleu(hyps, [refs], smooth_method="exp", tokenize=tok)
    out["cases"][tok] = {
        "score": round(b.score, 6),
        "counts": b.counts,
        "totals": b.totals,
        "sys_len": b.sys_len,
        "ref_len": b.ref_len,
        "sentences": [round(sacrebleu.sentence_bleu(h, [r], smooth_method="exp", tokenize=tok).score, 6)
                      for h, r in zip(hyps, refs)],
    }
with open(os.path.join(here, "golden.json"), "w", encoding="utf-8") as f:
    json.dump(out, f, indent=1, sort_keys=True)
    f.write("\n")
