"""Generate the synthetic fixture corpora under fixtures/.

Everything is drawn from a seeded RNG, so rerunning reproduces the files
byte for byte. The toy "German" output comes in two flavours: a natural one
(varied word order and vocabulary) and a translated one (source-ordered,
frequent words). Supervised system output leans translated, unsupervised
output leans natural, which gives the LM contrast and posTER something to
find.

    python scripts/make_fixtures.py [OUTDIR]
"""

import os
import random
import sys

SEED = 20211

EN_LEX = {
    "PRON": "I you he she we they it".split(),
    "VERB": "made saw bought found read wrote took gave liked opened".split(),
    "AUX": "have has had will".split(),
    "DET": "the a this every".split(),
    "NOUN": "cup coffee morning house book letter city friend car door window day".split(),
    "ADJ": "big small old new red quiet".split(),
    "ADP": "in of on with from".split(),
    "ADV": "today yesterday often now".split(),
    "PROPN": "Berlin Anna Peter Europe".split(),
    "PUNCT": ".".split(),
}

EN_TEMPLATES = [
    "PRON VERB DET NOUN PUNCT",
    "PRON VERB PRON DET NOUN ADP PROPN DET NOUN PUNCT",
    "DET NOUN VERB DET ADJ NOUN PUNCT",
    "PRON AUX VERB DET NOUN ADV PUNCT",
    "ADV PRON VERB DET NOUN ADP DET NOUN PUNCT",
    "PROPN VERB DET ADJ NOUN ADP PROPN PUNCT",
    "DET ADJ NOUN VERB ADP DET NOUN PUNCT",
    "PRON AUX VERB DET NOUN ADP DET ADJ NOUN PUNCT",
]

# English UD tag -> TIGER tag of the word-by-word rendering
EN_TO_TIGER = {
    "PRON": "PPER", "VERB": "VVFIN", "AUX": "VAFIN", "DET": "ART", "NOUN": "NN",
    "ADJ": "ADJA", "ADP": "APPR", "ADV": "ADV", "PROPN": "NE", "PUNCT": "$.",
}

DE_LEX = {
    "PPER": "ich du er sie wir es mir".split(),
    "VVFIN": "machte sah kaufte fand las schrieb nahm gab mochte oeffnete".split(),
    "VVPP": "gemacht gesehen gekauft gefunden gelesen geschrieben genommen gegeben".split(),
    "VAFIN": "habe hat hatte wird".split(),
    "ART": "die der das eine ein jede".split(),
    "NN": "Tasse Kaffee Morgen Haus Buch Brief Stadt Freund Auto Tuer Fenster Tag".split(),
    "ADJA": "grosse kleine alte neue rote stille".split(),
    "APPR": "in von auf mit aus".split(),
    "ADV": "heute gestern oft jetzt".split(),
    "NE": "Berlin Anna Peter Europa".split(),
    "$.": ".".split(),
    "KON": "und aber".split(),
}


def zipf_choice(rng, words, skew):
    # skew > 1 concentrates mass on the first words
    weights = [1.0 / (k + 1) ** skew for k in range(len(words))]
    return rng.choices(words, weights)[0]


def render(rng, tags, skew):
    return [zipf_choice(rng, DE_LEX[t], skew) for t in tags]


def english(rng):
    tags = rng.choice(EN_TEMPLATES).split()
    return [rng.choice(EN_LEX[t]) for t in tags], tags


def translate(rng, en_tags, reorder_p, skew):
    """Word-by-word rendering, optionally moved towards German order."""
    tags = [EN_TO_TIGER[t] for t in en_tags]
    if rng.random() < reorder_p:
        # perfect tense: participle to the end
        if "VAFIN" in tags and "VVFIN" in tags:
            i = tags.index("VVFIN")
            tags.pop(i)
            tags.insert(len(tags) - 1, "VVPP")
        # verb second after a fronted adverb
        if "ADV" in tags and tags[0] != "ADV":
            tags.remove("ADV")
            tags.insert(0, "ADV")
        if tags[0] == "ADV" and len(tags) > 2 and tags[1] == "PPER":
            tags[1], tags[2] = tags[2], tags[1]
    return render(rng, tags, skew), tags


def natural_sentence(rng):
    en_toks, en_tags = english(rng)
    toks, tags = translate(rng, en_tags, 0.9, 0.6)
    if rng.random() < 0.3:
        extra, extra_tags = translate(rng, english(rng)[1], 0.9, 0.6)
        toks = toks[:-1] + ["und"] + extra
        tags = tags[:-1] + ["KON"] + extra_tags
    return toks, tags


def translated_sentence(rng):
    toks, tags = translate(rng, english(rng)[1], 0.15, 2.0)
    return toks, tags


def write(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


def conllu_block(sid, tokens, upos, xpos):
    rows = [f"# sent_id = {sid}"]
    for i, (tok, u, x) in enumerate(zip(tokens, upos, xpos), start=1):
        rows.append(f"{i}\t{tok}\t_\t{u}\t{x}\t_\t_\t_\t_\t_")
    return "\n".join(rows) + "\n"


def tiger_ud():
    here = os.path.dirname(os.path.abspath(__file__))
    path = os.path.join(here, "..", "src", "posterkit", "data", "tiger_ud.tsv")
    with open(path, encoding="utf-8") as f:
        return dict(line.rstrip("\n").split("\t") for line in f if line.strip())


# sup bin x unsup bin counts over 1000 items; diagonal 86/255/218 and
# margins 187/421/392 (sup), 193/446/361 (unsup)
CONTINGENCY = [[86, 60, 41], [64, 255, 102], [43, 131, 218]]
BIN_SCORES = [(0, 1, 2), (3, 4), (5, 6)]


def main(outdir):
    os.makedirs(outdir, exist_ok=True)
    rng = random.Random(SEED)
    t2u = tiger_ud()

    # raw bitext for filter/dedup: duplicates, long and unbalanced pairs
    bitext = []
    for i in range(3000):
        en, en_tags = english(rng)
        de, _ = translate(rng, en_tags, 0.5, 1.0)
        r = rng.random()
        if r < 0.04 and bitext:
            bitext.append(bitext[rng.randrange(len(bitext))])
            continue
        if r < 0.08:
            de = de + de[:len(de) // 2 + 2]
        elif r < 0.09:
            en = en * 30
            de = de * 30
        bitext.append(" ".join(en) + "\t" + " ".join(de))
    write(os.path.join(outdir, "bitext.tsv"), bitext)

    # tagger training data
    blocks = []
    for i in range(2000):
        toks, tags = natural_sentence(rng) if i % 2 else translated_sentence(rng)
        blocks.append(conllu_block(i, toks, [t2u[t] for t in tags], tags))
    write(os.path.join(outdir, "train.de.conllu"), blocks)

    # LM training corpora
    write(os.path.join(outdir, "natural.de.txt"),
          [" ".join(natural_sentence(rng)[0]) for _ in range(3000)])
    write(os.path.join(outdir, "translated.de.txt"),
          [" ".join(translated_sentence(rng)[0]) for _ in range(3000)])

    # test set: English source, human reference and two systems
    src_blocks, ref, sup, unsup, sup_align, unsup_align = [], [], [], [], [], []
    for i in range(1000):
        en, en_tags = english(rng)
        src_blocks.append(conllu_block(i, en, en_tags, ["_"] * len(en)))
        ref.append(" ".join(translate(rng, en_tags, 0.6, 0.8)[0]))
        s_toks, _ = translate(rng, en_tags, 0.1, 2.0)
        u_toks, _ = translate(rng, en_tags, 0.7, 0.6)
        sup.append(" ".join(s_toks))
        unsup.append(" ".join(u_toks))
        sup_align.append(_alignment(rng, len(en), len(s_toks), 0.05))
        unsup_align.append(_alignment(rng, len(en), len(u_toks), 0.3))
    write(os.path.join(outdir, "test.en.conllu"), src_blocks)
    write(os.path.join(outdir, "ref.de.txt"), ref)
    write(os.path.join(outdir, "sup.de.txt"), sup)
    write(os.path.join(outdir, "unsup.de.txt"), unsup)
    write(os.path.join(outdir, "sup.align"), sup_align)
    write(os.path.join(outdir, "unsup.align"), unsup_align)

    # side-by-side ratings engineered to the contingency table
    cells = [(a, b) for a in range(3) for b in range(3) for _ in range(CONTINGENCY[a][b])]
    rng.shuffle(cells)
    rows = ["sentence_id\tsystem_id\tscheme\tscore"]
    for i, (a, b) in enumerate(cells):
        rows.append(f"{i}\tsup\tsbs\t{rng.choice(BIN_SCORES[a])}")
        rows.append(f"{i}\tunsup\tsbs\t{rng.choice(BIN_SCORES[b])}")
    write(os.path.join(outdir, "ratings.tsv"), rows)

    # back-translation candidates scored by an external model (natural log)
    bt = ["id\tsrc\tsup_bt\tsup_logP\tunsup_bt\tunsup_logP"]
    for i in range(1000):
        de, _ = natural_sentence(rng)
        en_s, _ = english(rng)
        en_u, _ = english(rng)
        lp_s = -len(en_s) * rng.uniform(0.2, 1.2)
        lp_u = -len(en_u) * rng.uniform(0.2, 2.2)
        bt.append(f"{i}\t{' '.join(de)}\t{' '.join(en_s)}\t{lp_s:.6f}\t{' '.join(en_u)}\t{lp_u:.6f}")
    write(os.path.join(outdir, "bt_candidates.tsv"), bt)


def _alignment(rng, n_src, n_tgt, noise):
    """Roughly diagonal links with some crossing, dropped and one-to-many links."""
    links = set()
    for s in range(n_src):
        t = round(s * (n_tgt - 1) / max(n_src - 1, 1))
        if rng.random() < noise:
            t = rng.randrange(n_tgt)
        if rng.random() < 0.05:
            continue
        links.add((s, t))
        if rng.random() < 0.05 and t + 1 < n_tgt:
            links.add((s, t + 1))
    return " ".join(f"{s}-{t}" for s, t in sorted(links))


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "..", "fixtures"))
