"""Corpus analysis and back-translation selection for comparing MT systems.

Measures structural similarity (TER over POS tag sequences), reordering
(Kendall's tau over word alignments), naturalness (perplexity contrast between
two n-gram LMs) and selects back-translations by length-normalized probability.
"""

__version__ = "0.1.0"

# bumped whenever a written file layout changes
FORMAT_VERSIONS = {"arpa": "1", "scores-tsv": "1", "provenance-tsv": "1", "tagger-json": "1"}
