import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from posterkit import btselect as B
from posterkit.errors import DataError, ParseError


def rec(i, sup_tokens, sup_lp, unsup_tokens, unsup_lp, src="orig"):
    return B.BtRecord(i, src, B.Candidate(tuple(sup_tokens.split()), sup_lp),
                      B.Candidate(tuple(unsup_tokens.split()), unsup_lp))


def test_normalization_and_delta():
    p = B.score_pairs([rec(0, "a b", 2 * math.log(0.5), "x y z w", 4 * math.log(0.25))])[0]
    assert p.pnorm_sup == pytest.approx(0.5)
    assert p.pnorm_unsup == pytest.approx(0.25)
    assert p.delta_p == pytest.approx(0.5)


def test_tiny_probabilities_do_not_underflow_the_ratio():
    p = B.score_pairs([rec(0, "a", -800.0, "b", -801.0)])[0]
    assert p.pnorm_sup == 0.0
    assert p.delta_p == pytest.approx(math.exp(-1))


def test_input_validation():
    with pytest.raises(DataError):
        B.score_pairs([rec(0, "", -1.0, "b", -1.0)])
    with pytest.raises(DataError):
        B.score_pairs([rec(0, "a", 0.5, "b", -1.0)])
    pairs = B.score_pairs([rec(0, "a", -1.0, "b", -1.0)] * 2)
    with pytest.raises(DataError, match="duplicate"):
        B.select(pairs, B.BtSelectionConfig.parse("threshold:0.5"))
    with pytest.raises(DataError):
        B.select([], B.BtSelectionConfig.parse("threshold:0.5"))


@pytest.mark.parametrize("mode", ["threshold:0", "threshold:-1", "quantile:1.5", "median:0.5",
                                  "threshold", "quantile:abc"])
def test_bad_modes(mode):
    with pytest.raises(DataError):
        B.BtSelectionConfig.parse(mode)


def test_bad_tags():
    with pytest.raises(DataError):
        B.BtSelectionConfig.parse("threshold:0.5", tag_sup="two words")


def test_threshold_inclusive_at_t():
    p = B.score_pairs([rec(0, "a", math.log(0.5), "b", math.log(0.5))])[0]
    assert p.delta_p == 1.0
    out = B.select([p], B.BtSelectionConfig.parse("threshold:1.0"))
    assert out.chosen[0] == "unsup"


def test_quantile_ties_broken_by_id():
    pairs = B.score_pairs([rec(i, "a", -1.0, "b", -1.0) for i in (5, 2, 9, 1)])
    out = B.select(pairs, B.BtSelectionConfig.parse("quantile:0.5"))
    assert sorted(i for i, c in out.chosen.items() if c == "unsup") == [1, 2]


def test_quantile_count_rounding():
    assert B.quantile_count(0.29, 100) == 29
    assert B.quantile_count(0.4, 1000) == 400
    assert B.quantile_count(0.333, 10) == 3
    assert B.quantile_count(0.0, 10) == 0 and B.quantile_count(1.0, 10) == 10


@given(st.lists(st.tuples(st.floats(-50, -0.01), st.floats(-50, -0.01)), min_size=1, max_size=50),
       st.floats(0.01, 1.0))
def test_quantile_selects_floor_qn(lps, q):
    pairs = B.score_pairs([rec(i, "a b", s, "c", u) for i, (s, u) in enumerate(lps)])
    out = B.select(pairs, B.BtSelectionConfig(B.Mode.QUANTILE, q))
    assert out.counts["unsup"] == B.quantile_count(q, len(pairs))
    assert len(out.chosen) == len(pairs)


def test_monotonicity_check_requires_order():
    pairs = B.score_pairs([rec(0, "a", -1.0, "b", -2.0)])
    with pytest.raises(ValueError):
        B.monotonicity_check(pairs, 0.7, 0.5)


def test_tagged_corpus_and_provenance(tmp_path, caplog):
    pairs = B.score_pairs([rec(0, "s0", -1.0, "u0", -1.0, "eins"),
                           rec(1, "<U> s1", -0.1, "u1", -5.0, "zwei")])
    config = B.BtSelectionConfig.parse("threshold:0.65", tag_sup="<S>", tag_unsup="<U>")
    out = B.select(pairs, config)
    assert out.chosen == {0: "unsup", 1: "sup"}
    assert B.tag_corpus(out, config) == [("<U> u0", "eins"), ("<S> <U> s1", "zwei")]
    assert "also occurs as a token" in caplog.text
    plain = B.tag_corpus(out, B.BtSelectionConfig.parse("threshold:0.65"))
    assert plain[0] == ("u0", "eins")

    B.write_selection(out, config, tmp_path / "s", tmp_path / "t", tmp_path / "p")
    assert (tmp_path / "s").read_text() == "<U> u0\n<S> <U> s1\n"
    assert (tmp_path / "t").read_text() == "eins\nzwei\n"
    prov = (tmp_path / "p").read_text().splitlines()
    assert prov[0] == "id\tchosen\tdelta_p"
    assert prov[1] == "0\tunsup\t1"


def test_read_records_and_log_base(tmp_path):
    p = tmp_path / "bt.tsv"
    p.write_text("id\tsrc\tsup_bt\tsup_logP\tunsup_bt\tunsup_logP\n"
                 "0\tder Hund\tthe dog\t-2\ta dog\t-1\n")
    r = B.read_bt_records(p, log_base=10)[0]
    assert r.sup.logp == pytest.approx(-2 * math.log(10))
    assert r.src == "der Hund" and r.unsup.tokens == ("a", "dog")
    p.write_text("0\tx\ty\tnot-a-number\tz\t-1\n")
    with pytest.raises(ParseError, match="line 1"):
        B.read_bt_records(p)
    p.write_text("0\tx\ty\n")
    with pytest.raises(ParseError):
        B.read_bt_records(p)
