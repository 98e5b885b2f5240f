import os
import subprocess
import sys

import pytest

from conftest import FIXTURES, TEST_FIXTURES

BT = os.path.join(FIXTURES, "bt_candidates.tsv")
RATINGS = os.path.join(FIXTURES, "ratings.tsv")


def test_version(run_cli):
    code, out, _ = run_cli("--version")
    assert code == 0 and out.startswith("posterkit 0.1.0") and "arpa/1" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "posterkit", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "posterkit" in r.stdout


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["ter", "--hyp", "x"],
    ["bt-select", "--input", BT, "--mode", "median:3", "--out-src", "a", "--out-tgt", "b",
     "--provenance", "c"],
    ["filter", "--tsv", "a", "--src", "b"],
    ["--threads", "0", "bins", "--ratings", RATINGS],
    ["lm-train", "--input", os.path.join(FIXTURES, "natural.de.txt"), "--order", "0", "-o", "m"],
])
def test_usage_errors_exit_1(run_cli, argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, err = run_cli(*argv)
    assert code == 1
    assert out == "" and err
    assert os.listdir(tmp_path) == []


def test_missing_input_exit_2_no_partial_output(run_cli, tmp_path):
    outs = [tmp_path / n for n in ("s", "t", "p")]
    code, _, err = run_cli("bt-select", "--input", tmp_path / "nope.tsv", "--mode", "quantile:0.4",
                           "--out-src", outs[0], "--out-tgt", outs[1], "--provenance", outs[2])
    assert code == 2 and "not found" in err
    assert os.listdir(tmp_path) == []


def test_bad_data_midway_leaves_no_output(run_cli, tmp_path):
    bad = tmp_path / "bt.tsv"
    lines = open(BT, encoding="utf-8").read().splitlines()[:50]
    lines.append("999\tx\ty\t0.5\tz\t-1")  # positive log-prob
    bad.write_text("\n".join(lines) + "\n")
    code, _, err = run_cli("bt-select", "--input", bad, "--mode", "threshold:0.65",
                           "--out-src", tmp_path / "s", "--out-tgt", tmp_path / "t",
                           "--provenance", tmp_path / "p")
    assert code == 2 and "log-probability" in err
    assert sorted(os.listdir(tmp_path)) == ["bt.tsv"]


def test_existing_output_untouched_on_failure(run_cli, tmp_path):
    out = tmp_path / "out.tsv"
    out.write_text("keep me\n")
    bad = tmp_path / "h.txt"
    bad.write_text("a b\n")
    ref = tmp_path / "r.txt"
    ref.write_text("a b\n\n")
    code, _, _ = run_cli("ter", "--hyp", bad, "--ref", ref, "-o", out)
    assert code == 2
    assert out.read_text() == "keep me\n"


def test_ter_stdout_and_summary(run_cli, tmp_path):
    (tmp_path / "h").write_text("a b c\nb c a\n")
    (tmp_path / "r").write_text("a b c\na b c\n")
    code, out, _ = run_cli("ter", "--hyp", tmp_path / "h", "--ref", tmp_path / "r")
    assert code == 0
    assert out.splitlines() == ["id\tedits\tref_len\tscore", "0\t0\t3\t0.000000", "1\t1\t3\t0.333333",
                                "#summary\tsentences=2\tmean=0.166667\tpooled=0.166667"]


def test_threads_give_identical_output(run_cli, tmp_path):
    hyp = os.path.join(FIXTURES, "unsup.de.txt")
    ref = os.path.join(FIXTURES, "ref.de.txt")
    run_cli("ter", "--hyp", hyp, "--ref", ref, "-o", tmp_path / "one")
    code, _, _ = run_cli("--threads", "3", "ter", "--hyp", hyp, "--ref", ref, "-o", tmp_path / "three")
    assert code == 0
    assert (tmp_path / "one").read_bytes() == (tmp_path / "three").read_bytes()


def test_config_defaults_and_override(run_cli, tmp_path):
    cfg = tmp_path / "bt.cfg"
    cfg.write_text(f"# selection\ninput = {BT}\nmode=quantile:0.40\ntag-unsup=<U>\n"
                   f"out-src={tmp_path / 's'}\nout_tgt={tmp_path / 't'}\nprovenance={tmp_path / 'p'}\n")
    code, _, err = run_cli("--config", cfg, "bt-select")
    assert code == 0, err
    rows = (tmp_path / "p").read_text().splitlines()[1:]
    assert sum(r.split("\t")[1] == "unsup" for r in rows) == 400
    # explicit flag wins over the file
    code, _, _ = run_cli("--config", cfg, "bt-select", "--mode", "quantile:0.10")
    rows = (tmp_path / "p").read_text().splitlines()[1:]
    assert sum(r.split("\t")[1] == "unsup" for r in rows) == 100
    assert (tmp_path / "s").read_text().count("<U> ") == 100


def test_config_unknown_key_and_missing_file(run_cli, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("colour=blue\n")
    assert run_cli("--config", cfg, "bins", "--ratings", RATINGS)[0] == 1
    assert run_cli("--config", tmp_path / "none.cfg", "bins", "--ratings", RATINGS)[0] == 2


def test_config_repeatable_flags(run_cli, tmp_path):
    d = os.path.join(TEST_FIXTURES, "table3")
    run_cli("poster", "--hyp", os.path.join(d, "hyp.conllu"), "--ref", os.path.join(d, "src.conllu"),
            "-o", tmp_path / "a.tsv")
    run_cli("poster", "--hyp", os.path.join(d, "src.conllu"), "--ref", os.path.join(d, "src.conllu"),
            "-o", tmp_path / "b.tsv")
    cfg = tmp_path / "r.cfg"
    cfg.write_text(f"table=4\nscores=mt={tmp_path / 'a.tsv'}\nscores=ref={tmp_path / 'b.tsv'}\n")
    code, out, _ = run_cli("--config", cfg, "report")
    assert code == 0
    assert out.splitlines()[-2:] == ["\tmt\tref", "Src\t0.600\t0.000"]
    code, out, _ = run_cli("--config", cfg, "report", "--scores", f"only={tmp_path / 'b.tsv'}")
    assert out.splitlines()[-2] == "\tonly"


def test_filter_and_dedup_line_files(run_cli, tmp_path):
    (tmp_path / "s").write_text("a b\na b\nc\nd e f g\n")
    (tmp_path / "t").write_text("x y\nx y\nz\nw\n")
    code, out, _ = run_cli("filter", "--src", tmp_path / "s", "--tgt", tmp_path / "t")
    assert code == 0 and out == "a b\tx y\na b\tx y\nc\tz\n"
    code, _, _ = run_cli("dedup", "--src", tmp_path / "s", "--tgt", tmp_path / "t",
                         "--out-src", tmp_path / "ds", "--out-tgt", tmp_path / "dt")
    assert (tmp_path / "ds").read_text() == "a b\nc\nd e f g\n"
    assert run_cli("dedup", "--src", tmp_path / "s", "--tgt", tmp_path / "t",
                   "--out-src", tmp_path / "x")[0] == 1


def test_tag_map_and_poster_pipeline(run_cli, tmp_path):
    (tmp_path / "in.txt").write_text("der Hund bellt .\n")
    code, _, err = run_cli("tag", "--train", os.path.join(FIXTURES, "train.de.conllu"), "--column", "xpos",
                           "--tagset", "tiger", "--input", tmp_path / "in.txt", "-o", tmp_path / "x.conllu",
                           "--save-model", tmp_path / "m.json")
    assert code == 0, err
    assert "\tder\t_\t_\tART\t" in (tmp_path / "x.conllu").read_text()
    code, _, _ = run_cli("map-tags", "--input", tmp_path / "x.conllu", "-o", tmp_path / "u.conllu")
    assert "\tder\t_\tDET\t" in (tmp_path / "u.conllu").read_text()
    code, _, err = run_cli("poster", "--hyp", tmp_path / "u.conllu", "--ref", tmp_path / "x.conllu",
                           "--hyp-column", "upos", "--ref-column", "xpos")
    assert code == 2 and "tagset mismatch" in err
    assert run_cli("tag", "--model", tmp_path / "m.json", "--input", tmp_path / "in.txt")[0] == 1


def test_tau_output(run_cli, tmp_path):
    (tmp_path / "a").write_text("0-0 1-1\n0-0 0-1\n0-1 1-0\n")
    code, out, _ = run_cli("tau", "--align", tmp_path / "a")
    assert out.splitlines() == ["id\tconcordant\tdiscordant\ttau", "0\t1\t0\t1.000000", "1\t0\t0\tNA",
                                "2\t0\t1\t-1.000000", "#summary\tsentences=3\tdefined=2\tmean=0.000000"]
    (tmp_path / "s").write_text("a\nb\nc\n")
    (tmp_path / "t").write_text("a b\nb c\nc d\n")
    code, _, err = run_cli("tau", "--align", tmp_path / "a", "--src", tmp_path / "s", "--tgt", tmp_path / "t")
    assert code == 2 and "outside" in err


def test_bleu_signature_output(run_cli):
    d = os.path.join(TEST_FIXTURES, "bleu_golden")
    code, out, _ = run_cli("bleu", "--hyp", os.path.join(d, "hyp.txt"), "--ref", os.path.join(d, "ref.txt"))
    assert code == 0
    assert out.splitlines()[0] == "BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a+version.0.1.0 = 56.38"


def test_lm_cli_roundtrip(run_cli, tmp_path):
    corpus = os.path.join(FIXTURES, "natural.de.txt")
    code, _, _ = run_cli("lm-train", "--input", corpus, "--order", "2", "-o", tmp_path / "m.arpa")
    assert code == 0
    code, out, _ = run_cli("lm-ppl", "--model", tmp_path / "m.arpa", "--input", os.path.join(FIXTURES, "sup.de.txt"))
    lines = out.splitlines()
    assert lines[0] == "id\tlog10prob\tevents\tppl" and len(lines) == 1002
    assert lines[-1].startswith("#summary\tsentences=1000\t")
    (tmp_path / "bad.arpa").write_text("not an arpa file\n")
    assert run_cli("lm-ppl", "--model", tmp_path / "bad.arpa", "--input", corpus)[0] == 2


def test_lm_contrast_binned_markdown(run_cli, tmp_path):
    for name in ("natural", "translated"):
        run_cli("lm-train", "--input", os.path.join(FIXTURES, f"{name}.de.txt"), "--order", "2",
                "-o", tmp_path / f"{name}.arpa")
    code, out, err = run_cli("lm-contrast", "--nlm", tmp_path / "natural.arpa", "--tlm", tmp_path / "translated.arpa",
                             "--system", f"sup={FIXTURES}/sup.de.txt", "--system", f"unsup={FIXTURES}/unsup.de.txt",
                             "--ratings", RATINGS, "--format", "markdown")
    assert code == 0, err
    assert "nLM:Overall" in out and "| unsup |" in out
    assert run_cli("lm-contrast", "--nlm", "a", "--tlm", "b", "--system", "nofile")[0] == 1


def test_aggregate_reducers(run_cli, tmp_path):
    for sys_ in ("sup", "unsup"):
        (tmp_path / sys_).write_text("id\tedits\tref_len\tscore\n" + "".join(
            f"{i}\t1\t{1 + i % 3}\t{1 / (1 + i % 3):.6f}\n" for i in range(1000)))
    args = ["aggregate", "--ratings", RATINGS, "--scores", f"sup={tmp_path / 'sup'}",
            "--scores", f"unsup={tmp_path / 'unsup'}"]
    code, pooled, _ = run_cli(*args)
    code2, mean, _ = run_cli(*args, "--reducer", "mean")
    assert code == code2 == 0 and pooled != mean
    (tmp_path / "unsup").write_text("id\tedits\tref_len\tscore\n0\t1\t1\t1.0\n")
    assert run_cli(*args)[0] == 2
