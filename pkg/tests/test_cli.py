import json

import numpy as np
import pytest

from treff.cli import main
from treff import load_params, read_embeddings


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    rc = main([
        "synth", "--classes", "6", "--dim", "16", "--per-class", "12",
        "--kappa", "4.0", "--text-noise", "0.3", "--seed", "3",
        "--out", str(out),
    ])
    assert rc == 0
    return out


class TestSynth:
    def test_outputs_exist(self, synth_dir):
        assert (synth_dir / "audio.treffemb").exists()
        assert (synth_dir / "text.treffemb").exists()
        assert (synth_dir / "dataset.json").exists()

    def test_files_well_formed(self, synth_dir):
        emb, labels, vocab = read_embeddings(synth_dir / "audio.treffemb")
        assert emb.rows == 72 and emb.dim == 16
        assert vocab.size == 6
        text, tl, tv = read_embeddings(synth_dir / "text.treffemb")
        assert text.rows == 6 and tv == vocab
        assert tl.tolist() == list(range(6))


class TestZeroshot:
    def test_json_output(self, synth_dir, tmp_path):
        out = tmp_path / "zs.json"
        rc = main([
            "zeroshot", "--audio", str(synth_dir / "audio.treffemb"),
            "--text", str(synth_dir / "text.treffemb"), "--out", str(out),
        ])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert "manifest" in payload
        assert len(payload["predictions"]) == 72
        assert 0.0 <= payload["accuracy"] <= 1.0
        assert payload["manifest"]["input_digests"]


class TestEval:
    def test_deterministic_bytes(self, synth_dir, tmp_path):
        args = [
            "eval", "--method", "treff-free",
            "--audio", str(synth_dir / "audio.treffemb"),
            "--text", str(synth_dir / "text.treffemb"),
            "--n-way", "3", "--k-shot", "2", "--episodes", "5", "--seed", "11",
        ]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_method_exits_2(self, synth_dir, tmp_path, capsys):
        out = tmp_path / "x.json"
        with pytest.raises(SystemExit) as e:
            main([
                "eval", "--method", "bogus",
                "--audio", str(synth_dir / "audio.treffemb"),
                "--text", str(synth_dir / "text.treffemb"),
                "--n-way", "3", "--k-shot", "2", "--out", str(out),
            ])
        assert e.value.code == 2
        assert not out.exists()

    def test_missing_file_exits_1(self, synth_dir, capsys):
        rc = main([
            "eval", "--method", "zsl", "--audio", "/nonexistent.treffemb",
            "--text", str(synth_dir / "text.treffemb"),
            "--n-way", "3", "--k-shot", "2",
        ])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_manifest_embedded(self, synth_dir, tmp_path):
        out = tmp_path / "m.json"
        main([
            "eval", "--method", "proto",
            "--audio", str(synth_dir / "audio.treffemb"),
            "--text", str(synth_dir / "text.treffemb"),
            "--n-way", "3", "--k-shot", "2", "--episodes", "3", "--seed", "5",
            "--out", str(out),
        ])
        payload = json.loads(out.read_text())
        man = payload["manifest"]
        assert man["command"] == "eval"
        assert man["base_seed"] == 5
        # defaults are echoed even when the flag was omitted
        assert man["config"]["episodes"] == 3
        assert man["config"]["queries_per_class"] == 5


class TestCurve:
    def test_csv_columns(self, synth_dir, tmp_path):
        out = tmp_path / "curve.csv"
        rc = main([
            "curve", "--method", "proto",
            "--audio", str(synth_dir / "audio.treffemb"),
            "--text", str(synth_dir / "text.treffemb"),
            "--n-way", "3", "--shots", "1,2,4", "--episodes", "4", "--seed", "2",
            "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "method,n,k,episodes,mean_acc,std_err"
        assert len(lines) == 4
        ks = [int(line.split(",")[2]) for line in lines[1:]]
        assert ks == [1, 2, 4]


class TestFinetune:
    def test_params_saved_and_loadable(self, synth_dir, tmp_path):
        params_path = tmp_path / "params.bin"
        report_path = tmp_path / "report.json"
        # use the full labeled file as the support set
        rc = main([
            "finetune", "--support", str(synth_dir / "audio.treffemb"),
            "--text", str(synth_dir / "text.treffemb"),
            "--epochs", "3", "--tau", "1.0",
            "--out", str(params_path), "--report", str(report_path),
        ])
        assert rc == 0
        params = load_params(params_path)
        assert params.W.shape == (16, 16)
        report = json.loads(report_path.read_text())
        assert len(report["loss_per_epoch"]) == 3
