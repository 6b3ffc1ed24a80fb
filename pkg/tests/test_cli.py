import json

import pytest

from eekit.cli import main


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert run(["synth", "--out-dir", root, "--types", "12", "--sentences", "40",
                "--seed", "3"]) == 0
    return {"root": root, "ontology": root / "ontology.json",
            "corpus": root / "corpus.jsonl"}


class TestValidateAndStats:
    def test_validate_ok(self, workspace, capsys):
        assert run(["validate", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"]]) == 0
        out = capsys.readouterr().out
        assert "ontology: ok" in out and "corpus: ok" in out

    def test_validate_builtin_names(self, capsys):
        assert run(["validate", "--ontology", "ace"]) == 0
        assert "33 event types" in capsys.readouterr().out

    def test_validate_bad_ontology(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"roles": ["R"], "events": []}))
        assert run(["validate", "--ontology", bad]) == 1
        assert "INVALID" in capsys.readouterr().out

    def test_stats_columns(self, workspace, capsys):
        assert run(["stats", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"]]) == 0
        out = capsys.readouterr().out
        assert "#Docs" in out and "#Arg Types" in out

    def test_stats_on_empty_corpus(self, workspace, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert run(["stats", "--ontology", workspace["ontology"],
                    "--corpus", empty]) == 0
        assert " 0" in capsys.readouterr().out


class TestSplitCommand:
    def test_split_writes_manifest_and_reproduces(self, workspace, tmp_path):
        out1 = tmp_path / "a.jsonl"
        out2 = tmp_path / "b.jsonl"
        for out in (out1, out2):
            assert run(["split", "--ontology", workspace["ontology"],
                        "--corpus", workspace["corpus"], "--out", out,
                        "--proportion", "0.3", "--seed", "5"]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        manifest = json.loads((tmp_path / "a.jsonl.manifest.json").read_text())
        assert manifest["subcommand"] == "split"
        assert manifest["config"]["selected_docs"]

    def test_few_shot_split(self, workspace, tmp_path):
        out = tmp_path / "few.jsonl"
        assert run(["split", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"], "--out", out,
                    "--n-common", "3", "--k", "1", "--seed", "2"]) == 0
        unseen = json.loads((tmp_path / "few.unseen_types.json").read_text())
        assert isinstance(unseen, list) and unseen


class TestBuildDataCommand:
    def test_empty_corpus_empty_instances(self, workspace, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        out = tmp_path / "instances.jsonl"
        assert run(["build-data", "--ontology", workspace["ontology"],
                    "--corpus", empty, "--out", out, "--task", "e2e",
                    "--m", "0"]) == 0
        assert out.read_text() == ""

    def test_train_instances_reproducible(self, workspace, tmp_path):
        outs = []
        for name in ("i1.jsonl", "i2.jsonl"):
            out = tmp_path / name
            assert run(["build-data", "--ontology", workspace["ontology"],
                        "--corpus", workspace["corpus"], "--out", out,
                        "--task", "e2e", "--m", "4", "--seed", "9"]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_inference_instances(self, workspace, tmp_path):
        out = tmp_path / "inf.jsonl"
        assert run(["build-data", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"], "--out", out,
                    "--task", "e2e", "--split", "inference"]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 40 * 12
        assert all("\"target\"" not in line for line in lines)

    def test_variant_flag(self, workspace, tmp_path):
        out = tmp_path / "special.jsonl"
        assert run(["build-data", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"], "--out", out,
                    "--task", "eae", "--split", "inference",
                    "--variant", "special"]) == 0
        assert "<Agent>" in out.read_text() or "<Theme>" in out.read_text()


class TestInferScoreDecode:
    def test_oracle_round_trip_scores_one(self, workspace, tmp_path, capsys):
        prefix = tmp_path / "run"
        assert run(["infer", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"], "--out-prefix", prefix,
                    "--mode", "e2e", "--generator", "oracle"]) == 0
        preds = tmp_path / "run.preds.jsonl"
        assert preds.exists() and (tmp_path / "run.raw.jsonl").exists()
        assert json.loads((tmp_path / "run.preds.jsonl.manifest.json")
                          .read_text())["config"]["mode"] == "e2e"
        assert run(["score", "--ontology", workspace["ontology"],
                    "--gold", workspace["corpus"], "--preds", preds]) == 0
        out = capsys.readouterr().out
        assert out.count("F1: 100.00") == 4

    def test_decode_replay_matches(self, workspace, tmp_path):
        prefix = tmp_path / "run"
        run(["infer", "--ontology", workspace["ontology"],
             "--corpus", workspace["corpus"], "--out-prefix", prefix,
             "--mode", "e2e", "--generator", "oracle"])
        replayed = tmp_path / "replayed.jsonl"
        assert run(["decode", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"],
                    "--raw", tmp_path / "run.raw.jsonl",
                    "--out", replayed]) == 0
        assert replayed.read_bytes() == (tmp_path / "run.preds.jsonl").read_bytes()

    def test_score_matrix_and_csv(self, workspace, tmp_path, capsys):
        prefix = tmp_path / "m"
        run(["infer", "--ontology", workspace["ontology"],
             "--corpus", workspace["corpus"], "--out-prefix", prefix,
             "--mode", "e2e", "--generator", "oracle"])
        preds = tmp_path / "m.preds.jsonl"
        csv_out = tmp_path / "matrix.csv"
        assert run(["score", "--ontology", workspace["ontology"],
                    "--gold", workspace["corpus"], "--preds", preds,
                    "--preds", preds, "--csv", csv_out]) == 0
        out = capsys.readouterr().out
        assert "run" in out
        assert len(csv_out.read_text().splitlines()) == 3

    def test_score_structural_error_exit_code(self, workspace, tmp_path):
        stray = tmp_path / "stray.jsonl"
        stray.write_text(json.dumps({
            "doc_id": "nope", "sent_id": "nope",
            "events": [{"event_type": "Synth:Act00",
                        "trigger": {"start": 0, "end": 1},
                        "arguments": []}],
            "diagnostics": [],
        }) + "\n")
        assert run(["score", "--ontology", workspace["ontology"],
                    "--gold", workspace["corpus"], "--preds", stray]) == 1

    def test_corruption_options_via_cli(self, workspace, tmp_path, capsys):
        prefix = tmp_path / "garbled"
        assert run(["infer", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"], "--out-prefix", prefix,
                    "--mode", "e2e", "--generator", "oracle:garble=1.0"]) == 0
        assert run(["score", "--ontology", workspace["ontology"],
                    "--gold", workspace["corpus"],
                    "--preds", tmp_path / "garbled.preds.jsonl"]) == 0
        out = capsys.readouterr().out
        assert "F1:   0.00" in out


class TestBaselineCommand:
    def test_matching_baseline(self, workspace, tmp_path):
        out = tmp_path / "match.jsonl"
        assert run(["baseline", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"], "--out", out,
                    "--kind", "matching"]) == 0
        assert out.exists()

    def test_lemma_baseline_with_table(self, workspace, tmp_path):
        lemmas = tmp_path / "lemmas.tsv"
        lemmas.write_text("went\tgo\n")
        out = tmp_path / "lemma.jsonl"
        assert run(["baseline", "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"], "--out", out,
                    "--kind", "lemma", "--lemmas", lemmas]) == 0
        manifest = json.loads((tmp_path / "lemma.jsonl.manifest.json").read_text())
        assert manifest["config"]["kind"] == "lemma"


class TestConfigFile:
    def test_config_supplies_defaults(self, workspace, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"m": 2, "seed": 42}))
        out = tmp_path / "from_config.jsonl"
        assert run(["--config", cfg, "build-data",
                    "--ontology", workspace["ontology"],
                    "--corpus", workspace["corpus"], "--out", out,
                    "--task", "e2e"]) == 0
        manifest = json.loads((tmp_path / "from_config.jsonl.manifest.json")
                              .read_text())
        assert manifest["config"]["m"] == 2 and manifest["config"]["seed"] == 42
