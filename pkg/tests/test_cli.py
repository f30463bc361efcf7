import json

import numpy as np
import pytest

from sdec import cli
from sdec import io as sdio
from sdec.embed import TokenSequence
from sdec.numeric import Rng


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_config(path, **overrides):
    doc = {
        "layer_dims": [8, 16, 4],
        "ae_epochs": 8,
        "max_iterations": 400,
        "seed": 3,
    }
    doc.update(overrides)
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture
def blob_files(tmp_path, capsys):
    data = tmp_path / "blobs.sdec"
    gold = tmp_path / "gold.csv"
    code, _, _ = run(capsys, "synth", "--blobs", "3", "--n", "120", "--dim", "8",
                     "--sep", "10", "--seed", "4", "--out", str(data), "--labels", str(gold))
    assert code == 0
    return data, gold


class TestSynth:
    def test_writes_data_and_labels(self, blob_files):
        data, gold = blob_files
        x = sdio.load_embeddings(data)
        labels = sdio.load_labels(gold)
        assert x.shape == (120, 8)
        assert labels.shape == (120,)
        assert set(labels.tolist()) == {0, 1, 2}

    def test_byte_identical_rerun(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a.sdec", tmp_path / "b.sdec"
        run(capsys, "synth", "--n", "50", "--dim", "4", "--seed", "9", "--out", str(out1))
        run(capsys, "synth", "--n", "50", "--dim", "4", "--seed", "9", "--out", str(out2))
        assert out1.read_bytes() == out2.read_bytes()


class TestEval:
    def test_identical_labelings(self, tmp_path, capsys):
        labels = tmp_path / "labels.csv"
        sdio.save_labels(labels, [0, 1, 2, 0, 1, 2])
        code, out, _ = run(capsys, "eval", "--pred", str(labels), "--true", str(labels))
        assert code == 0
        doc = json.loads(out)
        assert doc["acc"] == 1.0 and doc["nmi"] == 1.0 and doc["ari"] == 1.0

    def test_missing_file_exit_three(self, tmp_path, capsys):
        labels = tmp_path / "labels.csv"
        sdio.save_labels(labels, [0, 1])
        code, _, err = run(capsys, "eval", "--pred", str(labels), "--true",
                           str(tmp_path / "nope.csv"))
        assert code == 3
        assert "missing" in err


class TestPool:
    def test_token_sequences(self, tmp_path, capsys):
        tokens = tmp_path / "tokens.sdec"
        rng = Rng(5)
        seqs = [TokenSequence(rng.gaussian_matrix(n, 6) + 2.0) for n in (2, 4, 3)]
        sdio.save_embeddings(tokens, seqs)
        out = tmp_path / "vecs.sdec"
        code, stdout, _ = run(capsys, "pool", "--in", str(tokens), "--strategy", "mean",
                              "--normalize", "unit_norm", "--out", str(out))
        assert code == 0
        pooled = sdio.load_embeddings(out)
        assert pooled.shape == (3, 6)
        assert np.allclose(np.linalg.norm(pooled, axis=1), 1.0, atol=1e-6)
        assert json.loads(stdout)["strategy"] == "mean"

    def test_flat_input_normalize_only(self, tmp_path, capsys):
        flat = tmp_path / "flat.sdec"
        sdio.save_embeddings(flat, np.array([[3.0, 4.0], [6.0, 8.0]]))
        out = tmp_path / "n.sdec"
        code, _, err = run(capsys, "pool", "--in", str(flat), "--out", str(out))
        assert code == 0
        assert "pooling skipped" in err
        assert np.allclose(sdio.load_embeddings(out), [[0.6, 0.8], [0.6, 0.8]], atol=1e-6)


class TestClusterErrors:
    def test_k_zero_is_usage_error(self, blob_files, tmp_path, capsys):
        data, _ = blob_files
        cfg = write_config(tmp_path / "run.json")
        ckpt = tmp_path / "ae.ckpt"
        assert run(capsys, "pretrain", "--in", str(data), "--config", str(cfg),
                   "--out", str(ckpt))[0] == 0
        code, _, _ = run(capsys, "cluster", "--in", str(data), "--ae", str(ckpt),
                         "--k", "0", "--config", str(cfg), "--out", str(tmp_path / "l.csv"))
        assert code == 2

    def test_k_exceeding_n_is_infeasible(self, blob_files, tmp_path, capsys):
        data, _ = blob_files
        cfg = write_config(tmp_path / "run.json")
        ckpt = tmp_path / "ae.ckpt"
        run(capsys, "pretrain", "--in", str(data), "--config", str(cfg), "--out", str(ckpt))
        code, _, _ = run(capsys, "cluster", "--in", str(data), "--ae", str(ckpt),
                         "--k", "500", "--config", str(cfg), "--out", str(tmp_path / "l.csv"))
        assert code == 5

    def test_bad_config_key_exit_four(self, blob_files, tmp_path, capsys):
        data, _ = blob_files
        bad = tmp_path / "bad.json"
        bad.write_text('{"gammma": 0.1}')
        code, _, err = run(capsys, "pretrain", "--in", str(data), "--config", str(bad),
                           "--out", str(tmp_path / "x.ckpt"))
        assert code == 4
        assert "gammma" in err

    def test_unknown_flag_exit_two(self, capsys):
        code, _, _ = run(capsys, "synth", "--frobnicate")
        assert code == 2


class TestPipeline:
    def _config(self, tmp_path, outdir, seed=3):
        data = tmp_path / "blobs.sdec"
        gold = tmp_path / "gold.csv"
        return write_config(
            tmp_path / f"{outdir}.json",
            input=str(data),
            gold_labels=str(gold),
            output_dir=str(tmp_path / outdir),
            k=3,
            seed=seed,
        ), data, gold

    def test_pipeline_end_to_end(self, blob_files, tmp_path, capsys):
        cfg, _, _ = self._config(tmp_path, "out")
        code, out, _ = run(capsys, "pipeline", "--config", str(cfg))
        assert code == 0
        report = json.loads(out)
        assert report["acc"] >= 0.95
        outdir = tmp_path / "out"
        labels = sdio.load_labels(outdir / "labels.csv")
        assert labels.shape == (120,)
        assert (outdir / "history.csv").exists()
        assert (outdir / "metrics.json").exists()

    def test_pipeline_matches_chained_subcommands(self, blob_files, tmp_path, capsys):
        data, gold = blob_files
        cfg, _, _ = self._config(tmp_path, "pipe")
        assert run(capsys, "pipeline", "--config", str(cfg))[0] == 0

        # same stages, one subcommand at a time
        chain = tmp_path / "chain"
        chain.mkdir()
        assert run(capsys, "pool", "--in", str(data), "--normalize", "unit_norm",
                   "--out", str(chain / "vectors.sdec"))[0] == 0
        assert run(capsys, "pretrain", "--in", str(chain / "vectors.sdec"),
                   "--config", str(cfg), "--out", str(chain / "ae.ckpt"))[0] == 0
        assert run(capsys, "cluster", "--in", str(chain / "vectors.sdec"),
                   "--ae", str(chain / "ae.ckpt"), "--k", "3", "--config", str(cfg),
                   "--out", str(chain / "labels.csv"),
                   "--history", str(chain / "history.csv"))[0] == 0
        assert run(capsys, "refine", "--in", str(chain / "vectors.sdec"),
                   "--labels", str(chain / "labels.csv"), "--lambda", "0.2",
                   "--out", str(chain / "labels_refined.csv"))[0] == 0

        pipe = tmp_path / "pipe"
        assert (pipe / "vectors.sdec").read_bytes() == (chain / "vectors.sdec").read_bytes()
        assert (pipe / "labels.csv").read_bytes() == (chain / "labels.csv").read_bytes()
        assert (pipe / "labels_refined.csv").read_bytes() == (chain / "labels_refined.csv").read_bytes()

    def test_pipeline_latent_refine_space(self, blob_files, tmp_path, capsys):
        cfg, _, _ = self._config(tmp_path, "latent_out")
        doc = json.loads(cfg.read_text())
        doc["refine_space"] = "latent"
        cfg.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "pipeline", "--config", str(cfg))
        assert code == 0
        assert json.loads(out)["acc"] >= 0.95

    def test_pipeline_reproducible(self, blob_files, tmp_path, capsys):
        cfg_a, _, _ = self._config(tmp_path, "run_a")
        cfg_b, _, _ = self._config(tmp_path, "run_b")
        assert run(capsys, "pipeline", "--config", str(cfg_a))[0] == 0
        assert run(capsys, "pipeline", "--config", str(cfg_b))[0] == 0
        for name in ("vectors.sdec", "ae.ckpt", "labels.csv", "history.csv",
                     "labels_refined.csv", "metrics.json"):
            assert (tmp_path / "run_a" / name).read_bytes() == \
                (tmp_path / "run_b" / name).read_bytes()


class TestBench:
    @pytest.mark.filterwarnings("ignore::RuntimeWarning")  # tiny iteration cap
    def test_bench_emits_csv(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "bench.json", ae_epochs=1, max_iterations=20, k=3)
        code, out, _ = run(capsys, "bench", "--config", str(cfg), "--sizes", "40,80")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,train_seconds,assign_seconds"
        assert len(lines) == 3
        for line in lines[1:]:
            n, train_s, assign_s = line.split(",")
            assert int(n) in (40, 80)
            assert float(train_s) > 0 and float(assign_s) > 0

    def test_bad_sizes_usage_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "bench.json")
        code, _, _ = run(capsys, "bench", "--config", str(cfg), "--sizes", "ten,20")
        assert code == 2
