import numpy as np
import pytest

from rtm.cli import main
from rtm.metrics import parse_report
from rtm.pipeline import (
    STAGES,
    ConfigError,
    StageError,
    evaluate_files,
    parse_config,
    read_predictions,
    run_pipeline,
    run_stage,
)

from conftest import write_intensity_case, write_triples_case


class TestConfig:
    def _write(self, tmp_path, text):
        path = tmp_path / "c.cfg"
        path.write_text(text)
        return path

    def _minimal(self, tmp_path, **overrides):
        (tmp_path / "corpus.txt").write_text("a b c\n")
        (tmp_path / "train.tsv").write_text("q\ta\tb\tc\t1\n")
        (tmp_path / "test.tsv").write_text("r\ta\tb\tc\tNONE\n")
        fields = {
            "task": "triples",
            "architecture": "combined",
            "corpus": "corpus.txt",
            "train": "train.tsv",
            "test": "test.tsv",
            "budget": "1",
            "seed": "3",
        }
        fields.update(overrides)
        lines = [f"{k} = {v}" for k, v in fields.items() if v is not None]
        return self._write(tmp_path, "\n".join(lines) + "\n")

    def test_parses_minimal(self, tmp_path):
        cfg = parse_config(self._minimal(tmp_path))
        assert cfg.task == "triples" and cfg.seed == 3
        assert cfg.cv_folds == 7  # default applied

    def test_unknown_key_rejected(self, tmp_path):
        path = self._minimal(tmp_path, bogus="1")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(path)

    def test_seed_mandatory(self, tmp_path):
        path = self._minimal(tmp_path, seed=None)
        with pytest.raises(ConfigError, match="seed"):
            parse_config(path)
        assert parse_config(path, seed_override=9).seed == 9

    def test_seed_override_changes_hash(self, tmp_path):
        path = self._minimal(tmp_path)
        assert parse_config(path).hash() != parse_config(path, seed_override=4).hash()

    def test_triples_plain_rejected(self, tmp_path):
        path = self._minimal(tmp_path, architecture="plain")
        with pytest.raises(ConfigError, match="row pairs"):
            parse_config(path)

    def test_missing_path_rejected(self, tmp_path):
        path = self._minimal(tmp_path, corpus="nope.txt")
        with pytest.raises(ConfigError, match="does not exist"):
            parse_config(path)

    def test_paired_intensity_needs_two_emotions(self, tmp_path):
        (tmp_path / "lex.txt").write_text("#joy\nglad\n")
        path = self._minimal(
            tmp_path,
            task="intensity",
            architecture="separate",
            lexicon="lex.txt",
            emotions="joy",
        )
        (tmp_path / "train.tsv").write_text("id\ttext\taffect\tscore\nq\they\tjoy\t0.5\n")
        (tmp_path / "test.tsv").write_text("id\ttext\taffect\tscore\nr\tyo\tjoy\tNONE\n")
        with pytest.raises(ConfigError, match="exactly 2 emotions"):
            parse_config(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = self._write(tmp_path, "task = triples\ntask = triples\n")
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(path)


class TestPipelineRun:
    def test_intensity_run_produces_sane_outputs(self, tiny_intensity_cfg):
        cfg = parse_config(tiny_intensity_cfg)
        out = tiny_intensity_cfg.parent / "out"
        report = run_pipeline(cfg, out)
        assert report.metrics is not None and report.metrics.r > 0.3
        ids, preds, classes = read_predictions(out / "predictions.tsv")
        assert len(ids) == 15 and classes is None
        assert np.all((preds >= 0.0) & (preds <= 1.0))  # clipped for intensity
        for name in (
            "interpretants.tsv",
            "features_train.tsv",
            "features_test.tsv",
            "cv_table.tsv",
            "predictions.tsv",
            "report.txt",
        ):
            first = (out / name).read_text(encoding="utf-8").splitlines()[0]
            assert first.startswith("# rtm 0.1.0 config="), name
        assert (out / "timings.txt").exists()

    def test_rerun_and_stagewise_byte_identical(self, tiny_intensity_cfg):
        cfg = parse_config(tiny_intensity_cfg)
        root = tiny_intensity_cfg.parent
        run_pipeline(cfg, root / "one")
        run_pipeline(cfg, root / "two")
        for stage in STAGES:
            run_stage(cfg, root / "three", stage)
        for name in ("predictions.tsv", "report.txt"):
            data = (root / "one" / name).read_bytes()
            assert data == (root / "two" / name).read_bytes()
            assert data == (root / "three" / name).read_bytes()

    def test_feature_rows_match_dataset(self, tiny_intensity_cfg):
        cfg = parse_config(tiny_intensity_cfg)
        out = tiny_intensity_cfg.parent / "out_rows"
        for stage in STAGES[:3]:
            run_stage(cfg, out, stage)
        rows = (out / "features_train.tsv").read_text().splitlines()
        data_rows = [r for r in rows if r and not r.startswith(("#", "id\t"))]
        train_rows = (tiny_intensity_cfg.parent / "train.tsv").read_text().splitlines()
        assert len(data_rows) == len(train_rows) - 1  # header

    def test_missing_gold_marks_metrics_absent(self, tmp_path):
        write_intensity_case(tmp_path, n_texts=40, n_train=30, corpus_size=40, vocab_size=50, n_lex=10)
        test_lines = (tmp_path / "test.tsv").read_text().splitlines()
        rewritten = [test_lines[0]] + [
            "\t".join(line.split("\t")[:3] + ["NONE"]) for line in test_lines[1:]
        ]
        (tmp_path / "test.tsv").write_text("\n".join(rewritten) + "\n")
        cfg = parse_config(tmp_path / "run.cfg")
        report = run_pipeline(cfg, tmp_path / "out")
        assert report.metrics is None
        text = (tmp_path / "out" / "report.txt").read_text()
        assert "[metrics]\nabsent" in text
        assert (tmp_path / "out" / "predictions.tsv").exists()

    def test_fingerprint_mismatch_refused(self, tiny_intensity_cfg):
        cfg = parse_config(tiny_intensity_cfg)
        out = tiny_intensity_cfg.parent / "out_fp"
        for stage in STAGES[:3]:
            run_stage(cfg, out, stage)
        features = (out / "features_train.tsv").read_text()
        (out / "features_train.tsv").write_text(
            features.replace("# fingerprint=", "# fingerprint=dead")
        )
        with pytest.raises(StageError, match="fingerprint"):
            run_stage(cfg, out, "train")

    def test_stage_error_names_stage(self, tiny_intensity_cfg):
        cfg = parse_config(tiny_intensity_cfg)
        with pytest.raises(StageError, match="stage train"):
            run_stage(cfg, tiny_intensity_cfg.parent / "fresh", "train")

    def test_failed_stage_leaves_no_outputs(self, tiny_intensity_cfg):
        cfg = parse_config(tiny_intensity_cfg)
        out = tiny_intensity_cfg.parent / "cleanup"
        run_stage(cfg, out, "select-interpretants")
        run_stage(cfg, out, "build-resources")
        # corrupt the test dataset so feature extraction fails on split 2
        (tiny_intensity_cfg.parent / "test.tsv").write_text("garbage no header\n")
        with pytest.raises(StageError, match="extract-features"):
            run_stage(cfg, out, "extract-features")
        assert not (out / "features_train.tsv").exists()
        assert not (out / "features_test.tsv").exists()

    def test_triples_threshold_modes(self, tmp_path):
        for mode, name in (("optimized", "opt"), ("grounded", "grd")):
            cfg_path = write_triples_case(
                tmp_path / name if (tmp_path / name).mkdir() or True else None,
                "combined",
                n_instances=60,
                n_train=45,
                corpus_size=60,
                config_name="run.cfg",
            )
            text = cfg_path.read_text().replace("threshold = fixed:0.5", f"threshold = {mode}")
            cfg_path.write_text(text)
            cfg = parse_config(cfg_path)
            report = run_pipeline(cfg, cfg_path.parent / "out")
            assert report.metrics is not None and report.metrics.f1 is not None
            _, _, classes = read_predictions(cfg_path.parent / "out" / "predictions.tsv")
            assert set(np.unique(classes)) <= {0, 1}


class TestPairedIntensity:
    def _write_case(self, tmp_path):
        rng = np.random.default_rng(4)
        joy_words = [f"j{i}" for i in range(10)]
        sad_words = [f"s{i}" for i in range(10)]
        filler = [f"f{i}" for i in range(30)]
        vocab = joy_words + sad_words + filler
        corpus = [" ".join(rng.choice(vocab, size=rng.integers(4, 8))) for _ in range(50)]
        (tmp_path / "corpus.txt").write_text("\n".join(corpus) + "\n")
        (tmp_path / "lexicon.txt").write_text(
            "#joy\n" + "\n".join(joy_words) + "\n#sadness\n" + "\n".join(sad_words) + "\n"
        )
        lines = ["id\ttext\taffect\tscore"]
        for i in range(50):
            n_joy = int(rng.integers(0, 5))
            toks = list(rng.choice(joy_words, size=n_joy)) + list(
                rng.choice(filler, size=6 - n_joy)
            )
            gold = 0.1 + 0.18 * n_joy + float(rng.normal(0, 0.02))
            lines.append(f"v{i:03d}\t{' '.join(toks)}\tvalence\t{min(max(gold, 0.0), 1.0)!r}")
        (tmp_path / "train.tsv").write_text("\n".join(lines[:41]) + "\n")
        (tmp_path / "test.tsv").write_text("\n".join([lines[0]] + lines[41:]) + "\n")
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            """task = intensity
architecture = combined
corpus = corpus.txt
train = train.tsv
test = test.tsv
lexicon = lexicon.txt
emotions = joy,sadness
budget = 50
grids = small
top_k = 1
seed = 5
"""
        )
        return cfg

    def test_two_rows_per_instance_and_sane_predictions(self, tmp_path):
        cfg = parse_config(self._write_case(tmp_path))
        out = tmp_path / "out"
        report = run_pipeline(cfg, out)
        features = (out / "features_train.tsv").read_text().splitlines()
        tags = [line.split("\t")[1] for line in features if not line.startswith(("#", "id\t"))]
        assert tags == ["a", "b"] * 40
        ids, preds, classes = read_predictions(out / "predictions.tsv")
        assert len(ids) == 10 and classes is None
        assert np.all((preds >= 0.0) & (preds <= 1.0))
        assert report.metrics is not None


class TestEvaluateFiles:
    def test_perfect_predictions_give_r_one(self, tmp_path):
        gold = tmp_path / "gold.tsv"
        gold.write_text("a\t0.1\nb\t0.5\nc\t0.9\nd\t0.3\n")
        pred = tmp_path / "pred.tsv"
        pred.write_text("a\t0.100000\nb\t0.500000\nc\t0.900000\nd\t0.300000\n")
        report = evaluate_files(pred, gold)
        assert report.r == pytest.approx(1.0)
        assert report.mae == 0.0

    def test_dataset_format_gold(self, tmp_path):
        gold = tmp_path / "gold.tsv"
        gold.write_text("id\ttext\taffect\tscore\na\they\tjoy\t0.2\nb\tyo\tjoy\t0.8\nc\tm\tjoy\t0.5\n")
        pred = tmp_path / "pred.tsv"
        pred.write_text("a\t0.25\nb\t0.75\nc\t0.5\n")
        report = evaluate_files(pred, gold)
        assert report.r > 0.99

    def test_missing_ids_rejected(self, tmp_path):
        (tmp_path / "gold.tsv").write_text("a\t0.1\n")
        (tmp_path / "pred.tsv").write_text("a\t0.1\nzz\t0.5\n")
        with pytest.raises(ValueError, match="zz"):
            evaluate_files(tmp_path / "pred.tsv", tmp_path / "gold.tsv")


class TestCli:
    def test_run_command(self, tiny_intensity_cfg, capsys):
        out = tiny_intensity_cfg.parent / "cli_out"
        code = main(["run", "--config", str(tiny_intensity_cfg), "--out", str(out)])
        assert code == 0
        assert "r\t" in capsys.readouterr().out
        assert (out / "report.txt").exists()

    def test_stage_subcommands_match_run(self, tiny_intensity_cfg):
        root = tiny_intensity_cfg.parent
        assert main(["run", "--config", str(tiny_intensity_cfg), "--out", str(root / "a")]) == 0
        for stage in STAGES:
            code = main([stage, "--config", str(tiny_intensity_cfg), "--out", str(root / "b")])
            assert code == 0
        assert (root / "a" / "report.txt").read_bytes() == (root / "b" / "report.txt").read_bytes()

    def test_run_stage_flag(self, tiny_intensity_cfg):
        root = tiny_intensity_cfg.parent
        for stage in STAGES:
            code = main(
                ["run", "--config", str(tiny_intensity_cfg), "--out", str(root / "st"),
                 "--stage", stage]
            )
            assert code == 0
        assert (root / "st" / "report.txt").exists()

    def test_standalone_evaluate(self, tmp_path, capsys):
        (tmp_path / "gold.tsv").write_text("a\t0.1\nb\t0.6\nc\t0.8\n")
        (tmp_path / "pred.tsv").write_text("a\t0.2\nb\t0.5\nc\t0.9\n")
        code = main(["evaluate", "--pred", str(tmp_path / "pred.tsv"), "--gold", str(tmp_path / "gold.tsv")])
        assert code == 0
        parsed = parse_report(capsys.readouterr().out)
        assert "MAE" in parsed

    def test_bad_config_fails_cleanly(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nonsense = 1\n")
        assert main(["run", "--config", str(bad)]) == 1
        assert "rtm:" in capsys.readouterr().err

    def test_seed_override_changes_outputs(self, tiny_intensity_cfg):
        root = tiny_intensity_cfg.parent
        main(["run", "--config", str(tiny_intensity_cfg), "--out", str(root / "s7")])
        main(["run", "--config", str(tiny_intensity_cfg), "--seed", "123", "--out", str(root / "s123")])
        a = (root / "s7" / "report.txt").read_text()
        b = (root / "s123" / "report.txt").read_text()
        assert "seed = 123" in b and a != b
