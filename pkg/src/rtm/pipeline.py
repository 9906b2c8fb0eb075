"""End-to-end pipeline: config files, staged execution, reports.

A run walks the stages select-interpretants -> build-resources ->
extract-features -> train -> predict -> evaluate, each reading the files the
previous stage wrote into the output directory.  The one-shot ``run`` executes
exactly this sequence, so stage-wise and one-shot execution produce
byte-identical outputs, and a repeated run with the same config reproduces
them bit for bit (wall-clock timings go to a separate timings.txt, which is
the one file outside that guarantee).

Every text output starts with a comment line carrying the tool version and
the config hash.  Binary artifacts (resources.pkl, model.pkl) embed the same
fields plus a resource fingerprint (corpus hash + resource-relevant
parameters) that later stages verify before applying a model.
"""

from __future__ import annotations

import hashlib
import os
import pickle
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import (
    Lexicon,
    load_corpus,
    load_intensity_dataset,
    load_lexicon,
    load_triple_dataset,
    lexicon_to_target,
)
from .features import (
    FEATURE_NAMES,
    FeatureResources,
    build_feature_matrix,
    train_aligner,
)
from .interpretants import FdaConfig, WittenBellLM, build_ngram_weights, select_interpretants
from .learners import ModelSpec, average_top_k, default_grid, grid_search, small_grid
from .metrics import (
    MetricConfig,
    MetricReport,
    ScoreStats,
    ground_predictions,
    ground_threshold,
    metric_report,
    optimize_threshold,
)
from .stacking import (
    StackConfig,
    predict_stack_matrices,
    train_combined_stack_matrices,
    train_separate_stack_matrices,
)

STAGES = (
    "select-interpretants",
    "build-resources",
    "extract-features",
    "train",
    "predict",
    "evaluate",
)

_KNOWN_KEYS = {
    "task",
    "architecture",
    "corpus",
    "train",
    "test",
    "lexicon",
    "emotions",
    "budget",
    "fda_max_order",
    "decay",
    "length_exponent",
    "lm_order",
    "aligner_iterations",
    "grids",
    "top_k",
    "base_learner",
    "cv_folds",
    "seed",
    "epsilon_mode",
    "grounding",
    "threshold",
}

_DEFAULTS = {
    "fda_max_order": "2",
    "decay": "0.5",
    "length_exponent": "0.5",
    "lm_order": "3",
    "aligner_iterations": "5",
    "grids": "default",
    "top_k": "3",
    "base_learner": "rr:1.0",
    "cv_folds": "7",
    "epsilon_mode": "half_mae",
    "grounding": "none",
    "threshold": "none",
}


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    """A stage failed; carries the stage name in the message."""


@dataclass
class RunConfig:
    """Validated run configuration plus the raw key/value echo."""

    task: str
    architecture: str
    corpus: Path
    train: Path
    test: Path
    lexicon: Path | None
    emotions: tuple[str, ...]
    budget: int
    fda_max_order: int
    decay: float
    length_exponent: float
    lm_order: int
    aligner_iterations: int
    grids: str
    top_k: int
    base_learner: str
    cv_folds: int
    seed: int
    epsilon_mode: str
    grounding: str
    threshold: str
    raw: dict[str, str]

    def hash(self) -> str:
        text = "\n".join(f"{k} = {self.raw[k]}" for k in sorted(self.raw))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]

    def metric_config(self) -> MetricConfig:
        if self.epsilon_mode.startswith("half_step:"):
            return MetricConfig("half_step", float(self.epsilon_mode.split(":", 1)[1]))
        return MetricConfig("half_mae")

    def base_spec(self) -> ModelSpec:
        kind, _, arg = self.base_learner.partition(":")
        if kind == "rr":
            return ModelSpec("rr", alpha=float(arg or 1.0), seed=self.seed)
        if kind == "knn":
            return ModelSpec("knn", k=int(arg or 5), seed=self.seed)
        if kind == "const":
            return ModelSpec("const", seed=self.seed)
        raise ConfigError(f"unknown base_learner {self.base_learner!r}")

    def grid(self) -> list[ModelSpec]:
        if self.grids == "default":
            return default_grid(seed=self.seed)
        if self.grids == "small":
            return small_grid(seed=self.seed)
        raise ConfigError(f"unknown grids preset {self.grids!r}")


def parse_config(path, seed_override: int | None = None) -> RunConfig:
    """Parse a flat ``key = value`` config file; unknown keys are rejected."""
    path = Path(path)
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    for key, value in _DEFAULTS.items():
        raw.setdefault(key, value)
    if seed_override is not None:
        raw["seed"] = str(seed_override)
    if "seed" not in raw:
        raise ConfigError(f"{path}: seed is mandatory")

    def need(key):
        if key not in raw:
            raise ConfigError(f"{path}: missing required key {key!r}")
        return raw[key]

    task = need("task")
    if task not in ("intensity", "triples"):
        raise ConfigError(f"task must be intensity|triples, got {task!r}")
    architecture = need("architecture")
    if architecture not in ("plain", "combined", "separate"):
        raise ConfigError(f"bad architecture {architecture!r}")
    if task == "triples" and architecture == "plain":
        raise ConfigError("triples instances are row pairs: use combined or separate")

    base = path.parent

    def resolve(key):
        p = base / raw[key]
        if not p.exists():
            raise ConfigError(f"{key} path does not exist: {p}")
        return p

    corpus = resolve("corpus") if "corpus" in raw else _missing(path, "corpus")
    train = resolve("train") if "train" in raw else _missing(path, "train")
    test = resolve("test") if "test" in raw else _missing(path, "test")

    emotions: tuple[str, ...] = ()
    lexicon = None
    if task == "intensity":
        if "lexicon" not in raw:
            raise ConfigError("intensity task needs a lexicon")
        lexicon = resolve("lexicon")
        emotions = tuple(e.strip() for e in need("emotions").split(",") if e.strip())
        if not emotions:
            raise ConfigError("emotions must list at least one label")
        if architecture in ("combined", "separate") and len(emotions) != 2:
            raise ConfigError("paired intensity needs exactly 2 emotions (row a, row b)")
    else:
        for key in ("lexicon", "emotions"):
            if key in raw:
                raise ConfigError(f"{key} is not used by the triples task")

    cfg = RunConfig(
        task=task,
        architecture=architecture,
        corpus=corpus,
        train=train,
        test=test,
        lexicon=lexicon,
        emotions=emotions,
        budget=int(need("budget")),
        fda_max_order=int(raw["fda_max_order"]),
        decay=float(raw["decay"]),
        length_exponent=float(raw["length_exponent"]),
        lm_order=int(raw["lm_order"]),
        aligner_iterations=int(raw["aligner_iterations"]),
        grids=raw["grids"],
        top_k=int(raw["top_k"]),
        base_learner=raw["base_learner"],
        cv_folds=int(raw["cv_folds"]),
        seed=int(raw["seed"]),
        epsilon_mode=raw["epsilon_mode"],
        grounding=raw["grounding"],
        threshold=raw["threshold"],
        raw=raw,
    )
    if cfg.grounding not in ("none", "predictions"):
        raise ConfigError(f"grounding must be none|predictions, got {cfg.grounding!r}")
    if cfg.threshold != "none" and cfg.threshold not in ("optimized", "grounded"):
        if not cfg.threshold.startswith("fixed:"):
            raise ConfigError(f"bad threshold mode {cfg.threshold!r}")
        float(cfg.threshold.split(":", 1)[1])
    cfg.metric_config()
    cfg.base_spec()
    return cfg


def _missing(path, key):
    raise ConfigError(f"{path}: missing required key {key!r}")


# ---------------------------------------------------------------------------
# File helpers.


def _banner(cfg: RunConfig) -> str:
    return f"# rtm {__version__} config={cfg.hash()}\n"


def _write_text(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_pickle(path: Path, obj):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        pickle.dump(obj, fh, protocol=4)
    os.replace(tmp, path)


def _read_pickle(path: Path) -> dict:
    with open(path, "rb") as fh:
        obj = pickle.load(fh)
    if obj.get("version") != __version__:
        raise StageError(f"{path}: written by version {obj.get('version')}")
    return obj


def resource_fingerprint(cfg: RunConfig) -> str:
    h = hashlib.sha256()
    h.update(Path(cfg.corpus).read_bytes())
    params = (
        f"budget={cfg.budget};fda_max_order={cfg.fda_max_order};decay={cfg.decay};"
        f"length_exponent={cfg.length_exponent};lm_order={cfg.lm_order};"
        f"aligner_iterations={cfg.aligner_iterations}"
    )
    h.update(params.encode("utf-8"))
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# Dataset -> (src, tgt) rows.


@dataclass
class RowSet:
    """Feature-extraction rows for one dataset: ids, row tags and token pairs."""

    ids: list[str]
    tags: list[str]  # "-" for plain rows, "a"/"b" for paired rows
    pairs: list[tuple]
    golds: list[float | None]  # one per instance (not per row)
    paired: bool


def _intensity_targets(cfg: RunConfig, lexicon: Lexicon):
    if cfg.architecture == "plain":
        return [lexicon_to_target(lexicon, set(cfg.emotions))]
    return [
        lexicon_to_target(lexicon, {cfg.emotions[0]}),
        lexicon_to_target(lexicon, {cfg.emotions[1]}),
    ]


def build_rows(cfg: RunConfig, dataset_path: Path, lexicon: Lexicon | None) -> RowSet:
    if cfg.task == "intensity":
        instances = load_intensity_dataset(dataset_path)
        targets = _intensity_targets(cfg, lexicon)
        ids, tags, pairs, golds = [], [], [], []
        for inst in instances:
            golds.append(inst.gold)
            if cfg.architecture == "plain":
                ids.append(inst.id)
                tags.append("-")
                pairs.append((inst.source, targets[0]))
            else:
                for tag, tgt in zip("ab", targets):
                    ids.append(inst.id)
                    tags.append(tag)
                    pairs.append((inst.source, tgt))
        return RowSet(ids, tags, pairs, golds, cfg.architecture != "plain")
    instances = load_triple_dataset(dataset_path)
    ids, tags, pairs, golds = [], [], [], []
    for inst in instances:
        golds.append(None if inst.gold is None else float(inst.gold))
        for tag, src in (("a", inst.w1), ("b", inst.w2)):
            ids.append(inst.id)
            tags.append(tag)
            pairs.append((src, inst.attribute))
    return RowSet(ids, tags, pairs, golds, True)


def _task_texts(cfg: RunConfig, lexicon: Lexicon | None) -> list:
    texts = []
    for path in (cfg.train, cfg.test):
        if cfg.task == "intensity":
            texts.extend(inst.source for inst in load_intensity_dataset(path))
        else:
            for inst in load_triple_dataset(path):
                texts.extend((inst.w1, inst.w2, inst.attribute))
    if cfg.task == "intensity":
        texts.extend(_intensity_targets(cfg, lexicon))
    return texts


# ---------------------------------------------------------------------------
# Stages.


def _out_path(out_dir: Path, name: str) -> Path:
    return Path(out_dir) / name


def stage_select_interpretants(cfg: RunConfig, out_dir: Path):
    corpus = load_corpus(cfg.corpus)
    lexicon = load_lexicon(cfg.lexicon) if cfg.lexicon else None
    fda = FdaConfig(
        max_order=cfg.fda_max_order,
        decay=cfg.decay,
        budget=cfg.budget,
        length_exponent=cfg.length_exponent,
    )
    selection = select_interpretants(corpus, _task_texts(cfg, lexicon), fda)
    lines = [_banner(cfg), "index\tscore\n"]
    lines.extend(
        f"{idx}\t{score:.6f}\n"
        for idx, score in zip(selection.selected_indices, selection.selection_scores)
    )
    _write_text(_out_path(out_dir, "interpretants.tsv"), "".join(lines))


def _read_interpretant_indices(out_dir: Path) -> list[int]:
    lines = _out_path(out_dir, "interpretants.tsv").read_text(encoding="utf-8").splitlines()
    return [int(line.split("\t")[0]) for line in lines if line and not line.startswith(("#", "index"))]


def stage_build_resources(cfg: RunConfig, out_dir: Path):
    corpus = load_corpus(cfg.corpus)
    indices = _read_interpretant_indices(out_dir)
    sentences = [corpus.sentences[i] for i in indices]
    resources = FeatureResources(
        weight_table=build_ngram_weights(sentences, max_order=3),
        lm=WittenBellLM(sentences, order=cfg.lm_order),
        aligner=train_aligner([(s, s) for s in sentences], cfg.aligner_iterations),
    )
    _write_pickle(
        _out_path(out_dir, "resources.pkl"),
        {
            "version": __version__,
            "config_hash": cfg.hash(),
            "fingerprint": resource_fingerprint(cfg),
            "resources": resources,
            "manifest": FEATURE_NAMES,
        },
    )


def _load_resources(out_dir: Path) -> tuple[FeatureResources, str]:
    blob = _read_pickle(_out_path(out_dir, "resources.pkl"))
    return blob["resources"], blob["fingerprint"]


def _write_features(path: Path, cfg: RunConfig, fingerprint: str, rows: RowSet, matrix):
    lines = [_banner(cfg), f"# fingerprint={fingerprint}\n"]
    lines.append("id\trow\t" + "\t".join(FEATURE_NAMES) + "\n")
    for rid, tag, vec in zip(rows.ids, rows.tags, matrix):
        lines.append(rid + "\t" + tag + "\t" + "\t".join(f"{v:.17g}" for v in vec) + "\n")
    _write_text(path, "".join(lines))


def _read_features(path: Path) -> tuple[list[str], list[str], np.ndarray, str]:
    ids, tags, values = [], [], []
    fingerprint = ""
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("# fingerprint="):
            fingerprint = line.split("=", 1)[1]
            continue
        if not line or line.startswith("#") or line.startswith("id\t"):
            continue
        fields = line.split("\t")
        ids.append(fields[0])
        tags.append(fields[1])
        values.append([float(v) for v in fields[2:]])
    matrix = np.asarray(values, dtype=float).reshape(len(ids), len(FEATURE_NAMES))
    return ids, tags, matrix, fingerprint


def stage_extract_features(cfg: RunConfig, out_dir: Path):
    resources, fingerprint = _load_resources(out_dir)
    lexicon = load_lexicon(cfg.lexicon) if cfg.lexicon else None
    for split, path in (("train", cfg.train), ("test", cfg.test)):
        rows = build_rows(cfg, path, lexicon)
        matrix = build_feature_matrix(rows.pairs, resources)
        _write_features(
            _out_path(out_dir, f"features_{split}.tsv"), cfg, fingerprint, rows, matrix
        )


def _split_sides(tags: list[str], matrix: np.ndarray):
    a_rows = [i for i, t in enumerate(tags) if t == "a"]
    b_rows = [i for i, t in enumerate(tags) if t == "b"]
    if len(a_rows) != len(b_rows):
        raise StageError(f"unpaired rows: {len(a_rows)} a-rows vs {len(b_rows)} b-rows")
    return matrix[a_rows], matrix[b_rows]


def _train_golds(cfg: RunConfig) -> np.ndarray:
    lexicon = load_lexicon(cfg.lexicon) if cfg.lexicon else None
    golds = build_rows(cfg, cfg.train, lexicon).golds
    if any(g is None for g in golds):
        raise StageError("training instances must all carry gold values")
    return np.asarray(golds, dtype=float)


def stage_train(cfg: RunConfig, out_dir: Path):
    resources_fp = _load_resources(out_dir)[1]
    ids, tags, matrix, feat_fp = _read_features(_out_path(out_dir, "features_train.tsv"))
    if feat_fp != resources_fp:
        raise StageError(
            f"feature fingerprint {feat_fp} does not match resources {resources_fp}"
        )
    gold = _train_golds(cfg)
    blob = {
        "version": __version__,
        "config_hash": cfg.hash(),
        "fingerprint": resources_fp,
        "architecture": cfg.architecture,
    }
    if cfg.architecture == "plain":
        ranked = grid_search(cfg.grid(), matrix, gold, cfg.cv_folds, cfg.seed)
        model = average_top_k(ranked, min(cfg.top_k, len(ranked)), matrix, gold)
        blob["model"] = model
        cv_table = [(spec.label(), score) for spec, score in ranked]
    else:
        feats_a, feats_b = _split_sides(tags, matrix)
        stack_cfg = StackConfig(
            base_spec=cfg.base_spec(),
            final_specs=tuple(cfg.grid()),
            top_k=cfg.top_k,
            folds=cfg.cv_folds,
            seed=cfg.seed,
        )
        train_fn = (
            train_combined_stack_matrices
            if cfg.architecture == "combined"
            else train_separate_stack_matrices
        )
        model = train_fn(feats_a, feats_b, gold, stack_cfg)
        blob["model"] = model
        cv_table = [(spec.label(), score) for spec, score in model.cv_table]
    blob["cv_table"] = cv_table
    _write_pickle(_out_path(out_dir, "model.pkl"), blob)
    lines = [_banner(cfg), "rank\tmodel\tcv_mae\n"]
    lines.extend(
        f"{rank}\t{label}\t{score:.6f}\n"
        for rank, (label, score) in enumerate(cv_table, start=1)
    )
    _write_text(_out_path(out_dir, "cv_table.tsv"), "".join(lines))


def _apply_model(blob: dict, tags: list[str], matrix: np.ndarray) -> np.ndarray:
    if blob["architecture"] == "plain":
        return blob["model"].predict(matrix)
    feats_a, feats_b = _split_sides(tags, matrix)
    return predict_stack_matrices(blob["model"], feats_a, feats_b)


def _instance_ids(ids: list[str], tags: list[str]) -> list[str]:
    if not tags or tags[0] == "-":
        return ids
    return [rid for rid, tag in zip(ids, tags) if tag == "a"]


def stage_predict(cfg: RunConfig, out_dir: Path):
    blob = _read_pickle(_out_path(out_dir, "model.pkl"))
    ids, tags, matrix, feat_fp = _read_features(_out_path(out_dir, "features_test.tsv"))
    if feat_fp != blob["fingerprint"]:
        raise StageError(
            f"feature fingerprint {feat_fp} does not match model {blob['fingerprint']}"
        )
    preds = _apply_model(blob, tags, matrix)

    if cfg.grounding == "predictions":
        train_gold = _train_golds(cfg)
        preds = ground_predictions(preds, ScoreStats.of(train_gold))
    if cfg.task == "intensity":
        preds = np.clip(preds, 0.0, 1.0)

    classes = None
    if cfg.task == "triples" and cfg.threshold != "none":
        if cfg.threshold.startswith("fixed:"):
            t = float(cfg.threshold.split(":", 1)[1])
        else:
            tr_ids, tr_tags, tr_matrix, _ = _read_features(
                _out_path(out_dir, "features_train.tsv")
            )
            train_preds = _apply_model(blob, tr_tags, tr_matrix)
            t = optimize_threshold(train_preds, _train_golds(cfg).astype(int))
            if cfg.threshold == "grounded":
                t = ground_threshold(t, ScoreStats.of(train_preds), ScoreStats.of(preds))
        classes = (preds >= t).astype(int)

    inst_ids = _instance_ids(ids, tags)
    lines = [_banner(cfg)]
    for i, rid in enumerate(inst_ids):
        row = f"{rid}\t{preds[i]:.6f}"
        if classes is not None:
            row += f"\t{classes[i]}"
        lines.append(row + "\n")
    _write_text(_out_path(out_dir, "predictions.tsv"), "".join(lines))


def read_predictions(path) -> tuple[list[str], np.ndarray, np.ndarray | None]:
    """Read a predictions TSV -> (ids, values, classes or None)."""
    ids, values, classes = [], [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        ids.append(fields[0])
        values.append(float(fields[1]))
        if len(fields) > 2:
            classes.append(int(fields[2]))
    if classes and len(classes) != len(ids):
        raise ValueError(f"{path}: class column present only on some rows")
    return ids, np.asarray(values), np.asarray(classes, dtype=int) if classes else None


def _test_gold_map(cfg: RunConfig) -> dict[str, float]:
    lexicon = load_lexicon(cfg.lexicon) if cfg.lexicon else None
    rows = build_rows(cfg, cfg.test, lexicon)
    inst_ids = _instance_ids(rows.ids, rows.tags)
    return {rid: g for rid, g in zip(inst_ids, rows.golds) if g is not None}


def _report_text(cfg: RunConfig, fingerprint: str, cv_table, report: MetricReport | None) -> str:
    lines = [_banner(cfg), "[config]\n"]
    lines.extend(f"{k} = {cfg.raw[k]}\n" for k in sorted(cfg.raw))
    lines.append("[resources]\n")
    lines.append(f"fingerprint = {fingerprint}\n")
    lines.append("[cv]\n")
    lines.extend(
        f"{rank}\t{label}\t{score:.6f}\n"
        for rank, (label, score) in enumerate(cv_table, start=1)
    )
    lines.append("[metrics]\n")
    lines.append(report.format() + "\n" if report is not None else "absent\n")
    return "".join(lines)


def stage_evaluate(cfg: RunConfig, out_dir: Path) -> MetricReport | None:
    blob = _read_pickle(_out_path(out_dir, "model.pkl"))
    ids, preds, classes = read_predictions(_out_path(out_dir, "predictions.tsv"))
    gold_map = _test_gold_map(cfg)
    report = None
    if gold_map and len(gold_map) == len(ids):
        gold = np.asarray([gold_map[rid] for rid in ids])
        kwargs = {}
        if classes is not None:
            kwargs = {"pred_classes": classes, "gold_classes": gold.astype(int)}
        report = metric_report(preds, gold, cfg.metric_config(), **kwargs)
    _write_text(
        _out_path(out_dir, "report.txt"),
        _report_text(cfg, blob["fingerprint"], blob["cv_table"], report),
    )
    return report


_STAGE_FUNCS = {
    "select-interpretants": stage_select_interpretants,
    "build-resources": stage_build_resources,
    "extract-features": stage_extract_features,
    "train": stage_train,
    "predict": stage_predict,
    "evaluate": stage_evaluate,
}

_STAGE_OUTPUTS = {
    "select-interpretants": ("interpretants.tsv",),
    "build-resources": ("resources.pkl",),
    "extract-features": ("features_train.tsv", "features_test.tsv"),
    "train": ("model.pkl", "cv_table.tsv"),
    "predict": ("predictions.tsv",),
    "evaluate": ("report.txt",),
}


@dataclass
class RunReport:
    """What a run produced: echo, fingerprint, CV ranking, metrics, timings."""

    config_hash: str
    out_dir: Path
    metrics: MetricReport | None
    timings: dict[str, float]


def run_stage(cfg: RunConfig, out_dir, stage: str):
    """Run one named stage; failures raise StageError with the stage name and
    leave none of the stage's output files behind."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if stage not in _STAGE_FUNCS:
        raise ConfigError(f"unknown stage {stage!r}; stages: {', '.join(STAGES)}")
    try:
        return _STAGE_FUNCS[stage](cfg, out_dir)
    except Exception as exc:
        for name in _STAGE_OUTPUTS[stage]:
            (out_dir / name).unlink(missing_ok=True)
        if isinstance(exc, StageError):
            raise
        raise StageError(f"stage {stage}: {exc}") from exc


def run_pipeline(cfg: RunConfig, out_dir) -> RunReport:
    """Execute all stages in order; see module docstring for determinism."""
    out_dir = Path(out_dir)
    timings: dict[str, float] = {}
    metrics = None
    for stage in STAGES:
        start = time.monotonic()
        result = run_stage(cfg, out_dir, stage)
        timings[stage] = time.monotonic() - start
        if stage == "evaluate":
            metrics = result
    _write_text(
        out_dir / "timings.txt",
        "".join(f"{stage}\t{secs:.3f}\n" for stage, secs in timings.items()),
    )
    return RunReport(cfg.hash(), out_dir, metrics, timings)


# ---------------------------------------------------------------------------
# Stand-alone evaluation of arbitrary prediction/gold files.


def _read_gold_file(path) -> dict[str, float]:
    """Gold readers: 2-column ``id\\tvalue``, intensity dataset, or triples."""
    first = ""
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            first = line
            break
    ncols = len(first.split("\t"))
    if first.startswith("id\ttext\taffect"):
        return {i.id: i.gold for i in load_intensity_dataset(path) if i.gold is not None}
    if ncols == 5:
        return {i.id: float(i.gold) for i in load_triple_dataset(path) if i.gold is not None}
    if ncols == 2:
        out = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            rid, value = line.split("\t")
            out[rid] = float(value)
        return out
    raise ValueError(f"{path}: unrecognized gold format ({ncols} columns)")


def evaluate_files(pred_path, gold_path, cfg: MetricConfig = MetricConfig()) -> MetricReport:
    """MetricReport for any predictions TSV against any gold file."""
    ids, preds, classes = read_predictions(pred_path)
    gold_map = _read_gold_file(gold_path)
    missing = [rid for rid in ids if rid not in gold_map]
    if missing:
        raise ValueError(f"gold file lacks ids: {missing[:5]}{'...' if len(missing) > 5 else ''}")
    gold = np.asarray([gold_map[rid] for rid in ids])
    kwargs = {}
    if classes is not None and set(np.unique(gold)) <= {0.0, 1.0}:
        kwargs = {"pred_classes": classes, "gold_classes": gold.astype(int)}
    return metric_report(preds, gold, cfg, **kwargs)
