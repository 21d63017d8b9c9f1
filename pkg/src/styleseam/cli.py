"""Command-line pipeline: stats, train, predict, evaluate, ensemble, solutions.

Conventions: logs go to stderr, data to stdout or files; exit code 0 means
success, 1 internal failure, 2 user/format error. All randomness funnels
through --seed so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import corpus, evaluation, features, model as model_mod, tokenization
from .corpus import Difficulty
from .errors import StyleSeamError, UsageError
from .model import EnsembleMode, TrainConfig
from .tokenization import TruncationConfig, TruncationStrategy

logger = logging.getLogger("styleseam")

DATASET_ENV_VAR = "STYLE_SEAM_DATASET"

MODEL_FILENAME = "model.json"
VOCABULARY_FILENAME = "vocabulary.json"
PREDICTIONS_FILENAME = "predictions.ndjson"
REPORT_FILENAME = "report.json"


@dataclass(frozen=True)
class RunConfig:
    """One command invocation's resolved settings."""

    dataset_root: Path | None
    difficulty: str
    split: str
    truncation: TruncationConfig
    train: TrainConfig
    stopword_file: Path | None
    out_dir: Path | None


# Built-in defaults; explicit CLI flags win, then config-file keys, then these.
CONFIG_DEFAULTS: dict[str, object] = {
    "dataset_root": None,
    "difficulty": "all",
    "split": "train",
    "strategy": TruncationStrategy.TRANSITION.value,
    "budget": 512,
    "seed": 5000,
    "peak_lr": 0.1,
    "epochs": 5,
    "batch_size": 4,
    "warmup_ratio": 0.1,
    "stopwords": None,
}


def _difficulties(cfg: RunConfig) -> list[Difficulty]:
    if cfg.difficulty == "all":
        return [Difficulty.EASY, Difficulty.MEDIUM, Difficulty.HARD]
    return [Difficulty(cfg.difficulty)]


def _single_difficulty(cfg: RunConfig) -> Difficulty:
    if cfg.difficulty == "all":
        raise UsageError("this command needs a single difficulty, not 'all'")
    return Difficulty(cfg.difficulty)


def _dataset_root(cfg: RunConfig) -> Path:
    if cfg.dataset_root is None:
        raise UsageError(
            f"no dataset root given; pass --dataset-root or set {DATASET_ENV_VAR}"
        )
    if not cfg.dataset_root.is_dir():
        raise FileNotFoundError(f"dataset root not found: {cfg.dataset_root}")
    return cfg.dataset_root


def _out_dir(cfg: RunConfig) -> Path:
    if cfg.out_dir is None:
        raise UsageError("this command needs --out")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg.out_dir


def _truncated_pair(pair: corpus.ParagraphPair, cfg: TruncationConfig) -> corpus.ParagraphPair:
    """Apply the configured token-budget truncation to one pair's texts.

    Pairs already within budget pass through with their original text, so
    character-level features are unaffected unless truncation actually bites.
    """
    left = tokenization.tokenize(pair.left)
    right = tokenization.tokenize(pair.right)
    if len(left) + len(right) <= cfg.budget:
        return pair
    left, right = tokenization.truncate(left, right, cfg)
    return replace(pair, left=" ".join(left), right=" ".join(right))


def _load_labeled_split(root: Path, difficulty: Difficulty, split: str):
    directory = corpus.split_directory(root, difficulty, split)
    docs = corpus.load_documents(directory, difficulty)
    if not docs:
        raise UsageError(f"no documents found in {directory}")
    truths = corpus.load_truth(directory)
    return docs, truths


def cmd_stats(cfg: RunConfig) -> int:
    """Per-split document/pair/label counts as JSON (stdout) and a table (stderr)."""
    root = _dataset_root(cfg)
    payload: dict[str, dict[str, dict[str, int | None]]] = {}
    for difficulty in _difficulties(cfg):
        directory = corpus.split_directory(root, difficulty, cfg.split)
        docs = corpus.load_documents(directory, difficulty)
        if not docs:
            raise UsageError(f"no documents found in {directory}")
        truths = corpus.load_truth(directory)
        if truths:
            pairs = corpus.build_pairs(docs, truths)
            stats = corpus.compute_stats(pairs, document_count=len(docs))
            zeros: int | None = stats.zeros_count
            ones: int | None = stats.ones_count
            pair_count = stats.pair_count
        else:
            zeros = ones = None
            pair_count = sum(len(d.paragraphs) - 1 for d in docs)
        payload.setdefault(difficulty.value, {})[cfg.split] = {
            "documents": len(docs),
            "pairs": pair_count,
            "zeros": zeros,
            "ones": ones,
        }
        if zeros is None:
            print(f"{difficulty}/{cfg.split}: docs {len(docs)}, pairs {pair_count}, unlabeled", file=sys.stderr)
        else:
            print(
                f"{difficulty}/{cfg.split}: docs {len(docs)}, pairs {pair_count}, "
                f"zeros {zeros}, ones {ones}",
                file=sys.stderr,
            )
    print(json.dumps(payload, indent=2))
    return 0


def cmd_train(cfg: RunConfig) -> int:
    """Fit vocabulary and linear model on a labeled split; write both artifacts."""
    if cfg.split == "test":
        raise UsageError("cannot train on the unlabeled test split")
    root = _dataset_root(cfg)
    difficulty = _single_difficulty(cfg)
    out = _out_dir(cfg)

    docs, truths = _load_labeled_split(root, difficulty, cfg.split)
    pairs = corpus.build_pairs(docs, truths)
    if not pairs:
        raise UsageError("selected split yields no paragraph pairs")
    stopwords = features.load_stopwords(cfg.stopword_file)
    vocab = features.fit_vocabulary(
        [paragraph for doc in docs for paragraph in doc.paragraphs], stopwords
    )
    logger.info("fitted vocabulary: %d terms over %d paragraphs", vocab.size, vocab.document_count)

    truncated = [_truncated_pair(p, cfg.truncation) for p in pairs]
    vectors = [features.pair_features(p, vocab) for p in truncated]
    labels = [p.label for p in pairs]
    trained = model_mod.train_linear_svm(vectors, labels, cfg.train)

    objective = model_mod.hinge_objective(trained, vectors, labels)
    correct = sum(
        1
        for vec, label in zip(vectors, labels)
        if model_mod.predict(trained, vec).label == label
    )
    logger.info(
        "final training objective %.6f, training accuracy %.4f (%d/%d)",
        objective,
        correct / len(labels),
        correct,
        len(labels),
    )

    model_mod.save_model(trained, out / MODEL_FILENAME)
    features.save_vocabulary(vocab, out / VOCABULARY_FILENAME)
    logger.info("wrote %s and %s", out / MODEL_FILENAME, out / VOCABULARY_FILENAME)
    return 0


def cmd_predict(cfg: RunConfig, model_file: Path, vocab_file: Path | None) -> int:
    """Run a trained model over a split; write predictions and solution files."""
    root = _dataset_root(cfg)
    difficulty = _single_difficulty(cfg)
    out = _out_dir(cfg)
    if vocab_file is None:
        vocab_file = model_file.parent / VOCABULARY_FILENAME

    trained = model_mod.load_model(model_file)
    vocab = features.load_vocabulary(vocab_file)
    expected = 2 * (vocab.size + features.HANDCRAFTED_WIDTH)
    if trained.dimension != expected:
        raise UsageError(
            f"model dimension {trained.dimension} does not match vocabulary-derived {expected}"
        )

    directory = corpus.split_directory(root, difficulty, cfg.split)
    docs = corpus.load_documents(directory, difficulty)
    if not docs:
        raise UsageError(f"no documents found in {directory}")
    pairs = corpus.build_pairs(docs, None)

    records = []
    for pair in pairs:
        vec = features.pair_features(_truncated_pair(pair, cfg.truncation), vocab)
        records.append(
            model_mod.predict(trained, vec, doc_id=pair.doc_id, pair_index=pair.pair_index)
        )
    model_mod.save_predictions(records, out / PREDICTIONS_FILENAME)
    written = evaluation.write_solutions(records, out)
    logger.info("wrote %d records and %d solution files to %s", len(records), written, out)
    return 0


def cmd_random_baseline(cfg: RunConfig) -> int:
    """Seeded coin-flip predictions for a split, in the same output layout."""
    root = _dataset_root(cfg)
    difficulty = _single_difficulty(cfg)
    out = _out_dir(cfg)
    directory = corpus.split_directory(root, difficulty, cfg.split)
    docs = corpus.load_documents(directory, difficulty)
    if not docs:
        raise UsageError(f"no documents found in {directory}")
    pairs = corpus.build_pairs(docs, None)
    records = model_mod.random_baseline(pairs, cfg.train.seed)
    model_mod.save_predictions(records, out / PREDICTIONS_FILENAME)
    written = evaluation.write_solutions(records, out)
    logger.info("wrote %d records and %d solution files to %s", len(records), written, out)
    return 0


def cmd_evaluate(pred_dir: Path, truth_dir: Path, label: str, out_dir: Path | None, per_document: bool) -> int:
    """Score solution files against truth files; JSON to stdout, table to stderr."""
    gold = {t.doc_id: list(t.changes) for t in corpus.load_truth(truth_dir)}
    if not gold:
        raise UsageError(f"no truth files found in {truth_dir}")
    predicted = evaluation.read_solutions(pred_dir)
    entry = evaluation.macro_f1(gold, predicted, per_document=per_document)
    report = {label: entry}
    print(evaluation.format_report_table(report), file=sys.stderr)
    text = evaluation.report_to_json(report)
    print(text)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / REPORT_FILENAME).write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_ensemble(files: list[Path], mode: EnsembleMode, out_dir: Path) -> int:
    """Combine prediction files; write the merged exchange-format file."""
    member_lists = [model_mod.load_external_predictions(path) for path in files]
    combined = model_mod.ensemble(member_lists, mode)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_mod.save_predictions(combined, out_dir / PREDICTIONS_FILENAME)
    logger.info("wrote %d combined records to %s", len(combined), out_dir / PREDICTIONS_FILENAME)
    return 0


def cmd_solutions(predictions_file: Path, out_dir: Path) -> int:
    """Turn an exchange-format predictions file into per-document solution files."""
    records = model_mod.load_external_predictions(predictions_file)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = evaluation.write_solutions(records, out_dir)
    logger.info("wrote %d solution files to %s", written, out_dir)
    return 0


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--dataset-root",
        type=Path,
        default=None,
        help=f"dataset root directory (default: ${DATASET_ENV_VAR})",
    )
    parser.add_argument("--difficulty", choices=["easy", "medium", "hard", "all"], default=None)
    parser.add_argument("--split", choices=list(corpus.SPLITS), default=None)


def _add_truncation_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--strategy", choices=[s.value for s in TruncationStrategy], default=None
    )
    parser.add_argument("--budget", type=int, default=None, help="total token budget per pair")


def _add_train_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--peak-lr", type=float, default=None)
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--warmup-ratio", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="styleseam",
        description="Paragraph-level writing style change detection toolkit",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for all randomness (default 5000)")
    common.add_argument("--config", type=Path, default=None, help="JSON config file for any of the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="dataset document/pair/label counts")
    _add_dataset_args(p)
    p.set_defaults(func=_run_stats)

    p = sub.add_parser("train", parents=[common], help="fit vocabulary and linear model on a labeled split")
    _add_dataset_args(p)
    _add_truncation_args(p)
    _add_train_args(p)
    p.add_argument("--stopwords", type=Path, default=None, help="stopword file (default: bundled list)")
    p.add_argument("--out", type=Path, required=True, help="output directory for model artifacts")
    p.set_defaults(func=_run_train)

    p = sub.add_parser("predict", parents=[common], help="run a trained model over a split")
    _add_dataset_args(p)
    _add_truncation_args(p)
    p.add_argument("--model", type=Path, required=True, help="model file from train")
    p.add_argument("--vocab", type=Path, default=None, help="vocabulary file (default: next to model)")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_run_predict)

    p = sub.add_parser("random-baseline", parents=[common], help="seeded uniform random predictions for a split")
    _add_dataset_args(p)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_run_random_baseline)

    p = sub.add_parser("evaluate", parents=[common], help="score solution files against truth files")
    p.add_argument("pred_dir", type=Path, help="directory of solution-problem-<N>.json files")
    p.add_argument("truth_dir", type=Path, help="directory of truth-problem-<N>.json files")
    p.add_argument("--difficulty", default="all", help="label for the report entry")
    p.add_argument("--per-document", action="store_true", help="average F1 per document (diagnostic)")
    p.add_argument("--out", type=Path, default=None, help="directory for report.json")
    p.set_defaults(func=_run_evaluate)

    p = sub.add_parser("ensemble", parents=[common], help="combine prediction files")
    p.add_argument("files", nargs="+", type=Path)
    p.add_argument("--mode", choices=[m.value for m in EnsembleMode], required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_run_ensemble)

    p = sub.add_parser("solutions", parents=[common], help="convert a predictions file to solution files")
    p.add_argument("predictions_file", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_run_solutions)

    return parser


def _load_config_file(path: Path | None) -> dict[str, object]:
    if path is None:
        return {}
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(raw) - set(CONFIG_DEFAULTS))
    if unknown:
        raise UsageError(f"config file {path} has unknown keys: {unknown}")
    return raw


def _run_config(args: argparse.Namespace) -> RunConfig:
    file_values = _load_config_file(getattr(args, "config", None))

    def resolve(key: str):
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        if key in file_values:
            return file_values[key]
        if key == "dataset_root":
            return os.environ.get(DATASET_ENV_VAR)
        return CONFIG_DEFAULTS[key]

    dataset_root = resolve("dataset_root")
    stopwords = resolve("stopwords")
    difficulty = str(resolve("difficulty"))
    split = str(resolve("split"))
    if difficulty not in ("easy", "medium", "hard", "all"):
        raise UsageError(f"unknown difficulty {difficulty!r}")
    if split not in corpus.SPLITS:
        raise UsageError(f"unknown split {split!r}")
    try:
        return RunConfig(
            dataset_root=Path(dataset_root) if dataset_root else None,
            difficulty=difficulty,
            split=split,
            truncation=TruncationConfig(
                budget=int(resolve("budget")),
                strategy=TruncationStrategy(str(resolve("strategy"))),
            ),
            train=TrainConfig(
                peak_lr=float(resolve("peak_lr")),
                epochs=int(resolve("epochs")),
                batch_size=int(resolve("batch_size")),
                warmup_ratio=float(resolve("warmup_ratio")),
                seed=int(resolve("seed")),
            ),
            stopword_file=Path(stopwords) if stopwords else None,
            out_dir=getattr(args, "out", None),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration value: {exc}") from exc


def _run_stats(args: argparse.Namespace) -> int:
    return cmd_stats(_run_config(args))


def _run_train(args: argparse.Namespace) -> int:
    return cmd_train(_run_config(args))


def _run_predict(args: argparse.Namespace) -> int:
    return cmd_predict(_run_config(args), args.model, args.vocab)


def _run_random_baseline(args: argparse.Namespace) -> int:
    return cmd_random_baseline(_run_config(args))


def _run_evaluate(args: argparse.Namespace) -> int:
    return cmd_evaluate(args.pred_dir, args.truth_dir, args.difficulty, args.out, args.per_document)


def _run_ensemble(args: argparse.Namespace) -> int:
    return cmd_ensemble(args.files, EnsembleMode(args.mode), args.out)


def _run_solutions(args: argparse.Namespace) -> int:
    return cmd_solutions(args.predictions_file, args.out)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StyleSeamError, OSError) as exc:
        logger.error("%s", exc)
        return 2
    except Exception:  # pragma: no cover - internal failure path
        logger.exception("internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
