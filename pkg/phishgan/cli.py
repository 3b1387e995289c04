"""Command line interface.

Subcommands:

    phishgan synth-data   write a synthetic labelled URL corpus
    phishgan train        k-fold training, keeps the best fold model
    phishgan detect       classify URLs with a trained model
    phishgan generate     synthesize URLs of a class
    phishgan evaluate     result tables and ROC curves on a test set
    phishgan game         build and solve an attacker-defender game

Paths default to the `PHISHGAN_DATA`, `PHISHGAN_CHECKPOINT` and
`PHISHGAN_OUTPUT_DIR` environment variables. Exit codes: 0 success, 1 usage
error, 2 data or checkpoint error, 3 numeric abort during training.
"""

from __future__ import annotations

from collections.abc import Sequence

import argparse
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from phishgan import url_examples
from phishgan.errors import CheckpointError, DataError, NumericAbort
from phishgan.evaluation import evaluate, timed_detections
from phishgan.games.solver import solve_backward_induction, strategic_form
from phishgan.games.tree import deployment_game, training_game
from phishgan.metrics.reports import (
    adversarial_table,
    classification_table,
    score_table,
    similarity_table,
)
from phishgan.networks.checkpoint import load_checkpoint, save_checkpoint
from phishgan.networks.generator import generate
from phishgan.settings import Settings, load_settings
from phishgan.training.crossval import cross_validate
from phishgan.urls.codec import decode_matrix, encode_url
from phishgan.urls.dataset import load_csv, synth_corpus, write_csv
from phishgan.urls.labels import UrlLabel

log = logging.getLogger(__name__)

ENV_DATA = "PHISHGAN_DATA"
ENV_CHECKPOINT = "PHISHGAN_CHECKPOINT"
ENV_OUTPUT_DIR = "PHISHGAN_OUTPUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors through `UsageError` so `main` can map them to exit 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _label(token: str) -> UrlLabel:
    try:
        return UrlLabel.parse(token)
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error)) from error


def _env_default(name: str, fallback: str | None = None) -> str | None:
    return os.environ.get(name, fallback)


def _require(value: str | None, flag: str, env: str) -> str:
    if not value:
        msg = f"{flag} is required (or set {env})"
        raise UsageError(msg)
    return value


def _output_dir(args) -> str:
    directory = args.output_dir or _env_default(ENV_OUTPUT_DIR, ".")
    os.makedirs(directory, exist_ok=True)
    return directory


def apply_overrides(settings: Settings, args) -> Settings:
    """Settings with the command line flags that were given applied on top."""
    weights = settings.weights
    overrides = {
        name: getattr(args, name)
        for name in ("lambda_adv", "lambda_rec", "lambda_class")
        if getattr(args, name, None) is not None
    }
    if overrides:
        weights = dataclasses.replace(weights, **overrides)

    training = dataclasses.replace(settings.training, seed=args.seed)
    for name in ("epochs", "batch_size", "max_d_iter", "checkpoint_every"):
        if getattr(args, name, None) is not None:
            training = dataclasses.replace(training, **{name: getattr(args, name)})
    if getattr(args, "alpha", None) is not None:
        training = dataclasses.replace(
            training,
            generator_optimizer=dataclasses.replace(training.generator_optimizer, alpha=args.alpha),
            discriminator_optimizer=dataclasses.replace(
                training.discriminator_optimizer, alpha=args.alpha
            ),
        )
    if getattr(args, "generator_class_loss", False):
        training = dataclasses.replace(training, generator_class_loss=True)

    folds = args.folds if getattr(args, "folds", None) is not None else settings.folds
    return dataclasses.replace(settings, weights=weights, training=training, folds=folds)


def cmd_synth_data(args) -> int:
    if args.count <= 0 or args.count % 2:
        msg = f"--count must be a positive even number, got {args.count}"
        raise UsageError(msg)
    output = _require(args.output or _env_default(ENV_DATA), "--output", ENV_DATA)
    records = synth_corpus(args.count, seed=args.seed)
    write_csv(records, output)
    counts = {label.token: sum(record.label is label for record in records) for label in UrlLabel}
    print(f"wrote {len(records)} URLs to {output}")
    for token, count in counts.items():
        print(f"  {token}: {count}")
    return EXIT_OK


def cmd_train(args, settings: Settings) -> int:
    data = _require(args.data or _env_default(ENV_DATA), "--data", ENV_DATA)
    records = load_csv(data)
    output_dir = _output_dir(args)
    checkpoint = args.checkpoint or _env_default(
        ENV_CHECKPOINT, os.path.join(output_dir, "model.ckpt")
    )
    training = settings.training
    if training.checkpoint_every:
        training = dataclasses.replace(
            training, checkpoint_dir=os.path.join(output_dir, "snapshots")
        )

    try:
        cv = cross_validate(
            records,
            training,
            settings.weights,
            settings.networks,
            k=settings.folds,
            max_folds=args.max_folds,
        )
    except ValueError as error:
        raise DataError(str(error)) from error

    for result in cv.results:
        print(
            f"fold {result.fold + 1}/{cv.plan.k}: train {result.train_size}, "
            f"test {result.test_size}, accuracy {result.accuracy:.4f}"
        )
    best = cv.best
    counts = best.model.parameter_counts()
    print(
        f"parameters: generator {counts['generator']:,}, "
        f"discriminator {counts['discriminator']:,}, total {counts['total']:,}"
    )
    save_checkpoint(best.model, checkpoint)
    log_path = os.path.join(output_dir, "train-log.csv")
    best.log.to_csv(log_path)
    print(f"best fold {best.fold + 1} (accuracy {best.accuracy:.4f}) saved to {checkpoint}")
    print(f"training log: {log_path}")
    return EXIT_OK


def _checkpoint(args) -> str:
    return _require(args.checkpoint or _env_default(ENV_CHECKPOINT), "--checkpoint", ENV_CHECKPOINT)


def _read_urls(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as file:
            return [line.strip() for line in file if line.strip()]
    except (OSError, UnicodeDecodeError) as error:
        msg = f"cannot read {path}: {error}"
        raise DataError(msg) from error


def cmd_detect(args) -> int:
    urls = list(args.urls)
    if any(not url.strip() for url in urls):
        msg = "URLs must not be empty"
        raise UsageError(msg)
    if args.file:
        urls += _read_urls(args.file)
    if not urls:
        msg = "give at least one URL or --file"
        raise UsageError(msg)
    model = load_checkpoint(_checkpoint(args))
    results, throughput = timed_detections(model, urls)
    if args.json:
        document = {
            "verdicts": [
                {
                    "url": result.url,
                    "class": result.detection.predicted_class.token,
                    "class_probability": float(result.detection.class_probs.max()),
                    "realness": result.detection.realness,
                    "adv_score": result.detection.adv_score,
                    "latency_ms": result.seconds * 1000,
                }
                for result in results
            ],
            "throughput_urls_per_second": throughput,
        }
        print(json.dumps(document, indent=2))
        return EXIT_OK
    for result in results:
        detection = result.detection
        print(
            f"{detection.predicted_class.token:<9} p={detection.class_probs.max():.4f} "
            f"real={detection.realness:.4f} {result.seconds * 1000:.2f}ms {result.url}"
        )
    print(f"throughput: {throughput:.1f} URLs/s")
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.count <= 0:
        msg = f"--count must be positive, got {args.count}"
        raise UsageError(msg)
    data = args.data or _env_default(ENV_DATA)
    pool = load_csv(data) if data else url_examples.sample
    seeds = [record.url for record in pool if record.label is args.label]
    if not seeds:
        msg = f"no {args.label.token} URLs to start from"
        raise DataError(msg)
    model = load_checkpoint(_checkpoint(args))
    rng = np.random.default_rng(args.seed)
    picks = rng.choice(len(seeds), size=args.count, replace=len(seeds) < args.count)
    for i, pick in enumerate(picks):
        matrix = generate(
            model.generator,
            encode_url(seeds[pick]),
            args.label,
            seed=args.seed + i,
            config=model.config,
        )
        print(decode_matrix(matrix))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    data = _require(args.data or _env_default(ENV_DATA), "--data", ENV_DATA)
    model = load_checkpoint(_checkpoint(args))
    records = load_csv(data)
    result = evaluate(model, records, seed=args.seed)
    output_dir = _output_dir(args)

    print(f"Classification of real URLs ({result.real_count} samples)")
    print(classification_table(result.classification, result.classification_auc))
    print()
    print(f"Adversarial detection ({result.mixed_count} samples, 50% generated)")
    print(adversarial_table(result.adversarial, result.adversarial_auc))
    print()
    print(f"Generator similarity ({result.similarity.count} pairs)")
    print(similarity_table(result.similarity))
    print()
    print(score_table(result.mean_real_score, result.mean_generated_score))
    reports = (("classification", result.classification), ("adversarial", result.adversarial))
    for name, report in reports:
        if report.undefined:
            undefined = ", ".join(sorted(report.undefined))
            print(f"note: {name} {undefined} undefined (division by zero), shown as 0")

    roc_path = os.path.join(output_dir, "roc.csv")
    result.classification_roc.to_csv(roc_path)
    adversarial_roc_path = os.path.join(output_dir, "roc-adversarial.csv")
    result.adversarial_roc.to_csv(adversarial_roc_path)
    print(f"ROC curves: {roc_path}, {adversarial_roc_path}")
    return EXIT_OK


def cmd_game(args, settings: Settings) -> int:
    if args.which == "training":
        tree = training_game(args.true_class, settings.weights)
    else:
        tree = deployment_game(settings.deployment)
    solution = solve_backward_induction(tree)
    if args.yaml:
        print(solution.to_yaml(), end="")
        return EXIT_OK
    print(solution.to_text())
    print(f"equilibrium path: {' -> '.join(solution.equilibrium_path)}")
    if args.strategic_form:
        print()
        print(strategic_form(tree).to_string())
    return EXIT_OK


def _add_weight_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda-adv", type=float, help="adversarial loss weight")
    parser.add_argument("--lambda-rec", type=float, help="reconstruction loss weight")
    parser.add_argument("--lambda-class", type=float, help="class loss weight")


def get_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="phishgan",
        description="Generate and detect phishing URLs with a conditional GAN.",
    )
    parser.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs"
    )
    parser.add_argument("--instant", help="date at which parameters are read (default: today)")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    synth = subparsers.add_parser("synth-data", help="write a synthetic labelled URL corpus")
    synth.add_argument("-n", "--count", type=int, default=2000, help="number of URLs, even")
    synth.add_argument("-o", "--output", help=f"CSV file to write (default: ${ENV_DATA})")

    train = subparsers.add_parser("train", help="train with stratified k-fold cross-validation")
    train.add_argument("--data", help=f"training CSV (default: ${ENV_DATA})")
    train.add_argument(
        "--checkpoint", help=f"where to save the best model (default: ${ENV_CHECKPOINT})"
    )
    train.add_argument("--output-dir", help=f"directory for logs (default: ${ENV_OUTPUT_DIR} or .)")
    train.add_argument("--epochs", type=int)
    train.add_argument("--batch-size", type=int)
    train.add_argument("--max-d-iter", type=int)
    train.add_argument("--alpha", type=float, help="Adam learning rate of both networks")
    train.add_argument("--folds", type=int)
    train.add_argument("--max-folds", type=int, help="train only the first folds")
    train.add_argument("--checkpoint-every", type=int, help="snapshot every N iterations")
    train.add_argument(
        "--generator-class-loss",
        action="store_true",
        help="add the class loss to the generator objective",
    )
    _add_weight_flags(train)

    detect = subparsers.add_parser("detect", help="classify URLs")
    detect.add_argument("urls", nargs="*", help="URLs to classify")
    detect.add_argument("--file", help="file with one URL per line")
    detect.add_argument("--checkpoint", help=f"model checkpoint (default: ${ENV_CHECKPOINT})")
    detect.add_argument("--json", action="store_true", help="machine-readable output")

    gen = subparsers.add_parser("generate", help="synthesize URLs of a class")
    gen.add_argument("-n", "--count", type=int, default=5)
    gen.add_argument("--label", type=_label, default=UrlLabel.MALICIOUS, help="benign or malicious")
    gen.add_argument("--data", help="CSV of seed URLs (default: the bundled sample)")
    gen.add_argument("--checkpoint", help=f"model checkpoint (default: ${ENV_CHECKPOINT})")

    ev = subparsers.add_parser("evaluate", help="result tables and ROC curves")
    ev.add_argument("--data", help=f"test CSV (default: ${ENV_DATA})")
    ev.add_argument("--checkpoint", help=f"model checkpoint (default: ${ENV_CHECKPOINT})")
    ev.add_argument(
        "--output-dir", help=f"directory for ROC CSVs (default: ${ENV_OUTPUT_DIR} or .)"
    )

    game = subparsers.add_parser("game", help="build and solve a game")
    game.add_argument("which", choices=("training", "deployment"))
    game.add_argument("--true-class", type=_label, default=UrlLabel.MALICIOUS)
    game.add_argument("--yaml", action="store_true", help="machine-readable output")
    game.add_argument("--strategic-form", action="store_true", help="also print the payoff table")
    _add_weight_flags(game)
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = get_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args.verbose)
        if args.command == "synth-data":
            return cmd_synth_data(args)
        if args.command == "detect":
            return cmd_detect(args)
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "evaluate":
            return cmd_evaluate(args)
        try:
            settings = load_settings(args.instant)
        except ValueError as error:
            msg = f"invalid --instant {args.instant!r}: {error}"
            raise UsageError(msg) from error
        settings = apply_overrides(settings, args)
        if args.command == "train":
            return cmd_train(args, settings)
        return cmd_game(args, settings)
    except UsageError as error:
        print(error, file=sys.stderr)
        return EXIT_USAGE
    except (DataError, CheckpointError, OSError) as error:
        print(f"phishgan: error: {error}", file=sys.stderr)
        return EXIT_DATA
    except NumericAbort as error:
        print(f"phishgan: training aborted: {error}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
