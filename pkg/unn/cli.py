"""
Command line entry point:

    python -m unn command=gen input=points.csv spread=0.1 out=train.jsonl
    python -m unn command=gen kind=queries input=test.csv dataset=train.jsonl out=test.jsonl
    python -m unn command=classify dataset=train.jsonl queries=queries.csv k=3
    python -m unn command=compare dataset=train.jsonl queries=queries.csv out=cmp.csv
    python -m unn command=crossval dataset=train.jsonl classifier=eknn
    python -m unn command=manet out=manet/ power_samples=1000
"""

import logging
import os
import sys
import time
from typing import Any, Callable, Dict, List

import hydra
import numpy as np
from omegaconf import DictConfig, OmegaConf

from . import classifier_fields, load_classifier
from .datagen import (
    SPREAD_MODES,
    SpreadConfig,
    inject_gaussian_uncertainty,
    inject_uncertainty,
    ten_fold_cv,
    uncertain_queries,
)
from .io_utils import (
    load_dataset,
    read_points_csv,
    read_queries,
    save_dataset,
    save_queries,
    write_csv_rows,
    write_jsonl,
)
from .manet import ManetScenario, run_manet_experiment, write_manet_outputs
from .model import BaseClassifier, classify_all
from .objects import Dataset
from .utils import format_time

_COMMANDS: Dict[str, Callable[[DictConfig], None]] = {}
_COMPARED = ["unn", "eknn", "naive_mean", "oracle"]


def command(name: str):
    def wrapper(fn: Callable[[DictConfig], None]) -> Callable[[DictConfig], None]:
        _COMMANDS[name] = fn
        return fn

    return wrapper


def _require(cfg: DictConfig, *keys: str) -> None:
    missing = [key for key in keys if cfg.get(key) is None]
    if missing:
        raise ValueError(f"command={cfg.command} needs {missing}")


def build_classifier(cfg: DictConfig, name: str, dataset: Dataset) -> BaseClassifier:
    """
    Classifier `name` configured from the command line keys it understands.
    """
    values = {
        "k": cfg.k,
        "h": cfg.h,
        "n_samples": cfg.n_samples,
        "m_outcomes": cfg.m_outcomes,
        "seed": cfg.seed,
    }
    fields = classifier_fields(name)
    overrides: Dict[str, Any] = {key: value for key, value in values.items() if key in fields}
    if "index" in fields:
        overrides["index"] = {"num_pivots": cfg.pivots, "seed": cfg.seed}
    return load_classifier(name, dataset, **overrides)


@command("gen")
def cmd_gen(cfg: DictConfig) -> None:
    _require(cfg, "input")
    if cfg.mode not in SPREAD_MODES:
        raise ValueError(f"Unknown mode '{cfg.mode}'. Available: {list(SPREAD_MODES)}")
    if cfg.kind == "queries":
        _gen_queries(cfg)
        return
    if cfg.kind != "dataset":
        raise ValueError(f"Unknown kind '{cfg.kind}'. Available: ['dataset', 'queries']")
    points, labels = read_points_csv(cfg.input)
    if cfg.mode == "uniform_normal":
        dataset = inject_uncertainty(
            points, labels, SpreadConfig.from_points(points, cfg.spread, cfg.seed)
        )
    else:
        dataset = inject_gaussian_uncertainty(
            points, labels, cfg.spread, np.random.default_rng(cfg.seed)
        )
    save_dataset(dataset, cfg.out)
    logging.info(f"Wrote {len(dataset)} objects (spread={cfg.spread}, mode={cfg.mode})")


def _gen_queries(cfg: DictConfig) -> None:
    points, _ = read_points_csv(cfg.input, require_label=False)
    if len(points) == 0:
        raise ValueError(f"{cfg.input}: no query points")
    # widths follow the training data when it is given
    reference = load_dataset(cfg.dataset).centers if cfg.dataset else points
    objects = uncertain_queries(
        points, cfg.spread, np.std(reference, axis=0), cfg.mode, cfg.seed
    )
    save_queries(objects, cfg.out)
    logging.info(f"Wrote {len(objects)} test objects (spread={cfg.spread}, mode={cfg.mode})")


@command("classify")
def cmd_classify(cfg: DictConfig) -> None:
    _require(cfg, "dataset", "queries")
    dataset = load_dataset(cfg.dataset)
    queries = read_queries(cfg.queries)
    classifier = build_classifier(cfg, cfg.classifier, dataset)
    results = classify_all(classifier, queries, jobs=cfg.jobs, progress=cfg.progress)
    labels = dataset.labels
    if cfg.format == "jsonl":
        write_jsonl(
            cfg.out,
            [
                {
                    "query": i,
                    "label": result.label,
                    "class_probs": result.class_probs,
                    "candidates": result.candidates_examined,
                    "tie": result.tie,
                }
                for i, result in enumerate(results)
            ],
        )
    elif cfg.format == "csv":
        write_csv_rows(
            cfg.out,
            ["query", "label", *[f"p_{label}" for label in labels], "candidates"],
            [
                [
                    i,
                    result.label,
                    *[result.class_probs[label] for label in labels],
                    result.candidates_examined,
                ]
                for i, result in enumerate(results)
            ],
        )
    else:
        raise ValueError(f"Unknown format '{cfg.format}'. Available: ['csv', 'jsonl']")
    logging.info(f"Classified {len(results)} queries with {cfg.classifier}")


def agreement_rate(labels: List[str], reference: List[str]) -> float:
    if not reference:
        return 1.0
    return float(np.mean([a == b for a, b in zip(labels, reference)]))


def _agreement_path(out: str) -> str:
    stem, _ = os.path.splitext(out)
    return f"{stem}_agreement.csv"


@command("compare")
def cmd_compare(cfg: DictConfig) -> None:
    _require(cfg, "dataset", "queries")
    dataset = load_dataset(cfg.dataset)
    queries = read_queries(cfg.queries)
    predictions: Dict[str, List[str]] = {}
    for name in _COMPARED:
        classifier = build_classifier(cfg, name, dataset)
        results = classify_all(classifier, queries, jobs=cfg.jobs, progress=cfg.progress)
        predictions[name] = [result.label for result in results]

    write_csv_rows(
        cfg.out,
        ["query", *_COMPARED],
        [[i, *[predictions[name][i] for name in _COMPARED]] for i in range(len(queries))],
    )
    agreement = [
        (name, agreement_rate(predictions[name], predictions["oracle"]))
        for name in _COMPARED
    ]
    if cfg.out is None or cfg.out == "-":
        for name, rate in agreement:
            logging.info(f"{name} agrees with oracle on {rate:.3f} of queries")
    else:
        write_csv_rows(_agreement_path(cfg.out), ["method", "agreement"], agreement)


@command("crossval")
def cmd_crossval(cfg: DictConfig) -> None:
    _require(cfg, "dataset")
    dataset = load_dataset(cfg.dataset)
    report = ten_fold_cv(
        dataset,
        lambda train: build_classifier(cfg, cfg.classifier, train),
        seed=cfg.seed,
        jobs=cfg.jobs,
        progress=cfg.progress,
    )
    write_csv_rows(
        cfg.out,
        ["fold", "accuracy"],
        list(enumerate(report.fold_accuracies)),
    )
    logging.info(f"{cfg.classifier} accuracy {report.mean:.4f} +- {report.std:.4f}")


@command("manet")
def cmd_manet(cfg: DictConfig) -> None:
    _require(cfg, "out")
    scenario = ManetScenario.generate(
        np.random.default_rng(cfg.seed), alpha_loss=cfg.alpha_loss
    )
    report = run_manet_experiment(
        scenario,
        k=cfg.k,
        h=cfg.h,
        n_samples=cfg.n_samples,
        m_outcomes=cfg.m_outcomes if cfg.m_outcomes is not None else 100,
        power_samples=cfg.power_samples,
        seed=cfg.seed,
        jobs=cfg.jobs,
        progress=cfg.progress,
    )
    write_manet_outputs(scenario, report, cfg.out)


def run(cfg: DictConfig) -> None:
    """
    Dispatch `cfg.command`; errors propagate to the caller.
    """
    if cfg.command not in _COMMANDS:
        raise ValueError(f"Unknown command '{cfg.command}'. Available: {sorted(_COMMANDS)}")
    start = time.perf_counter()
    _COMMANDS[cfg.command](cfg)
    logging.info(f"{cfg.command} finished in {format_time(time.perf_counter() - start)}")


@hydra.main(version_base=None, config_path="conf", config_name="config")
def main(cfg: DictConfig) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    logging.debug(OmegaConf.to_yaml(cfg))
    run(cfg)
