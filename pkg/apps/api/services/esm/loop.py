from __future__ import annotations

import logging
import time
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from services.archspace import (
    ArchConfig,
    SupernetSpec,
    load_spec,
    make_bins,
    sample_balanced,
    sample_random,
)
from services.common.seeds import derive_seed
from services.dataset import (
    LatencyDataset,
    Sample,
    save_dataset,
    training_samples,
    with_encodings,
    with_samples,
)
from services.measurement import (
    ExternalBackend,
    MeasurementBackend,
    OracleBackend,
)
from services.predictor import MlpModel, evaluate, save_model, train

from .allocation import allocate_extension
from .collect import collect_samples
from .config import BackendConfig, EsmConfig
from .extension import collect_extension
from .history import EsmHistory, IterationRecord, write_history, write_history_scatter

LOGGER = logging.getLogger(__name__)


def backend_from_config(cfg: BackendConfig, spec: SupernetSpec) -> MeasurementBackend:
    if cfg.kind == "external":
        return ExternalBackend(cfg.command or None, timeout=cfg.timeout_seconds)
    return OracleBackend(spec, cfg.oracle)


def run_seeds(root: int) -> dict:
    return {
        "root": root,
        "refs": derive_seed(root, "refs"),
        "test": derive_seed(root, "test"),
        "initial": derive_seed(root, "initial"),
    }


def measure_test_set(
    cfg: EsmConfig,
    spec: SupernetSpec,
    backend: MeasurementBackend,
    refs: Sequence[ArchConfig],
) -> Tuple[LatencyDataset, List[Sample]]:
    """Balanced-sample and measure the held-out set once; returns it with its reference readings."""
    bins = make_bins(spec, cfg.n_bins)
    seeds = run_seeds(cfg.seed)
    archs = sample_balanced(spec, cfg.test_size, bins, seeds["test"])
    result = collect_samples(
        backend,
        archs,
        refs,
        seed=derive_seed(cfg.seed, "measure", "test"),
        prefix="test",
        settings=cfg.collect_settings(),
    )
    test_set = LatencyDataset(
        spec=spec,
        scheme=cfg.scheme,  # type: ignore[arg-type]
        bins=bins,
        samples=tuple(result.arch_samples),
        refs=tuple(refs),
        seeds={"test": seeds["test"]},
        backend=asdict(backend.descriptor),
    )
    return test_set, result.reference_samples


def run_esm(
    cfg: EsmConfig,
    *,
    spec: Optional[SupernetSpec] = None,
    backend: Optional[MeasurementBackend] = None,
    out_dir: Optional[Path] = None,
) -> Tuple[MlpModel, EsmHistory, LatencyDataset]:
    """
    Train, evaluate on a fixed held-out set, extend; repeat until the
    accuracy constraint passes or max_iterations models have been trained.

    Every model is trained from scratch with a seed derived from the root
    seed and the iteration number.
    """
    spec = spec or load_spec(cfg.spec)
    backend = backend or backend_from_config(cfg.backend, spec)
    settings = cfg.collect_settings()
    seeds = run_seeds(cfg.seed)
    bins = make_bins(spec, cfg.n_bins)
    refs = tuple(sample_random(spec, cfg.n_refs, seeds["refs"]))

    test_set, test_ledger = measure_test_set(cfg, spec, backend, refs)
    if cfg.strategy == "balanced":
        initial = sample_balanced(spec, cfg.n_initial, bins, seeds["initial"])
    else:
        initial = sample_random(spec, cfg.n_initial, seeds["initial"])
    first = collect_samples(
        backend,
        initial,
        refs,
        seed=derive_seed(cfg.seed, "measure", 0),
        prefix="it00",
        settings=settings,
        ledger=test_ledger,
    )
    ds = LatencyDataset(
        spec=spec,
        scheme=cfg.scheme,  # type: ignore[arg-type]
        bins=bins,
        samples=first.samples,
        refs=refs,
        seeds=seeds,
        backend=asdict(backend.descriptor),
    )
    if out_dir is not None:
        save_dataset(test_set, Path(out_dir) / "testset.jsonl")

    measurements = first.measurements
    records: List[IterationRecord] = []
    allocation: Tuple[int, ...] = ()
    iteration = 0
    started = time.monotonic()
    while True:
        ds = with_encodings(ds)
        train_seed = derive_seed(cfg.seed, "train", iteration)
        model = train(ds, cfg.train.model_copy(update={"seed": train_seed}))
        report = evaluate(model, test_set, cfg.evaluation, cfg.acc_th)
        size = len(training_samples(ds))
        records.append(
            IterationRecord(
                iteration=iteration,
                dataset_size=size,
                measured_samples=measurements,
                bin_accuracies=report.per_bin_accuracy,
                overall_accuracy=report.overall_accuracy,
                passed=report.passed,
                wall_time_s=round(time.monotonic() - started, 3),
                train_seed=train_seed,
                allocation=allocation,
                scatter=report.pairs,
            )
        )
        LOGGER.info(
            "iteration %d: %d samples, overall %.4f, bins %s -> %s",
            iteration,
            size,
            report.overall_accuracy,
            ["-" if a is None else f"{a:.4f}" for a in report.per_bin_accuracy],
            "pass" if report.passed else "fail",
        )
        if out_dir is not None:
            save_dataset(ds, Path(out_dir) / "dataset.jsonl")
        if report.passed or len(records) >= cfg.max_iterations:
            break

        alloc = allocate_extension(
            report.per_bin_accuracy, cfg.acc_th, cfg.w1, cfg.w2, cfg.n_step, cfg.strategy
        )
        allocation = alloc.per_bin or (alloc.n_random,)
        iteration += 1
        started = time.monotonic()
        step = collect_extension(
            ds, alloc, backend, cfg.seed, iteration=iteration, settings=settings, ledger=test_ledger
        )
        measurements += step.measurements
        ds = with_samples(ds, step.samples)

    history = EsmHistory(
        strategy=cfg.strategy,
        acc_th=cfg.acc_th,
        evaluation=cfg.evaluation,
        records=tuple(records),
    )
    if not history.converged:
        LOGGER.warning(
            "no convergence after %d iteration(s) (%d samples)", history.iterations, len(ds)
        )
    if out_dir is not None:
        out = Path(out_dir)
        write_history(history, out / "history.json")
        write_history_scatter(history, out / "scatter.csv")
        save_model(model, out / "model.json")
    return model, history, ds
