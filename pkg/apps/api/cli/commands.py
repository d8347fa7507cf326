from __future__ import annotations

import argparse
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional

from services.archspace import (
    arch_from_dict,
    arch_to_dict,
    bin_range,
    format_size,
    load_spec,
    make_bins,
    max_total_depth,
    min_total_depth,
    sample_balanced,
    sample_random,
    space_size,
)
from services.baseline_lut import build_lut, evaluate_lut, fit_bias, save_lut
from services.common.config import state_dir
from services.common.seeds import derive_seed
from services.common.util import atomic_write_json, atomic_write_text
from services.dataset import (
    LatencyDataset,
    load_dataset,
    save_dataset,
    split,
    training_samples,
    with_encodings,
    with_scheme,
)
from services.encoding import SCHEMES, encoding_length, parse_scheme
from services.esm import (
    EsmConfig,
    backend_from_config,
    collect_samples,
    compare_encodings,
    load_config,
    measure_test_set,
    run_esm,
    run_seeds,
    write_scatter_rows,
)
from services.predictor import EvalReport, evaluate, load_model, save_model, train

from .manifest import RunManifest, manifest_path

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _args_record(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def record_run(
    args: argparse.Namespace,
    anchor: Path,
    artifacts: Dict[str, Path],
    *,
    cfg: Optional[EsmConfig] = None,
    status: str = "ok",
    exit_code: int = EXIT_OK,
) -> Path:
    """Write the manifest of a finished command next to its main output."""
    manifest = RunManifest(
        command=args.command,
        config=cfg.model_dump(mode="json") if cfg is not None else {},
        seeds=run_seeds(cfg.seed) if cfg is not None else {},
        args=_args_record(args),
    )
    for name, path in artifacts.items():
        manifest.add_artifact(name, path)
    manifest.finish(status, exit_code)
    path = manifest_path(anchor)
    manifest.write(path)
    LOGGER.debug("manifest for %s -> %s", args.command, path)
    return path


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        out["seed"] = args.seed
    if getattr(args, "backend", None):
        out["backend"] = {"kind": args.backend}
    if getattr(args, "scheme", None):
        out["scheme"] = args.scheme
    if getattr(args, "strategy", None):
        out["strategy"] = args.strategy
    if getattr(args, "spec", None):
        out["spec"] = args.spec
    return out


def resolve_config(args: argparse.Namespace) -> EsmConfig:
    path = Path(args.config) if getattr(args, "config", None) else None
    return load_config(path, config_overrides(args))


def out_path(args: argparse.Namespace, default_name: str) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return state_dir() / default_name


def _print_report(report: EvalReport) -> None:
    print(f"strategy: {report.strategy} (acc_th={report.acc_th:.4f})")
    print(f"overall accuracy: {report.overall_accuracy:.6f}")
    for i, (acc, n) in enumerate(zip(report.per_bin_accuracy, report.bin_sizes)):
        shown = "-" if acc is None else f"{acc:.6f}"
        print(f"  bin {i}: {shown} ({n} samples)")
    print(f"result: {'PASS' if report.passed else 'FAIL'}")


def cmd_space(args: argparse.Namespace) -> int:
    spec = load_spec(args.spec_ref)
    size = space_size(spec)
    print(f"spec: {spec.name}")
    print(f"units: {len(spec.units)}")
    print(f"size: {format_size(size)} ({size})")
    print(f"total depth: {min_total_depth(spec)}..{max_total_depth(spec)}")
    bins = make_bins(spec, args.n_bins)
    for i in range(bins.n_bins):
        r = bin_range(bins, i)
        print(f"  bin {i}: {r.start}..{r.stop - 1}")
    lengths = ", ".join(f"{s}={encoding_length(spec, s)}" for s in SCHEMES)  # type: ignore[arg-type]
    print(f"encoding lengths: {lengths}")
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    spec = load_spec(cfg.spec)
    n = args.n or cfg.n_initial
    seed = derive_seed(cfg.seed, "initial")
    if cfg.strategy == "balanced":
        archs = sample_balanced(spec, n, make_bins(spec, cfg.n_bins), seed)
    else:
        archs = sample_random(spec, n, seed)
    path = out_path(args, "archs.json")
    atomic_write_json(
        path,
        {"spec": spec.name, "strategy": cfg.strategy, "seed": cfg.seed,
         "archs": [arch_to_dict(a) for a in archs]},
    )
    print(f"wrote {len(archs)} architectures to {path}")
    record_run(args, path, {"archs": path}, cfg=cfg)
    return EXIT_OK


def cmd_measure(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    spec = load_spec(cfg.spec)
    payload = json.loads(Path(args.archs).read_text(encoding="utf-8"))
    archs = [arch_from_dict(a) for a in payload.get("archs", [])]
    backend = backend_from_config(cfg.backend, spec)
    refs = tuple(sample_random(spec, cfg.n_refs, run_seeds(cfg.seed)["refs"]))
    result = collect_samples(
        backend,
        archs,
        refs,
        seed=derive_seed(cfg.seed, "measure", "cli"),
        prefix=args.prefix,
        settings=cfg.collect_settings(),
    )
    ds = LatencyDataset(
        spec=spec,
        scheme=cfg.scheme,  # type: ignore[arg-type]
        bins=make_bins(spec, cfg.n_bins),
        samples=result.samples,
        refs=refs,
        seeds=run_seeds(cfg.seed),
        backend=asdict(backend.descriptor),
    )
    path = out_path(args, "dataset.jsonl")
    save_dataset(ds, path)
    print(f"measured {len(result.arch_samples)} architectures -> {path}")
    if result.failed:
        print(f"failed: {len(result.failed)}")
    record_run(args, path, {"dataset": path}, cfg=cfg)
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    ds = load_dataset(Path(args.dataset))
    if args.scheme:
        ds = with_scheme(ds, parse_scheme(args.scheme))
    ds = with_encodings(ds)
    path = out_path(args, "dataset.jsonl")
    save_dataset(ds, path)
    print(f"encoded {len(ds)} samples with {ds.scheme} -> {path}")
    record_run(args, path, {"dataset": path})
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    ds = load_dataset(Path(args.dataset))
    if args.scheme:
        ds = with_scheme(ds, cfg.scheme)  # type: ignore[arg-type]
    train_ds, test_ds = split(ds, args.test_fraction, derive_seed(cfg.seed, "split"))
    model = train(train_ds, cfg.train.model_copy(update={"seed": derive_seed(cfg.seed, "train", 0)}))
    path = out_path(args, "model.json")
    save_model(model, path)
    print(f"trained on {len(training_samples(train_ds))} samples -> {path}")
    artifacts = {"model": path}
    if args.test_out:
        save_dataset(test_ds, Path(args.test_out))
        print(f"held-out split ({len(test_ds)} samples) -> {args.test_out}")
        artifacts["test_split"] = Path(args.test_out)
    record_run(args, path, artifacts, cfg=cfg)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(Path(args.model))
    ds = load_dataset(Path(args.dataset))
    report = evaluate(model, ds, args.evaluation, args.acc_th)
    _print_report(report)
    code = EXIT_OK if report.passed else EXIT_NOT_CONVERGED
    path = out_path(args, "eval.json")
    atomic_write_json(path, {k: v for k, v in asdict(report).items() if k != "pairs"})
    record_run(
        args, path, {"report": path}, status="pass" if report.passed else "fail", exit_code=code
    )
    return code


def cmd_export_scatter(args: argparse.Namespace) -> int:
    model = load_model(Path(args.model))
    ds = load_dataset(Path(args.dataset))
    report = evaluate(model, ds, "overall", 0.0)
    path = out_path(args, "scatter.csv")
    write_scatter_rows(report.pairs, path)
    print(f"wrote {len(report.pairs)} rows -> {path}")
    record_run(args, path, {"scatter": path})
    return EXIT_OK


def cmd_esm(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    out = out_path(args, "esm-run")
    manifest = RunManifest(
        command="esm",
        config=cfg.model_dump(mode="json"),
        seeds=run_seeds(cfg.seed),
        args=_args_record(args),
    )
    manifest.write(out / "manifest.json")
    _, history, ds = run_esm(cfg, out_dir=out)
    for name in ("dataset.jsonl", "testset.jsonl", "model.json", "history.json", "scatter.csv"):
        manifest.add_artifact(name.split(".")[0], out / name)
    code = EXIT_OK if history.converged else EXIT_NOT_CONVERGED
    manifest.finish(history.status, code)
    manifest.write(out / "manifest.json")
    last = history.records[-1]
    print(
        f"{history.status} after {history.iterations} iteration(s): "
        f"{len(training_samples(ds))} samples, overall accuracy {last.overall_accuracy:.4f}"
    )
    return code


def cmd_lut(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    spec = load_spec(cfg.spec)
    backend = backend_from_config(cfg.backend, spec)
    refs = tuple(sample_random(spec, cfg.n_refs, run_seeds(cfg.seed)["refs"]))
    test_set, _ = measure_test_set(cfg, spec, backend, refs)
    lut = build_lut(spec, backend, derive_seed(cfg.seed, "lut"), runs_per_arch=cfg.runs_per_arch)
    n_cal = args.calibration_size
    cal_archs = sample_balanced(spec, n_cal, test_set.bins, derive_seed(cfg.seed, "calibration"))
    cal = collect_samples(
        backend, cal_archs, (), seed=derive_seed(cfg.seed, "measure", "calibration"),
        prefix="cal", settings=cfg.collect_settings(),
    )
    bias = fit_bias(lut, [(s.arch, s.latency_ms) for s in cal.arch_samples])
    raw = evaluate_lut(lut, test_set, cfg.evaluation, cfg.acc_th)
    corrected = evaluate_lut(lut, test_set, cfg.evaluation, cfg.acc_th, bias)
    path = out_path(args, "lut.jsonl")
    save_lut(lut, path, bias)
    print(f"LUT: {len(lut)} entries, c0={lut.c0:.6f} ms -> {path}")
    print(f"raw LUT overall accuracy: {raw.overall_accuracy:.6f}")
    print(
        f"bias-corrected (a={bias.slope:.6f}, b={bias.intercept:.6f}) "
        f"overall accuracy: {corrected.overall_accuracy:.6f}"
    )
    record_run(args, path, {"lut": path}, cfg=cfg)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    spec = load_spec(cfg.spec)
    rows: List[Dict[str, Any]] = []
    for seed in args.seeds or [cfg.seed]:
        for row in compare_encodings(
            spec,
            n_train=args.n_train,
            n_test=args.n_test,
            seed=seed,
            params=cfg.backend.oracle,
            train_cfg=cfg.train,
            n_bins=cfg.n_bins,
            runs_per_arch=cfg.runs_per_arch,
        ):
            rows.append({"seed": seed, **asdict(row)})
            print(f"seed {seed} {row.name:>14}: overall {row.overall_accuracy:.4f} mse {row.mse:.6g}")
    path = out_path(args, "compare.json")
    atomic_write_text(path, json.dumps(rows, indent=2))
    record_run(args, path, {"rows": path}, cfg=cfg)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("main:app", host=args.host, port=args.port)
    return EXIT_OK

