from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, List, Optional, Sequence, Tuple, Type

from services.archspace import BinsError, SpecError
from services.baseline_lut import DEFAULT_CALIBRATION_SIZE, LutError
from services.dataset import DatasetError
from services.encoding import EncodingError
from services.esm import EsmConfigError, EsmError
from services.measurement import BackendError, QcError
from services.predictor import STRATEGIES, PredictorError

from . import __version__, commands

LOGGER = logging.getLogger(__name__)

SCHEME_CHOICES = ["fcc", "fc", "feature_count", "statistical", "feature", "onehot", "one_hot"]

# Checked in order; subclasses before their bases.
ERROR_PREFIXES: Tuple[Tuple[Type[BaseException], str], ...] = (
    (EsmConfigError, "config"),
    (SpecError, "config"),
    (BinsError, "config"),
    (QcError, "qc"),
    (BackendError, "backend"),
    (DatasetError, "dataset"),
    (EncodingError, "encoding"),
    (PredictorError, "model"),
    (LutError, "lut"),
    (EsmError, "esm"),
)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML run configuration")
    parser.add_argument("--seed", type=int, help="root seed (overrides config)")
    parser.add_argument("--backend", choices=["oracle", "external"])
    parser.add_argument("--scheme", choices=SCHEME_CHOICES)
    parser.add_argument("--strategy", choices=["random", "balanced"])
    parser.add_argument("--spec", help="preset name or spec YAML path (overrides config)")
    parser.add_argument("--out", help="output path (default under $ESM_STATE_DIR)")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esm", description="Latency surrogate toolkit: sample, measure, train, evaluate, extend."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("space", help="space size, depth range, bins and encoding lengths")
    p.add_argument("spec_ref", help="preset name or spec YAML path")
    p.add_argument("--n-bins", type=int, default=4)
    p.set_defaults(func=commands.cmd_space)

    p = sub.add_parser("sample", help="draw architectures")
    _common(p)
    p.add_argument("-n", type=int, help="number of architectures (default n_initial)")
    p.set_defaults(func=commands.cmd_sample)

    p = sub.add_parser("measure", help="measure an architecture file into a dataset")
    _common(p)
    p.add_argument("--archs", required=True)
    p.add_argument("--prefix", default="m00", help="batch id prefix")
    p.set_defaults(func=commands.cmd_measure)

    p = sub.add_parser("encode", help="store encodings in a dataset file")
    _common(p)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=commands.cmd_encode)

    p = sub.add_parser("train", help="train a predictor on a dataset split")
    _common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--test-out", help="write the held-out split here")
    p.set_defaults(func=commands.cmd_train)

    p = sub.add_parser("eval", help="evaluate a predictor on a dataset")
    _common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--evaluation", choices=list(STRATEGIES), default="bin_wise")
    p.add_argument("--acc-th", type=float, default=0.9)
    p.set_defaults(func=commands.cmd_eval)

    p = sub.add_parser("esm", help="run the train-evaluate-extend loop")
    _common(p)
    p.set_defaults(func=commands.cmd_esm)

    p = sub.add_parser("export-scatter", help="actual vs predicted table")
    _common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=commands.cmd_export_scatter)

    p = sub.add_parser("lut", help="build and score the lookup-table baseline")
    _common(p)
    p.add_argument("--calibration-size", type=int, default=DEFAULT_CALIBRATION_SIZE)
    p.set_defaults(func=commands.cmd_lut)

    p = sub.add_parser("compare", help="encodings vs LUT on one measured dataset")
    _common(p)
    p.add_argument("--n-train", type=int, default=8000)
    p.add_argument("--n-test", type=int, default=4000)
    p.add_argument("--seeds", type=int, nargs="*")
    p.set_defaults(func=commands.cmd_compare)

    p = sub.add_parser("serve", help="run the prediction API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=commands.cmd_serve)
    return parser


def error_prefix(exc: BaseException) -> str:
    for kind, prefix in ERROR_PREFIXES:
        if isinstance(exc, kind):
            return prefix
    return "error"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_arg_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    func: Callable[[argparse.Namespace], int] = args.func
    handled: List[Type[BaseException]] = [kind for kind, _ in ERROR_PREFIXES]
    try:
        return func(args)
    except tuple(handled) as exc:
        print(f"{error_prefix(exc)}: {exc}", file=sys.stderr)
        return commands.EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return commands.EXIT_ERROR
