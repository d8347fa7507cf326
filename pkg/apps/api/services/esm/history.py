from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from services.common.util import atomic_write_json, atomic_write_text, utc_iso


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    dataset_size: int
    # cumulative backend readings for training data: references and re-measured batches count
    measured_samples: int
    bin_accuracies: Tuple[Optional[float], ...]
    overall_accuracy: float
    passed: bool
    wall_time_s: float
    train_seed: int
    allocation: Tuple[int, ...] = ()
    scatter: Tuple[Tuple[float, float, int], ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class EsmHistory:
    strategy: str
    acc_th: float
    evaluation: str
    records: Tuple[IterationRecord, ...] = ()

    @property
    def converged(self) -> bool:
        return bool(self.records) and self.records[-1].passed

    @property
    def status(self) -> str:
        return "converged" if self.converged else "not_converged"

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def measured_samples(self) -> int:
        return self.records[-1].measured_samples if self.records else 0


def history_to_dict(history: EsmHistory) -> Dict[str, Any]:
    return {
        "generated_at": utc_iso(),
        "status": history.status,
        "strategy": history.strategy,
        "evaluation": history.evaluation,
        "acc_th": history.acc_th,
        "iterations": [
            {k: v for k, v in asdict(r).items() if k != "scatter"} for r in history.records
        ],
    }


def write_history(history: EsmHistory, path: Path) -> None:
    atomic_write_json(Path(path), history_to_dict(history))


def scatter_table(
    rows: Sequence[Tuple[float, float, int]], *, iteration: Optional[int] = None
) -> List[List[Any]]:
    if iteration is None:
        return [[repr(a), repr(p), b] for a, p, b in rows]
    return [[iteration, repr(a), repr(p), b] for a, p, b in rows]


def write_scatter_rows(
    rows: Sequence[Tuple[float, float, int]], path: Path
) -> None:
    """Delimited (actual_ms, predicted_ms, bin) rows; floats keep full precision."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["actual_ms", "predicted_ms", "bin"])
    writer.writerows(scatter_table(rows))
    atomic_write_text(Path(path), buf.getvalue())


def write_history_scatter(history: EsmHistory, path: Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iteration", "actual_ms", "predicted_ms", "bin"])
    for record in history.records:
        writer.writerows(scatter_table(record.scatter, iteration=record.iteration))
    atomic_write_text(Path(path), buf.getvalue())


def read_scatter_rows(path: Path) -> List[Tuple[float, float, int]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            (float(row["actual_ms"]), float(row["predicted_ms"]), int(row["bin"]))
            for row in reader
        ]
