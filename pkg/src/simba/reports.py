"""Report-file writers and readers for the command-line toolkit.

Tables are UTF-8 comma-delimited text; reals are rendered with 17 significant
digits so files round-trip losslessly and reruns are byte-identical. One JSON
manifest per run lists every artifact with the parameters that produced it.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .benchio import format_real
from .errors import ParseError, SchemaError
from .perfpredict import KFoldStability, MseCurve
from .relate import Relationship, RelationshipCensus
from .repset import CoverageCurve, SelectionTrace
from .simmeasure import Measure, SimilarityMatrix


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_real(value)
    return str(value)


def write_table(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_census(path: Path, census: RelationshipCensus, ids: tuple[str, ...]) -> None:
    """One record per pair: ids, class, and the best fit if any."""
    rows = []
    for (i, j), verdict in sorted(census.verdicts.items()):
        fit = verdict.best_fit
        rows.append(
            [
                census.axis,
                ids[i],
                ids[j],
                verdict.klass.value,
                fit.direction if fit else None,
                fit.slope if fit else None,
                fit.intercept if fit else None,
                fit.r_squared if fit else None,
                verdict.n_common,
            ]
        )
    write_table(
        path,
        ["axis", "id_a", "id_b", "class", "direction", "slope", "intercept", "r_squared", "n_common"],
        rows,
    )


def census_summary(census: RelationshipCensus) -> dict:
    total = census.total
    return {
        "axis": census.axis,
        "total": total,
        "counts": {k.value: census.counts[k] for k in Relationship},
        "percentages": {
            k.value: (100.0 * census.counts[k] / total if total else 0.0)
            for k in Relationship
        },
    }


def write_similarity(path: Path, sim: SimilarityMatrix) -> None:
    """Square matrix with a dataset-id header row and column."""
    rows = [
        [did, *[sim.values[i, j] for j in range(sim.n_datasets)]]
        for i, did in enumerate(sim.dataset_ids)
    ]
    write_table(path, ["dataset_id", *sim.dataset_ids], rows)


def read_similarity(path: Path, measure: Measure) -> SimilarityMatrix:
    """Load a similarity matrix previously written by write_similarity."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows or rows[0][:1] != ["dataset_id"]:
        raise SchemaError(f"{path}: similarity file must start with a dataset_id header")
    dataset_ids = tuple(rows[0][1:])
    if len(rows) - 1 != len(dataset_ids):
        raise SchemaError(f"{path}: similarity matrix must be square")
    values = np.empty((len(dataset_ids), len(dataset_ids)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 1 + len(dataset_ids) or row[0] != dataset_ids[i - 2]:
            raise SchemaError(f"{path}: row {i} does not match the header ids")
        for j, cell in enumerate(row[1:]):
            try:
                values[i - 2, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric similarity {cell!r}", row=i, column=dataset_ids[j]
                ) from None
    return SimilarityMatrix(measure=measure, dataset_ids=dataset_ids, values=values)


def write_trace(
    path: Path,
    trace: SelectionTrace,
    dataset_ids: tuple[str, ...],
    etas: tuple[float, ...] | None = None,
) -> None:
    """Ordered selection records: rank, dataset id, proxy coverage, coverage."""
    rows = []
    for rank, idx in enumerate(trace.order, start=1):
        delta = trace.deltas[rank - 1] if trace.deltas is not None else None
        eta = etas[rank - 1] if etas is not None else None
        rows.append([rank, dataset_ids[idx], delta, eta])
    write_table(path, ["rank", "dataset_id", "delta", "eta"], rows)


def write_curve(path: Path, etas) -> None:
    write_table(
        path, ["size", "eta"], [[k, float(e)] for k, e in enumerate(etas, start=1)]
    )


def write_mse_curve(path: Path, curve: MseCurve) -> None:
    write_table(
        path, ["size", "mse"], [[s, m] for s, m in zip(curve.sizes, curve.mses)]
    )


def write_prowl_summary(path: Path, rows: list[list]) -> None:
    write_table(path, ["system", "sc_auc", "s_star"], rows)


def write_vs_random(path: Path, rows: list[list]) -> None:
    write_table(path, ["system", "auc_proportion", "max2_proportion"], rows)


def write_pounce_summary(path: Path, rows: list[list]) -> None:
    write_table(path, ["regressor", "benchmark", "sigma", "auc_mse"], rows)


def write_kfold(path: Path, per_fold: dict[str, KFoldStability]) -> None:
    rows = []
    for kind, stability in per_fold.items():
        for fold, value in enumerate(stability.fold_aucs):
            rows.append([kind, fold, value])
    write_table(path, ["regressor", "fold", "auc_mse"], rows)


def write_kfold_summary(path: Path, per_fold: dict[str, KFoldStability]) -> None:
    rows = [
        [kind, len(st.fold_aucs), st.mean, st.std] for kind, st in per_fold.items()
    ]
    write_table(path, ["regressor", "folds", "mean_auc_mse", "std_auc_mse"], rows)


class Manifest:
    """Collects artifact records; written once at the end of a run."""

    def __init__(self, output_dir: Path):
        self.output_dir = output_dir
        self.entries: list[dict] = []

    def add(self, path: Path, kind: str, **params) -> Path:
        self.entries.append(
            {
                "path": str(path.relative_to(self.output_dir)),
                "kind": kind,
                "params": params,
            }
        )
        return path

    def write(self, config_payload: dict) -> None:
        write_json(
            self.output_dir / "manifest.json",
            {"config": config_payload, "artifacts": self.entries},
        )
