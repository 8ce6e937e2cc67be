"""Training rows, the 40/40/20 split, min-max scaling and dataset CSV I/O."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import moments as mc
from .errors import DegenerateColumn, FormatError, TooFewRows
from .moments import GarchParams
from .params import FeatureSetKind

CSV_HEADER = ["alpha0", "alpha1", "beta1", "f1", "f2", "f3", "kind"]
SPLIT_FRACTIONS = (0.4, 0.4, 0.2)


@dataclass(frozen=True)
class FeatureVector:
    features: tuple[float, float, float]
    target_alpha1: float
    source_params: GarchParams
    kind: FeatureSetKind


@dataclass
class DatasetSplit:
    train: list
    test: list
    validate: list


def features_for(p: GarchParams, kind: FeatureSetKind) -> tuple[float, float, float]:
    f1 = mc.second_moment(p)
    f2 = mc.gamma4_closed(p.alpha1, p.beta1)
    if kind.is_autocov:
        f3 = mc.autocov_hat(p.alpha1, p.beta1, kind.lag)
    elif kind.order == 3:
        f3 = mc.gamma6_closed(p.alpha1, p.beta1)
    else:
        f3 = mc.standardized_moment(p, kind.order)
    return (f1, f2, f3)


def build_rows(params: Sequence[GarchParams], kind: FeatureSetKind) -> list[FeatureVector]:
    return [FeatureVector(features_for(p, kind), p.alpha1, p, kind) for p in params]


def split_sizes(n: int) -> tuple[int, int, int]:
    """Largest-remainder apportionment of n rows to 40/40/20; ties go to train."""
    quotas = [n * f for f in SPLIT_FRACTIONS]
    sizes = [int(q) for q in quotas]
    short = n - sum(sizes)
    # stable sort keeps train before test before validate on equal remainders
    order = sorted(range(3), key=lambda i: -(quotas[i] - sizes[i]))
    for i in order[:short]:
        sizes[i] += 1
    return tuple(sizes)


def split_40_40_20(rows: Sequence, seed: int) -> DatasetSplit:
    if len(rows) < 5:
        raise TooFewRows(f"need at least 5 rows to split, got {len(rows)}")
    n_train, n_test, _ = split_sizes(len(rows))
    perm = np.random.default_rng(seed).permutation(len(rows))
    shuffled = [rows[i] for i in perm]
    return DatasetSplit(
        train=shuffled[:n_train],
        test=shuffled[n_train : n_train + n_test],
        validate=shuffled[n_train + n_test :],
    )


def rows_to_arrays(rows: Sequence[FeatureVector]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([r.features for r in rows], dtype=np.float64).reshape(-1, 3)
    y = np.array([r.target_alpha1 for r in rows], dtype=np.float64)
    return x, y


@dataclass(frozen=True)
class ScalerParams:
    feature_min: tuple[float, ...]
    feature_max: tuple[float, ...]
    target_min: float
    target_max: float

    def to_dict(self) -> dict:
        return {
            "feature_min": list(self.feature_min),
            "feature_max": list(self.feature_max),
            "target_min": self.target_min,
            "target_max": self.target_max,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerParams":
        try:
            s = cls(
                tuple(float(v) for v in d["feature_min"]),
                tuple(float(v) for v in d["feature_max"]),
                float(d["target_min"]),
                float(d["target_max"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad scaler record ({exc})", "scaler") from exc
        if len(s.feature_min) != len(s.feature_max):
            raise FormatError("feature_min / feature_max lengths differ", "scaler")
        return s


def fit_scaler(train_rows) -> ScalerParams:
    """Column-wise min/max of the training rows (features and target).

    Accepts FeatureVector rows or a ``(features, targets)`` array pair.
    """
    if isinstance(train_rows, tuple):
        x, y = (np.asarray(a, dtype=np.float64) for a in train_rows)
    else:
        x, y = rows_to_arrays(train_rows)
    if len(y) < 2:
        raise TooFewRows("scaler needs at least 2 training rows")
    fmin, fmax = x.min(axis=0), x.max(axis=0)
    for j, (lo, hi) in enumerate(zip(fmin, fmax)):
        if not hi > lo:
            raise DegenerateColumn(f"feature column f{j + 1} is constant ({lo!r})")
    if not y.max() > y.min():
        raise DegenerateColumn(f"target column is constant ({y.min()!r})")
    return ScalerParams(tuple(map(float, fmin)), tuple(map(float, fmax)), float(y.min()), float(y.max()))


def apply_scaler(s: ScalerParams, features):
    lo = np.asarray(s.feature_min)
    return (np.asarray(features, dtype=np.float64) - lo) / (np.asarray(s.feature_max) - lo)


def invert_scaler(s: ScalerParams, scaled):
    lo = np.asarray(s.feature_min)
    return np.asarray(scaled, dtype=np.float64) * (np.asarray(s.feature_max) - lo) + lo


def scale_target(s: ScalerParams, y):
    return (np.asarray(y, dtype=np.float64) - s.target_min) / (s.target_max - s.target_min)


def unscale_target(s: ScalerParams, y_scaled):
    return np.asarray(y_scaled, dtype=np.float64) * (s.target_max - s.target_min) + s.target_min


# -- CSV ---------------------------------------------------------------------


def _g17(v: float) -> str:
    return format(v, ".17g")


def write_dataset_csv(path, rows: Sequence[FeatureVector], provenance: dict | None = None) -> None:
    """Write rows with the fixed header; an optional ``# {json}`` provenance line comes first."""
    with open(path, "w", newline="") as fh:
        if provenance is not None:
            fh.write("# " + json.dumps(provenance, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            p = r.source_params
            w.writerow([_g17(p.alpha0), _g17(p.alpha1), _g17(p.beta1), *map(_g17, r.features), str(r.kind)])


def read_dataset_csv(path) -> list[FeatureVector]:
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    except OSError as exc:
        raise FormatError(f"cannot read dataset ({exc})", str(path)) from exc
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise FormatError(f"expected header {','.join(CSV_HEADER)}, got {header}", f"{path.name}:header")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(CSV_HEADER):
            raise FormatError(f"expected {len(CSV_HEADER)} fields, got {len(rec)}", f"{path.name}:{lineno}")
        try:
            a0, a1, b1, f1, f2, f3 = (float(v) for v in rec[:6])
            kind = FeatureSetKind.parse(rec[6])
            p = GarchParams(a0, a1, b1)
        except (ValueError, ArithmeticError) as exc:
            raise FormatError(str(exc), f"{path.name}:{lineno}") from exc
        rows.append(FeatureVector((f1, f2, f3), a1, p, kind))
    if not rows:
        raise FormatError("dataset has no rows", path.name)
    kinds = {r.kind for r in rows}
    if len(kinds) > 1:
        raise FormatError(f"mixed feature-set kinds {sorted(map(str, kinds))}", f"{path.name}:kind")
    return rows
