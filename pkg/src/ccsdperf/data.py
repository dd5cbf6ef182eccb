"""Run records: loading, validation, splitting, scaling and grouping."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

HEADER = ("O", "V", "nodes", "tile_size", "runtime_s")
FEATURE_NAMES = HEADER[:4]


class DataError(ValueError):
    """Raised for malformed or invalid run data."""


@dataclass(frozen=True)
class RunRecord:
    """One measured CCSD iteration."""

    o: int
    v: int
    nodes: int
    tile_size: int
    runtime_s: float

    def __post_init__(self):
        for name in ("o", "v", "nodes", "tile_size"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise DataError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise DataError(f"{name} must be ≥ 1, got {value}")
        r = float(self.runtime_s)
        if not math.isfinite(r) or r <= 0:
            raise DataError(f"runtime_s must be positive and finite, got {self.runtime_s!r}")

    @property
    def n_orbitals(self) -> int:
        return self.o + self.v

    @property
    def features(self) -> tuple[int, int, int, int]:
        return (self.o, self.v, self.nodes, self.tile_size)


@dataclass(frozen=True)
class Dataset:
    records: tuple[RunRecord, ...] = ()
    source_tag: str = ""

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, i: int) -> RunRecord:
        return self.records[i]

    def __iter__(self):
        return iter(self.records)

    @property
    def X(self) -> np.ndarray:
        """Feature matrix with columns (O, V, nodes, tile_size)."""
        if not self.records:
            return np.empty((0, 4), dtype=float)
        return np.array([r.features for r in self.records], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([r.runtime_s for r in self.records], dtype=float)

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(tuple(self.records[i] for i in indices), self.source_tag)

    def require_fittable(self) -> None:
        if not self.records:
            raise DataError("dataset is empty")

    @classmethod
    def from_arrays(cls, X, y, source_tag: str = "") -> "Dataset":
        X = np.asarray(X)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or X.shape[1] != 4 or len(X) != len(y):
            raise DataError("expected X of shape (n, 4) and y of shape (n,)")
        recs = []
        for row, t in zip(X, y):
            ints = []
            for value in row:
                if float(value) != int(value):
                    raise DataError(f"non-integer feature value {value!r}")
                ints.append(int(value))
            recs.append(RunRecord(*ints, float(t)))
        return cls(tuple(recs), source_tag)


def _parse_int(cell: str, row: int, col: str) -> int:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"row {row}, column {col}: non-numeric value {cell!r}") from None
    if not value.is_integer():
        raise DataError(f"row {row}, column {col}: expected an integer, got {cell!r}")
    return int(value)


def load_csv(path: str | Path, source_tag: str | None = None) -> Dataset:
    """Read a run-record CSV with header ``O,V,nodes,tile_size,runtime_s``.

    Rows are numbered from 2 in error messages (the header is row 1).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: missing header")
        header = [h.strip() for h in header]
        if tuple(header) != HEADER:
            raise DataError(f"{path}: expected header {','.join(HEADER)}, got {','.join(header)}")
        records = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(HEADER):
                raise DataError(f"row {lineno}: expected {len(HEADER)} columns, got {len(cells)}")
            cells = [c.strip() for c in cells]
            ints = [_parse_int(c, lineno, name) for c, name in zip(cells[:4], HEADER)]
            try:
                runtime = float(cells[4])
            except ValueError:
                raise DataError(f"row {lineno}, column runtime_s: non-numeric value {cells[4]!r}") from None
            try:
                records.append(RunRecord(*ints, runtime))
            except DataError as exc:
                raise DataError(f"row {lineno}: {exc}") from None
    return Dataset(tuple(records), source_tag if source_tag is not None else path.stem)


def format_runtime(value: float) -> str:
    text = f"{value:.6f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


def save_csv(dataset: Dataset, path: str | Path) -> None:
    """Write ``dataset`` in the canonical CSV layout (runtime with 6 decimals max)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for r in dataset.records:
            writer.writerow([r.o, r.v, r.nodes, r.tile_size, format_runtime(r.runtime_s)])


@dataclass(frozen=True)
class Split:
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]


def split(dataset: Dataset | int, test_fraction: float = 0.25, seed: int = 42) -> Split:
    """Seeded uniform shuffle split; the test side gets ``ceil(n * test_fraction)`` rows."""
    n = dataset if isinstance(dataset, int) else len(dataset)
    if not 0 < test_fraction < 1:
        raise DataError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if n < 2:
        raise DataError(f"need at least 2 records to split, got {n}")
    n_test = math.ceil(n * test_fraction)
    if n_test >= n:
        raise DataError(f"test_fraction {test_fraction} leaves no training rows for n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    test = tuple(sorted(int(i) for i in perm[:n_test]))
    train = tuple(sorted(int(i) for i in perm[n_test:]))
    return Split(train, test)


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray = field(repr=False)

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.mean):
            raise DataError(f"expected {len(self.mean)} feature columns")
        out = (X - self.mean) / self.std
        out[:, self.constant] = 0.0
        return out

    def inverse_transform(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=float)
        out = Z * self.std + self.mean
        out[:, self.constant] = self.mean[self.constant]
        return out

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "constant": self.constant.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        return cls(
            np.asarray(d["mean"], dtype=float),
            np.asarray(d["std"], dtype=float),
            np.asarray(d["constant"], dtype=bool),
        )


def fit_scaler(X) -> Scaler:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("cannot fit a scaler on an empty matrix")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = np.all(X == X[0], axis=0)
    std = np.where(constant, 1.0, std)
    return Scaler(mean, std, constant)


def apply_scaler(scaler: Scaler, X) -> np.ndarray:
    return scaler.transform(X)


def group_by_problem(dataset: Dataset | np.ndarray) -> dict[tuple[int, int], list[int]]:
    """Map each exact (O, V) pair to the indices of its records, in first-seen order."""
    if isinstance(dataset, Dataset):
        keys: Sequence = [(r.o, r.v) for r in dataset.records]
    else:
        X = np.asarray(dataset)
        keys = [(int(row[0]), int(row[1])) for row in X] if len(X) else []
    groups: dict[tuple[int, int], list[int]] = {}
    for i, key in enumerate(keys):
        groups.setdefault(key, []).append(i)
    return groups


@dataclass(frozen=True)
class ProblemSize:
    o: int
    v: int

    def __post_init__(self):
        if self.o < 1 or self.v < 1:
            raise ValueError(f"O and V must be ≥ 1, got ({self.o}, {self.v})")


@dataclass(frozen=True)
class ConfigGrid:
    node_candidates: tuple[int, ...]
    tile_candidates: tuple[int, ...]

    def __post_init__(self):
        nodes = tuple(int(n) for n in self.node_candidates)
        tiles = tuple(int(t) for t in self.tile_candidates)
        for name, values in (("node_candidates", nodes), ("tile_candidates", tiles)):
            if not values:
                raise ValueError(f"{name} must be nonempty")
            if values[0] < 1:
                raise ValueError(f"{name} must be ≥ 1")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        object.__setattr__(self, "node_candidates", nodes)
        object.__setattr__(self, "tile_candidates", tiles)

    def __len__(self) -> int:
        return len(self.node_candidates) * len(self.tile_candidates)

    def cells(self) -> list[tuple[int, int]]:
        """All (nodes, tile) pairs, nodes outer and tiles inner."""
        return [(n, t) for n in self.node_candidates for t in self.tile_candidates]


# Union of node counts and tile sizes appearing in the published optimum tables.
DEFAULT_GRID = ConfigGrid(
    (5, 10, 15, 20, 25, 30, 35, 45, 50, 65, 70, 75, 90, 95, 110, 120, 185, 200,
     220, 240, 260, 300, 320, 350, 400, 600, 700, 800, 900),
    (40, 60, 70, 73, 80, 90, 100, 110, 120, 130, 140, 150, 160, 180),
)
