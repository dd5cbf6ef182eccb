"""Analytic cost oracle for one CCSD iteration.

The compute term follows the O²V⁴ contraction cost, divided over nodes and
degraded by a tile efficiency with an interior optimum; a log-of-nodes
communication term and a fixed overhead complete the model. It is a stand-in
for machine measurements, not a physical model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .data import DEFAULT_GRID, ConfigGrid, Dataset, ProblemSize, RunRecord


@dataclass(frozen=True)
class CostModelParams:
    c_flop: float = 3.0e-13
    t0: float = 30.0
    t1: float = 150.0
    c_comm: float = 1.0e-8
    c_fixed: float = 1.0
    noise_sigma: float = 0.03

    def __post_init__(self):
        for name in ("c_flop", "t0", "t1", "c_comm", "c_fixed", "noise_sigma"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite value ≥ 0, got {value}")
        if not self.t0 < self.t1:
            raise ValueError(f"t0 must be < t1, got t0={self.t0}, t1={self.t1}")

    def with_(self, **changes) -> "CostModelParams":
        return replace(self, **changes)


DEFAULT_PARAMS = CostModelParams()


# (O, V) problem sizes from the published shortest-time table.
TABLE3_PROBLEMS = tuple(ProblemSize(o, v) for o, v in (
    (44, 260), (81, 835), (85, 698), (99, 718), (99, 1021), (116, 575),
    (116, 840), (116, 1184), (134, 523), (134, 951), (134, 1200), (146, 278),
    (146, 591), (146, 1096), (146, 1568), (180, 720), (180, 1070), (196, 764),
    (204, 969), (235, 1007), (280, 1040), (345, 791),
))


def _check_inputs(o, v, nodes, tile) -> None:
    for name, value in (("o", o), ("v", v), ("nodes", nodes), ("tile", tile)):
        if np.any(np.asarray(value) < 1):
            raise ValueError(f"{name} must be ≥ 1")


def tile_efficiency(tile, params: CostModelParams = DEFAULT_PARAMS):
    """Fraction of peak contraction throughput reached at a given tile edge."""
    tile = np.asarray(tile, dtype=float)
    eff = 1.0 / (1.0 + params.t0 / tile + tile / params.t1)
    return float(eff) if eff.ndim == 0 else eff


def true_runtime(o, v, nodes, tile, params: CostModelParams = DEFAULT_PARAMS):
    """Noise-free seconds for one iteration; broadcasts over array inputs."""
    _check_inputs(o, v, nodes, tile)
    o = np.asarray(o, dtype=float)
    v = np.asarray(v, dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    compute = params.c_flop * o**2 * v**4 / (nodes * tile_efficiency(tile, params))
    comm = params.c_comm * o * v**2 * np.log2(nodes + 1.0)
    t = compute + comm + params.c_fixed
    return float(t) if t.ndim == 0 else t


def sample_runtime(o, v, nodes, tile, params: CostModelParams = DEFAULT_PARAMS,
                   seed: int | np.random.Generator = 0) -> float:
    """One lognormal draw around :func:`true_runtime`."""
    t = true_runtime(o, v, nodes, tile, params)
    if params.noise_sigma == 0:
        return t
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return float(t * math.exp(rng.normal(0.0, params.noise_sigma)))


def generate_dataset(problems: Sequence[ProblemSize] = TABLE3_PROBLEMS,
                     grid: ConfigGrid = DEFAULT_GRID,
                     n_per_cell: int = 1,
                     params: CostModelParams = DEFAULT_PARAMS,
                     seed: int = 42,
                     source_tag: str = "synthetic") -> Dataset:
    """Full factorial sample: every problem × grid cell, ``n_per_cell`` times.

    Each cell draws its noise from its own stream (``seed``, cell index), so
    the output does not depend on generation order.
    """
    if not problems:
        raise ValueError("problems must be nonempty")
    if n_per_cell < 1:
        raise ValueError("n_per_cell must be ≥ 1")
    problems = [p if isinstance(p, ProblemSize) else ProblemSize(*p) for p in problems]
    records = []
    cell = 0
    for p in problems:
        for nodes, tile in grid.cells():
            t = true_runtime(p.o, p.v, nodes, tile, params)
            if params.noise_sigma > 0:
                eps = np.random.default_rng((seed, cell)).normal(0.0, params.noise_sigma, n_per_cell)
                values = t * np.exp(eps)
            else:
                values = np.full(n_per_cell, t)
            # Stored at CSV precision so save/load round trips are exact.
            records.extend(RunRecord(p.o, p.v, nodes, tile, float(f"{x:.6f}")) for x in values)
            cell += 1
    return Dataset(tuple(records), source_tag)


def random_problems(n: int, seed: int, o_range=(44, 345), v_range=(260, 1568)) -> list[ProblemSize]:
    """Distinct (O, V) pairs drawn uniformly from the given inclusive ranges."""
    rng = np.random.default_rng(seed)
    seen: dict[tuple[int, int], None] = {}
    while len(seen) < n:
        o = int(rng.integers(o_range[0], o_range[1] + 1))
        v = int(rng.integers(v_range[0], v_range[1] + 1))
        seen.setdefault((o, v))
    return [ProblemSize(o, v) for o, v in seen]
