"""Parametric Poisson bootstrap for counting-statistics error bars.

Each measured rate is converted to a count per integration window, replaced
by a Poisson draw with that mean, converted back to a rate, and the analysis
is rerun.  Replica k draws from the k-th child of ``SeedSequence(seed)``, so
results are deterministic per seed and independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import singledispatch

import numpy as np

from .bell import ChshGrid, FreedmanDataset, VisibilityTable
from .tomography import TomographyDataset

__all__ = ["BootstrapStat", "poisson_resample", "resample_errors"]


@dataclass(frozen=True)
class BootstrapStat:
    mean: float
    std: float


def _jitter(rate: float, integration_s: float, rng) -> float:
    counts = rate * integration_s
    return float(rng.poisson(counts)) / integration_s


@singledispatch
def poisson_resample(dataset, rng):
    raise TypeError(f"no resampler registered for {type(dataset).__name__}")


@poisson_resample.register
def _(dataset: ChshGrid, rng) -> ChshGrid:
    t = dataset.integration_s
    rows = tuple(
        replace(
            r,
            singles_a=_jitter(r.singles_a, t, rng),
            singles_b=_jitter(r.singles_b, t, rng),
            rate=_jitter(r.rate, t, rng),
        )
        for r in dataset.rows
    )
    return replace(dataset, rows=rows)


@poisson_resample.register
def _(dataset: VisibilityTable, rng) -> VisibilityTable:
    t = dataset.integration_s
    rows = tuple(replace(r, rate=_jitter(r.rate, t, rng)) for r in dataset.rows)
    return replace(dataset, rows=rows)


@poisson_resample.register
def _(dataset: FreedmanDataset, rng) -> FreedmanDataset:
    t = dataset.integration_s
    rows = tuple(
        replace(
            r,
            singles_a=_jitter(r.singles_a, t, rng),
            singles_b=_jitter(r.singles_b, t, rng),
            rate=_jitter(r.rate, t, rng),
        )
        for r in dataset.rows
    )
    return replace(dataset, rows=rows, n0c=_jitter(dataset.n0c, t, rng))


@poisson_resample.register
def _(dataset: TomographyDataset, rng) -> TomographyDataset:
    t = dataset.integration_s
    records = tuple(
        replace(
            r,
            singles_a=_jitter(r.singles_a, t, rng),
            singles_b=_jitter(r.singles_b, t, rng),
            coincidences=_jitter(r.coincidences, t, rng),
        )
        for r in dataset.records
    )
    return replace(dataset, records=records)


def resample_errors(dataset, analysis, n_replicas: int, seed: int, poisson: bool = True):
    """Bootstrap mean and standard deviation of every metric of ``analysis``.

    ``analysis`` maps a dataset to a flat {name: value} mapping.  With
    ``poisson=False`` the replicas are the unperturbed dataset itself, which
    must give zero spread (a determinism check of the whole pipeline).
    """
    if n_replicas < 2:
        raise ValueError("need at least 2 replicas")
    seeds = np.random.SeedSequence(seed).spawn(n_replicas)
    values: dict[str, list[float]] = {}
    for k in range(n_replicas):
        if poisson:
            replica = poisson_resample(dataset, np.random.default_rng(seeds[k]))
        else:
            replica = dataset
        for name, value in analysis(replica).items():
            values.setdefault(name, []).append(float(value))
    return {
        name: BootstrapStat(mean=float(np.mean(v)), std=float(np.std(v, ddof=1)))
        for name, v in values.items()
    }
