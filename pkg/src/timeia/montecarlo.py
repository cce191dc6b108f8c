"""
Seeded Monte Carlo engine.

Every trial owns a fixed window of a counter-based Philox stream keyed by
the master seed: trial ``t`` reads the counters ``[4 t, 4 t + 4)``, i.e.
its first 16 raw 64-bit draws. A chunk of consecutive trials is therefore
one contiguous read, and results do not depend on how trials are split
across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable

import numpy as np

from .dof import NormalizedDelayMatrix, as_rho, batch_pair_dof

BLOCKS_PER_TRIAL = 4
DRAWS_PER_TRIAL = 4 * BLOCKS_PER_TRIAL
ATOM_SNAP = 1e-9

MODES = ("uncoordinated", "coordinated", "satellite")


@dataclass
class ExperimentConfig:
    master_seed: int = 1
    trials: int = 10**6
    rho: float = 0.5
    mode: str = "uncoordinated"
    grid: int = 128
    refine: int = 16
    workers: int = 1
    scenario: Any = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.grid < 8:
            raise ValueError("grid resolution must be at least 8")
        if self.refine < 0:
            raise ValueError("refine must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        self.rho = as_rho(self.rho)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Generator positioned at the start of `trial`'s stream (16 draws budget)."""
    return np.random.Generator(
        np.random.Philox(key=master_seed, counter=trial * BLOCKS_PER_TRIAL))


def trial_uniforms(master_seed: int, start: int, stop: int, n: int) -> np.ndarray:
    """
    First `n` uniform draws of each trial in ``[start, stop)``.

    Row ``t - start`` equals ``trial_rng(master_seed, t).random(n)``.
    """
    if n > DRAWS_PER_TRIAL:
        raise ValueError(f"a trial may use at most {DRAWS_PER_TRIAL} draws")
    bitgen = np.random.Philox(key=master_seed, counter=start * BLOCKS_PER_TRIAL)
    raw = bitgen.random_raw((stop - start) * DRAWS_PER_TRIAL)
    raw = raw.reshape(stop - start, DRAWS_PER_TRIAL)[:, :n]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def sample_uncoordinated(rng: np.random.Generator, k: int = 3) -> NormalizedDelayMatrix:
    """I.i.d. uniform normalized delay matrix, drawn in row-major order."""
    return NormalizedDelayMatrix(rng.random(k * k).reshape(k, k))


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample of sum-DoF values."""

    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float).reshape(-1))
        if s.size < 1:
            raise ValueError("an empirical distribution needs at least one sample")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def count(self) -> int:
        return self.samples.size

    def ccdf_at(self, x) -> float:
        return ccdf_at(self, x)

    def percentile(self, q) -> float:
        return percentile(self, q)

    def mean(self) -> float:
        return float(self.samples.mean())


def ccdf_at(dist: EmpiricalDistribution, x) -> float:
    """Fraction of samples strictly greater than `x`."""
    n_le = np.searchsorted(dist.samples, x, side="right")
    return float(dist.count - n_le) / dist.count


def percentile(dist: EmpiricalDistribution, q) -> float:
    """Lower empirical quantile: the smallest sample whose rank/count reaches `q`."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q!r}")
    k = max(math.ceil(q * dist.count - 1e-9), 1)
    return float(dist.samples[k - 1])


def snap_to_atoms(samples, locations, tol=ATOM_SNAP):
    """Replace samples within `tol` of an atom location by that location."""
    out = np.array(samples, dtype=float)
    for loc in locations:
        out[np.abs(out - loc) <= tol] = loc
    return out


def ks_distance(dist: EmpiricalDistribution, law) -> float:
    """
    Kolmogorov-Smirnov distance between an empirical sample and a mixed law.

    Samples are snapped onto the law's atoms first, so rounding noise in
    the DoF sums does not split an atom. Both one-sided limits are compared
    at every distinct sample value.
    """
    x = snap_to_atoms(dist.samples, [loc for loc, _ in law.atoms])
    values, counts = np.unique(x, return_counts=True)
    right = np.cumsum(counts) / x.size
    left = right - counts / x.size
    f_right = law.cdf(values)
    f_left = law.cdf_left(values)
    return float(max(np.max(np.abs(right - f_right)), np.max(np.abs(left - f_left))))


def chunk_bounds(trials: int, chunk: int):
    return [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]


def map_trials(func: Callable[[int, int], np.ndarray], trials: int, chunk: int,
               workers: int = 1) -> np.ndarray:
    """
    Evaluate ``func(start, stop)`` over fixed trial chunks and concatenate.

    Chunk boundaries depend only on `trials` and `chunk`, never on
    `workers`, so the output is identical for any worker count.
    """
    bounds = chunk_bounds(trials, chunk)
    if workers <= 1 or len(bounds) == 1:
        parts = [func(s, e) for s, e in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(func, *zip(*bounds)))
    return np.concatenate(parts)


def _uncoordinated_alphas(master_seed, rho, start, stop):
    u = trial_uniforms(master_seed, start, stop, 9).reshape(-1, 3, 3)
    return batch_pair_dof(u, rho)


def _uncoordinated_phis(master_seed, rho, start, stop):
    return _uncoordinated_alphas(master_seed, rho, start, stop).sum(axis=1)


def sample_alphas(config: ExperimentConfig, chunk=1 << 16) -> np.ndarray:
    """Per-pair DoF of every uncoordinated trial, shape ``(trials, 3)``."""
    func = partial(_uncoordinated_alphas, config.master_seed, config.rho)
    return map_trials(func, config.trials, chunk, config.workers)


def run_uncoordinated(config: ExperimentConfig, chunk=1 << 16) -> EmpiricalDistribution:
    """Sum DoF over `config.trials` networks with i.i.d. uniform delays."""
    if config.mode != "uncoordinated":
        raise ValueError(f"expected an uncoordinated config, got mode {config.mode!r}")
    func = partial(_uncoordinated_phis, config.master_seed, config.rho)
    return EmpiricalDistribution(map_trials(func, config.trials, chunk, config.workers))
