"""
Coordinated transmit delays for the 3-user channel.

The sum DoF is piecewise linear in the transmit delays, so the optimizer
scans a regular grid over ``(delta_2, delta_3)`` with ``delta_1`` pinned
(a common shift of all delays changes nothing), then polishes the best
grid point by coordinate descent on a finer lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .dof import (DofResult, NormalizedDelayMatrix, TransmitDelays, _mod1, as_rho,
                  batch_pair_dof)
from .montecarlo import EmpiricalDistribution, ExperimentConfig, map_trials, trial_uniforms

K = 3
FINE = 4096
TIE_TOL = 1e-12


@dataclass(frozen=True)
class AlignmentSolution:
    delta: TransmitDelays
    dof: DofResult
    grid: int
    fine: int
    sweeps: int
    evaluations: int
    history: tuple = field(default=(), repr=False)

    @property
    def phi(self) -> float:
        return self.dof.sum


def phi_with_delays(b, rho, delta) -> np.ndarray:
    """Sum DoF of `b` with column shifts `delta`, shape ``(..., K) -> (...)``."""
    b = np.asarray(b, dtype=float)
    delta = np.asarray(delta, dtype=float)
    total = 0.0
    for i in range(K):
        suffix, prefix = rho, 0.0
        for j in range(K):
            if j != i:
                u = np.mod(b[i, j] - b[i, i] + delta[..., j] - delta[..., i], 1.0)
                suffix = np.minimum(suffix, u)
                prefix = np.maximum(prefix, u + rho - 1.0)
        total = total + np.maximum(suffix - prefix, 0.0)
    return total


def _first_best(values):
    # lowest flat index among values tied with the maximum
    return int(np.flatnonzero(values >= values.max() - TIE_TOL)[0])


def optimize_delays(b, rho, grid=128, refine=16, *, fine=FINE, gauge=0.0) -> AlignmentSolution:
    """
    Maximize the sum DoF over transmit delays.

    Parameters
    ----------
    b : NormalizedDelayMatrix or array_like
        3 x 3 normalized propagation delays.
    rho : float
        Duty cycle.
    grid : int
        Points per axis of the coarse search over ``(delta_2, delta_3)``.
    refine : int
        Maximum number of coordinate-descent sweeps; 0 skips refinement.
    fine : int
        Lattice points per slot used during refinement.
    gauge : float
        Fixed value of ``delta_1``.

    Returns
    -------
    AlignmentSolution
        Best delays found. Among equal objective values the lexicographically
        smallest ``(delta_2, delta_3)`` of the coarse grid wins, and refinement
        only moves on strict improvement.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (K, K):
        raise ValueError(f"optimize_delays handles K=3 only, got shape {b.shape}")
    rho = as_rho(rho, K)
    if grid < 8:
        raise ValueError("grid resolution must be at least 8")

    axis = np.arange(grid) / grid
    d2, d3 = np.meshgrid(axis, axis, indexing="ij")
    cand = np.stack([np.full_like(d2, gauge), d2, d3], axis=-1).reshape(-1, K)
    values = phi_with_delays(b, rho, cand)
    k = _first_best(values)
    x = cand[k].copy()
    best = float(values[k])
    evaluations = values.size
    history = [best]

    # window of one coarse cell either side, on the fine lattice
    span = max(fine // grid, 1)
    steps = np.arange(-span, span + 1) / fine
    sweeps = 0
    while sweeps < refine:
        sweeps += 1
        moved = False
        for c in (1, 2):
            trial = np.repeat(x[None, :], steps.size, axis=0)
            trial[:, c] = _mod1(x[c] + steps)
            vals = phi_with_delays(b, rho, trial)
            evaluations += vals.size
            j = int(np.argmax(vals))
            if vals[j] > best + TIE_TOL:
                best = float(vals[j])
                x = trial[j]
                moved = True
            history.append(best)
        if not moved:
            break

    delta = TransmitDelays(x)
    d = NormalizedDelayMatrix(_mod1(b + x[None, :]))
    dof = DofResult(batch_pair_dof(d.entries, rho))
    return AlignmentSolution(delta, dof, grid, fine, sweeps, evaluations, tuple(history))


def _coordinated_phis(master_seed, rho, grid, refine, start, stop):
    u = trial_uniforms(master_seed, start, stop, K * K).reshape(-1, K, K)
    return np.array([optimize_delays(b, rho, grid, refine).phi for b in u])


def run_coordinated(config: ExperimentConfig, chunk=250) -> EmpiricalDistribution:
    """Optimized sum DoF over networks with i.i.d. uniform normalized delays."""
    if config.mode != "coordinated":
        raise ValueError(f"expected a coordinated config, got mode {config.mode!r}")
    func = partial(_coordinated_phis, config.master_seed, config.rho,
                   config.grid, config.refine)
    return EmpiricalDistribution(map_trials(func, config.trials, chunk, config.workers))
