"""
Degrees of freedom of the K-user interference channel with time offsets.

Receiver ``i`` hears transmitter ``j`` through the normalized delay
``d[i, j]``; every transmitter is active for a fraction ``rho`` of each
slot. The DoF of pair ``i`` is the measure of its desired burst that no
interfering burst overlaps, and the sum DoF is the total over pairs.

Two evaluation paths are provided. :func:`pair_dof` and :func:`sum_dof`
go through the generic arc sweep in :mod:`timeia.circle`;
:func:`batch_sum_dof` is a vectorized closed form for equal-length arcs
used by the Monte Carlo engines.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .circle import Arc, uncovered_measure

RHO_TOL = 1e-12


@dataclass(frozen=True)
class DutyCycle:
    """
    Fraction of the slot during which each transmitter is active.

    Valid values satisfy ``1/k < rho <= 1/2``. With ``permissive=True`` the
    lower end ``rho == 1/k`` is admitted as well.
    """

    rho: float
    k: int = 3
    permissive: bool = False

    def __post_init__(self):
        lo = 1.0 / self.k
        ok_lo = self.rho >= lo - RHO_TOL if self.permissive else self.rho > lo + RHO_TOL
        if not (ok_lo and self.rho <= 0.5 + RHO_TOL):
            bound = "[" if self.permissive else "("
            raise ValueError(
                f"duty cycle must lie in {bound}1/{self.k}, 1/2], got {self.rho!r}")

    def __float__(self):
        return float(self.rho)


def as_rho(rho, k=3) -> float:
    """Validate `rho` permissively and return it as a float."""
    if isinstance(rho, DutyCycle):
        return float(rho)
    return float(DutyCycle(float(rho), k, permissive=True))


@dataclass(frozen=True)
class DelayMatrix:
    """
    Propagation delays in seconds, ``entries[i, j]`` from transmitter ``j``
    to receiver ``i``, together with the slot length ``slot``.
    """

    entries: np.ndarray
    slot: float

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise ValueError(f"delay matrix must be K x K with K >= 2, got shape {a.shape}")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise ValueError("delays must be strictly positive and finite")
        if not (np.isfinite(self.slot) and self.slot > 0):
            raise ValueError(f"slot length must be positive, got {self.slot!r}")
        if a.max() < 10 * self.slot:
            warnings.warn("delays are shorter than 10 slots; the long-delay regime "
                          "assumption is weak", RuntimeWarning, stacklevel=3)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def k(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class TransmitDelays:
    """Per-transmitter start offsets as fractions of the slot, in ``[0, 1)``."""

    delta: np.ndarray

    def __post_init__(self):
        d = np.array(self.delta, dtype=float).reshape(-1)
        if np.any(d < 0) or np.any(d >= 1):
            raise ValueError("transmit delays must lie in [0, 1)")
        d.setflags(write=False)
        object.__setattr__(self, "delta", d)

    @classmethod
    def zeros(cls, k):
        return cls(np.zeros(k))

    def __len__(self):
        return len(self.delta)


@dataclass(frozen=True)
class NormalizedDelayMatrix:
    """Delays reduced modulo the slot and divided by it; entries in ``[0, 1)``."""

    entries: np.ndarray

    def __post_init__(self):
        d = np.array(self.entries, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"normalized delay matrix must be square, got shape {d.shape}")
        if np.any(d < 0) or np.any(d >= 1):
            raise ValueError("normalized delays must lie in [0, 1)")
        d.setflags(write=False)
        object.__setattr__(self, "entries", d)

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def shift_columns(self, delta) -> "NormalizedDelayMatrix":
        """Add ``delta[j]`` modulo 1 to column ``j``."""
        return NormalizedDelayMatrix(_mod1(self.entries + np.asarray(delta)[None, :]))


@dataclass(frozen=True)
class DofResult:
    per_pair: np.ndarray
    sum: float = field(init=False)

    def __post_init__(self):
        p = np.array(self.per_pair, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "per_pair", p)
        object.__setattr__(self, "sum", float(p.sum()))


def _mod1(x):
    # x % 1.0 can round up to exactly 1.0 for tiny negative x
    y = np.mod(x, 1.0)
    return np.where(y >= 1.0, 0.0, y)


def normalize(a: DelayMatrix, delta: TransmitDelays | None = None) -> NormalizedDelayMatrix:
    """
    Reduce physical delays to slot fractions, ``d[i, j] = (a[i, j]/T + delta[j]) mod 1``.

    With ``delta`` omitted (or all zero) this returns the plain normalized
    propagation matrix.
    """
    if delta is None:
        delta = TransmitDelays.zeros(a.k)
    if len(delta) != a.k:
        raise ValueError(f"expected {a.k} transmit delays, got {len(delta)}")
    return NormalizedDelayMatrix(_mod1(a.entries / a.slot + delta.delta[None, :]))


def pair_dof(d, i: int, rho) -> float:
    """
    DoF of pair `i`: the interference-free measure of its desired burst.

    Parameters
    ----------
    d : NormalizedDelayMatrix or array_like
        K x K normalized delays.
    i : int
        Pair (receiver) index.
    rho : float or DutyCycle
        Duty cycle.
    """
    d = np.asarray(d, dtype=float)
    k = d.shape[0]
    if not 0 <= i < k:
        raise IndexError(f"pair index {i} out of range for K={k}")
    rho = as_rho(rho, k)
    desired = Arc(d[i, i], rho)
    blockers = [Arc(d[i, j], rho) for j in range(k) if j != i]
    return uncovered_measure(desired, blockers)


def sum_dof(d, rho) -> DofResult:
    """Per-pair DoF and their sum for one network realization."""
    d = np.asarray(d, dtype=float)
    return DofResult(np.array([pair_dof(d, i, rho) for i in range(d.shape[0])]))


def batch_pair_dof(d, rho: float) -> np.ndarray:
    """
    Vectorized per-pair DoF for a stack of normalized delay matrices.

    Within the window ``[0, rho)`` of a desired burst, an interfering burst
    of the same length can only cover a prefix ``[0, p)`` (its wrapped
    tail) and a suffix ``[s, rho)`` (its head), so the free time is
    ``max(0, min(s) - max(p))`` over the interferers.

    Parameters
    ----------
    d : ndarray, shape (..., K, K)
    rho : float

    Returns
    -------
    ndarray, shape (..., K)
    """
    d = np.asarray(d, dtype=float)
    k = d.shape[-1]
    out = np.empty(d.shape[:-1])
    for i in range(k):
        suffix, prefix = rho, 0.0
        for j in range(k):
            if j != i:
                # an offset of exactly 1.0 after rounding covers the window
                # fully, same as 0.0, so no wrap fix-up is needed
                u = np.mod(d[..., i, j] - d[..., i, i], 1.0)
                suffix = np.minimum(suffix, u)
                prefix = np.maximum(prefix, u + rho - 1.0)
        out[..., i] = np.maximum(suffix - prefix, 0.0)
    return out


def batch_sum_dof(d, rho: float) -> np.ndarray:
    """Sum DoF for a stack of matrices, shape ``(..., K, K) -> (...)``."""
    return batch_pair_dof(d, rho).sum(axis=-1)
