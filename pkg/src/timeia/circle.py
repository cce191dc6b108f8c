"""
Arcs on the unit circle and the uncovered-measure query.

Positions are normalized to one slot, so the circle has circumference 1.
Arcs are half-open, ``[start, start + length)`` taken modulo 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

# Endpoint merge tolerance; delay arithmetic rounds at ~1e-16.
EPS = 1e-12


@dataclass(frozen=True)
class Arc:
    """A half-open arc ``[start, start + length)`` on the unit circle."""

    start: float
    length: float

    def __post_init__(self):
        if not 0.0 <= self.start < 1.0:
            raise ValueError(f"arc start must lie in [0, 1), got {self.start!r}")
        if not 0.0 < self.length <= 1.0:
            raise ValueError(f"arc length must lie in (0, 1], got {self.length!r}")

    @property
    def wraps(self) -> bool:
        return self.start + self.length > 1.0


def contains(arc: Arc, x: float) -> bool:
    """Return True if position `x` lies inside `arc` (modular membership)."""
    if not 0.0 <= x < 1.0:
        raise ValueError(f"position must lie in [0, 1), got {x!r}")
    return (x - arc.start) % 1.0 < arc.length


def _clipped_pieces(offset, length, limit):
    # Blocker unrolled at `offset` from the desired start, clipped to [0, limit).
    pieces = []
    end = offset + length
    if offset < limit:
        pieces.append((offset, min(end, limit)))
    if end > 1.0:
        pieces.append((0.0, min(end - 1.0, limit)))
    return pieces


def uncovered_measure(desired: Arc, blockers: Iterable[Arc]) -> float:
    """
    Measure of the part of `desired` not covered by any blocker.

    The circle is unrolled at ``desired.start`` so the desired arc becomes
    ``[0, desired.length)``. Each blocker is clipped to that window and the
    resulting segments are merged with an exact endpoint sweep.

    Parameters
    ----------
    desired : Arc
        The arc whose free time is measured.
    blockers : iterable of Arc
        Interfering arcs. May be empty.

    Returns
    -------
    float
        Value in ``[0, desired.length]``.
    """
    limit = desired.length
    segments = []
    for b in blockers:
        offset = (b.start - desired.start) % 1.0
        if offset > 1.0 - EPS:
            # rounding pushed an aligned blocker to the far end
            offset = 0.0
        if b.length >= 1.0:
            return 0.0
        segments.extend(_clipped_pieces(offset, b.length, limit))
    if not segments:
        return limit

    segments.sort()
    covered = 0.0
    lo, hi = segments[0]
    for s, e in segments[1:]:
        if s > hi + EPS:
            covered += hi - lo
            lo, hi = s, e
        elif e > hi:
            hi = e
    covered += hi - lo
    return max(0.0, limit - covered)
