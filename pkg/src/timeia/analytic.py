"""
Closed-form DoF distributions for uncoordinated transmitters (K = 3).

With i.i.d. uniform normalized delays the per-pair DoF ``alpha`` has a
mixed law: point masses ``rho**2`` at 0 and ``(1 - 2 rho)**2`` at ``rho``
plus the density ``4 - 2 rho - 6 alpha`` on ``(0, rho)``. The sum DoF
``phi`` is the three-fold convolution of that law, which has four point
masses and a quintic density on each of ``(0, rho]``, ``(rho, 2 rho]``
and ``(2 rho, 3 rho]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy import optimize

from .dof import as_rho

MASS_TOL = 1e-9
RHO_MIN = 1.0 / 3.0
RHO_MAX = 0.5


@dataclass(frozen=True)
class Piece:
    """Polynomial density on the half-open interval ``(lo, hi]``."""

    lo: float
    hi: float
    poly: Polynomial

    @cached_property
    def antiderivative(self) -> Polynomial:
        return self.poly.integ()

    def mass(self, a=None, b=None):
        """Integral of the density over ``(a, b)`` clipped to the piece; vectorized."""
        a = self.lo if a is None else np.clip(a, self.lo, self.hi)
        b = self.hi if b is None else np.clip(b, self.lo, self.hi)
        b = np.maximum(a, b)
        out = self.antiderivative(b) - self.antiderivative(a)
        return float(out) if np.ndim(out) == 0 else out


class MixedDistribution:
    """
    Distribution made of point masses plus a piecewise-polynomial density.

    Parameters
    ----------
    atoms : sequence of (location, weight)
    pieces : sequence of Piece
        Non-overlapping pieces; each owns its right endpoint.
    """

    def __init__(self, atoms, pieces):
        self.atoms = tuple((float(loc), float(w)) for loc, w in atoms)
        self.pieces = tuple(pieces)
        if any(w < 0 for _, w in self.atoms):
            raise ValueError("atom weights must be non-negative")

    def __repr__(self):
        return f"MixedDistribution(atoms={self.atoms!r}, pieces={len(self.pieces)})"

    @property
    def support(self):
        locs = [loc for loc, _ in self.atoms]
        locs += [p.lo for p in self.pieces] + [p.hi for p in self.pieces]
        return min(locs), max(locs)

    @property
    def breakpoints(self):
        pts = {p.lo for p in self.pieces} | {p.hi for p in self.pieces}
        return np.array(sorted(pts))

    def density(self, x):
        """Continuous part of the law evaluated at `x` (atoms excluded)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for p in self.pieces:
            mask = (x > p.lo) & (x <= p.hi)
            out = np.where(mask, p.poly(x), out)
        return out

    def atom_weight(self, x, tol=0.0) -> float:
        return sum(w for loc, w in self.atoms if abs(loc - x) <= tol)

    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms) + sum(p.mass() for p in self.pieces)

    def mean(self) -> float:
        m = sum(loc * w for loc, w in self.atoms)
        for p in self.pieces:
            integ = (p.poly * Polynomial([0.0, 1.0])).integ()
            m += float(integ(p.hi) - integ(p.lo))
        return m

    def _atom_sum(self, x, keep):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for loc, w in self.atoms:
            total = total + np.where(keep(loc, x), w, 0.0)
        return total

    @staticmethod
    def _out(v):
        return float(v) if np.ndim(v) == 0 else v

    def cdf(self, x):
        """``P(X <= x)``; accepts scalars or arrays."""
        total = self._atom_sum(x, lambda loc, x: loc <= x)
        for p in self.pieces:
            total = total + p.mass(None, x)
        return self._out(total)

    def cdf_left(self, x):
        """``P(X < x)``."""
        return self._out(self.cdf(x) - self._atom_sum(x, lambda loc, x: loc == x))

    def ccdf(self, x):
        """``P(X > x)``, integrated exactly from ``x`` to the top of the support."""
        total = self._atom_sum(x, lambda loc, x: loc > x)
        for p in self.pieces:
            total = total + p.mass(x, None)
        return self._out(total)


def cdf_alpha(alpha, rho) -> float:
    """
    CDF of the per-pair DoF, ``F(alpha) = -3 alpha^2 - 2 alpha rho + 4 alpha + rho^2``.

    The point mass at ``alpha = rho`` closes the distribution, so the
    value jumps to 1 there.
    """
    rho = as_rho(rho)
    if not 0.0 <= alpha <= rho:
        raise ValueError(f"alpha must lie in [0, rho], got {alpha!r}")
    if alpha == rho:
        return 1.0
    return -3 * alpha**2 - 2 * alpha * rho + 4 * alpha + rho**2


@lru_cache(maxsize=256)
def pdf_alpha(rho) -> MixedDistribution:
    rho = as_rho(rho)
    return MixedDistribution(
        atoms=[(0.0, rho**2), (rho, (1 - 2 * rho) ** 2)],
        pieces=[Piece(0.0, rho, Polynomial([4 - 2 * rho, -6.0]))],
    )


# Density of phi on (0, rho], (rho, 2 rho], (2 rho, 3 rho]. Row k holds the
# coefficient of phi**k as a polynomial in rho, ascending powers.
F = Fraction
_PHI_PIECES = (
    (
        (0, 0, 0, 0, 12, -6),
        (0, 0, 48, -48, -6),
        (32, -48, -48, 32),
        (-48, 48, 6),
        (18, -9),
        (F(-9, 5),),
    ),
    (
        (0, -48, 96, 78, -198, F(303, 5)),
        (48, 96, -426, 240, 39),
        (-136, 78, 204, -118),
        (114, -96, -12),
        (-36, 18),
        (F(18, 5),),
    ),
    (
        (12, 78, -168, -42, 186, F(-273, 5)),
        (-66, -96, 378, -192, -33),
        (104, -30, -156, 86),
        (-66, 48, 6),
        (18, -9),
        (F(-9, 5),),
    ),
)
del F


def _phi_polynomial(table, rho):
    coef = [sum(float(c) * rho**n for n, c in enumerate(row)) for row in table]
    return Polynomial(coef)


@lru_cache(maxsize=256)
def pdf_phi(rho) -> MixedDistribution:
    """Law of the sum DoF for uncoordinated transmitters."""
    rho = as_rho(rho)
    a = rho**2
    b = 1 - 4 * rho + 4 * rho**2
    atoms = [(0.0, a**3), (rho, 3 * a**2 * b), (2 * rho, 3 * a * b**2), (3 * rho, b**3)]
    pieces = [Piece(n * rho, (n + 1) * rho, _phi_polynomial(t, rho))
              for n, t in enumerate(_PHI_PIECES)]
    return MixedDistribution(atoms, pieces)


def ccdf_phi(x, rho) -> float:
    """``P(phi > x)`` for uncoordinated transmitters."""
    if x < 0:
        raise ValueError(f"x must be non-negative, got {x!r}")
    return pdf_phi(as_rho(rho)).ccdf(x)


def prob_exceeds_one(rho) -> float:
    """Probability that the sum DoF beats orthogonal access, ``P(phi > 1)``."""
    return ccdf_phi(1.0, rho)


def find_rho_opt(step=1e-3, xtol=1e-5) -> float:
    """
    Duty cycle maximizing :func:`prob_exceeds_one` over ``[1/3, 1/2]``.

    A coarse scan picks the best grid point, then golden-section search
    refines inside the bracket formed by its neighbours.
    """
    grid = np.linspace(RHO_MIN, RHO_MAX, int(round((RHO_MAX - RHO_MIN) / step)) + 1)
    vals = np.array([prob_exceeds_one(r) for r in grid])
    k = int(np.argmax(vals))
    if k == 0 or k == len(grid) - 1:
        return float(grid[k])
    # golden's tol is relative to |x|
    x = optimize.golden(lambda r: -prob_exceeds_one(r),
                        brack=(grid[k - 1], grid[k], grid[k + 1]),
                        tol=xtol / (2 * grid[k]))
    return float(x)
