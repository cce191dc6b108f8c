"""
Numerical convolution of mixed distributions.

Used as an independent check of the closed-form sum-DoF law: the law of
``alpha`` is convolved with itself numerically, handling point masses
exactly and integrating the continuous cross term with Gauss-Legendre
quadrature between breakpoints.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from .analytic import MixedDistribution, pdf_alpha, pdf_phi


class NumericMixed:
    """Point masses plus a density given as a vectorized callable."""

    def __init__(self, atoms, density, breakpoints):
        self.atoms = tuple(atoms)
        self.density = density
        self.breakpoints = np.asarray(sorted(breakpoints), dtype=float)

    @classmethod
    def from_mixed(cls, dist: MixedDistribution):
        return cls(dist.atoms, dist.density, dist.breakpoints)


def _merge_atoms(atoms, tol=1e-12):
    merged = []
    for loc, w in sorted(atoms):
        if merged and abs(loc - merged[-1][0]) <= tol:
            merged[-1] = (merged[-1][0], merged[-1][1] + w)
        else:
            merged.append((loc, w))
    return merged


def convolve(x: NumericMixed, y: NumericMixed, order=12) -> NumericMixed:
    """Law of the sum of independent variables distributed as `x` and `y`."""
    nodes, weights = leggauss(order)
    xb, yb = x.breakpoints, y.breakpoints
    lo_x, hi_x = xb[0], xb[-1]
    lo_y, hi_y = yb[0], yb[-1]

    def density(t):
        t = np.asarray(t, dtype=float)
        shape = t.shape
        t = t.reshape(-1)
        out = np.zeros_like(t)
        for loc, w in x.atoms:
            if w:
                out += w * y.density(t - loc)
        for loc, w in y.atoms:
            if w:
                out += w * x.density(t - loc)

        # cross term: integral over s of fx(s) * fy(t - s)
        lo = np.maximum(lo_x, t - hi_y)
        hi = np.minimum(hi_x, t - lo_y)
        cuts = np.concatenate([np.broadcast_to(xb, (len(t), len(xb))),
                               t[:, None] - yb[None, :]], axis=1)
        cuts = np.sort(np.clip(cuts, lo[:, None], hi[:, None]), axis=1)
        cuts = np.concatenate([lo[:, None], cuts, hi[:, None]], axis=1)
        a, b = cuts[:, :-1], cuts[:, 1:]
        half = np.where(b > a, 0.5 * (b - a), 0.0)
        s = (0.5 * (a + b))[..., None] + half[..., None] * nodes
        f = x.density(s) * y.density(t[:, None, None] - s)
        out += ((f * weights).sum(axis=-1) * half).sum(axis=-1)
        return out.reshape(shape)

    atoms = _merge_atoms([(lx + ly, wx * wy) for lx, wx in x.atoms for ly, wy in y.atoms])
    breaks = np.unique(np.add.outer(xb, yb).ravel())
    return NumericMixed(atoms, density, breaks)


def triple_convolution(rho) -> NumericMixed:
    """Numerical law of ``alpha_1 + alpha_2 + alpha_3``."""
    one = NumericMixed.from_mixed(pdf_alpha(rho))
    return convolve(convolve(one, one), one)


def closed_form_error(rho, step=1e-3, skip=1e-9):
    """
    Largest pointwise gap between the closed-form sum-DoF density and the
    numerical triple convolution, together with the largest atom gap.

    Grid points within `skip` of a piece boundary are left out, since the
    two sides of a jump are resolved by rounding there.
    """
    exact = pdf_phi(rho)
    numeric = triple_convolution(rho)
    grid = np.arange(1, int(np.floor(3 * float(rho) / step)) + 1) * step
    grid = grid[grid < exact.support[1]]
    near = np.min(np.abs(grid[:, None] - exact.breakpoints[None, :]), axis=1) <= skip
    grid = grid[~near]
    density_gap = float(np.max(np.abs(exact.density(grid) - numeric.density(grid))))
    atom_gap = max(abs(exact.atom_weight(loc, 1e-12) - w) for loc, w in numeric.atoms)
    return density_gap, atom_gap
