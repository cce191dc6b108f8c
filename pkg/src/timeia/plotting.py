"""Figure rendering for the CLI report path (PNG, headless backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "savefig.dpi": 150,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def ccdf_figure(path, curves, title=None, log=False):
    """
    Plot CCDF curves of the sum DoF.

    Parameters
    ----------
    curves : dict
        Label -> ``(x, y, style)`` where `style` is a matplotlib format
        string ('-' for simulated, '--' for closed form).
    """
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, (x, y, style) in curves.items():
            ax.step(x, y, style, where="post", label=label)
        ax.set_xlabel(r"sum DoF $\phi$")
        ax.set_ylabel(r"$P(\Phi > \phi)$")
        if log:
            ax.set_yscale("log")
        else:
            ax.set_ylim(0, 1.02)
        if title:
            ax.set_title(title)
        ax.legend()
        _save(fig, path)


def sweep_figure(path, rho, series, title=None):
    """Plot ``P(phi > 1)`` against the duty cycle; `series` maps label -> (y, style)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, (y, style) in series.items():
            ax.plot(rho, y, style, label=label)
        ax.set_xlabel(r"duty cycle $\rho$")
        ax.set_ylabel(r"$P(\phi > 1)$")
        if title:
            ax.set_title(title)
        ax.legend()
        _save(fig, path)
