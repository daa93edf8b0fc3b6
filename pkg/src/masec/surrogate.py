"""Linear surrogate of the Gamma quantile in its shape argument.

The outage constraint "1 - P(shape, scaled_thr) <= eps" inverts to
scaled_thr >= quantile(1 - outage level); for bisection on the secrecy
confidence eps we need that quantile as a tractable function of the shape.
For each eps on a uniform grid the map a -> quantile(eps, a) is fitted by
an ordinary least-squares line over a fixed shape window, and the
(slope, intercept) pairs are stored in a small table that can be persisted
as plain text and linearly interpolated between grid points.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .gammainc import inverse_lower_incomplete_gamma

FloatArray = NDArray[np.floating]

_FORMAT_TAG = "masec-surrogate-v1"

DEFAULT_TAU = 0.01
DEFAULT_FIT_RANGE = (1.0, 100.0)
DEFAULT_N_FIT_POINTS = 1000


@dataclass(frozen=True)
class LinearFitTable:
    """Per-eps linear models quantile(eps, a) ~ slope(eps) * a + intercept(eps).

    The grid starts at tau, not 0: at eps = 0 the quantile is identically
    zero, whose exact fit (0, 0) is handled as a virtual anchor by
    ``surrogate_lookup`` instead of a stored row, keeping every stored slope
    strictly positive.  Slopes and intercepts are nondecreasing in eps.
    """

    eps_grid: FloatArray
    slope: FloatArray
    intercept: FloatArray
    fit_lo: float
    fit_hi: float
    tau: float
    n_fit_points: int

    @property
    def max_eps(self) -> float:
        return float(self.eps_grid[-1])


def fit_linear_surrogate(
    tau: float = DEFAULT_TAU,
    fit_range: tuple[float, float] = DEFAULT_FIT_RANGE,
    n_fit_points: int = DEFAULT_N_FIT_POINTS,
) -> LinearFitTable:
    """Build the surrogate table on the eps grid {tau, 2 tau, ..., < 1}.

    Each row minimizes the mean squared residual of the line against the
    exact quantile evaluated at ``n_fit_points`` equally spaced shapes in
    ``fit_range``.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    lo, hi = fit_range
    if not 0.0 < lo < hi:
        raise ValueError("fit_range must be positive and increasing")
    if n_fit_points < 2:
        raise ValueError("need at least two fit points")

    steps = int(round(1.0 / tau)) - 1
    eps_grid = tau * np.arange(1, steps + 1)
    eps_grid = eps_grid[eps_grid < 1.0]
    a_grid = np.linspace(lo, hi, n_fit_points)

    slopes = np.empty(eps_grid.size)
    intercepts = np.empty(eps_grid.size)
    for j, eps in enumerate(eps_grid):
        target = inverse_lower_incomplete_gamma(float(eps), a_grid)
        slopes[j], intercepts[j] = np.polyfit(a_grid, target, 1)
    return LinearFitTable(
        eps_grid=eps_grid, slope=slopes, intercept=intercepts,
        fit_lo=float(lo), fit_hi=float(hi), tau=float(tau),
        n_fit_points=int(n_fit_points))


def surrogate_lookup(table: LinearFitTable, eps: float) -> tuple[float, float]:
    """(slope, intercept) at ``eps``, linearly interpolated on the grid.

    Supported domain is [0, max grid eps]; below the first grid point the
    interpolation anchors at the exact (0, 0) model for eps = 0.
    """
    if not 0.0 <= eps <= table.max_eps:
        raise ValueError(
            f"eps={eps!r} outside the table domain [0, {table.max_eps}]")
    xp = np.concatenate(([0.0], table.eps_grid))
    slope = float(np.interp(eps, xp, np.concatenate(([0.0], table.slope))))
    intercept = float(np.interp(eps, xp, np.concatenate(([0.0], table.intercept))))
    return slope, intercept


def save_table(table: LinearFitTable, path: str | Path) -> None:
    """Write the table as versioned plain text (header plus one row per eps)."""
    lines = [
        f"# {_FORMAT_TAG}",
        f"# fit_lo={table.fit_lo!r} fit_hi={table.fit_hi!r} "
        f"tau={table.tau!r} n_fit_points={table.n_fit_points}",
        "# eps slope intercept",
    ]
    for eps, s, r in zip(table.eps_grid, table.slope, table.intercept):
        lines.append(f"{float(eps)!r} {float(s)!r} {float(r)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_table(path: str | Path) -> LinearFitTable:
    """Parse a table written by :func:`save_table`; exact float round trip."""
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0] != f"# {_FORMAT_TAG}":
        raise ValueError(f"{path}: not a {_FORMAT_TAG} file")
    meta = dict(item.split("=") for item in text[1].lstrip("# ").split())
    rows = [line.split() for line in text[3:] if line.strip()]
    data = np.array([[float(v) for v in row] for row in rows])
    return LinearFitTable(
        eps_grid=data[:, 0], slope=data[:, 1], intercept=data[:, 2],
        fit_lo=float(meta["fit_lo"]), fit_hi=float(meta["fit_hi"]),
        tau=float(meta["tau"]), n_fit_points=int(meta["n_fit_points"]))


@functools.lru_cache(maxsize=1)
def default_table() -> LinearFitTable:
    """The package-default table, built once per process on first use."""
    return fit_linear_surrogate()
