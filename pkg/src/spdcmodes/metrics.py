"""
Pair collection, singles, heralding efficiency and relative brightness.

All integrals run over the table's dimensionless detuning grid with a
monochromatic pump, so each is a 1-D quadrature of a spectral density.
Quadrature integrates the piecewise-linear interpolant of the density,
which on the full grid is the trapezoid rule.  A rectangular filter clips
that interpolant at its edges, so partially covered end cells contribute
the exact fraction of their area.
"""
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .overlap import DegenerateInputError

__all__ = [
    "FilterWindow",
    "EfficiencyReport",
    "EmptySupportError",
    "filter_weights",
    "pair_collection",
    "singles",
    "heralding",
    "relative_brightness",
    "efficiency_rows",
    "EFFICIENCY_COLUMNS",
]

EFFICIENCY_COLUMNS = ("xi_p", "xi_s", "phi_tilde", "filter_width",
                      "S2", "S1_s", "S1_i", "H_s", "H_i", "H", "B")


class EmptySupportError(ValueError):
    """The filter window does not overlap the spectral grid."""


@dataclass(frozen=True)
class FilterWindow:
    """Spectral filter in the grid's dimensionless unit.

    ``kind`` is ``"none"`` or ``"rect"``.  A rect window passes
    ``|omega - center| <= width / 2`` on both arms.
    """
    kind: str = "none"
    center: float = 0.0
    width: float = None

    def __post_init__(self):
        if self.kind not in ("none", "rect"):
            raise ValueError(f"unknown filter kind {self.kind!r}")
        if self.kind == "rect" and not (self.width is not None and self.width > 0):
            raise ValueError("rect filter width must be positive")

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def rect(cls, width, center=0.0):
        return cls("rect", float(center), float(width))

    @property
    def bounds(self):
        if self.kind == "none":
            return -np.inf, np.inf
        return self.center - 0.5 * self.width, self.center + 0.5 * self.width


def filter_weights(grid, window=None):
    """Quadrature weights of the piecewise-linear interpolant restricted to ``window``."""
    grid = np.asarray(grid, dtype=float)
    window = window or FilterWindow()
    lo, hi = window.bounds
    w = np.zeros_like(grid)
    if grid.size == 1:
        if lo <= grid[0] <= hi:
            raise DegenerateInputError("a single-node grid has no quadrature measure")
        raise EmptySupportError("filter window is disjoint from the spectral grid")
    x0, x1 = grid[:-1], grid[1:]
    h = x1 - x0
    a = np.clip(lo, x0, x1)
    b = np.clip(hi, x0, x1)
    # integrals of the two hat functions over [a, b] within each cell
    sa, sb = (a - x0) / h, (b - x0) / h
    right = 0.5 * h * (sb * sb - sa * sa)
    left = h * (sb - sa) - right
    np.add.at(w, np.arange(grid.size - 1), left)
    np.add.at(w, np.arange(1, grid.size), right)
    if not np.any(w > 0):
        raise EmptySupportError("filter window is disjoint from the spectral grid")
    return w


def _weights(table, window):
    if window is None or window.kind == "none":
        return table.grid_weights
    return filter_weights(table.omega, window)


def pair_collection(table, window=None):
    """S2: integral of P_00 over the (filtered) grid."""
    return float(np.sum(_weights(table, window) * table.density(0, 0)))


def singles(table, arm, window=None):
    """S1 of one arm: sum of P_{0,p} (signal) or P_{p,0} (idler) over partner modes."""
    w = _weights(table, window)
    dens = np.abs(table.amplitudes) ** 2
    if arm in ("signal", "s"):
        total = dens[0, :].sum(axis=0)
    elif arm in ("idler", "i"):
        total = dens[:, 0].sum(axis=0)
    else:
        raise ValueError(f"arm must be 'signal' or 'idler', got {arm!r}")
    return float(np.sum(w * total))


@dataclass(frozen=True)
class EfficiencyReport:
    S2: float
    S1_s: float
    S1_i: float
    H_s: float
    H_i: float
    H: float
    B: float = None

    def with_brightness(self, S2_max):
        from dataclasses import replace
        return replace(self, B=relative_brightness(self.S2, S2_max))


def efficiency_from_integrals(S2, S1_s, S1_i):
    if not (S1_s > 0 and S1_i > 0):
        raise DegenerateInputError("singles vanish; heralding efficiency undefined")
    if not S2 > 0:
        raise DegenerateInputError("pair collection vanishes")
    H_s = S2 / S1_i
    H_i = S2 / S1_s
    return EfficiencyReport(S2, S1_s, S1_i, H_s, H_i, sqrt(H_s * H_i))


def heralding(table, window=None, S2_max=None):
    """Efficiency report with H_s = S2/S1_i, H_i = S2/S1_s and H = sqrt(H_s H_i)."""
    rep = efficiency_from_integrals(pair_collection(table, window),
                                    singles(table, "signal", window),
                                    singles(table, "idler", window))
    return rep if S2_max is None else rep.with_brightness(S2_max)


def relative_brightness(S2, S2_max):
    if not S2 > 0:
        raise ValueError("S2 must be positive")
    if S2 > S2_max:
        raise ValueError("S2 exceeds S2_max; the maximum must come from the enclosing sweep")
    return S2 / S2_max


def efficiency_rows(items):
    """CSV rows ``(xi_p, xi_s, phi_tilde, filter_width, S2, ...)`` from (config, window, report)."""
    rows = []
    for cfg, window, rep in items:
        width = "" if window is None or window.kind == "none" else window.width
        rows.append((cfg.xi_p, cfg.xi_s, cfg.dispersion.phi_tilde, width, rep.S2, rep.S1_s,
                     rep.S1_i, rep.H_s, rep.H_i, rep.H, "" if rep.B is None else rep.B))
    return rows
