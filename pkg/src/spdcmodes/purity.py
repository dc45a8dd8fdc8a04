"""
Joint spectral amplitude of the fundamental mode pair under symmetric
group-velocity matching, and its spectral purity.

Detunings are dimensionless, x_j = D L W_j.  With 2/u_p = 1/u_s + 1/u_i the
linear mismatch depends only on the antidiagonal coordinate, so the
amplitude is the CW overlap C_00 evaluated along x_s - x_i times the pump
envelope along x_s + x_i (plus a small GVD correction).
"""
import warnings
from dataclasses import dataclass, field, replace
from math import log, sqrt

import numpy as np

from .overlap import _SliceEngine, longitudinal_phase
from .phase_match import MatchingType, MatchingTypeError, delta_k_sgvm

__all__ = [
    "PumpSpectrum",
    "JSAGrid",
    "PurityResult",
    "build_jsa",
    "schmidt_purity",
    "optimize_pump_bandwidth",
    "matched_bandwidth",
    "golden_section_max",
    "jsa_rows",
]

GOLDEN = (sqrt(5) - 1) / 2


@dataclass(frozen=True)
class PumpSpectrum:
    """Pump envelope exp(-(W_s + W_i)^2 / sigma_p^2); ``sigma_p`` in rad/s."""
    kind: str = "gaussian"
    sigma_p: float = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "monochromatic"):
            raise ValueError(f"unknown pump kind {self.kind!r}")
        if self.kind == "gaussian" and not (self.sigma_p is not None and self.sigma_p > 0):
            raise ValueError("gaussian pump needs sigma_p > 0")

    @classmethod
    def gaussian(cls, sigma_p):
        return cls("gaussian", float(sigma_p))

    def dimensionless_width(self, cfg):
        return self.sigma_p * abs(cfg.dispersion.D) * cfg.L

    @classmethod
    def from_dimensionless(cls, width, cfg):
        return cls.gaussian(width / (abs(cfg.dispersion.D) * cfg.L))


@dataclass(eq=False)
class JSAGrid:
    omega_s_grid: np.ndarray
    omega_i_grid: np.ndarray
    amplitude: np.ndarray  # [i_s, i_i]
    config_hash: str = ""
    pump: PumpSpectrum = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.amplitude)):
            raise ArithmeticError("non-finite JSA entries")
        if not np.linalg.norm(self.amplitude) > 0:
            raise ValueError("JSA has zero norm")


@dataclass(frozen=True)
class PurityResult:
    purity: float
    schmidt_coefficients: tuple
    sigma_p_used: float = None
    warning: str = None
    extra: dict = field(default_factory=dict)


def _require_sgvm(cfg):
    if cfg.matching_type is not MatchingType.SGVM:
        raise MatchingTypeError(f"purity needs an SGVM source, got {cfg.matching_type.value}")


def matched_bandwidth(cfg):
    """Dimensionless pump width matching a Gaussian phase-matching function.

    Without truncation or focusing the Gaussian-poled amplitude is
    exp(-(sigma/L)^2 (x_s - x_i)^2 / 8); the JSA is separable when the pump
    width along x_s + x_i equals sqrt(8) L / sigma.  Uniform poling uses the
    equivalent-rms sigma = L / sqrt(12).
    """
    sigma = cfg.poling.sigma if cfg.poling.kind == "gaussian" else cfg.L / sqrt(12)
    return sqrt(8) * cfg.L / sigma


def _cw_equivalent(cfg):
    # delta_k_sgvm(W, -W) == delta_k_cw(d', W) with D' = -D (signal/idler velocities swapped)
    d = cfg.dispersion
    d_cw = replace(d, matching_type=MatchingType.TYPE_II_CW, u_s=d.u_i, u_i=d.u_s)
    return replace(cfg, dispersion=d_cw)


def _psi_rotated(cfg, xs, xi):
    """Longitudinal phase from the CW phase along the antidiagonal plus diagonal terms."""
    d = cfg.dispersion
    DL = d.D * cfg.L
    xm = 0.5 * (xs - xi)   # antidiagonal coordinate, x_s = x_p/2 + xm
    xp = xs + xi
    # on the antidiagonal the CW phase of the D' model at axis value xm
    # reproduces both the linear term -xm/2 and the GVD term in xm^2
    psi = longitudinal_phase(_cw_equivalent(cfg), xm)
    psi = psi + cfg.L / 2 * (d.G * xp ** 2 / 4 + (d.G_s - d.G_i) * xp * xm / 2) / DL ** 2
    return psi


def _psi_direct(cfg, xs, xi):
    DL = cfg.dispersion.D * cfg.L
    return 0.5 * cfg.L * delta_k_sgvm(cfg.dispersion, xs / DL, xi / DL)


def default_window(cfg, pump_width, n_probe=2001):
    """Centre and half-width of a square (x_s, x_i) window.

    The phase-matching profile along the antidiagonal is probed on a coarse
    line and the window covers four standard widths of it, and four of the
    pump along the diagonal.
    """
    eng = _SliceEngine(cfg)
    lim = 8.0 * matched_bandwidth(cfg)
    line = np.linspace(-lim, lim, n_probe)
    dens = np.abs(eng.at_phase(_psi_rotated(cfg, line, -line))[0, 0]) ** 2
    w = dens / dens.sum()
    mean = float(w @ line)
    std = float(np.sqrt(w @ (line - mean) ** 2))
    # grid corners then reach |x_s + x_i| = 4 pump widths
    half = max(4 * std, 2 * pump_width)
    return mean, half


def build_jsa(cfg, pump, n_grid=128, window=None, method="rotation"):
    """(x_s, x_i) JSA of the (0, 0) mode pair.

    ``window`` is ``(center, half_width)`` in dimensionless x_s; the grid is
    centred on ``(center, -center)``.  ``method`` selects the rotated CW
    evaluation or the direct two-frequency mismatch (oracle).
    """
    _require_sgvm(cfg)
    if pump.kind != "gaussian":
        raise ValueError("build_jsa needs a Gaussian pump")
    width = pump.dimensionless_width(cfg)
    center, half = window if window is not None else default_window(cfg, width)
    xs = center + np.linspace(-half, half, n_grid)
    xi = -center + np.linspace(-half, half, n_grid)
    XS, XI = np.meshgrid(xs, xi, indexing="ij")
    if method == "rotation":
        psi = _psi_rotated(cfg, XS, XI)
    elif method == "direct":
        psi = _psi_direct(cfg, XS, XI)
    else:
        raise ValueError(f"unknown method {method!r}")
    c00 = _SliceEngine(cfg).at_phase(psi)[0, 0]
    amp = np.exp(-((XS + XI) / width) ** 2) * c00
    return JSAGrid(xs, xi, amp, cfg.config_hash(), pump)


def schmidt_purity(jsa, rank_cap=64):
    """Purity sum(lambda_k^2) from the singular values of the JSA matrix."""
    amp = jsa.amplitude if isinstance(jsa, JSAGrid) else np.asarray(jsa)
    hs = np.diff(jsa.omega_s_grid[:2]) if isinstance(jsa, JSAGrid) else [1.0]
    hi = np.diff(jsa.omega_i_grid[:2]) if isinstance(jsa, JSAGrid) else [1.0]
    try:
        s = np.linalg.svd(amp * sqrt(float(hs[0]) * float(hi[0])), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("singular value decomposition failed") from exc
    lam = s ** 2
    lam = lam / lam.sum()
    purity = float(np.sum(lam ** 2))
    return PurityResult(purity, tuple(float(v) for v in lam[:rank_cap]),
                        jsa.pump.sigma_p if isinstance(jsa, JSAGrid) and jsa.pump else None)


def golden_section_max(f, lo, hi, xtol):
    """Maximize ``f`` on ``[lo, hi]`` by golden-section search.

    Stops once the bracket is narrower than ``xtol``.  Returns
    ``(x_best, f_best, samples)``; ``samples`` maps every evaluated point,
    including both endpoints, to its value.
    """
    samples = {}

    def ev(x):
        if x not in samples:
            samples[x] = f(x)
        return samples[x]

    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    while b - a > xtol:
        if ev(c) >= ev(d):
            b, d = d, c
            c = b - GOLDEN * (b - a)
        else:
            a, c = c, d
            d = a + GOLDEN * (b - a)
    ev(lo), ev(hi), ev(0.5 * (a + b))
    x_best = max(sorted(samples), key=lambda x: samples[x])
    return x_best, samples[x_best], samples


def optimize_pump_bandwidth(cfg, n_grid=128, search_interval=None, rank_cap=64, rtol=0.01):
    """Pump bandwidth maximizing purity, by golden-section search in log(width).

    ``search_interval`` is a pair of dimensionless pump widths (D L sigma_p);
    the default spans two decades around :func:`matched_bandwidth`.  The
    search stops when the bracket is below ``rtol`` relative.  If an interior
    sample lies below both endpoint values, a non-unimodality warning is
    attached to the result.
    """
    _require_sgvm(cfg)
    if search_interval is None:
        m = matched_bandwidth(cfg)
        search_interval = (m / 10, m * 10)
    lo, hi = (log(v) for v in search_interval)
    center, half_pm = default_window(cfg, 0.0)
    cache = {}

    def purity_at(lw):
        width = float(np.exp(lw))
        pump = PumpSpectrum.from_dimensionless(width, cfg)
        jsa = build_jsa(cfg, pump, n_grid, (center, max(half_pm, 2 * width)))
        cache[lw] = schmidt_purity(jsa, rank_cap)
        return cache[lw].purity

    x_best, _, samples = golden_section_max(purity_at, lo, hi, log(1 + rtol))
    best = cache[x_best]
    warning = None
    ends = min(samples[lo], samples[hi])
    if any(v < ends for x, v in samples.items() if lo < x < hi):
        warning = "purity is not unimodal in the pump bandwidth over the search interval"
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    width = float(np.exp(x_best))
    return PurityResult(best.purity, best.schmidt_coefficients,
                        PumpSpectrum.from_dimensionless(width, cfg).sigma_p, warning,
                        {"dimensionless_width": width})


def jsa_rows(jsa):
    """Columnar (omega_s, omega_i, re, im) rows for export."""
    rows = []
    for a, xs in enumerate(jsa.omega_s_grid):
        for b, xi in enumerate(jsa.omega_i_grid):
            v = jsa.amplitude[a, b]
            rows.append((xs, xi, v.real, v.imag))
    return rows
