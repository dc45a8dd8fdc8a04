"""
Frequency-resolved LG overlap amplitudes C_{p_s,p_i}(W) for a Gaussian pump.

Coordinates
-----------
Transverse momenta are measured in units of ``tau = sqrt(L_eff / k_p)`` and the
longitudinal coordinate as ``z = t L / 2`` with ``t`` in [-1, 1].  In these
units the waists are ``W_j**2 = 1 / (kappa_j xi_j)`` with ``kappa_j = k_j / k_p``,
and the transverse Fresnel phase at slice ``t`` only rescales the Gaussian
widths:

    A_p = W_p^2/4 (1 + i r xi_p t),   A_{s,i} = W^2/4 (1 - i r xi t),   r = L / L_eff.

The frequency dependence enters through a single longitudinal phase
``psi = dk_long L / 2`` multiplying ``t``.  Physical amplitudes are
``C = (L / (2 tau)) * C_scaled``; the global constant of the biphoton state is
never fixed, so only ratios of these numbers are meaningful.
"""
import hashlib
import json
from dataclasses import dataclass, field
from math import ceil, factorial, pi, sqrt

import numpy as np
from scipy import integrate

from .lg_modes import t_coefficients
from .phase_match import (DispersionModel, MatchingType, PolingProfile,
                          longitudinal_amplitude)

__all__ = [
    "SourceConfig",
    "ModeAmplitudeTable",
    "QuadratureError",
    "DegenerateInputError",
    "longitudinal_phase",
    "spectral_amplitude",
    "amplitudes_at_phase",
    "build_table",
    "normalized_overlap",
    "uniform_grid",
    "TYPE_II_GRID",
    "TYPE_0_GRID",
    "TYPE_0_AXIS_SCALE",
    "trapezoid_weights",
]

# (start, stop, step) of the dimensionless detuning axis, D W L or pi sqrt(G L) W
TYPE_II_GRID = (-406.12, 59.14, 1.6)
TYPE_0_GRID = (-41.157, 35.065, 0.518)

# type-0 axis unit: y = TYPE_0_AXIS_SCALE * sqrt(|G| L) W, so that
# dk_long L / 2 = phi~ + sign(G) y^2 / (2 TYPE_0_AXIS_SCALE^2)
TYPE_0_AXIS_SCALE = pi


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed; carries the last estimate and error bound."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DegenerateInputError(ValueError):
    pass


def uniform_grid(start, stop, step):
    """Uniform grid from ``start`` to at most ``stop`` (inclusive within 1e-9 step)."""
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


@dataclass(frozen=True, eq=False)
class SourceConfig:
    """Everything needed to evaluate the overlap amplitudes of one source.

    ``omega_grid`` holds dimensionless detunings: ``D W_s L`` (signal
    detuning) for type-II and SGVM sources, ``pi sqrt(|G| L) W`` for
    degenerate type-0 (see ``TYPE_0_AXIS_SCALE``).  With this sign, focusing shifts type-II spectra to negative
    detuning.
    """
    dispersion: DispersionModel
    poling: PolingProfile
    xi_p: float
    xi_s: float
    xi_i: float
    lambda_p: float
    lambda_s: float
    lambda_i: float
    n_p: float
    n_s: float
    n_i: float
    omega_grid: np.ndarray = field(default_factory=lambda: uniform_grid(*TYPE_II_GRID))
    p_max: int = 4
    z_nodes: int = None

    def __post_init__(self):
        for name in ("xi_p", "xi_s", "xi_i", "lambda_p", "lambda_s", "lambda_i",
                     "n_p", "n_s", "n_i"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        inv = 1 / self.lambda_p
        if abs(inv - 1 / self.lambda_s - 1 / self.lambda_i) > 1e-9 * inv:
            raise ValueError("energy conservation 1/lambda_p = 1/lambda_s + 1/lambda_i violated")
        if int(self.p_max) != self.p_max or self.p_max < 0:
            raise ValueError("p_max must be a nonnegative integer")
        grid = np.asarray(self.omega_grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ValueError("omega_grid must be a nonempty increasing 1-D array")
        object.__setattr__(self, "omega_grid", grid)
        d = self.dispersion
        for k_name, n, lam in (("k0_p", self.n_p, self.lambda_p),
                               ("k0_s", self.n_s, self.lambda_s),
                               ("k0_i", self.n_i, self.lambda_i)):
            k = 2 * pi * n / lam
            if abs(getattr(d, k_name) - k) > 1e-9 * k:
                raise ValueError(f"dispersion.{k_name} inconsistent with n/lambda")
        if abs(d.length - self.poling.L) > 1e-12 * self.poling.L:
            raise ValueError("dispersion.length must equal the crystal length")

    # --- derived quantities -------------------------------------------------
    @property
    def k_p(self):
        return 2 * pi * self.n_p / self.lambda_p

    @property
    def k_s(self):
        return 2 * pi * self.n_s / self.lambda_s

    @property
    def k_i(self):
        return 2 * pi * self.n_i / self.lambda_i

    @property
    def matching_type(self):
        return self.dispersion.matching_type

    @property
    def L(self):
        return self.poling.L

    @property
    def L_eff(self):
        return self.poling.effective_length

    @property
    def tau(self):
        """Transverse length unit sqrt(L_eff / k_p) in meters."""
        return sqrt(self.L_eff / self.k_p)

    def waists(self):
        """Physical waists (w_p, w_s, w_i) from w = sqrt(L_eff / (k xi))."""
        return tuple(sqrt(self.L_eff / (k * xi)) for k, xi in
                     ((self.k_p, self.xi_p), (self.k_s, self.xi_s), (self.k_i, self.xi_i)))

    def omega_scale(self):
        """Physical detuning (rad/s) per unit of the dimensionless grid."""
        d = self.dispersion
        if self.matching_type is MatchingType.TYPE_0_DEGENERATE_CW:
            return 1.0 / (TYPE_0_AXIS_SCALE * sqrt(abs(d.G) * self.L))
        return 1.0 / abs(d.D * self.L)

    def with_(self, **changes):
        from dataclasses import replace
        if "phi_tilde" in changes:
            changes["dispersion"] = self.dispersion.with_phi_tilde(changes.pop("phi_tilde"))
        return replace(self, **changes)

    def n_z_nodes(self):
        if self.z_nodes is not None:
            return int(self.z_nodes)
        psi = longitudinal_phase(self, self.omega_grid)
        xi_max = max(self.xi_p, self.xi_s, self.xi_i) * self.L / self.L_eff
        return default_z_nodes(xi_max, float(np.max(np.abs(psi))))

    def canonical(self):
        d = self.dispersion
        return {
            "matching_type": d.matching_type.value,
            "phi_tilde": d.phi_tilde,
            "D": d.D, "G_s": d.G_s, "G_i": d.G_i,
            "u": [d.u_p, d.u_s, d.u_i],
            "poling": {"kind": self.poling.kind, "L": self.poling.L, "sigma": self.poling.sigma},
            "xi": [self.xi_p, self.xi_s, self.xi_i],
            "lambda": [self.lambda_p, self.lambda_s, self.lambda_i],
            "n": [self.n_p, self.n_s, self.n_i],
            "omega_grid": [float(self.omega_grid[0]), float(self.omega_grid[-1]),
                           int(self.omega_grid.size)],
            "p_max": int(self.p_max),
            "z_nodes": self.n_z_nodes(),
        }

    def config_hash(self):
        text = json.dumps(self.canonical(), sort_keys=True, default=repr)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def default_z_nodes(xi_max, psi_max):
    """Gauss-Legendre node count for the slice integral over t.

    The transverse kernel has poles at distance ~1/xi from the real t axis
    and the longitudinal factor oscillates as exp(-i psi t); the two
    demands add.  Calibrated to 1e-9 of the peak amplitude for p <= 4.
    """
    return int(max(64, ceil(0.75 * psi_max) + ceil(14 * xi_max) + 48))


def longitudinal_phase(cfg, omega):
    """Longitudinal part of ``dk L / 2`` at dimensionless detuning ``omega``."""
    w = np.asarray(omega, dtype=float)
    d = cfg.dispersion
    if cfg.matching_type is MatchingType.TYPE_0_DEGENERATE_CW:
        return d.phi_tilde + np.sign(d.G) * 0.5 * (w / TYPE_0_AXIS_SCALE) ** 2
    # type-II axis x = D W_s L with W_s = -W the signal detuning:
    # psi = phi~ - x/2 + G L x^2 / (2 (D L)^2)
    curvature = 0.0 if d.D == 0 else d.G / (2 * d.D * d.D * cfg.L)
    return d.phi_tilde - 0.5 * w + curvature * w * w


# --- slice-analytic transverse kernel --------------------------------------

def _scaled_waists_sq(cfg):
    kappa_s = cfg.k_s / cfg.k_p
    kappa_i = cfg.k_i / cfg.k_p
    return 1.0 / cfg.xi_p, 1.0 / (kappa_s * cfg.xi_s), 1.0 / (kappa_i * cfg.xi_i)


def gaussian_moments(a_p, a_s, a_i, n_max):
    """``I[u, v] = int |x_s|^2u |x_i|^2v exp(-a_p|x_s+x_i|^2 - a_s|x_s|^2 - a_i|x_i|^2)``.

    Moments of the 4-D Gaussian obtained by differentiating
    ``pi^2 / (A B - c^2)``; arrays broadcast over the slice axis.
    """
    A = a_p + a_s
    B = a_p + a_i
    det = a_p * a_s + a_p * a_i + a_s * a_i
    inv_det = 1.0 / det
    shape = (n_max + 1, n_max + 1) + np.shape(det)
    out = np.zeros(shape, dtype=complex)
    A_pow = [np.ones_like(A)]
    B_pow = [np.ones_like(B)]
    D_pow = [np.ones_like(det), inv_det]
    for _ in range(n_max):
        A_pow.append(A_pow[-1] * A)
        B_pow.append(B_pow[-1] * B)
    for _ in range(2 * n_max):
        D_pow.append(D_pow[-1] * inv_det)
    for u in range(n_max + 1):
        for v in range(n_max + 1):
            acc = 0
            for k in range(min(u, v) + 1):
                coef = ((-1) ** k * _binom(v, k) * factorial(u) * factorial(u + v - k)
                        / factorial(u - k))
                acc = acc + coef * A_pow[v - k] * B_pow[u - k] * D_pow[u + v - k + 1]
            out[u, v] = pi * pi * acc
    return out


def _binom(n, k):
    return factorial(n) // (factorial(k) * factorial(n - k))


def transverse_kernel(cfg, t):
    """Transverse overlap M[p_s, p_i, n] at slice positions ``t``."""
    t = np.asarray(t, dtype=float)
    r = cfg.L / cfg.L_eff
    wp2, ws2, wi2 = _scaled_waists_sq(cfg)
    a_p = 0.25 * wp2 * (1 + 1j * r * cfg.xi_p * t)
    a_s = 0.25 * ws2 * (1 - 1j * r * cfg.xi_s * t)
    a_i = 0.25 * wi2 * (1 - 1j * r * cfg.xi_i * t)
    pm = cfg.p_max
    moments = gaussian_moments(a_p, a_s, a_i, pm)
    t_pump = t_coefficients(0, sqrt(wp2))[0]
    ts = [t_coefficients(p, sqrt(ws2)) for p in range(pm + 1)]
    ti = [t_coefficients(p, sqrt(wi2)) for p in range(pm + 1)]
    out = np.zeros((pm + 1, pm + 1) + t.shape, dtype=complex)
    for ps in range(pm + 1):
        # contract the signal polynomial first: S[v] = sum_u T_u^{ps} I[u, v]
        partial = np.tensordot(ts[ps], moments[:ps + 1], axes=(0, 0))
        for pi_ in range(pm + 1):
            out[ps, pi_] = t_pump * np.tensordot(ti[pi_], partial[:pi_ + 1], axes=(0, 0))
    return out


def _slice_rule(cfg, n_nodes):
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    z = 0.5 * cfg.L * t
    weights = w * cfg.poling.profile(z)
    return t, weights


class _SliceEngine:
    """Reusable slice quadrature: kernel on nodes, then one matrix product per grid."""

    def __init__(self, cfg, n_nodes=None):
        self.cfg = cfg
        self.n_nodes = cfg.n_z_nodes() if n_nodes is None else int(n_nodes)
        self.t, self.weights = _slice_rule(cfg, self.n_nodes)
        kernel = transverse_kernel(cfg, self.t)
        pm = cfg.p_max
        self.kernel = kernel.reshape((pm + 1) ** 2, self.n_nodes)
        self.scale = cfg.L / (2 * cfg.tau)

    def at_phase(self, psi):
        psi = np.asarray(psi, dtype=float)
        phase = np.exp(-1j * np.multiply.outer(psi.ravel(), self.t)) * self.weights
        vals = self.scale * (phase @ self.kernel.T)
        pm = self.cfg.p_max
        return vals.T.reshape((pm + 1, pm + 1) + psi.shape)


def amplitudes_at_phase(cfg, psi, n_nodes=None):
    """All C_{p_s,p_i} at longitudinal phases ``psi``; shape (p+1, p+1, *psi.shape)."""
    return _SliceEngine(cfg, n_nodes).at_phase(psi)


# --- direct quadrature oracle ----------------------------------------------

def _direct_quadrature(cfg, p_s, p_i, psi_long, rtol=1e-7):
    wp2, ws2, wi2 = _scaled_waists_sq(cfg)
    wp, ws, wi = sqrt(wp2), sqrt(ws2), sqrt(wi2)
    kappa_s = cfg.k_s / cfg.k_p
    kappa_i = cfg.k_i / cfg.k_p
    r = cfg.L / cfg.L_eff
    tp = t_coefficients(0, wp)[0]
    ts = t_coefficients(p_s, ws)
    ti = t_coefficients(p_i, wi)
    poling = cfg.poling

    def lg(coeffs, waist, rho2):
        poly = np.zeros_like(rho2)
        for c in coeffs[::-1]:
            poly = poly * rho2 + c
        return poly * np.exp(-0.25 * waist * waist * rho2)

    def integrand(x):
        rs, ri, th = x[:, 0], x[:, 1], x[:, 2]
        rs2, ri2 = rs * rs, ri * ri
        rp2 = rs2 + ri2 + 2 * rs * ri * np.cos(th)
        psi = psi_long + 0.25 * r * (rp2 - rs2 / kappa_s - ri2 / kappa_i)
        # longitudinal amplitude in t-units: (2/L) * int chi(z) exp(-i dk z) dz
        lon = (2 / poling.L) * longitudinal_amplitude(poling, 2 * psi / poling.L)
        val = tp * np.exp(-0.25 * wp2 * rp2) * lg(ts, ws, rs2) * lg(ti, wi, ri2) * lon
        return 4 * pi * rs * ri * val

    # Gaussian envelopes are below exp(-49) past these radii
    cut = 14.0
    lo = np.array([0.0, 0.0, 0.0])
    hi = np.array([cut / ws, cut / wi, pi])
    res = integrate.cubature(integrand, lo, hi, rtol=rtol, atol=0.0, max_subdivisions=200000)
    if res.status != "converged":
        raise QuadratureError("direct quadrature did not converge",
                              estimate=float(res.estimate), error=float(res.error))
    return float(res.estimate) * cfg.L / (2 * cfg.tau)


def spectral_amplitude(cfg, p_s, p_i, omega, method="slice"):
    """C_{p_s,p_i} at one dimensionless detuning.

    ``method`` is ``"slice"`` (Gauss-Legendre slices with closed-form transverse
    moments) or ``"direct"`` (adaptive 3-D cubature over |q_s|, |q_i| and their
    relative angle, with the z integral in closed form).
    """
    if not (0 <= p_s <= cfg.p_max and 0 <= p_i <= cfg.p_max):
        raise ValueError(f"mode indices must lie in [0, {cfg.p_max}]")
    psi = float(longitudinal_phase(cfg, omega))
    if method in ("slice", "SliceAnalytic"):
        return complex(_SliceEngine(cfg).at_phase(np.array([psi]))[p_s, p_i, 0])
    if method in ("direct", "DirectQuadrature"):
        return complex(_direct_quadrature(cfg, p_s, p_i, psi))
    raise ValueError(f"unknown method {method!r}")


# --- tables -----------------------------------------------------------------

def trapezoid_weights(grid):
    grid = np.asarray(grid, dtype=float)
    w = np.zeros_like(grid)
    if grid.size > 1:
        h = np.diff(grid)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
    return w


@dataclass(eq=False)
class ModeAmplitudeTable:
    """Complex C_{p_s,p_i}(W_k) on the configuration's detuning grid.

    Amplitudes are relative: the global constant of the biphoton state is
    not represented.
    """
    config: SourceConfig
    amplitudes: np.ndarray
    omega: np.ndarray
    grid_weights: np.ndarray
    normalization_note: str = "relative amplitudes; global state normalization not fixed"

    @property
    def p_max(self):
        return self.amplitudes.shape[0] - 1

    def density(self, p_s, p_i):
        return np.abs(self.amplitudes[p_s, p_i]) ** 2

    def to_csv(self, path):
        """Columns p_s, p_i, omega_dimensionless, re_C, im_C; header carries the config hash."""
        from .io import write_csv
        rows = []
        pm = self.p_max
        for ps in range(pm + 1):
            for pi_ in range(pm + 1):
                for k, w in enumerate(self.omega):
                    c = self.amplitudes[ps, pi_, k]
                    rows.append((ps, pi_, w, c.real, c.imag))
        write_csv(path, ["p_s", "p_i", "omega_dimensionless", "re_C", "im_C"], rows,
                  {"config_hash": self.config.config_hash()})


def build_table(cfg, n_nodes=None):
    """Evaluate every (p_s, p_i, W_k) amplitude of ``cfg`` with the slice method."""
    psi = longitudinal_phase(cfg, cfg.omega_grid)
    amps = _SliceEngine(cfg, n_nodes).at_phase(psi)
    if not np.all(np.isfinite(amps)):
        bad = np.argwhere(~np.isfinite(amps))[0]
        raise ArithmeticError(f"non-finite amplitude at (p_s, p_i, k) = {tuple(bad)}")
    return ModeAmplitudeTable(cfg, amps, cfg.omega_grid.copy(), trapezoid_weights(cfg.omega_grid))


def normalized_overlap(table, pair_a, pair_b):
    """|int C'_a conj(C'_b) dW| with C' = C / sqrt(int |C|^2 dW)."""
    ca = table.amplitudes[pair_a[0], pair_a[1]]
    cb = table.amplitudes[pair_b[0], pair_b[1]]
    w = table.grid_weights
    na = np.sum(w * np.abs(ca) ** 2)
    nb = np.sum(w * np.abs(cb) ** 2)
    if na <= 0 or nb <= 0:
        raise DegenerateInputError(f"zero-norm amplitude for pair {pair_a if na <= 0 else pair_b}")
    return float(abs(np.sum(w * ca * np.conj(cb))) / sqrt(na * nb))
