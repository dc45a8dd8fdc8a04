"""
Focusing-parameter sweeps, optimization strategies, cubic trade-off fits and
crystal-length scaling.

A sweep evaluates every (xi_p, xi_s = xi_i) cell, optionally for several
phase mismatches.  All cells share one Gauss-Legendre rule, so the
longitudinal phase matrix is built once per mismatch value and each cell
costs one transverse kernel plus a small matrix product.
"""
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize, stats

from .metrics import FilterWindow, efficiency_from_integrals, filter_weights
from .overlap import (_SliceEngine, _slice_rule, default_z_nodes, longitudinal_phase,
                      trapezoid_weights, transverse_kernel)
from .phase_match import PolingProfile

__all__ = [
    "PRESETS",
    "SweepResult",
    "StrategyPoint",
    "TradeoffFit",
    "ScalingResult",
    "FitError",
    "grid_sweep",
    "strategy_fixed_collection",
    "strategy_fixed_pump",
    "strategy_max_H_at_B",
    "fit_tradeoff",
    "peak_density_optimum",
    "length_scaling",
    "scaled_length",
]

# log10(xi) step per preset; both use the full default detuning grids
PRESETS = {
    "desk": {"log_xi_step": 0.1},
    "paper": {"log_xi_step": 0.05},
}
B_BAND = 0.02


class FitError(ArithmeticError):
    pass


@dataclass(eq=False)
class SweepResult:
    """Maps indexed ``[i_p, i_s, i_phi]``.

    ``B`` is normalized to the maximum over all cells; exactly one cell
    holds 1.0 (lowest flat index wins ties).
    """
    xi_p_axis: np.ndarray
    xi_s_axis: np.ndarray
    phi_values: np.ndarray
    S2: np.ndarray
    S1_s: np.ndarray
    S1_i: np.ndarray
    H: np.ndarray
    B: np.ndarray
    config_hash: str
    grid_spec: tuple
    window: FilterWindow = field(default_factory=FilterWindow)

    @property
    def argmax(self):
        return np.unravel_index(int(np.argmax(self.S2)), self.S2.shape)

    @property
    def S2_max(self):
        return float(self.S2[self.argmax])

    def point(self, idx):
        ip, is_, iphi = idx
        return StrategyPoint(float(self.xi_p_axis[ip]), float(self.xi_s_axis[is_]),
                             float(self.phi_values[iphi]), float(self.B[idx]), float(self.H[idx]),
                             tuple(int(v) for v in idx))

    def rows(self):
        """(xi_p, xi_s, phi_tilde, B, H) in index order."""
        out = []
        for idx in np.ndindex(self.S2.shape):
            p = self.point(idx)
            out.append((p.xi_p, p.xi_s, p.phi_tilde, p.B, p.H))
        return out


@dataclass(frozen=True)
class StrategyPoint:
    xi_p: float
    xi_s: float
    phi_tilde: float
    B: float
    H: float
    index: tuple


def _log_axis(lo, hi, step):
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return 10.0 ** np.round(lo + step * np.arange(n), 12)


def _sweep_nodes(base, xi_max, phis):
    grid = base.omega_grid
    psi_max = max(float(np.max(np.abs(longitudinal_phase(base.with_(phi_tilde=ph), grid))))
                  for ph in phis)
    return default_z_nodes(xi_max * base.L / base.L_eff, psi_max)


def grid_sweep(base, xi_range, phi_values=None, window=None, n_nodes=None, threads=1,
               progress=None):
    """B and H over a log-spaced (xi_p, xi_s = xi_i) grid.

    Parameters
    ----------
    base : SourceConfig
        Supplies dispersion, poling and the detuning grid; its xi are ignored.
    xi_range : (lo, hi, step)
        log10 bounds and step shared by both axes.
    phi_values : sequence of float, optional
        Dimensionless mismatches phi_tilde; defaults to the base value.
    window : FilterWindow, optional
        Applied to S2 and both singles.
    threads : int
        Cells are split over a thread pool; results do not depend on it.
    progress : callable, optional
        Called with the running count of finished cells.
    """
    axis = _log_axis(*xi_range)
    phis = np.atleast_1d(np.asarray(
        [base.dispersion.phi_tilde] if phi_values is None else phi_values, dtype=float))
    window = window or FilterWindow()
    grid = base.omega_grid
    weights = trapezoid_weights(grid) if window.kind == "none" else filter_weights(grid, window)
    nodes = n_nodes or _sweep_nodes(base, float(axis[-1]), phis)
    t, gl_w = _slice_rule(base, nodes)
    scale = base.L / (2 * base.tau)
    phase = [scale * gl_w * np.exp(-1j * np.multiply.outer(
        longitudinal_phase(base.with_(phi_tilde=ph), grid), t)) for ph in phis]

    n = axis.size
    shape = (n, n, phis.size)
    S2 = np.empty(shape)
    S1s = np.empty(shape)
    S1i = np.empty(shape)
    cells = [(ip, is_) for ip in range(n) for is_ in range(n)]

    def run(cell):
        ip, is_ = cell
        cfg = base.with_(xi_p=float(axis[ip]), xi_s=float(axis[is_]), xi_i=float(axis[is_]))
        try:
            kern = transverse_kernel(cfg, t)
        except Exception as exc:  # noqa: BLE001 - re-raised with coordinates
            raise RuntimeError(f"kernel failed at xi_p={axis[ip]:g}, xi_s={axis[is_]:g}") from exc
        # rows needed for heralding: (0, p) and (p, 0)
        rows = np.concatenate([kern[0, :], kern[1:, 0]])
        out = []
        for ph in phase:
            dens = np.abs(ph @ rows.T) ** 2
            s2 = weights @ dens[:, 0]
            s1s = weights @ dens[:, :kern.shape[1]].sum(axis=1)
            s1i = s2 + weights @ dens[:, kern.shape[1]:].sum(axis=1)
            out.append((s2, s1s, s1i))
        return cell, out

    done = 0
    workers = max(1, int(threads))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for (ip, is_), out in pool.map(run, cells):
            for k, (s2, s1s, s1i) in enumerate(out):
                S2[ip, is_, k], S1s[ip, is_, k], S1i[ip, is_, k] = s2, s1s, s1i
            done += 1
            if progress is not None:
                progress(done)

    H = S2 / np.sqrt(S1s * S1i)
    flat = int(np.argmax(S2))
    B = S2 / S2.flat[flat]
    B[B >= 1.0] = np.nextafter(1.0, 0.0)
    B.flat[flat] = 1.0
    return SweepResult(axis, axis.copy(), phis, S2, S1s, S1i, H, B, base.config_hash(),
                       (tuple(float(v) for v in xi_range), nodes), window)


def _best(values, mask=None):
    """Flat index of the maximum, lowest index on ties; ``None`` if mask is empty."""
    v = np.where(mask, values, -np.inf) if mask is not None else values
    if mask is not None and not np.any(mask):
        return None
    return int(np.argmax(v))


def strategy_fixed_collection(sweep):
    """For each xi_s, the xi_p (and phi) of maximal B; ties go to smaller xi_p."""
    pts = []
    for is_ in range(sweep.xi_s_axis.size):
        sub = sweep.B[:, is_, :]
        ip, iphi = np.unravel_index(_best(sub.ravel()), sub.shape)
        pts.append(sweep.point((ip, is_, iphi)))
    return pts


def strategy_fixed_pump(sweep):
    """For each xi_p, the xi_s (and phi) of maximal B; ties go to smaller xi_s."""
    pts = []
    for ip in range(sweep.xi_p_axis.size):
        sub = sweep.B[ip, :, :]
        is_, iphi = np.unravel_index(_best(sub.ravel()), sub.shape)
        pts.append(sweep.point((ip, is_, iphi)))
    return pts


def strategy_max_H_at_B(sweep, B_targets, band=B_BAND):
    """Maximal H among cells with |B - target| <= band, one point per target.

    An empty band is widened by doubling, at most three times, with a
    warning; if still empty a ``ValueError`` is raised.
    """
    pts = []
    for target in B_targets:
        if not 0 < target <= 1:
            raise ValueError(f"B target must lie in (0, 1], got {target}")
        width = band
        for attempt in range(4):
            mask = np.abs(sweep.B - target) <= width
            k = _best(sweep.H.ravel(), mask.ravel())
            if k is not None:
                break
            if attempt < 3:
                warnings.warn(f"no cell within {width:g} of B={target:g}; widening band",
                              RuntimeWarning, stacklevel=2)
            width *= 2
        else:
            raise ValueError(f"no cell near B={target:g} even at band {width / 2:g}")
        pts.append(sweep.point(np.unravel_index(k, sweep.B.shape)))
    return pts


@dataclass(frozen=True)
class TradeoffFit:
    """Cubic f(B) = a0 + a1 B + a2 B^2 + a3 B^3."""
    target: str
    coefficients: tuple
    residual_rms: float
    n_points: int

    def __call__(self, B):
        return np.polynomial.polynomial.polyval(np.asarray(B, dtype=float), self.coefficients)


def fit_tradeoff(curve, target="H"):
    """Least-squares cubic through strategy points.

    ``curve`` holds :class:`StrategyPoint` objects or ``(B, value)`` pairs.
    Points repeated by several targets enter once.
    """
    key = {"H": lambda p: p.H, "log10_xi_p": lambda p: np.log10(p.xi_p),
           "log10_xi_s": lambda p: np.log10(p.xi_s)}
    if target not in key:
        raise ValueError(f"unknown fit target {target!r}")
    seen, xs, ys = set(), [], []
    for p in curve:
        if isinstance(p, StrategyPoint):
            ident = p.index
            b, y = p.B, key[target](p)
        else:
            b, y = (float(v) for v in p)
            ident = (b, y)
        if ident in seen:
            continue
        seen.add(ident)
        xs.append(b)
        ys.append(y)
    xs, ys = np.asarray(xs), np.asarray(ys)
    if xs.size < 8:
        raise FitError(f"need at least 8 distinct points, got {xs.size}")
    V = np.vander(xs, 4, increasing=True)
    coef, _, rank, _ = np.linalg.lstsq(V, ys, rcond=None)
    if rank < 4:
        raise FitError("rank-deficient cubic fit")
    rms = float(np.sqrt(np.mean((V @ coef - ys) ** 2)))
    return TradeoffFit(target, tuple(float(c) for c in coef), rms, int(xs.size))


def _peak_density(cfg, psi_lo, psi_hi, step=0.05):
    eng = _SliceEngine(cfg)
    f = lambda psi: float(np.abs(eng.at_phase(np.array([psi]))[0, 0, 0]) ** 2)
    psi = np.arange(psi_lo, psi_hi + step, step)
    dens = np.abs(eng.at_phase(psi)[0, 0]) ** 2
    k = int(np.argmax(dens))
    res = optimize.minimize_scalar(lambda x: -f(x), bounds=(psi[max(k - 1, 0)],
                                   psi[min(k + 1, psi.size - 1)]), method="bounded",
                                   options={"xatol": 1e-6})
    return -res.fun, res.x


def peak_density_optimum(base, log_bounds=(0.0, 1.0), psi_window=(-8.0, 4.0)):
    """xi (= xi_p = xi_s = xi_i) maximizing the peak of P_00 over detuning.

    Returns ``(xi, peak_density, psi_at_peak)``; the search is continuous in
    log10(xi), not restricted to a sweep grid.
    """
    def neg(lx):
        xi = 10.0 ** lx
        return -_peak_density(base.with_(xi_p=xi, xi_s=xi, xi_i=xi), *psi_window)[0]

    res = optimize.minimize_scalar(neg, bounds=log_bounds, method="bounded",
                                   options={"xatol": 1e-4})
    xi = 10.0 ** res.x
    peak, psi = _peak_density(base.with_(xi_p=xi, xi_s=xi, xi_i=xi), *psi_window)
    return xi, peak, psi


@dataclass(frozen=True)
class ScalingResult:
    exponent: float
    stderr: float
    lengths: tuple
    S2: tuple
    filter_width: float = None  # physical, rad/s


def scaled_length(base, L):
    """Same material, xi and phi_tilde at crystal length ``L`` (sigma/L held fixed)."""
    p = base.poling
    poling = (PolingProfile.uniform(L) if p.kind == "uniform"
              else PolingProfile.gaussian(L, p.sigma * L / p.L))
    return replace(base, poling=poling, dispersion=replace(base.dispersion, length=float(L)),
                   z_nodes=None)


def length_scaling(base, lengths, filtered=False, narrow_width=0.01, n_local=41):
    """Exponent e of S2 proportional to L**e at fixed focusing parameters.

    S2 is taken per unit physical detuning.  With ``filtered`` a fixed
    physical window, ``narrow_width`` dimensionless units wide at the longest
    length, is centred on the P_00 peak.
    """
    lengths = sorted(float(L) for L in lengths)
    if len(lengths) < 3 or lengths[-1] < 4 * lengths[0]:
        raise ValueError("need at least 3 lengths spanning a factor of 4")
    S2 = []
    width_phys = None
    center = None
    if filtered:
        longest = scaled_length(base, lengths[-1])
        width_phys = narrow_width * longest.omega_scale()
        eng = _SliceEngine(longest)
        grid = longest.omega_grid
        dens = np.abs(eng.at_phase(longitudinal_phase(longest, grid))[0, 0]) ** 2
        center = float(grid[int(np.argmax(dens))])
    for L in lengths:
        cfg = scaled_length(base, L)
        if filtered:
            half = 0.5 * width_phys / cfg.omega_scale()
            local = np.linspace(center - half, center + half, n_local)
            amps = _SliceEngine(cfg).at_phase(longitudinal_phase(cfg, local))[0, 0]
            s2 = float(trapezoid_weights(local) @ np.abs(amps) ** 2)
        else:
            eng = _SliceEngine(cfg)
            amps = eng.at_phase(longitudinal_phase(cfg, cfg.omega_grid))[0, 0]
            s2 = float(trapezoid_weights(cfg.omega_grid) @ np.abs(amps) ** 2)
        S2.append(s2 * cfg.omega_scale())
    fit = stats.linregress(np.log(lengths), np.log(S2))
    if not np.isfinite(fit.slope):
        raise FitError("length-scaling fit failed")
    return ScalingResult(float(fit.slope), float(fit.stderr), tuple(lengths), tuple(S2), width_phys)
