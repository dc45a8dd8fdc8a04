"""
KTP dispersion and conversion of physical source parameters to dimensionless form.

Refractive indices use the Sellmeier set of K. Kato and E. Takaoka,
"Sellmeier and thermo-optic dispersion formulas for KTP", Appl. Opt. 41,
5040 (2002), at room temperature:

    n^2 = A + B / (lambda^2 - C) + D / (lambda^2 - E),   lambda in micrometres.

The published fit range is 0.43-3.54 um; the registry accepts down to
0.40 um so the 405 nm pump can be evaluated (short extrapolation).
"""
from dataclasses import dataclass
from math import pi, sqrt

import numpy as np
from scipy import optimize
from scipy.constants import c as C_LIGHT

from .phase_match import DispersionModel, MatchingType, PolingProfile

__all__ = [
    "MaterialModel",
    "MATERIALS",
    "get_material",
    "refractive_index",
    "group_index",
    "inverse_group_velocity",
    "gvd",
    "dispersion_from_material",
    "xi_from_waist",
    "waist_from_xi",
    "to_dimensionless",
    "sgvm_pump_wavelength",
    "DifferentiationError",
]

KATO_2002 = "K. Kato and E. Takaoka, Appl. Opt. 41, 5040 (2002)"


class DifferentiationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class MaterialModel:
    name: str
    axis: str
    coefficients: tuple  # (A, B, C, D, E)
    valid_range: tuple  # meters
    citation: str = KATO_2002
    index_offset: float = 0.0  # hook for a constant thermo-optic shift

    def check(self, lam):
        lam = np.asarray(lam, dtype=float)
        lo, hi = self.valid_range
        if np.any(lam < lo) or np.any(lam > hi):
            raise ValueError(f"wavelength outside {self.name} validity range "
                             f"[{lo * 1e6:.2f}, {hi * 1e6:.2f}] um")


MATERIALS = {
    "KTP_y": MaterialModel("KTP_y", "y", (3.45018, 0.04341, 0.04597, 16.98825, 39.43799),
                           (0.40e-6, 3.54e-6)),
    "KTP_z": MaterialModel("KTP_z", "z", (4.59423, 0.06206, 0.04763, 110.80672, 86.12171),
                           (0.40e-6, 3.54e-6)),
}


def get_material(name):
    try:
        return MATERIALS[name]
    except KeyError:
        raise KeyError(f"unknown material {name!r}; known: {sorted(MATERIALS)}") from None


def _n_unchecked(m, lam):
    A, B, Cc, D, E = m.coefficients
    x = (np.asarray(lam, dtype=float) * 1e6) ** 2
    return np.sqrt(A + B / (x - Cc) + D / (x - E)) + m.index_offset


def refractive_index(m, lam):
    """Refractive index at vacuum wavelength ``lam`` (m)."""
    m.check(lam)
    out = _n_unchecked(m, lam)
    return out if np.ndim(out) else float(out)


def _dn_dlambda(m, lam):
    # analytic derivative of the rational Sellmeier form, per meter
    A, B, Cc, D, E = m.coefficients
    lam_um = np.asarray(lam, dtype=float) * 1e6
    x = lam_um ** 2
    n = np.sqrt(A + B / (x - Cc) + D / (x - E))
    dn2_dx = -B / (x - Cc) ** 2 - D / (x - E) ** 2
    return dn2_dx * 2 * lam_um / (2 * n) * 1e6


def group_index(m, lam):
    """Analytic group index n - lambda dn/dlambda."""
    m.check(lam)
    return _n_unchecked(m, lam) - np.asarray(lam) * _dn_dlambda(m, lam)


def _k_of_omega(m, omega):
    lam = 2 * pi * C_LIGHT / omega
    return _n_unchecked(m, lam) * omega / C_LIGHT


def _richardson(f, x, order, h0, rtol=1e-6, max_iter=12):
    """Central-difference derivative of order 1 or 2 with Richardson extrapolation."""
    def central(h):
        if order == 1:
            return (f(x + h) - f(x - h)) / (2 * h)
        return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)

    table = [[central(h0)]]
    h = h0
    for i in range(1, max_iter):
        h /= 2
        row = [central(h)]
        for j in range(1, i + 1):
            fac = 4.0 ** j
            row.append(row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / (fac - 1))
        table.append(row)
        best, prev = row[-1], table[i - 1][-1]
        if abs(best - prev) <= rtol * abs(best):
            return best
    raise DifferentiationError(f"derivative of order {order} did not converge to {rtol}")


def inverse_group_velocity(m, lam, rtol=1e-6):
    """dk/domega (s/m) by Richardson-extrapolated central differences."""
    m.check(lam)
    omega = 2 * pi * C_LIGHT / lam
    return _richardson(lambda w: _k_of_omega(m, w), omega, 1, 0.02 * omega, rtol)


def gvd(m, lam, rtol=1e-6):
    """d^2k/domega^2 (s^2/m) by Richardson-extrapolated central differences."""
    m.check(lam)
    omega = 2 * pi * C_LIGHT / lam
    return _richardson(lambda w: _k_of_omega(m, w), omega, 2, 0.02 * omega, rtol)


def dispersion_from_material(m_s, m_i, m_p, lambdas, matching_type, length,
                             phi_tilde=0.0, d_zero_threshold=1e-15):
    """Build a :class:`DispersionModel` from materials at ``(lambda_p, lambda_s, lambda_i)``.

    For degenerate type-0 the residual |D| is checked against
    ``d_zero_threshold`` (s/m) and set to zero exactly; for SGVM the pump
    group velocity is replaced by the exact SGVM value after checking the
    material value is within 1e-3 relative.
    """
    lam_p, lam_s, lam_i = lambdas
    inv_u = [inverse_group_velocity(m, lam) for m, lam in ((m_p, lam_p), (m_s, lam_s), (m_i, lam_i))]
    g_s = gvd(m_s, lam_s)
    g_i = gvd(m_i, lam_i)
    k = [2 * pi * refractive_index(m, lam) / lam for m, lam in ((m_p, lam_p), (m_s, lam_s), (m_i, lam_i))]
    matching_type = MatchingType(matching_type)
    if matching_type is MatchingType.TYPE_0_DEGENERATE_CW:
        if abs(inv_u[1] - inv_u[2]) > d_zero_threshold:
            raise ValueError("degenerate type-0 needs identical signal/idler group velocities")
        inv_u[2] = inv_u[1]
        g_i = g_s = 0.5 * (g_s + g_i)
    if matching_type is MatchingType.SGVM:
        target = 0.5 * (inv_u[1] + inv_u[2])
        if abs(inv_u[0] - target) > 1e-3 * target:
            raise ValueError("materials are not group-velocity matched at these wavelengths")
        inv_u[0] = target
    return DispersionModel(matching_type, k[0], k[1], k[2], float(length), float(phi_tilde),
                           1 / inv_u[0], 1 / inv_u[1], 1 / inv_u[2], g_s, g_i)


def sgvm_mismatch(m_p, m_s, m_i, lam_p):
    """2/u_p - 1/u_s - 1/u_i (s/m) for a degenerate pair from pump ``lam_p``."""
    lam = 2 * lam_p
    return (2 * inverse_group_velocity(m_p, lam_p) - inverse_group_velocity(m_s, lam)
            - inverse_group_velocity(m_i, lam))


def sgvm_pump_wavelength(m_p, m_s, m_i, bracket=(0.70e-6, 0.85e-6)):
    """Pump wavelength at which degenerate down-conversion is symmetric-GV matched."""
    f = lambda lp: sgvm_mismatch(m_p, m_s, m_i, lp) * 1e12
    return optimize.brentq(f, *bracket, xtol=1e-15)


def xi_from_waist(waist, length, lam, n):
    """Focusing parameter L lambda / (2 pi n w^2); ``length`` is L or sqrt(2 pi) sigma."""
    return length * lam / (2 * pi * n * waist ** 2)


def waist_from_xi(xi, length, lam, n):
    return sqrt(length * lam / (2 * pi * n * xi))


def to_dimensionless(poling, waists, lambdas, materials, matching_type,
                     phi_tilde=0.0, omega_grid=None, p_max=4):
    """Physical description to :class:`~spdcmodes.overlap.SourceConfig`.

    Parameters
    ----------
    poling : PolingProfile
        Uniform (L) or Gaussian (sigma, L); the focusing parameters use the
        profile's effective length.
    waists : (w_p, w_s, w_i) in meters.
    lambdas : (lambda_p, lambda_s, lambda_i) in meters.
    materials : (pump, signal, idler) MaterialModel or registry names.
    """
    from .overlap import SourceConfig, TYPE_0_GRID, TYPE_II_GRID, uniform_grid

    mats = tuple(get_material(m) if isinstance(m, str) else m for m in materials)
    n = [refractive_index(m, lam) for m, lam in zip(mats, lambdas)]
    disp = dispersion_from_material(mats[1], mats[2], mats[0], lambdas, matching_type,
                                    poling.L, phi_tilde)
    leff = poling.effective_length
    xi = [xi_from_waist(w, leff, lam, nj) for w, lam, nj in zip(waists, lambdas, n)]
    if omega_grid is None:
        spec = TYPE_0_GRID if disp.matching_type is MatchingType.TYPE_0_DEGENERATE_CW else TYPE_II_GRID
        omega_grid = uniform_grid(*spec)
    return SourceConfig(disp, poling, xi[0], xi[1], xi[2], *lambdas, *n,
                        omega_grid=np.asarray(omega_grid, dtype=float), p_max=p_max)


def from_dimensionless(cfg):
    """Physical waists (w_p, w_s, w_i) of a configuration."""
    return cfg.waists()


def ktp_source(matching, L, xi=(1.0, 1.0, 1.0), poling="uniform", phi_tilde=0.0,
               lambda_p=405e-9, omega_grid=None, p_max=4, sigma=None):
    """KTP source in dimensionless form.

    ``matching`` is ``"type2"`` (pump y, signal y, idler z), ``"type0"``
    (all z) or ``"sgvm"`` (type-II polarizations at the SGVM pump
    wavelength; ``lambda_p`` is ignored).  Gaussian poling uses ``sigma``
    (default L/4).
    """
    from .overlap import SourceConfig, TYPE_0_GRID, TYPE_II_GRID, uniform_grid

    if matching == "type0":
        names, mtype = ("KTP_z", "KTP_z", "KTP_z"), MatchingType.TYPE_0_DEGENERATE_CW
    elif matching in ("type2", "sgvm"):
        names = ("KTP_y", "KTP_y", "KTP_z")
        mtype = MatchingType.SGVM if matching == "sgvm" else MatchingType.TYPE_II_CW
    else:
        raise ValueError(f"unknown matching {matching!r}")
    mats = [get_material(nm) for nm in names]
    if matching == "sgvm":
        lambda_p = sgvm_pump_wavelength(*mats)
    lambdas = (lambda_p, 2 * lambda_p, 2 * lambda_p)
    prof = PolingProfile.uniform(L) if poling == "uniform" else PolingProfile.gaussian(L, sigma)
    n = [refractive_index(m, lam) for m, lam in zip(mats, lambdas)]
    disp = dispersion_from_material(mats[1], mats[2], mats[0], lambdas, mtype, L, phi_tilde)
    if omega_grid is None:
        spec = TYPE_0_GRID if mtype is MatchingType.TYPE_0_DEGENERATE_CW else TYPE_II_GRID
        omega_grid = uniform_grid(*spec)
    return SourceConfig(disp, prof, float(xi[0]), float(xi[1]), float(xi[2]), *lambdas, *n,
                        omega_grid=np.asarray(omega_grid, dtype=float), p_max=p_max)
