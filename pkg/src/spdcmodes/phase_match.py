"""
Longitudinal phase mismatch and poling-profile amplitudes.

The mismatch is the paraxial, second-order Taylor form

    dk = phi + (1/u_p - 1/u_s) W_s + (1/u_p - 1/u_i) W_i + G_s W_s^2/2 + G_i W_i^2/2
         + |q_s + q_i|^2/(2 k_p) - |q_s|^2/(2 k_s) - |q_i|^2/(2 k_i)

with W_j the detunings.  The residual ``phi`` (which absorbs the poling
period) is carried in dimensionless form, ``phi_tilde = phi * L / 2``, so that
a uniformly poled crystal in the plane-wave limit has amplitude
``L sinc(phi_tilde + ...)``.
"""
import enum
from dataclasses import dataclass, replace
from math import pi, sqrt

import numpy as np
from scipy.special import wofz

__all__ = [
    "MatchingType",
    "MatchingTypeError",
    "DispersionModel",
    "PolingProfile",
    "sinc",
    "delta_k_general",
    "delta_k_cw",
    "delta_k_sgvm",
    "longitudinal_amplitude",
]

SGVM_RTOL = 1e-9


class MatchingType(str, enum.Enum):
    TYPE_II_CW = "TypeII_CW"
    TYPE_0_DEGENERATE_CW = "Type0_Degenerate_CW"
    SGVM = "SGVM"


class MatchingTypeError(ValueError):
    """Raised when an operation is applied to an incompatible matching type."""


@dataclass(frozen=True)
class DispersionModel:
    """Phase-mismatch coefficients of one source.

    ``length`` is the length used to convert between ``phi_tilde`` and the
    physical residual mismatch ``phi`` (1/m).  Group velocities default to
    infinity (no linear dispersion) and GVDs to zero.
    """
    matching_type: MatchingType
    k0_p: float
    k0_s: float
    k0_i: float
    length: float
    phi_tilde: float = 0.0
    u_p: float = np.inf
    u_s: float = np.inf
    u_i: float = np.inf
    G_s: float = 0.0
    G_i: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "matching_type", MatchingType(self.matching_type))
        for name in ("k0_p", "k0_s", "k0_i", "length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("u_p", "u_s", "u_i"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.matching_type is MatchingType.TYPE_0_DEGENERATE_CW and self.D != 0.0:
            raise ValueError("Type0_Degenerate_CW requires D = 0 exactly (1/u_s == 1/u_i)")
        if self.matching_type is MatchingType.SGVM:
            lhs = 2.0 / self.u_p
            rhs = 1.0 / self.u_s + 1.0 / self.u_i
            if abs(lhs - rhs) > SGVM_RTOL * max(abs(lhs), abs(rhs)):
                raise ValueError("SGVM requires 2/u_p = 1/u_s + 1/u_i within 1e-9 relative")

    @property
    def D(self):
        return 1.0 / self.u_s - 1.0 / self.u_i

    @property
    def G(self):
        return 0.5 * (self.G_s + self.G_i)

    @property
    def phi(self):
        """Physical residual mismatch in 1/m."""
        return 2.0 * self.phi_tilde / self.length

    def with_phi_tilde(self, phi_tilde):
        return replace(self, phi_tilde=float(phi_tilde))


@dataclass(frozen=True)
class PolingProfile:
    """Nonlinearity profile on ``[-L/2, L/2]``.

    ``kind`` is ``"uniform"`` or ``"gaussian"``; the Gaussian profile is
    ``exp(-z^2 / (2 sigma^2))`` truncated to the crystal.
    """
    kind: str
    L: float
    sigma: float = None

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian"):
            raise ValueError(f"unknown poling kind {self.kind!r}")
        if not self.L > 0:
            raise ValueError("crystal length must be positive")
        if self.kind == "gaussian":
            if self.sigma is None or not 0 < self.sigma <= self.L / 2:
                raise ValueError("gaussian poling needs 0 < sigma <= L/2")

    @classmethod
    def uniform(cls, L):
        return cls("uniform", float(L))

    @classmethod
    def gaussian(cls, L, sigma=None):
        return cls("gaussian", float(L), float(L) / 4 if sigma is None else float(sigma))

    @property
    def effective_length(self):
        """Length entering the focusing parameter: L, or sqrt(2 pi) sigma."""
        if self.kind == "uniform":
            return self.L
        return sqrt(2 * pi) * self.sigma

    def profile(self, z):
        z = np.asarray(z, dtype=float)
        inside = np.abs(z) <= self.L / 2
        if self.kind == "uniform":
            return np.where(inside, 1.0, 0.0)
        return np.where(inside, np.exp(-z ** 2 / (2 * self.sigma ** 2)), 0.0)


def sinc(x):
    """sin(x)/x with the removable singularity handled by its series."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def _transverse(d, qs, qi):
    qs = np.asarray(qs, dtype=float)
    qi = np.asarray(qi, dtype=float)
    qp = qs + qi
    return (np.sum(qp * qp, axis=-1) / (2 * d.k0_p)
            - np.sum(qs * qs, axis=-1) / (2 * d.k0_s)
            - np.sum(qi * qi, axis=-1) / (2 * d.k0_i))


def delta_k_general(d, Omega_s, Omega_i, qs=(0.0, 0.0), qi=(0.0, 0.0)):
    """Full quadratic mismatch (1/m) for independent signal/idler detunings.

    ``qs`` and ``qi`` are transverse momenta with the two components on the
    last axis.  Paraxiality (|q| << k) is assumed, not checked.
    """
    ws = np.asarray(Omega_s, dtype=float)
    wi = np.asarray(Omega_i, dtype=float)
    inv_up = 1.0 / d.u_p
    out = (d.phi + (inv_up - 1.0 / d.u_s) * ws + (inv_up - 1.0 / d.u_i) * wi
           + 0.5 * d.G_s * ws ** 2 + 0.5 * d.G_i * wi ** 2 + _transverse(d, qs, qi))
    return out if np.ndim(out) else float(out)


def delta_k_cw(d, Omega, qs=(0.0, 0.0), qi=(0.0, 0.0)):
    """Monochromatic-pump mismatch ``phi + D W + G W^2 + transverse``.

    ``Omega`` follows the idler detuning of :func:`delta_k_general`, i.e.
    ``delta_k_cw(d, W) == delta_k_general(d, -W, W)``; this is the sign
    that makes the linear term read ``+D W`` with ``D = 1/u_s - 1/u_i``.
    """
    w = np.asarray(Omega, dtype=float)
    out = d.phi + d.D * w + d.G * w ** 2 + _transverse(d, qs, qi)
    return out if np.ndim(out) else float(out)


def delta_k_sgvm(d, Omega_s, Omega_i, qs=(0.0, 0.0), qi=(0.0, 0.0)):
    """Mismatch under symmetric group-velocity matching."""
    if d.matching_type is not MatchingType.SGVM:
        raise MatchingTypeError(f"delta_k_sgvm needs an SGVM model, got {d.matching_type.value}")
    ws = np.asarray(Omega_s, dtype=float)
    wi = np.asarray(Omega_i, dtype=float)
    out = (d.phi + 0.5 * d.D * (wi - ws) + 0.5 * d.G_s * ws ** 2 + 0.5 * d.G_i * wi ** 2
           + _transverse(d, qs, qi))
    return out if np.ndim(out) else float(out)


def truncated_gaussian_amplitude(delta_k, sigma, L):
    """``int_{-L/2}^{L/2} exp(-z^2/(2 sigma^2) - i dk z) dz`` (real, even).

    Written with the Faddeeva function so that neither factor overflows at
    large ``sigma * dk``.
    """
    dk = np.asarray(delta_k, dtype=float)
    a = L / (2 * sqrt(2) * sigma)
    b = sigma * dk / sqrt(2)
    w = wofz(-b + 1j * a)
    val = np.exp(-b * b) - np.real(np.exp(-a * a - 2j * a * b) * w)
    return sqrt(2 * pi) * sigma * val


def longitudinal_amplitude(poling, delta_k):
    """``int chi(z) exp(-i dk z) dz`` over the crystal, in units of length."""
    dk = np.asarray(delta_k, dtype=float)
    if poling.kind == "uniform":
        out = poling.L * sinc(dk * poling.L / 2)
    else:
        out = truncated_gaussian_amplitude(dk, poling.sigma, poling.L)
    return out if np.ndim(out) else float(out)
