"""
Laguerre-Gauss modes in transverse-momentum space.

A mode with radial index p, azimuthal index ell and waist w reads

    LG(rho, phi) = exp(-rho**2 w**2 / 4 + i ell phi) * sum_u T_u rho**(2u + |ell|)

where rho = |q| is the transverse momentum magnitude.  The modes are
normalized to unit norm under d^2q = rho drho dphi.
"""
from dataclasses import dataclass
from math import lgamma, pi, sqrt

import numpy as np

__all__ = ["LGModeSpec", "t_coefficient", "t_coefficients", "lg_amplitude"]

P_LIMIT = 20


@dataclass(frozen=True)
class LGModeSpec:
    p: int
    ell: int = 0
    waist: float = 1.0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 0:
            raise ValueError(f"radial index must be a nonnegative integer, got {self.p}")
        if int(self.ell) != self.ell:
            raise ValueError(f"azimuthal index must be an integer, got {self.ell}")
        if not self.waist > 0:
            raise ValueError(f"waist must be positive, got {self.waist}")


def _log_prefactor(p, ell, u):
    # log of sqrt(p!(p+|l|)!/pi) / ((p-u)! (|l|+u)! u!), factorials via lgamma
    a = abs(ell)
    return (0.5 * (lgamma(p + 1) + lgamma(p + a + 1) - np.log(pi))
            - lgamma(p - u + 1) - lgamma(a + u + 1) - lgamma(u + 1))


def t_coefficient(p, ell, u, waist):
    """Expansion coefficient T_u^{p,ell} of the momentum-space LG polynomial.

    Parameters
    ----------
    p, ell : int
        Radial and azimuthal indices.
    u : int
        Power index, ``0 <= u <= p``; multiplies ``rho**(2u + |ell|)``.
    waist : float
        Beam waist ``w``.

    Returns
    -------
    complex
    """
    if not 0 <= u <= p:
        raise ValueError(f"u must satisfy 0 <= u <= p, got u={u}, p={p}")
    if not waist > 0:
        raise ValueError(f"waist must be positive, got {waist}")
    a = abs(ell)
    magnitude = np.exp(_log_prefactor(p, ell, u)
                       + (2 * u + a + 1) * np.log(waist / sqrt(2.0)))
    sign = -1.0 if (p + u) % 2 else 1.0
    return complex(sign * magnitude * (1j ** (ell % 4)))


def t_coefficients(p, waist):
    """Real ell = 0 coefficients ``[T_0, ..., T_p]`` for one mode."""
    return np.array([t_coefficient(p, 0, u, waist).real for u in range(p + 1)])


def lg_amplitude(mode, rho, phi=0.0):
    """Evaluate the momentum-space LG mode at ``(rho, phi)``.

    ``rho`` and ``phi`` broadcast against each other.  The polynomial in
    ``rho**2`` is evaluated by Horner's rule.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be nonnegative")
    a = abs(mode.ell)
    coeffs = [t_coefficient(mode.p, mode.ell, u, mode.waist) for u in range(mode.p + 1)]
    r2 = rho * rho
    poly = np.zeros_like(r2, dtype=complex)
    for c in reversed(coeffs):
        poly = poly * r2 + c
    envelope = np.exp(-r2 * mode.waist ** 2 / 4.0 + 1j * mode.ell * np.asarray(phi, dtype=float))
    out = envelope * poly * rho ** a
    if out.ndim == 0:
        return complex(out)
    return out
