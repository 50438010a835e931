"""Closed-form predictions of the dissipative CSL model and kernel diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .params import HBAR, K_B, M0, CollapseParams

DEFAULT_T_CSL = 1.0


@dataclass(frozen=True)
class DissipativeParams:
    base: CollapseParams
    mass: float
    t_csl: float = DEFAULT_T_CSL

    def __post_init__(self):
        if not self.t_csl > 0 or not self.mass > 0:
            raise ValueError("t_csl and mass must be positive")


@dataclass(frozen=True)
class DissipativeDerived:
    k: float
    chi: float
    h_as: float


def dissipation_k(mass: float, r_c: float, t_csl: float, hbar: float = HBAR, kb: float = K_B) -> float:
    return hbar**2 / (8.0 * mass * kb * r_c**2 * t_csl)


def derive_dissipative(params: DissipativeParams, m0: float = M0, hbar: float = HBAR,
                       kb: float = K_B) -> DissipativeDerived:
    """Relaxation rate ``chi`` and asymptotic energy ``h_as`` of dissipative CSL.

    The constants default to SI; pass ``hbar=1`` etc. for dimensionless work.
    """
    m, lam, r_c = params.mass, params.base.lam, params.base.r_c
    k = dissipation_k(m, r_c, params.t_csl, hbar, kb)
    chi = 4.0 * k * m**2 * lam / ((1.0 + k) ** 5 * m0**2)
    h_as = 3.0 * hbar**2 / (16.0 * k * m * r_c**2)
    return DissipativeDerived(k, chi, h_as)


def dissipative_energy(t, e0: float, derived: DissipativeDerived):
    """Exponential relaxation of the mean energy towards ``h_as``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    # e0 + (1 - exp(-chi t)) (h_as - e0), stable for chi * t << 1
    return e0 - np.expm1(-derived.chi * t) * (derived.h_as - e0)


def dissipative_initial_slope(e0: float, derived: DissipativeDerived) -> float:
    return derived.chi * (derived.h_as - e0)


def kernel_exponent(p, q, r_c: float, k: float, hbar: float = 1.0):
    """Log-weight of transferring momentum ``q`` to a particle of momentum ``p``.

    ``k = 0`` gives the non-dissipative kernel, independent of ``p``.
    """
    p, q = np.asarray(p), np.asarray(q)
    return -(r_c**2) / (2.0 * hbar**2) * ((1.0 + k) * q + 2.0 * k * p) ** 2


def dissipative_kernel_center(p, k: float):
    if k < 0:
        raise ValueError("k must be non-negative")
    return -2.0 * k * np.asarray(p) / (1.0 + k)


def kernel_argmax(p: float, k: float, r_c: float = 1.0, hbar: float = 1.0) -> float:
    """Golden-section search for the most likely momentum transfer."""
    span = 4.0 * (abs(p) + 1.0)
    res = minimize_scalar(lambda q: -kernel_exponent(p, q, r_c, k, hbar), bracket=(-span, 0.1, span),
                          method="golden", options={"xtol": 1e-15, "maxiter": 10_000})
    return float(res.x)
