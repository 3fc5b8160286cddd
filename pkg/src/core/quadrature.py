"""Slit amplitude integrals J(l) = int phi(x' - a) exp(i (q x'^2 - l x')) dx'.

Every screen-pattern and kernel-propagation route reduces to these one-dimensional
integrals over a single slit, evaluated either by adaptive Gauss-Kronrod quadrature or in
closed form (Fresnel integrals for top-hats, Gaussian integrals for Gaussian slits).
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy import integrate, special

from ..config.settings import NumericsConfig
from ..models.density import AnalyticDensity
from .errors import InvalidParameter, QuadratureFailure

logger = logging.getLogger(__name__)

GAUSSIAN_REACH = 12.0


@dataclass(frozen=True)
class QuadConfig:
    """Adaptive quadrature settings.

    `epsabs` is relative to the largest attainable amplitude of the integral, `limit` is
    the subinterval budget per block and `block` fixes how sample positions are grouped,
    so results do not depend on `threads`.
    """
    epsabs: float = 1e-9
    epsrel: float = 1e-10
    limit: int = 200
    threads: int = 1
    block: int = 512

    def __post_init__(self):
        if not self.epsabs > 0:
            raise InvalidParameter("quadrature epsabs must be positive")
        if self.limit < 10:
            raise InvalidParameter("quadrature limit must be at least 10")
        if self.threads < 1 or self.block < 1:
            raise InvalidParameter("threads and block must be positive")

    @classmethod
    def from_numerics(cls, numerics: NumericsConfig) -> 'QuadConfig':
        return cls(epsabs=numerics.quad_epsabs, limit=numerics.quad_limit, threads=numerics.threads)


def _cell(rho0: AnalyticDensity, center: float) -> Tuple[float, float]:
    reach = rho0.half_width if rho0.shape == "tophat" else GAUSSIAN_REACH * rho0.sigma
    return center - reach, center + reach


def _amplitude_scale(rho0: AnalyticDensity) -> float:
    """Upper bound on |J|: the L1 norm of the slit profile."""
    if rho0.shape == "tophat":
        return math.sqrt(rho0.width)
    return (8.0 * math.pi * rho0.sigma ** 2) ** 0.25


def _quad_block(rho0: AnalyticDensity, center: float, linear: np.ndarray, quadratic: float,
                cfg: QuadConfig) -> np.ndarray:
    lo, hi = _cell(rho0, center)
    m = linear.size

    def integrand(xp: float) -> np.ndarray:
        phase = quadratic * xp * xp - linear * xp
        amp = float(rho0.profile(xp - center))
        out = np.empty(2 * m)
        out[:m] = amp * np.cos(phase)
        out[m:] = amp * np.sin(phase)
        return out

    value, _, info = integrate.quad_vec(
        integrand, lo, hi,
        epsabs=cfg.epsabs * _amplitude_scale(rho0),
        epsrel=cfg.epsrel,
        norm="max",
        limit=cfg.limit,
        full_output=True
    )
    if info.status != 0:
        raise QuadratureFailure(
            f"slit integral over [{lo:.6g}, {hi:.6g}] did not converge within "
            f"{cfg.limit} subintervals (status {info.status})"
        )
    return value[:m] + 1j * value[m:]


def quad_amplitude(rho0: AnalyticDensity, center: float, linear, quadratic: float,
                   cfg: QuadConfig) -> np.ndarray:
    """Adaptive Gauss-Kronrod evaluation of J for every entry of `linear`."""
    linear = np.asarray(linear, dtype=float)
    flat = linear.ravel()
    blocks = [flat[i:i + cfg.block] for i in range(0, flat.size, cfg.block)]
    if cfg.threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(lambda b: _quad_block(rho0, center, b, quadratic, cfg), blocks))
    else:
        parts = [_quad_block(rho0, center, b, quadratic, cfg) for b in blocks]
    result = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    return result.reshape(linear.shape)


def analytic_amplitude(rho0: AnalyticDensity, center: float, linear, quadratic: float) -> np.ndarray:
    """Closed-form J: Fresnel integrals for top-hats, a Gaussian integral otherwise."""
    linear = np.asarray(linear, dtype=float)
    if rho0.shape == "gaussian":
        s2 = rho0.sigma ** 2
        alpha = 1.0 / (4.0 * s2) - 1j * quadratic
        b = center / (2.0 * s2) - 1j * linear
        norm = (2.0 * math.pi * s2) ** -0.25
        return norm * np.sqrt(np.pi / alpha) * np.exp(b * b / (4.0 * alpha) - center ** 2 / (4.0 * s2))

    if not quadratic > 0:
        raise InvalidParameter("closed-form slit amplitude needs a positive quadratic coefficient")
    lo, hi = _cell(rho0, center)
    shift = linear / (2.0 * quadratic)
    scale = math.sqrt(2.0 * quadratic / math.pi)
    s_hi, c_hi = special.fresnel((hi - shift) * scale)
    s_lo, c_lo = special.fresnel((lo - shift) * scale)
    span = (c_hi - c_lo) + 1j * (s_hi - s_lo)
    return (span / scale) * np.exp(-1j * linear * shift / 2.0) / math.sqrt(rho0.width)


def slit_amplitudes(rho0: AnalyticDensity, linear, quadratic: float, cfg: QuadConfig,
                    route: str = "quad") -> Dict[float, np.ndarray]:
    """J for each distinct slit centre of `rho0`, keyed by centre."""
    centers = sorted({c for t in rho0.terms for c in (t.center_plus, t.center_minus)})
    out = {}
    for c in centers:
        if route == "quad":
            out[c] = quad_amplitude(rho0, c, linear, quadratic, cfg)
        elif route == "analytic":
            out[c] = analytic_amplitude(rho0, c, linear, quadratic)
        else:
            raise InvalidParameter(f"unknown amplitude route {route!r}")
    logger.debug("slit amplitudes via %s for %d centres, %d samples", route, len(centers),
                 np.size(linear))
    return out


def combine_terms(rho0: AnalyticDensity, amp_plus: Dict[float, np.ndarray],
                  amp_minus: Dict[float, np.ndarray]) -> np.ndarray:
    """sum_terms c * J_a(plus) * conj(J_b(minus))."""
    total = None
    for term in rho0.terms:
        contrib = term.weight * amp_plus[term.center_plus] * np.conj(amp_minus[term.center_minus])
        total = contrib if total is None else total + contrib
    return total
