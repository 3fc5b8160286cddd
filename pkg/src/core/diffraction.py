"""Frictionless two-slit screen patterns by independent routes, plus the damped
far-field pattern obtained by rescaling time."""
import logging
import math
from typing import Any, Dict, Optional

import numpy as np

from ..models.density import AnalyticDensity
from ..models.geometry import PatternParams
from ..models.params import PhysParams
from ..models.pattern import DiffractionPattern, PatternMethod
from .errors import InvalidParameter, NonpositiveTime
from .physics import renormalized_time
from .quadrature import QuadConfig, combine_terms, slit_amplitudes

logger = logging.getLogger(__name__)

CONVENTIONS = ("derived", "printed")
DEFAULT_SAMPLES = 1024


def require_time(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise NonpositiveTime(f"time must be positive, got {t}")
    return t


def action_free(dx, t: float, params: PhysParams):
    """Free-particle Hamilton-Jacobi action M dx^2 / 2t."""
    t = require_time(t)
    return params.mass * np.square(dx) / (2.0 * t)


def provenance(rho0: AnalyticDensity, t: float, params: PhysParams) -> Dict[str, Any]:
    """K, beta and gamma recorded alongside a pattern; K is NaN for a single centred slit."""
    d = max(abs(c) for term in rho0.terms for c in (term.center_plus, term.center_minus))
    if d > 0:
        K = params.mass * d / (params.hbar * t)
        beta = rho0.width / d
    else:
        K = beta = float("nan")
    return {"K": K, "beta": beta, "gamma": params.gamma}


def default_samples(pp: PatternParams, n: int = DEFAULT_SAMPLES) -> np.ndarray:
    """n uniform screen positions over K x in [-6 pi, 6 pi]."""
    half = 6.0 * math.pi / pp.K
    return np.linspace(-half, half, n)


def fresnel_pattern(rho0: AnalyticDensity, t: float, xs, params: PhysParams,
                    quad_cfg: Optional[QuadConfig] = None, route: str = "quad") -> np.ndarray:
    """Complex sum behind the near-field pattern; the real part is P(x)."""
    t = require_time(t)
    xs = np.asarray(xs, dtype=float)
    quad_cfg = quad_cfg or QuadConfig()
    q = params.mass / (2.0 * params.hbar * t)
    amps = slit_amplitudes(rho0, 2.0 * q * xs, q, quad_cfg, route=route)
    pref = params.mass / (2.0 * math.pi * params.hbar * t)
    return pref * combine_terms(rho0, amps, amps)


def finish_pattern(raw: np.ndarray, xs: np.ndarray, method: PatternMethod, t: float,
            meta: Dict[str, Any]) -> DiffractionPattern:
    P = raw.real
    peak = float(np.max(np.abs(P))) if P.size else 0.0
    residual = float(np.max(np.abs(raw.imag)) / peak) if peak > 0 else 0.0
    if residual > 1e-8:
        logger.warning("%s pattern has relative imaginary residual %.3g", method.value, residual)
    return DiffractionPattern(x=xs, P=P, method=method, t=t, params=meta, imag_residual=residual)


def pattern_exact(rho0: AnalyticDensity, t: float, xs, params: PhysParams,
                  quad_cfg: Optional[QuadConfig] = None) -> DiffractionPattern:
    """Near-field pattern from the free Fresnel kernel, by adaptive quadrature per slit cell."""
    xs = np.asarray(xs, dtype=float)
    raw = fresnel_pattern(rho0, t, xs, params, quad_cfg, route="quad")
    return finish_pattern(raw, xs, PatternMethod.EXACT_FRESNEL, t, provenance(rho0, t, params))


def pattern_fresnel(rho0: AnalyticDensity, t: float, xs, params: PhysParams) -> DiffractionPattern:
    """Near-field pattern with each slit integral in closed form (Fresnel integrals)."""
    xs = np.asarray(xs, dtype=float)
    raw = fresnel_pattern(rho0, t, xs, params, route="analytic")
    return finish_pattern(raw, xs, PatternMethod.FRESNEL_CLOSED_FORM, t, provenance(rho0, t, params))


def _slit_spectrum(rho0: AnalyticDensity, kappa: np.ndarray) -> np.ndarray:
    """|Fourier transform|^2 of one slit profile at wavenumber kappa."""
    if rho0.shape == "tophat":
        w = rho0.width
        return w * np.sinc(kappa * w / (2.0 * math.pi)) ** 2
    s = rho0.sigma
    return math.sqrt(8.0 * math.pi) * s * np.exp(-2.0 * (s * kappa) ** 2)


def farfield_values(rho0: AnalyticDensity, t: float, xs, params: PhysParams) -> np.ndarray:
    """(M/2 pi hbar t) |phi~(kappa)|^2 sum_terms c exp(-i kappa (a - b)), kappa = M x / hbar t."""
    t = require_time(t)
    xs = np.asarray(xs, dtype=float)
    kappa = params.mass * xs / (params.hbar * t)
    mix = np.zeros(xs.shape, dtype=complex)
    for term in rho0.terms:
        mix += term.weight * np.exp(-1j * kappa * (term.center_plus - term.center_minus))
    pref = params.mass / (2.0 * math.pi * params.hbar * t)
    return pref * _slit_spectrum(rho0, kappa) * mix


def pattern_farfield(rho0: AnalyticDensity, t: float, xs, params: PhysParams,
                     quad_cfg: Optional[QuadConfig] = None) -> DiffractionPattern:
    """Far-field pattern with the linearised kernel phase, integrated per term analytically."""
    xs = np.asarray(xs, dtype=float)
    raw = farfield_values(rho0, t, xs, params)
    return finish_pattern(raw, xs, PatternMethod.FAR_FIELD, t, provenance(rho0, t, params))


def closed_form_values(pp: PatternParams, xs, convention: str = "derived") -> np.ndarray:
    """Two-slit closed form.

    derived: (beta K / pi) cos^2(K x) sinc^2(beta K x / 2), the exact far-field integral.
    printed: (4 beta K / pi) cos^2(K x) sinc^2(beta K x), zeros at K x = k pi / beta.
    """
    if convention not in CONVENTIONS:
        raise InvalidParameter(f"unknown closed-form convention {convention!r}")
    xs = np.asarray(xs, dtype=float)
    K, beta = pp.K, pp.beta
    fringes = np.cos(K * xs) ** 2
    # np.sinc(u) = sin(pi u)/(pi u) carries the x -> 0 limit
    if convention == "derived":
        return (beta * K / math.pi) * fringes * np.sinc(beta * K * xs / (2.0 * math.pi)) ** 2
    return (4.0 * beta * K / math.pi) * fringes * np.sinc(beta * K * xs / math.pi) ** 2


def pattern_closed_form(pp: PatternParams, xs, convention: str = "derived") -> DiffractionPattern:
    xs = np.asarray(xs, dtype=float)
    P = closed_form_values(pp, xs, convention)
    meta = {"K": pp.K, "beta": pp.beta, "gamma": 0.0, "convention": convention}
    return DiffractionPattern(x=xs, P=P, method=PatternMethod.CLOSED_FORM, t=float("nan"), params=meta)


def pattern_damped_rescaled(rho0: AnalyticDensity, t: float, xs, params: PhysParams,
                            quad_cfg: Optional[QuadConfig] = None) -> DiffractionPattern:
    """exp(-gamma t) times the frictionless far-field pattern at the renormalised time tau."""
    t = require_time(t)
    tau = renormalized_time(t, params)
    base = pattern_farfield(rho0, tau, xs, params, quad_cfg)
    decay = math.exp(-params.gamma * t)
    meta = dict(base.params)
    meta["tau"] = tau
    return DiffractionPattern(
        x=base.x, P=decay * base.P, method=PatternMethod.DAMPED_RESCALED, t=t,
        params=meta, imag_residual=base.imag_residual
    )


def relative_deviation(a, b, floor: float = 1e-3) -> np.ndarray:
    """|a - b| / max(|a|, |b|, floor * peak), peak taken over both arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    peak = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor * peak)
    with np.errstate(invalid="ignore", divide="ignore"):
        dev = np.where(denom > 0, np.abs(a - b) / denom, 0.0)
    return dev


def principal_maxima(pp: PatternParams, k_max: int = 5) -> np.ndarray:
    """Fringe maxima x_k = k pi / K, k = 1..k_max."""
    return np.arange(1, k_max + 1) * math.pi / pp.K


def fringe_zeros(pp: PatternParams, k_max: int = 5) -> np.ndarray:
    """Zeros of cos^2(K x) at K x = (k + 1/2) pi, k = 0..k_max."""
    return (np.arange(0, k_max + 1) + 0.5) * math.pi / pp.K


def envelope_nulls(pp: PatternParams, k_max: int = 3, convention: str = "derived") -> np.ndarray:
    """Zeros of the single-slit envelope: K x = 2 k pi / beta (derived) or k pi / beta (printed)."""
    if convention not in CONVENTIONS:
        raise InvalidParameter(f"unknown closed-form convention {convention!r}")
    step = 2.0 if convention == "derived" else 1.0
    return step * np.arange(1, k_max + 1) * math.pi / (pp.beta * pp.K)
