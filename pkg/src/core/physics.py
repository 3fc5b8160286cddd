"""Derived scales of the Brownian model and the quantum/classical regime classifier."""
import logging
import math
from typing import Any, Dict

from ..models.params import PhysParams, Regime, RegimeTag
from .errors import InvalidParameter, ZeroFriction

logger = logging.getLogger(__name__)


def gamma(params: PhysParams) -> float:
    """Damping rate R/2M."""
    return params.gamma


def crossover_temperature(params: PhysParams) -> float:
    """Crossover thermal energy k_B T_gamma = hbar * gamma."""
    return params.hbar * params.gamma


def quantum_diffusion_scale(params: PhysParams) -> float:
    """hbar/2M, the scale the Einstein coefficient is compared with."""
    return params.hbar / (2.0 * params.mass)


def einstein_diffusion(params: PhysParams) -> float:
    """Einstein coefficient D = kBT/R."""
    if params.friction == 0:
        raise ZeroFriction("Einstein relation D = kBT/R is undefined for R = 0")
    return params.kBT / params.friction


def classify_regime(params: PhysParams, threshold: float = 10.0) -> Regime:
    """Tag the regime from ratio = kBT/(hbar gamma).

    Quantum below 1/threshold, Classical above threshold, Crossover in between.
    """
    if params.friction == 0:
        raise ZeroFriction("regime classification needs R > 0")
    if not threshold > 1:
        raise InvalidParameter(f"regime threshold must exceed 1, got {threshold}")

    ratio = params.kBT / crossover_temperature(params)
    if ratio < 1.0 / threshold:
        tag = RegimeTag.QUANTUM
    elif ratio > threshold:
        tag = RegimeTag.CLASSICAL
    else:
        tag = RegimeTag.CROSSOVER
    logger.debug("regime ratio %.6g -> %s (threshold %g)", ratio, tag.value, threshold)
    return Regime(tag=tag, ratio=ratio)


def regime_report(params: PhysParams, threshold: float = 10.0) -> Dict[str, Any]:
    """Summary {gamma, T_gamma_energy, D, ratio, regime} printed by the regime command."""
    regime = classify_regime(params, threshold)
    return {
        "gamma": gamma(params),
        "T_gamma_energy": crossover_temperature(params),
        "D": einstein_diffusion(params),
        "ratio": regime.ratio,
        "regime": regime.tag.value
    }


SERIES_LIMIT = 1e-6
SATURATION_LIMIT = 50.0


def renormalized_time(t: float, params: PhysParams) -> float:
    """tau with gamma tau = exp(-gamma t) sinh(gamma t); tau = t when gamma = 0."""
    if t < 0:
        raise InvalidParameter(f"time must be non-negative, got {t}")
    g = params.gamma
    x = g * t
    if x < SERIES_LIMIT:
        return t * (1.0 - x + 2.0 * x * x / 3.0)
    if x > SATURATION_LIMIT:
        return 0.5 / g
    return -math.expm1(-2.0 * x) / (2.0 * g)
