"""Zero-temperature dissipative propagator K0 = exp(i Phi) F0 and the damped screen pattern."""
import logging
import math
from typing import Optional, Tuple

import numpy as np

from ..models.density import AnalyticDensity, DensityMatrixGrid, GridAxis
from ..models.kernel import KernelEval
from ..models.params import PhysParams
from ..models.pattern import DiffractionPattern, PatternMethod
from .diffraction import finish_pattern, provenance, require_time
from .errors import InvalidParameter
from .physics import SERIES_LIMIT, renormalized_time
from .quadrature import QuadConfig, combine_terms, slit_amplitudes

logger = logging.getLogger(__name__)

KERNEL_FORMS = ("exact", "coth_free")

__all__ = [
    "phase_Phi", "envelope_F0", "kernel_K0", "renormalized_time", "kernel_coefficients",
    "pattern_damped_kernel", "propagate_density", "propagate_gaussian", "kernel_pde_residual"
]


def phase_Phi(x_plus, x_minus, xp_plus, xp_minus, params: PhysParams):
    """Dissipative flux phase (R/2 hbar)(x+ x-' - x- x+')."""
    r = params.friction / (2.0 * params.hbar)
    return r * (np.multiply(x_plus, xp_minus) - np.multiply(x_minus, xp_plus))


def _envelope_coefficients(t: float, params: PhysParams) -> Tuple[float, float]:
    """(modulus, q) with F0 = modulus * exp(i q (x+^2 - x-^2))."""
    M, hbar, g = params.mass, params.hbar, params.gamma
    gt = g * t
    if gt < SERIES_LIMIT:
        return M / (2.0 * math.pi * hbar * t), M / (2.0 * hbar * t)
    return (M * g / (2.0 * math.pi * hbar * math.sinh(gt)),
            M * g / (2.0 * hbar * math.tanh(gt)))


def envelope_F0(x_plus, x_minus, t: float, params: PhysParams):
    """Relative-coordinate factor of the zero-temperature kernel; the free kernel below gamma t = 1e-6."""
    t = require_time(t)
    modulus, q = _envelope_coefficients(t, params)
    return modulus * np.exp(1j * q * (np.square(x_plus) - np.square(x_minus)))


def kernel_K0(x_plus, xp_plus, x_minus, xp_minus, t: float, params: PhysParams) -> KernelEval:
    """K0(x+, x+', x-, x-', t) = exp(i Phi) F0(x+ - x+', x- - x-', t)."""
    phase = phase_Phi(x_plus, x_minus, xp_plus, xp_minus, params)
    envelope = envelope_F0(np.subtract(x_plus, xp_plus), np.subtract(x_minus, xp_minus), t, params)
    return KernelEval(value=np.exp(1j * phase) * envelope, phase=phase, envelope=envelope)


def kernel_coefficients(t: float, params: PhysParams, form: str = "exact") -> Tuple[float, float, float]:
    """(prefactor, linear, quadratic) of the diagonal kernel.

    K0(x, x+', x, x-') = prefactor * exp(i[-linear x (x+' - x-') + quadratic (x+'^2 - x-'^2)]).
    The coth-free form drops coth(gamma t) from the cross term, so linear = 2 M gamma / hbar.
    """
    if form not in KERNEL_FORMS:
        raise InvalidParameter(f"unknown kernel form {form!r}")
    t = require_time(t)
    modulus, q = _envelope_coefficients(t, params)
    if params.gamma * t < SERIES_LIMIT:
        return modulus, 2.0 * q, q
    r = params.friction / (2.0 * params.hbar)
    if form == "exact":
        return modulus, r + 2.0 * q, q
    return modulus, 2.0 * r, q


def _diagonal_pattern(rho0: AnalyticDensity, t: float, xs: np.ndarray, params: PhysParams,
                      quad_cfg: QuadConfig, form: str, route: str) -> np.ndarray:
    pref, linear, q = kernel_coefficients(t, params, form)
    amps = slit_amplitudes(rho0, linear * xs, q, quad_cfg, route=route)
    return pref * combine_terms(rho0, amps, amps)


def pattern_damped_kernel(rho0: AnalyticDensity, t: float, xs, params: PhysParams,
                          quad_cfg: Optional[QuadConfig] = None,
                          route: str = "quad") -> DiffractionPattern:
    """Zero-temperature damped pattern P(x, t) = rho(x, x, t) through the full kernel.

    The returned pattern carries the coth-free cross-term variant as its `companion`
    (method tag DampedPaper50a).
    """
    t = require_time(t)
    xs = np.asarray(xs, dtype=float)
    quad_cfg = quad_cfg or QuadConfig()
    meta = provenance(rho0, t, params)
    meta["tau"] = renormalized_time(t, params)

    full = _diagonal_pattern(rho0, t, xs, params, quad_cfg, "exact", route)
    exact = finish_pattern(full, xs, PatternMethod.DAMPED_KERNEL, t, dict(meta))
    coth_free = _diagonal_pattern(rho0, t, xs, params, quad_cfg, "coth_free", route)
    simplified = finish_pattern(coth_free, xs, PatternMethod.DAMPED_COTH_FREE, t, dict(meta))
    exact.companion = simplified

    peak = exact.peak
    if peak > 0:
        gap = float(np.max(np.abs(exact.P - simplified.P)) / peak)
        logger.info("damped kernel vs coth-free form at gamma t = %.4g: max gap %.3g of peak",
                    params.gamma * t, gap)
    return exact


def propagate_density(rho0: AnalyticDensity, axis: GridAxis, t: float, params: PhysParams,
                      quad_cfg: Optional[QuadConfig] = None, route: str = "quad") -> DensityMatrixGrid:
    """Full rho(x+, x-, t) on a grid from the zero-temperature kernel.

    The kernel's quadratic form is diagonal in (x+', x-'), so each product term reduces to
    slit integrals with linear coefficients 2q x+ + r x- and 2q x- + r x+.
    """
    t = require_time(t)
    quad_cfg = quad_cfg or QuadConfig()
    modulus, q = _envelope_coefficients(t, params)
    r = params.friction / (2.0 * params.hbar)
    x = axis.points
    xp, xm = np.meshgrid(x, x, indexing="ij")

    amp_plus = slit_amplitudes(rho0, 2.0 * q * xp + r * xm, q, quad_cfg, route=route)
    amp_minus = slit_amplitudes(rho0, 2.0 * q * xm + r * xp, q, quad_cfg, route=route)
    values = modulus * np.exp(1j * q * (xp ** 2 - xm ** 2)) * combine_terms(rho0, amp_plus, amp_minus)
    return DensityMatrixGrid(axis=axis, values=values,
                             metadata={"source": "kernel", "t": t, "route": route})


def propagate_gaussian(x_plus, x_minus, t: float, params: PhysParams,
                       x0: float = 0.0, sigma: float = 1.0, k0: float = 0.0) -> np.ndarray:
    """Closed-form zero-temperature evolution of the pure Gaussian packet.

    The initial state is psi(x+) conj(psi(x-)) with psi = (2 pi sigma^2)^(-1/4)
    exp(-(x - x0)^2 / 4 sigma^2 + i k0 x).
    """
    t = require_time(t)
    if not sigma > 0:
        raise InvalidParameter("sigma must be positive")
    x_plus = np.asarray(x_plus, dtype=float)
    x_minus = np.asarray(x_minus, dtype=float)
    modulus, q = _envelope_coefficients(t, params)
    r = params.friction / (2.0 * params.hbar)
    s2 = sigma * sigma
    alpha = 1.0 / (4.0 * s2) - 1j * q
    norm = (2.0 * math.pi * s2) ** -0.25

    def amplitude(linear):
        b = x0 / (2.0 * s2) + 1j * (k0 - linear)
        return norm * np.sqrt(np.pi / alpha) * np.exp(b * b / (4.0 * alpha) - x0 * x0 / (4.0 * s2))

    plus = amplitude(2.0 * q * x_plus + r * x_minus)
    minus = amplitude(2.0 * q * x_minus + r * x_plus)
    return modulus * np.exp(1j * q * (x_plus ** 2 - x_minus ** 2)) * plus * np.conj(minus)


def _central4(f, x, h):
    """Fourth-order first and second central differences of f at x."""
    f_m2, f_m1, f_0, f_p1, f_p2 = (f(x + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (f_m2 - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * h)
    d2 = (-f_m2 + 16.0 * f_m1 - 30.0 * f_0 + 16.0 * f_p1 - f_p2) / (12.0 * h * h)
    return d1, d2


def kernel_pde_residual(x_plus, x_minus, xp_plus, xp_minus, t: float, params: PhysParams,
                        h: float = 1e-2, ht: Optional[float] = None) -> np.ndarray:
    """Relative residual |i hbar dK/dt - H0 K| of the zero-temperature, U = 0 operator.

    Derivatives are fourth-order central differences; the residual is scaled by the
    largest individual term so it reads as a relative error.
    """
    t = require_time(t)
    ht = ht if ht is not None else 1e-3 * t
    if ht >= t / 2:
        raise InvalidParameter("time step of the difference stencil must be below t/2")
    M, hbar, R = params.mass, params.hbar, params.friction
    x_plus = np.asarray(x_plus, dtype=float)
    x_minus = np.asarray(x_minus, dtype=float)

    def k_plus(xv):
        return kernel_K0(xv, xp_plus, x_minus, xp_minus, t, params).value

    def k_minus(xv):
        return kernel_K0(x_plus, xp_plus, xv, xp_minus, t, params).value

    def k_time(tv):
        return kernel_K0(x_plus, xp_plus, x_minus, xp_minus, tv, params).value

    value = k_time(t)
    dp1, dp2 = _central4(k_plus, x_plus, h)
    dm1, dm2 = _central4(k_minus, x_minus, h)
    dt1, _ = _central4(k_time, t, ht)

    terms = [
        -hbar ** 2 * dp2 / (2.0 * M),
        hbar ** 2 * dm2 / (2.0 * M),
        1j * hbar * R * x_minus * dp1 / (2.0 * M),
        1j * hbar * R * x_plus * dm1 / (2.0 * M),
        (R * R / (8.0 * M)) * (x_minus ** 2 - x_plus ** 2) * value,
    ]
    lhs = 1j * hbar * dt1
    rhs = sum(terms)
    scale = np.maximum.reduce([np.abs(lhs)] + [np.abs(term) for term in terms])
    return np.abs(lhs - rhs) / scale
