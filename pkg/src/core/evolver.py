"""Explicit RK4 integration of the Brownian master equation on a periodic grid."""
import logging
import math
from typing import Optional

import numpy as np
from scipy import fft
from tqdm import tqdm

from ..models.density import DensityMatrixGrid, GridAxis
from ..models.evolution import DerivativeScheme, EvolutionResult, EvolverConfig, Potential
from ..models.params import PhysParams
from ..models.pattern import DiffractionPattern, PatternMethod
from .derivatives import make_derivative
from .errors import InvalidParameter, NaNDetected, UnstableConfig, ZeroTrace

logger = logging.getLogger(__name__)

# |lambda dt| bound kept inside the RK4 stability region
RK4_RADIUS = 2.5
BOUNDARY_FRACTION = 0.05
BOUNDARY_MASS_LIMIT = 1e-6
# share of spectral power allowed beyond SPECTRAL_BAND x pi/dx along x+ or x-
SPECTRAL_BAND = 2.0 / 3.0
SPECTRAL_TAIL_LIMIT = 1e-8


class BrownianOperator:
    """H_Brownian acting on rho(x+, x-) sampled on a square grid.

    (p+ - R x-/2)^2/2M - (p- + R x+/2)^2/2M with p = -i hbar d/dx, expanded as
    [-hbar^2 d+^2 + hbar^2 d-^2 + i hbar R (x- d+ + x+ d-) + R^2 (x-^2 - x+^2)/4] / 2M,
    plus U(x+) - U(x-) - i kBT R (x+ - x-)^2 / hbar.
    """

    def __init__(self, axis: GridAxis, params: PhysParams, potential: Optional[Potential] = None,
                 scheme: DerivativeScheme = DerivativeScheme.SPECTRAL, workers: int = 1):
        self.axis = axis
        self.params = params
        self.potential = potential or Potential.zero()
        self.scheme = scheme
        self.deriv = make_derivative(scheme, axis, workers)

        x = axis.points
        M, hbar, R, kBT = params.mass, params.hbar, params.friction, params.kBT
        self._xp = x[:, None]
        self._xm = x[None, :]
        u = self.potential.sample(axis)
        self._multiplier = (
            (R * R / (8.0 * M)) * (self._xm ** 2 - self._xp ** 2)
            + (u[:, None] - u[None, :])
            - 1j * (kBT * R / hbar) * (self._xp - self._xm) ** 2
        )
        self._u_range = float(np.ptp(u))

    def apply(self, values: np.ndarray) -> np.ndarray:
        """H_Brownian rho for a raw (n, n) array."""
        M, hbar, R = self.params.mass, self.params.hbar, self.params.friction
        d = self.deriv
        out = (hbar * hbar / (2.0 * M)) * (d.d2(values, along=1) - d.d2(values, along=0))
        if R != 0:
            out = out + (1j * hbar * R / (2.0 * M)) * (
                self._xm * d.d1(values, along=0) + self._xp * d.d1(values, along=1)
            )
        return out + self._multiplier * values

    def rate(self, values: np.ndarray) -> np.ndarray:
        """d rho / dt = -i H rho / hbar."""
        return (-1j / self.params.hbar) * self.apply(values)

    def spectral_radius(self) -> float:
        """Frozen-coefficient bound on |eigenvalue of H / hbar|."""
        M, hbar, R, kBT = self.params.mass, self.params.hbar, self.params.friction, self.params.kBT
        reach = max(abs(self.axis.x_min), abs(self.axis.x_max))
        k_eff = math.sqrt(max(self.deriv.max_second, self.deriv.max_wavenumber ** 2))
        k_shift = k_eff + R * reach / (2.0 * hbar)
        oscillation = hbar * k_shift ** 2 / (2.0 * M) + self._u_range / hbar
        damping = kBT * R * (2.0 * reach) ** 2 / (hbar * hbar)
        return math.hypot(oscillation, damping)


def apply_H_brownian(rho: DensityMatrixGrid, U: Optional[Potential], params: PhysParams,
                     scheme: DerivativeScheme = DerivativeScheme.SPECTRAL,
                     dt: Optional[float] = None, stability_c: float = 0.2,
                     workers: int = 1) -> DensityMatrixGrid:
    """Right-hand side H_Brownian rho.

    With `dt` given, the step is checked for stability and the state for grid resolution first.
    """
    op = BrownianOperator(rho.axis, params, U, scheme, workers)
    if dt is not None:
        check_stability(op, dt, stability_c)
        check_resolution(rho)
    return rho.with_values(op.apply(rho.values), operator="H_brownian")


def check_stability(op: BrownianOperator, dt: float, stability_c: float) -> None:
    """Raise UnstableConfig when dt breaks the diffusive bound or the RK4 region."""
    params = op.params
    bound = stability_c * params.mass * op.axis.dx ** 2 / params.hbar
    if dt > bound:
        raise UnstableConfig(
            f"dt = {dt:.6g} exceeds the stability bound c M dx^2 / hbar = {bound:.6g} "
            f"(c = {stability_c})"
        )
    radius = op.spectral_radius() * dt
    if radius > RK4_RADIUS:
        raise UnstableConfig(
            f"dt = {dt:.6g} puts the operator spectrum at |lambda dt| = {radius:.3g}, "
            f"outside the RK4 region (limit {RK4_RADIUS}); refine dt or shrink the domain"
        )


def _spectral_tail(axis: GridAxis, values: np.ndarray, band: float, workers: int = 1) -> float:
    power = np.abs(fft.fft2(values, workers=workers)) ** 2
    total = float(np.sum(power))
    if total == 0:
        return 0.0
    k = 2.0 * np.pi * np.abs(fft.fftfreq(axis.n, d=axis.dx))
    outer = k > band * np.pi / axis.dx
    return float(np.sum(power[outer[:, None] | outer[None, :]]) / total)


def spectral_tail(rho: DensityMatrixGrid, band: float = SPECTRAL_BAND) -> float:
    """Share of the spectral power of rho beyond `band` x pi/dx along x+ or x-."""
    return _spectral_tail(rho.axis, rho.values, band)


def check_resolution(rho: DensityMatrixGrid) -> None:
    """Raise UnstableConfig when the grid spacing does not resolve the state's momentum content."""
    tail = spectral_tail(rho)
    if tail > SPECTRAL_TAIL_LIMIT:
        raise UnstableConfig(
            f"state carries {tail:.3g} of its spectral power beyond {SPECTRAL_BAND:.3g} x pi/dx "
            f"(limit {SPECTRAL_TAIL_LIMIT:.0e}); the momentum content is unresolved, refine dx"
        )


def trace(rho: DensityMatrixGrid) -> complex:
    """Integral of the diagonal rho(x, x) (periodic trapezoid rule)."""
    return complex(np.sum(np.diagonal(rho.values)) * rho.axis.dx)


def normalized_expectation(rho: DensityMatrixGrid, observable) -> float:
    """tr(rho A) / tr(rho).

    A 1-D observable is a multiplication operator A(x); a 2-D one is a kernel A(x, y).
    """
    tr = trace(rho)
    if abs(tr) < 1e-12:
        raise ZeroTrace(f"trace {abs(tr):.3g} is too small to normalise an expectation")
    A = np.asarray(observable)
    dx = rho.axis.dx
    if A.ndim == 1:
        if A.shape != (rho.axis.n,):
            raise InvalidParameter("observable must be sampled on the density-matrix axis")
        num = np.sum(np.diagonal(rho.values) * A) * dx
    elif A.shape == rho.values.shape:
        num = np.sum(rho.values * A.T) * dx * dx
    else:
        raise InvalidParameter(f"observable shape {A.shape} does not match the grid")
    return float((num / tr).real)


def off_diagonal_mass(rho: DensityMatrixGrid, width: float) -> float:
    """Sum of |rho|^2 dx^2 over |x+ - x-| > width."""
    x = rho.axis.points
    mask = np.abs(x[:, None] - x[None, :]) > width
    return float(np.sum(np.abs(rho.values[mask]) ** 2) * rho.axis.dx ** 2)


def _edge_fraction(axis: GridAxis, values: np.ndarray, fraction: float) -> float:
    x = axis.points
    edge = fraction * axis.length
    near = (x < axis.x_min + edge) | (x > axis.x_max - edge)
    magnitude = np.abs(values)
    total = float(np.sum(magnitude))
    return float(np.sum(magnitude[near[:, None] | near[None, :]]) / total) if total > 0 else 0.0


def boundary_mass(rho: DensityMatrixGrid, fraction: float = BOUNDARY_FRACTION) -> float:
    """Share of sum |rho| lying within `fraction` of the domain length from an edge in x+ or x-.

    Off-diagonal coherence counts; at low temperature it spreads along x+ = -x-.
    """
    return _edge_fraction(rho.axis, rho.values, fraction)


def l2_distance(rho: DensityMatrixGrid, reference) -> float:
    """Discrete L2 norm of rho - reference."""
    ref = reference.values if isinstance(reference, DensityMatrixGrid) else np.asarray(reference)
    return float(np.sqrt(np.sum(np.abs(rho.values - ref) ** 2)) * rho.axis.dx)


def pattern_from_density(rho: DensityMatrixGrid, t: float, params: PhysParams) -> DiffractionPattern:
    """Screen density read off the diagonal of an evolved grid."""
    diag = np.diagonal(rho.values)
    peak = float(np.max(np.abs(diag.real))) or 1.0
    return DiffractionPattern(
        x=rho.axis.points, P=diag.real, method=PatternMethod.EVOLVER_DIAGONAL, t=t,
        params={"gamma": params.gamma}, imag_residual=float(np.max(np.abs(diag.imag)) / peak)
    )


def quadratic_potential(omega: float, params: PhysParams) -> Potential:
    """Harmonic well U = M omega^2 x^2 / 2."""
    return Potential.quadratic(params.mass * omega * omega)


def _support_and_speed(rho: DensityMatrixGrid, params: PhysParams):
    """Diagonal half-extent (|mean| + 3 std) and rms speed from the momentum density."""
    x = rho.axis.points
    diag = np.abs(np.diagonal(rho.values))
    mass = np.sum(diag)
    if mass == 0:
        return 0.0, 0.0
    mean = np.sum(x * diag) / mass
    std = math.sqrt(max(float(np.sum((x - mean) ** 2 * diag) / mass), 0.0))
    momentum = np.abs(np.diagonal(fft.ifft(fft.fft(rho.values, axis=0), axis=1)))
    k = 2.0 * np.pi * fft.fftfreq(rho.axis.n, d=rho.axis.dx)
    k_rms = math.sqrt(float(np.sum(k * k * momentum) / np.sum(momentum)))
    return abs(float(mean)) + 3.0 * std, params.hbar * k_rms / params.mass


def evolve(rho0: DensityMatrixGrid, U: Optional[Potential], params: PhysParams,
           cfg: EvolverConfig, progress: bool = False) -> EvolutionResult:
    """Classic RK4 on d rho/dt = -i H_Brownian rho / hbar with per-step diagnostics."""
    if rho0.axis != cfg.axis:
        raise InvalidParameter("initial state and evolver config use different grids")
    op = BrownianOperator(cfg.axis, params, U, cfg.scheme, cfg.threads)
    check_stability(op, cfg.dt, cfg.stability_c)
    check_resolution(rho0)

    support, speed = _support_and_speed(rho0, params)
    half_width = 0.5 * cfg.axis.length
    needed = 4.0 * support + speed * cfg.t_final
    if half_width < needed:
        logger.warning("domain half-width %.4g is below the padding rule 4 x support + v t = %.4g; "
                       "expect wrap-around", half_width, needed)

    n_steps = cfg.n_steps
    dt = cfg.dt
    stride = cfg.snapshot_stride or n_steps or 1
    values = rho0.values.copy()
    times = np.arange(n_steps + 1) * dt
    traces = np.empty(n_steps + 1, dtype=complex)
    herm = np.empty(n_steps + 1)
    edge = np.empty(n_steps + 1)
    snapshots = [rho0.with_values(values.copy(), t=0.0)]
    snapshot_times = [0.0]

    def record(i: int, v: np.ndarray) -> None:
        traces[i] = np.sum(np.diagonal(v)) * cfg.axis.dx
        herm[i] = float(np.max(np.abs(v - v.conj().T)))
        edge[i] = _edge_fraction(cfg.axis, v, BOUNDARY_FRACTION)
        if edge[i] > BOUNDARY_MASS_LIMIT:
            raise UnstableConfig(
                f"boundary mass {edge[i]:.3g} exceeds {BOUNDARY_MASS_LIMIT:.0e} at t = {i * dt:.4g}; "
                f"the state wraps around the periodic domain, widen the grid or shorten t_final"
            )
        tail = _spectral_tail(cfg.axis, v, SPECTRAL_BAND, cfg.threads)
        if tail > SPECTRAL_TAIL_LIMIT:
            raise UnstableConfig(
                f"spectral power {tail:.3g} beyond {SPECTRAL_BAND:.3g} x pi/dx at t = {i * dt:.4g}; "
                f"the momentum content outgrew the grid, refine dx"
            )

    record(0, values)
    logger.info("evolving %d steps of dt = %.4g on %d^2 grid (%s)", n_steps, dt, cfg.axis.n,
                cfg.scheme.value)
    for step in tqdm(range(1, n_steps + 1), desc="evolve", disable=not progress):
        k1 = op.rate(values)
        k2 = op.rate(values + 0.5 * dt * k1)
        k3 = op.rate(values + 0.5 * dt * k2)
        k4 = op.rate(values + dt * k3)
        values = values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(values)):
            raise NaNDetected(step)
        record(step, values)
        if step % stride == 0 or step == n_steps:
            snapshots.append(rho0.with_values(values.copy(), t=step * dt))
            snapshot_times.append(step * dt)

    result = EvolutionResult(
        times=times, traces=traces, hermiticity=herm, snapshots=snapshots,
        snapshot_times=snapshot_times, gamma=params.gamma, boundary_mass=edge
    )
    logger.info("final trace %.12g (predicted %.12g)", traces[-1].real,
                traces[0].real * math.exp(-params.gamma * times[-1]))
    return result


def velocity_commutator_residual(f: np.ndarray, axis: GridAxis, params: PhysParams,
                                 scheme: DerivativeScheme = DerivativeScheme.SPECTRAL) -> float:
    """max |(v+ v- - v- v+) f - (i hbar R / M^2) f| with
    v+ = (p+ - R x-/2)/M and v- = -(p- + R x+/2)/M."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (axis.n, axis.n):
        raise InvalidParameter("test function must be sampled on the (x+, x-) grid")
    d = make_derivative(scheme, axis)
    M, hbar, R = params.mass, params.hbar, params.friction
    x = axis.points
    xp, xm = x[:, None], x[None, :]

    def v_plus(g):
        return (-1j * hbar * d.d1(g, along=0) - 0.5 * R * xm * g) / M

    def v_minus(g):
        return -(-1j * hbar * d.d1(g, along=1) + 0.5 * R * xp * g) / M

    commutator = v_plus(v_minus(f)) - v_minus(v_plus(f))
    return float(np.max(np.abs(commutator - (1j * hbar * R / M ** 2) * f)))
