"""Counter-based Gaussian noise streams and Monte Carlo checks of the noise statistics."""
import logging
import math
from dataclasses import dataclass

import numpy as np

from ..models.params import PhysParams
from ..models.stochastic import CorrelatorDiagnostics, NoiseAverageResult
from .errors import InvalidParameter, ZeroFriction, ZeroTemperature

logger = logging.getLogger(__name__)

MIN_NOISE_SAMPLES = 1000


def substream(seed: int, index: int) -> np.random.Generator:
    """Philox generator keyed by (seed, index); independent of how work is scheduled."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


@dataclass(frozen=True)
class NoiseStream:
    """White-noise source for one trajectory.

    The random force has per-step variance 2 R kBT / dt so that <f_i f_j> = (2 R kBT / dt)
    delta_ij; the conjugate coordinate y has per-step variance hbar^2 / (2 R kBT dt).
    """
    seed: int
    index: int
    params: PhysParams
    dt: float

    @property
    def force_variance(self) -> float:
        return 2.0 * self.params.friction * self.params.kBT / self.dt

    @property
    def y_variance(self) -> float:
        strength = 2.0 * self.params.friction * self.params.kBT
        if self.params.kBT == 0:
            raise ZeroTemperature("the y-correlator diverges at T = 0")
        if self.params.friction == 0:
            raise ZeroFriction("the y-correlator needs R > 0")
        return self.params.hbar ** 2 / (strength * self.dt)

    def forces(self, n_steps: int) -> np.ndarray:
        rng = substream(self.seed, self.index)
        return math.sqrt(self.force_variance) * rng.standard_normal(n_steps)

    def ys(self, n_steps: int) -> np.ndarray:
        rng = substream(self.seed, self.index)
        return math.sqrt(self.y_variance) * rng.standard_normal(n_steps)


def noise_average_check(y, dt: float, params: PhysParams, n_samples: int = 10_000,
                        seed: int = 0) -> NoiseAverageResult:
    """Monte Carlo <exp(i/hbar sum y_i f_i dt)> against exp(-kBT R sum y_i^2 dt / hbar^2)."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise InvalidParameter("y must be a 1-D path on a uniform time grid")
    if not dt > 0:
        raise InvalidParameter(f"dt must be positive, got {dt}")
    if n_samples < MIN_NOISE_SAMPLES:
        raise InvalidParameter(f"n_samples must be at least {MIN_NOISE_SAMPLES}, got {n_samples}")

    sd = math.sqrt(2.0 * params.friction * params.kBT / dt)
    rng = substream(seed, 0)
    forces = sd * rng.standard_normal((n_samples, y.size))
    action = forces @ y * dt
    samples = np.exp(1j * action / params.hbar)
    lhs = complex(np.mean(samples))
    root_n = math.sqrt(n_samples)
    rhs = math.exp(-params.kBT * params.friction * float(np.sum(y * y)) * dt / params.hbar ** 2)
    result = NoiseAverageResult(
        lhs=lhs,
        stderr_re=float(np.std(samples.real, ddof=1) / root_n),
        stderr_im=float(np.std(samples.imag, ddof=1) / root_n),
        rhs=rhs,
        n_samples=n_samples
    )
    logger.debug("noise average lhs %s rhs %.6g", lhs, rhs)
    return result


def y_correlator_check(params: PhysParams, dt: float, n_samples: int = 10_000, seed: int = 0,
                       n_times: int = 64) -> CorrelatorDiagnostics:
    """Empirical same-time variance and lag-1 correlation of discretised y samples."""
    if params.kBT == 0:
        raise ZeroTemperature("the y-correlator hbar^2/(2 R kBT) diverges at T = 0")
    if params.friction == 0:
        raise ZeroFriction("the y-correlator needs R > 0")
    if not dt > 0:
        raise InvalidParameter(f"dt must be positive, got {dt}")
    if n_samples < MIN_NOISE_SAMPLES or n_times < 2:
        raise InvalidParameter("need at least 1000 samples and 2 time points")

    stream = NoiseStream(seed=seed, index=0, params=params, dt=dt)
    expected = stream.y_variance
    y = stream.ys(n_samples * n_times).reshape(n_samples, n_times)

    squares = (y * y).ravel()
    variance = float(np.mean(squares))
    variance_stderr = float(np.std(squares, ddof=1) / math.sqrt(squares.size))
    products = (y[:, :-1] * y[:, 1:]).ravel() / expected
    lag1 = float(np.mean(products))
    lag1_stderr = float(np.std(products, ddof=1) / math.sqrt(products.size))
    return CorrelatorDiagnostics(
        variance=variance, variance_stderr=variance_stderr, expected_variance=expected,
        lag1=lag1, lag1_stderr=lag1_stderr, dt=dt, n_samples=n_samples
    )
