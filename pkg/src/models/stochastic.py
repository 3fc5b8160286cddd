from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
import pandas as pd

from ..core.errors import InvalidParameter
from .fields import as_float, as_int


@dataclass(frozen=True)
class LangevinConfig:
    """Step size, ensemble size, seed and initial condition for Langevin runs."""
    dt: float
    n_steps: int
    n_ensembles: int = 10_000
    seed: int = 0
    x0: float = 0.0
    v0: float = 0.0
    record_every: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameter(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1:
            raise InvalidParameter("n_steps must be at least 1")
        if self.n_ensembles < 100:
            raise InvalidParameter(f"n_ensembles must be at least 100, got {self.n_ensembles}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidParameter("seed must fit in 64 unsigned bits")
        if self.record_every < 0:
            raise InvalidParameter("record_every must be non-negative")

    @property
    def stride(self) -> int:
        """Recording stride; 0 picks one giving at most ~500 records."""
        if self.record_every:
            return self.record_every
        return max(1, self.n_steps // 500)

    @property
    def t_final(self) -> float:
        return self.n_steps * self.dt

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LangevinConfig':
        try:
            return cls(
                dt=as_float("dt", data["dt"]),
                n_steps=as_int("n_steps", data["n_steps"]),
                n_ensembles=as_int("n_ensembles", data.get("n_ensembles", 10_000)),
                seed=as_int("seed", data.get("seed", 0)),
                x0=as_float("x0", data.get("x0", 0.0)),
                v0=as_float("v0", data.get("v0", 0.0)),
                record_every=as_int("record_every", data.get("record_every", 0))
            )
        except KeyError as e:
            raise InvalidParameter(f"langevin block is missing {e.args[0]!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dt": self.dt,
            "n_steps": self.n_steps,
            "n_ensembles": self.n_ensembles,
            "seed": self.seed,
            "x0": self.x0,
            "v0": self.v0,
            "record_every": self.record_every
        }


@dataclass(eq=False)
class LangevinEnsemble:
    """Recorded positions and velocities, shape (n_ensembles, n_records)."""
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    x0: float = 0.0

    @property
    def n_ensembles(self) -> int:
        return self.positions.shape[0]

    def squared_displacement(self) -> np.ndarray:
        return (self.positions - self.x0) ** 2

    def msd_frame(self) -> pd.DataFrame:
        """Table t, msd, stderr over the ensemble."""
        sq = self.squared_displacement()
        n = self.n_ensembles
        return pd.DataFrame({
            "t": self.times,
            "msd": sq.mean(axis=0),
            "stderr": sq.std(axis=0, ddof=1) / np.sqrt(n)
        })


@dataclass(frozen=True)
class DiffusionEstimate:
    """Least-squares MSD slope / 2 with its standard error."""
    D: float
    stderr: float
    window: Tuple[float, float]
    n_ensembles: int

    def z_score(self, reference: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.D == reference else float("inf")
        return (self.D - reference) / self.stderr

    def to_dict(self) -> Dict[str, Any]:
        return {
            "D_hat": self.D,
            "stderr": self.stderr,
            "window": list(self.window),
            "n_ensembles": self.n_ensembles
        }


@dataclass(frozen=True)
class NoiseAverageResult:
    """Monte Carlo estimate of <exp(i/hbar sum y f dt)> against its Gaussian closed form."""
    lhs: complex
    stderr_re: float
    stderr_im: float
    rhs: float
    n_samples: int

    @property
    def within_3_sigma(self) -> bool:
        re_ok = abs(self.lhs.real - self.rhs) <= 3.0 * self.stderr_re or self.lhs.real == self.rhs
        im_ok = abs(self.lhs.imag) <= 3.0 * self.stderr_im or self.lhs.imag == 0.0
        return re_ok and im_ok


@dataclass(frozen=True)
class CorrelatorDiagnostics:
    """Empirical same-time variance and lag-1 correlation of the y samples."""
    variance: float
    variance_stderr: float
    expected_variance: float
    lag1: float
    lag1_stderr: float
    dt: float
    n_samples: int

    @property
    def variance_ok(self) -> bool:
        return abs(self.variance - self.expected_variance) <= 3.0 * self.variance_stderr

    @property
    def lag1_ok(self) -> bool:
        return abs(self.lag1) <= 3.0 * self.lag1_stderr
