from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from ..core.errors import InvalidParameter
from .fields import as_float, as_int
from .density import DensityMatrixGrid, GridAxis


class DerivativeScheme(Enum):
    SPECTRAL = "Spectral"
    CENTRAL_ORDER4 = "CentralOrder4"


class Boundary(Enum):
    PERIODIC = "Periodic"


@dataclass(eq=False)
class Potential:
    """External potential U(x) with per-axis cached samples."""
    func: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    _cache: Dict[GridAxis, np.ndarray] = field(default_factory=dict, repr=False)

    def sample(self, axis: GridAxis) -> np.ndarray:
        if axis not in self._cache:
            values = np.asarray(self.func(axis.points), dtype=float)
            if values.shape != (axis.n,):
                values = np.broadcast_to(values, (axis.n,)).astype(float)
            if not np.all(np.isfinite(values)):
                raise InvalidParameter(f"potential {self.name!r} is not finite on the grid")
            self._cache[axis] = values
        return self._cache[axis]

    @property
    def is_zero(self) -> bool:
        return self.name == "zero"

    @classmethod
    def zero(cls) -> 'Potential':
        return cls(func=lambda x: np.zeros_like(x), name="zero")

    @classmethod
    def quadratic(cls, stiffness: float) -> 'Potential':
        """U(x) = stiffness * x^2 / 2."""
        return cls(func=lambda x: 0.5 * stiffness * x * x, name=f"quadratic(k={stiffness})")


@dataclass
class EvolverConfig:
    """Grid, step and output settings for the master-equation integrator."""
    axis: GridAxis
    dt: float
    t_final: float
    scheme: DerivativeScheme = DerivativeScheme.SPECTRAL
    boundary: Boundary = Boundary.PERIODIC
    snapshot_stride: int = 0
    stability_c: float = 0.2
    threads: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameter(f"dt must be positive, got {self.dt}")
        if self.t_final < 0:
            raise InvalidParameter(f"t_final must be non-negative, got {self.t_final}")
        if self.snapshot_stride < 0:
            raise InvalidParameter("snapshot_stride must be non-negative")
        if not self.stability_c > 0:
            raise InvalidParameter("stability_c must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EvolverConfig':
        try:
            return cls(
                axis=GridAxis.from_dict(data["grid"]),
                dt=as_float("dt", data["dt"]),
                t_final=as_float("t_final", data["t_final"]),
                scheme=DerivativeScheme(data.get("scheme", "Spectral")),
                boundary=Boundary(data.get("boundary", "Periodic")),
                snapshot_stride=as_int("snapshot_stride", data.get("snapshot_stride", 0)),
                stability_c=as_float("stability_c", data.get("stability_c", 0.2)),
                threads=as_int("threads", data.get("threads", 1))
            )
        except KeyError as e:
            raise InvalidParameter(f"evolver block is missing {e.args[0]!r}")
        except ValueError as e:
            raise InvalidParameter(f"evolver block is invalid: {e}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "grid": self.axis.to_dict(),
            "dt": self.dt,
            "t_final": self.t_final,
            "scheme": self.scheme.value,
            "boundary": self.boundary.value,
            "snapshot_stride": self.snapshot_stride,
            "stability_c": self.stability_c,
            "threads": self.threads
        }


@dataclass(eq=False)
class EvolutionResult:
    """Snapshots plus per-step diagnostics of one evolver run."""
    times: np.ndarray
    traces: np.ndarray
    hermiticity: np.ndarray
    snapshots: List[DensityMatrixGrid]
    snapshot_times: List[float]
    gamma: float
    boundary_mass: Optional[np.ndarray] = None

    @property
    def final(self) -> DensityMatrixGrid:
        return self.snapshots[-1]

    def trace_frame(self) -> pd.DataFrame:
        """Columns t, re_trace, im_trace, predicted (trace(0) * exp(-gamma t))."""
        predicted = self.traces[0].real * np.exp(-self.gamma * self.times)
        return pd.DataFrame({
            "t": self.times,
            "re_trace": self.traces.real,
            "im_trace": self.traces.imag,
            "predicted": predicted
        })
