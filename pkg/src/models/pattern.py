from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd


class PatternMethod(Enum):
    """Computational route that produced a diffraction pattern."""
    EXACT_FRESNEL = "ExactFresnel"
    FRESNEL_CLOSED_FORM = "FresnelClosedForm"
    FAR_FIELD = "FarField"
    CLOSED_FORM = "ClosedForm"
    DAMPED_RESCALED = "DampedRescaled"
    DAMPED_KERNEL = "DampedKernel"
    DAMPED_COTH_FREE = "DampedPaper50a"
    EVOLVER_DIAGONAL = "EvolverDiagonal"


@dataclass(eq=False)
class DiffractionPattern:
    """Screen probability density P(x) with provenance."""
    x: np.ndarray
    P: np.ndarray
    method: PatternMethod
    t: float
    params: Dict[str, Any] = field(default_factory=dict)
    imag_residual: float = 0.0
    companion: Optional['DiffractionPattern'] = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.P = np.asarray(self.P, dtype=float)

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.P))) if self.P.size else 0.0

    def negative_excess(self) -> float:
        """Largest negative value relative to the peak (0 when P >= 0 everywhere)."""
        if not self.P.size or self.peak == 0:
            return 0.0
        return float(max(0.0, -np.min(self.P)) / self.peak)

    def scaled(self, factor: float) -> 'DiffractionPattern':
        return DiffractionPattern(
            x=self.x, P=self.P * factor, method=self.method, t=self.t,
            params=dict(self.params), imag_residual=self.imag_residual * abs(factor)
        )

    def to_frame(self) -> pd.DataFrame:
        """Table with header x, P, method, t, K, beta, gamma."""
        n = self.x.size
        return pd.DataFrame({
            "x": self.x,
            "P": self.P,
            "method": [self.method.value] * n,
            "t": np.full(n, self.t),
            "K": np.full(n, self.params.get("K", np.nan)),
            "beta": np.full(n, self.params.get("beta", np.nan)),
            "gamma": np.full(n, self.params.get("gamma", 0.0))
        })
