from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class KernelEval:
    """K0 = exp(i Phi) * F0, kept in factored form (scalars or broadcast arrays)."""
    value: np.ndarray
    phase: np.ndarray
    envelope: np.ndarray

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.envelope)
