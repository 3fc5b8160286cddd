from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np
import pandas as pd

from ..core.errors import InvalidParameter
from .fields import as_float, as_int


@dataclass(frozen=True)
class GridAxis:
    """Uniform cell-centred axis shared by x_plus and x_minus.

    Samples sit at the cell midpoints x_min + (i + 1/2) dx, so the same axis serves the
    quadrature routes and the periodic evolver (period x_max - x_min).
    """
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "x_min", as_float("x_min", self.x_min))
        object.__setattr__(self, "x_max", as_float("x_max", self.x_max))
        object.__setattr__(self, "n", as_int("n", self.n))
        if not self.x_max > self.x_min:
            raise InvalidParameter(f"axis needs x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if self.n < 2:
            raise InvalidParameter(f"axis needs at least 2 points, got {self.n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def points(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> 'GridAxis':
        return cls(-half_width, half_width, n)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GridAxis':
        try:
            return cls(data["x_min"], data["x_max"], data["n"])
        except KeyError as e:
            raise InvalidParameter(f"grid block is missing {e.args[0]!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n}


@dataclass(frozen=True)
class SlitTerm:
    """One product term weight * phi(x_plus - center_plus) * phi(x_minus - center_minus)."""
    center_plus: float
    center_minus: float
    weight: complex

    @property
    def is_diagonal(self) -> bool:
        return self.center_plus == self.center_minus


@dataclass(frozen=True)
class AnalyticDensity:
    """Initial density matrix as a sum of slit-profile products.

    `shape` is "tophat" (normalised box of width 2*half_width) or "gaussian" (normalised
    Gaussian amplitude of standard deviation `sigma`).
    """
    terms: Tuple[SlitTerm, ...]
    half_width: float
    shape: str = "tophat"
    sigma: float = 0.0

    def __post_init__(self):
        if self.shape not in ("tophat", "gaussian"):
            raise InvalidParameter(f"unknown slit shape {self.shape!r}")
        if self.shape == "gaussian" and not self.sigma > 0:
            raise InvalidParameter("gaussian slits need sigma > 0")
        if not self.half_width > 0:
            raise InvalidParameter("half_width must be positive")

    @property
    def width(self) -> float:
        return 2.0 * self.half_width

    def profile(self, x: np.ndarray) -> np.ndarray:
        """Single-slit amplitude phi(x), unit L2 norm."""
        x = np.asarray(x, dtype=float)
        if self.shape == "tophat":
            return np.where(np.abs(x) <= self.half_width, 1.0 / np.sqrt(self.width), 0.0)
        s = self.sigma
        return (2.0 * np.pi * s * s) ** -0.25 * np.exp(-x * x / (4.0 * s * s))

    def overlap(self, a: float, b: float) -> float:
        """Integral of phi(x - a) phi(x - b) over the real line."""
        if self.shape == "tophat":
            return max(0.0, self.width - abs(a - b)) / self.width
        return float(np.exp(-(a - b) ** 2 / (8.0 * self.sigma ** 2)))

    def __call__(self, x_plus, x_minus) -> np.ndarray:
        x_plus = np.asarray(x_plus, dtype=float)
        x_minus = np.asarray(x_minus, dtype=float)
        out = np.zeros(np.broadcast(x_plus, x_minus).shape, dtype=complex)
        for term in self.terms:
            out += (term.weight * self.profile(x_plus - term.center_plus)
                    * self.profile(x_minus - term.center_minus))
        return out

    @property
    def trace(self) -> complex:
        return complex(sum(t.weight * self.overlap(t.center_plus, t.center_minus) for t in self.terms))

    def is_hermitian(self, tol: float = 0.0) -> bool:
        """Every term (a, b, c) has a partner (b, a, conj(c))."""
        for term in self.terms:
            if not any(
                other.center_plus == term.center_minus
                and other.center_minus == term.center_plus
                and abs(other.weight - np.conj(term.weight)) <= tol
                for other in self.terms
            ):
                return False
        return True

    def diagonal_only(self) -> 'AnalyticDensity':
        """Drop the x_plus != x_minus cross terms (interference ablation)."""
        return AnalyticDensity(
            terms=tuple(t for t in self.terms if t.is_diagonal),
            half_width=self.half_width,
            shape=self.shape,
            sigma=self.sigma
        )

    @property
    def support(self) -> Tuple[float, float]:
        centers = [c for t in self.terms for c in (t.center_plus, t.center_minus)]
        reach = self.half_width if self.shape == "tophat" else 8.0 * self.sigma
        return min(centers) - reach, max(centers) + reach

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shape": self.shape,
            "half_width": self.half_width,
            "sigma": self.sigma,
            "terms": [
                {"center_plus": t.center_plus, "center_minus": t.center_minus,
                 "weight_re": complex(t.weight).real, "weight_im": complex(t.weight).imag}
                for t in self.terms
            ]
        }


@dataclass(eq=False)
class DensityMatrixGrid:
    """rho(x_plus, x_minus) sampled on axis x axis; values[i, j] = rho(x_i, x_j)."""
    axis: GridAxis
    values: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.axis.n, self.axis.n):
            raise InvalidParameter(
                f"values shape {self.values.shape} does not match axis size {self.axis.n}"
            )

    @property
    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.values).copy()

    def hermiticity_residual(self) -> float:
        """max |rho(x+, x-) - conj(rho(x-, x+))|."""
        return float(np.max(np.abs(self.values - self.values.conj().T)))

    def with_values(self, values: np.ndarray, **metadata: Any) -> 'DensityMatrixGrid':
        merged = dict(self.metadata)
        merged.update(metadata)
        return DensityMatrixGrid(axis=self.axis, values=values, metadata=merged)

    def to_frame(self) -> pd.DataFrame:
        """Long table with header x_plus, x_minus, re, im (row-major in x_plus)."""
        x = self.axis.points
        xp, xm = np.meshgrid(x, x, indexing="ij")
        return pd.DataFrame({
            "x_plus": xp.ravel(),
            "x_minus": xm.ravel(),
            "re": self.values.real.ravel(),
            "im": self.values.imag.ravel()
        })
