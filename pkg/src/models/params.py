import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict

from ..core.errors import InvalidParameter
from .fields import as_float


def _require_finite(name: str, value: float) -> float:
    value = as_float(name, value)
    if not math.isfinite(value):
        raise InvalidParameter(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class PhysParams:
    """Mass, friction, action quantum and thermal energy in caller-chosen coherent units."""
    mass: float
    friction: float
    hbar: float = 1.0
    kBT: float = 0.0

    def __post_init__(self):
        for name in ("mass", "friction", "hbar", "kBT"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.mass <= 0:
            raise InvalidParameter(f"mass must be positive, got {self.mass}")
        if self.hbar <= 0:
            raise InvalidParameter(f"hbar must be positive, got {self.hbar}")
        if self.friction < 0:
            raise InvalidParameter(f"friction must be non-negative, got {self.friction}")
        if self.kBT < 0:
            raise InvalidParameter(f"kBT must be non-negative, got {self.kBT}")

    @property
    def gamma(self) -> float:
        """Damping rate R/2M."""
        return self.friction / (2.0 * self.mass)

    def replace(self, **changes: float) -> 'PhysParams':
        values = self.to_dict()
        values.update(changes)
        return PhysParams.from_dict(values)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PhysParams':
        """Build from the JSON parameter block {"mass", "friction", "hbar", "kBT"}."""
        try:
            return cls(
                mass=data["mass"],
                friction=data["friction"],
                hbar=data.get("hbar", 1.0),
                kBT=data.get("kBT", 0.0)
            )
        except KeyError as e:
            raise InvalidParameter(f"parameter block is missing {e.args[0]!r}")

    def to_dict(self) -> Dict[str, float]:
        return {
            "mass": self.mass,
            "friction": self.friction,
            "hbar": self.hbar,
            "kBT": self.kBT
        }


class RegimeTag(Enum):
    """Quantum/classical Brownian regimes."""
    QUANTUM = "Quantum"
    CROSSOVER = "Crossover"
    CLASSICAL = "Classical"


@dataclass(frozen=True)
class Regime:
    """Regime tag together with the temperature ratio T/T_gamma it was derived from."""
    tag: RegimeTag
    ratio: float

    def to_dict(self) -> Dict[str, Any]:
        return {"regime": self.tag.value, "ratio": self.ratio}
