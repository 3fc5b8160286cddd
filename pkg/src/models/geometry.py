from dataclasses import dataclass
from typing import Any, Dict

from ..core.errors import InvalidParameter
from .fields import as_float
from .params import PhysParams


@dataclass(frozen=True)
class SlitGeometry:
    """Two-slit set-up: slit width, half-separation, screen distance and beam speed."""
    width: float
    half_separation: float
    screen_distance: float
    speed: float

    def __post_init__(self):
        for name in ("width", "half_separation", "screen_distance", "speed"):
            value = as_float(name, getattr(self, name))
            object.__setattr__(self, name, value)
            if not value > 0:
                raise InvalidParameter(f"{name} must be positive, got {value}")
        if self.width >= 2.0 * self.half_separation:
            raise InvalidParameter(
                f"slits overlap: width {self.width} must be below 2d = {2.0 * self.half_separation}"
            )

    @property
    def flight_time(self) -> float:
        """Time t = D/v from slits to screen."""
        return self.screen_distance / self.speed

    def regime_ok(self, ratio: float = 10.0) -> bool:
        """True when w << d << D holds with each ratio at least `ratio`."""
        return (self.half_separation >= ratio * self.width
                and self.screen_distance >= ratio * self.half_separation)

    def pattern_params(self, params: PhysParams) -> 'PatternParams':
        """K = Mvd/(hbar D), beta = w/d."""
        K = params.mass * self.speed * self.half_separation / (params.hbar * self.screen_distance)
        return PatternParams(K=K, beta=self.width / self.half_separation)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SlitGeometry':
        """Build from the JSON geometry block {"w", "d", "D", "v"}."""
        try:
            return cls(
                width=data["w"],
                half_separation=data["d"],
                screen_distance=data["D"],
                speed=data["v"]
            )
        except KeyError as e:
            raise InvalidParameter(f"geometry block is missing {e.args[0]!r}")

    def to_dict(self) -> Dict[str, float]:
        return {
            "w": self.width,
            "d": self.half_separation,
            "D": self.screen_distance,
            "v": self.speed
        }


@dataclass(frozen=True)
class PatternParams:
    """Dimensionless closed-form pattern parameters."""
    K: float
    beta: float

    def __post_init__(self):
        if not self.K > 0:
            raise InvalidParameter(f"K must be positive, got {self.K}")
        if not self.beta > 0:
            raise InvalidParameter(f"beta must be positive, got {self.beta}")

    def to_dict(self) -> Dict[str, float]:
        return {"K": self.K, "beta": self.beta}
