from dataclasses import dataclass

import numpy as np

from ..core.errors import DegeneratePath, InvalidParameter


@dataclass(eq=False)
class PlanarPath:
    """Polyline in the (x_plus, x_minus) plane; closed paths repeat no vertex."""
    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise InvalidParameter(f"vertices must have shape (n, 2), got {v.shape}")
        if v.shape[0] < 2:
            raise DegeneratePath(f"a path needs at least 2 vertices, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise InvalidParameter("path vertices must be finite")
        if self.closed and np.array_equal(v[0], v[-1]):
            raise InvalidParameter("closed paths must not repeat the first vertex at the end")
        self.vertices = v

    @property
    def start(self) -> np.ndarray:
        return self.vertices[0]

    @property
    def end(self) -> np.ndarray:
        return self.vertices[0] if self.closed else self.vertices[-1]

    def edges(self):
        """(a, b) vertex pairs, including the closing edge for closed paths."""
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    def reversed(self) -> 'PlanarPath':
        return PlanarPath(self.vertices[::-1].copy(), closed=self.closed)

    def scaled(self, factor: float) -> 'PlanarPath':
        return PlanarPath(self.vertices * factor, closed=self.closed)
