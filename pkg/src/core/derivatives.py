"""Periodic first and second derivatives on a uniform grid, along one array axis."""
import numpy as np
from scipy import fft

from ..models.density import GridAxis
from ..models.evolution import DerivativeScheme

# largest modified wavenumbers of the fourth-order central stencils, in units of 1/dx
CENTRAL4_D1_MAX = 1.3722
CENTRAL4_D2_MAX = 16.0 / 3.0


class SpectralDerivative:
    """FFT derivatives; the Nyquist mode is dropped from odd derivatives."""

    def __init__(self, axis: GridAxis, workers: int = 1):
        self.axis = axis
        self.workers = workers
        k = 2.0 * np.pi * fft.fftfreq(axis.n, d=axis.dx)
        self._ik = 1j * k
        if axis.n % 2 == 0:
            self._ik[axis.n // 2] = 0.0
        self._k2 = -(k * k)

    def _apply(self, f: np.ndarray, symbol: np.ndarray, along: int) -> np.ndarray:
        shape = [1] * f.ndim
        shape[along] = -1
        spectrum = fft.fft(f, axis=along, workers=self.workers)
        return fft.ifft(spectrum * symbol.reshape(shape), axis=along, workers=self.workers)

    def d1(self, f: np.ndarray, along: int = 0) -> np.ndarray:
        return self._apply(f, self._ik, along)

    def d2(self, f: np.ndarray, along: int = 0) -> np.ndarray:
        return self._apply(f, self._k2, along)

    @property
    def max_wavenumber(self) -> float:
        return np.pi / self.axis.dx

    @property
    def max_second(self) -> float:
        return (np.pi / self.axis.dx) ** 2


class CentralOrder4:
    """Fourth-order periodic central differences via np.roll."""

    def __init__(self, axis: GridAxis, workers: int = 1):
        self.axis = axis
        self.workers = workers

    def d1(self, f: np.ndarray, along: int = 0) -> np.ndarray:
        h = self.axis.dx
        return (np.roll(f, 2, axis=along) - 8.0 * np.roll(f, 1, axis=along)
                + 8.0 * np.roll(f, -1, axis=along) - np.roll(f, -2, axis=along)) / (12.0 * h)

    def d2(self, f: np.ndarray, along: int = 0) -> np.ndarray:
        h = self.axis.dx
        return (-np.roll(f, 2, axis=along) + 16.0 * np.roll(f, 1, axis=along) - 30.0 * f
                + 16.0 * np.roll(f, -1, axis=along) - np.roll(f, -2, axis=along)) / (12.0 * h * h)

    @property
    def max_wavenumber(self) -> float:
        return CENTRAL4_D1_MAX / self.axis.dx

    @property
    def max_second(self) -> float:
        return CENTRAL4_D2_MAX / self.axis.dx ** 2


def make_derivative(scheme: DerivativeScheme, axis: GridAxis, workers: int = 1):
    if scheme is DerivativeScheme.SPECTRAL:
        return SpectralDerivative(axis, workers)
    return CentralOrder4(axis, workers)
