import math

import numpy as np
import pytest

from src.core.errors import InvalidParameter, NaNDetected, UnstableConfig, ZeroTrace
from src.core.evolver import (
    apply_H_brownian, boundary_mass, evolve, l2_distance, normalized_expectation,
    off_diagonal_mass, pattern_from_density, quadratic_potential, spectral_tail, trace,
    velocity_commutator_residual
)
from src.core.kernel import propagate_gaussian
from src.core.slits import gaussian_state_grid
from src.models.density import DensityMatrixGrid, GridAxis
from src.models.evolution import DerivativeScheme, EvolverConfig, Potential
from src.models.params import PhysParams
from src.models.pattern import PatternMethod


@pytest.fixture
def axis():
    """[-10, 10) with 80 cells."""
    return GridAxis(-10.0, 10.0, 80)


@pytest.fixture
def packet(axis):
    """Centred Gaussian packet of width 0.5."""
    return gaussian_state_grid(axis, x0=0.0, sigma=0.5)


@pytest.fixture
def padded_axis():
    """[-15, 15) with 120 cells: room for zero-temperature coherence up to gamma t = 1/2."""
    return GridAxis(-15.0, 15.0, 120)


@pytest.fixture
def padded_packet(padded_axis):
    return gaussian_state_grid(padded_axis, x0=0.0, sigma=0.5)


def _run(rho0, params, dt, t_final, potential=None, scheme=DerivativeScheme.SPECTRAL):
    cfg = EvolverConfig(axis=rho0.axis, dt=dt, t_final=t_final, scheme=scheme)
    return evolve(rho0, potential, params, cfg)


class TestBrownianOperator:
    """Test the master-equation right-hand side."""

    def test_constant_state_free(self, axis):
        """Test H annihilates a constant state without friction or potential."""
        rho = DensityMatrixGrid(axis=axis, values=np.ones((80, 80)))
        out = apply_H_brownian(rho, None, PhysParams(mass=1.0, friction=0.0))
        assert np.max(np.abs(out.values)) < 1e-12

    def test_plane_wave_eigenvalue(self, axis):
        """Test plane waves pick up hbar^2 (k+^2 - k-^2) / 2M."""
        x = axis.points
        k_plus, k_minus = 2.0 * math.pi * 3 / axis.length, 2.0 * math.pi * 5 / axis.length
        values = np.exp(1j * (k_plus * x[:, None] + k_minus * x[None, :]))
        rho = DensityMatrixGrid(axis=axis, values=values)
        params = PhysParams(mass=2.0, friction=0.0, hbar=1.0)
        out = apply_H_brownian(rho, None, params)
        expected = (k_plus ** 2 - k_minus ** 2) / (2.0 * params.mass) * values
        np.testing.assert_allclose(out.values, expected, atol=1e-10)

    def test_thermal_term_dominates_heavy_particle(self, axis):
        """Test the decoherence term -i kBT R (x+ - x-)^2 / hbar for M -> infinity."""
        x = axis.points
        params = PhysParams(mass=1e12, friction=1.0, hbar=1.0, kBT=1.0)
        rho = DensityMatrixGrid(axis=axis, values=np.ones((80, 80)))
        out = apply_H_brownian(rho, None, params)
        expected = -1j * (x[:, None] - x[None, :]) ** 2
        np.testing.assert_allclose(out.values, expected, atol=1e-9)

    def test_potential_difference(self, axis):
        """Test the potential enters as U(x+) - U(x-)."""
        params = PhysParams(mass=1e12, friction=0.0, hbar=1.0)
        x = axis.points
        rho = DensityMatrixGrid(axis=axis, values=np.ones((80, 80)))
        out = apply_H_brownian(rho, quadratic_potential(1.0, params), params)
        expected = 0.5e12 * (x[:, None] ** 2 - x[None, :] ** 2)
        np.testing.assert_allclose(out.values, expected, rtol=1e-12, atol=1e-3)

    def test_unstable_step(self, packet):
        """Test dt beyond the stability bound is rejected."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0)
        with pytest.raises(UnstableConfig):
            apply_H_brownian(packet, None, params, dt=0.05)
        with pytest.raises(UnstableConfig):
            _run(packet, params, dt=0.05, t_final=1.0)

    def test_rk4_region_with_hot_bath(self, packet):
        """Test a hot bath can push the spectrum outside the RK4 region."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0, kBT=10.0)
        with pytest.raises(UnstableConfig, match="RK4"):
            apply_H_brownian(packet, None, params, dt=0.01)


class TestVelocityCommutator:
    """Test [v+, v-] = i hbar R / M^2 on the grid."""

    @pytest.fixture
    def wide_axis(self):
        return GridAxis(-20.0, 20.0, 256)

    def test_frictionless_commute(self, wide_axis):
        """Test the velocities commute without friction."""
        x = wide_axis.points
        f = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / 2.0)
        params = PhysParams(mass=1.0, friction=0.0, hbar=1.0)
        assert velocity_commutator_residual(f, wide_axis, params) < 1e-10

    def test_gaussian(self, wide_axis):
        """Test the commutator on a Gaussian test function."""
        x = wide_axis.points
        f = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / 2.0)
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0)
        assert velocity_commutator_residual(f, wide_axis, params) < 1e-8

    def test_windowed_plane_wave(self, wide_axis):
        """Test the commutator on a Gaussian-windowed plane wave."""
        x = wide_axis.points
        xp, xm = x[:, None], x[None, :]
        f = np.exp(1j * (2.0 * xp - xm)) * np.exp(-(xp ** 2 + xm ** 2) / 8.0)
        params = PhysParams(mass=2.0, friction=3.0, hbar=0.5)
        assert velocity_commutator_residual(f, wide_axis, params) < 1e-8

    def test_shape_mismatch(self, wide_axis):
        """Test the test function must live on the grid."""
        with pytest.raises(InvalidParameter):
            velocity_commutator_residual(np.ones((4, 4)), wide_axis, PhysParams(1.0, 1.0))


class TestTraceAndExpectations:
    """Test trace, expectation values and diagnostics."""

    def test_trace_and_expectation(self, packet, axis):
        """Test unit trace, identity expectation and parity."""
        assert trace(packet) == pytest.approx(1.0, rel=1e-12)
        assert normalized_expectation(packet, np.ones(axis.n)) == pytest.approx(1.0)
        assert abs(normalized_expectation(packet, axis.points)) < 1e-12
        assert normalized_expectation(packet, axis.points ** 2) == pytest.approx(0.25, rel=1e-10)

    def test_kernel_observable(self, packet, axis):
        """Test a 2-D observable kernel: the identity kernel gives 1."""
        identity = np.eye(axis.n) / axis.dx
        assert normalized_expectation(packet, identity) == pytest.approx(1.0, rel=1e-12)

    def test_zero_trace(self, axis):
        """Test normalising a traceless state fails."""
        rho = DensityMatrixGrid(axis=axis, values=np.zeros((80, 80)))
        with pytest.raises(ZeroTrace):
            normalized_expectation(rho, axis.points)

    def test_diagnostics(self, packet, axis):
        """Test off-diagonal mass, boundary mass, distances and the diagonal pattern."""
        assert off_diagonal_mass(packet, 0.5) > 0
        assert off_diagonal_mass(packet, 100.0) == 0.0
        assert boundary_mass(packet) < 1e-12
        assert spectral_tail(packet) < 1e-12
        coherence = np.zeros((80, 80))
        coherence[78, 1] = coherence[1, 78] = 1.0
        assert boundary_mass(packet.with_values(coherence)) == 1.0
        assert l2_distance(packet, packet) == 0.0
        assert l2_distance(packet, np.zeros((80, 80))) == pytest.approx(1.0, rel=1e-10)
        pattern = pattern_from_density(packet, 0.0, PhysParams(mass=1.0, friction=0.0))
        assert pattern.method is PatternMethod.EVOLVER_DIAGONAL
        assert pattern.imag_residual == 0.0


class TestEvolve:
    """Test RK4 integration of the master equation."""

    def test_frictionless_trace_and_spreading(self, packet):
        """Test R = 0 conserves the trace and spreads the packet freely."""
        result = _run(packet, PhysParams(mass=1.0, friction=0.0), dt=0.01, t_final=1.0)
        np.testing.assert_allclose(result.traces.real, 1.0, atol=1e-6)
        x = packet.axis.points
        width = normalized_expectation(result.final, x ** 2)
        assert width == pytest.approx(0.25 + 1.0, rel=1e-6)

    def test_trace_decay_zero_temperature(self, padded_packet):
        """Test tr(rho) decays as exp(-gamma t)."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0)
        result = _run(padded_packet, params, dt=0.01, t_final=1.0)
        assert result.traces[-1].real == pytest.approx(math.exp(-0.5), rel=1e-3)
        frame = result.trace_frame()
        assert list(frame.columns) == ["t", "re_trace", "im_trace", "predicted"]
        np.testing.assert_allclose(frame["re_trace"], frame["predicted"], rtol=1e-3)
        assert np.max(result.boundary_mass) < 1e-6

    def test_trace_decay_at_crossover_temperature(self, padded_packet):
        """Test the thermal term leaves the trace decay unchanged at kBT = hbar gamma."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0, kBT=0.5)
        result = _run(padded_packet, params, dt=0.005, t_final=1.0)
        assert result.traces[-1].real == pytest.approx(math.exp(-0.5), rel=1e-3)

    def test_trace_decay_in_harmonic_well(self, padded_packet):
        """Test the trace decay with a quadratic potential."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0)
        result = _run(padded_packet, params, dt=0.005, t_final=1.0,
                      potential=quadratic_potential(1.0, params))
        assert result.traces[-1].real == pytest.approx(math.exp(-0.5), rel=1e-3)

    def test_wrap_around_is_an_error(self, packet):
        """Test coherence reaching the edge of a small periodic box stops the run."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0)
        with pytest.raises(UnstableConfig, match="boundary mass"):
            _run(packet, params, dt=0.005, t_final=2.0)

    def test_unresolved_momentum_is_an_error(self, axis):
        """Test a packet whose momentum sits near the grid cutoff is rejected up front."""
        params = PhysParams(mass=1.0, friction=0.0, hbar=1.0)
        fast = gaussian_state_grid(axis, x0=0.0, sigma=0.5, k0=10.0)
        assert spectral_tail(fast) > 0.5
        with pytest.raises(UnstableConfig, match="momentum"):
            _run(fast, params, dt=0.005, t_final=0.1)
        with pytest.raises(UnstableConfig, match="momentum"):
            apply_H_brownian(fast, None, params, dt=0.005)

    def test_hermiticity_preserved(self, packet):
        """Test the evolved state stays Hermitian to round-off."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0, kBT=0.5)
        result = _run(packet, params, dt=0.005, t_final=1.0)
        peak = np.max(np.abs(result.final.values))
        assert np.max(result.hermiticity) < 1e-10 * peak

    def test_thermal_decoherence(self, padded_packet):
        """Test a hot bath suppresses off-diagonal weight."""
        cold = _run(padded_packet, PhysParams(mass=1.0, friction=1.0, kBT=0.0), dt=0.005, t_final=1.0)
        hot = _run(padded_packet, PhysParams(mass=1.0, friction=1.0, kBT=0.5), dt=0.005, t_final=1.0)
        assert off_diagonal_mass(hot.final, 0.5) < off_diagonal_mass(cold.final, 0.5)

    def test_matches_kernel(self, padded_axis):
        """Test the evolver against the closed-form zero-temperature kernel."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0)
        moving = gaussian_state_grid(padded_axis, x0=0.0, sigma=0.5, k0=1.5)
        x = padded_axis.points
        oracle = propagate_gaussian(x[:, None], x[None, :], 1.0, params, sigma=0.5, k0=1.5)
        norm = math.sqrt(np.sum(np.abs(oracle) ** 2)) * padded_axis.dx
        final = _run(moving, params, dt=0.01, t_final=1.0).final
        assert l2_distance(final, oracle) / norm < 1e-4

    def test_fourth_order_in_time(self, padded_axis):
        """Test successive halvings of dt shrink the step-to-step difference sixteenfold."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0)
        moving = gaussian_state_grid(padded_axis, x0=0.0, sigma=0.5, k0=2.0)
        finals = [_run(moving, params, dt=dt, t_final=1.0).final for dt in (0.01, 0.005, 0.0025)]
        coarse = l2_distance(finals[0], finals[1])
        fine = l2_distance(finals[1], finals[2])
        assert fine > 0
        assert 3.7 < math.log2(coarse / fine) < 4.3

    def test_central_differences_agree(self, packet):
        """Test the fourth-order stencil tracks the spectral scheme."""
        params = PhysParams(mass=1.0, friction=1.0, hbar=1.0)
        spectral = _run(packet, params, dt=0.005, t_final=0.5).final
        central = _run(packet, params, dt=0.005, t_final=0.5,
                       scheme=DerivativeScheme.CENTRAL_ORDER4).final
        assert l2_distance(central, spectral) < 5e-2

    def test_snapshots(self, packet):
        """Test snapshot stride and final snapshot."""
        cfg = EvolverConfig(axis=packet.axis, dt=0.01, t_final=0.25, snapshot_stride=10)
        result = evolve(packet, Potential.zero(), PhysParams(mass=1.0, friction=0.0), cfg)
        assert result.snapshot_times == pytest.approx([0.0, 0.1, 0.2, 0.25])
        assert result.final.metadata["t"] == pytest.approx(0.25)

    def test_nan_detected(self, packet):
        """Test non-finite values stop the run with the failing step."""
        values = packet.values.copy()
        values[40, 40] = np.nan
        with pytest.raises(NaNDetected) as exc:
            _run(packet.with_values(values), PhysParams(mass=1.0, friction=0.0), dt=0.01, t_final=0.1)
        assert exc.value.step == 1

    def test_grid_mismatch(self, packet):
        """Test the initial state and config must share a grid."""
        cfg = EvolverConfig(axis=GridAxis(-5.0, 5.0, 40), dt=0.01, t_final=0.1)
        with pytest.raises(InvalidParameter):
            evolve(packet, None, PhysParams(mass=1.0, friction=0.0), cfg)
