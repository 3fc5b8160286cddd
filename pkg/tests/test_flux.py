import math
from pathlib import Path

import numpy as np
import pytest

from src.core.csv_io import read_path_csv, write_path_csv
from src.core.errors import ConfigError, DegeneratePath, EndpointMismatch, InvalidParameter
from src.core.flux import (
    aharonov_bohm_phase, constructive_condition, cross_area, flux_report, interference_phase,
    line_integral, oriented_area_between, resistive_action
)
from src.models.params import PhysParams
from src.models.path import PlanarPath

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def unit():
    return PhysParams(mass=1.0, friction=1.0, hbar=1.0)


@pytest.fixture
def square_paths():
    """Two routes from (0, 0) to (1, 1) around the unit square."""
    p1 = PlanarPath(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    p2 = PlanarPath(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
    return p1, p2


class TestLineIntegral:
    """Test the polyline integral of x- dx+ - x+ dx-."""

    def test_cross_area(self):
        """Test X x X' on the unit vectors."""
        assert cross_area([1.0, 0.0], [0.0, 1.0]) == 1.0
        assert cross_area([0.0, 1.0], [1.0, 0.0]) == -1.0

    def test_segments(self, square_paths):
        """Test each segment contributes a- b+ - a+ b-."""
        p1, p2 = square_paths
        assert line_integral(p1) == -1.0
        assert line_integral(p2) == 1.0

    def test_counterclockwise_loop_is_minus_twice_area(self):
        """Test (1/2) I of a counterclockwise polygon is minus its shoelace area."""
        angles = np.sort(np.random.default_rng(1).uniform(0.0, 2.0 * math.pi, 12))
        v = np.column_stack([2.0 + np.cos(angles), -1.0 + 0.5 * np.sin(angles)])
        x, y = v[:, 0], v[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        assert area > 0
        assert 0.5 * line_integral(PlanarPath(v, closed=True)) == pytest.approx(-area, rel=1e-12)

    def test_resistive_action(self, unit):
        """Test S_R = (R/2) I for a loop traversed as an open path."""
        loop = PlanarPath(np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float))
        params = unit.replace(friction=3.0)
        assert resistive_action(loop, params) == pytest.approx(-3.0)
        still = PlanarPath(np.array([[0.0, 0.0], [0.0, 0.0]]))
        sigma = oriented_area_between(loop, still)
        assert resistive_action(loop, params) == pytest.approx(params.friction * sigma)

    def test_reversal_flips_sign(self, square_paths):
        """Test traversing backwards negates the integral."""
        p1, _ = square_paths
        assert line_integral(p1.reversed()) == -line_integral(p1)


class TestOrientedArea:
    """Test Sigma between two paths with shared endpoints."""

    def test_unit_square(self, square_paths):
        """Test Sigma = -1 for the unit square and +1 with the paths swapped."""
        p1, p2 = square_paths
        assert oriented_area_between(p1, p2) == -1.0
        assert oriented_area_between(p2, p1) == 1.0
        assert oriented_area_between(p1, p1) == 0.0

    def test_endpoint_mismatch(self, square_paths):
        """Test paths with different endpoints are rejected."""
        p1, _ = square_paths
        other = PlanarPath(np.array([[0.0, 0.0], [2.0, 2.0]]))
        with pytest.raises(EndpointMismatch):
            oriented_area_between(p1, other)

    def test_quadratic_scaling(self, square_paths):
        """Test scaling both paths by lambda scales Sigma by lambda^2."""
        p1, p2 = square_paths
        for lam in (0.5, 2.0, 7.0):
            scaled = oriented_area_between(p1.scaled(lam), p2.scaled(lam))
            assert scaled == pytest.approx(lam ** 2 * oriented_area_between(p1, p2))

    def test_additivity(self):
        """Test Sigma(P1, P2) + Sigma(P2, P3) = Sigma(P1, P3)."""
        rng = np.random.default_rng(4)
        start, end = np.array([0.0, 0.0]), np.array([1.0, 2.0])

        def route():
            middle = rng.uniform(-2.0, 2.0, (4, 2))
            return PlanarPath(np.vstack([start, middle, end]))

        p1, p2, p3 = route(), route(), route()
        total = oriented_area_between(p1, p2) + oriented_area_between(p2, p3)
        assert total == pytest.approx(oriented_area_between(p1, p3), abs=1e-12)

    def test_degenerate_paths(self):
        """Test path construction guards."""
        with pytest.raises(DegeneratePath):
            PlanarPath(np.array([[0.0, 0.0]]))
        with pytest.raises(InvalidParameter):
            PlanarPath(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]), closed=True)
        with pytest.raises(InvalidParameter):
            PlanarPath(np.array([0.0, 1.0, 2.0]))


class TestInterferencePhase:
    """Test R Sigma / hbar and the quantization condition."""

    def test_full_turn(self, square_paths):
        """Test R = 2 pi with Sigma = 1 gives phase 2 pi and n = 1."""
        p1, p2 = square_paths
        params = PhysParams(mass=1.0, friction=2.0 * math.pi, hbar=1.0)
        assert interference_phase(p2, p1, params) == pytest.approx(2.0 * math.pi)
        assert constructive_condition(1.0, params) == (1, 0.0)

    def test_integer_quotients_snap(self, unit):
        """Test an exact multiple of 2 pi hbar / R gives a zero residual."""
        assert constructive_condition(6.0 * math.pi, unit) == (3, 0.0)
        assert constructive_condition(-4.0 * math.pi, unit) == (-2, 0.0)

    def test_half_integer_ties_go_even(self, unit):
        """Test ties resolve to the even n with residual +pi or -pi."""
        n, residual = constructive_condition(math.pi, unit)
        assert n == 0
        assert residual == pytest.approx(math.pi)
        n, residual = constructive_condition(3.0 * math.pi, unit)
        assert n == 2
        assert residual == pytest.approx(-math.pi)

    def test_residual_in_range(self, unit):
        """Test |residual| <= pi."""
        for sigma in np.linspace(-20.0, 20.0, 101):
            n, residual = constructive_condition(float(sigma), unit)
            assert abs(residual) <= math.pi + 1e-12
            assert sigma == pytest.approx(2.0 * math.pi * n + residual)

    def test_magnetic_relabeling(self, square_paths):
        """Test e B / c in place of R gives the same phase."""
        p1, p2 = square_paths
        sigma = oriented_area_between(p2, p1)
        params = PhysParams(mass=1.0, friction=1.0, hbar=0.5)
        magnetic = aharonov_bohm_phase(charge=2.0, field=3.0, c=6.0, area=sigma, hbar=0.5)
        assert magnetic == pytest.approx(interference_phase(p2, p1, params))

    def test_report(self, square_paths, unit):
        """Test the flux summary for the unit square."""
        p1, p2 = square_paths
        assert flux_report(p1, p2, unit) == {"sigma": -1.0, "phase": -1.0, "n": 0, "residual": -1.0}


class TestPathFiles:
    """Test path CSV input and output."""

    def test_round_trip(self, tmp_path):
        """Test vertices survive a write and read."""
        path = PlanarPath(np.array([[0.1, -0.2], [1.0 / 3.0, 2.5], [-4.0, 1e-9]]))
        target = write_path_csv(path, tmp_path / "path.csv")
        again = read_path_csv(target)
        np.testing.assert_array_equal(again.vertices, path.vertices)

    def test_round_trip_is_bit_exact(self, tmp_path):
        """Test values whose shortest repr needs all 17 digits come back unchanged."""
        rng = np.random.default_rng(5)
        vertices = rng.uniform(-10.0, 10.0, size=(200, 2))
        vertices[0] = [0.1 + 0.2, 1.0 - 1e-16]
        target = write_path_csv(PlanarPath(vertices), tmp_path / "dense.csv")
        np.testing.assert_array_equal(read_path_csv(target).vertices, vertices)

    def test_fixture_loop(self):
        """Test the closed square fixture."""
        loop = read_path_csv(FIXTURES / "square_loop.csv", closed=True)
        assert loop.closed
        assert 0.5 * line_integral(loop) == -1.0

    def test_missing_columns(self, tmp_path):
        """Test a CSV without the coordinate header."""
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n0,0\n1,1\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="x_plus"):
            read_path_csv(bad)

    def test_missing_file(self, tmp_path):
        """Test an unreadable path file."""
        with pytest.raises(ConfigError):
            read_path_csv(tmp_path / "nope.csv")
