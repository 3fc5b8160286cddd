import json
import os
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest

from src.cli.commands import main
from src.config.settings import AppConfig
from src.core.diffraction import fringe_zeros
from src.core.errors import EndpointMismatch
from src.models.geometry import PatternParams
from src.services.flux_service import FluxService
from src.services.regime_service import RegimeService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def clean_env():
    """Run every CLI test without QBM_* overrides from the calling shell."""
    with patch.dict(os.environ, {}, clear=True):
        yield


@pytest.fixture
def config():
    with patch.dict(os.environ, {}, clear=True):
        return AppConfig.from_env()


def _write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def _read_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestRegimeCommand:
    """Test the regime subcommand."""

    def test_crossover_fixture(self, tmp_path):
        """Test the crossover parameters reproduce the expected report."""
        code = main(["regime", "--params", str(FIXTURES / "params_crossover.json"),
                     "--out", str(tmp_path)])
        assert code == 0
        assert _read_json(tmp_path / "regime.json") == _read_json(
            FIXTURES / "expected_regime_crossover.json")
        manifest = _read_json(tmp_path / "manifest.json")
        assert manifest["subcommand"] == "regime"
        assert manifest["outputs"] == ["regime.json", "manifest.json"]

    @pytest.mark.parametrize("kBT,tag", [(0.0, "Quantum"), (1000.0, "Classical")])
    def test_tags(self, tmp_path, capsys, kBT, tag):
        """Test the printed regime tag at the temperature extremes."""
        params = _write_json(tmp_path / "p.json", {"mass": 1.0, "friction": 2.0, "kBT": kBT})
        assert main(["regime", "--params", str(params)]) == 0
        assert json.loads(capsys.readouterr().out)["regime"] == tag

    def test_zero_friction_exit_code(self, tmp_path, capsys):
        """Test R = 0 is a configuration error."""
        params = _write_json(tmp_path / "p.json", {"mass": 1.0, "friction": 0.0, "kBT": 1.0})
        assert main(["regime", "--params", str(params)]) == 2
        assert "❌ Configuration error" in capsys.readouterr().err

    def test_threshold_from_environment(self, tmp_path, capsys):
        """Test QBM_REGIME_THRESHOLD widens the crossover band."""
        params = _write_json(tmp_path / "p.json", {"mass": 1.0, "friction": 2.0, "kBT": 50.0})
        with patch.dict(os.environ, {"QBM_REGIME_THRESHOLD": "100"}):
            assert main(["regime", "--params", str(params)]) == 0
        assert json.loads(capsys.readouterr().out)["regime"] == "Crossover"

    def test_bad_environment(self, tmp_path, capsys):
        """Test an invalid environment setting exits with the configuration code."""
        with patch.dict(os.environ, {"QBM_THREADS": "0"}):
            code = main(["regime", "--params", str(FIXTURES / "params_crossover.json")])
        assert code == 2
        assert "QBM_THREADS" in capsys.readouterr().err

    def test_malformed_json(self, capsys):
        """Test malformed JSON reports its line."""
        assert main(["regime", "--params", str(FIXTURES / "malformed.json")]) == 2
        assert "line 3" in capsys.readouterr().err

    def test_service_accepts_flat_params(self, config):
        """Test the service takes a bare parameter block."""
        manifest = RegimeService(config).run({"mass": 1.0, "friction": 2.0, "kBT": 1.0})
        assert manifest.summary["regime"] == "Crossover"

    def test_non_numeric_parameter(self, tmp_path, capsys):
        """Test a text value in the parameter block exits with the configuration code."""
        params = _write_json(tmp_path / "p.json", {"mass": "heavy", "friction": 1.0, "kBT": 1.0})
        assert main(["regime", "--params", str(params)]) == 2
        err = capsys.readouterr().err
        assert "❌ Configuration error" in err
        assert "mass" in err

    def test_no_files_without_out(self, tmp_path, monkeypatch, capsys):
        """Test a run without --out only prints and says so in its help text."""
        monkeypatch.chdir(tmp_path)
        assert main(["regime", "--params", str(FIXTURES / "params_crossover.json")]) == 0
        assert list(tmp_path.iterdir()) == []
        capsys.readouterr()
        with pytest.raises(SystemExit):
            main(["regime", "--help"])
        assert "no manifest is written" in " ".join(capsys.readouterr().out.split())


class TestFluxCommand:
    """Test the flux subcommand."""

    def test_square_fixture(self, tmp_path):
        """Test the two square routes reproduce the expected report."""
        code = main(["flux", "--path1", str(FIXTURES / "square_p1.csv"),
                     "--path2", str(FIXTURES / "square_p2.csv"),
                     "--params", str(FIXTURES / "params_flux.json"), "--out", str(tmp_path)])
        assert code == 0
        assert _read_json(tmp_path / "flux.json") == _read_json(FIXTURES / "expected_flux_square.json")

    def test_single_loop(self, capsys):
        """Test one closed loop is measured against the constant path."""
        code = main(["flux", "--path1", str(FIXTURES / "square_loop.csv"),
                     "--params", str(FIXTURES / "params_flux.json")])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["sigma"] == -1.0
        assert report["resistive_action"] == -1.0

    def test_endpoint_mismatch(self, capsys):
        """Test paths with different endpoints exit with the configuration code."""
        code = main(["flux", "--path1", str(FIXTURES / "square_p1.csv"),
                     "--path2", str(FIXTURES / "square_loop.csv"),
                     "--params", str(FIXTURES / "params_flux.json")])
        assert code == 2
        assert "endpoints" in capsys.readouterr().err

    def test_service_raises(self, config):
        """Test the service surfaces the endpoint error."""
        with pytest.raises(EndpointMismatch):
            FluxService(config).run({"friction": 1.0, "mass": 1.0}, FIXTURES / "square_p1.csv",
                                    FIXTURES / "square_loop.csv")


class TestPatternCommand:
    """Test the pattern subcommand."""

    def test_closed_form_zeros(self, tmp_path):
        """Test the sampled minima sit on the fringe zeros to within one grid step."""
        assert main(["pattern", "--config", str(FIXTURES / "pattern_fig2.json"),
                     "--out", str(tmp_path)]) == 0
        frame = pd.read_csv(tmp_path / "pattern_closed.csv")
        assert list(frame.columns) == ["x", "P", "method", "t", "K", "beta", "gamma"]
        assert len(frame) == 1024
        x, P = frame["x"].to_numpy(), frame["P"].to_numpy()
        step = x[1] - x[0]
        minima = x[1:-1][(P[1:-1] < P[:-2]) & (P[1:-1] < P[2:])]
        positive = fringe_zeros(PatternParams(K=0.5, beta=0.1), 5)
        zeros = np.concatenate([-positive[::-1], positive])
        assert minima.size == zeros.size
        for z in zeros:
            assert np.min(np.abs(minima - z)) <= step

    def test_compare_far_field_with_closed_form(self, tmp_path, capsys):
        """Test the far-field integral against the closed form through the CLI."""
        code = main(["pattern", "--config", str(FIXTURES / "pattern_fig2.json"),
                     "--out", str(tmp_path), "--compare", "farfield,closed"])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["compare"] == ["farfield", "closed"]
        assert summary["max_rel_dev"] < 1e-10
        table = pd.read_csv(tmp_path / "compare_farfield_closed.csv")
        assert list(table.columns) == ["x", "P_farfield", "P_closed", "rel_dev"]

    def test_damped_rescaled_without_friction(self, tmp_path, capsys):
        """Test the damped-rescaled route equals the far field at R = 0."""
        code = main(["pattern", "--config", str(FIXTURES / "pattern_fig2.json"),
                     "--out", str(tmp_path), "--compare", "damped-rescaled,farfield",
                     "--samples", "128"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["max_rel_dev"] == 0.0
        rescaled = pd.read_csv(tmp_path / "pattern_damped-rescaled.csv")
        far = pd.read_csv(tmp_path / "pattern_farfield.csv")
        np.testing.assert_array_equal(rescaled["P"], far["P"])
        assert set(rescaled["method"]) == {"DampedRescaled"}
        assert set(far["method"]) == {"FarField"}

    def test_damped_kernel_fixture(self, tmp_path):
        """Test the damped-kernel route through the CLI on a short screen grid."""
        assert main(["pattern", "--config", str(FIXTURES / "pattern_damped.json"),
                     "--out", str(tmp_path), "--samples", "16"]) == 0
        frame = pd.read_csv(tmp_path / "pattern_damped-kernel.csv")
        assert set(frame["method"]) == {"DampedKernel"}
        assert frame["gamma"].iloc[0] == 0.5
        assert frame["P"].min() >= -1e-9 * frame["P"].max()

    def test_simplified_damped_method(self, tmp_path):
        """Test damped-paper50a writes the DampedPaper50a tag and damped-coth-free is its alias."""
        base = ["pattern", "--config", str(FIXTURES / "pattern_damped.json"), "--samples", "16"]
        assert main([*base, "--out", str(tmp_path / "a"), "--method", "damped-paper50a"]) == 0
        assert main([*base, "--out", str(tmp_path / "b"), "--method", "damped-coth-free"]) == 0
        frame = pd.read_csv(tmp_path / "a" / "pattern_damped-paper50a.csv")
        assert set(frame["method"]) == {"DampedPaper50a"}
        alias = tmp_path / "b" / "pattern_damped-paper50a.csv"
        assert alias.read_bytes() == (tmp_path / "a" / "pattern_damped-paper50a.csv").read_bytes()
        assert _read_json(tmp_path / "b" / "manifest.json")["config"]["method"] == "damped-paper50a"

    def test_explicit_window(self, tmp_path):
        """Test --x-min, --x-max and --samples set the screen grid."""
        assert main(["pattern", "--config", str(FIXTURES / "pattern_fig2.json"), "--out",
                     str(tmp_path), "--x-min", "-5", "--x-max", "5", "--samples", "11"]) == 0
        frame = pd.read_csv(tmp_path / "pattern_closed.csv")
        np.testing.assert_allclose(frame["x"], np.linspace(-5.0, 5.0, 11))

    def test_outputs_stay_in_out_dir(self, tmp_path):
        """Test every listed output exists under --out and nothing lands elsewhere."""
        out = tmp_path / "run"
        assert main(["pattern", "--config", str(FIXTURES / "pattern_fig2.json"),
                     "--out", str(out), "--samples", "64"]) == 0
        manifest = _read_json(out / "manifest.json")
        assert sorted(p.name for p in out.iterdir()) == sorted(manifest["outputs"])
        assert [p.name for p in tmp_path.iterdir()] == ["run"]
        assert manifest["config"]["method"] == "closed"
        assert manifest["config"]["convention"] == "derived"

    def test_unknown_compare_method(self, tmp_path, capsys):
        """Test an unknown method in --compare."""
        code = main(["pattern", "--config", str(FIXTURES / "pattern_fig2.json"),
                     "--out", str(tmp_path), "--compare", "farfield,guess"])
        assert code == 2
        assert "guess" in capsys.readouterr().err

    def test_help_lists_flags(self, capsys):
        """Test the pattern help text names its flags."""
        with pytest.raises(SystemExit) as exc:
            main(["pattern", "--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        for flag in ("--config", "--out", "--method", "--convention", "--compare", "--samples",
                     "--x-min", "--x-max", "--time"):
            assert flag in out


class TestEvolveCommand:
    """Test the evolve subcommand."""

    def test_free_packet(self, tmp_path, capsys):
        """Test a frictionless run keeps its trace and writes snapshots, trace and manifest."""
        assert main(["evolve", "--config", str(FIXTURES / "evolve_free.json"),
                     "--out", str(tmp_path)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["trace_rel_error"] < 1e-6
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == ["manifest.json", "snapshot_0000.csv", "snapshot_0001.csv",
                         "snapshot_0002.csv", "trace.csv"]
        snapshot = pd.read_csv(tmp_path / "snapshot_0002.csv")
        assert list(snapshot.columns) == ["t", "x_plus", "x_minus", "re", "im"]
        assert len(snapshot) == 80 * 80
        assert snapshot["t"].iloc[0] == pytest.approx(1.0)

    def test_damped_trace(self, tmp_path, capsys):
        """Test the damped fixture's trace follows exp(-gamma t)."""
        assert main(["evolve", "--config", str(FIXTURES / "evolve_gaussian.json"),
                     "--out", str(tmp_path)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["predicted_trace"] == pytest.approx(np.exp(-0.5))
        assert summary["max_boundary_mass"] < 1e-6
        assert summary["trace_rel_error"] < 1e-3
        trace = pd.read_csv(tmp_path / "trace.csv")
        assert list(trace.columns) == ["t", "re_trace", "im_trace", "predicted"]
        assert len(trace) == 201

    def test_unstable_step(self, tmp_path, capsys):
        """Test an oversized dt exits with the instability code."""
        data = _read_json(FIXTURES / "evolve_gaussian.json")
        data["evolver"]["dt"] = 0.05
        config = _write_json(tmp_path / "unstable.json", data)
        assert main(["evolve", "--config", str(config), "--out", str(tmp_path / "out")]) == 4
        assert "❌ Instability" in capsys.readouterr().err

    def test_unknown_initial_state(self, tmp_path):
        """Test an unknown initial state kind."""
        data = _read_json(FIXTURES / "evolve_free.json")
        data["initial"] = {"kind": "cat"}
        config = _write_json(tmp_path / "cat.json", data)
        assert main(["evolve", "--config", str(config), "--out", str(tmp_path / "out")]) == 2

    def test_non_numeric_step(self, tmp_path, capsys):
        """Test a text time step exits with the configuration code."""
        data = _read_json(FIXTURES / "evolve_free.json")
        data["evolver"]["dt"] = "fast"
        config = _write_json(tmp_path / "text.json", data)
        assert main(["evolve", "--config", str(config), "--out", str(tmp_path / "out")]) == 2
        assert "dt" in capsys.readouterr().err

    def test_wrap_around_exit_code(self, tmp_path, capsys):
        """Test a damped run on a box too small for its coherence exits with the instability code."""
        data = _read_json(FIXTURES / "evolve_gaussian.json")
        data["evolver"]["grid"] = {"x_min": -10.0, "x_max": 10.0, "n": 80}
        data["evolver"]["t_final"] = 2.0
        config = _write_json(tmp_path / "small.json", data)
        assert main(["evolve", "--config", str(config), "--out", str(tmp_path / "out")]) == 4
        assert "boundary mass" in capsys.readouterr().err


class TestLangevinCommand:
    """Test the langevin subcommand."""

    ARGS = ["--steps", "400", "--ensembles", "200", "--seed", "17"]

    def test_outputs(self, tmp_path, capsys):
        """Test msd.csv and diffusion.json are written."""
        code = main(["langevin", "--params", str(FIXTURES / "langevin_default.json"),
                     "--out", str(tmp_path), *self.ARGS])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["D_einstein"] == 1.0
        assert summary["window"] == [10.0, 20.0]
        assert summary["n_ensembles"] == 200
        diffusion = _read_json(tmp_path / "diffusion.json")
        assert diffusion["D_hat"] == summary["D_hat"]
        assert _read_json(tmp_path / "manifest.json")["seed"] == 17

    def test_deterministic_across_threads(self, tmp_path):
        """Test the same seed writes byte-identical MSD tables for any thread count."""
        for name, threads in (("a", "1"), ("b", "3")):
            assert main(["--threads", threads, "langevin", "--params",
                         str(FIXTURES / "langevin_default.json"), "--out", str(tmp_path / name),
                         *self.ARGS]) == 0
        first = (tmp_path / "a" / "msd.csv").read_bytes()
        assert first == (tmp_path / "b" / "msd.csv").read_bytes()

    def test_unresolved_relaxation_time(self, tmp_path, capsys):
        """Test dt >= M/(10R) exits with the instability code."""
        code = main(["langevin", "--params", str(FIXTURES / "langevin_default.json"),
                     "--out", str(tmp_path), "--dt", "0.2", *self.ARGS])
        assert code == 4
        assert "M/(10R)" in capsys.readouterr().err
