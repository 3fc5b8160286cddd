import logging
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from ..core.csv_io import write_frame
from ..core.errors import ConfigError
from ..core.evolver import evolve, quadratic_potential
from ..core.slits import discretize, gaussian_slit_density, gaussian_state_grid
from ..models.density import DensityMatrixGrid
from ..models.evolution import EvolverConfig, Potential
from ..models.geometry import SlitGeometry
from ..models.fields import as_float
from ..models.manifest import RunManifest
from ..models.params import PhysParams
from .base import BaseService

logger = logging.getLogger(__name__)


class EvolveService(BaseService):
    """Master-equation runs: snapshots, trace series and manifest."""

    subcommand = "evolve"

    def __init__(self, config, threads: Optional[int] = None):
        super().__init__(config)
        self.threads = threads or config.numerics.threads

    def resolve(self, data: Dict[str, Any]) -> Dict[str, Any]:
        params = PhysParams.from_dict(self._section(data, "params"))
        evolver_block = dict(self._section(data, "evolver"))
        evolver_block.setdefault("stability_c", self.config.numerics.stability_c)
        evolver_block["threads"] = self.threads
        cfg = EvolverConfig.from_dict(evolver_block)

        initial = dict(data.get("initial", {"kind": "gaussian"}))
        kind = initial.get("kind", "gaussian")
        if kind == "gaussian":
            initial = {"kind": "gaussian", "x0": as_float("x0", initial.get("x0", 0.0)),
                       "sigma": as_float("sigma", initial.get("sigma", 1.0)),
                       "k0": as_float("k0", initial.get("k0", 0.0))}
        elif kind == "slits":
            geom = SlitGeometry.from_dict(self._section(initial, "geometry"))
            initial = {"kind": "slits", "geometry": geom.to_dict(), "sigma": initial.get("sigma")}
        else:
            raise ConfigError(f"unknown initial state kind {kind!r}; use 'gaussian' or 'slits'")

        potential = dict(data.get("potential", {"kind": "zero"}))
        if potential.get("kind", "zero") == "zero":
            potential = {"kind": "zero"}
        elif potential["kind"] == "quadratic":
            potential = {"kind": "quadratic", "omega": as_float("omega", potential.get("omega", 1.0))}
        else:
            raise ConfigError(f"unknown potential kind {potential['kind']!r}; use 'zero' or 'quadratic'")

        return {"params": params.to_dict(), "evolver": cfg.to_dict(), "initial": initial,
                "potential": potential}

    @staticmethod
    def initial_state(resolved: Dict[str, Any], cfg: EvolverConfig) -> DensityMatrixGrid:
        initial = resolved["initial"]
        if initial["kind"] == "gaussian":
            return gaussian_state_grid(cfg.axis, initial["x0"], initial["sigma"], initial["k0"])
        geom = SlitGeometry.from_dict(initial["geometry"])
        # grid runs use smooth Gaussian apertures; sharp edges excite grid-scale modes
        return discretize(gaussian_slit_density(geom, initial.get("sigma")), cfg.axis)

    @staticmethod
    def potential(resolved: Dict[str, Any], params: PhysParams) -> Potential:
        block = resolved["potential"]
        if block["kind"] == "quadratic":
            return quadratic_potential(block["omega"], params)
        return Potential.zero()

    def run(self, data: Dict[str, Any], out_dir: Path, progress: Optional[bool] = None) -> RunManifest:
        resolved = self.resolve(data)
        manifest = self._start(resolved)
        out_dir = self._prepare_out(out_dir)
        progress = self.config.runtime.progress if progress is None else progress

        params = PhysParams.from_dict(resolved["params"])
        cfg = EvolverConfig.from_dict(resolved["evolver"])
        rho0 = self.initial_state(resolved, cfg)
        result = evolve(rho0, self.potential(resolved, params), params, cfg, progress=progress)

        for k, (snap, t) in enumerate(zip(result.snapshots, result.snapshot_times)):
            name = f"snapshot_{k:04d}.csv"
            frame = snap.to_frame()
            frame.insert(0, "t", t)
            write_frame(frame, out_dir / name)
            manifest.outputs.append(name)

        trace_frame: pd.DataFrame = result.trace_frame()
        write_frame(trace_frame, out_dir / "trace.csv")
        manifest.outputs.append("trace.csv")

        predicted = trace_frame["predicted"].iloc[-1]
        final = trace_frame["re_trace"].iloc[-1]
        manifest.summary = {
            "final_trace": float(final),
            "predicted_trace": float(predicted),
            "trace_rel_error": float(abs(final - predicted) / abs(predicted)) if predicted else None,
            "max_hermiticity_residual": float(result.hermiticity.max()),
            "max_boundary_mass": float(result.boundary_mass.max())
        }
        return self._finish(manifest, out_dir)
