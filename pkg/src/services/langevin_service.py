from pathlib import Path
from typing import Any, Dict, Optional

from ..core.csv_io import write_frame, write_json
from ..core.errors import InvalidParameter
from ..core.langevin import estimate_diffusion, simulate_langevin, velocity_variance
from ..core.physics import einstein_diffusion
from ..models.fields import as_float
from ..models.manifest import RunManifest
from ..models.params import PhysParams
from ..models.stochastic import LangevinConfig
from .base import BaseService


class LangevinService(BaseService):
    """Langevin ensemble, MSD table and Einstein-relation diagnostics."""

    subcommand = "langevin"

    def __init__(self, config, threads: Optional[int] = None):
        super().__init__(config)
        self.threads = threads or config.numerics.threads

    def resolve(self, data: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
        params = PhysParams.from_dict(self._section(data, "params"))
        block = dict(data.get("langevin", {}))
        block.update({k: v for k, v in overrides.items() if v is not None})
        if "n_steps" not in block and "dt" in block and params.friction > 0:
            dt = as_float("dt", block["dt"])
            if dt > 0:
                block["n_steps"] = int(round(100.0 * params.mass / params.friction / dt))
        cfg = LangevinConfig.from_dict(block)
        window = data.get("window")
        if window is not None:
            if not isinstance(window, (list, tuple)) or len(window) != 2:
                raise InvalidParameter(f"window must be a pair [t_min, t_max], got {window!r}")
            window = [as_float("window", value) for value in window]
        return {"params": params.to_dict(), "langevin": cfg.to_dict(), "window": window}

    def run(self, data: Dict[str, Any], out_dir: Path, progress: Optional[bool] = None,
            **overrides: Any) -> RunManifest:
        resolved = self.resolve(data, overrides)
        params = PhysParams.from_dict(resolved["params"])
        cfg = LangevinConfig.from_dict(resolved["langevin"])
        manifest = self._start(resolved, seed=cfg.seed)
        out_dir = self._prepare_out(out_dir)
        progress = self.config.runtime.progress if progress is None else progress

        D_einstein = einstein_diffusion(params)
        ensemble = simulate_langevin(cfg, params, threads=self.threads, progress=progress)
        window = tuple(resolved["window"]) if resolved["window"] else None
        estimate = estimate_diffusion(ensemble, params, window)

        write_frame(ensemble.msd_frame(), out_dir / "msd.csv")
        manifest.outputs.append("msd.csv")

        v_var, v_err = velocity_variance(ensemble, estimate.window[0])
        diagnostics = estimate.to_dict()
        diagnostics.update({
            "D_einstein": D_einstein,
            "z_score": estimate.z_score(D_einstein),
            "velocity_variance": v_var,
            "velocity_variance_stderr": v_err,
            "equipartition": params.kBT / params.mass
        })
        write_json(diagnostics, out_dir / "diffusion.json")
        manifest.outputs.append("diffusion.json")
        manifest.summary = diagnostics
        return self._finish(manifest, out_dir)
