from pathlib import Path
from typing import Any, Dict, Optional

from ..core.csv_io import read_path_csv, write_json
from ..core.flux import constructive_condition, flux_report, line_integral, resistive_action
from ..models.manifest import RunManifest
from ..models.params import PhysParams
from .base import BaseService


class FluxService(BaseService):
    """Oriented area, dissipative phase and quantization residual for path CSVs."""

    subcommand = "flux"

    def run(self, params_data: Dict[str, Any], path1: Path, path2: Optional[Path] = None,
            out_dir: Optional[Path] = None) -> RunManifest:
        params = PhysParams.from_dict(params_data.get("params", params_data))
        resolved = {
            "params": params.to_dict(),
            "path1": str(path1),
            "path2": str(path2) if path2 is not None else None
        }
        manifest = self._start(resolved)
        out_dir = self._prepare_out(out_dir)

        if path2 is not None:
            report = flux_report(read_path_csv(path1), read_path_csv(path2), params)
        else:
            # a single path is read as a closed loop against the constant path
            loop = read_path_csv(path1, closed=True)
            sigma = 0.5 * line_integral(loop)
            n, residual = constructive_condition(sigma, params)
            report = {
                "sigma": sigma,
                "phase": params.friction * sigma / params.hbar,
                "n": n,
                "residual": residual,
                "resistive_action": resistive_action(loop, params)
            }

        manifest.summary = report
        if out_dir is not None:
            write_json(report, out_dir / "flux.json")
            manifest.outputs.append("flux.json")
        return self._finish(manifest, out_dir)
