from pathlib import Path
from typing import Any, Dict, Optional

from ..core.csv_io import write_json
from ..core.physics import regime_report
from ..models.fields import as_float
from ..models.manifest import RunManifest
from ..models.params import PhysParams
from .base import BaseService


class RegimeService(BaseService):
    """Crossover temperature, Einstein coefficient and regime tag for one parameter set."""

    subcommand = "regime"

    def run(self, data: Dict[str, Any], out_dir: Optional[Path] = None,
            threshold: Optional[float] = None) -> RunManifest:
        params = PhysParams.from_dict(data.get("params", data))
        threshold = threshold if threshold is not None else as_float(
            "threshold", data.get("threshold", self.config.numerics.regime_threshold))
        manifest = self._start({"params": params.to_dict(), "threshold": threshold})
        out_dir = self._prepare_out(out_dir)

        report = regime_report(params, threshold)
        manifest.summary = report
        if out_dir is not None:
            write_json(report, out_dir / "regime.json")
            manifest.outputs.append("regime.json")
        return self._finish(manifest, out_dir)
