import logging
import time
from pathlib import Path
from typing import Any, Dict, Optional

from .. import __version__
from ..config.settings import AppConfig
from ..core.csv_io import write_json
from ..core.errors import ConfigError
from ..models.manifest import RunManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class BaseService:
    """Shared run bookkeeping: output directory, timing and the run manifest."""

    subcommand = ""

    def __init__(self, config: AppConfig):
        self.config = config

    @staticmethod
    def _section(data: Dict[str, Any], key: str) -> Dict[str, Any]:
        block = data.get(key)
        if not isinstance(block, dict):
            raise ConfigError(f"config needs a {key!r} object")
        return block

    @staticmethod
    def _prepare_out(out_dir: Optional[Path]) -> Optional[Path]:
        if out_dir is None:
            return None
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return out_dir

    def _start(self, resolved: Dict[str, Any], seed: Optional[int] = None) -> RunManifest:
        self._t0 = time.perf_counter()
        return RunManifest(subcommand=self.subcommand, config=resolved, version=__version__, seed=seed)

    def _finish(self, manifest: RunManifest, out_dir: Optional[Path]) -> RunManifest:
        manifest.duration_s = time.perf_counter() - self._t0
        if out_dir is not None:
            manifest.outputs.append(MANIFEST_NAME)
            write_json(manifest.to_dict(), out_dir / MANIFEST_NAME)
            logger.info("%s run wrote %d file(s) to %s", self.subcommand, len(manifest.outputs), out_dir)
        return manifest
