from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class RunManifest:
    """Record of one CLI run: resolved config, tool version, timing and outputs."""
    subcommand: str
    config: Dict[str, Any]
    version: str
    duration_s: float = 0.0
    outputs: List[str] = field(default_factory=list)
    seed: Optional[int] = None
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "config": self.config,
            "version": self.version,
            "duration_s": self.duration_s,
            "outputs": self.outputs,
            "seed": self.seed,
            "summary": self.summary
        }
