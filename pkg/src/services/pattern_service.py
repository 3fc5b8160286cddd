import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..core import diffraction, kernel
from ..core.csv_io import write_frame
from ..core.errors import ConfigError
from ..core.quadrature import QuadConfig
from ..core.slits import gaussian_slit_density, initial_density
from ..models.fields import as_float, as_int
from ..models.geometry import SlitGeometry
from ..models.manifest import RunManifest
from ..models.params import PhysParams
from ..models.pattern import DiffractionPattern
from .base import BaseService

logger = logging.getLogger(__name__)

METHODS = ("exact", "fresnel", "farfield", "closed", "damped-rescaled", "damped-kernel",
           "damped-paper50a", "damped-coth-free")
# alternative spellings, stored under the canonical name
METHOD_ALIASES = {"damped-coth-free": "damped-paper50a"}


class PatternService(BaseService):
    """Screen patterns for a two-slit geometry by any of the available routes."""

    subcommand = "pattern"

    def __init__(self, config, threads: Optional[int] = None):
        super().__init__(config)
        numerics = config.numerics
        self.quad_cfg = QuadConfig(
            epsabs=numerics.quad_epsabs,
            limit=numerics.quad_limit,
            threads=threads or numerics.threads
        )

    def resolve(self, data: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
        """Materialise every default of a pattern config; non-None overrides win."""
        resolved = {
            "method": "closed",
            "convention": "derived",
            "samples": diffraction.DEFAULT_SAMPLES,
            "x_min": None,
            "x_max": None,
            "time": None,
            "slit_shape": "tophat",
            "drop_cross_terms": False,
            "compare": None
        }
        resolved.update({k: v for k, v in data.items() if k not in ("params", "geometry")})
        resolved.update({k: v for k, v in overrides.items() if v is not None})
        params = PhysParams.from_dict(self._section(data, "params"))
        geom = SlitGeometry.from_dict(self._section(data, "geometry"))
        resolved["params"] = params.to_dict()
        resolved["geometry"] = geom.to_dict()
        if resolved["time"] is None:
            resolved["time"] = geom.flight_time
        for name in self._methods(resolved):
            if name not in METHODS:
                raise ConfigError(f"unknown pattern method {name!r}; choose from {', '.join(METHODS)}")
        resolved["method"] = METHOD_ALIASES.get(resolved["method"], resolved["method"])
        if resolved["compare"]:
            resolved["compare"] = ",".join(METHOD_ALIASES.get(name, name)
                                           for name in self._methods(resolved))
        if resolved["convention"] not in diffraction.CONVENTIONS:
            raise ConfigError(f"unknown convention {resolved['convention']!r}")
        resolved["samples"] = as_int("samples", resolved["samples"])
        resolved["time"] = as_float("time", resolved["time"])
        for bound in ("x_min", "x_max"):
            if resolved[bound] is not None:
                resolved[bound] = as_float(bound, resolved[bound])
        if resolved["samples"] < 2:
            raise ConfigError("samples must be at least 2")
        return resolved

    @staticmethod
    def _methods(resolved: Dict[str, Any]) -> List[str]:
        if resolved.get("compare"):
            names = [m.strip() for m in str(resolved["compare"]).split(",")]
            if len(names) != 2:
                raise ConfigError("--compare takes exactly two methods, e.g. farfield,closed")
            return names
        return [resolved["method"]]

    def compute(self, method: str, resolved: Dict[str, Any]) -> DiffractionPattern:
        params = PhysParams.from_dict(resolved["params"])
        geom = SlitGeometry.from_dict(resolved["geometry"])
        pp = geom.pattern_params(params)
        t = float(resolved["time"])
        if resolved["slit_shape"] == "gaussian":
            rho0 = gaussian_slit_density(geom)
        else:
            rho0 = initial_density(geom)
        if resolved["drop_cross_terms"]:
            rho0 = rho0.diagonal_only()
        xs = self.samples(resolved, pp)

        if not geom.regime_ok(self.config.numerics.diffraction_ratio):
            logger.warning("geometry is outside the w << d << D diffraction limit (ratio %g)",
                           self.config.numerics.diffraction_ratio)

        if method == "exact":
            return diffraction.pattern_exact(rho0, t, xs, params, self.quad_cfg)
        if method == "fresnel":
            return diffraction.pattern_fresnel(rho0, t, xs, params)
        if method == "farfield":
            return diffraction.pattern_farfield(rho0, t, xs, params, self.quad_cfg)
        if method == "closed":
            return diffraction.pattern_closed_form(pp, xs, resolved["convention"])
        if method == "damped-rescaled":
            return diffraction.pattern_damped_rescaled(rho0, t, xs, params, self.quad_cfg)
        damped = kernel.pattern_damped_kernel(rho0, t, xs, params, self.quad_cfg)
        return damped if method == "damped-kernel" else damped.companion

    @staticmethod
    def samples(resolved: Dict[str, Any], pp) -> np.ndarray:
        n = int(resolved["samples"])
        if resolved["x_min"] is None or resolved["x_max"] is None:
            return diffraction.default_samples(pp, n)
        return np.linspace(float(resolved["x_min"]), float(resolved["x_max"]), n)

    def run(self, data: Dict[str, Any], out_dir: Path, **overrides: Any) -> RunManifest:
        resolved = self.resolve(data, overrides)
        manifest = self._start(resolved)
        out_dir = self._prepare_out(out_dir)

        patterns = {}
        for method in self._methods(resolved):
            pattern = self.compute(method, resolved)
            patterns[method] = pattern
            name = f"pattern_{method}.csv"
            write_frame(pattern.to_frame(), out_dir / name)
            manifest.outputs.append(name)
            if pattern.negative_excess() > 1e-9:
                logger.warning("%s pattern dips below zero by %.3g of its peak", method,
                               pattern.negative_excess())

        if resolved.get("compare"):
            a, b = self._methods(resolved)
            frame, summary = compare_patterns(patterns[a], patterns[b], a, b)
            name = f"compare_{a}_{b}.csv"
            write_frame(frame, out_dir / name)
            manifest.outputs.append(name)
            manifest.summary = summary
        else:
            only = next(iter(patterns.values()))
            manifest.summary = {"peak": only.peak, "imag_residual": only.imag_residual}
        return self._finish(manifest, out_dir)


def compare_patterns(a: DiffractionPattern, b: DiffractionPattern, name_a: str,
                     name_b: str) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """Pointwise relative deviation table and its max/mean summary."""
    if a.x.shape != b.x.shape or not np.array_equal(a.x, b.x):
        raise ConfigError("patterns to compare must share their sample positions")
    dev = diffraction.relative_deviation(a.P, b.P)
    frame = pd.DataFrame({"x": a.x, f"P_{name_a}": a.P, f"P_{name_b}": b.P, "rel_dev": dev})
    summary = {"compare": [name_a, name_b], "max_rel_dev": float(np.max(dev)),
               "mean_rel_dev": float(np.mean(dev))}
    logger.info("compare %s vs %s: max %.3g mean %.3g", name_a, name_b,
                summary["max_rel_dev"], summary["mean_rel_dev"])
    return frame, summary
