import os
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


@dataclass
class NumericsConfig:
    """Tolerances, budgets and thresholds used by the numerical routes."""
    threads: int = 1
    quad_epsabs: float = 1e-9
    quad_limit: int = 200
    regime_threshold: float = 10.0
    diffraction_ratio: float = 10.0
    stability_c: float = 0.2

    @classmethod
    def from_env(cls) -> 'NumericsConfig':
        """Create configuration from environment variables."""
        threads = _env_int("QBM_THREADS", 1)
        quad_epsabs = _env_float("QBM_QUAD_EPSABS", 1e-9)
        quad_limit = _env_int("QBM_QUAD_LIMIT", 200)
        regime_threshold = _env_float("QBM_REGIME_THRESHOLD", 10.0)
        diffraction_ratio = _env_float("QBM_DIFFRACTION_RATIO", 10.0)
        stability_c = _env_float("QBM_STABILITY_C", 0.2)

        if threads < 1:
            raise ValueError("QBM_THREADS must be at least 1")

        if quad_epsabs <= 0:
            raise ValueError("QBM_QUAD_EPSABS must be positive")

        if quad_limit < 10:
            raise ValueError("QBM_QUAD_LIMIT must be at least 10")

        if regime_threshold <= 1:
            raise ValueError("QBM_REGIME_THRESHOLD must be greater than 1")

        if stability_c <= 0:
            raise ValueError("QBM_STABILITY_C must be positive")

        return cls(
            threads=threads,
            quad_epsabs=quad_epsabs,
            quad_limit=quad_limit,
            regime_threshold=regime_threshold,
            diffraction_ratio=diffraction_ratio,
            stability_c=stability_c
        )


@dataclass
class RuntimeConfig:
    """Logging and progress reporting."""
    log_level: str = "WARNING"
    progress: bool = False

    @classmethod
    def from_env(cls) -> 'RuntimeConfig':
        """Create configuration from environment variables."""
        log_level = os.getenv("QBM_LOG_LEVEL", "WARNING").strip().upper()
        progress = os.getenv("QBM_PROGRESS", "").strip().lower() in ("1", "true", "yes", "on")

        if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"QBM_LOG_LEVEL must be a logging level name, got {log_level!r}")

        return cls(log_level=log_level, progress=progress)


@dataclass
class AppConfig:
    """Application configuration."""
    numerics: NumericsConfig
    runtime: RuntimeConfig

    @classmethod
    def from_env(cls) -> 'AppConfig':
        """Create application configuration from environment variables."""
        return cls(
            numerics=NumericsConfig.from_env(),
            runtime=RuntimeConfig.from_env()
        )
