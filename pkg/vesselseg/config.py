from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .models.enums import Channel, SegmentationMode, SureMode
from .models.frames import FrameFamily, TransformKind

_BASE_DIR = Path(__file__).resolve().parent
_ROOT_ENV = _BASE_DIR.parent / ".env"


class ConfigFileError(ValueError):
    """Raised when a ``--config`` key=value file names an unknown key."""


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=str(_ROOT_ENV),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    sigma: float = Field(default=2.0, gt=0, alias="VESSELSEG_SIGMA")
    epsilon: float = Field(default=0.02, gt=0, alias="VESSELSEG_EPSILON")
    max_iterations: int = Field(default=50, ge=1, alias="VESSELSEG_MAX_ITERATIONS")
    stall_patience: int = Field(default=3, ge=1, alias="VESSELSEG_STALL_PATIENCE")
    mode: SegmentationMode = Field(default=SegmentationMode.TFAE, alias="VESSELSEG_MODE")
    transform: FrameFamily = Field(default=FrameFamily.FRAMELET, alias="VESSELSEG_TRANSFORM")
    sure_mode: SureMode = Field(default=SureMode.COEFFICIENTS, alias="VESSELSEG_SURE_MODE")
    channel: Channel = Field(default=Channel.GREEN, alias="VESSELSEG_CHANNEL")
    log_level: str = Field(default="WARNING", alias="VESSELSEG_LOG_LEVEL")
    environment: str = Field(default="development", alias="APP_ENV")
    sentry_dsn: Optional[str] = Field(default=None, alias="SENTRY_DSN")
    sentry_traces_sample_rate: float = Field(default=0.0, ge=0.0, le=1.0, alias="SENTRY_TRACES_SAMPLE_RATE")

    @model_validator(mode="after")
    def _blank_dsn_is_unset(self) -> "Settings":
        if not self.sentry_dsn or not self.sentry_dsn.strip():
            self.sentry_dsn = None
        return self


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()  # type: ignore[call-arg]


settings = get_settings()


class SegmenterConfig(BaseModel):
    """Parameters of one segmentation run; defaults fix sigma = 2 and epsilon = 0.02."""

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(default=2.0, gt=0)
    epsilon: float = Field(default=0.02, gt=0)
    mode: SegmentationMode = SegmentationMode.TFAE
    transform: TransformKind = Field(default_factory=TransformKind)
    sure_mode: SureMode = SureMode.COEFFICIENTS
    sure_mad: bool = False
    max_iterations: int = Field(default=50, ge=1)
    stall_patience: int = Field(default=3, ge=1)


def load_config_file(path: Path, allowed: set[str]) -> dict[str, str]:
    """Read a key=value file whose keys mirror CLI flag names.

    Keys may be written as ``max-iters``, ``--max-iters`` or ``max_iters``; the returned
    dict is keyed by parameter name. Unknown keys raise ``ConfigFileError``.
    """
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    values: dict[str, str] = {}
    for raw_key, raw_value in dotenv_values(path).items():
        name = raw_key.strip().lstrip("-").replace("-", "_").lower()
        if name not in allowed:
            raise ConfigFileError(f"Unknown config key {raw_key!r} in {path}")
        if raw_value is None:
            raise ConfigFileError(f"Config key {raw_key!r} in {path} has no value")
        values[name] = raw_value.strip()
    return values


class _RunOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input: Optional[Path] = None
    mode: SegmentationMode = SegmentationMode.TFAE
    transform: FrameFamily = FrameFamily.FRAMELET
    sigma: float = Field(default=2.0, gt=0)
    epsilon: float = Field(default=0.02, gt=0)
    max_iters: int = Field(default=50, ge=1)
    channel: Channel = Channel.GREEN
    sure_mode: SureMode = SureMode.COEFFICIENTS
    sure_mad: bool = False

    @model_validator(mode="after")
    def _require_input(self) -> "_RunOptions":
        if self.input is None:
            raise ValueError("--input is required")
        return self

    def segmenter_config(self, mode: SegmentationMode | None = None) -> SegmenterConfig:
        return SegmenterConfig(
            sigma=self.sigma,
            epsilon=self.epsilon,
            mode=mode or self.mode,
            transform=TransformKind(family=self.transform),
            sure_mode=self.sure_mode,
            sure_mad=self.sure_mad,
            max_iterations=self.max_iters,
            stall_patience=settings.stall_patience,
        )


class SegmentOptions(_RunOptions):
    output: Optional[Path] = None
    trace: Optional[Path] = None
    debug_dir: Optional[Path] = None

    @model_validator(mode="after")
    def _require_output(self) -> "SegmentOptions":
        if self.output is None:
            raise ValueError("--output is required")
        return self


class CompareOptions(_RunOptions):
    truth: Optional[Path] = None
    diff: Optional[Path] = None


class PhantomOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    output: Path
    truth: Path
    family: str = "faint-branch"
    width: int = Field(default=128, ge=32)
    height: int = Field(default=128, ge=32)
    noise: float = Field(default=0.05, ge=0)
    seed: int = 0
    spec: Optional[Path] = None


class MetricsOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pred: Path
    truth: Path
