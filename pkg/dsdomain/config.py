import json
import logging
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

logger = logging.getLogger(__name__)


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    angle: float = 1e-6
    metric: float = 1e-9
    spectral: float = 1e-10
    det: float = 1e-12
    incidence: float = 1e-10
    frame: float = 1e-12

    @field_validator("*")
    @classmethod
    def _positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("tolerances must be positive")
        return value


class Settings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tolerances: Tolerances = Field(default_factory=Tolerances)
    samples_per_ridge: int = Field(default=10, ge=1)
    max_order: int = Field(default=12, ge=1)
    power_budget: int = Field(default=64, ge=1)
    epsilon_schedule: List[float] = Field(default_factory=lambda: [1e-2, 1e-4, 1e-6])
    oracle_max_n: int = Field(default=12, ge=2)

    @field_validator("epsilon_schedule")
    @classmethod
    def _decreasing(cls, schedule: List[float]) -> List[float]:
        if not schedule or any(e <= 0 for e in schedule):
            raise ValueError("epsilon schedule must be non-empty and positive")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ValueError("epsilon schedule must be strictly decreasing")
        return schedule

    def with_tolerances(self, **overrides: Optional[float]) -> "Settings":
        """Copy with the given tolerance fields replaced (None values are ignored)"""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if not changes:
            return self
        tolerances = self.tolerances.model_copy(update=changes)
        return self.model_copy(update={"tolerances": Tolerances.model_validate(tolerances.model_dump())})


DEFAULT_SETTINGS = Settings()


def load_settings(path: Optional[Union[str, Path]] = None, **overrides: Optional[float]) -> Settings:
    """Read settings from an optional JSON file, then apply per-run tolerance overrides"""
    settings = DEFAULT_SETTINGS
    if path is not None:
        data = json.loads(Path(path).read_text())
        settings = Settings.model_validate(data)
        logger.debug("Loaded settings from %s", path)
    return settings.with_tolerances(**overrides)
