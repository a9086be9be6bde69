from typing import Literal
from pydantic_settings import BaseSettings
from pydantic import Field, model_validator


class RvlSettings(BaseSettings):
    # Symbolic limits
    RVL_MAX_ORDER: int = Field(7, validation_alias="RVL_MAX_ORDER")
    RVL_WARN_ORDER: int = Field(7, validation_alias="RVL_WARN_ORDER")

    # Numeric defaults
    RVL_STEP: float = Field(1e-3, validation_alias="RVL_STEP")
    RVL_EPSILON: float = Field(1e-4, validation_alias="RVL_EPSILON")
    RVL_BLOWUP_THRESHOLD: float = Field(1e12, validation_alias="RVL_BLOWUP_THRESHOLD")
    RVL_WINDOW_THRESHOLD: float = Field(1e-8, validation_alias="RVL_WINDOW_THRESHOLD")

    # Verdict tolerances
    RVL_CONSISTENCY_TOLERANCE: float = Field(1e-6, validation_alias="RVL_CONSISTENCY_TOLERANCE")
    RVL_STATIONARITY_TOLERANCE: float = Field(1e-3, validation_alias="RVL_STATIONARITY_TOLERANCE")

    # Output
    RVL_FORMAT: Literal["plain", "latex", "sexpr"] = Field("latex", validation_alias="RVL_FORMAT")
    RVL_LOG_LEVEL: str = Field("INFO", validation_alias="RVL_LOG_LEVEL")

    @model_validator(mode="after")
    def validate_numeric_config(self):
        """Reject settings the integrator and quadrature cannot work with."""
        if self.RVL_MAX_ORDER < 1:
            raise ValueError("RVL_MAX_ORDER must be a positive integer")
        if self.RVL_STEP <= 0:
            raise ValueError("RVL_STEP must be positive")
        if self.RVL_EPSILON <= 0:
            raise ValueError("RVL_EPSILON must be positive")
        if self.RVL_BLOWUP_THRESHOLD <= 0:
            raise ValueError("RVL_BLOWUP_THRESHOLD must be positive")
        return self
