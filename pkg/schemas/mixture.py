from pydantic import BaseModel, Field, field_validator
from typing import List, Optional

from schemas.walk import WalkConfig


class BetaParams(BaseModel):
    a: float = Field(..., gt=0)
    b: float = Field(..., gt=0)

    model_config = {"frozen": True}

    @classmethod
    def from_walk(cls, a0: int, b0: int, c: int = 1) -> "BetaParams":
        """Mixture measure of the walk started at (a0, b0) with step c."""
        return cls(a=a0 / c, b=b0 / c)

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)


class StepRecord(BaseModel):
    bits: List[int] = Field(..., min_length=1)  # 1 = right (first colour drawn)

    model_config = {"frozen": True}

    @field_validator("bits")
    @classmethod
    def check_bits(cls, value):
        if any(bit not in (0, 1) for bit in value):
            raise ValueError("bits must be 0 or 1")
        return value

    @classmethod
    def parse(cls, text: str) -> "StepRecord":
        return cls(bits=[int(ch) for ch in text.replace(",", "").replace(" ", "")])

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def t_n(self) -> int:
        return sum(self.bits)

    def running(self) -> List[int]:
        """t_j before step j, for j = 0..n-1."""
        out, t = [], 0
        for bit in self.bits:
            out.append(t)
            t += bit
        return out


class DeFinettiReport(BaseModel):
    config: WalkConfig
    horizon: int
    trials: int
    master_seed: int
    beta: BetaParams
    ks_statistic: float = Field(..., ge=0.0, le=1.0)
    p_value: float
    limit_frequencies: List[float]


class SlopeReport(BaseModel):
    config: WalkConfig
    horizon: int
    trials: int
    master_seed: int
    ks_statistic: float = Field(..., ge=0.0, le=1.0)
    p_value: float
    max_radial_deviation: Optional[float] = None
    angles: List[float]
