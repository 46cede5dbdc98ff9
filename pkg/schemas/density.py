from pydantic import BaseModel, Field, model_validator
from typing import Optional
import enum


class DensityParams(BaseModel):
    a0: int = Field(..., ge=1)
    b0: int = Field(..., ge=1)
    r0: int = Field(..., ge=1)
    u0: int = Field(..., ge=1)

    model_config = {"frozen": True}

    @classmethod
    def parse(cls, text: str) -> "DensityParams":
        parts = [int(x) for x in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected a0,b0,r0,u0 but got '{text}'")
        a0, b0, r0, u0 = parts
        return cls(a0=a0, b0=b0, r0=r0, u0=u0)


class DensityMethod(str, enum.Enum):
    euler_product = "EulerProduct"
    mobius_truncated = "MobiusTruncated"
    brute_force = "BruteForce"


class DensityValue(BaseModel):
    value: float
    method: DensityMethod
    depth: Optional[int] = None  # truncation depth or grid size N
    tail_bound: float = Field(0.0, ge=0.0)

    @model_validator(mode="after")
    def check_range(self):
        # truncated sums may overshoot [0, 1] by at most their tail
        if not (-self.tail_bound <= self.value <= 1.0 + self.tail_bound):
            raise ValueError(f"density {self.value} outside [0, 1] beyond tail bound {self.tail_bound}")
        return self

    def agrees_with(self, other: "DensityValue") -> bool:
        return abs(self.value - other.value) <= self.tail_bound + other.tail_bound
