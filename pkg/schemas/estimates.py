from pydantic import BaseModel, Field
from typing import Dict, List, Optional, Tuple


class BoundReport(BaseModel):
    name: str
    n_range: Tuple[int, int]
    alpha_grid: List[float]
    max_ratio: float = Field(..., ge=0.0)
    worst_case: Tuple[int, float, int]  # (n, alpha, k) or (n, alpha, d)
    witness: Optional[Tuple[int, float, int]] = None
    constant: Optional[float] = None
    per_n_max: Dict[int, float] = Field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.max_ratio <= 1.0


class ResidueMass(BaseModel):
    n: int
    alpha: float
    d: int
    r: int
    mass: float
    deviation_scaled: float


class GcdSum(BaseModel):
    value: float
    main_term: float
    error: float
    scaled_error: float


class IndicatorSample(BaseModel):
    n: int
    samples: int
    mean: float
    stderr: float
    main_term: float


class ExpectationRow(BaseModel):
    N: int
    value: float
    target: float
    deviation: float
    scaled: Optional[float] = None  # deviation * N / log N
