from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Dict, List, Optional

from schemas.walk import UINT64_MAX, WalkConfig

SCHEMA_VERSION = 1


class ExperimentSpec(BaseModel):
    name: str = Field(..., min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    walk: WalkConfig
    horizons: List[int] = Field(..., min_length=1)
    trials: int = Field(..., ge=1)
    k_list: List[int] = Field(default_factory=lambda: [1])
    master_seed: int = Field(0, ge=0, le=UINT64_MAX)
    output_dir: Optional[str] = None
    target: Optional[float] = Field(None, ge=0.0, le=1.0)
    tolerance: Optional[float] = Field(0.02, gt=0.0)
    k_tolerance: Optional[float] = Field(None, gt=0.0)
    workers: Optional[int] = Field(None, ge=1)

    @field_validator("walk", mode="before")
    @classmethod
    def flatten_walk(cls, value):
        # documents write [walk] variant/alpha next to start and step sizes
        if isinstance(value, dict) and "kind" not in value:
            value = dict(value)
            kind = {"variant": value.pop("variant", "polya")}
            if "alpha" in value:
                kind["alpha"] = value.pop("alpha")
            value["kind"] = kind
        return value

    @model_validator(mode="after")
    def check_consistency(self):
        if any(n < 1 for n in self.horizons):
            raise ValueError("horizons must be positive")
        if any(b <= a for a, b in zip(self.horizons, self.horizons[1:])):
            raise ValueError("horizons must be strictly increasing")
        if any(k < 1 for k in self.k_list):
            raise ValueError("k_list entries must be >= 1")
        if self.walk.dims == 3 and set(self.k_list) - {1}:
            raise ValueError("k_list other than [1] is not defined for 3D walks")
        return self

    @property
    def exploratory(self) -> bool:
        return self.walk.exploratory


class ConvergenceRow(BaseModel):
    series: str = "q"  # q, q_k:<k> or q_pairwise
    N: int
    mean_q: float
    var_q: Optional[float] = None
    stderr: Optional[float] = None
    target: Optional[float] = None
    abs_err: Optional[float] = None
    abs_err_times_N_quarter: Optional[float] = None

    @model_validator(mode="after")
    def check_error(self):
        if self.target is not None and self.abs_err is not None:
            if abs(self.abs_err - abs(self.mean_q - self.target)) > 1e-12:
                raise ValueError("abs_err must equal |mean_q - target|")
        return self


class RunResult(BaseModel):
    spec: ExperimentSpec
    rows: List[ConvergenceRow]
    k_rows: List[ConvergenceRow] = Field(default_factory=list)
    passed: bool
    exploratory: bool
    label: Optional[str] = None
    failures: List[str] = Field(default_factory=list)
    artifacts: Dict[str, str] = Field(default_factory=dict)
    duration_ms: Optional[int] = None
    run_id: Optional[int] = None


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class ExperimentRunOut(BaseModel):
    id: int
    name: str
    walk_kind: str
    start: List[int]
    step_right: int
    step_up: int
    horizons: List[int]
    trials: int
    master_seed: int
    status: str
    target: Optional[float] = None
    final_abs_err: Optional[float] = None
    summary: Optional[dict] = None
    duration_ms: Optional[int] = None

    class Config:
        from_attributes = True
