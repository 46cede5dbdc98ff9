from pydantic import BaseModel, Field, model_validator
from typing import Dict, List, Optional, Tuple
import enum

UINT64_MAX = (1 << 64) - 1


class WalkVariant(str, enum.Enum):
    polya = "polya"
    alpha_random = "alpha_random"
    friedman = "friedman"
    polya_3d = "polya_3d"


class WalkKind(BaseModel):
    variant: WalkVariant = WalkVariant.polya
    alpha: Optional[float] = None

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def check_alpha(self):
        if self.variant is WalkVariant.alpha_random:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError("alpha_random walks need alpha strictly inside (0, 1)")
        elif self.alpha is not None:
            raise ValueError(f"alpha is only meaningful for alpha_random walks, not {self.variant.value}")
        return self


class WalkConfig(BaseModel):
    kind: WalkKind = Field(default_factory=WalkKind)
    start: Tuple[int, ...] = (1, 1)
    step_right: int = Field(1, ge=1)
    step_up: int = Field(1, ge=1)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def check_shape(self):
        if any(x < 1 for x in self.start):
            raise ValueError(f"start components must be >= 1, got {self.start}")
        if self.kind.variant is WalkVariant.polya_3d:
            if len(self.start) != 3:
                raise ValueError("polya_3d walks start from a composition of 3 colours")
            if self.step_right != 1 or self.step_up != 1:
                raise ValueError("polya_3d walks add one ball per draw")
        elif len(self.start) != 2:
            raise ValueError(f"planar walks need a start of length 2, got {self.start}")
        return self

    @property
    def dims(self) -> int:
        return len(self.start)

    @property
    def equal_steps(self) -> bool:
        return self.step_right == self.step_up

    @property
    def exploratory(self) -> bool:
        return (
            self.kind.variant in (WalkVariant.friedman, WalkVariant.polya_3d)
            or not self.equal_steps
        )


class Position(BaseModel):
    coords: Tuple[int, ...]

    model_config = {"frozen": True}

    @property
    def total(self) -> int:
        return sum(self.coords)


class RngStream(BaseModel):
    master_seed: int = Field(..., ge=0, le=UINT64_MAX)
    stream_id: int = Field(..., ge=0, le=UINT64_MAX)

    model_config = {"frozen": True}


class VisitStats(BaseModel):
    horizon: int = Field(..., ge=1)
    q: float = Field(..., ge=0.0, le=1.0)
    q_k: Dict[int, float]
    right_count: int = Field(..., ge=0)
    final: Position
    slope_angle: Optional[float] = None
    radial_ratio: Optional[float] = None
    q_pairwise: Optional[float] = None
    stream_id: Optional[int] = None

    @model_validator(mode="after")
    def check_fractions(self):
        if self.q_k.get(1) != self.q:
            raise ValueError("q must equal q_k[1]")
        if sum(self.q_k.values()) > 1.0 + 1e-12:
            raise ValueError("k-visibility fractions of disjoint k cannot exceed 1")
        if self.right_count > self.horizon:
            raise ValueError("right_count cannot exceed the horizon")
        return self


class EventKind(str, enum.Enum):
    first_n_up = "first_n_up"
    first_n_right = "first_n_right"
    stay_at_height_one = "stay_at_height_one"


class TrajectoryEvent(BaseModel):
    kind: EventKind
    n: int = Field(..., ge=1)


class MonteCarloSummary(BaseModel):
    config: WalkConfig
    horizon: int
    trials: int
    master_seed: int
    k_list: List[int]
    mean_q: float
    var_q: Optional[float] = None
    stderr: Optional[float] = None
    mean_q_k: Dict[int, float]
    stderr_q_k: Dict[int, Optional[float]]
    mean_q_pairwise: Optional[float] = None
    stderr_q_pairwise: Optional[float] = None
    rows: List[VisitStats]
