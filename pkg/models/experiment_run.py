from sqlalchemy import Column, Integer, String, Float, DateTime, JSON, Enum
from sqlalchemy.sql import func
from models.base import Base


class ExperimentRun(Base):

    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    name = Column(String(255), nullable=False, index=True)

    walk_kind = Column(String(50), nullable=False)
    start = Column(JSON, nullable=False)
    step_right = Column(Integer, nullable=False, default=1)
    step_up = Column(Integer, nullable=False, default=1)

    horizons = Column(JSON, nullable=False)
    trials = Column(Integer, nullable=False)
    master_seed = Column(String(20), nullable=False)  # up to 2**64 - 1

    status = Column(Enum('passed', 'failed', 'exploratory', name="run_status"), nullable=False, index=True)
    target = Column(Float, nullable=True)
    final_abs_err = Column(Float, nullable=True)
    summary = Column(JSON, nullable=True)
    duration_ms = Column(Integer, nullable=True)

    created_at = Column(DateTime, server_default=func.now())
