from fastapi import APIRouter, Depends, HTTPException, Query
from sqlalchemy.orm import Session
from typing import List, Optional

from database.database import get_db
from models.experiment_run import ExperimentRun
from schemas.experiment import ExperimentRunOut

router = APIRouter(prefix="/experiments", tags=["experiments"])


@router.get("/", response_model=List[ExperimentRunOut])
def list_runs(
    name: Optional[str] = None,
    status: Optional[str] = Query(None, pattern="^(passed|failed|exploratory)$"),
    skip: int = Query(0, ge=0),
    limit: int = Query(50, ge=1, le=500),
    db: Session = Depends(get_db),
):
    q = db.query(ExperimentRun)
    if name:
        q = q.filter(ExperimentRun.name == name)
    if status:
        q = q.filter(ExperimentRun.status == status)
    return q.order_by(ExperimentRun.id.desc()).offset(skip).limit(limit).all()


@router.get("/{run_id}", response_model=ExperimentRunOut)
def get_run(run_id: int, db: Session = Depends(get_db)):
    run = db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()
    if not run:
        raise HTTPException(status_code=404, detail="Experiment run not found")
    return run
