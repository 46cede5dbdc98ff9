import logging
from typing import Optional, Dict, Any
from sqlalchemy.orm import Session
from datetime import datetime

logger = logging.getLogger(__name__)


def log_event(
    db: Session,
    action: str,
    status: str,  # 'success', 'failed', 'error'
    target_type: Optional[str] = None,
    target_id: Optional[int] = None,
    duration_ms: Optional[int] = None,
    error_message: Optional[str] = None,
    details: Optional[Dict[str, Any]] = None,
):

    from models.audit_log import AuditLog

    try:
        audit_entry = AuditLog(
            action=action,
            status=status,
            target_type=target_type,
            target_id=target_id,
            duration_ms=duration_ms,
            error_message=error_message,
            details=details,
            created_at=datetime.utcnow()
        )
        db.add(audit_entry)
        db.commit()
        return audit_entry
    except Exception as e:
        logger.error("[AUDIT ERROR] Failed to log %s: %s", action, e)
        db.rollback()
        return None


def record_run(db: Session, result, summary: Optional[Dict[str, Any]] = None):
    """Stores a finished experiment and its audit event; returns the row or None."""

    from models.experiment_run import ExperimentRun

    spec = result.spec
    final = result.rows[-1] if result.rows else None
    if result.exploratory:
        status = "exploratory"
    else:
        status = "passed" if result.passed else "failed"

    rec = ExperimentRun(
        name=spec.name,
        walk_kind=spec.walk.kind.variant.value,
        start=list(spec.walk.start),
        step_right=spec.walk.step_right,
        step_up=spec.walk.step_up,
        horizons=list(spec.horizons),
        trials=spec.trials,
        master_seed=str(spec.master_seed),
        status=status,
        target=final.target if final else None,
        final_abs_err=final.abs_err if final else None,
        summary=summary,
        duration_ms=result.duration_ms,
    )

    db.add(rec)
    try:
        db.commit()
        db.refresh(rec)
    except Exception as e:
        logger.error("[AUDIT ERROR] Failed to record run %s: %s", spec.name, e)
        try:
            db.rollback()
        except Exception:
            pass
        return None

    log_event(
        db,
        action="run",
        status="success" if result.passed else "failed",
        target_type="experiment_run",
        target_id=rec.id,
        duration_ms=result.duration_ms,
        details={"name": spec.name, "failures": result.failures, "label": result.label},
    )
    return rec
