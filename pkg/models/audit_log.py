from sqlalchemy import Column, Integer, String, Text, DateTime, JSON
from models.base import Base


class AuditLog(Base):

    __tablename__ = "audit_log"

    id = Column(Integer, primary_key=True, index=True)

    action = Column(String(255), nullable=True, index=True)  # 'run', 'selftest', 'bound_check', ...
    status = Column(String(50), nullable=True, index=True)  # 'success', 'failed', 'error'

    target_type = Column(String(100), nullable=True)
    target_id = Column(Integer, nullable=True)

    duration_ms = Column(Integer, nullable=True)
    error_message = Column(Text, nullable=True)

    details = Column(JSON, nullable=True)

    created_at = Column(DateTime, nullable=True, index=True)
