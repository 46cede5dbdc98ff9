from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, Session
from dotenv import load_dotenv
import os

load_dotenv()

# Run registry configuration from environment variables
DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./urnwalk.db")
if not DATABASE_URL:
    raise ValueError("DATABASE_URL environment variable is empty!")

connect_args = {"check_same_thread": False} if DATABASE_URL.startswith("sqlite") else {}

engine = create_engine(DATABASE_URL, pool_pre_ping=True, connect_args=connect_args)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def get_db() -> Session:
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_db() -> None:
    from models.base import Base
    import models.audit_log  # noqa: F401
    import models.experiment_run  # noqa: F401

    Base.metadata.create_all(bind=engine)
