import os
import tempfile

# Settings are read at import time, so they must be in place before any project import.
_TMP = tempfile.mkdtemp(prefix="urnwalk-tests-")
os.environ["DATABASE_URL"] = f"sqlite:///{_TMP}/registry.db"
os.environ["URNWALK_WORKERS"] = "1"
os.environ["URNWALK_OUTPUT_DIR"] = os.path.join(_TMP, "runs")
os.environ["URNWALK_T_CUTOFF"] = "100000"
os.environ["URNWALK_RECORD_RUNS"] = "0"
os.environ.pop("CI", None)

import pytest

from database.database import SessionLocal, init_db


@pytest.fixture(scope="session", autouse=True)
def registry():
    init_db()
    yield


@pytest.fixture
def db():
    session = SessionLocal()
    try:
        yield session
    finally:
        session.close()


@pytest.fixture
def client():
    from fastapi.testclient import TestClient
    from main import app

    with TestClient(app) as c:
        yield c
