import math

import pytest

from models.experiment_run import ExperimentRun


@pytest.fixture
def stored_run(db):
    rec = ExperimentRun(
        name="stored",
        walk_kind="polya",
        start=[1, 1],
        step_right=1,
        step_up=1,
        horizons=[1000],
        trials=10,
        master_seed=str(2 ** 64 - 1),
        status="passed",
        target=6 / math.pi ** 2,
        final_abs_err=0.001,
        summary={"schema_version": 1},
        duration_ms=12,
    )
    db.add(rec)
    db.commit()
    db.refresh(rec)
    yield rec
    db.delete(rec)
    db.commit()


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_visible_density(client):
    response = client.get("/densities/visible", params={"k": 2})
    assert response.status_code == 200
    assert response.json()["value"] == pytest.approx(1.5 / math.pi ** 2)
    assert client.get("/densities/visible", params={"k": 0}).status_code == 422


def test_delta_routes_agree(client):
    query = {"a0": 1, "b0": 2, "r0": 3, "u0": 5}
    closed = client.get("/densities/delta", params=query).json()
    truncated = client.get("/densities/delta", params={**query, "method": "mobius", "depth": 20_000}).json()
    assert closed["method"] == "EulerProduct"
    assert truncated["method"] == "MobiusTruncated"
    assert abs(closed["value"] - truncated["value"]) <= truncated["tail_bound"]


def test_delta_rejects_unknown_method(client):
    assert client.get("/densities/delta", params={"a0": 1, "b0": 1, "method": "guess"}).status_code == 422


def test_step_density(client):
    response = client.get("/densities/step", params={"c": 2})
    assert response.status_code == 200
    assert response.json()["value"] == pytest.approx(0.810569, abs=1e-6)
    assert client.get("/densities/step", params={"c": 0}).status_code == 422


def test_constants(client):
    response = client.get("/densities/constants", params={"cutoff": 10_000})
    assert response.status_code == 200
    body = response.json()
    assert body["T_cutoff"] == 10_000
    assert body["inv_zeta2"] == pytest.approx(6 / math.pi ** 2)
    assert client.get("/densities/constants", params={"cutoff": 5}).status_code == 422


def test_list_and_get_runs(client, stored_run):
    listed = client.get("/experiments/", params={"name": "stored"})
    assert listed.status_code == 200
    assert [r["id"] for r in listed.json()] == [stored_run.id]

    one = client.get(f"/experiments/{stored_run.id}").json()
    assert one["master_seed"] == 2 ** 64 - 1
    assert one["start"] == [1, 1]
    assert one["status"] == "passed"

    assert client.get("/experiments/", params={"status": "failed", "name": "stored"}).json() == []
    assert client.get("/experiments/", params={"status": "unknown"}).status_code == 422


def test_missing_run(client):
    response = client.get("/experiments/99999")
    assert response.status_code == 404
    assert response.json()["detail"] == "Experiment run not found"
