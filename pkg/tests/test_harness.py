import json
import math
from pathlib import Path

import pytest

from core.densities import delta_c
from core.errors import SpecError
from core.harness import CONJECTURAL, PAIRWISE, load_spec, resolve_targets, run
from models.experiment_run import ExperimentRun
from schemas.experiment import ExperimentSpec

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def make_spec(**overrides):
    data = {
        "name": "small",
        "walk": {"variant": "polya", "start": [1, 1]},
        "horizons": [50, 200],
        "trials": 6,
        "k_list": [1, 2],
        "master_seed": 99,
        "tolerance": None,
    }
    data.update(overrides)
    return ExperimentSpec.model_validate(data)


def test_shipped_documents_load():
    for path in sorted(CONFIGS.glob("*.toml")):
        spec = load_spec(path)
        assert spec.name == path.stem


def test_exploratory_documents_cover_both_friedman_starts():
    assert load_spec(CONFIGS / "friedman.toml").walk.start == (1, 1)
    assert load_spec(CONFIGS / "friedman_5_1.toml").walk.start == (5, 1)
    unequal = load_spec(CONFIGS / "unequal_steps.toml")
    assert unequal.exploratory
    assert resolve_targets(unequal)[1] == pytest.approx(0.911891, abs=1e-6)
    assert load_spec(CONFIGS / "polya_3d.toml").trials == 200


def test_unit_documents_resolve_k_targets():
    for name in ("polya_unit", "polya_offset"):
        targets = resolve_targets(load_spec(CONFIGS / f"{name}.toml"))
        assert targets[3] == pytest.approx(0.067547, abs=1e-6)
    assert resolve_targets(load_spec(CONFIGS / "polya_step6.toml"))[1] == pytest.approx(0.911891, abs=1e-6)


def test_load_spec_errors(tmp_path):
    with pytest.raises(SpecError):
        load_spec(tmp_path / "missing.toml")

    bad = tmp_path / "bad.toml"
    bad.write_text("name = \n")
    with pytest.raises(SpecError):
        load_spec(bad)

    three_d = tmp_path / "three_d.toml"
    three_d.write_text(
        'name = "x"\nhorizons = [10]\ntrials = 2\nk_list = [1, 2]\n\n[walk]\nvariant = "polya_3d"\nstart = [1, 1, 1]\n'
    )
    with pytest.raises(SpecError):
        load_spec(three_d)

    decreasing = tmp_path / "decreasing.toml"
    decreasing.write_text('name = "x"\nhorizons = [100, 10]\ntrials = 2\n\n[walk]\nstart = [1, 1]\n')
    with pytest.raises(SpecError):
        load_spec(decreasing)


def test_walk_table_is_flattened():
    spec = make_spec(walk={"variant": "alpha_random", "alpha": 0.25, "start": [1, 1]})
    assert spec.walk.kind.alpha == 0.25
    assert spec.exploratory is False
    assert make_spec(walk={"variant": "friedman", "start": [2, 3]}).exploratory


def test_resolve_targets():
    assert resolve_targets(load_spec(CONFIGS / "polya_step2_off_grid.toml"))[1] == pytest.approx(delta_c(2).value)
    even = make_spec(walk={"start": [2, 2], "step_right": 2, "step_up": 2}, k_list=[1])
    assert resolve_targets(even) == {1: 0.0}
    unit = resolve_targets(make_spec())
    assert unit[2] == pytest.approx(1.5 / math.pi ** 2)
    assert resolve_targets(make_spec(target=0.5, k_list=[1]))[1] == 0.5


def test_resolve_targets_three_colours():
    targets = resolve_targets(load_spec(CONFIGS / "polya_3d.toml"))
    assert targets[1] == pytest.approx(0.8319073725807075, abs=1e-12)
    assert targets[PAIRWISE] == pytest.approx(0.2867474284, abs=1e-4)


def test_run_writes_reproducible_artifacts(tmp_path):
    first = run(make_spec(), output_dir=tmp_path / "a")
    second = run(make_spec(), output_dir=tmp_path / "b")
    for key in ("convergence", "summary", "trials_N50", "trials_N200"):
        a, b = Path(first.artifacts[key]), Path(second.artifacts[key])
        assert a.read_bytes() == b.read_bytes()

    header = Path(first.artifacts["trials_N200"]).read_text().splitlines()[0]
    assert header == "trial_id,N,q,q_k:1,q_k:2,right_count,slope_angle,radial_ratio"
    summary = json.loads(Path(first.artifacts["summary"]).read_text())
    assert summary["schema_version"] == 1
    assert [row["N"] for row in summary["convergence"]] == [50, 200]
    assert [row["series"] for row in summary["series"]] == ["q_k:2", "q_k:2"]
    metadata = json.loads(Path(first.artifacts["metadata"]).read_text())
    assert metadata["workers"] == 1


def test_run_results_independent_of_workers(tmp_path):
    one = run(make_spec(), output_dir=tmp_path / "one", workers=1)
    two = run(make_spec(), output_dir=tmp_path / "two", workers=2)
    assert Path(one.artifacts["convergence"]).read_bytes() == Path(two.artifacts["convergence"]).read_bytes()


def test_even_grid_run_passes_with_zero_mean(tmp_path):
    spec = make_spec(walk={"start": [2, 2], "step_right": 2, "step_up": 2}, k_list=[1], tolerance=0.01)
    result = run(spec, output_dir=tmp_path)
    assert result.passed
    assert [r.mean_q for r in result.rows] == [0.0, 0.0]
    assert result.rows[-1].abs_err == 0.0


def test_exploratory_run_never_fails(tmp_path):
    spec = make_spec(walk={"variant": "friedman", "start": [2, 3]}, k_list=[1], target=0.0, tolerance=0.001)
    result = run(spec, output_dir=tmp_path)
    assert result.passed
    assert result.exploratory
    assert result.label == CONJECTURAL
    assert result.failures == []


def test_threshold_failure_is_reported(tmp_path):
    result = run(make_spec(target=0.0, tolerance=0.01, k_list=[1]), output_dir=tmp_path)
    assert not result.passed
    assert len(result.failures) == 1
    assert result.failures[0].startswith("q at N=200")


def test_three_colour_run_reports_pairwise_series(tmp_path):
    spec = make_spec(walk={"variant": "polya_3d", "start": [1, 1, 1]}, k_list=[1])
    result = run(spec, output_dir=tmp_path)
    assert result.exploratory
    assert [r.series for r in result.k_rows] == ["q_pairwise", "q_pairwise"]
    header = Path(result.artifacts["trials_N50"]).read_text().splitlines()[0]
    assert header.endswith(",q_pairwise")


def test_run_records_to_registry(tmp_path, db):
    result = run(make_spec(name="recorded"), output_dir=tmp_path, record=True)
    assert result.run_id is not None
    rec = db.query(ExperimentRun).filter(ExperimentRun.id == result.run_id).one()
    assert rec.name == "recorded"
    assert rec.status == "passed"
    assert rec.horizons == [50, 200]
    assert rec.summary["schema_version"] == 1


def test_run_does_not_record_by_default(tmp_path):
    assert run(make_spec(name="unrecorded"), output_dir=tmp_path).run_id is None
