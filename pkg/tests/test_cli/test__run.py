import argparse
import os
import pytest

from datetime import timedelta

from perceptual_patches import autodiff as ad
from perceptual_patches.cli import MissingArtifactError, RunRecorder, \
    exit_code_for, resolved_config
from perceptual_patches.models import TrainingDivergedError
from perceptual_patches.tools import read_json


@pytest.mark.parametrize("exc,code", (
    (None, 0),
    (FileNotFoundError("x"), 2),
    (MissingArtifactError("x"), 2),
    (TrainingDivergedError("x"), 3),
    (ad.NonFiniteError("x"), 3),
    (ValueError("x"), 1),
    (KeyError("x"), 1),
))
def test_exit_code_for(exc, code: int):
    """Test the exit code of every failure class."""
    assert exit_code_for(exc) == code


def test_resolved_config():
    """Test that only output-determining arguments are kept and values
    become JSON types.
    """
    args = argparse.Namespace(
        command="advtrain", out="o", jobs=4, registry=None,
        log_level="INFO", config=None, seed=1,
        time_budget=timedelta(minutes=1), mix=(1, 2),
        source=(("a", "a.papw"),)
    )
    assert resolved_config(args) == {
        "command": "advtrain",
        "mix": [1, 2],
        "seed": 1,
        "source": [["a", "a.papw"]],
        "time_budget": 60.0,
    }


def _write(path: str, content: str) -> None:
    with open(path, "w", encoding="utf-8") as ofi:
        ofi.write(content)


def test_recorder_writes_run_files(tmp_path):
    """Test run.json, timing.json and the output listing."""
    out = str(tmp_path / "run")
    with RunRecorder("train", out, {"seed": 1}) as run:
        _write(run.path("a.txt"), "a")
        run.timing["phase"] = 1.5
    info = read_json(os.path.join(out, "run.json"))
    assert info["command"] == "train"
    assert info["config"] == {"seed": 1}
    timing = read_json(os.path.join(out, "timing.json"))
    assert timing["phase"] == 1.5
    assert timing["seconds"] >= 0
    assert [os.path.basename(p) for p in run.outputs()] == \
        ["a.txt", "run.json"]
    assert run.diff is None


def test_recorder_compares_reruns(tmp_path):
    """Test that a rerun with equal outputs is identical to its
    predecessor and a changed output is reported.
    """
    registry = str(tmp_path / "registry.sqlite")

    def record(name: str, content: str) -> RunRecorder:
        with RunRecorder("report", str(tmp_path / name), {"x": 1},
                         registry) as run:
            _write(run.path("out.csv"), content)
        return run

    first = record("r1", "1")
    assert first.diff is None
    assert record("r2", "1").diff.identical
    changed = record("r3", "2").diff
    assert changed.changed == ("out.csv",)


def test_recorder_skips_failed_runs(tmp_path):
    """Test that a failed run is recorded without becoming the
    reference of later runs.
    """
    registry = str(tmp_path / "registry.sqlite")
    with RunRecorder("train", str(tmp_path / "ok"), {}, registry) as run:
        _write(run.path("m.bin"), "good")
    with pytest.raises(ValueError):
        with RunRecorder("train", str(tmp_path / "bad"), {}, registry) as r:
            _write(r.path("m.bin"), "bad")
            raise ValueError("boom")
    assert r.diff is None
    assert os.path.exists(str(tmp_path / "bad" / "timing.json"))
    with RunRecorder("train", str(tmp_path / "again"), {}, registry) as run:
        _write(run.path("m.bin"), "good")
    assert run.diff.identical


def test_recorder_hash_depends_on_config():
    """Test that the registry key changes with the configuration."""
    a = RunRecorder("train", "o", {"seed": 1})
    b = RunRecorder("train", "p", {"seed": 1})
    c = RunRecorder("train", "o", {"seed": 2})
    assert a.config_hash == b.config_hash != c.config_hash
