import arrow
import pytest

from hypothesis import given, strategies as st
from typing import Dict

from perceptual_patches.registry import InactiveSessionError, \
    IntegrityError, NoResultFound, diff_checksums

from conftest import InMemoryEngine


T0 = arrow.Arrow(2024, 5, 1, 8, 0, 0)

digests = st.dictionaries(
    st.text("abc/", min_size=1, max_size=4),
    st.sampled_from(("00", "11", "22")),
    max_size=6
)


def _finished_run(s, checksums: Dict[str, str], exit_code=0, cmd="train"):
    run = s.start_run(cmd, "cfg", "1.0", started=T0)
    s.add_artifacts(run, checksums)
    s.finish_run(run, exit_code, finished=T0.shift(minutes=1))
    return run


def test_diff_checksums():
    """Test the added, removed and changed paths of two runs."""
    diff = diff_checksums(
        {"a": "1", "b": "2", "c": "3"}, {"b": "2", "c": "4", "d": "5"}
    )
    assert diff.added == ("d",)
    assert diff.removed == ("a",)
    assert diff.changed == ("c",)
    assert not diff.identical
    assert str(diff) == "1 added, 1 removed, 1 changed"


@given(old=digests, new=digests)
def test_diff_checksums_partitions_paths(
    old: Dict[str, str], new: Dict[str, str]
):
    """Test that a diff is empty exactly for equal maps and never lists
    a path twice.
    """
    diff = diff_checksums(old, new)
    assert diff.identical == (old == new)
    listed = diff.added + diff.removed + diff.changed
    assert len(listed) == len(set(listed))
    assert diff_checksums(new, old).added == diff.removed


def test_run_lifecycle(memory_engine: InMemoryEngine):
    """Test starting, annotating and finishing a run."""
    with memory_engine.new_session() as s:
        run = s.start_run("gen-patch", "h1", "0.1", started=T0)
        assert run.id is not None
        assert run.finished is None and run.exit_code is None
        assert s.add_artifacts(run, {"patch.bin": "ab", "run.json": "cd"}) \
            == 2
        s.finish_run(run, 0, finished=T0.shift(seconds=30))
        run_id = run.id

    with memory_engine.new_session() as s:
        run = s.get_run(run_id)
        assert run.checksums() == {"patch.bin": "ab", "run.json": "cd"}
        assert run.finished - run.started == T0.shift(seconds=30) - T0
        with pytest.raises(NoResultFound):
            s.get_run(run_id + 1)


def test_duplicate_artifact_raises(memory_engine: InMemoryEngine):
    """Test that a path can only be recorded once per run."""
    with memory_engine.new_session() as s:
        run = s.start_run("train", "h", "0.1")
        s.add_artifacts(run, {"model.bin": "00"})
        with pytest.raises(IntegrityError):
            s.add_artifacts(run, {"model.bin": "11"})


def test_add_files_hashes_relative_paths(memory_engine: InMemoryEngine,
                                         tmp_path):
    """Test that files are keyed by their path below the root."""
    (tmp_path / "sub").mkdir()
    (tmp_path / "sub" / "x.txt").write_bytes(b"abc")
    with memory_engine.new_session() as s:
        run = s.start_run("report", "h", "0.1")
        assert s.add_files(run, tmp_path, [tmp_path / "sub" / "x.txt"]) == 1
        assert run.checksums() == {
            "sub/x.txt":
                "ba7816bf8f01cfea414140de5dae2223"
                "b00361a396177a9cb410ff61f20015ad"
        }


def test_compare_with_previous(memory_engine: InMemoryEngine):
    """Test that a run is compared with the latest successful run of
    the same command and configuration.
    """
    with memory_engine.new_session() as s:
        first = _finished_run(s, {"a": "1"})
        assert s.compare_with_previous(first) is None
        _finished_run(s, {"a": "9"}, exit_code=1)
        _finished_run(s, {"a": "8"}, cmd="advtrain")
        second = _finished_run(s, {"a": "1"})
        assert s.previous_run(second).id == first.id
        assert s.compare_with_previous(second).identical
        third = _finished_run(s, {"a": "2", "b": "3"})
        diff = s.compare_with_previous(third)
        assert diff.changed == ("a",)
        assert diff.added == ("b",)


def test_inactive_session_raises(memory_engine: InMemoryEngine):
    """Test that a session is only usable inside its `with` block."""
    session = memory_engine.new_session()
    with pytest.raises(InactiveSessionError, match=".*not active.*"):
        session.start_run("train", "h", "0.1")
    with session as s:
        run = s.start_run("train", "h", "0.1")
    with pytest.raises(InactiveSessionError):
        session.finish_run(run, 0)
