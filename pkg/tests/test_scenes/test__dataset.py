import numpy as np
import os
import pytest
import shutil

from perceptual_patches import formats
from perceptual_patches.scenes import ANNOTATIONS, MANIFEST, TEST, TRAIN, \
    as_samples, gen_dataset, load_dataset, read_manifest

from conftest import TINY_SCENES


def test_manifest_lists_every_scene(tiny_dataset: str):
    """Test that the manifest holds the seed, the config and one entry
    per scene with existing files.
    """
    manifest = read_manifest(tiny_dataset)
    assert manifest["seed"] == 0
    assert manifest["config"] == TINY_SCENES.to_json()
    scenes = manifest["scenes"]
    assert len(scenes) == TINY_SCENES.train_size + TINY_SCENES.test_size
    for e in scenes:
        assert os.path.isfile(os.path.join(tiny_dataset, e["image"]))
        assert os.path.isfile(os.path.join(tiny_dataset, e["density"]))
        assert e["count"] == len(e["points"])
    records = formats.read_annotations(
        os.path.join(tiny_dataset, ANNOTATIONS)
    )
    assert [r.image for r in records] == [e["image"] for e in scenes]


@pytest.mark.parametrize("split,size", (
    (TRAIN, TINY_SCENES.train_size),
    (TEST, TINY_SCENES.test_size),
    (None, TINY_SCENES.train_size + TINY_SCENES.test_size),
))
def test_load_split(tiny_dataset: str, split, size: int):
    """Test that loading selects the scenes of a split."""
    scenes = load_dataset(tiny_dataset, split, verify=True)
    assert len(scenes) == size
    for s in scenes:
        assert split is None or s.split == split
        assert s.image.shape == (3, TINY_SCENES.height, TINY_SCENES.width)
        assert s.density.count <= len(s.points) + 1e-4


def test_unknown_split_raises(tiny_dataset: str):
    """Test that only known splits are accepted."""
    with pytest.raises(ValueError, match=".*Unknown split 'val'.*"):
        load_dataset(tiny_dataset, "val")


def test_tampered_file_fails_verification(tiny_dataset: str, tmp_path):
    """Test that a changed image is detected by its checksum."""
    root = tmp_path / "copy"
    shutil.copytree(tiny_dataset, root)
    entry = read_manifest(root)["scenes"][0]
    with open(root / entry["image"], "r+b") as fi:
        fi.seek(-1, os.SEEK_END)
        last = fi.read(1)
        fi.seek(-1, os.SEEK_END)
        fi.write(bytes([last[0] ^ 0xFF]))
    assert len(load_dataset(root)) > 0
    with pytest.raises(formats.FormatError, match=".*Checksum mismatch.*"):
        load_dataset(root, verify=True)


def test_missing_manifest_raises(tmp_path):
    """Test that a directory without a manifest is not a dataset."""
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path)


def test_as_samples_pool_to_stride(tiny_dataset: str):
    """Test that the ground truth is pooled without losing mass."""
    scenes = load_dataset(tiny_dataset, TRAIN)
    samples = as_samples(scenes, 4)
    for s, (image, gt) in zip(scenes, samples):
        assert image is s.image
        assert gt.shape == (8, 8)
        assert gt.scale == 4
        assert gt.count == pytest.approx(s.density.count, abs=1e-4)


def test_generation_ignores_worker_count(tiny_dataset: str, tmp_path):
    """Test that threads do not change the output."""
    manifest = gen_dataset(TINY_SCENES, 0, tmp_path, jobs=3)
    reference = read_manifest(tiny_dataset)
    assert [e["sha256"] for e in manifest["scenes"]] == \
        [e["sha256"] for e in reference["scenes"]]
    assert (tmp_path / MANIFEST).is_file()


def test_negative_fraction(tmp_path):
    """Test that the requested share of scenes has no heads."""
    cfg = TINY_SCENES.replace(negative_fraction=0.5, test_size=0)
    manifest = gen_dataset(cfg, 1, tmp_path)
    negatives = [e for e in manifest["scenes"] if e["negative"]]
    assert len(negatives) == 2
    assert all(e["count"] == 0 for e in negatives)
    density = formats.read_density(tmp_path / negatives[0]["density"])
    assert not np.any(density)
