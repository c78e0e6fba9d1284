"""
Tests for the rotating-dot motion dataset.
"""

import pytest

from hfr_aligner.exceptions import ConfigError
from hfr_aligner.features.synthetic import CCW, CW
from hfr_aligner.trainer import check_aliasing, make_motion_dataset


def test_balanced_labels():
    dataset = make_motion_dataset(seed=1, n_train=8, n_test=6, speeds=(0.75, 0.875), duration_s=1.0)
    assert [item.label for item in dataset.train] == [0, 1] * 4
    assert sum(item.label for item in dataset.test) == 3
    assert [item.speed for item in dataset.train[:4]] == [0.75, 0.75, 0.875, 0.875]
    assert dataset.speeds == (0.75, 0.875)


def test_directions_follow_labels():
    dataset = make_motion_dataset(seed=1, n_train=2, n_test=0, duration_s=1.0)
    assert [item.direction for item in dataset.train] == [CW, CCW]
    assert dataset.classes == ("cw", "ccw")
    assert dataset.num_classes == 2


def test_train_and_test_seeds_are_disjoint():
    dataset = make_motion_dataset(seed=3, n_train=20, n_test=20, duration_s=1.0)
    train_seeds = {item.seed for item in dataset.train}
    test_seeds = {item.seed for item in dataset.test}
    assert len(train_seeds) == 20
    assert not train_seeds & test_seeds


def test_deterministic():
    a = make_motion_dataset(seed=5, n_train=2, n_test=2, duration_s=1.0)
    b = make_motion_dataset(seed=5, n_train=2, n_test=2, duration_s=1.0)
    for x, y in zip(a.train + a.test, b.train + b.test):
        assert x.seed == y.seed
        assert x.video.frames.tobytes() == y.video.frames.tobytes()


def test_clip_shape():
    dataset = make_motion_dataset(seed=0, n_train=1, n_test=0, duration_s=2.0)
    item = dataset.train[0]
    assert item.video.frames.shape == (32, 32, 32)
    assert dataset.native_fps == 16


def test_empty_training_split():
    dataset = make_motion_dataset(seed=0, n_train=0, n_test=2, duration_s=1.0)
    assert dataset.train == []
    assert len(dataset.test) == 2


@pytest.mark.parametrize("n_train, n_test", [(-1, 2), (2, -1)])
def test_negative_counts(n_train, n_test):
    with pytest.raises(ConfigError):
        make_motion_dataset(seed=0, n_train=n_train, n_test=n_test)


class TestCheckAliasing:
    def test_default_speed_passes(self):
        check_aliasing([0.75])

    @pytest.mark.parametrize("speed", [8.0, 12.5])
    def test_aliases_at_high_rate(self, speed):
        with pytest.raises(ConfigError) as exc_info:
            check_aliasing([0.75, speed])
        assert exc_info.value.value == speed

    def test_nothing_aliases_at_low_rate(self):
        with pytest.raises(ConfigError) as exc_info:
            check_aliasing([0.25, 0.5])
        assert "no speed aliases" in exc_info.value.reason

    @pytest.mark.parametrize("speeds", [[], [0.0], [-0.75]])
    def test_invalid_speeds(self, speeds):
        with pytest.raises(ConfigError):
            check_aliasing(speeds)
