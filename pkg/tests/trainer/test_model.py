"""
Tests for the toy classifier.
"""

import math

import numpy as np
import pytest

from hfr_aligner.decoding import DecodeConfig, DecodeMethod
from hfr_aligner.exceptions import ConfigError, FormatError
from hfr_aligner.numerics.archive import read_archive, write_archive
from hfr_aligner.trainer import ToyModel, features_loss_and_grads, forward_loss, predict_logits
from hfr_aligner.trainer.model import video_features


def test_create_shapes(model):
    assert model.fps == 16
    assert model.num_classes == 2
    assert model.head_W.shape == (4 * 32, 2)
    assert not model.head_W.any()


def test_models_share_encoder_across_rates():
    fast = ToyModel.create(seed=4, fps=16)
    slow = ToyModel.create(seed=4, fps=1)
    np.testing.assert_array_equal(fast.encoder.proj, slow.encoder.proj)
    np.testing.assert_array_equal(fast.aligner.W_P[:24, :32], slow.aligner.W_P)


def test_initial_loss_is_uniform(model, small_dataset):
    item = small_dataset.train[0]
    loss, logits = forward_loss(model, item.video, item.label, 16)
    assert loss == pytest.approx(math.log(2), abs=1e-6)
    np.testing.assert_array_equal(logits, np.zeros(2))


def test_zero_head_blocks_aligner_gradient(model, small_dataset):
    seq = video_features(model, small_dataset.train[0].video, 16)
    _, _, grads = features_loss_and_grads(model, seq, 1)
    for grad in grads.aligner.as_dict().values():
        assert not grad.any()
    np.testing.assert_allclose(grads.head_b, [0.5, -0.5])


def test_bad_label(model, small_dataset):
    seq = video_features(model, small_dataset.train[0].video, 16)
    with pytest.raises(ConfigError):
        features_loss_and_grads(model, seq, 2)


def test_wrong_rate_needs_decode_config(model, small_dataset):
    video = small_dataset.test[0].video
    with pytest.raises(ConfigError):
        predict_logits(model, video, 4)
    with pytest.raises(ConfigError):
        forward_loss(model, video, 0, 4)


@pytest.mark.parametrize("method", list(DecodeMethod))
def test_predict_with_decoding(model, small_dataset, method):
    model.head_W[...] = np.random.default_rng(0).standard_normal(model.head_W.shape).astype(np.float32)
    logits = predict_logits(model, small_dataset.test[0].video, 4, DecodeConfig(test_fps=4, method=method))
    assert logits.shape == (2,)
    assert np.all(np.isfinite(logits))


def test_checkpoint_round_trip(tmp_path, model):
    model.head_W[...] = np.random.default_rng(1).standard_normal(model.head_W.shape).astype(np.float32)
    path = tmp_path / "model.f16t"
    write_archive(path, model.to_records())
    loaded = ToyModel.from_records(read_archive(path), str(path))
    assert loaded.fps == 16
    assert loaded.head_W.tobytes() == model.head_W.tobytes()
    assert loaded.aligner.W_P.tobytes() == model.aligner.W_P.tobytes()
    assert loaded.encoder.proj.tobytes() == model.encoder.proj.tobytes()


def test_checkpoint_head_mismatch(model):
    records = model.to_records()
    records["head/W"] = np.zeros((5, 2), dtype=np.float32)
    with pytest.raises(FormatError):
        ToyModel.from_records(records)


def test_create_rejects_single_class():
    with pytest.raises(ConfigError):
        ToyModel.create(seed=0, fps=16, num_classes=1)
