"""
Tests for trimmed decoding and the decode dispatcher.
"""

import numpy as np
import pytest

from hfr_aligner.aligner.model import flatten_tokens, single_frame_forward, video_forward
from hfr_aligner.aligner.params import init_from_single_frame
from hfr_aligner.decoding import DecodeConfig, DecodeMethod, decode, decode_trimmed, trim_aligner
from hfr_aligner.exceptions import ConfigError
from hfr_aligner.numerics.ops import pool_rows


@pytest.fixture
def params(base_params):
    return init_from_single_frame(base_params, 16, noise_scale=1.0, seed=7)


def test_trim_shapes(params):
    trimmed = trim_aligner(params, 4)
    assert trimmed.W_P.shape == (4 * 24, 4 * 32)
    assert trimmed.b_P.shape == (4 * 32,)
    assert trimmed.W_Q.shape == (4 * 32, 32)
    np.testing.assert_array_equal(trimmed.W_P, params.W_P[: 4 * 24, : 4 * 32])
    np.testing.assert_array_equal(trimmed.b_Q, params.b_Q)


def test_trim_copies_weights(params):
    trimmed = trim_aligner(params, 2)
    trimmed.W_P[0, 0] += 1.0
    assert trimmed.W_P[0, 0] != params.W_P[0, 0]


@pytest.mark.parametrize("s", [0, 17, -1])
def test_trim_out_of_range(params, s):
    with pytest.raises(ConfigError):
        trim_aligner(params, s)


def test_full_width_trim_is_bit_identical(params, make_seq):
    seq = make_seq(40)
    full = flatten_tokens(video_forward(seq, params))
    trimmed = flatten_tokens(decode_trimmed(seq, trim_aligner(params, 16)))
    assert trimmed.tobytes() == full.tobytes()


@pytest.mark.parametrize("s", [1, 2, 4, 8, 16])
def test_trimmed_output_at_init(s, base_params, make_seq):
    params = init_from_single_frame(base_params, 16, noise_scale=0.0)
    seq = make_seq(s)
    out = decode_trimmed(seq, trim_aligner(params, s))[0]
    mean = np.mean([single_frame_forward(f.z, base_params) for f in seq], axis=0)
    expected = (s / 16) * mean + (1 - s / 16) * base_params.b_B
    np.testing.assert_allclose(out.pre_pool, expected, atol=1e-5)


@pytest.mark.parametrize("s", [1, 2, 4, 8])
def test_trim_shrinks_towards_output_bias(s, base_params, constant_seq):
    params = init_from_single_frame(base_params, 16, noise_scale=0.0)
    seq = constant_seq(1)[::16 // s]
    cfg = DecodeConfig(test_fps=s)
    trimmed = decode(seq, params, cfg.model_copy(update={"method": DecodeMethod.TRIM}))[0]
    repeated = decode(seq, params, cfg)[0]
    sff = pool_rows(single_frame_forward(seq[0].z, base_params))
    np.testing.assert_allclose(trimmed.tokens - repeated.tokens, (1 - s / 16) * (base_params.b_B - sff), atol=1e-5)


def test_dispatch_checks_training_rate(params, make_seq):
    cfg = DecodeConfig(train_fps=8, test_fps=4, method=DecodeMethod.TRIM)
    with pytest.raises(ConfigError) as exc_info:
        decode(make_seq(4), params, cfg)
    assert exc_info.value.parameter == "train_fps"


def test_dispatch_trim_window_count(params, make_seq):
    cfg = DecodeConfig(test_fps=4, method=DecodeMethod.TRIM)
    outputs = decode(make_seq(10), params, cfg)
    assert len(outputs) == 3
    assert all(o.count == 4 for o in outputs)
