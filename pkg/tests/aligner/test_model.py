"""
Tests for the aligner forward and backward passes.
"""

import numpy as np
import pytest

from hfr_aligner.aligner.model import (
    flatten_tokens,
    single_frame_backward,
    single_frame_forward,
    video_forward,
    window_backward,
    window_forward,
    window_forward_cached,
)
from hfr_aligner.aligner.params import HfrAlignerParams, PoolingMode, SingleFrameAlignerParams, init_from_single_frame
from hfr_aligner.exceptions import ShapeError
from hfr_aligner.features.frames import FrameFeatures
from hfr_aligner.features.windows import partition_windows
from hfr_aligner.numerics.gradcheck import finite_difference_gradient, relative_error
from hfr_aligner.numerics.ops import gelu, pool_rows
from hfr_aligner.numerics.tensor import Precision


def _tiny_params(rng, pooling=PoolingMode.POST, w=2, d=3, h=5):
    return HfrAlignerParams(
        W_P=rng.standard_normal((w * d, w * h)) * 0.5,
        b_P=rng.standard_normal(w * h) * 0.1,
        W_Q=rng.standard_normal((w * h, h)) * 0.5,
        b_Q=rng.standard_normal(h) * 0.1,
        w=w,
        pooling=pooling,
    )


class TestSingleFrame:
    def test_identity_weights_give_gelu(self):
        d = 4
        eye = SingleFrameAlignerParams(W_A=np.eye(d), b_A=np.zeros(d), W_B=np.eye(d), b_B=np.zeros(d))
        z = np.full((4, d), 3.0) + np.arange(d)
        np.testing.assert_allclose(single_frame_forward(z, eye), gelu(z), atol=1e-3)

    def test_zero_input_gives_output_bias(self, base_params):
        zero_bias = SingleFrameAlignerParams(
            W_A=base_params.W_A, b_A=np.zeros(32, dtype=np.float32), W_B=base_params.W_B, b_B=base_params.b_B
        )
        out = single_frame_forward(np.zeros((16, 24), dtype=np.float32), zero_bias)
        np.testing.assert_array_equal(out, np.tile(base_params.b_B, (16, 1)))

    @pytest.mark.parametrize("seed", range(20))
    def test_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        params = SingleFrameAlignerParams.random(3, 5, seed, Precision.FLOAT64)
        z = rng.standard_normal((4, 3))
        G = rng.standard_normal((4, 5))
        dz, grads = single_frame_backward(G, z, params)

        numeric = finite_difference_gradient(lambda v: np.sum(G * single_frame_forward(v, params)), z)
        assert relative_error(dz, numeric) <= 1e-6

        def with_W_A(v):
            return np.sum(G * single_frame_forward(z, SingleFrameAlignerParams(v, params.b_A, params.W_B, params.b_B)))

        assert relative_error(grads.W_A, finite_difference_gradient(with_W_A, params.W_A)) <= 1e-6


class TestAveragingAtInit:
    @pytest.mark.parametrize("seed", range(100))
    def test_float32(self, seed, base_params):
        params = init_from_single_frame(base_params, 16, noise_scale=0.0)
        rng = np.random.default_rng(seed)
        frames = [rng.standard_normal((16, 24)).astype(np.float32) for _ in range(16)]
        _, out, _ = window_forward_cached(frames, params)
        mean = np.mean([single_frame_forward(z, base_params) for z in frames], axis=0)
        assert np.max(np.abs(out - mean)) <= 1e-5

    @pytest.mark.parametrize("seed", range(100))
    def test_float64(self, seed, base_params):
        base = base_params.astype(Precision.FLOAT64)
        params = init_from_single_frame(base, 16, noise_scale=0.0)
        rng = np.random.default_rng(seed)
        frames = [rng.standard_normal((16, 24)) for _ in range(16)]
        _, out, _ = window_forward_cached(frames, params)
        mean = np.mean([single_frame_forward(z, base) for z in frames], axis=0)
        assert np.max(np.abs(out - mean)) <= 1e-12

    def test_single_frame_window_is_exact(self, base_params, rng):
        params = init_from_single_frame(base_params, 1, noise_scale=0.0)
        z = rng.standard_normal((16, 24)).astype(np.float32)
        _, out, _ = window_forward_cached([z], params)
        np.testing.assert_array_equal(out, single_frame_forward(z, base_params))

    def test_identical_frames_pool_like_single_frame(self, base_params, rng):
        params = init_from_single_frame(base_params, 16, noise_scale=0.0)
        z = rng.standard_normal((16, 24)).astype(np.float32)
        tokens, _, _ = window_forward_cached([z] * 16, params)
        np.testing.assert_allclose(tokens, pool_rows(single_frame_forward(z, base_params)), atol=1e-5)

    def test_permutation_invariant(self, base_params, rng):
        params = init_from_single_frame(base_params, 16, noise_scale=0.0)
        frames = [rng.standard_normal((16, 24)).astype(np.float32) for _ in range(16)]
        _, out, _ = window_forward_cached(frames, params)
        _, shuffled, _ = window_forward_cached([frames[i] for i in rng.permutation(16)], params)
        assert np.max(np.abs(out - shuffled)) <= 1e-5


def test_noise_makes_aligner_order_aware(base_params, rng):
    params = init_from_single_frame(base_params, 16, noise_scale=1.0, seed=11)
    frames = [rng.standard_normal((16, 24)).astype(np.float32) for _ in range(16)]
    _, out, _ = window_forward_cached(frames, params)
    _, reversed_out, _ = window_forward_cached(frames[::-1], params)
    assert np.max(np.abs(out - reversed_out)) > 1e-6


@pytest.mark.parametrize("p, m", [(4, 1), (16, 4), (25, 4), (729, 169)])
@pytest.mark.parametrize("pooling", list(PoolingMode))
def test_token_count(p, m, pooling, rng):
    params = _tiny_params(rng, pooling=pooling)
    frames = [rng.standard_normal((p, 3)) for _ in range(2)]
    tokens, _, _ = window_forward_cached(frames, params)
    assert tokens.shape == (m, 5)


def test_pre_pooling_pools_features_first(rng):
    params = _tiny_params(rng, pooling=PoolingMode.PRE)
    frames = [rng.standard_normal((16, 3)) for _ in range(2)]
    post = HfrAlignerParams(**params.tensors(), w=2, pooling=PoolingMode.POST)
    tokens, _, _ = window_forward_cached(frames, params)
    _, expected, _ = window_forward_cached([pool_rows(z) for z in frames], post)
    np.testing.assert_array_equal(tokens, expected)


def test_wrong_frame_count(rng):
    params = _tiny_params(rng)
    with pytest.raises(ShapeError):
        window_forward_cached([rng.standard_normal((4, 3))] * 3, params)


def test_wrong_feature_width(rng):
    params = _tiny_params(rng)
    with pytest.raises(ShapeError):
        window_forward_cached([rng.standard_normal((4, 4))] * 2, params)


def test_non_square_patch_count(rng):
    params = _tiny_params(rng)
    with pytest.raises(ShapeError):
        window_forward_cached([rng.standard_normal((6, 3))] * 2, params)


def _top_two_gap(rows):
    top = np.sort(rows, axis=0)[-2:]
    return float(np.min(top[1] - top[0]))


@pytest.mark.parametrize("pooling", list(PoolingMode))
@pytest.mark.parametrize("seed", range(20))
def test_window_backward_matches_finite_differences(pooling, seed):
    rng = np.random.default_rng(seed)
    params = _tiny_params(rng, pooling=pooling)
    frames = [rng.standard_normal((4, 3)) for _ in range(2)]
    _, out, _ = window_forward_cached(frames, params)
    gaps = [_top_two_gap(out)] if pooling is PoolingMode.POST else [_top_two_gap(z) for z in frames]
    if min(gaps) < 1e-3:
        pytest.skip("pooling block nearly tied")
    tokens, _, cache = window_forward_cached(frames, params)
    G = rng.standard_normal(tokens.shape)
    grads, dframes = window_backward(G, cache, params, frames=frames)

    def loss(p):
        t, _, _ = window_forward_cached(frames, p)
        return float(np.sum(G * t))

    for name, analytic in grads.as_dict().items():
        numeric = finite_difference_gradient(lambda v, n=name: loss(params.with_tensors(**{n: v})), params.tensors()[name])
        assert relative_error(analytic, numeric) <= 1e-6, name

    numeric = finite_difference_gradient(
        lambda v: float(np.sum(G * window_forward_cached([frames[0], v], params)[0])), frames[1]
    )
    assert relative_error(dframes[1], numeric) <= 1e-6


class TestVideoForward:
    def test_one_window_for_sixteen_frames(self, base_params, make_seq):
        params = init_from_single_frame(base_params, 16)
        outputs = video_forward(make_seq(16), params)
        assert len(outputs) == 1
        assert outputs[0].count == 4

    def test_windows_are_independent(self, base_params, make_seq):
        params = init_from_single_frame(base_params, 16, seed=1)
        seq = make_seq(16 * 5)
        outputs = video_forward(seq, params)
        alone = window_forward(partition_windows(seq, 16)[3], params)
        assert alone.window_index == 3
        assert alone.tokens.tobytes() == outputs[3].tokens.tobytes()

    def test_threads_give_identical_output(self, base_params, make_seq):
        params = init_from_single_frame(base_params, 16, seed=1)
        seq = make_seq(16 * 6 + 3)
        serial = video_forward(seq, params, threads=1)
        parallel = video_forward(seq, params, threads=4)
        assert [o.window_index for o in parallel] == list(range(7))
        assert flatten_tokens(serial).tobytes() == flatten_tokens(parallel).tobytes()

    def test_token_budget_for_long_video(self, rng):
        base = SingleFrameAlignerParams.random(2, 2, seed=0)
        params = init_from_single_frame(base, 16, noise_scale=0.0)
        z = rng.standard_normal((729, 2)).astype(np.float32)
        seq = [FrameFeatures(z=z, frame_index=i, timestamp_s=i / 16) for i in range(1760)]
        outputs = video_forward(seq, params)
        assert len(outputs) == 110
        assert flatten_tokens(outputs).shape == (18590, 2)
        assert 729 / outputs[0].count == pytest.approx(4.31, abs=0.005)
