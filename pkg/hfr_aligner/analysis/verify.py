"""
Self-checks behind the ``verify-avg`` and ``verify-grad`` commands.

Averaging: a window aligner built from a single-frame aligner with zero noise
returns the mean of the per-frame outputs before pooling.

Gradients: every backward pass agrees with central finite differences in
64-bit mode on tiny random instances.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from hfr_aligner.aligner.model import single_frame_forward, window_backward, window_forward_cached
from hfr_aligner.aligner.params import HfrAlignerParams, PoolingMode, SingleFrameAlignerParams, init_from_single_frame
from hfr_aligner.exceptions import ConfigError
from hfr_aligner.features.encoder import EncoderStub
from hfr_aligner.features.frames import FrameFeatures
from hfr_aligner.numerics.gradcheck import finite_difference_gradient, relative_error
from hfr_aligner.numerics.ops import (
    gelu,
    gelu_backward,
    grid_from_rows,
    linear,
    linear_backward,
    max_pool_2x2,
    max_pool_2x2_backward,
)
from hfr_aligner.numerics.tensor import Precision, Tensor
from hfr_aligner.trainer.model import ToyModel, features_loss_and_grads

logger = logging.getLogger(__name__)

GRAD_TOLERANCE = 1e-6
AVERAGING_TOLERANCE = {Precision.FLOAT32: 1e-5, Precision.FLOAT64: 1e-12}

# tiny instance used by the gradient checks
TINY_P, TINY_D, TINY_H, TINY_W, TINY_C = 4, 3, 5, 2, 2
MIN_POOL_MARGIN = 1e-3
# saturated softmax leaves gradients below central-difference roundoff
MIN_MODEL_LOSS = 1e-2


@dataclass
class AveragingResult:
    trials: int
    max_abs_diff: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_abs_diff <= self.tolerance


@dataclass
class GradientResult:
    """Worst relative error per checked component."""

    trials: int
    errors: Dict[str, float] = field(default_factory=dict)
    tolerance: float = GRAD_TOLERANCE

    @property
    def passed(self) -> bool:
        return all(err <= self.tolerance for err in self.errors.values())

    def record(self, name: str, err: float) -> None:
        self.errors[name] = max(self.errors.get(name, 0.0), err)


def verify_averaging(
    base: SingleFrameAlignerParams,
    params: HfrAlignerParams,
    p: int,
    trials: int = 100,
    seed: int = 0,
    precision: Precision = Precision.FLOAT32,
) -> AveragingResult:
    """Compare the window aligner's pre-pool output with the mean single-frame output.

    Args:
        base: Single-frame aligner the window aligner was built from
        params: Window aligner (expected to be built with zero noise)
        p: Patch count of the random windows
        trials: Number of random windows
        seed: Seed for the random windows
        precision: Arithmetic precision for both paths

    Raises:
        ConfigError: If ``trials`` < 1 or the two aligners disagree in dims
    """
    if trials < 1:
        raise ConfigError("trials", trials, "must be at least 1")
    if (base.d, base.h) != (params.d, params.h):
        raise ConfigError("base", (base.d, base.h), f"dims must match the aligner ({params.d}, {params.h})")

    base = base.astype(precision)
    params = params.astype(precision)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        frames = [rng.standard_normal((p, params.d)).astype(precision.dtype) for _ in range(params.w)]
        _, out, _ = window_forward_cached(frames, params)
        mean = np.mean(np.stack([single_frame_forward(z, base) for z in frames]), axis=0)
        worst = max(worst, float(np.max(np.abs(out - mean))))

    result = AveragingResult(trials=trials, max_abs_diff=worst, tolerance=AVERAGING_TOLERANCE[precision])
    logger.info(f"verify_averaging ({precision.value}): max abs diff {worst:.3e} over {trials} windows")
    return result


# -- gradient checks ----------------------------------------------------------


def _pool_margin(rows: Tensor) -> float:
    """Smallest gap between the largest and second-largest entry of any 2x2 block."""
    grid = grid_from_rows(rows)
    half = grid.shape[0] // 2
    blocks = grid[: 2 * half, : 2 * half].reshape(half, 2, half, 2, -1).transpose(0, 2, 1, 3, 4)
    top = np.sort(blocks.reshape(half, half, 4, -1), axis=2)
    return float(np.min(top[:, :, 3] - top[:, :, 2]))


def _check(
    result: GradientResult, name: str, f: Callable[[Tensor], float], x: Tensor, analytic: Tensor
) -> None:
    numeric = finite_difference_gradient(f, x)
    result.record(name, relative_error(analytic, numeric))


def _check_kernels(rng: np.random.Generator, result: GradientResult) -> None:
    x = rng.standard_normal((TINY_P, TINY_D))
    W = rng.standard_normal((TINY_D, TINY_H))
    b = rng.standard_normal(TINY_H)
    G = rng.standard_normal((TINY_P, TINY_H))
    dx, dW, db = linear_backward(G, x, W)
    _check(result, "linear.x", lambda v: np.sum(G * linear(v, W, b)), x, dx)
    _check(result, "linear.W", lambda v: np.sum(G * linear(x, v, b)), W, dW)
    _check(result, "linear.b", lambda v: np.sum(G * linear(x, W, v)), b, db)

    g = rng.standard_normal((TINY_P, TINY_H))
    _check(result, "gelu", lambda v: np.sum(G * gelu(v)), g, gelu_backward(G, g))

    # distinct, well-separated values keep the arg-max fixed under perturbation
    size = 4 * 4 * TINY_H
    grid = (rng.permutation(size) * 0.01 + rng.uniform(0.0, 1e-3, size)).reshape(4, 4, TINY_H)
    Gp = rng.standard_normal((2, 2, TINY_H))
    _check(result, "max_pool_2x2", lambda v: np.sum(Gp * max_pool_2x2(v)), grid, max_pool_2x2_backward(Gp, grid))


def _random_aligner(rng: np.random.Generator, pooling: PoolingMode) -> HfrAlignerParams:
    wd, wh = TINY_W * TINY_D, TINY_W * TINY_H
    return HfrAlignerParams(
        W_P=rng.standard_normal((wd, wh)) * 0.5,
        b_P=rng.standard_normal(wh) * 0.1,
        W_Q=rng.standard_normal((wh, TINY_H)) * 0.5,
        b_Q=rng.standard_normal(TINY_H) * 0.1,
        w=TINY_W,
        pooling=pooling,
    )


def _window_margin(frames: List[Tensor], params: HfrAlignerParams) -> float:
    if params.pooling is PoolingMode.PRE:
        return min(_pool_margin(z) for z in frames)
    _, out, _ = window_forward_cached(frames, params)
    return _pool_margin(out)


def _draw_separated_window(
    rng: np.random.Generator, pooling: PoolingMode
) -> Tuple[HfrAlignerParams, List[Tensor]]:
    while True:
        params = _random_aligner(rng, pooling)
        frames = [rng.standard_normal((TINY_P, TINY_D)) for _ in range(TINY_W)]
        if _window_margin(frames, params) >= MIN_POOL_MARGIN:
            return params, frames


def _check_aligner(rng: np.random.Generator, result: GradientResult, pooling: PoolingMode) -> None:
    params, frames = _draw_separated_window(rng, pooling)
    tokens, _, cache = window_forward_cached(frames, params)
    G = rng.standard_normal(tokens.shape)
    grads, dframes = window_backward(G, cache, params, frames=frames)
    assert dframes is not None

    def loss_with(name: str) -> Callable[[Tensor], float]:
        def f(v: Tensor) -> float:
            t, _, _ = window_forward_cached(frames, params.with_tensors(**{name: v}))
            return float(np.sum(G * t))

        return f

    for name, analytic in grads.as_dict().items():
        _check(result, f"aligner[{pooling.value}].{name}", loss_with(name), params.tensors()[name], analytic)

    def frame_loss(v: Tensor) -> float:
        t, _, _ = window_forward_cached([v, *frames[1:]], params)
        return float(np.sum(G * t))

    _check(result, f"aligner[{pooling.value}].frame", frame_loss, frames[0], dframes[0])


def _tiny_model(rng: np.random.Generator, pooling: PoolingMode) -> ToyModel:
    side = 4
    encoder = EncoderStub(patch_grid=2, patch_size=side // 2, proj=rng.standard_normal((4, TINY_D)).astype(np.float32))
    aligner = _random_aligner(rng, pooling)
    return ToyModel(
        encoder=encoder,
        aligner=aligner,
        head_W=rng.standard_normal((TINY_H, TINY_C)) * 0.05,
        head_b=rng.standard_normal(TINY_C) * 0.1,
    )


def _check_model(rng: np.random.Generator, result: GradientResult, pooling: PoolingMode) -> None:
    while True:
        model = _tiny_model(rng, pooling)
        seq = [
            FrameFeatures(z=rng.standard_normal((TINY_P, TINY_D)), frame_index=i, timestamp_s=float(i))
            for i in range(2 * TINY_W)
        ]
        margins = [
            _window_margin([f.z for f in seq[start : start + TINY_W]], model.aligner)
            for start in range(0, len(seq), TINY_W)
        ]
        label = int(rng.integers(TINY_C))
        if min(margins) < MIN_POOL_MARGIN:
            continue
        loss, _, grads = features_loss_and_grads(model, seq, label)
        if loss >= MIN_MODEL_LOSS:
            break

    def with_aligner(name: str) -> Callable[[Tensor], float]:
        def f(v: Tensor) -> float:
            trial = ToyModel(model.encoder, model.aligner.with_tensors(**{name: v}), model.head_W, model.head_b)
            return features_loss_and_grads(trial, seq, label)[0]

        return f

    for name, analytic in grads.aligner.as_dict().items():
        _check(result, f"model[{pooling.value}].{name}", with_aligner(name), model.aligner.tensors()[name], analytic)

    _check(
        result,
        f"model[{pooling.value}].head_W",
        lambda v: features_loss_and_grads(ToyModel(model.encoder, model.aligner, v, model.head_b), seq, label)[0],
        model.head_W,
        grads.head_W,
    )
    _check(
        result,
        f"model[{pooling.value}].head_b",
        lambda v: features_loss_and_grads(ToyModel(model.encoder, model.aligner, model.head_W, v), seq, label)[0],
        model.head_b,
        grads.head_b,
    )


def verify_gradients(trials: int = 100, seed: int = 0) -> GradientResult:
    """Run every backward pass against the finite-difference oracle.

    Raises:
        ConfigError: If ``trials`` < 1
    """
    if trials < 1:
        raise ConfigError("trials", trials, "must be at least 1")
    result = GradientResult(trials=trials)
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        _check_kernels(rng, result)
        for pooling in PoolingMode:
            _check_aligner(rng, result, pooling)
            _check_model(rng, result, pooling)
    worst = max(result.errors.values())
    logger.info(f"verify_gradients: worst relative error {worst:.3e} over {trials} trials")
    return result


def build_averaging_pair(
    d: int, h: int, w: int, seed: int = 0, precision: Precision = Precision.FLOAT32
) -> Tuple[SingleFrameAlignerParams, HfrAlignerParams]:
    """Seeded single-frame aligner and its zero-noise window aligner."""
    base = SingleFrameAlignerParams.random(d, h, seed, precision)
    return base, init_from_single_frame(base, w, noise_scale=0.0, seed=seed)
