"""
Command implementations.

Each ``cmd_*`` takes the parsed arguments and settings, prints its report to
stdout and returns an exit code. Exceptions propagate to the entry point,
which maps them to exit codes.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List

from hfr_aligner.aligner.model import VisualTokens, video_forward
from hfr_aligner.aligner.params import (
    HfrAlignerParams,
    PoolingMode,
    SingleFrameAlignerParams,
    init_from_single_frame,
    patch_count_from_records,
)
from hfr_aligner.analysis.budget import token_budget
from hfr_aligner.analysis.cosine import cosine_report
from hfr_aligner.analysis.cost import COST_PRESETS, CostConfig, cost_model, cost_sweep
from hfr_aligner.analysis.verify import verify_averaging, verify_gradients
from hfr_aligner.cli.output import render_table, write_csv
from hfr_aligner.cli.validation import ArgumentValidator
from hfr_aligner.decoding import DecodeConfig, DecodeMethod, decode, resample_features
from hfr_aligner.exceptions import ConfigError, ShapeError
from hfr_aligner.features.encoder import EncoderStub, encode_video
from hfr_aligner.features.frames import FrameFeatures
from hfr_aligner.features.io import read_features, write_features
from hfr_aligner.features.sampling import sample_frame_indices
from hfr_aligner.features.synthetic import CCW, CW, generate_rotating_dot
from hfr_aligner.numerics.archive import read_archive, write_archive
from hfr_aligner.numerics.tensor import Precision, Tensor, isqrt_exact
from hfr_aligner.settings import Settings
from hfr_aligner.trainer.dataset import make_motion_dataset
from hfr_aligner.trainer.loop import TrainConfig, confusion_counts, evaluate, train
from hfr_aligner.trainer.model import ToyModel

logger = logging.getLogger(__name__)

validator = ArgumentValidator()

Command = Callable[[argparse.Namespace, Settings], int]


def _check_patch_count(p: int) -> None:
    try:
        isqrt_exact(p)
    except ShapeError:
        raise ConfigError("p", p, "must be a perfect square")


def _token_records(outputs: List[VisualTokens]) -> Dict[str, Tensor]:
    return {f"window/{o.window_index}/tokens": o.tokens for o in outputs}


def _load_aligner(path: str) -> HfrAlignerParams:
    return HfrAlignerParams.from_records(read_archive(path), path)


def _check_features(seq: List[FrameFeatures], params: HfrAlignerParams) -> None:
    if seq and seq[0].feature_dim != params.d:
        raise ShapeError("feature width", params.d, seq[0].feature_dim)


def cmd_gen(args: argparse.Namespace, settings: Settings) -> int:
    validator.validate_non_negative("rps", args.rps)
    validator.validate_positive("dur", args.dur)
    sample_fps = args.sample_fps if args.sample_fps is not None else args.fps
    for name, value in (("fps", args.fps), ("sample-fps", sample_fps), ("d", args.d), ("patch-grid", args.patch_grid)):
        validator.validate_positive_int(name, value)

    direction = CCW if args.dir == "ccw" else CW
    video = generate_rotating_dot(args.seed, args.rps, direction, args.dur, args.fps, args.side)
    encoder = EncoderStub.from_seed(args.encoder_seed, side=args.side, patch_grid=args.patch_grid, feature_dim=args.d)
    indices = sample_frame_indices(len(video), args.fps, sample_fps, settings.frame_cap)
    write_features(args.out, encode_video(video, encoder, indices))
    print(f"frames {len(indices)} patches {encoder.num_patches} dim {encoder.feature_dim}")
    return 0


def cmd_init(args: argparse.Namespace, settings: Settings) -> int:
    validator.validate_positive_int("w", args.w)
    validator.validate_non_negative("noise", args.noise)
    _check_patch_count(args.p)

    if args.base is not None:
        base = SingleFrameAlignerParams.from_records(read_archive(args.base), args.base)
    else:
        validator.validate_positive_int("d", args.d)
        validator.validate_positive_int("h", args.h)
        base = SingleFrameAlignerParams.random(args.d, args.h, args.seed)

    params = init_from_single_frame(
        base, args.w, noise_scale=args.noise, seed=args.seed, pooling=PoolingMode(args.pooling)
    )
    write_archive(args.out, params.to_records(args.p, base))
    print(f"w {params.w} d {params.d} h {params.h} p {args.p} pooling {params.pooling.value}")
    return 0


def cmd_forward(args: argparse.Namespace, settings: Settings) -> int:
    seq = read_features(args.features)
    params = _load_aligner(args.weights)
    _check_features(seq, params)
    outputs = video_forward(seq, params, threads=args.threads)
    write_archive(args.out, _token_records(outputs))
    print(f"windows {len(outputs)} tokens {sum(o.count for o in outputs)}")
    return 0


def cmd_decode(args: argparse.Namespace, settings: Settings) -> int:
    seq = read_features(args.features)
    params = _load_aligner(args.weights)
    cfg = DecodeConfig(train_fps=params.w, test_fps=args.test_fps, method=DecodeMethod(args.method))
    _check_features(seq, params)
    outputs = decode(resample_features(seq, params.w, cfg.test_fps), params, cfg, threads=args.threads)
    write_archive(args.out, _token_records(outputs))
    print(f"windows {len(outputs)} tokens {sum(o.count for o in outputs)}")
    return 0


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    cfg = TrainConfig(
        learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch, seed=args.seed, fps=args.fps
    )
    speeds = validator.parse_float_list("speeds", args.speeds)
    dataset = make_motion_dataset(
        args.seed, args.n_train, args.n_test, speeds, args.dur, native_fps=settings.train_fps, side=settings.side
    )
    model = ToyModel.create(
        args.seed,
        args.fps,
        side=settings.side,
        patch_grid=settings.patch_grid,
        feature_dim=settings.feature_dim,
        hidden_dim=settings.hidden_dim,
        noise_scale=validator.validate_non_negative("noise", args.noise),
    )

    report = train(model, dataset, cfg)
    text = report.to_text()
    if args.report is not None:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.out is not None:
        write_archive(args.out, model.to_records())
    return 0


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    model = ToyModel.from_records(read_archive(args.model), args.model)
    decode_cfg = None
    if args.test_fps is not None:
        decode_cfg = DecodeConfig(train_fps=model.fps, test_fps=args.test_fps, method=DecodeMethod(args.method))
    speeds = validator.parse_float_list("speeds", args.speeds)
    validator.validate_positive_int("n-test", args.n_test)
    dataset = make_motion_dataset(
        args.seed, 0, args.n_test, speeds, args.dur, native_fps=settings.train_fps, side=model.encoder.side
    )
    accuracy = evaluate(model, dataset, model.fps, decode_cfg)
    print(f"accuracy {accuracy:.4f}")
    for pair, count in confusion_counts(model, dataset, model.fps, decode_cfg).items():
        print(f"{pair} {count}")
    return 0


def cmd_cosine(args: argparse.Namespace, settings: Settings) -> int:
    seq = read_features(args.features)
    positions = validator.parse_int_list("frames", args.frames) if args.frames else list(range(len(seq)))
    for pos in [args.reference, *positions]:
        if not 0 <= pos < len(seq):
            raise ConfigError("frames", pos, f"must be in [0, {len(seq)})")
    if args.reference not in positions:
        positions = [args.reference, *positions]

    report = cosine_report([seq[i] for i in positions], positions.index(args.reference))
    headers = ["frame", "d_before", "d_after"]
    rows = [[r.frame_index, r.d_before, r.d_after] for r in report.rows]
    sys.stdout.write(render_table(headers, rows))
    if report.skipped:
        print(f"skipped {len(report.skipped)} zero-norm positions")
    if args.csv:
        write_csv(Path(args.csv), headers, rows)
    return 0


def cmd_budget(args: argparse.Namespace, settings: Settings) -> int:
    _check_patch_count(args.p)
    windows, per_window, total = token_budget(args.frames, args.w, args.p)
    print(f"{windows} {per_window} {total}")
    return 0


def cmd_cost(args: argparse.Namespace, settings: Settings) -> int:
    overrides = {
        name: value
        for name, value in (
            ("fps", args.fps),
            ("duration_s", args.duration),
            ("output_tokens", args.output_tokens),
            ("method", args.method),
            ("frame_cap", args.frame_cap),
        )
        if value is not None
    }
    cfg = CostConfig(**{**COST_PRESETS[args.preset].model_dump(), **overrides})
    if args.sweep:
        reports = cost_sweep(cfg, validator.parse_int_list("sweep", args.sweep))
    else:
        reports = [cost_model(cfg)]

    headers = ["fps", "frames", "windows", "tokens", "encoder", "aligner", "llm_proxy", "enc%", "aln%", "llm%"]
    rows = []
    for r in reports:
        shares = r.shares()
        rows.append(
            [
                r.config.fps,
                r.frames,
                r.windows,
                r.visual_tokens,
                r.encoder,
                r.aligner,
                r.llm_proxy,
                100.0 * shares["encoder"],
                100.0 * shares["aligner"],
                100.0 * shares["llm_proxy"],
            ]
        )
    sys.stdout.write(render_table(headers, rows))
    if args.csv:
        write_csv(Path(args.csv), headers, rows)
    return 0


def cmd_verify_avg(args: argparse.Namespace, settings: Settings) -> int:
    validator.validate_positive_int("trials", args.trials)
    records = read_archive(args.weights)
    base = SingleFrameAlignerParams.from_records(records, args.weights)
    params = HfrAlignerParams.from_records(records, args.weights)
    p = patch_count_from_records(records, args.weights)
    result = verify_averaging(base, params, p, args.trials, args.seed, Precision(args.precision))
    if args.tol is not None:
        result.tolerance = validator.validate_positive("tol", args.tol)
    verdict = "PASS" if result.passed else "FAIL"
    print(f"max_abs_diff {result.max_abs_diff:.3e} tolerance {result.tolerance:.0e} {verdict}")
    return 0 if result.passed else 1


def cmd_verify_grad(args: argparse.Namespace, settings: Settings) -> int:
    validator.validate_positive_int("trials", args.trials)
    result = verify_gradients(args.trials, args.seed)
    rows = [[name, err, "ok" if err <= result.tolerance else "FAIL"] for name, err in sorted(result.errors.items())]
    sys.stdout.write(render_table(["component", "max_rel_error", "status"], rows))
    print("PASS" if result.passed else "FAIL")
    return 0 if result.passed else 1


COMMANDS: Dict[str, Command] = {
    "gen": cmd_gen,
    "init": cmd_init,
    "forward": cmd_forward,
    "decode": cmd_decode,
    "train": cmd_train,
    "eval": cmd_eval,
    "analyze cosine": cmd_cosine,
    "analyze budget": cmd_budget,
    "analyze cost": cmd_cost,
    "verify-avg": cmd_verify_avg,
    "verify-grad": cmd_verify_grad,
}
