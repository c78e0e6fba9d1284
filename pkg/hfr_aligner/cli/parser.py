"""
Command-line parser for hfr-aligner.
"""

import argparse
from typing import Optional

from hfr_aligner.analysis.cost import COST_PRESETS
from hfr_aligner.settings import Settings

EPILOG = """
Examples:
  # Render and encode a counter-clockwise rotating dot:
  hfr-aligner gen --seed 7 --rps 0.75 --dir ccw --dur 4 --fps 16 --out a.f16t

  # Build a window aligner from seeded single-frame weights and check averaging:
  hfr-aligner init --w 16 --noise 0 --out hfr.f16t
  hfr-aligner verify-avg --weights hfr.f16t

  # Tokens at full rate, then at 4 FPS by frame repetition:
  hfr-aligner forward --features a.f16t --weights hfr.f16t --out tokens.f16t
  hfr-aligner decode --features a.f16t --weights hfr.f16t --method repeat --test-fps 4 --out tokens4.f16t

  # Frame-rate separation experiment:
  hfr-aligner train --fps 16 --seed 1 --out model16.f16t
  hfr-aligner train --fps 1 --seed 1 --out model1.f16t

  # Reports:
  hfr-aligner analyze budget --frames 1760 --w 16 --p 729
  hfr-aligner analyze cost --preset 7b-proxy --sweep 1,2,4,8,16
"""

COST_HELP = """
Presets:
  7b-proxy  729-patch encoder at ~3.1e11 MACs per frame, d=1152, h=3584,
            LLM proxy of width 3584 with alpha=56 and beta~556
            (28 layers, MLP width 18944)
  desk      linear encoder stub with p=16, d=24, h=32 and a tiny LLM proxy
"""


def _add_common(parser: argparse.ArgumentParser, settings: Settings) -> None:
    parser.add_argument(
        "--log-level",
        default=None,
        help=f"Logging level (default: {settings.log_level})",
    )


def _add_seed(parser: argparse.ArgumentParser, settings: Settings) -> None:
    parser.add_argument(
        "--seed",
        type=int,
        default=settings.seed,
        help=f"Seed for every random draw of the command (default: {settings.seed})",
    )


def _add_threads(parser: argparse.ArgumentParser, settings: Settings) -> None:
    parser.add_argument(
        "--threads",
        type=int,
        default=settings.threads,
        help=f"Worker threads for window-parallel forward passes (default: {settings.threads})",
    )


def _add_dataset(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--speeds", default="0.75", help="Comma-separated revolutions per second (default: 0.75)")
    parser.add_argument("--dur", type=float, default=2.0, help="Clip length in seconds (default: 2.0)")
    parser.add_argument("--n-test", type=int, default=200, help="Test items (default: 200)")


def build_parser(settings: Optional[Settings] = None) -> argparse.ArgumentParser:
    """Build the argument parser with defaults taken from ``settings``."""
    settings = settings or Settings()
    parser = argparse.ArgumentParser(
        prog="hfr-aligner",
        description=settings.app_tagline,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # gen
    gen = subparsers.add_parser("gen", help="Render a rotating dot and write its encoded features")
    _add_seed(gen, settings)
    gen.add_argument("--rps", type=float, default=0.75, help="Revolutions per second (default: 0.75)")
    gen.add_argument("--dir", choices=["cw", "ccw"], default="ccw", help="Rotation direction (default: ccw)")
    gen.add_argument("--dur", type=float, default=2.0, help="Duration in seconds (default: 2.0)")
    gen.add_argument("--fps", type=int, default=settings.train_fps, help="Native frame rate")
    gen.add_argument("--sample-fps", type=int, default=None, help="Sampling rate (default: native rate)")
    gen.add_argument("--side", type=int, default=settings.side, help="Frame side in pixels")
    gen.add_argument("--patch-grid", type=int, default=settings.patch_grid, help="Encoder patches per side")
    gen.add_argument("--d", type=int, default=settings.feature_dim, help="Encoder feature width")
    gen.add_argument("--encoder-seed", type=int, default=settings.seed, help="Seed of the encoder projection")
    gen.add_argument("--out", required=True, help="Output feature archive")
    _add_common(gen, settings)

    # init
    init = subparsers.add_parser("init", help="Build a window aligner from a single-frame aligner")
    _add_seed(init, settings)
    init.add_argument("--w", type=int, default=settings.window, help="Frames per window")
    init.add_argument("--noise", type=float, default=settings.noise_scale, help="Off-diagonal noise scale")
    init.add_argument("--base", default=None, help="Archive with base/* weights (default: seeded random)")
    init.add_argument("--d", type=int, default=settings.feature_dim, help="Feature width for random base weights")
    init.add_argument("--h", type=int, default=settings.hidden_dim, help="Output width for random base weights")
    init.add_argument("--p", type=int, default=settings.num_patches, help="Patch count recorded with the weights")
    init.add_argument("--pooling", choices=["post", "pre"], default="post", help="Spatial pooling placement")
    init.add_argument("--out", required=True, help="Output weight archive")
    _add_common(init, settings)

    # forward
    forward = subparsers.add_parser("forward", help="Visual tokens of a feature archive")
    forward.add_argument("--features", required=True, help="Feature archive sampled at the window rate")
    forward.add_argument("--weights", required=True, help="Aligner weight archive")
    forward.add_argument("--out", required=True, help="Output token archive")
    _add_threads(forward, settings)
    _add_common(forward, settings)

    # decode
    decode = subparsers.add_parser("decode", help="Visual tokens at a lower test frame rate")
    decode.add_argument("--features", required=True, help="Feature archive sampled at the window rate")
    decode.add_argument("--weights", required=True, help="Aligner weight archive")
    decode.add_argument("--method", choices=["repeat", "trim"], default="repeat", help="Decoding method")
    decode.add_argument("--test-fps", type=int, required=True, help="Test frame rate; must divide w")
    decode.add_argument("--out", required=True, help="Output token archive")
    _add_threads(decode, settings)
    _add_common(decode, settings)

    # train
    train = subparsers.add_parser("train", help="Train the toy classifier on rotating dots")
    _add_seed(train, settings)
    train.add_argument("--fps", type=int, default=settings.train_fps, help="Sampling rate and window width")
    train.add_argument("--epochs", type=int, default=30, help="Training epochs (default: 30)")
    train.add_argument("--lr", type=float, default=2e-3, help="SGD learning rate (default: 0.002)")
    train.add_argument("--batch", type=int, default=1, help="Items per update (default: 1)")
    train.add_argument("--n-train", type=int, default=400, help="Training items (default: 400)")
    _add_dataset(train)
    train.add_argument("--noise", type=float, default=settings.noise_scale, help="Off-diagonal noise scale")
    train.add_argument("--out", default=None, help="Checkpoint archive to write")
    train.add_argument("--report", default=None, help="Write the report here instead of stdout")
    _add_common(train, settings)

    # eval
    evaluate = subparsers.add_parser("eval", help="Accuracy of a checkpoint on the test split")
    _add_seed(evaluate, settings)
    evaluate.add_argument("--model", required=True, help="Checkpoint archive")
    _add_dataset(evaluate)
    evaluate.add_argument("--test-fps", type=int, default=None, help="Test frame rate (default: training rate)")
    evaluate.add_argument("--method", choices=["repeat", "trim"], default="repeat", help="Decoding method")
    _add_common(evaluate, settings)

    # analyze
    analyze = subparsers.add_parser("analyze", help="Diagnostic reports")
    reports = analyze.add_subparsers(dest="analysis", help="Report to produce")

    cosine = reports.add_parser("cosine", help="Cosine similarity before and after pooling")
    cosine.add_argument("--features", required=True, help="Feature archive")
    cosine.add_argument("--reference", type=int, default=0, help="Position of the reference frame")
    cosine.add_argument("--frames", default=None, help="Comma-separated frame positions (default: all)")
    cosine.add_argument("--csv", default=None, help="Also write the table as CSV")
    _add_common(cosine, settings)

    budget = reports.add_parser("budget", help="Windows, tokens per window and total tokens")
    budget.add_argument("--frames", type=int, required=True, help="Sampled frame count")
    budget.add_argument("--w", type=int, default=settings.window, help="Frames per window")
    budget.add_argument("--p", type=int, required=True, help="Patch count (perfect square)")
    _add_common(budget, settings)

    cost = reports.add_parser(
        "cost",
        help="Analytical MAC counts per component",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=COST_HELP,
    )
    cost.add_argument("--preset", choices=sorted(COST_PRESETS), default="7b-proxy", help="Constant preset")
    cost.add_argument("--fps", type=int, default=None, help="Test frame rate")
    cost.add_argument("--duration", type=float, default=None, help="Video length in seconds")
    cost.add_argument("--output-tokens", type=int, default=None, help="Generated tokens")
    cost.add_argument("--method", choices=["repeat", "trim"], default=None, help="Decoding method")
    cost.add_argument("--frame-cap", type=int, default=None, help="Cap encoded frames, as the sampler does")
    cost.add_argument("--sweep", default=None, help="Comma-separated frame rates, one row each")
    cost.add_argument("--csv", default=None, help="Also write the table as CSV")
    _add_common(cost, settings)

    # verification
    verify_avg = subparsers.add_parser("verify-avg", help="Check that a zero-noise aligner averages frames")
    _add_seed(verify_avg, settings)
    verify_avg.add_argument("--weights", required=True, help="Weight archive holding base/* and aligner/*")
    verify_avg.add_argument("--trials", type=int, default=100, help="Random windows (default: 100)")
    verify_avg.add_argument("--precision", choices=["float32", "float64"], default="float32")
    verify_avg.add_argument("--tol", type=float, default=None, help="Override the tolerance")
    _add_common(verify_avg, settings)

    verify_grad = subparsers.add_parser("verify-grad", help="Check backward passes against finite differences")
    _add_seed(verify_grad, settings)
    verify_grad.add_argument("--trials", type=int, default=100, help="Random instances (default: 100)")
    _add_common(verify_grad, settings)

    return parser
