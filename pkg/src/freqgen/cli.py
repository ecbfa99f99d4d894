"""Command-line interface.

Subcommands: augment (batch augmentation over an image tree), spectrum
(amplitude/phase dumps), gradcheck (finite-difference verification),
train (leave-one-domain-out run), sweep (train across parameter values).

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 failed check.
"""

import argparse
import concurrent.futures
import hashlib
import os
import sys
from dataclasses import replace

import numpy as np

from . import gradcheck, harness, spatial, spectral
from .exceptions import ConfigError, FreqgenError
from .raster import read_image, rgb2gray, write_image

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CHECK = 4

IMAGE_EXTENSIONS = (".png", ".ppm", ".pgm", ".pnm")


def _resolve_seed(args, parser):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FREQGEN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            parser.error(f"FREQGEN_SEED must be an integer, got {env!r}")
    parser.error("a seed is required: pass --seed or set FREQGEN_SEED")


def _image_seed(seed, relpath):
    """Stable per-image seed from (global seed, relative path)."""
    digest = hashlib.sha256(f"{seed}:{relpath}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _walk_images(root):
    paths = []
    for dirpath, _, names in os.walk(root):
        for name in names:
            if os.path.splitext(name)[1].lower() in IMAGE_EXTENSIONS:
                full = os.path.join(dirpath, name)
                paths.append(os.path.relpath(full, root))
    return sorted(paths)


def _augment_one(args, seed, in_dir, out_dir, relpath):
    img = read_image(os.path.join(in_dir, relpath))
    if args.mode == "gaussian":
        out = spatial.high_freq_for_network(img, args.kernel)
        record = f"{relpath},{args.kernel}"
    else:
        h, w = img.shape[:2]
        if args.random:
            rng = np.random.default_rng(_image_seed(seed, relpath))
            params = spectral.sample_params(rng, h, w)
        else:
            d = args.d if args.d is not None else 0.0
            params = spectral.AugmentParams(d=d, alpha=args.alpha, beta=args.beta)
        out = spectral.two_step_highpass(img, params)
        record = f"{relpath},{params.d:g},{params.alpha:g},{params.beta:g}"
    dest = os.path.join(out_dir, relpath)
    os.makedirs(os.path.dirname(dest), exist_ok=True)
    write_image(out, dest)
    return record


def cmd_augment(args, parser):
    in_dir = os.path.abspath(args.input)
    out_dir = os.path.abspath(args.output)
    if in_dir == out_dir:
        parser.error("output directory must be distinct from input")
    if not os.path.isdir(in_dir):
        print(f"error: input directory not found: {in_dir}", file=sys.stderr)
        return EXIT_IO
    seed = _resolve_seed(args, parser) if args.random else (args.seed or 0)
    relpaths = _walk_images(in_dir)
    if not args.force:
        for rel in relpaths:
            if os.path.exists(os.path.join(out_dir, rel)):
                print(f"error: {os.path.join(out_dir, rel)} exists "
                      "(use --force to overwrite)", file=sys.stderr)
                return EXIT_IO
    os.makedirs(out_dir, exist_ok=True)

    records = {}
    failures = 0
    with concurrent.futures.ThreadPoolExecutor(max_workers=args.workers) as pool:
        futures = {
            pool.submit(_augment_one, args, seed, in_dir, out_dir, rel): rel
            for rel in relpaths
        }
        for fut in concurrent.futures.as_completed(futures):
            rel = futures[fut]
            try:
                records[rel] = fut.result()
            except (FreqgenError, OSError) as e:
                print(f"skipping {rel}: {e}", file=sys.stderr)
                failures += 1
    # Manifest in sorted path order so worker scheduling never changes bytes.
    with open(os.path.join(out_dir, "manifest.csv"), "w", newline="\n") as fh:
        for rel in relpaths:
            if rel in records:
                fh.write(records[rel] + "\n")
    return EXIT_IO if failures else EXIT_OK


def cmd_spectrum(args, parser):
    try:
        img = read_image(args.image)
    except (FreqgenError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    gray = rgb2gray(img) if img.shape[2] == 3 else img[:, :, 0]
    spec = spectral.center(spectral.dft2(gray))
    ap = spectral.amp_phase(spec)
    # Log-scaled amplitude for display; phase mapped from (-pi, pi] to [0, 1].
    log_amp = np.log1p(ap.amplitude)
    log_amp /= max(log_amp.max(), 1e-12)
    phase = (ap.phase + np.pi) / (2.0 * np.pi)
    write_image(log_amp[:, :, None], args.out_prefix + "_amplitude.png")
    write_image(np.clip(phase, 0.0, 1.0)[:, :, None], args.out_prefix + "_phase.png")
    return EXIT_OK


def cmd_gradcheck(args, parser):
    seed = _resolve_seed(args, parser)
    results = {}
    for name, err in gradcheck.check_layer(seed).items():
        results[f"layer.{name}"] = err
    for name, err in gradcheck.check_model(seed).items():
        results[f"model.{name}"] = err
    worst = 0.0
    for name, err in results.items():
        status = "ok" if err < gradcheck.TOLERANCE else "FAIL"
        print(f"{name:<24} max-rel-error {err:.3e}  {status}")
        worst = max(worst, err)
    return EXIT_OK if worst < gradcheck.TOLERANCE else EXIT_CHECK


def _load_config(args, parser):
    try:
        return harness.load_config(args.config)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def cmd_train(args, parser):
    config, name = _load_config(args, parser)
    metrics = harness.train(config)
    rows = [{"config": name, "seed": config.seed, "metrics": metrics}]
    with open(args.out, "w", newline="\n") as fh:
        fh.write(harness.metrics_csv(rows))
    print(f"{name}: mean held-out accuracy {metrics.mean_held_out:.4f} "
          f"(in-domain {metrics.in_domain_accuracy:.4f})")
    return EXIT_CHECK if metrics.failed else EXIT_OK


def cmd_sweep(args, parser):
    config, _ = _load_config(args, parser)
    field = args.param.replace("-", "_")
    if field not in harness._CONFIG_FIELDS:
        parser.error(f"unknown sweep parameter {args.param!r}")
    ftype = harness._CONFIG_FIELDS[field]
    lines = ["param,value,mean_accuracy"]
    for raw in args.values.split(","):
        raw = raw.strip()
        try:
            value = ftype(raw) if ftype is not bool else raw.lower() in ("true", "1")
        except ValueError:
            parser.error(f"bad value {raw!r} for {args.param}")
        metrics = harness.train(replace(config, **{field: value}))
        lines.append(f"{args.param},{raw},{metrics.mean_held_out:.6f}")
        print(lines[-1])
    with open(args.out, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="freqgen",
        description="Frequency-restriction augmentation and tail-interaction tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="augment every image under a directory tree")
    p.add_argument("input", help="input directory (flat or domain/class tree)")
    p.add_argument("output", help="output directory, mirrored from input")
    p.add_argument("--mode", choices=("two-step", "gaussian"), default="two-step")
    p.add_argument("--d", type=float, default=None, help="high-pass diameter")
    p.add_argument("--alpha", type=float, default=1.0, help="amplitude scaling")
    p.add_argument("--beta", type=float, default=1.0, help="phase scaling")
    p.add_argument("--kernel", type=int, default=spatial.DEFAULT_KERNEL_SIZE,
                   help="gaussian kernel size (odd)")
    p.add_argument("--random", action="store_true",
                   help="draw per-image parameters from the severity/scaling sets")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("spectrum", help="dump log-amplitude and phase images")
    p.add_argument("image")
    p.add_argument("out_prefix")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("gradcheck", help="verify backward passes by finite differences")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("train", help="run the leave-one-domain-out experiment")
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="run train across a list of parameter values")
    p.add_argument("--param", required=True, help="config field, e.g. unit-size")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except SystemExit as e:
        raise
    except FreqgenError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
