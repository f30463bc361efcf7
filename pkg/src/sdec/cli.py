"""Command-line front end chaining the clustering pipeline.

Exit codes: 0 success, 2 usage error, 3 missing input file, 4 malformed
file or configuration, 5 infeasible request (e.g. k larger than the
dataset). All randomness derives from one seed; reports go to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_FORMAT = 4
EXIT_INFEASIBLE = 5

_EPILOG = """\
exit codes:
  0  success
  2  usage error (bad flag or flag value)
  3  input file missing or unreadable
  4  malformed file or configuration
  5  infeasible request (e.g. --k exceeding the dataset size)

environment:
  SDEC_THREADS   cap worker threads (0 or unset = automatic)
  SDEC_KERNELS   force the kernel backend: 'compiled' or 'numpy'
"""


def _apply_thread_cap() -> None:
    # Must run before numpy is first imported to take effect.
    raw = os.environ.get("SDEC_THREADS", "").strip()
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        print(f"warning: ignoring non-integer SDEC_THREADS={raw!r}", file=sys.stderr)
        return
    if n > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(n))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdec",
        description="Deep embedded clustering over dense embedding files.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pool", help="pool token sequences into fixed-size vectors")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--strategy", default="mean", choices=["cls", "last", "mean", "max"])
    p.add_argument("--normalize", default="unit_norm",
                   choices=["unit_norm", "layer_norm", "feature_standardize", "none"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("pretrain", help="pretrain the autoencoder on flat vectors")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("cluster", help="KL fine-tuning from a pretrained checkpoint")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--ae", required=True, help="pretrained checkpoint")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="labels CSV")
    p.add_argument("--history", default=None, help="per-update history CSV")
    p.add_argument("--out-ckpt", default=None, help="fine-tuned checkpoint")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("refine", help="cosine-margin label refinement")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--lambda", dest="threshold", type=float, default=0.2)
    p.add_argument("--max-passes", type=int, default=10)
    p.add_argument("--out", required=True)
    p.add_argument("--log", default=None, help="reassignment log CSV")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("eval", help="score predicted labels against gold labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--true", dest="gold", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", help="pool -> pretrain -> cluster -> refine -> eval")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("synth", help="generate Gaussian blob embeddings")
    p.add_argument("--blobs", type=int, default=4)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--sep", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--labels", default=None, help="gold labels CSV")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="train/assign timings over dataset sizes")
    p.add_argument("--config", required=True)
    p.add_argument("--sizes", default="500,1000,2000,4000",
                   help="comma-separated dataset sizes")
    p.set_defaults(func=cmd_bench)

    return parser


# ---------------------------------------------------------------------------
# subcommands


def _load_flat(path):
    from . import io as sdio
    from .errors import FormatError

    data = sdio.load_embeddings(path)
    if not hasattr(data, "ndim"):
        raise FormatError(f"{path}: expected flat vectors (kind 0), found token sequences")
    return data


def cmd_pool(args) -> int:
    from . import embed
    from . import io as sdio

    data = sdio.load_embeddings(args.infile)
    mode = embed.NormalizationMode.from_name(args.normalize)
    if hasattr(data, "ndim"):
        # Already-pooled vectors: only the normalization stage applies.
        count = data.shape[0]
        pooled = data
        print(f"{args.infile}: flat vectors, pooling skipped", file=sys.stderr)
    else:
        count = len(data)
        strategy = embed.PoolingStrategy.from_name(args.strategy)
        pooled = embed.pool_matrix(data, strategy)
    pooled = embed.normalize(pooled, mode, fit=True)
    sdio.save_embeddings(args.out, pooled)
    print(json.dumps({"sequences": count, "dim": pooled.shape[1],
                      "strategy": args.strategy, "normalize": args.normalize},
                     sort_keys=True))
    return EXIT_OK


def cmd_pretrain(args) -> int:
    from . import autoencoder as ae
    from . import io as sdio

    data = _load_flat(args.infile)
    cfg = sdio.load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    aec = cfg.autoencoder_config(data.shape[1])
    started = time.perf_counter()
    params, curve = ae.pretrain(data, aec)
    elapsed = time.perf_counter() - started
    sdio.save_checkpoint(args.out, params, None, cfg.config_hash())
    print(f"pretrained {aec.epochs} epochs in {elapsed:.2f}s", file=sys.stderr)
    print(json.dumps({
        "epochs": aec.epochs,
        "first_epoch_loss": curve[0] if curve else None,
        "final_epoch_loss": curve[-1] if curve else None,
    }, sort_keys=True))
    return EXIT_OK


def cmd_cluster(args) -> int:
    from . import clustering
    from . import io as sdio

    data = _load_flat(args.infile)
    cfg = sdio.load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    params, _, _ = sdio.load_checkpoint(args.ae, cfg.config_hash())
    aec = cfg.autoencoder_config(data.shape[1])
    ftc = cfg.finetune_config()
    params, model, state, history = clustering.joint_finetune(params, data, args.k, ftc, aec)
    sdio.save_labels(args.out, state.labels)
    if args.history:
        sdio.save_history(args.history, history)
    if args.out_ckpt:
        sdio.save_checkpoint(args.out_ckpt, params, model, cfg.config_hash())
    last = history.rows[-1]
    print(json.dumps({
        "iterations": last[0],
        "kl": last[1],
        "stop_reason": history.stop_reason,
        "converged": history.converged,
    }, sort_keys=True))
    return EXIT_OK


def cmd_refine(args) -> int:
    from . import io as sdio
    from . import refine as rf

    data = _load_flat(args.infile)
    labels = sdio.load_labels(args.labels)
    if labels.shape[0] != data.shape[0]:
        raise UsageError("labels length does not match the embedding count")
    config = rf.RefineConfig(threshold=args.threshold, max_passes=args.max_passes)
    log: list | None = [] if args.log else None
    refined = rf.refine(data, labels, config, log)
    sdio.save_labels(args.out, refined)
    if args.log:
        sdio.save_refine_log(args.log, log)
    moved = int((refined != labels).sum())
    print(json.dumps({"reassigned": moved, "lambda": args.threshold}, sort_keys=True))
    return EXIT_OK


def cmd_eval(args) -> int:
    from . import io as sdio
    from . import metrics

    pred = sdio.load_labels(args.pred)
    gold = sdio.load_labels(args.gold)
    report = metrics.evaluate(gold, pred)
    sys.stdout.write(report.to_json())
    return EXIT_OK


def cmd_synth(args) -> int:
    from . import io as sdio
    from . import synth

    x, labels = synth.make_blobs(args.n, args.dim, args.blobs, args.sep, args.seed, args.sigma)
    sdio.save_embeddings(args.out, x)
    if args.labels:
        sdio.save_labels(args.labels, labels)
    print(json.dumps({"n": args.n, "dim": args.dim, "blobs": args.blobs}, sort_keys=True))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    from . import autoencoder as ae
    from . import clustering, embed, metrics
    from . import io as sdio
    from . import refine as rf
    from .errors import ConfigError

    cfg = sdio.load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if not cfg.input:
        raise ConfigError("pipeline requires 'input' in the configuration")
    if not cfg.k:
        raise ConfigError("pipeline requires 'k' in the configuration")
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    data = sdio.load_embeddings(cfg.input)
    if not hasattr(data, "ndim"):
        data = embed.pool_matrix(data, cfg.pooling_strategy())
    data = embed.normalize(data, cfg.normalization_mode(), fit=True)
    sdio.save_embeddings(outdir / "vectors.sdec", data)
    data = sdio.load_embeddings(outdir / "vectors.sdec")  # stay at file precision
    print("pooling/normalization stage complete", file=sys.stderr)

    aec = cfg.autoencoder_config(data.shape[1])
    params, curve = ae.pretrain(data, aec)
    sdio.save_checkpoint(outdir / "ae.ckpt", params, None, cfg.config_hash())
    print(f"pretrain: final epoch loss {curve[-1]:.6f}" if curve else "pretrain: skipped",
          file=sys.stderr)

    params, model, state, history = clustering.joint_finetune(
        params, data, cfg.k, cfg.finetune_config(), aec)
    sdio.save_labels(outdir / "labels.csv", state.labels)
    sdio.save_history(outdir / "history.csv", history)
    sdio.save_checkpoint(outdir / "model.ckpt", params, model, cfg.config_hash())
    print(f"cluster: stopped at iteration {history.rows[-1][0]} ({history.stop_reason})",
          file=sys.stderr)

    refine_input = data if cfg.refine_space == "original" else ae.encode(params, data)
    refined = rf.refine(refine_input, state.labels, cfg.refine_config())
    sdio.save_labels(outdir / "labels_refined.csv", refined)
    print(f"refine: changed {int((refined != state.labels).sum())} labels", file=sys.stderr)

    if cfg.gold_labels:
        gold = sdio.load_labels(cfg.gold_labels)
        report = metrics.evaluate(gold, refined)
        (outdir / "metrics.json").write_text(report.to_json(), encoding="utf-8")
        sys.stdout.write(report.to_json())
    return EXIT_OK


def cmd_bench(args) -> int:
    from . import autoencoder as ae
    from . import clustering, synth
    from . import io as sdio
    from .errors import ConfigError
    from .numeric import Rng

    cfg = sdio.load_config(args.config)
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {args.sizes!r}")
    if not sizes or min(sizes) < 1:
        raise UsageError("--sizes must contain positive integers")
    k = cfg.k or 4
    dim = cfg.layer_dims[0] if cfg.layer_dims else 32
    if any(n < k for n in sizes):
        raise ConfigError("every bench size must be >= k")

    # Free one large block up front: glibc raises its dynamic mmap
    # threshold to cover it, so the temporaries of every benchmarked
    # size reuse the heap arena instead of straddling allocator regimes.
    import numpy as np
    _prime = np.empty(max(sizes) * dim * 16, dtype=np.float64)
    del _prime

    print("n,train_seconds,assign_seconds")
    for n in sizes:
        seed = Rng(cfg.seed).spawn(f"bench_{n}").seed
        x, _ = synth.make_blobs(n, dim, k, 10.0, seed)
        aec = cfg.autoencoder_config(dim)
        ftc = cfg.finetune_config()

        started = time.perf_counter()
        params, _ = ae.pretrain(x, aec)
        params, model, _, _ = clustering.joint_finetune(params, x, k, ftc, aec)
        train_s = time.perf_counter() - started

        def assign_once():
            z = ae.encode(params, x)
            q = clustering.soft_assign(z, model)
            clustering.hard_labels(q)

        # Constant total work per timing round so allocator and cache
        # effects amortize identically across sizes.
        repeats = max(5, 40000 // n)
        assign_once()  # warm caches and the allocator before timing
        best = None
        for _ in range(5):
            t0 = time.perf_counter()
            for _ in range(repeats):
                assign_once()
            t = (time.perf_counter() - t0) / repeats
            best = t if best is None else min(best, t)
        print(f"{n},{train_s:.6f},{best:.6f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# driver


class UsageError(ValueError):
    pass


def main(argv=None) -> int:
    _apply_thread_cap()
    from .errors import ConfigError, FormatError, InfeasibleError, SdecError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (FormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except SdecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
