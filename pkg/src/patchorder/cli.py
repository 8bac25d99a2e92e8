"""Command line interface.

Subcommands:
    synthesize    degrade a clean image (noise, blur, decimation, counts)
    restore       restore an observation from an initialization image
    self-restore  denoise without an initializer, rebuilding the ordering
    analyze       dump ordering diagnostics for an image

Options can also come from a config file of flat ``key = value`` lines (a TOML
subset); explicit command line flags win over file values.  Exit codes:
0 success, 2 bad configuration or arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import pipeline
from .imgio import read_image, write_image
from .lbfgs import LbfgsConfig, save_trace_csv
from .metrics import (ordering_diagnostics, save_series_csv, save_tail_csv,
                      tail_distribution, write_mask_pgm)
from .ordering import save_permutation
from .presets import (Preset, deblur_preset, gaussian_preset, named_preset,
                      poisson_preset, preset_names, sr_preset)
from .regularizer import write_weight_heatmap

__all__ = ["main"]


class CliError(Exception):
    """Bad arguments or configuration (exit code 2)."""


def _load_array(path) -> np.ndarray:
    if str(path).endswith(".npy"):
        arr = np.load(path)
        if arr.ndim != 2:
            raise CliError(f"{path}: expected a 2D array")
        return arr.astype(np.float64)
    return read_image(path)


def _save_array(path, img, bits: int) -> None:
    if str(path).endswith(".npy"):
        np.save(path, np.asarray(img, dtype=np.float64))
    else:
        write_image(path, img, bits=bits)


def _resolve_preset(args) -> Preset:
    if getattr(args, "preset", None):
        return named_preset(args.preset)
    problem = getattr(args, "problem", None)
    if problem is None:
        raise CliError("need --preset or --problem")
    if problem == "gauss":
        if args.sigma is None:
            raise CliError("--problem gauss needs --sigma")
        return gaussian_preset(args.sigma)
    if problem == "deblur":
        if args.scenario is None:
            raise CliError("--problem deblur needs --scenario (1..6)")
        return deblur_preset(args.scenario)
    if problem == "sr":
        return sr_preset(noisy=bool(args.sigma))
    if problem == "poisson":
        if args.peak is None:
            raise CliError("--problem poisson needs --peak")
        return poisson_preset(args.peak, binning=args.bin)
    raise CliError(f"unknown problem {problem!r}")


def _write_report(path, report: dict) -> None:
    if path:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(report, fh, indent=2, sort_keys=True, default=float)
            fh.write("\n")


def _cmd_synthesize(args) -> int:
    preset = _resolve_preset(args)
    clean = _load_array(args.clean)
    syn = pipeline.synthesize(clean, preset, seed=args.seed)
    _save_array(args.out, syn.y, args.bits)
    report = {"preset": preset.name, "seed": args.seed, "out": str(args.out),
              "max_pix": syn.max_pix}
    if syn.y.shape == clean.shape:
        from .metrics import psnr

        scale = syn.max_pix / preset.peak if preset.problem == "poisson" else 1.0
        report["psnr_noisy"] = psnr(syn.y * scale, clean)
    _write_report(args.report, report)
    print(f"wrote {args.out} ({preset.name}, seed {args.seed})")
    return 0


def _lbfgs_config(args) -> LbfgsConfig:
    kw = {}
    if getattr(args, "max_iter", None) is not None:
        kw["max_iter"] = args.max_iter
    if getattr(args, "grad_tol", None) is not None:
        kw["grad_tol"] = args.grad_tol
    return LbfgsConfig(**kw)


def _finish_restore(args, image, report, result) -> int:
    if not np.all(np.isfinite(image)) or not np.isfinite(report.get("objective_final", 0.0)):
        print("error: objective diverged to a non-finite value", file=sys.stderr)
        return 3
    if result is not None and result.status == "line_search":
        if result.iterations == 0:
            print("error: no progress possible from the initialization", file=sys.stderr)
            return 3
        print("warning: line search exhausted; returning the best iterate", file=sys.stderr)
    if args.out:
        _save_array(args.out, np.clip(image, 0.0, 1.0) if not str(args.out).endswith(".npy")
                    else image, args.bits)
    if getattr(args, "trace", None) and result is not None:
        save_trace_csv(result.trace, args.trace)
    _write_report(args.report, report)
    shown = {k: round(v, 4) for k, v in report.items() if isinstance(v, float) and "psnr" in k}
    print(f"done: {report.get('status', 'ok')} after {report.get('iterations', '?')} iterations"
          + (f" {shown}" if shown else ""))
    return 0


def _cmd_restore(args) -> int:
    preset = _resolve_preset(args)
    y = _load_array(args.y)
    reference = _load_array(args.ref) if args.ref else None
    max_pix = args.max_pix if args.max_pix is not None else 1.0
    if args.init:
        init = _load_array(args.init)
    else:
        init = pipeline.default_init(y, preset, max_pix=max_pix)
    res = pipeline.restore(y, init, preset, seed=args.seed, mu=args.mu,
                           reference=reference, lbfgs_cfg=_lbfgs_config(args),
                           max_pix=max_pix)
    return _finish_restore(args, res.image, res.report, res.minimize_result)


def _cmd_self_restore(args) -> int:
    y = _load_array(args.y)
    reference = _load_array(args.ref) if args.ref else None
    schedule = None
    if args.mu_schedule:
        try:
            schedule = tuple(float(v) for v in args.mu_schedule.split(","))
        except ValueError as exc:
            raise CliError(f"bad --mu-schedule: {exc}") from None
    kw = {"mu_schedule": schedule} if schedule else {}
    res = pipeline.self_init_restore(y, rounds=args.rounds, seed=args.seed,
                                     reference=reference, lbfgs_cfg=_lbfgs_config(args), **kw)
    res.report["per_round"] = res.rounds
    return _finish_restore(args, res.image, res.report, None)


def _cmd_analyze(args) -> int:
    import os

    from .image import extract_patches
    from .ordering import OrderingParams, randomized_nn_order
    from .presets import gaussian_preset
    from .regularizer import RegularizerConfig, compute_weights, edge_gamma

    img = _load_array(args.image)
    base = gaussian_preset(50.0)
    patch_side = args.patch_side or base.patch_side
    window = args.window or base.window_side
    delta = args.delta if args.delta is not None else base.delta
    os.makedirs(args.outdir, exist_ok=True)

    patches = extract_patches(img, patch_side)
    perm = randomized_nn_order(patches, OrderingParams(window, delta, seed=args.seed))
    rcfg = RegularizerConfig()
    gamma = edge_gamma(img, patches, rcfg)
    weights = compute_weights(patches.data[perm.order], gamma[perm.order], rcfg)

    out = lambda name: os.path.join(args.outdir, name)
    save_permutation(perm, out("ordering.txt"))
    save_tail_csv(tail_distribution(img, perm, weights), out("tail.csv"))
    reference = _load_array(args.ref) if args.ref else None
    diag = ordering_diagnostics(img, perm, patch_side, reference=reference)
    save_series_csv(diag.abs_gradient, out("path_gradient.csv"), header="position,abs_difference")
    if diag.group_mse is not None:
        save_series_csv(diag.group_mse, out("group_mse.csv"), header="group,mse")
    write_mask_pgm(out("last_segment.pgm"), diag.last_mask)
    write_mask_pgm(out("last_segment_all_shifts.pgm"), diag.all_shifts_last_mask)
    write_weight_heatmap(out("weights.pgm"), weights.values, perm, img.shape)
    write_weight_heatmap(out("edge_scale.pgm"), weights.edge_scale, perm, img.shape)
    print(f"analysis written to {args.outdir} "
          f"(all-shifts tail fraction {diag.all_shifts_last_fraction:.4f})")
    return 0


def _add_common(sp) -> None:
    sp.add_argument("--config", help="flat key = value file; flags override it")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--report", help="write a JSON report here")
    sp.add_argument("--bits", type=int, choices=(8, 16), help="bit depth for image outputs")


def _add_preset_flags(sp) -> None:
    sp.add_argument("--problem", choices=("gauss", "poisson", "deblur", "sr"))
    sp.add_argument("--preset", help=f"one of: {', '.join(preset_names())}")
    sp.add_argument("--sigma", type=float, help="noise std on the 0-255 scale")
    sp.add_argument("--peak", type=float, help="expected count at the brightest pixel")
    sp.add_argument("--scenario", type=int, choices=range(1, 7), help="blur scenario")
    sp.add_argument("--bin", type=int, help="bin factor for counts (default by preset)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patchorder",
                                     description="image restoration along patch orderings")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synthesize", help="degrade a clean image")
    sp.add_argument("--clean", required=True)
    sp.add_argument("--out", required=True, help=".png/.pgm (clipped) or .npy (exact)")
    _add_preset_flags(sp)
    _add_common(sp)
    sp.set_defaults(func=_cmd_synthesize)

    sp = sub.add_parser("restore", help="restore an observation")
    sp.add_argument("--y", required=True, help="observation (.npy keeps values exact)")
    sp.add_argument("--init", help="initialization image on the [0, 1] scale")
    sp.add_argument("--ref", help="clean reference, for quality reporting only")
    sp.add_argument("--out")
    sp.add_argument("--mu", type=float, help="override the preset smoothness weight")
    sp.add_argument("--max-pix", type=float, help="clean-image maximum for count scaling")
    sp.add_argument("--max-iter", type=int)
    sp.add_argument("--grad-tol", type=float)
    sp.add_argument("--trace", help="write the objective trace as CSV")
    _add_preset_flags(sp)
    _add_common(sp)
    sp.set_defaults(func=_cmd_restore)

    sp = sub.add_parser("self-restore", help="denoise without an initializer")
    sp.add_argument("--y", required=True)
    sp.add_argument("--ref")
    sp.add_argument("--out")
    sp.add_argument("--rounds", type=int)
    sp.add_argument("--mu-schedule", help="comma separated, single-shift scale")
    sp.add_argument("--max-iter", type=int)
    sp.add_argument("--grad-tol", type=float)
    _add_common(sp)
    sp.set_defaults(func=_cmd_self_restore)

    sp = sub.add_parser("analyze", help="ordering diagnostics for an image")
    sp.add_argument("--image", required=True)
    sp.add_argument("--ref")
    sp.add_argument("--outdir", required=True)
    sp.add_argument("--patch-side", type=int)
    sp.add_argument("--window", type=int)
    sp.add_argument("--delta", type=float)
    _add_common(sp)
    sp.set_defaults(func=_cmd_analyze)
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, "rb") as fh:
            values = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise CliError(f"cannot read config {args.config}: {exc}") from None
    for key, value in values.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise CliError(f"config key {key!r} is not an option of this command")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if args.seed is None:
            args.seed = 0
        if args.bits is None:
            args.bits = 8
        if getattr(args, "rounds", None) is None and args.command == "self-restore":
            args.rounds = 7
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
