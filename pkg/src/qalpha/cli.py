"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 I/O, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import datetime
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .color_image import ColorModel, EvenMode, RasterImage, RealQImage, rescale_planes
from .imageio import (
    ImageFormatError,
    load_quaternion,
    read_image,
    save_quaternion,
    write_histogram_csv,
    write_image,
)
from .metrics import BlockSpec, ceme, eme_channels, raster_ceme
from .pipeline import Method, OutputRange, PipelineConfig, PipelineError, PostApplication, run
from .rooting import RootingParams
from .search import Axis, GAConfig, SweepError, SweepSpec, ga_optimize, sweep
from .spatial import PostKind, PostTransform, apply_scalar, hist_equalize

log = logging.getLogger("qalpha")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- argument groups -------------------------------------------------------


def _add_pipeline_args(p: argparse.ArgumentParser, rooting: bool = True) -> None:
    g = p.add_argument_group("pipeline")
    g.add_argument("--method", choices=[m.value for m in Method], default=Method.QDFT.value)
    if rooting:
        g.add_argument("--alpha", type=float, default=1.0)
        g.add_argument("--beta", type=float, default=0.0)
        g.add_argument("--lambda", dest="lam", type=float, default=1.0)
        for ch in "rgb":
            g.add_argument(f"--alpha-{ch}", type=float, help="per-channel alpha (dft-channel)")
            g.add_argument(f"--beta-{ch}", type=float)
            g.add_argument(f"--lambda-{ch}", dest=f"lam_{ch}", type=float)
    g.add_argument("--post", choices=[k.value for k in PostKind], default="none")
    g.add_argument("--c", type=float, default=1.0, help="post-transform scaling factor")
    g.add_argument("--p", type=float, default=1.0, help="log-transform exponent")
    g.add_argument("--gamma", type=float, default=1.0)
    g.add_argument("--post-apply", choices=[a.value for a in PostApplication],
                   help="default: magnitude for qdft, per-plane for dft-channel")
    g.add_argument("--even", choices=[EvenMode.ZERO.value, EvenMode.GRAY.value], default="zero")
    g.add_argument("--colorspace", choices=["rgb", "xyz"], default="rgb")
    g.add_argument("--negative", action="store_true", help="process the negative image")
    g.add_argument("--blocks", default="8x8", help="CEME/EME block size, e.g. 8x8")
    g.add_argument("--range", dest="out_range", choices=[r.value for r in OutputRange],
                   default=OutputRange.INPUT.value, help="rescale target after enhancement")
    g.add_argument("--log-base", type=float, default=float(np.e))


def _post(args) -> PostTransform:
    return PostTransform(args.post, c=args.c, p=args.p, gamma=args.gamma)


def _rooting(args, method: Method):
    base = RootingParams(args.alpha, args.beta, args.lam)
    if method is Method.QDFT:
        return base
    return tuple(
        RootingParams(
            _first(getattr(args, f"alpha_{ch}"), base.alpha),
            _first(getattr(args, f"beta_{ch}"), base.beta),
            _first(getattr(args, f"lam_{ch}"), base.lam),
        )
        for ch in "rgb"
    )


def _first(x, default):
    return default if x is None else x


def _config(args, rooting: bool = True) -> PipelineConfig:
    method = Method(args.method)
    kwargs = {}
    if rooting:
        kwargs["rooting"] = _rooting(args, method)
    elif method is Method.DFT_CHANNEL:
        kwargs["rooting"] = (RootingParams(),) * 3
    return PipelineConfig(
        method=method,
        even_mode=EvenMode(args.even) if method is Method.QDFT else EvenMode.ZERO,
        colorspace=ColorModel(args.colorspace.upper()),
        post=_post(args),
        post_application=args.post_apply,
        negative=args.negative,
        blocks=BlockSpec.parse(args.blocks),
        log_base=args.log_base,
        output_range=args.out_range,
        **kwargs,
    )


# --- reports ---------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return f"{x:.10g}"
    return str(x)


def _param_cells(rooting) -> list[str]:
    if rooting is None:
        return ["", "", ""]
    if isinstance(rooting, RootingParams):
        return [_fmt(rooting.alpha), _fmt(rooting.beta), _fmt(rooting.lam)]
    return ["/".join(_fmt(getattr(r, name)) for r in rooting) for name in ("alpha", "beta", "lam")]


def _metric_rows(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


HEAD = ["image", "method", "alpha", "beta", "lambda", "post"]
EME_COLS = ["eme_r", "eme_g", "eme_b"]


class Manifest:
    def __init__(self, command: str, args: argparse.Namespace):
        self.started = time.perf_counter()
        self.lines = [
            ("tool", f"qalpha {__version__}"),
            ("command", command),
            ("started", datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")),
        ]
        for key in sorted(vars(args)):
            if key in ("func", "command"):
                continue
            self.lines.append((f"config.{key}", _fmt(getattr(args, key))))

    def add(self, key: str, value) -> None:
        self.lines.append((key, _fmt(value)))

    def write(self, path: Path) -> None:
        self.lines.append(("wall_time", f"{time.perf_counter() - self.started:.3f}s"))
        with open(path, "w") as fh:
            for key, value in self.lines:
                fh.write(f"{key}: {value}\n")


def _default_sidecar(out: Path, suffix: str) -> Path:
    return out.with_name(out.name + suffix)


# --- commands --------------------------------------------------------------


def cmd_enhance(args) -> int:
    cfg = _config(args)
    manifest = Manifest("enhance", args)
    img = read_image(args.input)
    result = run(img, cfg)
    out = Path(args.output)
    write_image(result.raster, out)

    metrics_path = Path(args.metrics) if args.metrics else _default_sidecar(out, ".metrics.csv")
    cells = [str(args.input), cfg.method.value, *_param_cells(cfg.rooting), cfg.post.describe()]
    if cfg.method is Method.QDFT:
        _metric_rows(metrics_path, HEAD + ["ceme"], [cells + [_fmt(result.report.ceme)]])
        manifest.add("metric.ceme", result.report.ceme)
    else:
        _metric_rows(metrics_path, HEAD + EME_COLS, [cells + [_fmt(v) for v in result.report.eme]])
        manifest.add("metric.residue", result.residue)
    for name, v in zip(EME_COLS, result.report.eme):
        manifest.add(f"metric.{name}", v)
    manifest.add("output.image", out)
    manifest.add("output.metrics", metrics_path)
    if args.save_quaternion:
        if not isinstance(result.enhanced, RealQImage):
            raise UsageError("--save-quaternion needs qdft mode")
        save_quaternion(result.enhanced, args.save_quaternion)
        manifest.add("output.quaternion", args.save_quaternion)
    manifest.write(Path(args.manifest) if args.manifest else _default_sidecar(out, ".manifest.txt"))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_metric(args) -> int:
    blocks = BlockSpec.parse(args.blocks)
    src = Path(args.input)
    if src.suffix.lower() == ".npy":
        q = load_quaternion(src)
        header, values = HEAD + ["ceme"], [ceme(q, blocks)]
        if args.measure == "eme":
            header, values = HEAD + EME_COLS, eme_channels(q.color, blocks)
    else:
        img = read_image(src)
        if args.measure == "ceme":
            header, values = HEAD + ["ceme"], [raster_ceme(img, blocks)]
        else:
            header, values = HEAD + EME_COLS, eme_channels(img, blocks)
    row = [str(src), "input", "", "", "", "none", *(_fmt(v) for v in values)]
    if args.output:
        _metric_rows(Path(args.output), header, [row])
    else:
        print(",".join(header))
        print(",".join(row))
    return EXIT_OK


def _parse_fix(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise UsageError(f"--fix must look like lambda=0.58, got {text!r}")
    return name.strip(), float(value)


def cmd_sweep(args) -> int:
    if len(args.vary) != 2:
        raise UsageError("sweep needs exactly two --vary axes")
    cfg = _config(args, rooting=False)
    spec = SweepSpec(
        fixed=_parse_fix(args.fix),
        vary1=Axis.parse(args.vary[0]),
        vary2=Axis.parse(args.vary[1]),
        method=cfg.method,
        blocks=cfg.blocks,
    )
    manifest = Manifest("sweep", args)
    img = read_image(args.input)
    surface = sweep(img, spec, cfg, workers=args.threads, include_post=args.include_post)
    out = Path(args.output)
    with open(out, "w", newline="") as fh:
        surface.write_csv(fh)
    manifest.add("output.surface", out)
    for name, (v1, v2, best) in zip(surface.metric_names, surface.argmax()):
        line = f"argmax {name}: {spec.vary1.name}={v1:g} {spec.vary2.name}={v2:g} value={best:.6f}"
        print(line)
        manifest.add(f"argmax.{name}", f"{spec.vary1.name}={v1:g} {spec.vary2.name}={v2:g} value={best:.10g}")
    manifest.write(Path(args.manifest) if args.manifest else _default_sidecar(out, ".manifest.txt"))
    return EXIT_OK


def _parse_bounds(items) -> dict:
    bounds = {}
    for text in items or []:
        name, sep, rng = text.partition("=")
        lo, sep2, hi = rng.partition(":")
        if not (sep and sep2):
            raise UsageError(f"--bound must look like alpha=0.5:1, got {text!r}")
        bounds[name.strip()] = (float(lo), float(hi))
    return bounds


def cmd_optimize(args) -> int:
    cfg = _config(args, rooting=False)
    if cfg.method is not Method.QDFT:
        raise UsageError("optimize runs in qdft mode; use sweep for dft-channel")
    ga = GAConfig(
        population=args.population,
        generations=args.generations,
        crossover_rate=args.crossover,
        mutation_rate=args.mutation,
        mutation_sigma=args.sigma,
        elitism=args.elitism,
        rng_seed=args.seed,
    )
    manifest = Manifest("optimize", args)
    img = read_image(args.input)
    result = ga_optimize(img, _parse_bounds(args.bound), ga, cfg, args.include_post, workers=args.threads)
    out = Path(args.output)
    with open(out, "w", newline="") as fh:
        result.write_log(fh)
    p = result.params
    print(f"best alpha={p.alpha:.6f} beta={p.beta:.6f} lambda={p.lam:.6f} ceme={result.fitness:.6f}")
    manifest.add("rng_seed", args.seed)
    manifest.add("best.alpha", p.alpha)
    manifest.add("best.beta", p.beta)
    manifest.add("best.lambda", p.lam)
    manifest.add("best.ceme", result.fitness)
    manifest.add("evaluations", result.evaluations)
    manifest.add("output.log", out)
    manifest.write(Path(args.manifest) if args.manifest else _default_sidecar(out, ".manifest.txt"))
    return EXIT_OK


GENERATED = ("original", "qdft", "channel", "gamma", "log", "histeq")


def _spatial_only(img: RasterImage, post: PostTransform) -> RasterImage:
    lo, hi = float(img.data.min()), float(img.data.max())
    return RasterImage(rescale_planes(apply_scalar(img.data, post), lo, hi), img.color_model)


def cmd_compare(args) -> int:
    cfg = _config(args)
    manifest = Manifest("compare", args)
    img = read_image(args.input)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ext = "." + args.format

    qcfg = replace(cfg, method=Method.QDFT, rooting=_rooting(args, Method.QDFT), post_application=None)
    ccfg = replace(cfg, method=Method.DFT_CHANNEL, rooting=_rooting(args, Method.DFT_CHANNEL),
                   even_mode=EvenMode.ZERO, post_application=None)
    images = {
        "original": img,
        "qdft": run(img, qcfg).raster,
        "channel": run(img, ccfg).raster,
        "gamma": _spatial_only(img, PostTransform(PostKind.GAMMA, c=args.c, gamma=args.gamma)),
        "log": _spatial_only(img, PostTransform(PostKind.LOG, c=args.c, p=args.p)),
        "histeq": hist_equalize(img),
    }
    rooting_cells = {"qdft": _param_cells(qcfg.rooting), "channel": _param_cells(ccfg.rooting)}
    post_cells = {"qdft": cfg.post.describe(), "channel": cfg.post.describe(),
                  "gamma": f"gamma(c={args.c:g},gamma={args.gamma:g})",
                  "log": f"log(c={args.c:g},p={args.p:g})", "histeq": "histeq"}
    for name in GENERATED:
        path = outdir / f"{name}{ext}"
        write_image(images[name], path)
        manifest.add(f"output.{name}", path)

    generated = {f"{n}{ext}" for n in GENERATED}
    for extra in sorted(outdir.iterdir()):
        if extra.name in generated or extra.suffix.lower() not in (".ppm", ".png"):
            continue
        try:
            images[extra.stem] = read_image(extra)
        except (OSError, ImageFormatError) as exc:
            log.warning("skipping %s: %s", extra, exc)
            continue
        post_cells[extra.stem] = "external"
        manifest.add(f"input.external.{extra.stem}", extra)

    blocks = cfg.blocks
    rows = []
    for name, im in images.items():
        cells = [name, name if name in GENERATED else "external",
                 *rooting_cells.get(name, ["", "", ""]), post_cells.get(name, "none")]
        cells += [_fmt(raster_ceme(im, blocks)), *(_fmt(v) for v in eme_channels(im, blocks))]
        rows.append(cells)
    csv_path = outdir / "metrics.csv"
    _metric_rows(csv_path, HEAD + ["ceme"] + EME_COLS, rows)
    manifest.add("output.metrics", csv_path)
    manifest.write(outdir / "manifest.txt")
    print(f"wrote comparison bundle to {outdir}")
    return EXIT_OK


def cmd_histogram(args) -> int:
    img = read_image(args.input)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_histogram_csv(img, fh)
    else:
        write_histogram_csv(img, sys.stdout)
    return EXIT_OK


# --- entry point -----------------------------------------------------------


def _default_threads() -> int:
    raw = os.environ.get("QALPHA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qalpha", description="Quaternion alpha-rooting colour image enhancement")
    parser.add_argument("--version", action="version", version=f"qalpha {__version__}")
    parser.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads for sweeps and the GA (env QALPHA_THREADS)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enhance", help="enhance one image")
    p.add_argument("input")
    p.add_argument("output")
    _add_pipeline_args(p)
    p.add_argument("--metrics", help="metric CSV path (default: OUTPUT.metrics.csv)")
    p.add_argument("--manifest", help="manifest path (default: OUTPUT.manifest.txt)")
    p.add_argument("--save-quaternion", help="store the enhanced (e,R,G,B) planes as .npy")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("metric", help="CEME/EME of an image or stored quaternion planes")
    p.add_argument("input", help=".ppm/.png raster or .npy quaternion planes")
    p.add_argument("--measure", choices=["ceme", "eme"], default="eme")
    p.add_argument("--blocks", default="8x8")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("sweep", help="metric surface over two parameters")
    p.add_argument("input")
    p.add_argument("--fix", required=True, help="fixed parameter, e.g. lambda=0.58")
    p.add_argument("--vary", action="append", required=True, help="name:start:stop:step (twice)")
    p.add_argument("-o", "--output", required=True, help="surface CSV")
    p.add_argument("--include-post", action="store_true")
    p.add_argument("--manifest")
    _add_pipeline_args(p, rooting=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="GA search for (alpha, beta, lambda) maximising CEME")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="generation log CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--population", type=int, default=30)
    p.add_argument("--generations", type=int, default=40)
    p.add_argument("--crossover", type=float, default=0.9)
    p.add_argument("--mutation", type=float, default=0.15)
    p.add_argument("--sigma", type=float, default=0.05, help="mutation step as a fraction of bound width")
    p.add_argument("--elitism", type=int, default=2)
    p.add_argument("--bound", action="append", help="name=lo:hi, e.g. alpha=0.5:1")
    p.add_argument("--include-post", action="store_true")
    p.add_argument("--manifest")
    _add_pipeline_args(p, rooting=False)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compare", help="side-by-side bundle of enhancement methods")
    p.add_argument("input")
    p.add_argument("outdir")
    p.add_argument("--format", choices=["ppm", "png"], default="ppm")
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("histogram", help="256-bin per-channel histogram CSV")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_histogram)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qalpha {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ImageFormatError) as exc:
        print(f"qalpha {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PipelineError, SweepError, ArithmeticError) as exc:
        stage = getattr(exc, "stage", None)
        where = f" [{stage}]" if stage else ""
        print(f"qalpha {args.command}: numeric failure{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"qalpha {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
