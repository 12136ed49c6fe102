"""Command-line interface.

The CLI is a thin client over the library (and optionally over a running
grainsight service): it parses flags, calls the pipeline and serializes
results. Exit codes: 0 success, 2 no canvas found, 1 I/O or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .binarize import AdaptiveParams
from .canvas import CanvasSpec, DegenerateROI, NoCanvasFound
from .codec import load_image, save_png
from .evaluate import combine_reports
from .overlay import render_overlay
from .pipeline import MedianPolicy, MinMaxPolicy, PipelineConfig, run_pipeline
from .report import emit_report
from .suite import run_scene
from .synth import SceneSpec, generate_scene


class CliParser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for NoCanvasFound
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def parse_canvas_mm(text: str) -> CanvasSpec:
    try:
        w, h = text.lower().split("x")
        return CanvasSpec(float(w), float(h))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(
            f"expected WIDTHxHEIGHT in mm (e.g. 200x150), got {text!r}"
        ) from exc


def parse_range(text: str):
    lo, hi = (float(v) for v in text.split(":"))
    return (lo, hi)


def parse_seeds(text: str):
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", choices=["minmax", "median"], default="minmax")
    p.add_argument("--measure", choices=["ellipse", "bbox"], default="ellipse",
                   dest="measure_method")
    p.add_argument("--block-size", type=int, default=51)
    p.add_argument("--offset-c", type=int, default=5)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--min-len-mm", type=float, default=4.0)
    p.add_argument("--max-len-mm", type=float, default=15.0)
    p.add_argument("--min-wid-mm", type=float, default=1.0)
    p.add_argument("--max-wid-mm", type=float, default=4.0)
    p.add_argument("--median-lower", type=float, default=0.5)
    p.add_argument("--median-upper", type=float, default=1.5)
    p.add_argument("--width-slack", type=float, default=2.0)


def config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        canvas=args.canvas_mm,
        sigma=args.sigma,
        adaptive=AdaptiveParams(block_size=args.block_size, offset_c=args.offset_c),
        policy=args.policy,
        minmax=MinMaxPolicy(args.min_len_mm, args.max_len_mm, args.min_wid_mm, args.max_wid_mm),
        median=MedianPolicy(args.median_lower, args.median_upper),
        width_slack=args.width_slack,
        measure_method=args.measure_method,
    )


def scene_spec_from_args(args, seed=None, ppmm=None) -> SceneSpec:
    return SceneSpec(
        seed=args.seed if seed is None else seed,
        canvas=args.canvas_mm,
        pixels_per_mm=args.ppmm if ppmm is None else ppmm,
        margin_px=args.margin_px,
        grain_count=args.grains,
        length_mm_range=args.len_range,
        width_mm_range=args.wid_range,
        lighting_gradient=args.lighting_gradient,
        contrast_noise=args.contrast_noise,
        shape=args.shape,
    )


def add_scene_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grains", type=int, default=12)
    p.add_argument("--ppmm", type=float, default=10.0)
    p.add_argument("--margin-px", type=int, default=40)
    p.add_argument("--len-range", type=parse_range, default=(8.3, 9.4),
                   help="grain length range in mm, LO:HI")
    p.add_argument("--wid-range", type=parse_range, default=(1.9, 2.1),
                   help="grain width range in mm, LO:HI")
    p.add_argument("--lighting-gradient", type=int, default=0)
    p.add_argument("--contrast-noise", type=float, default=0.0)
    p.add_argument("--shape", choices=["ellipse", "capsule"], default="ellipse")


def build_parser() -> CliParser:
    parser = CliParser(prog="grainsight",
                       description="Measure rice grains on a calibrated dark canvas.")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", parents=[], help="measure grains in an image")
    m.add_argument("--input", required=True)
    m.add_argument("--canvas-mm", type=parse_canvas_mm, required=True,
                   help="physical canvas size, WIDTHxHEIGHT in mm")
    m.add_argument("--out", help="write the report here instead of stdout")
    m.add_argument("--format", choices=["json", "csv"], default="json")
    m.add_argument("--overlay", help="write an annotated PNG here")
    m.add_argument("--server", help="POST the image to a running service instead "
                                    "of measuring in-process")
    add_pipeline_flags(m)

    s = sub.add_parser("synth", help="render a synthetic scene with ground truth")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--canvas-mm", type=parse_canvas_mm, default=CanvasSpec(200.0, 150.0))
    s.add_argument("--out", required=True, help="scene PNG path")
    s.add_argument("--truth", help="ground-truth JSON path")
    add_scene_flags(s)

    e = sub.add_parser("eval", help="measure generated scenes against ground truth")
    e.add_argument("--seeds", type=parse_seeds, default=list(range(1, 31)),
                   help="seed list, e.g. 1-30 or 1,2,9")
    e.add_argument("--ppmm-list", type=lambda t: [float(v) for v in t.split(",")],
                   default=None, help="cycle scenes through these scales")
    e.add_argument("--canvas-mm", type=parse_canvas_mm, default=CanvasSpec(200.0, 150.0))
    e.add_argument("--out")
    add_scene_flags(e)
    add_pipeline_flags(e)

    b = sub.add_parser("bench", help="per-stage pipeline timings")
    b.add_argument("--input", help="image to measure; default is a synthetic scene")
    b.add_argument("--canvas-mm", type=parse_canvas_mm, default=CanvasSpec(200.0, 150.0))
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--repeat", type=int, default=3)
    add_scene_flags(b)
    add_pipeline_flags(b)

    v = sub.add_parser("serve", help="run the HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8077)

    return parser


def apply_config_file(argv: list) -> list:
    """Expand --config FILE into its KEY=VALUE pairs as flags placed before
    the explicit arguments, so explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        sys.stderr.write("grainsight: error: --config needs a file path\n")
        sys.exit(1)
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        sys.stderr.write(f"grainsight: error: cannot read config: {exc}\n")
        sys.exit(1)
    injected = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        injected.extend([f"--{key.strip()}", value.strip()])
    # insert right after the subcommand token
    return rest[:1] + injected + rest[1:]


def _write_output(data: bytes, out_path) -> None:
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)


def cmd_measure(args) -> int:
    if args.server:
        return _measure_remote(args)
    try:
        img = load_image(args.input)
    except OSError as exc:
        sys.stderr.write(f"grainsight: cannot read {args.input}: {exc}\n")
        return 1
    try:
        report, _ = run_pipeline(img, config_from_args(args), image_name=args.input)
    except NoCanvasFound as exc:
        sys.stderr.write(f"grainsight: no canvas found: {exc}\n")
        return 2
    except DegenerateROI as exc:
        sys.stderr.write(f"grainsight: degenerate canvas region: {exc}\n")
        return 2
    for d in report.diagnostics:
        sys.stderr.write(f"grainsight: {d}\n")
    _write_output(emit_report(report, args.format), args.out)
    if args.overlay:
        save_png(render_overlay(img, report), args.overlay)
    return 0


def _measure_remote(args) -> int:
    import httpx

    try:
        with open(args.input, "rb") as fh:
            payload = fh.read()
    except OSError as exc:
        sys.stderr.write(f"grainsight: cannot read {args.input}: {exc}\n")
        return 1
    params = {
        "canvas_mm": f"{args.canvas_mm.width_mm}x{args.canvas_mm.height_mm}",
        "policy": args.policy,
        "measure": args.measure_method,
        "block_size": args.block_size,
        "offset_c": args.offset_c,
        "min_len_mm": args.min_len_mm,
        "max_len_mm": args.max_len_mm,
        "min_wid_mm": args.min_wid_mm,
        "max_wid_mm": args.max_wid_mm,
        "width_slack": args.width_slack,
    }
    resp = httpx.post(f"{args.server.rstrip('/')}/v1/measure", params=params,
                      content=payload, timeout=120.0)
    if resp.status_code == 422 and "no_canvas_found" in resp.text:
        sys.stderr.write("grainsight: no canvas found (remote)\n")
        return 2
    if resp.status_code != 200:
        sys.stderr.write(f"grainsight: service error {resp.status_code}: {resp.text}\n")
        return 1
    _write_output(resp.content, args.out)
    return 0


def cmd_synth(args) -> int:
    img, truth = generate_scene(scene_spec_from_args(args))
    save_png(img, args.out)
    if args.truth:
        doc = {
            "seed": args.seed,
            "pixels_per_mm": args.ppmm,
            "canvas_mm": [args.canvas_mm.width_mm, args.canvas_mm.height_mm],
            "canvas_box_px": [
                truth.canvas_box_px.x, truth.canvas_box_px.y,
                truth.canvas_box_px.w, truth.canvas_box_px.h,
            ],
            "grains": [
                {
                    "cx_px": g.center_px[0],
                    "cy_px": g.center_px[1],
                    "semi_major_px": g.semi_major_px,
                    "semi_minor_px": g.semi_minor_px,
                    "angle_deg": g.angle_deg,
                    "length_mm": g.length_mm,
                    "width_mm": g.width_mm,
                    "streaked": g.streaked,
                }
                for g in truth.grains
            ],
        }
        with open(args.truth, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_eval(args) -> int:
    ppmms = args.ppmm_list or [args.ppmm]
    config = config_from_args(args)
    reports = []
    for k, seed in enumerate(args.seeds):
        spec = scene_spec_from_args(args, seed=seed, ppmm=ppmms[k % len(ppmms)])
        _, ev, _ = run_scene(spec, replace(config, canvas=spec.canvas))
        reports.append(ev)
    total = combine_reports(reports)
    doc = {
        "scenes": len(args.seeds),
        "truth_count": total.truth_count,
        "detected_count": total.detected_count,
        "detection_rate": total.detection_rate,
        "false_positives": total.false_positives,
        "length_mae_mm": total.length_mae_mm,
        "width_mae_mm": total.width_mae_mm,
    }
    _write_output((json.dumps(doc, indent=2) + "\n").encode(), args.out)
    return 0


def cmd_bench(args) -> int:
    if args.input:
        img = load_image(args.input)
    else:
        img, _ = generate_scene(scene_spec_from_args(args))
    config = config_from_args(args)
    totals = {}
    for _ in range(args.repeat):
        _, timings = run_pipeline(img, config)
        for k, v in timings.items():
            totals[k] = totals.get(k, 0.0) + v
    for stage, secs in totals.items():
        print(f"{stage:>14s}  {1000 * secs / args.repeat:8.1f} ms")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = apply_config_file(argv)
    args = build_parser().parse_args(argv)
    handlers = {
        "measure": cmd_measure,
        "synth": cmd_synth,
        "eval": cmd_eval,
        "bench": cmd_bench,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
