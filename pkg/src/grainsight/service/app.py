"""FastAPI service wrapping the measurement pipeline.

Endpoints:
  GET  /health              liveness probe
  POST /v1/measure          raw PNG/JPEG body + query params -> measurement report
  POST /v1/synth            scene spec -> ground truth + base64 PNG
  POST /v1/eval             batch scene spec -> detection/accuracy metrics
"""

from __future__ import annotations

import base64

from fastapi import Body, Depends, FastAPI, HTTPException

from .. import __version__
from ..binarize import AdaptiveParams
from ..canvas import CanvasSpec, DegenerateROI, NoCanvasFound
from ..codec import decode_image, encode_png
from ..evaluate import combine_reports
from ..pipeline import MedianPolicy, MinMaxPolicy, PipelineConfig, run_pipeline
from ..report import report_to_dict
from ..suite import run_scene
from ..synth import PlacementOverflow, SceneSpec, generate_scene
from .schemas import (
    EvalRequest,
    EvalResponse,
    HealthResponse,
    MeasureOptions,
    MeasureResponse,
    SynthRequest,
    SynthResponse,
    TruthGrainOut,
)


def _parse_canvas(text: str) -> CanvasSpec:
    try:
        w, h = text.lower().split("x")
        return CanvasSpec(float(w), float(h))
    except (ValueError, TypeError):
        raise HTTPException(
            status_code=422,
            detail=f"canvas_mm must look like 200x150, got {text!r}",
        )


def _pipeline_config(opts: MeasureOptions) -> PipelineConfig:
    if opts.policy not in ("minmax", "median"):
        raise HTTPException(status_code=422, detail="policy must be minmax or median")
    if opts.measure not in ("ellipse", "bbox"):
        raise HTTPException(status_code=422, detail="measure must be ellipse or bbox")
    try:
        return PipelineConfig(
            canvas=_parse_canvas(opts.canvas_mm),
            sigma=opts.sigma,
            adaptive=AdaptiveParams(block_size=opts.block_size, offset_c=opts.offset_c),
            policy=opts.policy,
            minmax=MinMaxPolicy(opts.min_len_mm, opts.max_len_mm, opts.min_wid_mm, opts.max_wid_mm),
            median=MedianPolicy(opts.median_lower, opts.median_upper),
            width_slack=opts.width_slack,
            measure_method=opts.measure,
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


def _scene_spec(req: SynthRequest) -> SceneSpec:
    try:
        return SceneSpec(
            seed=req.seed,
            canvas=CanvasSpec(req.canvas_mm[0], req.canvas_mm[1]),
            pixels_per_mm=req.pixels_per_mm,
            margin_px=req.margin_px,
            grain_count=req.grain_count,
            length_mm_range=tuple(req.length_mm_range),
            width_mm_range=tuple(req.width_mm_range),
            background_gray=req.background_gray,
            canvas_gray=req.canvas_gray,
            grain_gray=req.grain_gray,
            lighting_gradient=req.lighting_gradient,
            contrast_noise=req.contrast_noise,
            shape=req.shape,
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


def create_app() -> FastAPI:
    app = FastAPI(title="grainsight", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(version=__version__)

    @app.post("/v1/measure", response_model=MeasureResponse)
    def measure(
        opts: MeasureOptions = Depends(),
        image: bytes = Body(..., media_type="application/octet-stream"),
    ):
        config = _pipeline_config(opts)
        try:
            img = decode_image(image)
        except Exception:
            raise HTTPException(status_code=422, detail="body is not a decodable PNG/JPEG image")
        try:
            report, _ = run_pipeline(img, config, image_name="<upload>")
        except NoCanvasFound as exc:
            raise HTTPException(status_code=422, detail=f"no_canvas_found: {exc}")
        except DegenerateROI as exc:
            raise HTTPException(status_code=422, detail=f"degenerate_roi: {exc}")
        return MeasureResponse(**report_to_dict(report))

    @app.post("/v1/synth", response_model=SynthResponse)
    def synth(req: SynthRequest):
        spec = _scene_spec(req)
        try:
            img, truth = generate_scene(spec)
        except PlacementOverflow as exc:
            raise HTTPException(status_code=422, detail=f"placement_overflow: {exc}")
        return SynthResponse(
            seed=req.seed,
            pixels_per_mm=req.pixels_per_mm,
            canvas_box_px=[
                truth.canvas_box_px.x, truth.canvas_box_px.y,
                truth.canvas_box_px.w, truth.canvas_box_px.h,
            ],
            grains=[
                TruthGrainOut(
                    cx_px=g.center_px[0], cy_px=g.center_px[1],
                    semi_major_px=g.semi_major_px, semi_minor_px=g.semi_minor_px,
                    angle_deg=g.angle_deg, length_mm=g.length_mm,
                    width_mm=g.width_mm, streaked=g.streaked,
                )
                for g in truth.grains
            ],
            png_base64=base64.b64encode(encode_png(img)).decode("ascii"),
        )

    @app.post("/v1/eval", response_model=EvalResponse)
    def evaluate_batch(req: EvalRequest):
        if not req.seeds:
            raise HTTPException(status_code=422, detail="seeds must be non-empty")
        canvas = CanvasSpec(req.canvas_mm[0], req.canvas_mm[1])
        config = PipelineConfig(canvas=canvas, policy=req.policy, measure_method=req.measure)
        reports = []
        for k, seed in enumerate(req.seeds):
            spec = SceneSpec(
                seed=seed,
                canvas=canvas,
                pixels_per_mm=req.ppmm_list[k % len(req.ppmm_list)],
                grain_count=req.grain_count,
                length_mm_range=tuple(req.length_mm_range),
                width_mm_range=tuple(req.width_mm_range),
                lighting_gradient=req.lighting_gradient,
            )
            try:
                _, ev, _ = run_scene(spec, config)
            except PlacementOverflow as exc:
                raise HTTPException(status_code=422, detail=f"placement_overflow: {exc}")
            reports.append(ev)
        total = combine_reports(reports)
        return EvalResponse(
            scenes=len(req.seeds),
            truth_count=total.truth_count,
            detected_count=total.detected_count,
            detection_rate=total.detection_rate,
            false_positives=total.false_positives,
            length_mae_mm=total.length_mae_mm,
            width_mae_mm=total.width_mae_mm,
        )

    return app
