"""Scene-suite execution: generate, measure and score batches of scenes."""

from __future__ import annotations

from dataclasses import replace

from .canvas import CanvasSpec
from .evaluate import EvalReport, combine_reports, evaluate
from .pipeline import PipelineConfig, run_pipeline
from .synth import SceneSpec, generate_scene


def run_scene(spec: SceneSpec, config: PipelineConfig = None):
    """Generate one scene, run the pipeline on it and score the result.

    Returns (run_report, eval_report, truth).
    """
    if config is None:
        config = PipelineConfig(canvas=spec.canvas)
    elif config.canvas != spec.canvas:
        config = replace(config, canvas=spec.canvas)
    img, truth = generate_scene(spec)
    report, _ = run_pipeline(img, config, image_name=f"synth(seed={spec.seed})")
    return report, evaluate(report.grains, truth), truth


def run_suite(specs: list, config: PipelineConfig = None) -> EvalReport:
    """Run a list of scene specs and aggregate their evaluation reports."""
    reports = []
    for spec in specs:
        _, ev, _ = run_scene(spec, config)
        reports.append(ev)
    return combine_reports(reports)
