"""grainsight: rice grain counting and size measurement from photographs
of a dark reference canvas with known physical dimensions."""

from .binarize import (
    AdaptiveParams,
    adaptive_threshold,
    apply_global_threshold,
    histogram256,
    otsu_threshold,
)
from .canvas import (
    CalibrationScale,
    CanvasDetectParams,
    CanvasSpec,
    DegenerateROI,
    NoCanvasFound,
    RegionOfInterest,
    calibrate,
    crop_roi,
    detect_canvas,
)
from .codec import decode_image, encode_png, load_image, save_png
from .contours import (
    BoundingBox,
    Contour,
    Polygon,
    approx_polygon,
    bounding_box,
    box_contains,
    contour_area,
    extract_contours,
    fill_contour,
)
from .evaluate import EvalReport, evaluate
from .measure import (
    DegenerateContour,
    FittedEllipse,
    GrainMeasurement,
    fit_ellipse,
    measure_bbox,
    measure_ellipse,
)
from .overlay import render_overlay
from .pipeline import (
    GrainCandidate,
    MedianPolicy,
    MinMaxPolicy,
    PipelineConfig,
    filter_median,
    filter_minmax,
    remove_subcontours,
    run_pipeline,
    segment_grains,
)
from .raster import BinaryImage, GrayImage, RgbImage, gaussian_blur_5x5, to_grayscale
from .report import RunReport, emit_report, parse_report
from .suite import run_scene, run_suite
from .synth import (
    GroundTruth,
    GroundTruthGrain,
    PlacementOverflow,
    SceneSpec,
    SplitMix64,
    generate_scene,
)

__version__ = "0.1.0"
