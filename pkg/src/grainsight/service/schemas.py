"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class GrainOut(BaseModel):
    id: int
    length_mm: float
    width_mm: float
    angle_deg: float
    cx: float
    cy: float


class MeasureResponse(BaseModel):
    image: str
    canvas_mm: List[float]
    pixels_per_mm: float
    count: int
    measure_method: str
    grains: List[GrainOut]
    canvas_box_px: List[int]
    diagnostics: List[str]


class SynthRequest(BaseModel):
    seed: int = 0
    canvas_mm: List[float] = Field(default=[200.0, 150.0], min_length=2, max_length=2)
    pixels_per_mm: float = 10.0
    margin_px: int = 40
    grain_count: int = 12
    length_mm_range: List[float] = Field(default=[8.3, 9.4], min_length=2, max_length=2)
    width_mm_range: List[float] = Field(default=[1.9, 2.1], min_length=2, max_length=2)
    background_gray: int = 170
    canvas_gray: int = 35
    grain_gray: int = 70
    lighting_gradient: int = 0
    contrast_noise: float = 0.0
    shape: str = "ellipse"


class TruthGrainOut(BaseModel):
    cx_px: float
    cy_px: float
    semi_major_px: float
    semi_minor_px: float
    angle_deg: float
    length_mm: float
    width_mm: float
    streaked: bool


class SynthResponse(BaseModel):
    seed: int
    pixels_per_mm: float
    canvas_box_px: List[int]
    grains: List[TruthGrainOut]
    png_base64: str


class EvalRequest(BaseModel):
    seeds: List[int] = Field(default_factory=lambda: list(range(1, 31)))
    ppmm_list: List[float] = Field(default_factory=lambda: [10.0])
    canvas_mm: List[float] = Field(default=[200.0, 150.0], min_length=2, max_length=2)
    grain_count: int = 12
    length_mm_range: List[float] = Field(default=[8.3, 9.4], min_length=2, max_length=2)
    width_mm_range: List[float] = Field(default=[1.9, 2.1], min_length=2, max_length=2)
    lighting_gradient: int = 0
    policy: str = "minmax"
    measure: str = "ellipse"


class EvalResponse(BaseModel):
    scenes: int
    truth_count: int
    detected_count: int
    detection_rate: float
    false_positives: int
    length_mae_mm: float
    width_mae_mm: float


class MeasureOptions(BaseModel):
    """Query-parameter bundle for /v1/measure."""

    canvas_mm: str = Field(description="physical canvas size, e.g. 200x150")
    policy: str = "minmax"
    measure: str = "ellipse"
    block_size: int = 51
    offset_c: int = 5
    sigma: float = 1.0
    min_len_mm: float = 4.0
    max_len_mm: float = 15.0
    min_wid_mm: float = 1.0
    max_wid_mm: float = 4.0
    width_slack: float = 2.0
    median_lower: float = 0.5
    median_upper: float = 1.5
