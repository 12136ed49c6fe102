"""Run reports and their JSON/CSV serialization.

Serialization is byte-stable: identical reports always produce identical
bytes, which the end-to-end determinism checks rely on.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .contours import BoundingBox
from .measure import FittedEllipse, GrainMeasurement

CSV_HEADER = "id,length_mm,width_mm,angle_deg,cx,cy"


@dataclass(frozen=True)
class RunReport:
    """Measurement result of one image: scale, grains and diagnostics."""

    image: str
    canvas_mm: tuple
    pixels_per_mm: float
    grains: list
    canvas_box_px: BoundingBox
    diagnostics: list = field(default_factory=list)
    measure_method: str = "ellipse"

    @property
    def grain_count(self) -> int:
        return len(self.grains)


def report_to_dict(report: RunReport) -> dict:
    return {
        "image": report.image,
        "canvas_mm": [report.canvas_mm[0], report.canvas_mm[1]],
        "pixels_per_mm": report.pixels_per_mm,
        "count": report.grain_count,
        "measure_method": report.measure_method,
        "grains": [
            {
                "id": g.id,
                "length_mm": g.length_mm,
                "width_mm": g.width_mm,
                "angle_deg": g.ellipse.angle_deg,
                "cx": g.centroid_full_px[0],
                "cy": g.centroid_full_px[1],
            }
            for g in report.grains
        ],
        "canvas_box_px": [
            report.canvas_box_px.x,
            report.canvas_box_px.y,
            report.canvas_box_px.w,
            report.canvas_box_px.h,
        ],
        "diagnostics": list(report.diagnostics),
    }


def emit_report(report: RunReport, format: str = "json") -> bytes:
    """Serialize a report. JSON keeps full float precision; CSV rounds to
    two decimals matching the printed tables."""
    if format == "json":
        return (json.dumps(report_to_dict(report), indent=2) + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for g in report.grains:
            buf.write(
                f"{g.id},{g.length_mm:.2f},{g.width_mm:.2f},"
                f"{g.ellipse.angle_deg:.2f},{g.centroid_full_px[0]:.2f},{g.centroid_full_px[1]:.2f}\n"
            )
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format: {format}")


def parse_report(data: bytes) -> RunReport:
    """Inverse of the JSON emitter at schema level: re-emitting the parsed
    report reproduces the input bytes."""
    d = json.loads(data.decode("utf-8"))
    ppmm = d["pixels_per_mm"]
    grains = []
    for g in d["grains"]:
        major = g["length_mm"] * ppmm
        minor = g["width_mm"] * ppmm
        grains.append(
            GrainMeasurement(
                id=g["id"],
                length_mm=g["length_mm"],
                width_mm=g["width_mm"],
                ellipse=FittedEllipse(
                    center=(g["cx"], g["cy"]),
                    major_px=major,
                    minor_px=minor,
                    angle_deg=g["angle_deg"],
                ),
                centroid_full_px=(g["cx"], g["cy"]),
                method=d.get("measure_method", "ellipse"),
            )
        )
    bx = d["canvas_box_px"]
    return RunReport(
        image=d["image"],
        canvas_mm=(d["canvas_mm"][0], d["canvas_mm"][1]),
        pixels_per_mm=ppmm,
        grains=grains,
        canvas_box_px=BoundingBox(bx[0], bx[1], bx[2], bx[3]),
        diagnostics=list(d["diagnostics"]),
        measure_method=d.get("measure_method", "ellipse"),
    )
