"""PNG/JPEG boundary: decoding into image values and encoding results.

Pillow handles only the codec work; all processing stays on our own
types. EXIF orientation and color management are deliberately ignored.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from .raster import BinaryImage, GrayImage, RgbImage


def decode_image(data: bytes) -> RgbImage:
    with Image.open(io.BytesIO(data)) as im:
        rgb = im.convert("RGB")
        return RgbImage(np.asarray(rgb, dtype=np.uint8).copy())


def load_image(path) -> RgbImage:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def _to_pil(img) -> Image.Image:
    if isinstance(img, RgbImage):
        return Image.fromarray(np.asarray(img.pixels), mode="RGB")
    if isinstance(img, GrayImage):
        return Image.fromarray(np.asarray(img.pixels), mode="L")
    if isinstance(img, BinaryImage):
        return Image.fromarray(img.pixels.astype(np.uint8) * 255, mode="L")
    raise TypeError(f"cannot encode {type(img).__name__}")


def encode_png(img) -> bytes:
    buf = io.BytesIO()
    _to_pil(img).save(buf, format="PNG")
    return buf.getvalue()


def save_png(img, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(img))
