"""8-bit image loading and saving (PNG, binary PGM/PPM)."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageIOError, InvalidInputError

_SAVE_FORMATS = {".png": "PNG", ".pgm": "PPM", ".ppm": "PPM", ".pnm": "PPM"}


def load_image(path) -> np.ndarray:
    """Read an 8-bit image as float64 in [0, 1] (samples divided by 255).

    Gray images come back as ``H x W``, colour images as ``H x W x 3``;
    an alpha channel is discarded.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("1", "L", "LA"):
                arr = np.asarray(im.convert("L"), dtype=np.float64)
            elif im.mode in ("RGB", "RGBA", "P", "CMYK", "YCbCr"):
                arr = np.asarray(im.convert("RGB"), dtype=np.float64)
            else:
                raise ImageIOError(f"{path}: unsupported image mode {im.mode!r} (8-bit only)")
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        raise ImageIOError(f"{path}: {exc.strerror or exc}") from exc
    except UnidentifiedImageError as exc:
        raise ImageIOError(f"{path}: not a readable image") from exc
    return arr / 255.0


def to_uint8(img) -> np.ndarray:
    """Quantize [0, 1] samples: round(255 * clamp(v, 0, 1))."""
    arr = np.asarray(img, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("cannot export non-finite samples")
    return np.round(255.0 * np.clip(arr, 0.0, 1.0)).astype(np.uint8)


def save_image(path, img) -> Path:
    """Write a plane or RGB tensor as 8-bit PNG/PGM/PPM, chosen by suffix."""
    path = Path(path)
    fmt = _SAVE_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise ImageIOError(f"{path}: unsupported output format {path.suffix!r}")
    data = to_uint8(img)
    if data.ndim == 3 and data.shape[2] == 1:
        data = data[:, :, 0]
    try:
        Image.fromarray(data).save(path, format=fmt)
    except OSError as exc:
        raise ImageIOError(f"{path}: {exc}") from exc
    return path
