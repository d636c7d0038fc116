# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
raster: Image, mask and label map primitives.

Conventions:
    image plane   float64 (H, W, C), C in {1, 3}, samples in [0, 1]
    binary mask   bool (H, W)
    soft mask     float64 (H, W), weights in [0, 1]
    label map     uint8 (H, W), class ids (0 = background)

Pixel values are normalized by the PNG depth maximum (255 or 65535). The [0, 1] float
convention is a choice of this tool; source slices carry no intensity calibration.

Bilinear resampling aligns sample positions to pixel centers: output index i reads the
source coordinate (i + 0.5) * n_in / n_out - 0.5, clamped to [0, n_in - 1]. Nearest
resampling reads floor((i + 0.5) * n_in / n_out).
"""

import zlib
from dataclasses import dataclass
from os.path import isfile

import numpy as np
import png
from knack.log import get_logger

from softcp.common.shared import ResampleMode

logger = get_logger(__name__)

SUPPORTED_BITDEPTHS = (8, 16)
SUPPORTED_PLANES = (1, 3)


@dataclass(frozen=True)
class Box(object):
    """Axis aligned rectangle in pixel coordinates."""
    top: int
    left: int
    height: int
    width: int

    @property
    def bottom(self):
        return self.top + self.height

    @property
    def right(self):
        return self.left + self.width

    def slices(self):
        return slice(self.top, self.bottom), slice(self.left, self.right)

    def fits(self, shape):
        height, width = shape[:2]
        return (self.height >= 1 and self.width >= 1 and self.top >= 0 and self.left >= 0
                and self.bottom <= height and self.right <= width)

    def expand(self, margin, shape):
        """Grow the box by margin on every side, clipped to a frame of the given shape."""
        height, width = shape[:2]
        top = max(0, self.top - margin)
        left = max(0, self.left - margin)
        bottom = min(height, self.bottom + margin)
        right = min(width, self.right + margin)
        return Box(top, left, bottom - top, right - left)

    def to_dict(self):
        return {'top': self.top, 'left': self.left, 'height': self.height, 'width': self.width}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d['top']), int(d['left']), int(d['height']), int(d['width']))


def to_image_plane(samples):
    """
    Validate and normalize an array into image plane layout.

    Args:
        samples (array-like): (H, W) or (H, W, C) samples in [0, 1].

    Returns:
        image (np.ndarray): float64 (H, W, C) copy.
    """
    image = np.array(samples, dtype=np.float64)
    if image.ndim == 2:
        image = image[:, :, np.newaxis]
    if image.ndim != 3 or image.shape[2] not in SUPPORTED_PLANES:
        raise ValueError('Image must be shaped (H, W, 1) or (H, W, 3), got {}'.format(image.shape))
    if image.size and (np.isnan(image).any() or image.min() < 0.0 or image.max() > 1.0):
        raise ValueError('Image samples must lie in [0, 1]')
    return image


def is_discrete(raster):
    """True for binary masks and label maps; they only accept nearest resampling."""
    return raster.dtype == np.bool_ or np.issubdtype(raster.dtype, np.integer)


def _read_png(path):
    if not isfile(path):
        raise IOError('File not found: {}'.format(path))
    try:
        with open(path, 'rb') as f:
            width, height, rows, info = png.Reader(file=f).asDirect()
            pixels = np.vstack([np.asarray(row, dtype=np.uint16) for row in rows])
    except (png.Error, zlib.error, ValueError, EOFError) as e:
        raise IOError('Corrupt PNG stream in {}: {}'.format(path, e))

    bitdepth = info['bitdepth']
    planes = info['planes']
    if bitdepth not in SUPPORTED_BITDEPTHS:
        raise IOError('Unsupported bit depth {} in {}; expected 8 or 16'.format(bitdepth, path))
    if info.get('alpha') or planes not in SUPPORTED_PLANES:
        raise IOError('Unsupported color type in {}; expected grayscale or RGB without alpha'.format(path))
    return pixels.reshape(height, width, planes), bitdepth


def read_png_size(path):
    """Return (height, width) from the PNG header without decoding pixel data."""
    if not isfile(path):
        raise IOError('File not found: {}'.format(path))
    try:
        with open(path, 'rb') as f:
            reader = png.Reader(file=f)
            reader.preamble()
            return reader.height, reader.width
    except (png.Error, zlib.error, EOFError) as e:
        raise IOError('Corrupt PNG stream in {}: {}'.format(path, e))


def load_image(path):
    """
    Read an 8-bit or 16-bit grayscale/RGB PNG as an image plane.

    Args:
        path (str): PNG file path.

    Returns:
        image (np.ndarray): float64 (H, W, C) normalized by the depth maximum.
    """
    pixels, bitdepth = _read_png(path)
    return pixels.astype(np.float64) / float(2 ** bitdepth - 1)


def save_image(path, image, bitdepth=8):
    """Write an image plane as grayscale or RGB PNG, rounding to the nearest level."""
    if bitdepth not in SUPPORTED_BITDEPTHS:
        raise ValueError('Output bit depth must be 8 or 16, got {}'.format(bitdepth))
    image = to_image_plane(image)
    height, width, planes = image.shape
    levels = np.rint(image * (2 ** bitdepth - 1)).astype(np.uint16)
    writer = png.Writer(width=width, height=height, greyscale=planes == 1, bitdepth=bitdepth)
    with open(path, 'wb') as f:
        writer.write(f, levels.reshape(height, width * planes).tolist())


def _class_lookup(class_config):
    lookup = np.full(256, -1, dtype=np.int16)
    for value, class_id in class_config.items():
        value, class_id = int(value), int(class_id)
        if not 0 <= value <= 255 or not 0 <= class_id <= 255:
            raise ValueError('Class mapping {} -> {} outside 0..255'.format(value, class_id))
        lookup[value] = class_id
    return lookup


def load_label_map(path, class_config):
    """
    Read an 8-bit single-channel PNG and map its pixel values to class ids.

    Args:
        path (str): PNG file path.
        class_config (dict): pixel value -> class id.

    Returns:
        labels (np.ndarray): uint8 (H, W).
    """
    pixels, bitdepth = _read_png(path)
    if bitdepth != 8 or pixels.shape[2] != 1:
        raise IOError('Label map {} must be an 8-bit single-channel PNG'.format(path))
    pixels = pixels[:, :, 0]
    mapped = _class_lookup(class_config)[pixels]
    undeclared = mapped < 0
    if undeclared.any():
        row, col = np.argwhere(undeclared)[0]
        raise ValueError('Undeclared label value {} at ({}, {}) in {}'.format(
            int(pixels[row, col]), int(row), int(col), path))
    return mapped.astype(np.uint8)


def save_label_map(path, labels, class_config):
    """Write a label map back to pixel values through the inverse of class_config."""
    inverse = np.zeros(256, dtype=np.uint8)
    known = np.zeros(256, dtype=bool)
    for value, class_id in sorted((int(v), int(c)) for v, c in class_config.items()):
        if not known[class_id]:
            inverse[class_id] = value
            known[class_id] = True
    labels = np.asarray(labels)
    present = np.unique(labels)
    missing = [int(c) for c in present if not known[c]]
    if missing:
        raise ValueError('Classes {} have no pixel value in the class configuration'.format(missing))
    height, width = labels.shape
    writer = png.Writer(width=width, height=height, greyscale=True, bitdepth=8)
    with open(path, 'wb') as f:
        writer.write(f, inverse[labels].tolist())


def extract_patch(raster, box):
    """Return a copy of the sub-grid covered by box."""
    if not box.fits(raster.shape):
        raise ValueError('Box {} lies outside a {}x{} raster'.format(box, raster.shape[0], raster.shape[1]))
    rows, cols = box.slices()
    return raster[rows, cols].copy()


def _nearest_index(n_in, n_out):
    index = np.floor((np.arange(n_out) + 0.5) * n_in / n_out).astype(np.intp)
    return np.minimum(index, n_in - 1)


def _linear_coords(n_in, n_out):
    coords = (np.arange(n_out) + 0.5) * n_in / n_out - 0.5
    coords = np.clip(coords, 0.0, n_in - 1)
    lower = np.floor(coords).astype(np.intp)
    upper = np.minimum(lower + 1, n_in - 1)
    return lower, upper, coords - lower


def resample(raster, new_h, new_w, mode=ResampleMode.bilinear):
    """
    Resize a raster to (new_h, new_w).

    Args:
        raster (np.ndarray): image plane, soft mask, binary mask or label map.
        new_h (int): output height.
        new_w (int): output width.
        mode (ResampleMode|str): bilinear or nearest; masks and label maps take nearest only.

    Returns:
        resized (np.ndarray): same dtype and trailing dimensions as the input.
    """
    mode = ResampleMode(mode)
    if new_h < 1 or new_w < 1:
        raise ValueError('Output size must be at least 1x1, got {}x{}'.format(new_h, new_w))
    if mode is ResampleMode.bilinear and is_discrete(raster):
        raise ValueError('Binary masks and label maps only accept nearest resampling')

    height, width = raster.shape[:2]
    if (height, width) == (new_h, new_w):
        return raster.copy()

    if mode is ResampleMode.nearest:
        return raster[np.ix_(_nearest_index(height, new_h), _nearest_index(width, new_w))].copy()

    trailing = (1,) * (raster.ndim - 1)
    r0, r1, fr = _linear_coords(height, new_h)
    fr = fr.reshape((-1,) + trailing)
    rows = raster[r0] * (1.0 - fr) + raster[r1] * fr

    c0, c1, fc = _linear_coords(width, new_w)
    fc = fc.reshape((1, -1) + trailing[1:])
    return rows[:, c0] * (1.0 - fc) + rows[:, c1] * fc
