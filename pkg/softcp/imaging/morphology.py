# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
morphology: Binary erosion, dilation, thresholding and connected components.

The structuring element is the fixed 3x3 square, so each dilation grows a region by one
Chebyshev ring. Pixels outside the frame read as 0 for both erosion and dilation.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage

from softcp._constants import BINARIZE_THRESHOLD
from softcp.imaging.raster import Box

STRUCTURING_ELEMENT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Component(object):
    support: np.ndarray
    box: Box
    area: int


@dataclass(frozen=True)
class ComponentSet(object):
    components: Tuple[Component, ...] = ()

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, index):
        return self.components[index]


def _as_mask(mask):
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError('Mask must be two dimensional, got shape {}'.format(mask.shape))
    return mask.astype(bool, copy=False)


def erode(mask):
    """Pixel is 1 iff its whole 3x3 neighborhood is 1 (out of frame reads 0)."""
    return ndimage.binary_erosion(_as_mask(mask), structure=STRUCTURING_ELEMENT, border_value=0)


def dilate(mask):
    """Pixel is 1 iff any pixel of its 3x3 neighborhood is 1."""
    return ndimage.binary_dilation(_as_mask(mask), structure=STRUCTURING_ELEMENT, border_value=0)


def binarize(soft, threshold=BINARIZE_THRESHOLD):
    """Pixel is 1 iff its weight is strictly above threshold."""
    if threshold <= 0:
        raise ValueError('Binarization threshold must be > 0, got {}'.format(threshold))
    return np.asarray(soft, dtype=np.float64) > threshold


def connected_components(mask, min_area=1):
    """
    Extract 8-connected foreground components.

    Args:
        mask (np.ndarray): binary mask.
        min_area (int): components with fewer pixels are dropped.

    Returns:
        components (ComponentSet): full-frame supports with tight boxes, in label order.
    """
    if min_area < 1:
        raise ValueError('min_area must be >= 1, got {}'.format(min_area))
    mask = _as_mask(mask)
    labeled, count = ndimage.label(mask, structure=STRUCTURING_ELEMENT)
    if not count:
        return ComponentSet()

    areas = np.bincount(labeled.ravel(), minlength=count + 1)
    result = []
    for label, extent in enumerate(ndimage.find_objects(labeled), start=1):
        area = int(areas[label])
        if area < min_area:
            continue
        rows, cols = extent
        box = Box(rows.start, cols.start, rows.stop - rows.start, cols.stop - cols.start)
        result.append(Component(support=labeled == label, box=box, area=area))
    return ComponentSet(tuple(result))
