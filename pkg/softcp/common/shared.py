# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
shared: Define shared data types(enums) used across imaging and operations.

"""

from enum import Enum


# pylint: disable=too-few-public-methods
class ResampleMode(Enum):
    """
    Interpolation used when resizing a raster.
    """
    bilinear = 'bilinear'
    nearest = 'nearest'


# pylint: disable=too-few-public-methods
class BlendModeType(Enum):
    """
    How a lesion patch is composited into a background.
    """
    soft = 'soft'
    hard = 'hard'
    gaussian = 'gaussian'
    poisson = 'poisson'


# pylint: disable=too-few-public-methods
class RigidType(Enum):
    """
    Object-level geometric transformation.
    """
    none = 'none'
    flip = 'flip'
    rotation = 'rotation'
    scaling = 'scaling'
    panning = 'panning'


# pylint: disable=too-few-public-methods
class IntensityType(Enum):
    """
    Intensity transformation applied to image samples only.
    """
    none = 'none'
    gamma = 'gamma'
    gaussian_noise = 'gaussian_noise'
    gaussian_blur = 'gaussian_blur'


# pylint: disable=too-few-public-methods
class FlipAxis(Enum):
    """
    Mirror axis of a flip. Horizontal mirrors columns, vertical mirrors rows.
    """
    horizontal = 'horizontal'
    vertical = 'vertical'


# pylint: disable=too-few-public-methods
class PlacementRejection(Enum):
    """
    Which anatomical constraint rejected a candidate offset.
    """
    reference = 'reference'
    lesion_overlap = 'lesion_overlap'


# pylint: disable=too-few-public-methods
class ViolationType(Enum):
    """
    Kind of problem found when re-validating a manifest.
    """
    reference = 'reference'
    lesion_overlap = 'lesion_overlap'
    mask_mismatch = 'mask_mismatch'
    missing_file = 'missing_file'
    bounds = 'bounds'
