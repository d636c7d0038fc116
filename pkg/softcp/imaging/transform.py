# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
transform: Object-level and image-level augmentation.

An object-level pipeline is two rigid kinds and two intensity kinds, each drawn uniformly
with replacement from its list, with parameters bound uniformly from configured ranges,
then shuffled into a random order. Image-level pipelines optionally crop, always resize to
the output size and then apply intensity kinds to the image only.

Panning offsets (RigidKind.dr, RigidKind.dc) are stored as fractions of the patch height and
width, not pixels. They are rounded to whole pixels when applied:
rows = round(dr * h), cols = round(dc * w).
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from knack.log import get_logger
from scipy import ndimage

from softcp.common.shared import FlipAxis, IntensityType, ResampleMode, RigidType
from softcp.imaging.raster import Box, extract_patch, resample

logger = get_logger(__name__)

RIGID_KINDS = (RigidType.none, RigidType.flip, RigidType.rotation, RigidType.scaling, RigidType.panning)
INTENSITY_KINDS = (IntensityType.none, IntensityType.gamma, IntensityType.gaussian_noise,
                   IntensityType.gaussian_blur)
FLIP_AXES = (FlipAxis.horizontal, FlipAxis.vertical)


class LesionVanishedError(ValueError):
    """A rigid transform left the lesion mask without foreground."""


class ReferenceCroppedError(ValueError):
    """An image-level crop removed every reference-substance pixel."""


def _pair(value):
    low, high = (float(v) for v in value)
    if low > high:
        raise ValueError('Range [{}, {}] is empty'.format(low, high))
    return low, high


@dataclass(frozen=True)
class RigidKind(object):
    kind: RigidType = RigidType.none
    axis: Optional[FlipAxis] = None
    angle: float = 0.0
    factor: float = 1.0
    dr: float = 0.0
    dc: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', RigidType(self.kind))
        if self.axis is not None:
            object.__setattr__(self, 'axis', FlipAxis(self.axis))
        if self.kind is RigidType.flip and self.axis is None:
            raise ValueError('flip requires an axis')
        if self.factor <= 0:
            raise ValueError('scaling factor must be > 0, got {}'.format(self.factor))
        if not -180.0 <= self.angle <= 180.0:
            raise ValueError('rotation angle must lie in [-180, 180], got {}'.format(self.angle))

    def to_dict(self):
        result = {'type': 'rigid', 'kind': self.kind.value}
        if self.kind is RigidType.flip:
            result['axis'] = self.axis.value
        elif self.kind is RigidType.rotation:
            result['angle'] = self.angle
        elif self.kind is RigidType.scaling:
            result['factor'] = self.factor
        elif self.kind is RigidType.panning:
            result['dr'] = self.dr
            result['dc'] = self.dc
        return result


@dataclass(frozen=True)
class IntensityKind(object):
    kind: IntensityType = IntensityType.none
    gamma: float = 1.0
    sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', IntensityType(self.kind))
        if self.gamma <= 0:
            raise ValueError('gamma must be > 0, got {}'.format(self.gamma))
        if self.sigma < 0:
            raise ValueError('sigma must be >= 0, got {}'.format(self.sigma))

    def to_dict(self):
        result = {'type': 'intensity', 'kind': self.kind.value}
        if self.kind is IntensityType.gamma:
            result['gamma'] = self.gamma
        elif self.kind in (IntensityType.gaussian_noise, IntensityType.gaussian_blur):
            result['sigma'] = self.sigma
        return result


def step_from_dict(d):
    d = dict(d)
    step_type = d.pop('type')
    if step_type == 'rigid':
        return RigidKind(**d)
    if step_type == 'intensity':
        return IntensityKind(**d)
    raise ValueError('Unknown transform step type "{}"'.format(step_type))


@dataclass(frozen=True)
class TransformRanges(object):
    """Uniform sampling ranges. The defaults are documented choices, not calibrated values."""
    rotation: Tuple[float, float] = (-30.0, 30.0)
    scale: Tuple[float, float] = (0.8, 1.25)
    pan: float = 0.1
    gamma: Tuple[float, float] = (0.7, 1.5)
    noise_sigma: Tuple[float, float] = (0.0, 0.05)
    blur_sigma: Tuple[float, float] = (0.0, 1.5)

    def __post_init__(self):
        for name in ('rotation', 'scale', 'gamma', 'noise_sigma', 'blur_sigma'):
            object.__setattr__(self, name, _pair(getattr(self, name)))
        if self.scale[0] <= 0 or self.gamma[0] <= 0:
            raise ValueError('scale and gamma ranges must be positive')
        if self.noise_sigma[0] < 0 or self.blur_sigma[0] < 0 or self.pan < 0:
            raise ValueError('sigma and pan ranges must be non-negative')
        if self.rotation[0] < -180 or self.rotation[1] > 180:
            raise ValueError('rotation range must lie within [-180, 180]')

    def to_dict(self):
        return {'rotation': list(self.rotation), 'scale': list(self.scale), 'pan': self.pan,
                'gamma': list(self.gamma), 'noise_sigma': list(self.noise_sigma),
                'blur_sigma': list(self.blur_sigma)}

    @classmethod
    def from_dict(cls, d):
        defaults = cls()
        return cls(rotation=d.get('rotation', defaults.rotation),
                   scale=d.get('scale', defaults.scale),
                   pan=float(d.get('pan', defaults.pan)),
                   gamma=d.get('gamma', defaults.gamma),
                   noise_sigma=d.get('noise_sigma', defaults.noise_sigma),
                   blur_sigma=d.get('blur_sigma', defaults.blur_sigma))


@dataclass(frozen=True)
class ImageLevelRanges(object):
    crop_probability: float = 0.5
    crop_scale: Tuple[float, float] = (0.7, 1.0)
    intensity: TransformRanges = field(default_factory=TransformRanges)
    final_pass: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'crop_scale', _pair(self.crop_scale))
        if not 0.0 <= self.crop_probability <= 1.0:
            raise ValueError('crop_probability must lie in [0, 1]')
        if self.crop_scale[0] <= 0 or self.crop_scale[1] > 1:
            raise ValueError('crop_scale must lie in (0, 1]')

    def to_dict(self):
        result = self.intensity.to_dict()
        result.update({'crop_probability': self.crop_probability, 'crop_scale': list(self.crop_scale),
                       'final_pass': self.final_pass})
        return result

    @classmethod
    def from_dict(cls, d):
        defaults = cls()
        return cls(crop_probability=float(d.get('crop_probability', defaults.crop_probability)),
                   crop_scale=d.get('crop_scale', defaults.crop_scale),
                   intensity=TransformRanges.from_dict(d),
                   final_pass=bool(d.get('final_pass', defaults.final_pass)))


@dataclass(frozen=True)
class TransformPipeline(object):
    steps: tuple = ()

    def to_list(self):
        return [step.to_dict() for step in self.steps]

    @classmethod
    def from_list(cls, steps):
        return cls(tuple(step_from_dict(s) for s in steps))


@dataclass(frozen=True)
class ImageLevelPipeline(object):
    crop: Optional[Box] = None
    steps: tuple = ()

    def to_dict(self):
        return {'crop': self.crop.to_dict() if self.crop else None,
                'steps': [step.to_dict() for step in self.steps]}

    @classmethod
    def from_dict(cls, d):
        crop = d.get('crop')
        return cls(crop=Box.from_dict(crop) if crop else None,
                   steps=tuple(step_from_dict(s) for s in d.get('steps', [])))


def _sample_rigid(rng, ranges):
    kind = RIGID_KINDS[rng.integers(len(RIGID_KINDS))]
    if kind is RigidType.flip:
        return RigidKind(kind, axis=FLIP_AXES[rng.integers(len(FLIP_AXES))])
    if kind is RigidType.rotation:
        return RigidKind(kind, angle=float(rng.uniform(*ranges.rotation)))
    if kind is RigidType.scaling:
        return RigidKind(kind, factor=float(rng.uniform(*ranges.scale)))
    if kind is RigidType.panning:
        return RigidKind(kind, dr=float(rng.uniform(-ranges.pan, ranges.pan)),
                         dc=float(rng.uniform(-ranges.pan, ranges.pan)))
    return RigidKind(kind)


def _sample_intensity(rng, ranges):
    kind = INTENSITY_KINDS[rng.integers(len(INTENSITY_KINDS))]
    if kind is IntensityType.gamma:
        return IntensityKind(kind, gamma=float(rng.uniform(*ranges.gamma)))
    if kind is IntensityType.gaussian_noise:
        return IntensityKind(kind, sigma=float(rng.uniform(*ranges.noise_sigma)))
    if kind is IntensityType.gaussian_blur:
        return IntensityKind(kind, sigma=float(rng.uniform(*ranges.blur_sigma)))
    return IntensityKind(kind)


def sample_object_pipeline(rng, ranges):
    """
    Draw 2 rigid and 2 intensity kinds with replacement and interleave them randomly.

    Args:
        rng (np.random.Generator): per-sample random stream.
        ranges (TransformRanges): parameter ranges.

    Returns:
        pipeline (TransformPipeline): four steps in application order.
    """
    steps = [_sample_rigid(rng, ranges) for _ in range(2)]
    steps += [_sample_intensity(rng, ranges) for _ in range(2)]
    order = rng.permutation(len(steps))
    return TransformPipeline(tuple(steps[i] for i in order))


def sample_image_pipeline(rng, ranges, shape):
    """Optional crop (kept aspect) followed by two intensity kinds drawn with replacement."""
    height, width = shape[:2]
    crop = None
    if rng.random() < ranges.crop_probability:
        fraction = float(rng.uniform(*ranges.crop_scale))
        crop_h = max(1, int(round(height * fraction)))
        crop_w = max(1, int(round(width * fraction)))
        top = int(rng.integers(0, height - crop_h + 1))
        left = int(rng.integers(0, width - crop_w + 1))
        crop = Box(top, left, crop_h, crop_w)
    steps = tuple(_sample_intensity(rng, ranges.intensity) for _ in range(2))
    return ImageLevelPipeline(crop=crop, steps=steps)


def sample_final_pipeline(rng, ranges):
    """Intensity-only pass for the composite; geometry would desynchronize recorded offsets."""
    return ImageLevelPipeline(steps=tuple(_sample_intensity(rng, ranges.intensity) for _ in range(2)))


def rotated_frame(height, width, angle):
    """Smallest (h', w') holding an h x w frame rotated by angle degrees."""
    theta = math.radians(angle)
    cos, sin = abs(math.cos(theta)), abs(math.sin(theta))
    return (max(1, int(math.ceil(height * cos + width * sin - 1e-9))),
            max(1, int(math.ceil(height * sin + width * cos - 1e-9))))


def _rotate(raster, angle, order, mode):
    height, width = raster.shape[:2]
    out_h, out_w = rotated_frame(height, width, angle)
    theta = math.radians(angle)
    cos, sin = math.cos(theta), math.sin(theta)
    rotation = np.array([[cos, sin], [-sin, cos]])
    center_in = np.array([(height - 1) / 2.0, (width - 1) / 2.0])
    center_out = np.array([(out_h - 1) / 2.0, (out_w - 1) / 2.0])
    offset = center_in - rotation @ center_out
    out_shape = (out_h, out_w) + raster.shape[2:]
    if raster.ndim == 3:
        matrix = np.eye(3)
        matrix[:2, :2] = rotation
        offset = np.append(offset, 0.0)
    else:
        matrix = rotation
    return ndimage.affine_transform(raster, matrix, offset=offset, output_shape=out_shape, order=order,
                                    mode=mode, cval=0.0)


def _shift(raster, rows, cols):
    shifts = (rows, cols) + (0,) * (raster.ndim - 2)
    return ndimage.shift(raster, shifts, order=0, mode='constant', cval=0)


def apply_rigid(patch, mask, t):
    """
    Apply a rigid transform about the patch center: bilinear for the image, nearest for the mask.

    Rotation and scaling change the frame. Rotations by other than quarter turns land in the
    bounding frame of the rotated patch; image samples outside the source replicate its edge.

    Args:
        patch (np.ndarray): image plane (h, w, C).
        mask (np.ndarray): binary mask (h, w).
        t (RigidKind): transform.

    Returns:
        (patch, mask): transformed copies sharing the new (h', w').
    """
    mask = np.asarray(mask, dtype=bool)
    if patch.shape[:2] != mask.shape:
        raise ValueError('Patch {} and mask {} differ in size'.format(patch.shape[:2], mask.shape))
    height, width = mask.shape

    if t.kind is RigidType.flip:
        axis = 1 if t.axis is FlipAxis.horizontal else 0
        out_patch, out_mask = np.flip(patch, axis=axis).copy(), np.flip(mask, axis=axis).copy()
    elif t.kind is RigidType.rotation and t.angle % 90 == 0:
        quarter = int(round(t.angle / 90.0)) % 4
        out_patch = np.rot90(patch, quarter, axes=(0, 1)).copy()
        out_mask = np.rot90(mask, quarter).copy()
    elif t.kind is RigidType.rotation:
        out_patch = np.clip(_rotate(patch, t.angle, order=1, mode='nearest'), 0.0, 1.0)
        out_mask = _rotate(mask.astype(np.uint8), t.angle, order=0, mode='constant') > 0
    elif t.kind is RigidType.scaling:
        new_h = max(1, int(round(height * t.factor)))
        new_w = max(1, int(round(width * t.factor)))
        out_patch = resample(patch, new_h, new_w, ResampleMode.bilinear)
        out_mask = resample(mask, new_h, new_w, ResampleMode.nearest)
    elif t.kind is RigidType.panning:
        rows, cols = int(round(t.dr * height)), int(round(t.dc * width))
        out_patch = _shift(patch, rows, cols)
        out_mask = _shift(mask.astype(np.uint8), rows, cols) > 0
    else:
        out_patch, out_mask = patch.copy(), mask.copy()

    if mask.any() and not out_mask.any():
        raise LesionVanishedError('{} left the lesion mask empty'.format(t.to_dict()))
    return out_patch, out_mask


def apply_intensity(patch, t, rng=None):
    """
    Apply an intensity transform to image samples.

    gamma: out = in ** g. noise: clamp(in + N(0, sigma)). blur: normalized Gaussian over the
    two spatial axes with replicate padding and radius ceil(3 sigma).
    """
    if t.kind is IntensityType.gamma:
        return np.power(patch, t.gamma)
    if t.kind is IntensityType.gaussian_noise and t.sigma > 0:
        if rng is None:
            raise ValueError('Gaussian noise requires a random stream')
        return np.clip(patch + rng.normal(0.0, t.sigma, size=patch.shape), 0.0, 1.0)
    if t.kind is IntensityType.gaussian_blur and t.sigma > 0:
        radius = int(math.ceil(3.0 * t.sigma))
        blurred = ndimage.gaussian_filter(patch, sigma=t.sigma, mode='nearest', radius=radius, axes=(0, 1))
        return np.clip(blurred, 0.0, 1.0)
    return patch.copy()


def apply_pipeline(patch, mask, pipeline, rng=None):
    """Run object-level steps in order; intensity steps touch the patch only."""
    for step in pipeline.steps:
        if isinstance(step, RigidKind):
            patch, mask = apply_rigid(patch, mask, step)
        else:
            patch = apply_intensity(patch, step, rng)
    return patch, mask


def apply_image_level(image, labels, p, out_size, rng=None, reference_class=None):
    """
    Crop jointly, resize (bilinear image, nearest labels) to out_size, then intensity on the image.

    Args:
        image (np.ndarray): image plane.
        labels (np.ndarray): label map with the same (H, W).
        p (ImageLevelPipeline): crop and intensity steps.
        out_size (tuple): (height, width).
        rng (np.random.Generator): stream for noise steps.
        reference_class (int): if set, a crop that removes every pixel of it is an error.

    Returns:
        (image, labels)
    """
    if image.shape[:2] != labels.shape:
        raise ValueError('Image {} and labels {} differ in size'.format(image.shape[:2], labels.shape))
    if p.crop is not None:
        had_reference = reference_class is not None and (labels == reference_class).any()
        image = extract_patch(image, p.crop)
        labels = extract_patch(labels, p.crop)
        if had_reference and not (labels == reference_class).any():
            raise ReferenceCroppedError('Crop {} removes every pixel of reference class {}'.format(
                p.crop.to_dict(), reference_class))

    out_h, out_w = out_size
    image = resample(image, out_h, out_w, ResampleMode.bilinear)
    labels = resample(labels, out_h, out_w, ResampleMode.nearest)
    for step in p.steps:
        image = apply_intensity(image, step, rng)
    return image, labels
