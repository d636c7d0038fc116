# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
pipeline: One synthesis per sample index and batch generation.

Per sample: draw a background, crop/resize/intensity it, draw a lesion and transform it,
place it under the anatomical constraints, blend it and merge labels. Every draw comes from
a stream seeded by (master seed, index), so a sample never depends on worker count or order.
"""

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from functools import lru_cache
from os import cpu_count
from os.path import exists, join
from typing import Optional, Tuple

import numpy as np
from knack.log import get_logger
from knack.util import CLIError

from softcp._constants import (DEFAULT_MAX_RETRIES, DEFAULT_MIN_AREA, DEFAULT_OUTPUT_SIZE, MANIFEST_NAME,
                               OUTPUT_IMAGES_DIR, OUTPUT_MASKS_DIR, OUTPUT_PREVIEW_DIR, PREVIEW_COLORMAP,
                               SYNTHETIC_STEM_TEMPLATE)
from softcp.assets.user_messages import (ERROR_CONFIG_INVALID, ERROR_COUNT_AND_RATIO, ERROR_EMPTY_LESION_BANK,
                                         ERROR_SAMPLE_FAILED, ERROR_SYNTHESIS_EXHAUSTED)
from softcp.common.config import load_run_config
from softcp.common.shared import BlendModeType
from softcp.common.utility import ensure_dir, parse_ratio
from softcp.imaging.blend import (BlendMode, PoissonConvergenceError, gaussian_mask, merge_labels, paste_window,
                                  poisson_paste, soft_copy, soft_paste)
from softcp.imaging.placement import PlacementConstraints, find_placement
from softcp.imaging.raster import load_image, load_label_map, save_image, save_label_map
from softcp.imaging.softmask import SoftMaskParams, compute_soft_mask
from softcp.imaging.transform import (ImageLevelRanges, LesionVanishedError, ReferenceCroppedError,
                                      TransformRanges, apply_image_level, apply_intensity, apply_pipeline,
                                      sample_final_pipeline, sample_image_pipeline, sample_object_pipeline)
from softcp.operations.dataset import (ClassConfig, ManifestEntry, build_lesion_bank, lesion_record,
                                       manifest_header, placement_constraints, scan_dataset, write_manifest)

logger = get_logger(__name__)


@dataclass(frozen=True)
class RunConfig(object):
    """
    Typed run configuration. Exactly one of count and ratio is set; margin defaults to the
    soft-mask dilation count so the lesion window holds the full soft-mask support.
    """
    dataset_root: str
    output_root: str
    seed: int
    class_config: ClassConfig
    count: Optional[int] = None
    ratio: Optional[float] = None
    output_size: Tuple[int, int] = DEFAULT_OUTPUT_SIZE
    output_bitdepth: int = 8
    min_area: int = DEFAULT_MIN_AREA
    margin: Optional[int] = None
    lesions_per_image: Tuple[Tuple[int, float], ...] = ((1, 1.0),)
    max_retries: int = DEFAULT_MAX_RETRIES
    softmask: SoftMaskParams = field(default_factory=SoftMaskParams)
    object_ranges: TransformRanges = field(default_factory=TransformRanges)
    image_ranges: ImageLevelRanges = field(default_factory=ImageLevelRanges)
    constraints: PlacementConstraints = field(default_factory=PlacementConstraints)
    blend: BlendMode = field(default_factory=BlendMode)
    raw: dict = field(default_factory=dict, compare=False)
    overrides: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if (self.count is None) == (self.ratio is None):
            raise ValueError(ERROR_COUNT_AND_RATIO())
        if self.ratio is not None and self.ratio <= 0:
            raise ValueError('ratio must be > 0, got {}'.format(self.ratio))
        if self.count is not None and self.count < 0:
            raise ValueError('count must be >= 0, got {}'.format(self.count))
        if self.seed < 0:
            raise ValueError('seed must be >= 0, got {}'.format(self.seed))
        if self.max_retries < 1:
            raise ValueError('max_retries must be >= 1')
        if any(n < 1 or w < 0 for n, w in self.lesions_per_image) or \
                sum(w for _, w in self.lesions_per_image) <= 0:
            raise ValueError('lesions_per_image needs counts >= 1 and a positive total weight')
        if self.constraints.lesion_class != self.class_config.lesion_class or \
                self.constraints.reference_class != self.class_config.reference_class:
            raise ValueError('Placement classes differ from the class configuration')
        if self.margin is None:
            object.__setattr__(self, 'margin', self.softmask.k_dilate)

    @classmethod
    def from_dict(cls, config, overrides=None):
        ratio = config.get('ratio')
        count = config.get('count')
        lesions = config.get('lesions_per_image') or {1: 1.0}
        return cls(dataset_root=config['dataset_root'],
                   output_root=config['output_root'],
                   seed=int(config['seed']),
                   class_config=ClassConfig.from_config(config),
                   count=int(count) if count is not None else None,
                   ratio=parse_ratio(ratio) if ratio is not None else None,
                   output_size=tuple(int(v) for v in config.get('output_size', DEFAULT_OUTPUT_SIZE)),
                   output_bitdepth=int(config.get('output_bitdepth', 8)),
                   min_area=int(config.get('min_area', DEFAULT_MIN_AREA)),
                   margin=config.get('margin'),
                   lesions_per_image=tuple(sorted((int(k), float(v)) for k, v in lesions.items())),
                   max_retries=int(config.get('max_retries', DEFAULT_MAX_RETRIES)),
                   softmask=SoftMaskParams.from_dict(config.get('softmask') or {}),
                   object_ranges=TransformRanges.from_dict(config.get('object_transform') or {}),
                   image_ranges=ImageLevelRanges.from_dict(config.get('image_transform') or {}),
                   constraints=placement_constraints(config),
                   blend=BlendMode.from_dict(config.get('blend') or {}),
                   raw=config,
                   overrides=dict(overrides or {}))

    def synthetic_count(self, real_count):
        if self.count is not None:
            return self.count
        # tolerance keeps 300 / 3.0 from flooring to 99 on representation error
        return int(math.floor(real_count / self.ratio + 1e-9))

    def with_blend(self, mode):
        return replace(self, blend=replace(self.blend, mode=BlendModeType(mode)))


@dataclass(frozen=True, eq=False)
class Synthesis(object):
    image: np.ndarray
    labels: np.ndarray
    entry: ManifestEntry
    background: np.ndarray
    weights: np.ndarray


def load_config_for_command(config=None, seed=None, ratio=None, count=None, blend=None, out=None):
    overrides = {'seed': seed, 'ratio': ratio, 'count': count, 'blend.mode': blend, 'output_root': out}
    raw, applied = load_run_config(config, overrides)
    try:
        return RunConfig.from_dict(raw, applied)
    except (ValueError, TypeError) as e:
        raise CLIError(ERROR_CONFIG_INVALID(config, e))


def sample_stream(seed, index):
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def sample_stem(index):
    return SYNTHETIC_STEM_TEMPLATE.format(index)


@lru_cache(maxsize=32)
def _load_background(record, mapping):
    image = load_image(record.image_path)
    labels = load_label_map(record.mask_path, dict(mapping))
    image.setflags(write=False)
    labels.setflags(write=False)
    return image, labels


def _sample_lesion_count(rng, choices):
    counts = [n for n, _ in choices]
    weights = np.array([w for _, w in choices], dtype=np.float64)
    return counts[int(rng.choice(len(counts), p=weights / weights.sum()))]


def _touches_border(mask, at, shape):
    height, width = shape[:2]
    rows, cols = np.nonzero(mask)
    rows, cols = rows + at.row, cols + at.col
    return bool((rows == 0).any() or (cols == 0).any() or (rows == height - 1).any() or (cols == width - 1).any())


def _blend_weight(mask, cfg):
    mode = cfg.blend.mode
    if mode is BlendModeType.soft:
        return compute_soft_mask(mask, cfg.softmask)
    if mode is BlendModeType.gaussian:
        return gaussian_mask(mask, cfg.blend.sigma)
    return mask.astype(np.float64)


def _blend(patch, mask, weight, composite, at, cfg):
    """Returns the new composite."""
    if cfg.blend.mode is BlendModeType.poisson:
        return poisson_paste(patch, mask, composite, at, cfg.blend.tolerance, cfg.blend.max_iterations)
    return soft_paste(soft_copy(patch, weight), weight, composite, at)


# pylint: disable=too-many-arguments
def _paste_lesion(cfg, bank, rng, composite, scene, tally):
    """One lesion draw. Returns None and updates tally when the draw is rejected."""
    bank_index = int(rng.integers(len(bank)))
    instance = bank[bank_index]
    pipeline = sample_object_pipeline(rng, cfg.object_ranges)
    logger.debug('Lesion %s from %s, pipeline %s', bank_index, instance.source_stem, pipeline.to_list())
    try:
        patch, mask = apply_pipeline(instance.patch, instance.mask, pipeline, rng)
    except LesionVanishedError:
        tally['lesion_vanished'] += 1
        return None

    if patch.shape[2] != composite.shape[2]:
        raise CLIError('Lesion from {} has {} channel(s), background has {}'.format(
            instance.source_stem, patch.shape[2], composite.shape[2]))
    if mask.shape[0] > scene.shape[0] or mask.shape[1] > scene.shape[1]:
        tally['lesion_too_large'] += 1
        return None

    weight = _blend_weight(mask, cfg)
    if cfg.blend.mode is BlendModeType.soft and not (weight == 1.0).any():
        # empty k_erode core: the soft paste would leave no trace of a labeled lesion
        tally['core_vanished'] += 1
        return None

    placement = find_placement(mask, scene, cfg.constraints, rng)
    if not placement:
        tally.update(placement.rejections)
        tally['placement_exhausted'] += 1
        return None
    at = placement.offset
    if cfg.blend.mode is BlendModeType.poisson and _touches_border(mask, at, scene.shape):
        tally['poisson_border'] += 1
        return None

    try:
        composite = _blend(patch, mask, weight, composite, at, cfg)
    except PoissonConvergenceError as e:
        raise CLIError(e)
    scene = merge_labels(mask, cfg.class_config.lesion_class, scene, at)
    return composite, scene, weight, at, lesion_record(instance, bank_index, pipeline, mask, placement)


# pylint: disable=too-many-locals
def _synthesize(cfg, index, idx, bank):
    if not bank:
        raise CLIError(ERROR_EMPTY_LESION_BANK(cfg.class_config.lesion_class, cfg.min_area))
    if index < 0:
        raise ValueError('Sample index must be >= 0, got {}'.format(index))

    rng = sample_stream(cfg.seed, index)
    mapping = tuple(sorted(cfg.class_config.mapping.items()))
    tally = Counter()
    for retry in range(cfg.max_retries):
        record = idx.records[int(rng.integers(len(idx.records)))]
        try:
            image, labels = _load_background(record, mapping)
        except (IOError, ValueError) as e:
            raise CLIError(e)
        image_pipeline = sample_image_pipeline(rng, cfg.image_ranges, image.shape)
        try:
            background, scene = apply_image_level(image, labels, image_pipeline, cfg.output_size, rng,
                                                  cfg.constraints.reference_class)
        except ReferenceCroppedError:
            tally['reference_cropped'] += 1
            continue

        composite = background
        weights = np.zeros(scene.shape, dtype=np.float64)
        lesions = []
        for _ in range(_sample_lesion_count(rng, cfg.lesions_per_image)):
            pasted = _paste_lesion(cfg, bank, rng, composite, scene, tally)
            if pasted is None:
                break
            composite, scene, weight, at, lesion = pasted
            window = weights[paste_window(weight.shape, weights.shape, at)]
            np.maximum(window, weight, out=window)
            lesions.append(lesion)
        else:
            final = None
            if cfg.image_ranges.final_pass:
                final = sample_final_pipeline(rng, cfg.image_ranges)
                for step in final.steps:
                    composite = apply_intensity(composite, step, rng)

            stem = sample_stem(index)
            entry = ManifestEntry(index=index,
                                  image='{}/{}.png'.format(OUTPUT_IMAGES_DIR, stem),
                                  mask='{}/{}.png'.format(OUTPUT_MASKS_DIR, stem),
                                  seed=(cfg.seed, index),
                                  background_stem=record.stem,
                                  image_pipeline=image_pipeline.to_dict(),
                                  lesions=lesions,
                                  blend=cfg.blend.to_dict(),
                                  softmask=cfg.softmask.to_dict(),
                                  final_pipeline=final.to_dict() if final else None,
                                  retries=retry,
                                  rejections=dict(tally))
            return Synthesis(composite, scene, entry, background, weights)

        logger.warning('Sample %s: draw %s rejected %s, resampling background and lesion',
                       index, retry + 1, dict(tally))

    raise CLIError(ERROR_SYNTHESIS_EXHAUSTED(index, cfg.max_retries, dict(tally)))


def synthesize_one(cfg, index, idx, bank):
    """
    Synthesize sample index.

    Args:
        cfg (RunConfig): run configuration.
        index (int): sample ordinal >= 0.
        idx (DatasetIndex): background source.
        bank (list): LesionInstance list, nonempty.

    Returns:
        (image, labels, entry): composite image plane, merged label map and its ManifestEntry.
    """
    result = _synthesize(cfg, index, idx, bank)
    return result.image, result.labels, result.entry


def write_sample(cfg, index, idx, bank):
    image, labels, entry = synthesize_one(cfg, index, idx, bank)
    save_image(join(cfg.output_root, entry.image), image, cfg.output_bitdepth)
    save_label_map(join(cfg.output_root, entry.mask), labels, cfg.class_config.mapping)
    logger.debug('Wrote sample %s', index)
    return entry


_WORKER_STATE = {}


def _init_worker(cfg, idx, bank):
    _WORKER_STATE.update(cfg=cfg, idx=idx, bank=bank)


def _worker_write(index):
    return write_sample(_WORKER_STATE['cfg'], index, _WORKER_STATE['idx'], _WORKER_STATE['bank'])


# pylint: disable=broad-except
def synthesize_batch(cfg, jobs=1):
    """
    Generate every sample of a run and write images, masks and the manifest.

    Args:
        cfg (RunConfig): run configuration.
        jobs (int): worker processes; output is identical for any value.

    Returns:
        summary (dict): manifest path and sample counts.
    """
    idx = scan_dataset(cfg.dataset_root, cfg.class_config)
    total = cfg.synthetic_count(len(idx))
    logger.info('Generating %s synthetic sample(s) from %s real image(s)', total, len(idx))

    manifest_path = join(cfg.output_root, MANIFEST_NAME)
    if exists(manifest_path):
        logger.warning("Overwriting existing output under '%s'", cfg.output_root)
    ensure_dir(join(cfg.output_root, OUTPUT_IMAGES_DIR))
    ensure_dir(join(cfg.output_root, OUTPUT_MASKS_DIR))

    bank = []
    if total:
        bank = build_lesion_bank(idx, cfg.min_area, cfg.margin, resize_to=cfg.output_size)
        if not bank:
            raise CLIError(ERROR_EMPTY_LESION_BANK(cfg.class_config.lesion_class, cfg.min_area))

    entries = []
    failures = []
    if jobs <= 1 or total <= 1:
        for index in range(total):
            try:
                entries.append(write_sample(cfg, index, idx, bank))
            except Exception as e:
                failures.append((index, e))
                break
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, total), initializer=_init_worker,
                                 initargs=(cfg, idx, bank)) as pool:
            futures = {pool.submit(_worker_write, index): index for index in range(total)}
            for future in as_completed(futures):
                try:
                    entries.append(future.result())
                except Exception as e:
                    failures.append((futures[future], e))

    write_manifest(manifest_path, manifest_header(cfg.raw, cfg.overrides, len(idx), total), entries)
    if failures:
        index, error = min(failures, key=lambda f: f[0])
        raise CLIError(ERROR_SAMPLE_FAILED(index, error, len(entries), total))

    logger.info("Wrote %s sample(s) and '%s'", len(entries), manifest_path)
    return {'manifest': manifest_path, 'output_root': cfg.output_root,
            'real_images': len(idx), 'synthetic_images': len(entries)}


def _to_rgb(image):
    return np.repeat(image, 3, axis=2) if image.shape[2] == 1 else image


def _heatmap(weights):
    from matplotlib import colormaps

    return colormaps[PREVIEW_COLORMAP](np.clip(weights, 0.0, 1.0))[:, :, :3].astype(np.float64)


def render_preview(cfg, index, idx, bank):
    """
    Comparison grid for one sample index: a row per blend mode, columns background |
    weight heatmap | composite. Each row replays the same random stream.
    """
    rows = []
    for mode in BlendModeType:
        try:
            result = _synthesize(cfg.with_blend(mode), index, idx, bank)
        except CLIError as e:
            logger.warning('Preview %s: %s blend unavailable: %s', index, mode.value, e)
            blank = np.zeros(cfg.output_size + (3,))
            rows.append(np.hstack([blank, blank, blank]))
            continue
        rows.append(np.hstack([_to_rgb(result.background), _heatmap(result.weights), _to_rgb(result.image)]))
    return np.vstack(rows)


def softcp_augment(config, seed=None, ratio=None, count=None, blend=None, jobs=None, out=None):
    cfg = load_config_for_command(config, seed=seed, ratio=ratio, count=count, blend=blend, out=out)
    return synthesize_batch(cfg, jobs or cpu_count() or 1)


def softcp_preview(config, seed=None, blend=None, count=4, start_index=0, out=None):
    cfg = load_config_for_command(config, seed=seed, blend=blend, out=out)
    idx = scan_dataset(cfg.dataset_root, cfg.class_config)
    bank = build_lesion_bank(idx, cfg.min_area, cfg.margin, resize_to=cfg.output_size)
    if not bank:
        raise CLIError(ERROR_EMPTY_LESION_BANK(cfg.class_config.lesion_class, cfg.min_area))

    preview_dir = ensure_dir(join(cfg.output_root, OUTPUT_PREVIEW_DIR))
    written = []
    for index in range(start_index, start_index + count):
        path = join(preview_dir, 'preview_{:06d}.png'.format(index))
        save_image(path, render_preview(cfg, index, idx, bank))
        written.append(path)
    logger.info("Wrote %s preview grid(s) to '%s'", len(written), preview_dir)
    return {'previews': written, 'rows': [mode.value for mode in BlendModeType],
            'columns': ['background', 'weights', 'result']}
