# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
dataset: Image/mask pairing, lesion bank and manifest records.

A dataset root holds images/*.png and masks/*.png paired by file stem. Mask stems may carry
a '_mask' suffix. The manifest is JSON Lines: one header line with the effective
configuration followed by one line per synthetic sample, sorted by index.
"""

import json
from collections import Counter
from dataclasses import dataclass, field
from glob import glob
from os.path import abspath, basename, dirname, exists, isdir, join, splitext
from typing import Dict, Optional, Tuple

import numpy as np
from knack.log import get_logger
from knack.util import CLIError

from softcp._constants import (DATASET_IMAGES_DIR, DATASET_MASKS_DIR, MASK_STEM_SUFFIXES, OUTPUT_LESIONS_DIR,
                               TOOL_NAME, VERSION)
from softcp.assets.user_messages import (ERROR_DIMENSION_MISMATCH, ERROR_MANIFEST_UNREADABLE,
                                         ERROR_MANIFEST_VIOLATIONS, ERROR_NO_PAIRS)
from softcp.common.shared import PlacementRejection, ResampleMode, ViolationType
from softcp.common.utility import dump_json_line, ensure_dir, pack_mask, unpack_mask
from softcp.imaging.blend import PasteOffset, merge_labels, paste_window
from softcp.imaging.morphology import connected_components
from softcp.imaging.placement import PlacementConstraints, check_placement
from softcp.imaging.raster import (Box, extract_patch, load_image, load_label_map, read_png_size, resample,
                                   save_image, save_label_map)
from softcp.imaging.transform import ImageLevelPipeline

logger = get_logger(__name__)

HEADER_TYPE = 'header'
SAMPLE_TYPE = 'sample'
BINARY_MASK_CLASSES = {0: 0, 255: 1}


@dataclass(frozen=True)
class ClassConfig(object):
    """
    Args:
        mapping (dict): mask pixel value -> class id.
        lesion_class (int): class of the lesions to copy.
        reference_class (int|None): class a pasted lesion must intersect; None means the whole frame.
    """
    mapping: Dict[int, int]
    lesion_class: int = 1
    reference_class: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'mapping', {int(k): int(v) for k, v in self.mapping.items()})
        declared = set(self.mapping.values())
        if self.lesion_class not in declared:
            raise ValueError('lesion_class {} is not a declared class id'.format(self.lesion_class))
        if self.reference_class is not None and self.reference_class not in declared:
            raise ValueError('reference_class {} is not a declared class id'.format(self.reference_class))
        if self.reference_class == self.lesion_class:
            raise ValueError('reference_class and lesion_class must differ')

    @classmethod
    def from_config(cls, config):
        return cls(mapping=config['classes'],
                   lesion_class=int(config['lesion_class']),
                   reference_class=config.get('reference_class'))


@dataclass(frozen=True)
class DatasetRecord(object):
    stem: str
    image_path: str
    mask_path: str


@dataclass(frozen=True)
class DatasetIndex(object):
    records: Tuple[DatasetRecord, ...]
    class_config: ClassConfig
    orphans: Tuple[str, ...] = ()

    @property
    def lesion_class(self):
        return self.class_config.lesion_class

    @property
    def reference_class(self):
        return self.class_config.reference_class

    def find(self, stem):
        for record in self.records:
            if record.stem == stem:
                return record
        return None

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True, eq=False)
class LesionInstance(object):
    """
    Lesion copy candidate.

    patch and mask cover window, the lesion box expanded by the margin and clipped to the
    source frame. bbox is the tight lesion box in source coordinates.
    """
    patch: np.ndarray
    mask: np.ndarray
    source_stem: str
    area: int
    bbox: Box
    window: Box

    def to_dict(self):
        return {'source_stem': self.source_stem, 'area': self.area,
                'bbox': self.bbox.to_dict(), 'window': self.window.to_dict()}


def _stem(path):
    return splitext(basename(path))[0]


def _mask_stem(path):
    stem = _stem(path)
    for suffix in MASK_STEM_SUFFIXES:
        if stem.endswith(suffix) and len(stem) > len(suffix):
            return stem[:-len(suffix)]
    return stem


def scan_dataset(root, cfg):
    """
    Pair images and masks under root by file stem.

    Args:
        root (str): dataset root with images/ and masks/.
        cfg (ClassConfig): class configuration carried by the index.

    Returns:
        index (DatasetIndex): records sorted by stem.
    """
    images_dir = join(root, DATASET_IMAGES_DIR)
    masks_dir = join(root, DATASET_MASKS_DIR)
    if not isdir(images_dir) or not isdir(masks_dir):
        raise CLIError(ERROR_NO_PAIRS(root))

    images = {_stem(p): p for p in glob(join(images_dir, '*.png'))}
    masks = {_mask_stem(p): p for p in glob(join(masks_dir, '*.png'))}

    orphans = []
    for stem in sorted(set(images) - set(masks)):
        logger.warning("Image '%s' has no mask, skipping", images[stem])
        orphans.append(images[stem])
    for stem in sorted(set(masks) - set(images)):
        logger.warning("Mask '%s' has no image, skipping", masks[stem])
        orphans.append(masks[stem])

    stems = sorted(set(images) & set(masks))
    if not stems:
        raise CLIError(ERROR_NO_PAIRS(root))

    records = []
    for stem in stems:
        try:
            image_size = read_png_size(images[stem])
            mask_size = read_png_size(masks[stem])
        except IOError as e:
            raise CLIError(e)
        if image_size != mask_size:
            raise CLIError(ERROR_DIMENSION_MISMATCH(stem, image_size, mask_size))
        records.append(DatasetRecord(stem, images[stem], masks[stem]))

    logger.info("Found %s image/mask pairs under '%s'", len(records), root)
    return DatasetIndex(tuple(records), cfg, tuple(orphans))


def load_pair(record, cfg):
    """Decode a record into (image plane, label map)."""
    try:
        return load_image(record.image_path), load_label_map(record.mask_path, cfg.mapping)
    except (IOError, ValueError) as e:
        raise CLIError(e)


def build_lesion_bank(idx, min_area, margin, resize_to=None):
    """
    Extract every lesion-class component of at least min_area pixels.

    Args:
        idx (DatasetIndex): scanned dataset.
        min_area (int): smallest kept component, >= 1.
        margin (int): context pixels around each lesion box.
        resize_to (tuple, None): (height, width) every pair is resampled to first.

    Returns:
        bank (list): LesionInstance in record then component order.
    """
    if min_area < 1:
        raise ValueError('min_area must be >= 1, got {}'.format(min_area))
    if margin < 0:
        raise ValueError('margin must be >= 0, got {}'.format(margin))

    bank = []
    for record in idx.records:
        image, labels = load_pair(record, idx.class_config)
        if resize_to:
            image = resample(image, resize_to[0], resize_to[1], ResampleMode.bilinear)
            labels = resample(labels, resize_to[0], resize_to[1], ResampleMode.nearest)
        components = connected_components(labels == idx.lesion_class, min_area=min_area)
        for component in components:
            window = component.box.expand(margin, labels.shape)
            bank.append(LesionInstance(patch=extract_patch(image, window),
                                       mask=extract_patch(component.support, window),
                                       source_stem=record.stem,
                                       area=component.area,
                                       bbox=component.box,
                                       window=window))
        logger.debug("'%s': %s lesion instance(s)", record.stem, len(components))

    logger.info('Lesion bank holds %s instance(s) from %s record(s)', len(bank), len(idx.records))
    return bank


def write_lesion_bank(bank, out_dir):
    """Write each instance as <stem>_lesionNNN_image.png / _mask.png plus a bank.json index."""
    ensure_dir(out_dir)
    per_stem = Counter()
    written = []
    for instance in bank:
        number = per_stem[instance.source_stem]
        per_stem[instance.source_stem] += 1
        name = '{}_lesion{:03d}'.format(instance.source_stem, number)
        image_path = join(out_dir, name + '_image.png')
        mask_path = join(out_dir, name + '_mask.png')
        save_image(image_path, instance.patch)
        save_label_map(mask_path, instance.mask.astype(np.uint8), BINARY_MASK_CLASSES)
        entry = instance.to_dict()
        entry.update({'image': basename(image_path), 'mask': basename(mask_path)})
        written.append(entry)

    with open(join(out_dir, 'bank.json'), 'w', encoding='utf-8') as f:
        json.dump(written, f, indent=2, sort_keys=True)
    return written


@dataclass
class ManifestEntry(object):
    """
    Provenance of one synthetic sample.

    Each lesion dict holds source_stem, bank_index, source_bbox, object_pipeline, the packed
    transformed mask and the placement diagnostics (offset included).
    """
    index: int
    image: str
    mask: str
    seed: Tuple[int, int]
    background_stem: str
    image_pipeline: dict
    lesions: list
    blend: dict
    softmask: dict
    final_pipeline: Optional[dict] = None
    retries: int = 0
    rejections: dict = field(default_factory=dict)

    def to_dict(self):
        return {'type': SAMPLE_TYPE, 'index': self.index, 'image': self.image, 'mask': self.mask,
                'seed': list(self.seed), 'background_stem': self.background_stem,
                'image_pipeline': self.image_pipeline, 'lesions': list(self.lesions),
                'blend': self.blend, 'softmask': self.softmask, 'final_pipeline': self.final_pipeline,
                'retries': self.retries, 'rejections': dict(self.rejections)}

    @classmethod
    def from_dict(cls, d):
        return cls(index=int(d['index']), image=d['image'], mask=d['mask'],
                   seed=tuple(int(s) for s in d['seed']), background_stem=d['background_stem'],
                   image_pipeline=d['image_pipeline'], lesions=list(d['lesions']),
                   blend=d['blend'], softmask=d['softmask'], final_pipeline=d.get('final_pipeline'),
                   retries=int(d.get('retries', 0)), rejections=dict(d.get('rejections', {})))


def lesion_record(instance, bank_index, pipeline, mask, placement):
    return {'source_stem': instance.source_stem, 'bank_index': bank_index,
            'source_bbox': instance.bbox.to_dict(), 'object_pipeline': pipeline.to_list(),
            'mask': pack_mask(mask), 'placement': placement.to_dict()}


def manifest_header(config, overrides, real_count, synthetic_count):
    return {'type': HEADER_TYPE, 'tool': TOOL_NAME, 'version': VERSION, 'config': config,
            'overrides': dict(overrides or {}), 'real_count': real_count,
            'synthetic_count': synthetic_count}


def write_manifest(path, header, entries):
    """Single writer: header line then entries sorted by index."""
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(dump_json_line(header) + '\n')
        for entry in sorted(entries, key=lambda e: e.index):
            f.write(dump_json_line(entry.to_dict()) + '\n')


def read_manifest(path):
    """
    Returns:
        (header, entries): header dict (None for an empty file) and ManifestEntry list.
    """
    if not exists(path):
        raise CLIError("Manifest '{}' was not found.".format(path))
    header = None
    entries = []
    with open(path, 'r', encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                if payload.get('type') == HEADER_TYPE:
                    header = payload
                else:
                    entries.append(ManifestEntry.from_dict(payload))
            except (ValueError, KeyError, TypeError, AttributeError) as e:
                raise CLIError(ERROR_MANIFEST_UNREADABLE(path, number, e))
    if entries and header is None:
        raise CLIError(ERROR_MANIFEST_UNREADABLE(path, 1, 'missing header line'))
    return header, entries


def placement_constraints(config):
    placement = config.get('placement') or {}
    return PlacementConstraints(s1=placement.get('s1'),
                                s2=int(placement.get('s2', 1)),
                                reference_class=config.get('reference_class'),
                                lesion_class=int(config['lesion_class']),
                                max_attempts=int(placement.get('max_attempts', 100)),
                                s1_fraction=float(placement.get('s1_fraction', 0.5)))


def _violation(entry, kind, detail, lesion=None):
    return {'index': entry.index, 'type': kind.value, 'lesion': lesion, 'detail': detail}


# pylint: disable=too-many-locals
def _validate_entry(entry, idx, constraints, out_size, out_root):
    violations = []
    record = idx.find(entry.background_stem)
    if record is None:
        return [_violation(entry, ViolationType.missing_file,
                           "background '{}' is not in the dataset".format(entry.background_stem))]

    labels = load_label_map(record.mask_path, idx.class_config.mapping)
    pipeline = ImageLevelPipeline.from_dict(entry.image_pipeline)
    if pipeline.crop is not None:
        if not pipeline.crop.fits(labels.shape):
            return [_violation(entry, ViolationType.bounds,
                               'crop {} outside the background frame'.format(pipeline.crop.to_dict()))]
        labels = extract_patch(labels, pipeline.crop)
    scene = resample(labels, out_size[0], out_size[1], ResampleMode.nearest)

    for number, lesion in enumerate(entry.lesions):
        mask = unpack_mask(lesion['mask'])
        at = PasteOffset.from_dict(lesion['placement']['offset'])
        try:
            paste_window(mask.shape, scene.shape, at)
        except ValueError as e:
            violations.append(_violation(entry, ViolationType.bounds, str(e), number))
            return violations
        check = check_placement(mask, at, scene, constraints)
        if not check:
            kind = (ViolationType.reference if check.reason is PlacementRejection.reference
                    else ViolationType.lesion_overlap)
            violations.append(_violation(
                entry, kind, 'overlap_reference={} s1={} overlap_lesions={} s2={}'.format(
                    check.overlap_reference, constraints.threshold_s1(int(mask.sum())),
                    check.overlap_lesions, constraints.s2), number))
        scene = merge_labels(mask, constraints.lesion_class, scene, at)

    mask_path = join(out_root, entry.mask)
    if not exists(mask_path) or not exists(join(out_root, entry.image)):
        violations.append(_violation(entry, ViolationType.missing_file,
                                     "output files for sample {} are missing".format(entry.index)))
        return violations
    produced = load_label_map(mask_path, idx.class_config.mapping)
    if produced.shape != scene.shape:
        violations.append(_violation(entry, ViolationType.mask_mismatch, 'mask is {}x{}, expected {}x{}'.format(
            produced.shape[0], produced.shape[1], scene.shape[0], scene.shape[1])))
    elif not np.array_equal(produced, scene):
        violations.append(_violation(entry, ViolationType.mask_mismatch, '{} pixel(s) differ from the merged labels'
                                     .format(int(np.count_nonzero(produced != scene)))))
    return violations


def validate_manifest(manifest, root=None):
    """
    Re-check every manifest entry independently of the generator.

    Background labels are replayed from the dataset (crop, nearest resize), each stored lesion
    mask is re-checked against both placement constraints at its stored offset and merged in
    order, and the result is compared with the written mask.

    Args:
        manifest (str): manifest.jsonl path; outputs are resolved next to it.
        root (str, None): dataset root; defaults to the one recorded in the header.

    Returns:
        report (dict): entry count and violation list.
    """
    header, entries = read_manifest(manifest)
    report = {'manifest': manifest, 'entries': len(entries), 'violations': []}
    if not entries:
        return report

    config = header['config']
    try:
        class_config = ClassConfig.from_config(config)
        constraints = placement_constraints(config)
    except (KeyError, ValueError) as e:
        raise CLIError(ERROR_MANIFEST_UNREADABLE(manifest, 1, e))
    idx = scan_dataset(root or config['dataset_root'], class_config)
    out_size = tuple(int(v) for v in config['output_size'])
    out_root = dirname(abspath(manifest))

    for entry in entries:
        try:
            report['violations'].extend(_validate_entry(entry, idx, constraints, out_size, out_root))
        except (IOError, ValueError, KeyError) as e:
            raise CLIError(ERROR_MANIFEST_UNREADABLE(manifest, entry.index, e))
    return report


def softcp_extract_lesions(config, out=None):
    from softcp.operations.pipeline import load_config_for_command

    cfg = load_config_for_command(config)
    idx = scan_dataset(cfg.dataset_root, cfg.class_config)
    bank = build_lesion_bank(idx, cfg.min_area, cfg.margin, resize_to=cfg.output_size)
    out_dir = out or join(cfg.output_root, OUTPUT_LESIONS_DIR)
    written = write_lesion_bank(bank, out_dir)
    return {'output': out_dir, 'instances': len(written), 'lesions': written}


def softcp_validate(manifest, dataset_root=None):
    report = validate_manifest(manifest, dataset_root)
    violations = report['violations']
    for violation in violations:
        logger.error('sample %s: %s (%s)', violation['index'], violation['type'], violation['detail'])
    if violations:
        raise CLIError(ERROR_MANIFEST_VIOLATIONS(len(violations), manifest))
    report['summary'] = '0 violations'
    logger.info('0 violations in %s entries', report['entries'])
    return report
