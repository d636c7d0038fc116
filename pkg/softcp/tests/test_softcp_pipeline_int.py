import json
import os
import time
from collections import Counter

import numpy as np
import pytest
from knack.util import CLIError

from softcp.imaging.raster import Box, load_image
from softcp.imaging.transform import IntensityKind, RigidKind, TransformPipeline
from softcp.operations import pipeline as subject
from softcp.operations.dataset import (LesionInstance, ManifestEntry, build_lesion_bank, read_manifest, scan_dataset,
                                       softcp_validate, validate_manifest)
from softcp.tests.softcp_test_tools import build_phantom_dataset, hash_tree, phantom_config, write_config

path_pipeline = 'softcp.operations.pipeline'


@pytest.fixture()
def phantom(tmp_path):
    build_phantom_dataset(str(tmp_path / 'data'))
    return tmp_path


def run_config(root, **overrides):
    path = write_config(root / 'run.yaml', phantom_config(root / 'data', root / 'out', **overrides))
    return subject.load_config_for_command(path)


def bank_for(cfg):
    idx = scan_dataset(cfg.dataset_root, cfg.class_config)
    return idx, build_lesion_bank(idx, cfg.min_area, cfg.margin, resize_to=cfg.output_size)


class TestSynthesizeOne():
    def test_deterministic(self, phantom):
        cfg = run_config(phantom)
        idx, bank = bank_for(cfg)
        first = subject.synthesize_one(cfg, 3, idx, bank)
        second = subject.synthesize_one(cfg, 3, idx, bank)
        other = subject.synthesize_one(cfg, 4, idx, bank)

        assert np.array_equal(first[0], second[0])
        assert np.array_equal(first[1], second[1])
        assert first[2] == second[2]
        assert not np.array_equal(first[0], other[0])

    def test_output_geometry(self, phantom):
        cfg = run_config(phantom, output_size=[48, 40])
        idx, bank = bank_for(cfg)
        image, labels, entry = subject.synthesize_one(cfg, 0, idx, bank)
        assert image.shape == (48, 40, 1)
        assert labels.shape == (48, 40)
        assert image.min() >= 0.0 and image.max() <= 1.0
        assert set(np.unique(labels)) <= {0, 1, 2}
        assert entry.seed == (11, 0)
        assert len(entry.lesions) == 1
        assert entry.lesions[0]['placement']['overlap_lesions'] == 0

    def test_empty_bank(self, phantom):
        cfg = run_config(phantom)
        idx, _ = bank_for(cfg)
        with pytest.raises(CLIError) as e:
            subject.synthesize_one(cfg, 0, idx, [])
        assert 'No lesion of class 2' in str(e.value)

    def test_negative_index(self, phantom):
        cfg = run_config(phantom)
        idx, bank = bank_for(cfg)
        with pytest.raises(ValueError):
            subject.synthesize_one(cfg, -1, idx, bank)

    def test_multiple_lesions(self, phantom):
        cfg = run_config(phantom, lesions_per_image={2: 1.0})
        idx, bank = bank_for(cfg)
        _, _, entry = subject.synthesize_one(cfg, 1, idx, bank)
        assert len(entry.lesions) == 2

    def test_sample_exhaustion(self, phantom):
        cfg = run_config(phantom, max_retries=2, placement={'s1': 10000, 'max_attempts': 3})
        idx, bank = bank_for(cfg)
        with pytest.raises(CLIError) as e:
            subject.synthesize_one(cfg, 0, idx, bank)
        assert 'after 2' in str(e.value)
        assert 'reference' in str(e.value)


@pytest.fixture()
def thin_lesion():
    mask = np.zeros((12, 18), dtype=bool)
    mask[5:7, 5:13] = True
    patch = np.where(mask, 0.9, 0.3)[:, :, np.newaxis]
    return LesionInstance(patch=patch, mask=mask, source_stem='streak', area=16,
                          bbox=Box(5, 5, 2, 8), window=Box(0, 0, 12, 18))


class TestPasteLesion():
    @pytest.fixture(autouse=True)
    def identity_pipeline(self, mocker):
        mocker.patch(path_pipeline + '.sample_object_pipeline',
                     return_value=TransformPipeline((RigidKind(), IntensityKind())))

    @staticmethod
    def scene():
        labels = np.zeros((40, 40), dtype=np.uint8)
        labels[5:35, 5:35] = 1
        return labels, np.full((40, 40, 1), 0.3)

    def test_soft_rejects_lesion_without_core(self, phantom, thin_lesion):
        cfg = run_config(phantom)
        labels, composite = self.scene()
        tally = Counter()
        pasted = subject._paste_lesion(cfg, [thin_lesion], np.random.default_rng(0), composite, labels, tally)
        assert pasted is None
        assert tally['core_vanished'] == 1

    def test_hard_keeps_thin_lesion(self, phantom, thin_lesion):
        cfg = run_config(phantom, blend={'mode': 'hard'})
        labels, composite = self.scene()
        pasted = subject._paste_lesion(cfg, [thin_lesion], np.random.default_rng(0), composite, labels, Counter())
        image, scene = pasted[0], pasted[1]
        lesion = scene == 2
        assert lesion.sum() == 16
        assert np.allclose(image[lesion], 0.9)

    def test_thin_bank_exhausts_sample(self, phantom, thin_lesion):
        cfg = run_config(phantom, max_retries=2, image_transform={'crop_probability': 0.0})
        idx, _ = bank_for(cfg)
        with pytest.raises(CLIError) as e:
            subject.synthesize_one(cfg, 0, idx, [thin_lesion])
        assert 'core_vanished' in str(e.value)

class TestSynthesizeBatch():
    def test_batch_validates(self, phantom):
        cfg = run_config(phantom)
        summary = subject.synthesize_batch(cfg, jobs=1)
        assert summary['real_images'] == 6 and summary['synthetic_images'] == 4

        header, entries = read_manifest(summary['manifest'])
        assert header['synthetic_count'] == 4
        assert [e.index for e in entries] == [0, 1, 2, 3]
        for entry in entries:
            assert os.path.exists(os.path.join(cfg.output_root, entry.image))
            assert load_image(os.path.join(cfg.output_root, entry.image)).shape == (64, 64, 1)

        report = softcp_validate(summary['manifest'])
        assert report['entries'] == 4 and report['violations'] == []
        assert report['summary'] == '0 violations'

    @pytest.mark.parametrize("blend", ['hard', 'gaussian', 'poisson'])
    def test_other_blend_modes_validate(self, phantom, blend):
        cfg = run_config(phantom, count=2, blend={'mode': blend})
        summary = subject.synthesize_batch(cfg, jobs=1)
        _, entries = read_manifest(summary['manifest'])
        assert all(e.blend['mode'] == blend for e in entries)
        assert validate_manifest(summary['manifest'])['violations'] == []

    def test_edited_offset_is_flagged(self, phantom):
        cfg = run_config(phantom, count=2, image_transform={'crop_probability': 0.0})
        manifest = subject.synthesize_batch(cfg, jobs=1)['manifest']
        with open(manifest) as f:
            lines = f.read().splitlines()
        sample = json.loads(lines[1])
        sample['lesions'][0]['placement']['offset'] = {'row': 0, 'col': 0}
        lines[1] = json.dumps(sample)
        with open(manifest, 'w') as f:
            f.write('\n'.join(lines) + '\n')

        violations = validate_manifest(manifest)['violations']
        assert {'index': 0, 'type': 'reference', 'lesion': 0} in [
            {k: v[k] for k in ('index', 'type', 'lesion')} for v in violations]
        assert all(v['index'] == 0 for v in violations)
        with pytest.raises(CLIError) as e:
            softcp_validate(manifest)
        assert 'violation(s)' in str(e.value)

    def test_edited_mask_is_flagged(self, phantom):
        cfg = run_config(phantom, count=1)
        manifest = subject.synthesize_batch(cfg, jobs=1)['manifest']
        os.remove(os.path.join(cfg.output_root, 'masks', 'syn_000000.png'))
        violations = validate_manifest(manifest)['violations']
        assert [v['type'] for v in violations] == ['missing_file']

    def test_header_regenerates_samples(self, phantom):
        cfg = run_config(phantom, count=3)
        manifest = subject.synthesize_batch(cfg, jobs=1)['manifest']
        header, entries = read_manifest(manifest)
        replay_root = str(phantom / 'replay')
        replay = subject.RunConfig.from_dict(dict(header['config'], output_root=replay_root))
        idx, bank = bank_for(replay)
        os.makedirs(os.path.join(replay_root, 'images'))
        os.makedirs(os.path.join(replay_root, 'masks'))

        assert subject.write_sample(replay, 2, idx, bank) == entries[2]
        for name in (entries[2].image, entries[2].mask):
            assert hash_tree(replay_root)[name] == hash_tree(cfg.output_root)[name]

    def test_worker_count_does_not_change_output(self, phantom):
        cfg = run_config(phantom, count=5)
        subject.synthesize_batch(cfg, jobs=1)
        sequential = hash_tree(cfg.output_root)
        subject.synthesize_batch(cfg, jobs=2)
        assert hash_tree(cfg.output_root) == sequential
        assert len(sequential) == 11

    def test_zero_count_writes_header_only(self, phantom):
        cfg = run_config(phantom, count=0)
        summary = subject.synthesize_batch(cfg)
        with open(summary['manifest']) as f:
            assert len(f.read().splitlines()) == 1
        assert softcp_validate(summary['manifest'])['entries'] == 0

    def test_ratio_sets_sample_count(self, mocker, tmp_path):
        idx = mocker.MagicMock(name='dataset index')
        idx.__len__.return_value = 300
        mocker.patch(path_pipeline + '.scan_dataset', return_value=idx)
        mocker.patch(path_pipeline + '.build_lesion_bank', return_value=['lesion'])
        def fake_write(cfg, index, idx, bank):
            return ManifestEntry(index, 'images/x.png', 'masks/x.png', (11, index), 'case_000', {}, [],
                                 {'mode': 'soft'}, {})

        write_sample = mocker.patch(path_pipeline + '.write_sample', side_effect=fake_write)

        cfg = run_config(tmp_path, count=None, ratio='3:1')
        summary = subject.synthesize_batch(cfg, jobs=1)
        assert summary['synthetic_images'] == 100
        assert write_sample.call_count == 100
        header, entries = read_manifest(summary['manifest'])
        assert (header['real_count'], header['synthetic_count'], len(entries)) == (300, 100, 100)

    def test_failure_keeps_partial_manifest(self, mocker, phantom):
        cfg = run_config(phantom, count=3)
        real_write = subject.write_sample

        def fail_on_second(cfg, index, idx, bank):
            if index == 1:
                raise CLIError('disk full')
            return real_write(cfg, index, idx, bank)

        mocker.patch(path_pipeline + '.write_sample', side_effect=fail_on_second)
        with pytest.raises(CLIError) as e:
            subject.synthesize_batch(cfg, jobs=1)
        assert 'Sample 1 failed' in str(e.value)
        _, entries = read_manifest(os.path.join(cfg.output_root, 'manifest.jsonl'))
        assert [entry.index for entry in entries] == [0]

    def test_empty_bank(self, phantom):
        cfg = run_config(phantom, min_area=1000)
        with pytest.raises(CLIError):
            subject.synthesize_batch(cfg)

    def test_final_pass_is_recorded(self, phantom):
        cfg = run_config(phantom, count=2, image_transform={'final_pass': True})
        manifest = subject.synthesize_batch(cfg, jobs=1)['manifest']
        _, entries = read_manifest(manifest)
        assert all(len(e.final_pipeline['steps']) == 2 for e in entries)
        assert validate_manifest(manifest)['violations'] == []


class TestPreview():
    def test_grid(self, phantom):
        cfg = run_config(phantom)
        idx, bank = bank_for(cfg)
        grid = subject.render_preview(cfg, 2, idx, bank)
        assert grid.shape == (256, 192, 3)
        assert grid.min() >= 0.0 and grid.max() <= 1.0

        image, _, _ = subject.synthesize_one(cfg, 2, idx, bank)
        assert np.array_equal(grid[:64, 128:, :], np.repeat(image, 3, axis=2))

    def test_writes_grids(self, phantom):
        path = write_config(phantom / 'run.yaml', phantom_config(phantom / 'data', phantom / 'out'))
        result = subject.softcp_preview(path, count=2, start_index=5)
        assert [os.path.basename(p) for p in result['previews']] == ['preview_000005.png', 'preview_000006.png']
        assert result['rows'] == ['soft', 'hard', 'gaussian', 'poisson']
        assert load_image(result['previews'][0]).shape == (256, 192, 3)


@pytest.mark.slow
class TestLargeBatch():
    def test_thousand_samples_validate(self, phantom):
        cfg = run_config(phantom, count=1000, lesions_per_image={1: 0.5, 2: 0.5})
        summary = subject.synthesize_batch(cfg, jobs=4)
        _, entries = read_manifest(summary['manifest'])
        assert len(entries) == 1000
        assert all(lesion['placement']['overlap_lesions'] == 0 for e in entries for lesion in e.lesions)

        report = validate_manifest(summary['manifest'])
        assert report['entries'] == 1000 and report['violations'] == []

    def test_throughput_single_worker(self, phantom):
        cfg = run_config(phantom, count=100, output_size=[256, 256])
        started = time.perf_counter()
        summary = subject.synthesize_batch(cfg, jobs=1)
        elapsed = time.perf_counter() - started
        assert summary['synthetic_images'] == 100
        assert elapsed < 60.0
