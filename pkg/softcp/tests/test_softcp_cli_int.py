import csv
import json
import os
from io import StringIO

import numpy as np
import pytest
from knack.util import CLIError

from softcp.__main__ import dispatch
from softcp.operations.evaluate import evaluate_directories
from softcp.tests.softcp_test_tools import build_phantom_dataset, phantom_config, write_config, write_png


@pytest.fixture()
def workspace(tmp_path):
    build_phantom_dataset(str(tmp_path / 'data'))
    config = write_config(tmp_path / 'run.yaml', phantom_config(tmp_path / 'data', tmp_path / 'out', count=2))
    return tmp_path, config


def invoke(tmp_path, *args):
    out = StringIO()
    code = dispatch(list(args), out_file=out, config_dir=str(tmp_path / '.softcp'))
    return code, out.getvalue()


@pytest.fixture()
def prediction_dirs(tmp_path):
    pred_dir = tmp_path / 'pred'
    truth_dir = tmp_path / 'truth'
    pred_dir.mkdir()
    truth_dir.mkdir()
    truth = np.zeros((8, 8))
    truth[0, 0:6] = 255
    pred = np.zeros((8, 8))
    pred[0, 0:3] = 255
    pred[7, 7] = 255
    write_png(str(truth_dir / 'case.png'), truth)
    write_png(str(pred_dir / 'case_mask.png'), pred)
    write_png(str(truth_dir / 'extra.png'), truth)
    return str(pred_dir), str(truth_dir)


class TestAugmentCommand():
    def test_augment_then_validate(self, workspace):
        tmp_path, config = workspace
        code, output = invoke(tmp_path, 'augment', '--config', config, '--jobs', '1')
        assert code == 0
        assert json.loads(output)['synthetic_images'] == 2

        manifest = str(tmp_path / 'out' / 'manifest.jsonl')
        code, output = invoke(tmp_path, 'validate', '--manifest', manifest)
        assert code == 0
        assert '0 violations' in output

    def test_overrides_reach_manifest(self, workspace):
        tmp_path, config = workspace
        out = str(tmp_path / 'other')
        code, _ = invoke(tmp_path, 'augment', '-c', config, '--count', '1', '--seed', '42', '--blend', 'HARD',
                         '--out', out, '-j', '1')
        assert code == 0
        with open(os.path.join(out, 'manifest.jsonl')) as f:
            header = json.loads(f.readline())
            sample = json.loads(f.readline())
        assert header['overrides'] == {'blend.mode': 'hard', 'count': 1, 'output_root': out, 'seed': 42}
        assert sample['seed'] == [42, 0]
        assert sample['blend'] == {'mode': 'hard'}

    @pytest.mark.parametrize("args", [
        ['augment'],
        ['augment', '--ratio', '3:1', '--count', '2'],
        ['augment', '--blend', 'feather'],
        ['augment', '--seed', '-1'],
        ['augment', '--jobs', '0'],
        ['augment', '--ratio', 'lots'],
        ['preview', '--count', '0'],
    ])
    def test_usage_errors(self, workspace, args):
        tmp_path, config = workspace
        if args != ['augment']:
            args = args + ['--config', config]
        code, _ = invoke(tmp_path, *args)
        assert code == 2
        assert not os.path.exists(str(tmp_path / 'out' / 'manifest.jsonl'))

    def test_missing_config_file(self, tmp_path):
        code, _ = invoke(tmp_path, 'augment', '--config', str(tmp_path / 'absent.yaml'))
        assert code == 1

    def test_validate_reports_violations(self, workspace):
        tmp_path, config = workspace
        assert invoke(tmp_path, 'augment', '--config', config, '--jobs', '1')[0] == 0
        os.remove(str(tmp_path / 'out' / 'images' / 'syn_000001.png'))
        code, _ = invoke(tmp_path, 'validate', '-m', str(tmp_path / 'out' / 'manifest.jsonl'))
        assert code == 1


class TestOtherCommands():
    def test_preview(self, workspace):
        tmp_path, config = workspace
        code, output = invoke(tmp_path, 'preview', '--config', config, '--count', '1', '--blend', 'gaussian')
        assert code == 0
        assert os.path.exists(str(tmp_path / 'out' / 'preview' / 'preview_000000.png'))
        assert json.loads(output)['columns'] == ['background', 'weights', 'result']

    def test_extract_lesions(self, workspace):
        tmp_path, config = workspace
        code, output = invoke(tmp_path, 'extract-lesions', '--config', config)
        assert code == 0
        assert json.loads(output)['instances'] == 6
        assert os.path.exists(str(tmp_path / 'out' / 'lesions' / 'bank.json'))

    def test_init_config(self, tmp_path):
        target = str(tmp_path / 'softcp.yaml')
        assert invoke(tmp_path, 'init-config', '--out', target)[0] == 0
        assert invoke(tmp_path, 'init-config', '--out', target)[0] == 1
        assert invoke(tmp_path, 'init-config', '--out', target, '--force')[0] == 0

    def test_eval(self, tmp_path, prediction_dirs):
        pred_dir, truth_dir = prediction_dirs
        scores_csv = str(tmp_path / 'scores.csv')
        code, _ = invoke(tmp_path, 'eval', '--pred-dir', pred_dir, '--truth-dir', truth_dir, '--out', scores_csv)
        assert code == 0
        with open(scores_csv, newline='') as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 1
        counts = tuple(rows[0][key] for key in ('class', 'tp', 'fp', 'fn', 'tn'))
        assert counts == ('1', '3', '1', '3', '57')
        assert float(rows[0]['dsc']) == pytest.approx(0.6)

    def test_eval_bad_classes(self, tmp_path, prediction_dirs):
        pred_dir, truth_dir = prediction_dirs
        code, _ = invoke(tmp_path, 'eval', '--pred-dir', pred_dir, '--truth-dir', truth_dir, '--classes', '0=zero')
        assert code == 2


class TestEvaluateDirectories():
    def test_scores(self, prediction_dirs):
        rows = evaluate_directories(prediction_dirs[0], prediction_dirs[1], {0: 0, 255: 1})
        assert rows[0]['iou'] == pytest.approx(3 / 7.0)
        assert rows[0]['accuracy'] == pytest.approx(0.9375)
        assert rows[0]['mean_dsc'] == pytest.approx(0.6)
        assert rows[0]['images'] == 1

    def test_no_pairs(self, tmp_path):
        (tmp_path / 'a').mkdir()
        (tmp_path / 'b').mkdir()
        with pytest.raises(CLIError):
            evaluate_directories(str(tmp_path / 'a'), str(tmp_path / 'b'), {0: 0, 255: 1})
