"""
Basic tests for digitop components: configuration, loaders and writers.
"""

import json
import shutil
import tempfile
import unittest
import sys
from pathlib import Path

import pandas as pd

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config_manager import ConfigManager
from src.continuity import DigitalMap, is_continuous_lattice
from src.group import cyclic_group, check_dt_group
from src.image import SimpleClosedCurve, builtin_curve, msc18
from src.lattice import LatticeAdjacency
from src.product import ProductKind, adjacency_existence, c_star, product
from src.utils import (
    format_adjacency_table, format_c_star_summary, format_continuity_summary, format_corpus_summary,
    format_existence_summary, format_group_summary, load_group_file, load_image_file, load_json_file,
    load_map_file, save_results, validate_output_format
)

FIXTURES = Path(__file__).parent.parent / 'fixtures'


class TestConfigManager(unittest.TestCase):
    """Test configuration loading and merging."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def write_config(self, text):
        path = Path(self.temp_dir) / 'config.yaml'
        path.write_text(text, encoding='utf-8')
        return str(path)

    def test_defaults(self):
        config = ConfigManager().config
        self.assertEqual(config.processing.workers, 1)
        self.assertEqual(config.checks.max_subset_size, 8)
        self.assertEqual(config.checks.max_subsets, 200000)
        self.assertEqual(config.checks.window_radius, 3)
        self.assertEqual(config.output.format, 'table')
        self.assertIsNone(config.corpus.directory)

    def test_bundled_config_file(self):
        manager = ConfigManager(str(Path(__file__).parent.parent / 'config.yaml'))
        self.assertTrue(manager.validate_config())
        self.assertEqual(manager.get_output_format(), 'table')

    def test_file_values(self):
        path = self.write_config("processing:\n  workers: 4\noutput:\n  format: json\nchecks:\n  window_radius: 2\n")
        manager = ConfigManager(path)
        self.assertEqual(manager.config.processing.workers, 4)
        self.assertEqual(manager.config.checks.window_radius, 2)
        self.assertEqual(manager.config.checks.max_subset_size, 8)

    def test_cli_args_win(self):
        path = self.write_config("processing:\n  workers: 4\n")
        merged = ConfigManager(path).merge_with_cli_args(workers=2, format='csv', corpus_dir=None)
        self.assertEqual(merged['workers'], 2)
        self.assertEqual(merged['format'], 'csv')
        self.assertNotIn('corpus_dir', merged)

    def test_malformed_file_falls_back(self):
        path = self.write_config("processing: [unclosed\n")
        with self.assertLogs('src.config_manager', level='WARNING'):
            manager = ConfigManager(path)
        self.assertEqual(manager.config.processing.workers, 1)

    def test_validation(self):
        path = self.write_config("processing:\n  workers: 0\n")
        self.assertFalse(ConfigManager(path).validate_config())
        path = self.write_config("output:\n  format: xml\n")
        self.assertFalse(ConfigManager(path).validate_config())
        path = self.write_config("checks:\n  max_subset_size: 0\n")
        self.assertFalse(ConfigManager(path).validate_config())


class TestLoaders(unittest.TestCase):
    """Test file loaders."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_load_image_file(self):
        curve = load_image_file(str(FIXTURES / 'msc18.json'))
        self.assertIsInstance(curve, SimpleClosedCurve)
        self.assertEqual(curve, msc18())

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_json_file(str(Path(self.temp_dir) / 'none.json'))

    def test_invalid_json(self):
        path = Path(self.temp_dir) / 'bad.json'
        path.write_text("{not json", encoding='utf-8')
        with self.assertRaises(ValueError):
            load_json_file(str(path), "image")

    def test_load_group_file(self):
        curve = builtin_curve('sc8_2_4')
        self.assertEqual(load_group_file('cyclic', curve), cyclic_group(curve))
        path = Path(self.temp_dir) / 'group.json'
        path.write_text(json.dumps({'carrier': [[0, 0]], 'table': [[0]]}), encoding='utf-8')
        self.assertEqual(load_group_file(str(path), curve).order, 1)

    def test_load_map_file(self):
        path = Path(self.temp_dir) / 'map.json'
        path.write_text(json.dumps({
            'domain_image': {'dim': 1, 't': 1, 'points': [[0], [1]]},
            'codomain_image': {'dim': 1, 't': 1, 'points': [[0]]},
            'pairs': [[[0], [0]], [[1], [0]]]
        }), encoding='utf-8')
        spec = load_map_file(str(path))
        self.assertEqual(spec.map((1,)), (0,))


class TestWriters(unittest.TestCase):
    """Test result writers and output format validation."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.document = {
            'total': 2, 'passed': 2, 'failed': 0,
            'results': [
                {'id': 'a', 'check': 'k_table', 'passed': True, 'diff': {}, 'error': None},
                {'id': 'b', 'check': 'curve', 'passed': True, 'diff': {}, 'error': None}
            ]
        }
        self.rows = [{'id': r['id'], 'check': r['check'], 'passed': r['passed']} for r in self.document['results']]

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_validate_output_format(self):
        self.assertEqual(validate_output_format('json'), 'json')
        self.assertEqual(validate_output_format('CSV'), 'csv')
        self.assertEqual(validate_output_format('  JSONL  '), 'jsonl')
        with self.assertRaises(ValueError):
            validate_output_format('table')

    def test_save_json(self):
        path = Path(self.temp_dir) / 'out' / 'summary.json'
        self.assertTrue(save_results(self.document, str(path), 'json'))
        with open(path, 'r', encoding='utf-8') as f:
            self.assertEqual(json.load(f), self.document)

    def test_save_jsonl(self):
        path = Path(self.temp_dir) / 'summary.jsonl'
        self.assertTrue(save_results(self.document, str(path), 'jsonl', rows=self.rows))
        lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual([json.loads(line)['id'] for line in lines], ['a', 'b'])

    def test_save_csv(self):
        path = Path(self.temp_dir) / 'summary.csv'
        self.assertTrue(save_results(self.document, str(path), 'csv', rows=self.rows))
        frame = pd.read_csv(path)
        self.assertEqual(list(frame['id']), ['a', 'b'])

    def test_save_unknown_format(self):
        self.assertFalse(save_results(self.document, str(Path(self.temp_dir) / 'x.xml'), 'xml'))


class TestSummaries(unittest.TestCase):
    """Test human-readable summaries."""

    def test_adjacency_table(self):
        text = format_adjacency_table(4)
        for k in ('8', '32', '64', '80'):
            self.assertIn(k, text)

    def test_existence_summary(self):
        diamond = builtin_curve('sc8_2_4')
        text = format_existence_summary(adjacency_existence(product([diamond, diamond]), ProductKind.AP, 1))
        self.assertIn("✅", text)
        self.assertIn("[32, 64]", text)
        text = format_existence_summary(adjacency_existence(product([msc18(), msc18()]), 'normal'))
        self.assertIn("❌", text)
        self.assertIn("t=6", text)

    def test_c_star_summary(self):
        self.assertIn("no C-compatible adjacency exists", format_c_star_summary(c_star(msc18(), msc18())))

    def test_continuity_summary(self):
        f = DigitalMap({(0,): (0,), (1,): (2,)}, LatticeAdjacency(1, 1))
        text = format_continuity_summary(is_continuous_lattice(f, LatticeAdjacency(1, 1)))
        self.assertIn("not continuous", text)

    def test_group_summary(self):
        text = format_group_summary(check_dt_group(msc18(), cyclic_group(msc18())))
        self.assertIn("G_k* with k*=72", text)
        self.assertIn("abelian: True", text)

    def test_corpus_summary(self):
        text = format_corpus_summary({
            'total': 1, 'passed': 0, 'failed': 1,
            'results': [{'id': 'x', 'check': 'k_table', 'passed': False,
                         'diff': {'k': {'expected': [1], 'computed': [2]}}, 'error': None}]
        })
        self.assertIn("expected [1], computed [2]", text)
        self.assertIn("0/1 facts pass", text)


if __name__ == '__main__':
    unittest.main()
