"""Command line unit tests."""
import unittest
import tempfile
import shutil
import json
import os
from unittest import mock

import numpy as np

from finitegap import cli
from finitegap import util
from finitegap import verify

class TestCLI(unittest.TestCase):
  def setUp(self):
    self.tmpdir = tempfile.mkdtemp()
    self.configs = os.path.join(util.example_registry(), 'configs')

  def tearDown(self):
    shutil.rmtree(self.tmpdir)

  def path(self, name):
    return os.path.join(self.tmpdir, name)

  def config(self, name):
    return os.path.join(self.configs, '%s.json'%name)

  def dump(self, name, data):
    with open(self.path(name), 'w') as f:
      json.dump(data, f)
    return self.path(name)

  def load(self, name):
    with open(self.path(name)) as f:
      return json.load(f)

  def read(self, name):
    with open(self.path(name)) as f:
      return f.read()

  def test_usage(self):
    self.assertEqual(cli.run([]), 2)
    self.assertEqual(cli.run(['spin']), 2)
    self.assertEqual(cli.run(['flow']), 2)

  def test_gapset_check(self):
    argv = ['gapset', 'check', self.config('g2'), '--tau', '0.5']
    self.assertEqual(cli.run(argv + ['--out', self.path('a.json')]), 0)
    self.assertEqual(cli.run(argv + ['--out', self.path('b.json')]), 0)
    assert self.read('a.json') == self.read('b.json')
    data = self.load('a.json')
    assert len(data['geometry']) == 2
    assert data['metadata']['config_sha1']
    assert 'carleson' in data

  def test_gapset_trend(self):
    argv = ['gapset', 'trend', self.config('harmonic-64'), '--N', '4,16,64', '--out', self.path('trend.csv')]
    self.assertEqual(cli.run(argv), 0)
    lines = self.read('trend.csv').splitlines()
    assert lines[0].startswith('# ')
    body = [i for i in lines if not i.startswith('#')]
    assert len(body) == 4

  def test_gapset_qp(self):
    argv = ['gapset', 'check', self.config('g2'), '--qp', '--out', self.path('qp.json')]
    self.assertEqual(cli.run(argv), 2)
    argv = ['gapset', 'check', self.config('qp-golden'), '--qp', '--c', '26', '--F', '8', '--out', self.path('qp.json')]
    self.assertEqual(cli.run(argv), 0)
    assert 'qp' in self.load('qp.json')

  def test_malformed(self):
    with open(self.path('bad.json'), 'w') as f:
      f.write('{"gaps": [[1, 2]')
    self.assertEqual(cli.run(['gapset', 'check', self.path('bad.json')]), 2)
    self.assertEqual(cli.run(['gapset', 'check', self.path('missing.json')]), 2)

  def test_bad_key(self):
    filename = self.dump('c.json', {'base_energy': 0.0, 'gaps': [[1.0, 2.0]], 'tolerance': 1e-8})
    self.assertEqual(cli.run(['flow', '--config', filename]), 2)
    filename = self.dump('d.json', {'base_energy': 0.0, 'gaps': [[2.0, 1.0]]})
    self.assertEqual(cli.run(['flow', '--config', filename]), 2)

  def test_pipeline(self):
    argv = [
      'flow', '--config', self.config('g2'),
      '--x0', '0', '--x1', '0.06', '--nx', '7',
      '--t0', '0', '--t1', '0.004', '--nt', '5',
      '--out', self.path('grid.json')
    ]
    self.assertEqual(cli.run(argv), 0)
    grid = self.load('grid.json')
    assert np.array(grid['phi']).shape == (7, 5, 2)
    argv = ['reconstruct', '--grid', self.path('grid.json'), '--out', self.path('field.json')]
    self.assertEqual(cli.run(argv), 0)
    field = self.load('field.json')
    assert field['metadata']['config_sha1'] == grid['metadata']['config_sha1']
    argv = ['residual', '--field', self.path('field.json'), '--out', self.path('residual.json')]
    self.assertEqual(cli.run(argv), 0)
    assert self.load('residual.json')['max'] < 1e-4
    argv = ['abel', '--config', self.config('g2'), '--grid', self.path('grid.json'), '--out', self.path('abel.json')]
    self.assertEqual(cli.run(argv), 0)
    assert len(self.load('abel.json')['delta']) == 2
    argv = ['abel', '--config', self.config('g1'), '--grid', self.path('grid.json')]
    self.assertEqual(cli.run(argv), 2)

  def test_bad_grid(self):
    filename = self.dump('grid.json', {'x_nodes': [0.0]})
    self.assertEqual(cli.run(['reconstruct', '--grid', filename]), 2)

  def test_approx_sweep(self):
    argv = [
      'approx', 'sweep', '--config', self.config('g2'),
      '--N', '1,2', '--nx', '5', '--nt', '3', '--out', self.path('sweep.csv')
    ]
    self.assertEqual(cli.run(argv), 0)
    lines = [i for i in self.read('sweep.csv').splitlines() if not i.startswith('#')]
    assert lines[0] == 'N,D_N,K_N,m,L,C,corner_ok,stability_ok,stability_worst'
    assert len(lines) == 3
    self.assertEqual(cli.run(argv[:-4] + ['--N', '3']), 2)

  def test_oracle(self):
    x = np.arange(64) * 2 * np.pi / 64
    filename = self.dump('init.json', {'period': 2 * np.pi, 'samples': (1e-3 * np.cos(x)).tolist()})
    argv = ['oracle', '--init', filename, '--T', '0.01', '--dt', '1e-3', '--out', self.path('out.json')]
    self.assertEqual(cli.run(argv), 0)
    data = self.load('out.json')
    self.assertAlmostEqual(data['time'], 0.01)
    assert len(data['samples']) == 64

  def test_oracle_errors(self):
    filename = self.dump('short.json', {'period': 1.0, 'samples': [0.0] * 100})
    self.assertEqual(cli.run(['oracle', '--init', filename]), 2)
    filename = self.dump('noperiod.json', {'samples': [0.0] * 64})
    self.assertEqual(cli.run(['oracle', '--init', filename]), 2)
    samples = [0.0] * 64
    samples[5] = float('nan')
    filename = self.dump('nan.json', {'period': 1.0, 'samples': samples})
    with np.errstate(all='ignore'):
      self.assertEqual(cli.run(['oracle', '--init', filename, '--T', '0.001', '--dt', '1e-4']), 3)
    self.assertEqual(cli.run(['oracle']), 2)

  def test_verify(self):
    argv = ['verify', '--quick', '--only', 'harmonic_basis,dubrovin_identity', '--out', self.path('v.json')]
    self.assertEqual(cli.run(argv), 0)
    results = self.load('v.json')['results']
    assert [r['name'] for r in results] == ['dubrovin_identity', 'harmonic_basis']
    self.assertEqual(cli.run(['verify', '--only', 'everything']), 2)

  def test_verify_exit(self):
    checks = [
      ('passes', lambda quick, seed:(0.5, 1.0, {})),
      ('fails', lambda quick, seed:(2.0, 1.0, {}))
    ]
    with mock.patch.object(verify, 'CHECKS', checks):
      self.assertEqual(cli.run(['verify', '--only', 'passes']), 0)
      self.assertEqual(cli.run(['verify', '--out', self.path('v.json')]), 1)
    results = self.load('v.json')['results']
    assert [r['ok'] for r in results] == [True, False]
