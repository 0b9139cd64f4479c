"""Registry and config unit tests."""
import unittest
import tempfile
import glob
import os
import json

import numpy as np

from finitegap import errors
from finitegap import registry
from finitegap import util

def G2():
  return {'base_energy': 0.0, 'gaps': [[1.0, 2.0], [4.0, 4.5]]}

class TestConfigRegistry(unittest.TestCase):
  def setUp(self):
    self.path = util.example_registry()

  def test_init(self):
    r = registry.ConfigRegistry(self.path)
    assert r.path == self.path

  def test_init_check_path(self):
    with self.assertRaises(errors.ConfigError):
      registry.ConfigRegistry('/dev/null')

  def test_init_env(self):
    os.environ[registry.REGISTRY_ENV] = self.path
    try:
      r = registry.ConfigRegistry()
    finally:
      del os.environ[registry.REGISTRY_ENV]
    assert r.path == self.path

  def test_configs(self):
    r = registry.ConfigRegistry(self.path)
    files = glob.glob(os.path.join(self.path, 'configs', '*.json'))
    configs = r.configs()
    assert len(configs) == len(files) == 5
    assert configs == sorted(configs)
    assert 'g1' in configs

  def test_config(self):
    r = registry.ConfigRegistry(self.path)
    config = r.config('g1')
    assert config.name() == 'g1'
    assert len(config.gapset) == 1
    assert config.seed == 1
    self.assertAlmostEqual(config.point().phi[0], 0.5 * np.pi)

  def test_config_missing(self):
    r = registry.ConfigRegistry(self.path)
    with self.assertRaises(errors.ConfigError) as cm:
      r.config('g3')
    assert cm.exception.key == 'name'

  def test_families(self):
    r = registry.ConfigRegistry(self.path)
    assert len(r.config('geometric-8').gapset) == 8
    assert len(r.config('harmonic-64').gapset) == 64
    config = r.config('qp-golden')
    assert config.family is not None
    assert len(config.gapset) > 0
    assert len(config.phi0) == len(config.gapset)

class Test_load_config(unittest.TestCase):
  def assertKey(self, data, key):
    with self.assertRaises(errors.ConfigError) as cm:
      registry.load_config(data)
    self.assertEqual(cm.exception.key, key)

  def test_defaults(self):
    config = registry.load_config(G2())
    assert config.tol == 1e-10
    assert config.quad_order == 64
    assert config.seed is None
    assert np.allclose(config.phi0, 0.5 * np.pi)

  def test_unknown_key(self):
    data = G2()
    data['gap'] = []
    self.assertKey(data, 'gap')

  def test_missing(self):
    self.assertKey({'gaps': [[1.0, 2.0]]}, 'base_energy')
    self.assertKey({'base_energy': 0.0}, 'gaps')

  def test_gaps(self):
    self.assertKey({'base_energy': 0.0, 'gaps': [[1.0]]}, 'gaps')
    self.assertKey({'base_energy': 0.0, 'gaps': [[2.0, 1.0]]}, 'gaps')
    self.assertKey({'base_energy': 0.0, 'gaps': [[1.0, 2.0], [1.5, 3.0]]}, 'gaps')

  def test_values(self):
    self.assertKey(dict(G2(), phi0=[0.1]), 'phi0')
    self.assertKey(dict(G2(), tol=0), 'tol')
    self.assertKey(dict(G2(), tol='small'), 'tol')
    self.assertKey(dict(G2(), quad_order=6.5), 'quad_order')
    self.assertKey(dict(G2(), seed=-1), 'seed')
    self.assertKey(dict(G2(), tags=[]), 'tags')

  def test_family(self):
    config = registry.load_config({'family': {'kind': 'geometric', 'N': 3}})
    assert len(config.gapset) == 3
    self.assertAlmostEqual(config.gapset.gamma[2], 4.0**-3)
    self.assertKey({'family': {'kind': 'geometric', 'N': 3}, 'gaps': []}, 'family')
    self.assertKey({'family': {'kind': 'geometric', 'N': 3}, 'base_energy': 0.0}, 'base_energy')
    self.assertKey({'family': {'kind': 'spiral'}}, 'family.kind')
    self.assertKey({'family': {'kind': 'harmonic'}}, 'family.N')

  def test_json(self):
    data = dict(G2(), name='g2', seed=3, tags={'note': 'x'})
    config = registry.load_config(data)
    again = registry.load_config(config.json())
    assert again.json() == config.json()

class Test_load_file(unittest.TestCase):
  def test_malformed(self):
    with tempfile.NamedTemporaryFile('w', suffix='.json', delete=False) as f:
      f.write('{"base_energy": 0.0,')
    try:
      with self.assertRaises(errors.ConfigError):
        registry.load_file(f.name)
    finally:
      os.unlink(f.name)

  def test_missing(self):
    with self.assertRaises(errors.ConfigError):
      registry.load_file('/nonexistent/config.json')

  def test_roundtrip(self):
    with tempfile.NamedTemporaryFile('w', suffix='.json', delete=False) as f:
      json.dump(G2(), f)
    try:
      config = registry.load_file(f.name)
    finally:
      os.unlink(f.name)
    assert len(config.gapset) == 2
