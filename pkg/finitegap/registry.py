"""Read run configurations and the registry of named configs."""
import os
import glob
import json

import numpy as np

from finitegap import entity
from finitegap import errors
from finitegap import gapset

REGISTRY_ENV = 'FINITEGAP_CONFIG_PATH'

KEYS = ['name', 'base_energy', 'gaps', 'family', 'phi0', 'tol', 'quad_order', 'seed', 'tags']

class RunConfig(entity.Entity):
  """A gap set, an initial torus point, and numerical settings."""
  entity_type = 'runconfig'

  def init(self, **data):
    self.gapset = data['gapset']
    self.phi0 = self.frozen(data['phi0'])
    self.tol = float(data['tol'])
    self.quad_order = int(data['quad_order'])
    self.seed = data.get('seed')
    # QPGapFamily when the gaps come from a quasi-periodic family.
    self.family = data.get('family')

  def point(self):
    from finitegap import torus
    return torus.DirichletAngles(gapset=self.gapset, phi=self.phi0)

  def json(self):
    data = {
      'base_energy': self.gapset.base_energy,
      'gaps': self.gapset.data['gaps'],
      'phi0': self.phi0.tolist(),
      'tol': self.tol,
      'quad_order': self.quad_order,
      'seed': self.seed
    }
    if self.name():
      data['name'] = self.name()
    if self.tags():
      data['tags'] = self.tags()
    return data

def _number(data, key, default=None, positive=False):
  value = data.get(key, default)
  if isinstance(value, bool) or not isinstance(value, (int, float)):
    raise errors.ConfigError('%s must be a number: %r'%(key, value), key=key)
  if not np.isfinite(value) or (positive and not value > 0):
    raise errors.ConfigError('%s out of range: %r'%(key, value), key=key)
  return value

def _family(desc):
  """Expand a family description into (GapSet, QPGapFamily or None)."""
  if not isinstance(desc, dict):
    raise errors.ConfigError('family must be an object', key='family')
  kind = desc.get('kind')
  try:
    if kind == 'geometric':
      return gapset.geometric_family(
        int(desc['N']),
        ratio=float(desc.get('ratio', 4.0)),
        base_energy=float(desc.get('base_energy', 0.0))
      ), None
    if kind == 'harmonic':
      return gapset.harmonic_family(
        int(desc['N']),
        base_energy=float(desc.get('base_energy', 0.0))
      ), None
    if kind == 'qp':
      fam = gapset.QPGapFamily.synthetic(
        desc.get('omega', [(1 + 5**0.5) / 2]),
        float(desc['epsilon']),
        float(desc['kappa0']),
        int(desc['max_norm']),
        a0=float(desc.get('a0', 1.0)),
        b0=float(desc.get('b0', 1.0)),
        base_energy=float(desc.get('base_energy', 0.0))
      )
      return fam.gapset()[0], fam
  except KeyError as e:
    raise errors.ConfigError('family is missing %s'%e, key='family.%s'%e.args[0])
  except (TypeError, ValueError) as e:
    raise errors.ConfigError('Invalid family: %s'%e, key='family')
  raise errors.ConfigError('Unknown family kind: %r'%kind, key='family.kind')

def load_config(data):
  """Validate a config dict and return a RunConfig."""
  if not isinstance(data, dict):
    raise errors.ConfigError('Config must be a JSON object')
  for key in data:
    if key not in KEYS:
      raise errors.ConfigError('Unknown key: %s'%key, key=key)
  family = None
  if 'family' in data:
    if 'gaps' in data:
      raise errors.ConfigError('Give either gaps or family', key='family')
    gs, family = _family(data['family'])
    if 'base_energy' in data:
      raise errors.ConfigError('base_energy comes from the family', key='base_energy')
  else:
    if 'base_energy' not in data:
      raise errors.ConfigError('Missing key: base_energy', key='base_energy')
    if 'gaps' not in data:
      raise errors.ConfigError('Missing key: gaps', key='gaps')
    _number(data, 'base_energy')
    gaps = data['gaps']
    if not isinstance(gaps, list) or not all(isinstance(i, list) and len(i) == 2 for i in gaps):
      raise errors.ConfigError('gaps must be a list of [lo, hi] pairs', key='gaps')
    try:
      gs = gapset.GapSet(base_energy=data['base_energy'], gaps=gaps, name=data.get('name'))
    except errors.InvalidGapSetError as e:
      raise errors.ConfigError(str(e), key='gaps')
  phi0 = data.get('phi0', [0.5 * np.pi] * len(gs))
  if not isinstance(phi0, list) or len(phi0) != len(gs):
    raise errors.ConfigError('phi0 must list one angle per gap', key='phi0')
  for i in phi0:
    if isinstance(i, bool) or not isinstance(i, (int, float)) or not np.isfinite(i):
      raise errors.ConfigError('phi0 must hold finite numbers', key='phi0')
  tol = _number(data, 'tol', 1e-10, positive=True)
  quad_order = _number(data, 'quad_order', 64, positive=True)
  if int(quad_order) != quad_order:
    raise errors.ConfigError('quad_order must be an integer', key='quad_order')
  seed = data.get('seed')
  if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
    raise errors.ConfigError('seed must be a non-negative integer', key='seed')
  tags = data.get('tags', {})
  if not isinstance(tags, dict):
    raise errors.ConfigError('tags must be an object', key='tags')
  return RunConfig(
    name=data.get('name'),
    gapset=gs,
    family=family,
    phi0=phi0,
    tol=tol,
    quad_order=int(quad_order),
    seed=seed,
    tags=dict(tags)
  )

def load_file(filename):
  """Read and validate a JSON config file."""
  try:
    with open(filename) as f:
      data = json.load(f)
  except (IOError, OSError) as e:
    raise errors.ConfigError('Cannot read %s: %s'%(filename, e))
  except ValueError as e:
    raise errors.ConfigError('Malformed JSON in %s: %s'%(filename, e))
  return load_config(data)

class ConfigRegistry(object):
  """Directory of named run configurations."""
  def __init__(self, path=None):
    """Path to directory containing configs/."""
    self.path = path or os.getenv(REGISTRY_ENV) or '.'
    if not os.path.isdir(os.path.join(self.path, 'configs')):
      raise errors.ConfigError('Invalid config registry directory: %s'%self.path)

  def configs(self):
    return sorted(
      os.path.basename(i).rpartition('.')[0]
      for i in glob.glob(os.path.join(self.path, 'configs', '*.json'))
    )

  def filename(self, name):
    return os.path.join(self.path, 'configs', '%s.json'%name)

  def config(self, name):
    """Load a config by name."""
    if name not in self.configs():
      raise errors.ConfigError('No config named %s'%name, key='name')
    return load_file(self.filename(name))
