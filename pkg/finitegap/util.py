"""Helpful utilitors."""
import os
import io
import csv
import json
import hashlib

import numpy as np

import finitegap

def jsonable(data):
  """Convert numpy scalars and arrays into plain JSON types."""
  if isinstance(data, dict):
    return dict((str(k), jsonable(v)) for k,v in data.items())
  if isinstance(data, (list, tuple)):
    return [jsonable(i) for i in data]
  if isinstance(data, np.ndarray):
    return jsonable(data.tolist())
  if isinstance(data, np.bool_):
    return bool(data)
  if isinstance(data, np.integer):
    return int(data)
  if isinstance(data, (float, np.floating)):
    value = float(data)
    if np.isfinite(value):
      return value
    # JSON has no inf/nan.
    return str(value)
  return data

def json_dumps(data):
  return json.dumps(
    jsonable(data),
    sort_keys=True,
    indent=4,
    separators=(',', ': ')
  )

def json_pretty_print(data):
  print(json_dumps(data))

def json_pretty_dump(data, f):
  f.write(json_dumps(data))
  f.write('\n')

def sha1json(data):
  """Return SHA1 hash of the canonical JSON form of data."""
  h = hashlib.sha1()
  h.update(json_dumps(data).encode('utf-8'))
  return h.hexdigest()

def sha1file(filename, blocksize=65536):
  """Return SHA1 hash of a file."""
  h = hashlib.sha1()
  with open(filename, 'rb') as f:
    chunk = f.read(blocksize)
    while len(chunk) > 0:
      h.update(chunk)
      chunk = f.read(blocksize)
  return h.hexdigest()

def write_csv(rows, header, f):
  """Write a table; floats use repr so the output is reproducible."""
  writer = csv.writer(f, lineterminator='\n')
  writer.writerow(header)
  for row in rows:
    writer.writerow([repr(float(i)) if isinstance(i, (float, np.floating)) else i for i in row])

def csv_string(rows, header):
  f = io.StringIO()
  write_csv(rows, header, f)
  return f.getvalue()

def metadata(config=None, tol=None, seed=None, **kw):
  """Run metadata attached to every output."""
  data = {
    'version': finitegap.__version__,
    'config_sha1': sha1json(config) if config is not None else None,
    'tol': tol,
    'seed': seed
  }
  data.update(kw)
  return data

def rng(seed=None):
  """Seeded PCG64 generator."""
  return np.random.default_rng(np.random.SeedSequence(seed))

def example_registry(path=None):
  return os.path.join(
    os.path.dirname(__file__),
    'examples'
  )

def example_config(name='g1'):
  from finitegap import registry
  r = registry.ConfigRegistry(path=example_registry())
  return r.config(name)
