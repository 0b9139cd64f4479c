"""Base finitegap Entity."""
import numpy as np

class Entity(object):
  """A value object backed by a data dict."""
  # JSON type tag.
  entity_type = None

  def __init__(self, **data):
    """Store data, then run the subclass init hook."""
    data['tags'] = data.get('tags') or {}
    self.data = data
    self.init(**data)

  def init(self, **kwargs):
    """Subclass init hook."""
    pass

  def name(self):
    """A reasonable display name for the entity."""
    return self.data.get('name')

  # Load from JSON.
  @classmethod
  def from_json(cls, data):
    return cls(**data)

  def json(self):
    """Return a JSON-compatible representation of this entity."""
    raise NotImplementedError

  # Tags
  def tags(self):
    return self.data['tags']

  def tag(self, key):
    return self.data['tags'].get(key)

  def set_tag(self, key, value):
    self.add_tags({key:value})

  def add_tags(self, tags):
    self.data['tags'].update(tags)

  # Arrays are shared read-only between values.
  @staticmethod
  def frozen(value, dtype=float):
    a = np.array(value, dtype=dtype)
    a.setflags(write=False)
    return a
