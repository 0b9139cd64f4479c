"""Interval utilities for spectra."""
import numpy as np

def bands(base_energy, gaps, e_max=None):
  """Closed intervals of S = [E, inf) minus the open gaps, cut at e_max."""
  e_max = np.inf if e_max is None else e_max
  ret = []
  lo = base_energy
  for a,b in gaps:
    ret.append((lo, a))
    lo = b
  ret.append((lo, e_max))
  return [(a, min(b, e_max)) for a,b in ret if a <= e_max]

def measure(intervals, a, b):
  """Lebesgue measure of the union of disjoint intervals within [a, b]."""
  total = 0.0
  for lo,hi in intervals:
    lo, hi = max(lo, a), min(hi, b)
    if hi > lo:
      total += hi - lo
  return total

def contains(intervals, x):
  return any(lo <= x <= hi for lo,hi in intervals)

def distance(intervals, z):
  """Distance from a complex (or real) point to a union of real intervals."""
  z = complex(z)
  ret = np.inf
  for lo,hi in intervals:
    nearest = min(max(z.real, lo), hi)
    ret = min(ret, abs(z - nearest))
  return ret

def sample_points(intervals, count):
  """Deterministic points: every interval edge plus a uniform grid restricted to the union."""
  finite = [(lo, hi) for lo,hi in intervals if np.isfinite(hi)]
  if not finite:
    return []
  a, b = finite[0][0], finite[-1][1]
  points = set()
  for lo,hi in finite:
    points.add(lo)
    points.add(hi)
  for x in np.linspace(a, b, count):
    if contains(finite, x):
      points.add(float(x))
  return sorted(points)
