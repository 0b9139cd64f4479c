"""Finite gap sets, gap geometry, and spectral-set conditions."""
import itertools
import logging

import numpy as np

from finitegap import entity
from finitegap import errors
from finitegap import geom

log = logging.getLogger(__name__)

# Relative floor on the distance between two gaps.
SEPARATION_FLOOR = 1e-12

class GapSet(entity.Entity):
  """Spectrum S = [E, inf) minus finitely many open gaps."""
  entity_type = 'gapset'

  def init(self, **data):
    try:
      base_energy = float(data['base_energy'])
      gaps = sorted((float(lo), float(hi)) for lo,hi in data.get('gaps') or [])
    except (KeyError, TypeError, ValueError) as e:
      raise errors.InvalidGapSetError('Invalid gap set: %s'%e)
    if not np.isfinite(base_energy):
      raise errors.InvalidGapSetError('Base energy must be finite')
    for lo,hi in gaps:
      if not (np.isfinite(lo) and np.isfinite(hi)):
        raise errors.InvalidGapSetError('Gap (%r, %r) is not finite'%(lo, hi))
      if not base_energy < lo < hi:
        raise errors.InvalidGapSetError(
          'Gap (%r, %r) must satisfy %r < lo < hi'%(lo, hi, base_energy)
        )
    floor = SEPARATION_FLOOR * max(1.0, abs(gaps[-1][1])) if gaps else 0.0
    for (a0,a1),(b0,b1) in zip(gaps, gaps[1:]):
      if b0 - a1 < floor:
        raise errors.InvalidGapSetError(
          'Gaps (%r, %r) and (%r, %r) are not separated'%(a0, a1, b0, b1)
        )
    self.data['base_energy'] = base_energy
    self.data['gaps'] = [list(i) for i in gaps]
    self.base_energy = base_energy
    self.lo = self.frozen([i[0] for i in gaps])
    self.hi = self.frozen([i[1] for i in gaps])
    self.gamma = self.frozen(self.hi - self.lo)
    self.eta0 = self.frozen(self.lo - base_energy)
    # eta[j,l]: distance between closed gaps j and l; inf on the diagonal.
    eta = np.maximum(self.lo[None,:] - self.hi[:,None], self.lo[:,None] - self.hi[None,:])
    np.fill_diagonal(eta, np.inf)
    self.eta = self.frozen(eta)
    self.C = self.frozen(truncated_constants(self)[0])

  def __len__(self):
    return len(self.lo)

  def __eq__(self, other):
    return (
      isinstance(other, GapSet) and
      self.base_energy == other.base_energy and
      self.data['gaps'] == other.data['gaps']
    )

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash((self.base_energy, tuple(map(tuple, self.data['gaps']))))

  def __repr__(self):
    return '<GapSet %r %r>'%(self.base_energy, self.data['gaps'])

  def gaps(self):
    return [tuple(i) for i in self.data['gaps']]

  def scale(self):
    """Energy scale max(1, |E|, |hi_N|)."""
    top = abs(self.hi[-1]) if len(self) else 0.0
    return max(1.0, abs(self.base_energy), top)

  def e_max(self):
    return self.hi[-1] + 1.0 if len(self) else self.base_energy + 1.0

  def bands(self, e_max=None):
    return geom.bands(self.base_energy, self.gaps(), e_max=e_max)

  def json(self):
    data = {
      'base_energy': self.base_energy,
      'gaps': self.data['gaps']
    }
    if self.name():
      data['name'] = self.name()
    if self.tags():
      data['tags'] = self.tags()
    return data

class CraigReport(entity.Entity):
  """Values of the Craig-type and trace conditions."""
  entity_type = 'craigreport'

  def init(self, **data):
    self.craig1_ok = bool(data['craig1_ok'])
    self.craig2_ok = bool(data['craig2_ok'])
    self.trace_ok = bool(data['trace_ok'])

  def values(self, group):
    return self.data[group]

  def json(self):
    return dict((k,v) for k,v in self.data.items() if k != 'tags')

class QPGapFamily(entity.Entity):
  """Gaps labelled by lattice vectors m for a frequency vector omega."""
  entity_type = 'qpfamily'

  def init(self, **data):
    self.omega = self.frozen(data['omega'])
    self.a0 = float(data.get('a0', 1.0))
    self.b0 = float(data.get('b0', 1.0))
    self.epsilon = float(data['epsilon'])
    self.kappa0 = float(data['kappa0'])
    self.base_energy = float(data.get('base_energy', 0.0))
    self.labels = []
    for label in data['labels']:
      m = tuple(int(i) for i in label['m'])
      if len(m) != len(self.omega):
        raise errors.InvalidGapSetError('Label %r does not match omega'%(m,))
      self.labels.append({'m': m, 'gamma': float(label['gamma']), 'eta0': float(label['eta0'])})
    for label in self.labels:
      m = label['m']
      if self.small_divisor(m) < self.a0 * norm(m)**-self.b0:
        raise errors.InvalidGapSetError('Label %r violates the Diophantine condition'%(m,))
      if not label['gamma'] < self.gamma_bound(m):
        raise errors.InvalidGapSetError('Label %r: gap length too large'%(m,))

  @classmethod
  def synthetic(cls, omega, epsilon, kappa0, max_norm, a0=1.0, b0=1.0, base_energy=0.0, **kw):
    """Labels 1 <= |m| <= max_norm, one per +/-m, gap centred at (pi m.omega)^2."""
    omega = np.asarray(omega, dtype=float)
    labels = []
    rng = range(-max_norm, max_norm+1)
    for m in itertools.product(rng, repeat=len(omega)):
      n = norm(m)
      if n < 1 or n > max_norm:
        continue
      # Representative of +/-m: first nonzero entry positive.
      if [i for i in m if i][0] < 0:
        continue
      gamma = epsilon * np.exp(-kappa0 * n)
      centre = (np.pi * np.dot(m, omega))**2
      labels.append({
        'm': list(m),
        'gamma': gamma,
        'eta0': centre - 0.5 * gamma
      })
    return cls(
      omega=omega.tolist(),
      epsilon=epsilon,
      kappa0=kappa0,
      a0=a0,
      b0=b0,
      base_energy=base_energy,
      labels=labels,
      **kw
    )

  def small_divisor(self, m):
    return abs(np.dot(m, self.omega))

  def gamma_bound(self, m):
    return 2 * self.epsilon * np.exp(-self.kappa0 * norm(m) / 2.0)

  def gapset(self):
    """GapSet of the family, with the label of each (sorted) gap."""
    order = sorted(range(len(self.labels)), key=lambda i:self.labels[i]['eta0'])
    gaps = []
    for i in order:
      label = self.labels[i]
      lo = self.base_energy + label['eta0']
      gaps.append((lo, lo + label['gamma']))
    gs = GapSet(base_energy=self.base_energy, gaps=gaps, name=self.name())
    return gs, [self.labels[i]['m'] for i in order]

  def json(self):
    return {
      'omega': self.omega.tolist(),
      'a0': self.a0,
      'b0': self.b0,
      'epsilon': self.epsilon,
      'kappa0': self.kappa0,
      'base_energy': self.base_energy,
      'labels': [{'m': list(i['m']), 'gamma': i['gamma'], 'eta0': i['eta0']} for i in self.labels]
    }

def norm(m):
  """l1 norm of a lattice label."""
  return sum(abs(i) for i in m)

##### Geometry #####

def truncated_constants(gs, kept=None):
  """C_{j,N} and D_{j,N} over the kept gaps, for every j."""
  n = len(gs)
  mask = np.ones(n, dtype=bool)
  if kept is not None:
    mask = np.zeros(n, dtype=bool)
    mask[list(kept)] = True
  factors = np.where(mask[None,:], 1.0 + gs.gamma[None,:] / gs.eta, 1.0)
  C = np.sqrt(gs.eta0 + gs.gamma) * np.sqrt(np.prod(factors, axis=1))
  D = 2 * np.sum(gs.gamma[mask]) + 4 * gs.eta0 + 4 * abs(gs.base_energy)
  return C, D

def geometry(gs):
  """Table of (gamma_j, eta_j0, {eta_jl}, C_j)."""
  ret = []
  for j in range(len(gs)):
    ret.append({
      'gamma': float(gs.gamma[j]),
      'eta0': float(gs.eta0[j]),
      'eta': dict((l, float(gs.eta[j,l])) for l in range(len(gs)) if l != j),
      'C': float(gs.C[j])
    })
  return ret

def truncate(gs, N):
  """Keep the N largest gaps by length (ties by position), re-sorted by position."""
  if not 0 <= N <= len(gs):
    raise ValueError('Cannot keep %s of %s gaps'%(N, len(gs)))
  kept = sorted(np.argsort(-gs.gamma, kind='stable')[:N].tolist())
  gaps = [gs.gaps()[i] for i in kept]
  return GapSet(base_energy=gs.base_energy, gaps=gaps, name=gs.name()), kept

##### Conditions #####

def _sup(values):
  return float(np.max(values)) if len(values) else 0.0

def _ok(values, threshold):
  return all(np.isfinite(v) and v <= threshold for v in values.values())

def craig_check(gs, threshold=np.inf):
  """Evaluate the Craig-type and trace conditions on gs."""
  g = gs.gamma
  g12 = np.sqrt(g)
  C = gs.C
  eta0 = gs.eta0
  pair = g12[:,None] * g12[None,:] / gs.eta
  craig1 = {
    'sum_gamma': float(np.sum(g)),
    'sup_gamma_C': _sup(g * C),
    'sup_edge': _sup(g12 * C / eta0),
    'sup_cross': _sup(np.sum(pair, axis=1) * C)
  }
  craig2 = {
    'sum_sqrt_gamma': float(np.sum(g12)),
    'sup_edge': _sup(g12 * (1 + eta0) * C / eta0),
    'sup_cross_half': _sup(np.sum(np.sqrt(pair), axis=1) * (1 + eta0) * C),
    'sup_cross_one': _sup(np.sum(pair, axis=1) * (1 + eta0) * C)
  }
  trace = {
    'sum_weighted_gamma': float(np.sum((1 + eta0**2) * g))
  }
  craig2_ok = _ok(craig2, threshold)
  return CraigReport(
    craig1=craig1,
    craig2=craig2,
    trace=trace,
    craig1_ok=_ok(craig1, threshold) or craig2_ok,
    craig2_ok=craig2_ok,
    trace_ok=_ok(trace, threshold),
    threshold=threshold
  )

def summability_trend(gs, N_list, threshold=np.inf):
  """Condition values for each truncation S^N."""
  rows = []
  for N in N_list:
    report = craig_check(truncate(gs, N)[0], threshold=threshold)
    row = {'N': N}
    for group in ['craig1', 'craig2', 'trace']:
      for k,v in report.values(group).items():
        row['%s.%s'%(group, k)] = v
    row['craig1_ok'] = report.craig1_ok
    row['craig2_ok'] = report.craig2_ok
    row['trace_ok'] = report.trace_ok
    rows.append(row)
  return rows

def window_measure(gs, x0, eps, e_max=None):
  """|S cut at e_max, intersected with [x0-eps, x0+eps]|."""
  e_max = gs.e_max() if e_max is None else e_max
  return geom.measure(gs.bands(e_max), x0 - eps, x0 + eps)

def carleson_check(gs, tau, sample_count=64, levels=12):
  """Sampled check of |S n [x0-e, x0+e]| >= tau e for x0 in S, e = 2^-k."""
  if not 0 < tau <= 1:
    raise ValueError('tau must lie in (0, 1]: %r'%tau)
  e_max = gs.e_max()
  points = geom.sample_points(gs.bands(e_max), sample_count)
  epsilons = [2.0**-k for k in range(levels)]
  worst = (np.inf, None, None)
  for x0 in points:
    for eps in epsilons:
      ratio = window_measure(gs, x0, eps, e_max) / eps
      if ratio < worst[0]:
        worst = (ratio, x0, eps)
  return {
    'ok': bool(worst[0] >= tau),
    'tau': tau,
    'ratio': worst[0],
    'x0': worst[1],
    'eps': worst[2],
    'grid': {
      'e_max': e_max,
      'points': len(points),
      'sample_count': sample_count,
      'epsilons': epsilons
    }
  }

def qp_family_check(fam, a=1.0, b=1.0, c=1.0, L=1.0, D=1.0, F=1.0):
  """Check the gap bounds of a quasi-periodic family label by label."""
  gs, order = fam.gapset()
  index = dict((m, i) for i,m in enumerate(order))
  labels = [i['m'] for i in fam.labels]
  checks = {}

  def record(name, failures, worst):
    checks[name] = {
      'ok': not failures,
      'first_violation': list(failures[0]) if failures else None,
      'worst': worst
    }

  # Diophantine and gap length
  fail, worst = [], np.inf
  for m in labels:
    margin = fam.small_divisor(m) / (fam.a0 * norm(m)**-fam.b0)
    worst = min(worst, margin)
    if margin < 1:
      fail.append(m)
  record('diophantine', fail, worst)

  fail, worst = [], 0.0
  for label in fam.labels:
    ratio = label['gamma'] / fam.gamma_bound(label['m'])
    worst = max(worst, ratio)
    if not ratio < 1:
      fail.append(label['m'])
  record('gammam', fail, worst)

  # Gap separation; n = 0 is the base energy, at distance eta_{m,0}.
  fail, worst = [], np.inf
  for m in labels:
    floor = a * norm(m)**-b
    separations = [gs.eta0[index[m]]] + [
      gs.eta[index[m], index[n]]
      for n in labels if n != m and norm(m) >= norm(n)
    ]
    margin = min(separations) / floor
    worst = min(worst, margin)
    if margin < 1:
      fail.append(m)
  record('etamnlower', fail, worst)

  fail, worst = [], 0.0
  for m in labels:
    ratio = gs.eta0[index[m]] / (c * norm(m)**2)
    worst = max(worst, ratio)
    if ratio > 1:
      fail.append(m)
  record('etam0upper', fail, worst)

  # R_m = {n != m: gamma_n > L eta_nm^4}
  fail, worst = [], 0.0
  for m in labels:
    i = index[m]
    count = sum(1 for n in labels if n != m and gs.gamma[index[n]] > L * gs.eta[index[n], i]**4)
    bound = np.log2(np.log2(max(norm(m), 2))) + D
    worst = max(worst, count - bound)
    if count > bound:
      fail.append(m)
  record('rm_bound', fail, worst)

  fail, worst = [], 0.0
  for m in labels:
    M = max(norm(m), 3)
    bound = F * np.exp(F * np.log(M) * np.log(np.log(M)))
    ratio = gs.C[index[m]] / bound
    worst = max(worst, ratio)
    if ratio > 1:
      fail.append(m)
  record('cmsubexp', fail, worst)
  log.debug('qp family checks: %s', dict((k, v['ok']) for k,v in checks.items()))
  return {
    'ok': all(v['ok'] for v in checks.values()),
    'constants': {'a': a, 'b': b, 'c': c, 'L': L, 'D': D, 'F': F},
    'checks': checks
  }

##### Families #####

def geometric_family(N, ratio=4.0, base_energy=0.0):
  """gamma_j = ratio^-j, gap j starting at E + j."""
  return GapSet(
    base_energy=base_energy,
    gaps=[(base_energy + j, base_energy + j + ratio**-j) for j in range(1, N+1)],
    name='geometric-%s'%N
  )

def harmonic_family(N, base_energy=0.0):
  """gamma_j = 1/j, gap j starting at E + 2j."""
  return GapSet(
    base_energy=base_energy,
    gaps=[(base_energy + 2*j, base_energy + 2*j + 1.0/j) for j in range(1, N+1)],
    name='harmonic-%s'%N
  )
