"""Integrate the translation flow d_x phi = Psi(phi) and the KdV flow d_t phi = Xi(phi)."""
import logging

import numpy as np

from finitegap import entity
from finitegap import errors
from finitegap import gapset
from finitegap import torus

log = logging.getLogger(__name__)

# Dormand-Prince 5(4) tableau.
A = [
  [],
  [1/5],
  [3/40, 9/40],
  [44/45, -56/15, 32/9],
  [19372/6561, -25360/2187, 64448/6561, -212/729],
  [9017/3168, -355/33, 46732/5247, 49/176, -5103/18656],
  [35/384, 0, 500/1113, 125/192, -2187/6784, 11/84]
]
# 5th order weights minus embedded 4th order weights.
E = [71/57600, 0, -71/16695, 71/1920, -17253/339200, 22/525, -1/40]

# Step size controller.
SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
ALPHA = 0.7 / 4
BETA = 0.4 / 4
UNDERFLOW = 1e-14

class Integrator(object):
  """Adaptive Dormand-Prince 5(4) for a batch of torus points.

  All rows share one step size. The error estimate is measured in the torus
  tangent norm sup_j gamma_j^(1/2)|e_j| and controlled per unit step:
  err <= (atol + rtol ||y||) |h|.
  """
  def __init__(self, field, gs, atol=1e-10, rtol=0.0, dense=False, h0=None, max_steps=10**7):
    if not atol > 0 or rtol < 0:
      raise ValueError('Tolerances must be positive')
    self.field = field
    self.gapset = gs
    self.atol = atol
    self.rtol = rtol
    self.dense = dense
    self.h0 = h0
    self.max_steps = max_steps
    self.segments = []
    self.stats = {'accepted': 0, 'rejected': 0, 'evaluations': 0}

  def _eval(self, y):
    self.stats['evaluations'] += 1
    return self.field(y)

  def _norm(self, v):
    return float(np.max(torus.tangent_norm(self.gapset, v)))

  def _step(self, y, f, h):
    k = [f]
    for row in A[1:]:
      dy = sum(a * ki for a,ki in zip(row, k) if a)
      k.append(self._eval(y + h * dy))
    # The last stage is evaluated at the 5th order solution.
    y_new = y + h * sum(a * ki for a,ki in zip(A[-1], k) if a)
    err = h * sum(e * ki for e,ki in zip(E, k) if e)
    return y_new, k[-1], err

  def run(self, y0, targets):
    """Advance y0 (shape (B, N)) through the signed offsets in targets.

    Targets must move monotonically away from 0. Returns an array of shape
    (len(targets), B, N).
    """
    y = np.array(y0, dtype=float)
    targets = np.asarray(targets, dtype=float)
    out = np.empty((len(targets),) + y.shape)
    if y.shape[-1] == 0 or len(targets) == 0:
      out[...] = y
      return out
    f = self._eval(y)
    h = self.h0 or 0.05 / max(1.0, float(np.max(np.abs(f))))
    err_prev = 1.0
    x = 0.0
    for i,target in enumerate(targets):
      while x != target:
        if self.stats['accepted'] + self.stats['rejected'] >= self.max_steps:
          raise errors.NumericalError('Too many steps at x=%r'%x)
        span = target - x
        landing = abs(span) <= h
        if landing:
          step = span
        elif abs(span) < 2 * h:
          step = 0.5 * span
        else:
          step = np.copysign(h, span)
        y_new, f_new, err = self._step(y, f, step)
        scale = (self.atol + self.rtol * self._norm(y)) * abs(step)
        ratio = self._norm(err) / scale
        if ratio <= 1.0:
          self.stats['accepted'] += 1
          if self.dense:
            self.segments.append((x, step, y, y_new, f, f_new))
          x = target if landing else x + step
          y, f = y_new, f_new
          if ratio == 0:
            factor = FAC_MAX
          else:
            factor = SAFETY * ratio**-ALPHA * err_prev**BETA
          factor = min(FAC_MAX, max(FAC_MIN, factor))
          err_prev = max(ratio, 1e-4)
          h_new = abs(step) * factor
          # Keep the step that was cut short to land on a node.
          h = max(h_new, h) if landing else h_new
        else:
          self.stats['rejected'] += 1
          h = abs(step) * max(FAC_MIN, SAFETY * ratio**-ALPHA)
        if h < UNDERFLOW * (1 + abs(x)):
          raise errors.StepSizeUnderflowError(
            'Step size underflow at x=%r (h=%r)'%(x, h),
            x=x,
            step=h
          )
      out[i] = y
    log.debug('integrated to %r: %s', x, self.stats)
    return out

def hermite(segment, s):
  """Cubic Hermite dense output at fraction s of an accepted step."""
  x0, h, y0, y1, f0, f1 = segment
  s2 = s * s
  s3 = s2 * s
  return (
    (2*s3 - 3*s2 + 1) * y0 +
    (s3 - 2*s2 + s) * h * f0 +
    (-2*s3 + 3*s2) * y1 +
    (s3 - s2) * h * f1
  )

class FlowState(entity.Entity):
  """A torus point at (x, t) with its integration record."""
  entity_type = 'flowstate'

  def init(self, **data):
    self.x = float(data.get('x', 0.0))
    self.t = float(data.get('t', 0.0))
    self.point = data['point']
    tol = data.get('tol', (1e-10, 0.0))
    if not isinstance(tol, (list, tuple)):
      tol = (tol, 0.0)
    self.atol, self.rtol = float(tol[0]), float(tol[1])
    if not self.atol > 0:
      raise ValueError('Tolerance must be positive')
    self.kept = data.get('kept')
    self.stats = dict(data.get('stats') or {'accepted': 0, 'rejected': 0, 'evaluations': 0})

  def advance(self, dx=0.0, dt=0.0):
    """Flow by dt in t, then by dx in x; returns a new state."""
    psi, xi = torus.fields(self.point.gapset, self.kept)
    stats = dict(self.stats)
    phi = self.point.phi
    for field,d in [(xi, dt), (psi, dx)]:
      if d == 0:
        continue
      integ = Integrator(field, self.point.gapset, atol=self.atol, rtol=self.rtol)
      phi = integ.run(phi[None,:], [d])[0,0]
      for k,v in integ.stats.items():
        stats[k] = stats.get(k, 0) + v
    return FlowState(
      x=self.x + dx,
      t=self.t + dt,
      point=self.point.replace(phi),
      tol=(self.atol, self.rtol),
      kept=self.kept,
      stats=stats
    )

  def json(self):
    return {
      'x': self.x,
      't': self.t,
      'point': self.point.json(),
      'tol': [self.atol, self.rtol],
      'kept': self.kept,
      'stats': self.stats
    }

class TrajectoryGrid(entity.Entity):
  """Torus points phi[i, j] at (x_nodes[i], t_nodes[j])."""
  entity_type = 'trajectorygrid'

  def init(self, **data):
    gs = data['gapset']
    if isinstance(gs, dict):
      gs = gapset.GapSet.from_json(gs)
    self.gapset = gs
    self.x_nodes = self.frozen(data['x_nodes'])
    self.t_nodes = self.frozen(data['t_nodes'])
    self.phi = self.frozen(data['phi']).reshape(len(self.x_nodes), len(self.t_nodes), len(gs))
    self.kept = data.get('kept')
    self.tol = data.get('tol')
    self.stats = data.get('stats') or {}

  def mask(self):
    return None if self.kept is None else torus.kept_mask(self.gapset, self.kept)

  def point(self, i, j):
    return torus.DirichletAngles(gapset=self.gapset, phi=self.phi[i,j])

  def json(self):
    return {
      'gapset': self.gapset.json(),
      'x_nodes': self.x_nodes.tolist(),
      't_nodes': self.t_nodes.tolist(),
      'phi': self.phi.tolist(),
      'kept': self.kept,
      'tol': self.tol,
      'stats': self.stats
    }

def _flow(p, field, d, tol):
  if d == 0:
    return p
  integ = Integrator(field, p.gapset, atol=tol)
  return p.replace(integ.run(p.phi[None,:], [d])[0,0])

def flow_x(p, dx, tol=1e-10, kept=None):
  """Endpoint of the translation flow."""
  return _flow(p, torus.fields(p.gapset, kept)[0], dx, tol)

def flow_t(p, dt, tol=1e-10, kept=None):
  """Endpoint of the KdV flow."""
  return _flow(p, torus.fields(p.gapset, kept)[1], dt, tol)

def along(field, gs, y0, nodes, tol, stats=None):
  """Integrate a batch y0 (B, N) to every node; returns (len(nodes), B, N)."""
  nodes = np.asarray(nodes, dtype=float)
  out = np.empty((len(nodes),) + y0.shape)
  out[nodes == 0] = y0
  for sign in [1, -1]:
    select = np.nonzero(sign * nodes > 0)[0]
    if len(select) == 0:
      continue
    order = select[np.argsort(sign * nodes[select])]
    integ = Integrator(field, gs, atol=tol)
    out[order] = integ.run(y0, nodes[order])
    if stats is not None:
      for k,v in integ.stats.items():
        stats[k] = stats.get(k, 0) + v
  return out

def window_nodes(lo, hi, count):
  """count uniform nodes on [lo, hi] with 0 among them.

  A node within 1e-9 spacings of 0 is snapped to 0; otherwise 0 is inserted.
  """
  nodes = np.linspace(lo, hi, count)
  if count > 1:
    i = int(np.argmin(np.abs(nodes)))
    if abs(nodes[i]) <= 1e-9 * abs(nodes[1] - nodes[0]):
      nodes[i] = 0.0
      return nodes
  return np.union1d(nodes, [0.0])

def _check_nodes(nodes, name):
  nodes = np.asarray(nodes, dtype=float).reshape(-1)
  if len(nodes) == 0 or np.any(np.diff(nodes) <= 0):
    raise ValueError('%s must be strictly ascending'%name)
  if not np.any(nodes == 0):
    raise ValueError('%s must contain 0'%name)
  return nodes

def grid(p0, x_nodes, t_nodes, tol=1e-10, kept=None, N=None):
  """Flow p0 in t along x = 0, then in x along every t.

  N (or an explicit kept list) selects the lifted fields of a truncation.
  """
  x_nodes = _check_nodes(x_nodes, 'x_nodes')
  t_nodes = _check_nodes(t_nodes, 't_nodes')
  gs = p0.gapset
  if N is not None:
    kept = gapset.truncate(gs, N)[1]
  psi, xi = torus.fields(gs, kept)
  stats = {}
  rows = along(xi, gs, p0.phi[None,:], t_nodes, tol, stats)[:,0,:]
  phi = along(psi, gs, rows, x_nodes, tol, stats)
  return TrajectoryGrid(
    gapset=gs,
    x_nodes=x_nodes,
    t_nodes=t_nodes,
    phi=phi,
    kept=None if kept is None else list(kept),
    tol=tol,
    stats=stats
  )

def crossing_report(p0, x_max, tol=1e-10, xtol=1e-10, kept=None):
  """Every x in [0, x_max] where some phi_j hits pi Z, with the rate Psi_j there."""
  if x_max <= 0:
    return []
  gs = p0.gapset
  psi = torus.fields(gs, kept)[0]
  integ = Integrator(psi, gs, atol=tol, dense=True)
  integ.run(p0.phi[None,:], [x_max])
  ret = []
  last = len(integ.segments) - 1
  for index,segment in enumerate(integ.segments):
    x0, h = segment[0], segment[1]
    a, b = segment[2][0], segment[3][0]
    for j in range(len(gs)):
      for m in range(int(np.ceil(a[j] / np.pi)), int(np.floor(b[j] / np.pi)) + 1):
        target = m * np.pi
        if target == b[j] and index != last:
          continue
        # Bisection on the dense output.
        lo, hi = 0.0, 1.0
        while (hi - lo) * h > xtol:
          mid = 0.5 * (lo + hi)
          if hermite(segment, mid)[0][j] < target:
            lo = mid
          else:
            hi = mid
        s = 0.5 * (lo + hi)
        phi = hermite(segment, s)[0].copy()
        phi[j] = target
        ret.append((j, x0 + s * h, float(psi(phi)[j])))
  ret.sort(key=lambda i:(i[1], i[0]))
  return ret

def period_x(p0, j=0, tol=1e-12, xtol=1e-13, kept=None):
  """x-distance after which phi_j has advanced by 2 pi."""
  gs = p0.gapset
  psi = torus.fields(gs, kept)[0]
  target = p0.phi[j] + 2 * np.pi

  def advance(y, d):
    integ = Integrator(psi, gs, atol=tol)
    return integ.run(y[None,:], [d])[0,0]

  x, y = 0.0, np.array(p0.phi, dtype=float)
  chunk = 2 * np.pi / psi(y)[j]
  for i in range(10000):
    y_next = advance(y, chunk)
    if y_next[j] >= target:
      break
    x, y = x + chunk, y_next
  else:
    raise errors.NumericalError('phi_%s did not advance by 2 pi'%j)
  # Newton on [lo, hi], bisecting when a step leaves the bracket.
  lo, hi = 0.0, chunk
  s = min(max((target - y[j]) / psi(y)[j], lo), hi)
  for i in range(100):
    z = advance(y, s) if s > 0 else y
    g = z[j] - target
    if g < 0:
      lo = s
    else:
      hi = s
    s_new = s - g / psi(z)[j]
    if not lo < s_new < hi:
      s_new = 0.5 * (lo + hi)
    if abs(s_new - s) <= xtol * max(1.0, x + s) or abs(g) <= tol * max(1.0, x + s):
      s = s_new
      break
    s = s_new
  return x + s
