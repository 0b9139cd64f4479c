"""Independent checks: a pseudo-spectral periodic KdV solver and finite-difference residuals.

The solver advances

  u_t = 6 u u_x - u_xxx

as u_hat_t = i k^3 u_hat + 3 i k FFT(u^2) with exponential time differencing
RK4. The linear operator is complex, so the contour means for the ETDRK4
coefficients run over the full circle.
"""
import logging

import numpy as np

from finitegap import entity
from finitegap import errors
from finitegap import flows
from finitegap import reconstruct

log = logging.getLogger(__name__)

CONTOUR_POINTS = 32
# Explicit budget for the nonlinear term: dt * 6 |u|_inf k_max.
STABILITY = 2.5
BLOW_UP = 10.0

class PeriodicField(entity.Entity):
  """Uniform samples of u over one period at a time."""
  entity_type = 'periodicfield'

  def init(self, **data):
    self.period = float(data['period'])
    self.samples = self.frozen(data['samples'])
    self.time = float(data.get('time', 0.0))
    n = len(self.samples)
    if n < 64 or n & (n - 1):
      raise ValueError('Sample count must be a power of two >= 64: %s'%n)
    if not self.period > 0:
      raise ValueError('Period must be positive')

  def __len__(self):
    return len(self.samples)

  def x(self):
    return np.arange(len(self)) * self.period / len(self)

  def json(self):
    return {
      'period': self.period,
      'samples': self.samples.tolist(),
      'time': self.time
    }

def wavenumbers(n, period):
  return 2 * np.pi / period * np.fft.rfftfreq(n, 1.0 / n)

class ETDRK4(object):
  """ETDRK4 stepper for the KdV equation on a periodic grid."""
  def __init__(self, n, period, dt):
    self.n = n
    self.dt = dt
    k = wavenumbers(n, period)
    index = np.arange(len(k))
    self.dealias = index <= n // 3
    self.k_max = k[self.dealias][-1]
    self.nonlinear_factor = np.where(self.dealias, 3j * k, 0.0)
    L = 1j * k**3
    self.exp_full = np.exp(dt * L)
    self.exp_half = np.exp(0.5 * dt * L)
    roots = np.exp(2j * np.pi * (np.arange(CONTOUR_POINTS) + 0.5) / CONTOUR_POINTS)
    lr = dt * L[:,None] + roots[None,:]
    exp_lr = np.exp(lr)
    self.q = dt * np.mean((np.exp(lr / 2) - 1) / lr, axis=1)
    self.f1 = dt * np.mean((-4 - lr + exp_lr * (4 - 3 * lr + lr**2)) / lr**3, axis=1)
    self.f2 = dt * np.mean((2 + lr + exp_lr * (lr - 2)) / lr**3, axis=1)
    self.f3 = dt * np.mean((-4 - 3 * lr - lr**2 + exp_lr * (4 - lr)) / lr**3, axis=1)

  def nonlinear(self, v):
    u = np.fft.irfft(v, self.n)
    return self.nonlinear_factor * np.fft.rfft(u * u)

  def step(self, v):
    nv = self.nonlinear(v)
    a = self.exp_half * v + self.q * nv
    na = self.nonlinear(a)
    b = self.exp_half * v + self.q * na
    nb = self.nonlinear(b)
    c = self.exp_half * a + self.q * (2 * nb - nv)
    nc = self.nonlinear(c)
    return self.exp_full * v + self.f1 * nv + 2 * self.f2 * (na + nb) + self.f3 * nc

def kdv_step(f, dt, n_steps):
  """Advance a periodic field n_steps of size dt."""
  if dt == 0 or n_steps == 0:
    return PeriodicField(period=f.period, samples=f.samples, time=f.time)
  n = len(f)
  stepper = ETDRK4(n, f.period, dt)
  size = float(np.max(np.abs(f.samples)))
  if abs(dt) * 6 * size * stepper.k_max > STABILITY:
    raise errors.StabilityError(
      'dt=%r exceeds the stability budget for |u|=%r, k_max=%r'%(dt, size, stepper.k_max)
    )
  limit = BLOW_UP * max(size, 1.0)
  v = np.fft.rfft(f.samples)
  for i in range(n_steps):
    v = stepper.step(v)
    if (i + 1) % 100 == 0 or i + 1 == n_steps:
      u = np.fft.irfft(v, n)
      if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > limit:
        raise errors.BlowUpError(
          'Solution blew up at t=%r'%(f.time + (i + 1) * dt),
          time=f.time + (i + 1) * dt
        )
  return PeriodicField(
    period=f.period,
    samples=np.fft.irfft(v, n),
    time=f.time + n_steps * dt
  )

def conserved(f):
  """(int u, int u^2, int (u_x^2 / 2 + u^3)) over one period."""
  u = np.asarray(f.samples)
  dx = f.period / len(f)
  ux = np.fft.irfft(1j * wavenumbers(len(f), f.period) * np.fft.rfft(u), len(f))
  return (
    float(np.sum(u) * dx),
    float(np.sum(u * u) * dx),
    float(np.sum(0.5 * ux * ux + u**3) * dx)
  )

##### Finite-difference residual #####

FIRST = {
  2: ([-1, 1], [-0.5, 0.5]),
  4: ([-2, -1, 1, 2], [1/12, -8/12, 8/12, -1/12])
}
THIRD = {
  2: ([-2, -1, 1, 2], [-0.5, 1, -1, 0.5]),
  4: ([-3, -2, -1, 1, 2, 3], [1/8, -1, 13/8, -13/8, 1, -1/8])
}

def _spacing(nodes, name):
  h = np.diff(nodes)
  if not np.allclose(h, h[0], rtol=1e-6, atol=0):
    raise errors.DegenerateGridError('%s spacing is not uniform'%name)
  return float(h[0])

def _apply(f, stencil, h, power, axis, margin):
  """Central antisymmetric stencil along axis, restricted to nodes at least `margin` from the boundary.

  Each pair +-o enters as w_o (f_o - f_-o), so constants cancel exactly.
  """
  offsets, weights = stencil
  pairs = dict(zip(offsets, weights))
  n = f.shape[axis]
  def take(o):
    return np.take(f, np.arange(margin + o, n - margin + o), axis=axis)
  ret = 0.0
  for o in sorted(i for i in offsets if i > 0):
    if pairs[-o] != -pairs[o]:
      raise ValueError('Stencil is not antisymmetric')
    ret = ret + pairs[o] * (take(o) - take(-o))
  return ret / h**power

def residual(field, order=4):
  """max |u_t - 6 u u_x + u_xxx| over interior nodes, with a breakdown."""
  if order not in FIRST:
    raise ValueError('order must be 2 or 4')
  nx, nt = field.u.shape
  need_x = 5 if (field.d2u is not None or order == 2) else 7
  if nx < need_x or nt < 5:
    raise errors.DegenerateGridError(
      'Residual needs at least %s x nodes and 5 t nodes, got %s x %s'%(need_x, nx, nt)
    )
  hx = _spacing(field.x_nodes, 'x')
  ht = _spacing(field.t_nodes, 't')
  if field.d2u is not None:
    third_stencil, third_source, third_power = FIRST[order], field.d2u, 1
  else:
    third_stencil, third_source, third_power = THIRD[order], field.u, 3
  mx = max(max(third_stencil[0]), 0 if field.dxu is not None else max(FIRST[order][0]))
  mt = max(FIRST[order][0])
  u = field.u[mx:nx-mx, mt:nt-mt]
  ut = _apply(field.u, FIRST[order], ht, 1, 1, mt)[mx:nx-mx]
  if field.dxu is not None:
    ux = field.dxu[mx:nx-mx, mt:nt-mt]
  else:
    ux = _apply(field.u, FIRST[order], hx, 1, 0, mx)[:, mt:nt-mt]
  uxxx = _apply(third_source, third_stencil, hx, third_power, 0, mx)[:, mt:nt-mt]
  r = ut - 6 * u * ux + uxxx
  index = np.unravel_index(np.argmax(np.abs(r)), r.shape)
  return {
    'max': float(np.abs(r[index])),
    'at': [float(field.x_nodes[index[0] + mx]), float(field.t_nodes[index[1] + mt])],
    'order': order,
    'hx': hx,
    'ht': ht,
    'u_max': float(np.max(np.abs(field.u))),
    'terms': {
      'ut': float(np.max(np.abs(ut))),
      'uux': float(np.max(np.abs(6 * u * ux))),
      'uxxx': float(np.max(np.abs(uxxx)))
    }
  }

##### Dubrovin vs pseudo-spectral #####

def slice_field(gs, p, n=512, tol=1e-12):
  """Sample u over one x-period of a one-gap solution."""
  if len(gs) != 1:
    raise ValueError('Only one-gap potentials are periodic in x')
  period = flows.period_x(p, 0, tol=tol)
  x = np.arange(n) * period / n
  grid = flows.grid(p, x, [0.0], tol=tol)
  u = reconstruct.potential(grid).u[:,0]
  return PeriodicField(period=period, samples=u, time=0.0)

def cross_check(gs, p0, T=0.05, modes=512, dt=1e-5, tol=1e-12, window=None):
  """L-inf difference between Dubrovin + trace and ETDRK4 at time T.

  One gap: exact comparison over one period. More gaps: u on [-window, window]
  is treated as periodic and compared on the central half only.
  """
  steps = int(round(T / dt))
  if window is None:
    f = slice_field(gs, p0, modes, tol)
    x = f.x()
  else:
    h = 2.0 * window / modes
    x = (np.arange(modes) - modes // 2) * h
    u0 = reconstruct.potential(flows.grid(p0, x, [0.0], tol=tol)).u[:,0]
    f = PeriodicField(period=2.0 * window, samples=u0, time=0.0)
  evolved = kdv_step(f, dt, steps)
  exact = reconstruct.potential(flows.grid(p0, x, [0.0, steps * dt], tol=tol)).u[:,1]
  diff = np.abs(evolved.samples - exact)
  if window is not None:
    diff = diff[np.abs(x) <= 0.5 * window]
  mass0 = conserved(f)[0]
  mass1 = conserved(evolved)[0]
  ret = {
    'linf': float(np.max(diff)),
    'period': f.period,
    'modes': modes,
    'dt': dt,
    'steps': steps,
    'time': steps * dt,
    'mass_drift': abs(mass1 - mass0) / max(abs(mass0), 1e-300)
  }
  log.debug('cross check: %s', ret)
  return ret
