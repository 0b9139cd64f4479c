"""Recover u(x, t) and its x-derivatives from torus trajectories.

Trace formulas, with W = Q_1 o phi:

  Q_2 o phi = -1/2 W'' + W^2
  Q_3 o phi = 3/16 W'''' - 3/2 W W'' - 15/16 (W')^2 + W^3

and W' = sum_j gamma_j sin(phi_j) Psi_j(phi) along the translation flow.
"""
import logging

import numpy as np

from finitegap import entity
from finitegap import errors
from finitegap import flows
from finitegap import geom
from finitegap import torus

log = logging.getLogger(__name__)

# Distance to the spectrum below which G(x,x;z) is not evaluated, relative to the energy scale.
PROXIMITY = 1e-9
# Distance of mu_j to a gap edge below which dG/dz is not evaluated, relative to gamma_j.
EDGE = 1e-8

class FieldGrid(entity.Entity):
  """Sampled u and trace-derived derivatives on an (x, t) lattice."""
  entity_type = 'fieldgrid'

  def init(self, **data):
    self.x_nodes = self.frozen(data['x_nodes'])
    self.t_nodes = self.frozen(data['t_nodes'])
    shape = (len(self.x_nodes), len(self.t_nodes))
    self.u = self.frozen(data['u']).reshape(shape)
    for key in ['dxu', 'd2u', 'd4u']:
      value = data.get(key)
      if value is not None:
        value = self.frozen(value).reshape(shape)
      setattr(self, key, value)
    self.fd_step = data.get('fd_step')
    if self.fd_step is not None and not self.fd_step > 0:
      raise ValueError('fd_step must be positive')

  def json(self):
    data = {
      'x_nodes': self.x_nodes.tolist(),
      't_nodes': self.t_nodes.tolist(),
      'u': self.u.tolist(),
      'fd_step': self.fd_step
    }
    for key in ['dxu', 'd2u', 'd4u']:
      value = getattr(self, key)
      data[key] = None if value is None else value.tolist()
    if self.tags():
      data['tags'] = self.tags()
    return data

def _traces(gs, phi, mask):
  """u, dxu, d2u, d4u at angle array phi."""
  u = torus.q_array(gs, phi, 1, mask)
  q2 = torus.q_array(gs, phi, 2, mask)
  q3 = torus.q_array(gs, phi, 3, mask)
  terms = gs.gamma * np.sin(phi) * torus.psi_array(gs, phi, mask)
  if mask is not None:
    terms = np.where(mask, terms, 0.0)
  dxu = np.sum(terms, axis=-1)
  d2u = 2 * (u**2 - q2)
  d4u = (16.0 / 3.0) * (q3 + 1.5 * u * d2u + (15.0 / 16.0) * dxu**2 - u**3)
  return u, dxu, d2u, d4u

def potential(grid):
  """u = Q_1 o phi over the grid's kept gaps."""
  u = torus.q_array(grid.gapset, grid.phi, 1, grid.mask())
  return FieldGrid(x_nodes=grid.x_nodes, t_nodes=grid.t_nodes, u=u)

def trace_derivatives(grid):
  u, dxu, d2u, d4u = _traces(grid.gapset, grid.phi, grid.mask())
  return FieldGrid(
    x_nodes=grid.x_nodes,
    t_nodes=grid.t_nodes,
    u=u,
    dxu=dxu,
    d2u=d2u,
    d4u=d4u
  )

def _slopes(steps, errs):
  return [
    float(np.log(e0 / e1) / np.log(h0 / h1))
    for h0,h1,e0,e1 in zip(steps, steps[1:], errs, errs[1:])
  ]

def _errors(exact, approx):
  return [float(np.max(np.abs(exact - i))) for i in approx]

def fd_check(grid, steps=(2e-2, 1e-2, 5e-3, 2.5e-3), tol=1e-12):
  """Compare trace-derived d2u, d4u with finite differences along x.

  Every grid node is flowed by +h and -h for each step. Reports the errors
  of the central second differences with their observed orders, and the
  errors of the fourth-order differences at steps[1:]. The fourth-order
  difference at step h is the Richardson combination of the second
  differences at the previous step and h; for steps that halve it is the
  five-point stencil on +-h, +-2h.
  """
  gs = grid.gapset
  mask = grid.mask()
  psi = torus.fields(gs, grid.kept)[0]
  points = grid.phi.reshape(-1, len(gs))
  u, dxu, d2u, d4u = _traces(gs, points, mask)
  steps = [float(h) for h in steps]
  offsets = steps + [-h for h in steps]
  flowed = flows.along(psi, gs, points, offsets, tol)
  fd2, fd4 = [], []
  for i,h in enumerate(steps):
    up, _, d2up, _ = _traces(gs, flowed[i], mask)
    um, _, d2um, _ = _traces(gs, flowed[len(steps) + i], mask)
    fd2.append((up - 2 * u + um) / h**2)
    fd4.append((d2up - 2 * d2u + d2um) / h**2)
  fine2, fine4 = [], []
  for i in range(1, len(steps)):
    r = (steps[i - 1] / steps[i])**2
    fine2.append((r * fd2[i] - fd2[i - 1]) / (r - 1))
    fine4.append((r * fd4[i] - fd4[i - 1]) / (r - 1))
  d2_err = _errors(d2u, fd2)
  d4_err = _errors(d4u, fd4)
  ret = {
    'steps': steps,
    'd2u_error': d2_err,
    'd4u_error': d4_err,
    'd2u_slopes': _slopes(steps, d2_err),
    'd4u_slopes': _slopes(steps, d4_err),
    'fine_steps': steps[1:],
    'd2u_fine_error': _errors(d2u, fine2),
    'd4u_fine_error': _errors(d4u, fine4)
  }
  log.debug('fd check: %s', ret)
  return ret

def green_diag(p, z):
  """Diagonal Green's function G(x,x;z) from the product formula.

  Branch: product of principal square roots over the band edges, analytic
  off S, positive for real z below the spectrum.
  """
  gs = p.gapset
  z = complex(z)
  if geom.distance(gs.bands(), z) < PROXIMITY * gs.scale():
    raise errors.SpectrumProximityError('z=%r is too close to the spectrum'%z)
  m = torus.mu(gs, p.phi)
  edges = np.concatenate([[gs.base_energy], np.column_stack([gs.lo, gs.hi]).reshape(-1)])
  return complex(0.5 * np.prod(m - z) / np.prod(np.sqrt(edges - z)))

def green_dz_at_mu(p, j):
  """d/dz G(x,x;z) at z = mu_j."""
  gs = p.gapset
  m = torus.mu(gs, p.phi)
  mj = m[j]
  if min(mj - gs.lo[j], gs.hi[j] - mj) < EDGE * gs.gamma[j]:
    raise errors.GapEdgeError('mu_%s is at an edge of its gap'%j)
  value = 1.0 / ((gs.base_energy - mj) * (gs.lo[j] - mj) * (gs.hi[j] - mj))
  for l in range(len(gs)):
    if l != j:
      value *= (m[l] - mj)**2 / ((gs.lo[l] - mj) * (gs.hi[l] - mj))
  return 0.5 * np.sqrt(value)

def dmu_dt(p):
  """Both sides of the Dubrovin time formula: chain rule through Xi, and the closed form."""
  gs = p.gapset
  sigma = torus.sigma(p.phi)
  if np.any(sigma == 0):
    raise errors.GapEdgeError('Some mu_j sits at a gap edge')
  chain = torus.dmu_dphi(gs, p.phi) * torus.xi(p)
  m = torus.mu(gs, p.phi)
  u = torus.q_field(p, 1)
  # ((mu_j - lo_j)(hi_j - mu_j))^(1/2) = gamma_j |sin phi_j| / 2, without cancellation at the edges.
  edge = 0.5 * gs.gamma * np.abs(np.sin(p.phi))
  closed = np.empty(len(gs))
  for j in range(len(gs)):
    r = m[j] - gs.base_energy
    for l in range(len(gs)):
      if l != j:
        r *= (gs.lo[l] - m[j]) * (gs.hi[l] - m[j]) / (m[l] - m[j])**2
    closed[j] = -4 * sigma[j] * (u + 2 * m[j]) * edge[j] * np.sqrt(r)
  return chain, closed

def dmu_dt_check(p):
  """Residual of the Dubrovin time formula per gap."""
  chain, closed = dmu_dt(p)
  return np.abs(chain - closed)
