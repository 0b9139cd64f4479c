"""Harmonic measures of the gaps, the Abel map, and linearization of the flows.

For a finite gap set the harmonic measure xi_j (0 on S below gap j, 1 on S
above it) has derivative P_j(t)/sqrt(-R(t)) inside the gaps, where

  R(t) = (t - E) prod_l (t - lo_l)(t - hi_l)

and P_j is the polynomial of degree < N fixed by the gap periods

  int_{gap k} P_j(t) / sqrt(-R(t)) dt = delta_jk.

Gap integrals use t = mid + half sin(theta), which cancels the inverse square
root at both edges, and Gauss-Legendre nodes in theta. P_j is stored in the
Chebyshev basis of s = (t - shift) / scale, with [E, hi_N] mapped to [-1, 1].
"""
import logging

import numpy as np
from numpy.polynomial import chebyshev
from scipy.special import roots_legendre

from finitegap import entity
from finitegap import errors
from finitegap import torus

log = logging.getLogger(__name__)

MAX_RESIDUAL = 1e-8

class HarmonicBasis(entity.Entity):
  """Coefficients of P_1..P_N for a gap set."""
  entity_type = 'harmonicbasis'

  def init(self, **data):
    self.gapset = data['gapset']
    n = len(self.gapset)
    self.coeffs = self.frozen(data['coeffs']).reshape(n, n)
    self.quad_order = int(data['quad_order'])
    self.shift = float(data['shift'])
    self.scale = float(data['scale'])
    self.residual = float(data.get('residual', 0.0))
    self.condition = float(data.get('condition', 1.0))

  def __len__(self):
    return len(self.gapset)

  def values(self, t):
    """P_j(t) for every j, shape t.shape + (N,); t may be complex."""
    s = (np.asarray(t) - self.shift) / self.scale
    return chebyshev.chebvander(s, len(self) - 1).dot(self.coeffs.T)

  def json(self):
    return {
      'gapset': self.gapset.json(),
      'coeffs': self.coeffs.tolist(),
      'quad_order': self.quad_order,
      'shift': self.shift,
      'scale': self.scale,
      'residual': self.residual,
      'condition': self.condition
    }

class Character(entity.Entity):
  """A character alpha, one angle per gap."""
  entity_type = 'character'

  def init(self, **data):
    self.alpha = self.frozen(np.mod(data['alpha'], torus.TWO_PI))

  def __len__(self):
    return len(self.alpha)

  def json(self):
    return {'alpha': self.alpha.tolist()}

##### Quadrature #####

def _rest(gs, k, t):
  """-R(t) / ((t - lo_k)(hi_k - t)), positive on gap k."""
  ret = t - gs.base_energy
  for l in range(len(gs)):
    if l != k:
      ret = ret * (t - gs.lo[l]) * (t - gs.hi[l])
  return ret

def _gap_rule(gs, k, theta_hi, order):
  """Nodes and weights for int_{lo_k}^{t(theta_hi)} f(t) / sqrt(-R(t)) dt.

  theta_hi has any shape; returns arrays of shape theta_hi.shape + (order,).
  """
  x, w = roots_legendre(order)
  theta_hi = np.asarray(theta_hi, dtype=float)[...,None]
  half = 0.5 * (theta_hi + 0.5 * np.pi)
  theta = -0.5 * np.pi + half * (x + 1)
  t = 0.5 * (gs.lo[k] + gs.hi[k]) + 0.5 * gs.gamma[k] * np.sin(theta)
  return t, half * w / np.sqrt(_rest(gs, k, t))

def _theta(gs, k, z):
  ratio = (np.asarray(z, dtype=float) - 0.5 * (gs.lo[k] + gs.hi[k])) / (0.5 * gs.gamma[k])
  return np.arcsin(np.clip(ratio, -1.0, 1.0))

def period_matrix(gs, shift, scale, order):
  """[k, i] = int_{gap k} T_i(s(t)) / sqrt(-R(t)) dt."""
  n = len(gs)
  ret = np.empty((n, n))
  for k in range(n):
    t, w = _gap_rule(gs, k, 0.5 * np.pi, order)
    ret[k] = w.dot(chebyshev.chebvander((t - shift) / scale, n - 1))
  return ret

def solve_basis(gs, quad_order=64):
  """Solve the gap-period conditions for P_1..P_N."""
  n = len(gs)
  if n == 0:
    return HarmonicBasis(gapset=gs, coeffs=np.zeros((0, 0)), quad_order=quad_order, shift=0.0, scale=1.0)
  shift = 0.5 * (gs.base_energy + gs.hi[-1])
  scale = 0.5 * (gs.hi[-1] - gs.base_energy)
  P = period_matrix(gs, shift, scale, quad_order)
  try:
    coeffs = np.linalg.solve(P, np.eye(n)).T
  except np.linalg.LinAlgError as e:
    raise errors.SingularBasisError('Period system is singular: %s'%e)
  residual = float(np.max(np.abs(coeffs.dot(P.T) - np.eye(n))))
  if not residual <= MAX_RESIDUAL:
    raise errors.SingularBasisError('Period residual %r'%residual, residual=residual)
  condition = float(np.linalg.cond(P))
  if condition > 1e12:
    log.warning('ill-conditioned period system: cond=%g', condition)
  log.debug('harmonic basis: N=%s order=%s residual=%g cond=%g', n, quad_order, residual, condition)
  return HarmonicBasis(
    gapset=gs,
    coeffs=coeffs,
    quad_order=quad_order,
    shift=shift,
    scale=scale,
    residual=residual,
    condition=condition
  )

def periods(basis, quad_order=None):
  """[j, k] = int_{gap k} P_j / sqrt(-R) at the given quadrature order."""
  order = quad_order or basis.quad_order
  P = period_matrix(basis.gapset, basis.shift, basis.scale, order)
  return basis.coeffs.dot(P.T)

##### Harmonic measures #####

def branch_signs(n):
  """[j, k] = (-1)^(j+k), the branch of sqrt(-R) seen by xi_j on gap k."""
  index = np.arange(n)
  return np.where((index[:,None] + index[None,:]) % 2, -1.0, 1.0)

def increments(basis, mu):
  """[..., j, k] = xi_j(mu_k) - xi_j(lo_k); mu has shape (..., N).

  On gap k, xi_j' = (-1)^(j+k) P_j / sqrt(-R) with the positive root.
  """
  gs = basis.gapset
  mu = np.asarray(mu, dtype=float)
  ret = np.empty(mu.shape + (len(gs),))
  for k in range(len(gs)):
    t, w = _gap_rule(gs, k, _theta(gs, k, mu[...,k]), basis.quad_order)
    ret[...,:,k] = np.einsum('...q,...qj->...j', w, basis.values(t))
  return ret * branch_signs(len(gs))

def _gap_of(gs, z):
  for k in range(len(gs)):
    if gs.lo[k] <= z <= gs.hi[k]:
      return k
  raise ValueError('z=%r is not in the closure of a gap'%z)

def xi_eval(basis, j, z):
  """xi_j at a real point z in the closure of a gap."""
  gs = basis.gapset
  k = _gap_of(gs, z)
  mu = np.array(gs.lo)
  mu[k] = z
  base = 1.0 if k > j else 0.0
  return base + float(increments(basis, mu)[j, k])

def xi_complex(basis, j, z, order=128):
  """xi_j(z) for z in the upper half plane.

  Re of (-1)^(j+1) int P_j(s) ds / prod sqrt(e - s), taken along
  E -> E + i -> z. The product over the band edges is analytic off S and
  equals (-1)^k sqrt(-R) on gap k (gaps counted from 1).
  """
  gs = basis.gapset
  z = complex(z)
  if not z.imag > 0:
    raise ValueError('z must lie in the upper half plane')
  edges = np.concatenate([[gs.base_energy], np.column_stack([gs.lo, gs.hi]).reshape(-1)])
  x, w = roots_legendre(order)

  def integrand(s):
    return basis.values(s)[...,j] / np.prod(np.sqrt(edges - s[...,None]), axis=-1)

  # E -> E + i with s = E + i v^2, removing the edge singularity.
  v = 0.5 * (x + 1)
  s = gs.base_energy + 1j * v**2
  total = 0.5 * np.sum(w * integrand(s) * 2j * v)
  # E + i -> z
  a = gs.base_energy + 1j
  tau = 0.5 * (x + 1)
  s = a + tau * (z - a)
  total += 0.5 * np.sum(w * integrand(s)) * (z - a)
  return float((-1)**(j + 1) * total.real)

##### Abel map #####

def abel(basis, p):
  """A_j = pi sum_k sigma_k (xi_j(mu_k) - xi_j(lo_k)) mod 2 pi."""
  gs = basis.gapset
  sigma = torus.sigma(p.phi)
  inc = increments(basis, torus.mu(gs, p.phi))
  return Character(alpha=np.pi * inc.dot(sigma))

def abel_lifted(basis, phi):
  """Continuous lift of the Abel map along lifted angles of shape (..., N).

  Each turn of phi_j lowers A_j by 2 pi; on pi Z the one-sided limit from
  above is used.
  """
  gs = basis.gapset
  phi = np.asarray(phi, dtype=float)
  turns = np.floor(phi / torus.TWO_PI)
  r = phi - torus.TWO_PI * turns
  side = np.where(r <= np.pi, 1.0, -1.0)
  inc = increments(basis, torus.mu(gs, phi))
  return np.pi * np.einsum('...jk,...k->...j', inc, side) - torus.TWO_PI * turns

def char_metric(a, b, gs):
  """sum_j min(|alpha_j - beta_j|, gamma_j) with differences reduced to [0, pi]."""
  if len(a) != len(b) or len(a) != len(gs):
    raise ValueError('Characters of different sizes')
  return float(np.sum(np.minimum(torus.arc(a.alpha, b.alpha), gs.gamma)))

def linearization_fit(basis, grid):
  """Least-squares affine fit A(phi(x,t)) = A0 + delta x + zeta t of the lifted Abel map."""
  x = np.unique(grid.x_nodes)
  t = np.unique(grid.t_nodes)
  if len(x) < 3 or len(t) < 3:
    raise errors.DegenerateGridError('Need at least 3 distinct nodes on each axis')
  n = len(basis.gapset)
  if n == 0:
    return np.zeros(0), np.zeros(0), 0.0
  X, T = np.meshgrid(grid.x_nodes, grid.t_nodes, indexing='ij')
  design = np.column_stack([np.ones(X.size), X.reshape(-1), T.reshape(-1)])
  values = abel_lifted(basis, grid.phi).reshape(-1, n)
  coef = np.linalg.lstsq(design, values, rcond=None)[0]
  residual = float(np.max(np.abs(values - design.dot(coef))))
  log.debug('linearization residual %g', residual)
  return coef[1], coef[2], residual
