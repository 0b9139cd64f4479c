"""The isospectral torus: angles, metric, trace fields Q_k, and the fields Psi and Xi.

Angles are stored lifted in R. For gap j with edges lo_j < hi_j,

  mu_j = lo_j + gamma_j cos^2(phi_j / 2)

and sigma_j is +1 on (0, pi), -1 on (pi, 2 pi), 0 on pi Z (reduced angle).
The translation flow d_x phi = Psi moves every angle forward, and the KdV
flow d_t phi = Xi = 2 (Q_1 + 2 mu) Psi carries the sign that makes
u = Q_1 o phi solve u_t - 6 u u_x + u_xxx = 0 (one gap: a wave of speed
-2 (E + lo + hi)).

The array functions (mu, psi_array, xi_array, ...) accept angle arrays of
shape (..., N) so that flows can evaluate a batch of points at once. The
optional `mask` selects the kept gaps of a truncation: products over l and
the sum in Q_1 run over kept gaps only.
"""
import numpy as np

from finitegap import entity
from finitegap import errors
from finitegap import gapset

TWO_PI = 2 * np.pi

class DirichletAngles(entity.Entity):
  """A point of the isospectral torus D(S)."""
  entity_type = 'dirichletangles'

  def init(self, **data):
    gs = data['gapset']
    if isinstance(gs, dict):
      gs = gapset.GapSet.from_json(gs)
    phi = self.frozen(np.atleast_1d(np.asarray(data['phi'], dtype=float)).reshape(-1))
    if len(phi) != len(gs):
      raise errors.GapSetMismatchError(
        'Got %s angles for %s gaps'%(len(phi), len(gs))
      )
    if not np.all(np.isfinite(phi)):
      raise ValueError('Angles must be finite')
    self.gapset = gs
    self.phi = phi

  def __len__(self):
    return len(self.phi)

  def reduced(self):
    return np.mod(self.phi, TWO_PI)

  def replace(self, phi):
    return DirichletAngles(gapset=self.gapset, phi=phi)

  def json(self):
    return {
      'gapset': self.gapset.json(),
      'phi': self.phi.tolist()
    }

class MuSigmaView(entity.Entity):
  """Dirichlet data (mu_j, sigma_j)."""
  entity_type = 'musigma'

  def init(self, **data):
    self.mu = self.frozen(data['mu'])
    self.sigma = self.frozen(data['sigma'], dtype=int)

  def json(self):
    return {'mu': self.mu.tolist(), 'sigma': self.sigma.tolist()}

##### Array kernels #####

def kept_mask(gs, kept=None):
  """Boolean mask of kept gaps (all gaps when kept is None)."""
  if kept is None:
    return np.ones(len(gs), dtype=bool)
  mask = np.zeros(len(gs), dtype=bool)
  mask[list(kept)] = True
  return mask

def mu(gs, phi):
  return gs.lo + gs.gamma * np.cos(0.5 * np.asarray(phi))**2

def dmu_dphi(gs, phi):
  return -0.5 * gs.gamma * np.sin(phi)

def sigma(phi):
  r = np.mod(phi, TWO_PI)
  return np.where((r == 0) | (r == np.pi), 0, np.where(r < np.pi, 1, -1))

def q_array(gs, phi, k, mask=None):
  """Q_k = E^k + sum over kept gaps of (lo^k + hi^k - 2 mu^k)."""
  m = mu(gs, phi)
  terms = gs.lo**k + gs.hi**k - 2 * m**k
  if mask is not None:
    terms = np.where(mask, terms, 0.0)
  return gs.base_energy**k + np.sum(terms, axis=-1)

def _offdiagonal(gs, mask):
  use = ~np.eye(len(gs), dtype=bool)
  if mask is not None:
    use = use & mask[None,:]
  return use

def psi_array(gs, phi, mask=None):
  """Psi_j = 2 ((mu_j - E) prod_l (lo_l - mu_j)(hi_l - mu_j) / (mu_l - mu_j)^2)^(1/2)."""
  m = mu(gs, phi)
  mj = m[...,:,None]
  # [..., j, l]
  num = (gs.lo - mj) * (gs.hi - mj)
  den = (m[...,None,:] - mj)**2
  with np.errstate(divide='ignore', invalid='ignore'):
    ratio = np.where(_offdiagonal(gs, mask), num / den, 1.0)
  return 2 * np.sqrt((m - gs.base_energy) * np.prod(ratio, axis=-1))

def xi_array(gs, phi, mask=None):
  """Xi_j = 2 (Q_1 + 2 mu_j) Psi_j."""
  q1 = q_array(gs, phi, 1, mask)
  return 2 * (np.expand_dims(q1, -1) + 2 * mu(gs, phi)) * psi_array(gs, phi, mask)

def fields(gs, kept=None):
  """Array callables (psi, xi) for the full or truncated fields."""
  mask = None if kept is None else kept_mask(gs, kept)
  return (
    lambda phi: psi_array(gs, phi, mask),
    lambda phi: xi_array(gs, phi, mask)
  )

##### Operations #####

def mu_sigma(p):
  return MuSigmaView(mu=mu(p.gapset, p.phi), sigma=sigma(p.phi))

def _check_same(p, q):
  if p.gapset != q.gapset:
    raise errors.GapSetMismatchError('Points lie on different tori')

def arc(a, b):
  """Shorter arc between angles."""
  d = np.mod(np.abs(np.asarray(a) - np.asarray(b)), TWO_PI)
  return np.minimum(d, TWO_PI - d)

def metric(p, q):
  """sup_j gamma_j^(1/2) times the shorter arc from p_j to q_j."""
  _check_same(p, q)
  return metric_array(p.gapset, p.phi, q.phi)

def metric_array(gs, a, b):
  d = np.sqrt(gs.gamma) * arc(a, b)
  if d.shape[-1] == 0:
    return np.zeros(d.shape[:-1]) if d.ndim > 1 else 0.0
  return np.max(d, axis=-1)

def tangent_norm(gs, v):
  """sup_j gamma_j^(1/2) |v_j|."""
  v = np.abs(np.asarray(v, dtype=float)) * np.sqrt(gs.gamma)
  if v.shape[-1] == 0:
    return np.zeros(v.shape[:-1]) if v.ndim > 1 else 0.0
  return np.max(v, axis=-1)

def q_field(p, k):
  if k not in (1, 2, 3):
    raise ValueError('Q_k is defined here for k in 1, 2, 3')
  return float(q_array(p.gapset, p.phi, k))

def psi(p):
  return psi_array(p.gapset, p.phi)

def xi(p):
  return xi_array(p.gapset, p.phi)

def lift_fields(gs, N, p):
  """Truncated fields: products and Q_1 over the N kept gaps only."""
  kept = gapset.truncate(gs, N)[1]
  mask = kept_mask(gs, kept)
  return psi_array(gs, p.phi, mask), xi_array(gs, p.phi, mask)

def psi_jacobian(p, mask=None):
  """d Psi_j / d phi_k at a single point."""
  gs = p.gapset
  m = mu(gs, p.phi)
  s = dmu_dphi(gs, p.phi)
  values = psi_array(gs, p.phi, mask)
  use = _offdiagonal(gs, mask)
  mj = m[:,None]
  with np.errstate(divide='ignore', invalid='ignore'):
    cross = np.where(use, 2 / (m[None,:] - mj) - 1 / (gs.lo - mj) - 1 / (gs.hi - mj), 0.0)
    off = np.where(use, -2 / (m[None,:] - mj), 0.0)
  dlog = off + np.diag(1 / (m - gs.base_energy) + np.sum(cross, axis=1))
  return 0.5 * values[:,None] * dlog * s[None,:]

def xi_jacobian(p, mask=None):
  """d Xi_j / d phi_k at a single point."""
  gs = p.gapset
  n = len(gs)
  mask_ = np.ones(n, dtype=bool) if mask is None else mask
  m = mu(gs, p.phi)
  s = dmu_dphi(gs, p.phi)
  q1 = q_array(gs, p.phi, 1, mask)
  values = psi_array(gs, p.phi, mask)
  # d(Q_1 + 2 mu_j)/d phi_k
  dq = np.where(mask_, -2 * s, 0.0)[None,:] + 2 * np.diag(s)
  return 2 * dq * values[:,None] + 2 * (q1 + 2 * m)[:,None] * psi_jacobian(p, mask)

def commutator(p):
  """Lie bracket [Psi, Xi]_j = sum_k (Psi_k d_k Xi_j - Xi_k d_k Psi_j)."""
  return xi_jacobian(p).dot(psi(p)) - psi_jacobian(p).dot(xi(p))

def lipschitz_bounds(gs):
  """Upper bounds on the Lipschitz constants of Psi and Xi in the torus metric."""
  n = len(gs)
  if n == 0:
    return 0.0, 0.0
  g = gs.gamma
  C = gs.C
  eta = gs.eta
  off = np.eye(n) == 0
  # |d_k Psi_j| <= C_j gamma_k / eta_jk
  dpsi = np.where(off, C[:,None] * g[None,:] / eta, 0.0)
  near = np.where(off, g[None,:] / (eta * (eta + g[None,:])), 0.0)
  diag = 0.5 * C * g * (1 / gs.eta0 + np.sum(near, axis=1))
  dpsi = dpsi + np.diag(diag)
  # |Q_1 + 2 mu_j| <= |E| + sum gamma + 2 (|E| + eta_j0 + gamma_j)
  bound_q = abs(gs.base_energy) + np.sum(g) + 2 * (abs(gs.base_energy) + gs.eta0 + g)
  dxi = np.where(off, 2 * C[:,None] * g[None,:] * (2 + bound_q[:,None] / eta), 0.0)
  dxi = dxi + np.diag(2 * bound_q * diag)
  weights = np.sqrt(g)[:,None] / np.sqrt(g)[None,:]
  return float(np.max(np.sum(weights * dpsi, axis=1))), float(np.max(np.sum(weights * dxi, axis=1)))

def q_modulus(gs, k):
  """M_k with |Q_k(p) - Q_k(q)| <= M_k metric(p, q)."""
  top = np.maximum(np.abs(gs.lo), np.abs(gs.hi))
  return float(np.sum(k * top**(k - 1) * np.sqrt(gs.gamma)))

def random_points(gs, rng, count):
  """Uniform angles in [0, 2 pi), shape (count, N)."""
  return rng.uniform(0.0, TWO_PI, size=(count, len(gs)))
