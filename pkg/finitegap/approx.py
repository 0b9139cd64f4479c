"""Convergence of finite-gap approximants.

The full gap set plays the role of the infinite one. A truncation to N gaps
keeps the N largest gaps; its lifted fields move every angle, with products
and Q_1 restricted to the kept gaps.
"""
import logging

import numpy as np

from finitegap import flows
from finitegap import gapset
from finitegap import reconstruct
from finitegap import torus

log = logging.getLogger(__name__)

def _check_N(gs, N_list):
  N_list = [int(i) for i in N_list]
  if not N_list:
    raise ValueError('N_list is empty')
  if N_list != sorted(N_list):
    raise ValueError('N_list must be ascending')
  for N in N_list:
    if not 0 <= N <= len(gs):
      raise ValueError('Cannot keep %s of %s gaps'%(N, len(gs)))
  return N_list

def rate(gs):
  """(L, m) with L = max(L_psi, L_xi) and m = 2 L ln 2."""
  L = max(torus.lipschitz_bounds(gs))
  return L, 2 * L * np.log(2)

def stability_constant(gs, kept, L):
  """(1/L) sup_j gamma_j^(1/2) min(2 pi, 2 (C_j - C_{j,N}))."""
  if L == 0:
    return 0.0
  C_N = gapset.truncated_constants(gs, kept)[0]
  values = np.sqrt(gs.gamma) * np.minimum(2 * np.pi, 2 * (gs.C - C_N))
  return float(np.max(values)) / L

def convergence_constant(gs, kept, L):
  """K_N = (8/L) sup over kept j of gamma_j^(1/2) max(2 pi, C_j - C_{j,N}, D_j C_j - D_{j,N} C_{j,N})."""
  if L == 0 or not kept:
    return 0.0
  C, D = gapset.truncated_constants(gs)
  C_N, D_N = gapset.truncated_constants(gs, kept)
  values = np.maximum(2 * np.pi, np.maximum(C - C_N, D * C - D_N * C_N))
  return 8.0 / L * float(np.max(np.sqrt(gs.gamma[kept]) * values[kept]))

def approximant_sweep(gs, N_list, p0, window=((-1.0, 1.0), (-0.1, 0.1)), tol=1e-10, nx=21, nt=5):
  """Distance of each truncated trajectory to the full one over an (x, t) window.

  Each row reports D_N (sup of the torus metric over the window), the
  theoretical K_N and m, whether D_N <= K_N e^{m(|x|+|t|)} at the window
  corner, and the stability check along t = 0:

    metric(phi_N(x), phi(x)) <= 2 (metric(phi_N(0), phi(0)) + C) e^{m |x|}
  """
  N_list = _check_N(gs, N_list)
  (x0, x1), (t0, t1) = window
  x = flows.window_nodes(x0, x1, nx)
  t = flows.window_nodes(t0, t1, nt)
  L, m = rate(gs)
  full = flows.grid(p0, x, t, tol=tol)
  i0 = int(np.nonzero(t == 0)[0][0])
  corner = max(abs(x0), abs(x1)) + max(abs(t0), abs(t1))
  rows = []
  for N in N_list:
    kept = gapset.truncate(gs, N)[1]
    if N == len(gs):
      phi = full.phi
    else:
      phi = flows.grid(p0, x, t, tol=tol, kept=kept).phi
    dist = torus.metric_array(gs, phi, full.phi)
    D_N = float(np.max(dist))
    K_N = convergence_constant(gs, kept, L)
    C = stability_constant(gs, kept, L)
    with np.errstate(over='ignore'):
      corner_bound = K_N * np.exp(m * corner)
      bound = 2 * (dist[:, i0][x == 0][0] + C) * np.exp(m * np.abs(x))
    along = dist[:, i0]
    # Integration error enters both trajectories.
    slack = 10 * tol * (1 + np.abs(x))
    row = {
      'N': N,
      'D_N': D_N,
      'K_N': K_N,
      'm': m,
      'L': L,
      'C': C,
      'corner_ok': bool(D_N <= corner_bound),
      'stability_ok': bool(np.all(along <= bound + slack)),
      'stability_worst': float(np.max(along - bound - slack))
    }
    log.debug('sweep row: %s', row)
    rows.append(row)
  return rows

def c4_convergence(gs, N_list, p0, x_window=(-1.0, 1.0), nx=41, tol=1e-10):
  """sup |u_N - u_next|, |d2u_N - d2u_next|, |d4u_N - d4u_next| along t = 0.

  The next model of the last N is the full gap set.
  """
  N_list = _check_N(gs, N_list)
  x = flows.window_nodes(x_window[0], x_window[1], nx)

  def fields(kept):
    grid = flows.grid(p0, x, [0.0], tol=tol, kept=kept)
    return reconstruct.trace_derivatives(grid)

  models = [fields(gapset.truncate(gs, N)[1] if N < len(gs) else None) for N in N_list]
  if N_list[-1] < len(gs):
    models.append(fields(None))
  else:
    models.append(models[-1])
  rows = []
  for N,a,b in zip(N_list, models, models[1:]):
    rows.append({
      'N': N,
      'du0': float(np.max(np.abs(a.u - b.u))),
      'du2': float(np.max(np.abs(a.d2u - b.d2u))),
      'du4': float(np.max(np.abs(a.d4u - b.d4u)))
    })
  return rows
