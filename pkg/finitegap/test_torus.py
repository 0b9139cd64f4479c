"""Isospectral torus unit tests."""
import unittest

import numpy as np

from finitegap import errors
from finitegap import gapset
from finitegap import torus
from finitegap import util

def G1():
  return gapset.GapSet(base_energy=0.0, gaps=[(1.0, 2.0)])

def G2():
  return gapset.GapSet(base_energy=0.0, gaps=[(1.0, 2.0), (4.0, 4.5)])

def point(gs, phi):
  return torus.DirichletAngles(gapset=gs, phi=phi)

class TestDirichletAngles(unittest.TestCase):
  def test_size(self):
    with self.assertRaises(errors.GapSetMismatchError):
      point(G2(), [0.0])

  def test_not_finite(self):
    with self.assertRaises(ValueError):
      point(G1(), [np.nan])

  def test_reduced(self):
    p = point(G1(), [2 * np.pi + 0.5])
    self.assertAlmostEqual(p.reduced()[0], 0.5)

  def test_json(self):
    p = point(G2(), [0.1, 0.2])
    q = torus.DirichletAngles.from_json(p.json())
    assert q.gapset == p.gapset
    assert np.array_equal(q.phi, p.phi)

class Test_mu_sigma(unittest.TestCase):
  def test_upper_edge(self):
    data = torus.mu_sigma(point(G1(), [0.0]))
    self.assertAlmostEqual(data.mu[0], 2.0)
    assert data.sigma[0] == 0

  def test_lower_edge(self):
    data = torus.mu_sigma(point(G1(), [np.pi]))
    self.assertAlmostEqual(data.mu[0], 1.0)
    assert data.sigma[0] == 0

  def test_interior(self):
    data = torus.mu_sigma(point(G1(), [np.pi / 2]))
    self.assertAlmostEqual(data.mu[0], 1.5)
    assert data.sigma[0] == 1
    data = torus.mu_sigma(point(G1(), [1.5 * np.pi]))
    self.assertAlmostEqual(data.mu[0], 1.5)
    assert data.sigma[0] == -1

  def test_lifted(self):
    assert torus.sigma(np.array([2 * np.pi]))[0] == 0
    assert torus.sigma(np.array([-np.pi / 2]))[0] == -1

class Test_metric(unittest.TestCase):
  def test_g1(self):
    self.assertAlmostEqual(torus.metric(point(G1(), [0.0]), point(G1(), [0.1])), 0.1)

  def test_g2(self):
    d = torus.metric(point(G2(), [0.0, 0.0]), point(G2(), [0.0, 0.2]))
    self.assertAlmostEqual(d, 0.1414214)

  def test_wrap(self):
    d = torus.metric(point(G1(), [0.1]), point(G1(), [2 * np.pi - 0.1]))
    self.assertAlmostEqual(d, 0.2)

  def test_mismatch(self):
    with self.assertRaises(errors.GapSetMismatchError):
      torus.metric(point(G1(), [0.0]), point(G2(), [0.0, 0.0]))

class Test_q_field(unittest.TestCase):
  def test_g1(self):
    p = point(G1(), [np.pi / 2])
    self.assertAlmostEqual(torus.q_field(p, 1), 0.0)
    self.assertAlmostEqual(torus.q_field(p, 2), 0.5)
    self.assertAlmostEqual(torus.q_field(p, 3), 2.25)

  def test_g1_edge(self):
    self.assertAlmostEqual(torus.q_field(point(G1(), [0.0]), 1), -1.0)

  def test_bad_k(self):
    with self.assertRaises(ValueError):
      torus.q_field(point(G1(), [0.0]), 4)

class Test_psi(unittest.TestCase):
  def test_g1(self):
    self.assertAlmostEqual(torus.psi(point(G1(), [np.pi / 2]))[0], 2.4494897)
    self.assertAlmostEqual(torus.psi(point(G1(), [0.0]))[0], 2.8284271)

  def test_g2(self):
    data = torus.psi(point(G2(), [np.pi / 2, np.pi / 2]))
    self.assertAlmostEqual(data[0], 2 * np.sqrt(1.5 * 2.5 * 3.0) / 2.75)

  def test_batch(self):
    gs = G2()
    phi = torus.random_points(gs, util.rng(1), 5)
    batch = torus.psi_array(gs, phi)
    for i in range(5):
      assert np.allclose(batch[i], torus.psi(point(gs, phi[i])))

  def test_positive(self):
    for gs in [G1(), G2(), gapset.geometric_family(6)]:
      phi = torus.random_points(gs, util.rng(11), 10000)
      assert np.all(torus.psi_array(gs, phi) > 0)

class Test_xi(unittest.TestCase):
  def test_g1(self):
    self.assertAlmostEqual(torus.xi(point(G1(), [np.pi / 2]))[0], 14.6969385, places=6)
    self.assertAlmostEqual(torus.xi(point(G1(), [0.0]))[0], 16.9705627, places=6)

  def test_sign(self):
    # sign Xi_j = sign (Q_1 + 2 mu_j), since Psi > 0. Here Q_1 + 2 mu_1 < 0 < Q_1 + 2 mu_2.
    gs = gapset.GapSet(base_energy=-5.0, gaps=[(1.0, 2.0), (4.0, 4.5)])
    phi = torus.random_points(gs, util.rng(12), 10000)
    weight = np.expand_dims(torus.q_array(gs, phi, 1), -1) + 2 * torus.mu(gs, phi)
    xi = torus.xi_array(gs, phi)
    assert np.all(np.sign(xi) == np.sign(weight))
    assert np.all(xi[:,0] < 0) and np.all(xi[:,1] > 0)

class Test_lift_fields(unittest.TestCase):
  def test_g2_one_gap(self):
    p = point(G2(), [np.pi / 2, np.pi / 2])
    psi, xi = torus.lift_fields(p.gapset, 1, p)
    self.assertAlmostEqual(psi[0], 2 * np.sqrt(1.5))
    # Q_1 over the kept gap only: 0 at phi_1 = pi/2.
    self.assertAlmostEqual(xi[0], 2 * 3.0 * 2 * np.sqrt(1.5))

  def test_full(self):
    p = point(G2(), [0.3, 2.0])
    psi, xi = torus.lift_fields(p.gapset, 2, p)
    assert np.allclose(psi, torus.psi(p))
    assert np.allclose(xi, torus.xi(p))

class Test_jacobians(unittest.TestCase):
  def test_psi_jacobian(self):
    p = point(G2(), [0.7, 2.0])
    J = torus.psi_jacobian(p)
    h = 1e-6
    for k in range(2):
      e = np.zeros(2)
      e[k] = h
      fd = (torus.psi(p.replace(p.phi + e)) - torus.psi(p.replace(p.phi - e))) / (2 * h)
      assert np.allclose(J[:,k], fd, atol=1e-6)

  def test_xi_jacobian(self):
    p = point(G2(), [0.7, 2.0])
    J = torus.xi_jacobian(p)
    h = 1e-6
    for k in range(2):
      e = np.zeros(2)
      e[k] = h
      fd = (torus.xi(p.replace(p.phi + e)) - torus.xi(p.replace(p.phi - e))) / (2 * h)
      assert np.allclose(J[:,k], fd, atol=1e-5)

  def test_commutator(self):
    gs = G2()
    for phi in torus.random_points(gs, util.rng(2), 20):
      assert np.max(np.abs(torus.commutator(point(gs, phi)))) < 1e-8

class Test_lipschitz_bounds(unittest.TestCase):
  def test_bounds(self):
    for gs in [G1(), G2()]:
      L_psi, L_xi = torus.lipschitz_bounds(gs)
      assert 0 < L_psi < np.inf
      assert 0 < L_xi < np.inf
      rng = util.rng(3)
      a = torus.random_points(gs, rng, 500)
      b = a + rng.uniform(-0.5, 0.5, size=a.shape)
      d = torus.metric_array(gs, a, b)
      dpsi = torus.tangent_norm(gs, torus.psi_array(gs, a) - torus.psi_array(gs, b))
      dxi = torus.tangent_norm(gs, torus.xi_array(gs, a) - torus.xi_array(gs, b))
      assert np.all(dpsi <= L_psi * d * (1 + 1e-9))
      assert np.all(dxi <= L_xi * d * (1 + 1e-9))

  def test_empty(self):
    assert torus.lipschitz_bounds(gapset.GapSet(base_energy=0.0, gaps=[])) == (0.0, 0.0)

class Test_q_modulus(unittest.TestCase):
  def test_modulus(self):
    gs = G2()
    rng = util.rng(4)
    a = torus.random_points(gs, rng, 500)
    b = torus.random_points(gs, rng, 500)
    d = torus.metric_array(gs, a, b)
    for k in [1, 2, 3]:
      diff = np.abs(torus.q_array(gs, a, k) - torus.q_array(gs, b, k))
      assert np.all(diff <= torus.q_modulus(gs, k) * d * (1 + 1e-9))
