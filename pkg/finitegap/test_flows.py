"""Flow integration unit tests."""
import unittest

import numpy as np

from finitegap import errors
from finitegap import flows
from finitegap import gapset
from finitegap import torus

def G1():
  return gapset.GapSet(base_energy=0.0, gaps=[(1.0, 2.0)])

def G2():
  return gapset.GapSet(base_energy=0.0, gaps=[(1.0, 2.0), (4.0, 4.5)])

def point(gs, phi):
  return torus.DirichletAngles(gapset=gs, phi=phi)

def rk4(field, y, h, steps):
  """Fixed step RK4."""
  for i in range(steps):
    k1 = field(y)
    k2 = field(y + 0.5 * h * k1)
    k3 = field(y + 0.5 * h * k2)
    k4 = field(y + h * k3)
    y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
  return y

class TestIntegrator(unittest.TestCase):
  def test_nodes(self):
    gs = G1()
    integ = flows.Integrator(lambda y:np.ones_like(y), gs, atol=1e-10)
    out = integ.run(np.zeros((2, 1)), [0.3, 1.0, 2.5])
    assert out.shape == (3, 2, 1)
    assert np.allclose(out[:,0,0], [0.3, 1.0, 2.5], atol=1e-14, rtol=0)

  def test_backwards(self):
    integ = flows.Integrator(lambda y:-y, G1(), atol=1e-12)
    out = integ.run(np.ones((1, 1)), [-1.0])
    self.assertAlmostEqual(out[0,0,0], np.e, places=9)

  def test_exponential(self):
    integ = flows.Integrator(lambda y:y, G1(), atol=1e-12, rtol=1e-12)
    out = integ.run(np.ones((1, 1)), [1.0])
    self.assertAlmostEqual(out[0,0,0], np.e, places=9)
    assert integ.stats['accepted'] > 0

  def test_bad_tolerance(self):
    with self.assertRaises(ValueError):
      flows.Integrator(lambda y:y, G1(), atol=0.0)

  def test_underflow(self):
    integ = flows.Integrator(lambda y:y * y, G1(), atol=1e-10)
    with np.errstate(all='ignore'):
      with self.assertRaises(errors.NumericalError):
        integ.run(np.ones((1, 1)), [2.0])

  def test_dense(self):
    integ = flows.Integrator(lambda y:np.cos(y), G1(), atol=1e-12, dense=True)
    integ.run(np.zeros((1, 1)), [1.0])
    assert integ.segments
    segment = integ.segments[0]
    assert np.allclose(flows.hermite(segment, 0.0), segment[2])
    assert np.allclose(flows.hermite(segment, 1.0), segment[3])

class Test_flow_x(unittest.TestCase):
  def test_zero(self):
    p = point(G1(), [0.5])
    assert flows.flow_x(p, 0.0) is p

  def test_reverse(self):
    p = point(G2(), [0.5, 2.0])
    q = flows.flow_x(flows.flow_x(p, 1.5, tol=1e-12), -1.5, tol=1e-12)
    assert torus.metric(p, q) < 1e-9

  def test_period(self):
    p = point(G1(), [np.pi / 2])
    period = flows.period_x(p, 0)
    assert np.pi / np.sqrt(2) < period < np.pi
    q = flows.flow_x(p, period, tol=1e-12)
    self.assertAlmostEqual(q.phi[0], np.pi / 2 + 2 * np.pi, places=8)
    self.assertAlmostEqual(torus.q_field(q, 1), torus.q_field(p, 1), places=8)

  def test_semigroup(self):
    p = point(G2(), [0.4, 2.5])
    for a, b in [(0.3, 0.9), (1.2, -0.5), (-0.7, -0.6)]:
      q = flows.flow_x(flows.flow_x(p, a, tol=1e-12), b, tol=1e-12)
      assert torus.metric(q, flows.flow_x(p, a + b, tol=1e-12)) < 1e-9

  def test_monotone(self):
    p = point(G2(), [0.4, 2.5])
    grid = flows.grid(p, np.linspace(0.0, 5.0, 501), [0.0], tol=1e-11)
    assert np.all(np.diff(grid.phi[:,0], axis=0) > 0)

class Test_flow_t(unittest.TestCase):
  def test_rk4(self):
    gs = G2()
    p = point(gs, [np.pi / 2, np.pi / 2])
    q = flows.flow_t(p, 0.01, tol=1e-12)
    xi = torus.fields(gs)[1]
    expect = rk4(xi, np.array(p.phi), 1e-5, 1000)
    assert torus.metric(q, p.replace(expect)) < 1e-8

  def test_one_gap_orbit(self):
    # One gap: Xi = 2 (E + lo + hi) Psi = 6 Psi, so time 0.01 is translation 0.06.
    p = point(G1(), [np.pi / 2])
    q = flows.flow_t(p, 0.01, tol=1e-12)
    r = flows.flow_x(p, 0.06, tol=1e-12)
    assert torus.metric(q, r) < 1e-8

  def test_one_gap_speed(self):
    # u(x, t) = u(x - c t, 0) with c = -2 (E + lo + hi).
    p = point(G1(), [0.7])
    c = -6.0
    for t in [0.01, 0.05]:
      q = flows.flow_t(p, t, tol=1e-12)
      r = flows.flow_x(p, -c * t, tol=1e-12)
      self.assertAlmostEqual(torus.q_field(q, 1), torus.q_field(r, 1), places=9)

class TestFlowState(unittest.TestCase):
  def test_commutation(self):
    tol = 1e-10
    start = flows.FlowState(point=point(G2(), [np.pi / 2, np.pi / 2]), tol=tol)
    xt = start.advance(dx=1.0).advance(dt=0.1)
    tx = start.advance(dt=0.1).advance(dx=1.0)
    assert torus.metric(xt.point, tx.point) < 10 * tol
    assert xt.x == 1.0 and xt.t == 0.1
    assert xt.stats['accepted'] > 0

  def test_json(self):
    state = flows.FlowState(point=point(G1(), [0.5]), tol=1e-9)
    data = state.json()
    assert data['tol'] == [1e-9, 0.0]
    assert data['x'] == 0.0

  def test_bad_tol(self):
    with self.assertRaises(ValueError):
      flows.FlowState(point=point(G1(), [0.5]), tol=-1.0)

class Test_grid(unittest.TestCase):
  def test_grid(self):
    p = point(G2(), [0.5, 1.0])
    grid = flows.grid(p, [-0.2, 0.0, 0.3], [0.0, 0.01], tol=1e-10)
    assert grid.phi.shape == (3, 2, 2)
    assert np.array_equal(grid.phi[1,0], p.phi)
    q = flows.flow_x(p, 0.3, tol=1e-10)
    assert torus.metric(grid.point(2, 0), q) < 1e-9

  def test_truncated(self):
    p = point(G2(), [0.5, 1.0])
    lifted = flows.grid(p, [0.0, 0.3], [0.0], N=1)
    assert lifted.kept == [0]
    same = flows.grid(p, [0.0, 0.3], [0.0], kept=[0])
    assert np.array_equal(lifted.phi, same.phi)
    full = flows.grid(p, [0.0, 0.3], [0.0])
    assert not np.allclose(lifted.phi[1,0], full.phi[1,0])

  def test_no_zero(self):
    with self.assertRaises(ValueError):
      flows.grid(point(G1(), [0.5]), [0.1, 0.2], [0.0])

  def test_descending(self):
    with self.assertRaises(ValueError):
      flows.grid(point(G1(), [0.5]), [0.0, -0.1], [0.0])

  def test_json(self):
    grid = flows.grid(point(G1(), [0.5]), [0.0, 0.1], [0.0])
    again = flows.TrajectoryGrid.from_json(grid.json())
    assert again.gapset == grid.gapset
    assert np.array_equal(again.phi, grid.phi)

  def test_window_nodes(self):
    x = flows.window_nodes(-1.0, 1.0, 21)
    assert len(x) == 21
    assert 0.0 in x
    x = flows.window_nodes(0.1, 1.0, 4)
    assert len(x) == 5
    assert x[0] == 0.0

class Test_crossing_report(unittest.TestCase):
  def test_g1(self):
    p = point(G1(), [np.pi / 2])
    data = flows.crossing_report(p, 3.0, tol=1e-12)
    assert data
    j, x, rate = data[0]
    assert j == 0
    q = flows.flow_x(p, x, tol=1e-12)
    self.assertAlmostEqual(q.phi[0], np.pi, places=8)
    self.assertAlmostEqual(rate, 2.0, places=8)
    # Upper edge: 2 sqrt(2)
    self.assertAlmostEqual(data[1][2], 2 * np.sqrt(2), places=8)

  def test_interlacing(self):
    # Each mu_j alternates between the two edges of its gap.
    p = point(G2(), [0.4, 2.5])
    data = flows.crossing_report(p, 6.0, tol=1e-12)
    for j in range(2):
      xs = [x for k,x,rate in data if k == j]
      assert len(xs) >= 3
      assert all(b > a for a,b in zip(xs, xs[1:]))
      multiples = [int(round(flows.flow_x(p, x, tol=1e-12).phi[j] / np.pi)) for x in xs]
      assert np.all(np.diff(multiples) == 1)

  def test_empty(self):
    assert flows.crossing_report(point(G1(), [0.5]), 0.0) == []
