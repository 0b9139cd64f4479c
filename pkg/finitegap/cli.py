"""Command line interface: python -m finitegap <command> ..."""
import sys
import json
import logging
import argparse

import numpy as np

from finitegap import abel
from finitegap import approx
from finitegap import errors
from finitegap import flows
from finitegap import gapset
from finitegap import oracle
from finitegap import reconstruct
from finitegap import registry
from finitegap import util
from finitegap import verify

log = logging.getLogger(__name__)

def progress(message, *args):
  sys.stderr.write((message%args if args else message) + '\n')

def read_json(filename):
  try:
    with open(filename) as f:
      return json.load(f)
  except (IOError, OSError) as e:
    raise errors.ConfigError('Cannot read %s: %s'%(filename, e))
  except ValueError as e:
    raise errors.ConfigError('Malformed JSON in %s: %s'%(filename, e))

def _require(data, key, filename):
  if key not in data:
    raise errors.ConfigError('%s is missing key: %s'%(filename, key), key=key)
  return data[key]

def _entity(cls, data, filename):
  try:
    return cls.from_json(data)
  except (KeyError, TypeError) as e:
    raise errors.ConfigError('%s is not a valid %s: %s'%(filename, cls.entity_type, e), key=str(e))

def _upstream(data, **kw):
  """Metadata carrying the config hash recorded by the producing command."""
  meta = util.metadata(**kw)
  meta['config_sha1'] = (data.get('metadata') or {}).get('config_sha1')
  return meta

def _int_list(value):
  try:
    return [int(i) for i in value.split(',') if i.strip()]
  except ValueError:
    raise argparse.ArgumentTypeError('Expected comma separated integers: %r'%value)

def write(args, data, rows=None, header=None):
  """JSON to --out (or stdout); tables go to CSV when --out ends in .csv."""
  if rows is not None and args.out and args.out.endswith('.csv'):
    with open(args.out, 'w') as f:
      for k,v in sorted(data['metadata'].items()):
        f.write('# %s: %s\n'%(k, v))
      util.write_csv([[r[h] for h in header] for r in rows], header, f)
  elif args.out:
    with open(args.out, 'w') as f:
      util.json_pretty_dump(data, f)
  else:
    util.json_pretty_print(data)
  if args.out:
    progress('Wrote: %s', args.out)

def _config(args):
  config = registry.load_file(args.config)
  return config, args.tol or config.tol, config.seed if args.seed is None else args.seed

##### Commands #####

def cmd_gapset(args):
  data = read_json(args.file)
  family = None
  if isinstance(data, dict) and 'labels' in data:
    try:
      family = gapset.QPGapFamily.from_json(data)
    except (KeyError, TypeError) as e:
      raise errors.ConfigError('Invalid family: %s'%e, key=str(e))
    gs = family.gapset()[0]
  else:
    config = registry.load_config(data)
    gs, family = config.gapset, config.family
  progress('Gap set: %s gaps', len(gs))
  if args.action == 'trend':
    rows = gapset.summability_trend(gs, args.N or [len(gs)], threshold=args.threshold)
    header = sorted(rows[0].keys()) if rows else ['N']
    write(args, {'metadata': util.metadata(data, seed=args.seed), 'rows': rows}, rows, header)
    return 0
  report = gapset.craig_check(gs, threshold=args.threshold)
  out = {
    'metadata': util.metadata(data, seed=args.seed),
    'report': report.json(),
    'geometry': gapset.geometry(gs)
  }
  if args.tau is not None:
    out['carleson'] = gapset.carleson_check(gs, args.tau)
  if args.qp:
    if family is None:
      raise errors.ConfigError('--qp needs a quasi-periodic family', key='family')
    out['qp'] = gapset.qp_family_check(
      family, a=args.a, b=args.b, c=args.c, L=args.L, D=args.D, F=args.F
    )
  write(args, out)
  return 0

def cmd_flow(args):
  config, tol, seed = _config(args)
  x = flows.window_nodes(args.x0, args.x1, args.nx)
  t = flows.window_nodes(args.t0, args.t1, args.nt)
  progress('Flowing %s x %s nodes, tol=%g', len(x), len(t), tol)
  grid = flows.grid(config.point(), x, t, tol=tol)
  data = grid.json()
  data['metadata'] = util.metadata(config.json(), tol=tol, seed=seed, stats=grid.stats)
  write(args, data)
  return 0

def cmd_reconstruct(args):
  data = read_json(args.grid)
  grid = _entity(flows.TrajectoryGrid, data, args.grid)
  field = reconstruct.trace_derivatives(grid)
  out = field.json()
  tol = args.tol or grid.tol or 1e-10
  if args.fd_step:
    h = args.fd_step
    progress('Finite-difference check at h=%g', h)
    out['fd_step'] = h
    out['fd'] = reconstruct.fd_check(grid, steps=(2 * h, h, h / 2, h / 4), tol=tol)
  out['metadata'] = _upstream(data, tol=tol, seed=args.seed)
  write(args, out)
  return 0

def cmd_abel(args):
  config, tol, seed = _config(args)
  grid = _entity(flows.TrajectoryGrid, read_json(args.grid), args.grid)
  if grid.gapset != config.gapset:
    raise errors.GapSetMismatchError('Grid and config have different gap sets')
  basis = abel.solve_basis(config.gapset, config.quad_order)
  delta, zeta, residual = abel.linearization_fit(basis, grid)
  out = {
    'metadata': util.metadata(config.json(), tol=tol, seed=seed),
    'delta': delta,
    'zeta': zeta,
    'residual': residual,
    'basis': {'residual': basis.residual, 'condition': basis.condition}
  }
  write(args, out)
  return 0

def cmd_oracle(args):
  if args.init:
    data = read_json(args.init)
    period = _require(data, 'period', args.init)
    samples = _require(data, 'samples', args.init)
    try:
      f = oracle.PeriodicField(period=period, samples=samples, time=data.get('time', 0.0))
    except (TypeError, ValueError) as e:
      raise errors.ConfigError('Invalid periodic field: %s'%e, key='samples')
    meta = data
  elif args.config:
    config, tol, seed = _config(args)
    f = oracle.slice_field(config.gapset, config.point(), args.modes, tol)
    meta = config.json()
  else:
    raise errors.ConfigError('Give --init or --config')
  n = int(round(args.T / args.dt))
  progress('ETDRK4: %s steps of %g on %s modes', n, args.dt, len(f))
  evolved = oracle.kdv_step(f, args.dt, n)
  out = evolved.json()
  out['conserved'] = {'initial': oracle.conserved(f), 'final': oracle.conserved(evolved)}
  out['metadata'] = util.metadata(meta, seed=args.seed, dt=args.dt)
  write(args, out)
  return 0

def cmd_residual(args):
  data = read_json(args.field)
  field = _entity(reconstruct.FieldGrid, data, args.field)
  out = oracle.residual(field, order=args.order)
  out['metadata'] = _upstream(data, seed=args.seed)
  write(args, out)
  return 0

def cmd_approx(args):
  config, tol, seed = _config(args)
  gs = config.gapset
  N_list = args.N or list(range(1, len(gs) + 1))
  meta = util.metadata(config.json(), tol=tol, seed=seed)
  if args.action == 'sweep':
    window = ((args.x0, args.x1), (args.t0, args.t1))
    rows = approx.approximant_sweep(gs, N_list, config.point(), window=window, tol=tol, nx=args.nx, nt=args.nt)
    header = ['N', 'D_N', 'K_N', 'm', 'L', 'C', 'corner_ok', 'stability_ok', 'stability_worst']
  else:
    rows = approx.c4_convergence(gs, N_list, config.point(), x_window=(args.x0, args.x1), nx=args.nx, tol=tol)
    header = ['N', 'du0', 'du2', 'du4']
  for row in rows:
    progress('N=%s %s', row['N'], ' '.join('%s=%.3e'%(h, row[h]) for h in header[1:3]))
  write(args, {'metadata': meta, 'rows': rows}, rows, header)
  return 0

def cmd_verify(args):
  seed = args.seed or 0
  names = [name for name,func in verify.CHECKS]
  for name in args.only or []:
    if name not in names:
      raise errors.ConfigError('Unknown check: %s'%name, key='only')
  results = verify.run(quick=args.quick, seed=seed, names=args.only)
  for r in results:
    print('%-24s %-4s %12.4e %12.4e %8.2fs'%(
      r['name'], 'ok' if r['ok'] else 'FAIL', r['value'], r['threshold'], r['seconds']
    ))
  if args.out:
    write(args, {'metadata': util.metadata(seed=seed, quick=args.quick), 'results': results})
  return 0 if all(r['ok'] for r in results) else 1

##### Parser #####

def parser():
  common = argparse.ArgumentParser(add_help=False)
  common.add_argument('--tol', help='Integrator tolerance', type=float)
  common.add_argument('--seed', help='Random seed', type=int)
  common.add_argument('--out', help='Output filename; default is stdout')
  common.add_argument('--debug', help='Show debugging information', action='store_true')

  p = argparse.ArgumentParser(prog='finitegap', description='Finite-gap KdV solutions')
  sub = p.add_subparsers(dest='command')
  sub.required = True

  s = sub.add_parser('gapset', parents=[common], help='Check spectral conditions')
  s.add_argument('action', choices=['check', 'trend'])
  s.add_argument('file', help='Config or quasi-periodic family JSON')
  s.add_argument('--tau', type=float, help='Check homogeneity with this tau')
  s.add_argument('--qp', action='store_true', help='Check the quasi-periodic gap bounds')
  s.add_argument('--threshold', type=float, default=np.inf)
  s.add_argument('--N', type=_int_list, help='Truncations for trend, e.g. 16,64,256')
  for name,default in [('a', 1.0), ('b', 1.0), ('c', 1.0), ('L', 1.0), ('D', 1.0), ('F', 1.0)]:
    s.add_argument('--%s'%name, type=float, default=default)
  s.set_defaults(func=cmd_gapset)

  s = sub.add_parser('flow', parents=[common], help='Integrate a trajectory grid')
  s.add_argument('--config', required=True)
  s.add_argument('--x0', type=float, default=0.0)
  s.add_argument('--x1', type=float, default=1.0)
  s.add_argument('--t0', type=float, default=0.0)
  s.add_argument('--t1', type=float, default=0.0)
  s.add_argument('--nx', type=int, default=11)
  s.add_argument('--nt', type=int, default=1)
  s.set_defaults(func=cmd_flow)

  s = sub.add_parser('reconstruct', parents=[common], help='Trace formulas on a grid')
  s.add_argument('--grid', required=True)
  s.add_argument('--fd-step', type=float, dest='fd_step')
  s.set_defaults(func=cmd_reconstruct)

  s = sub.add_parser('abel', parents=[common], help='Linearize the flows by the Abel map')
  s.add_argument('--config', required=True)
  s.add_argument('--grid', required=True)
  s.set_defaults(func=cmd_abel)

  s = sub.add_parser('oracle', parents=[common], help='Pseudo-spectral KdV evolution')
  s.add_argument('--init', help='PeriodicField JSON')
  s.add_argument('--config', help='One-gap config to sample over a period')
  s.add_argument('--modes', type=int, default=512)
  s.add_argument('--T', type=float, default=0.1)
  s.add_argument('--dt', type=float, default=1e-4)
  s.set_defaults(func=cmd_oracle)

  s = sub.add_parser('residual', parents=[common], help='KdV residual of a field grid')
  s.add_argument('--field', required=True)
  s.add_argument('--order', type=int, choices=[2, 4], default=4)
  s.set_defaults(func=cmd_residual)

  s = sub.add_parser('approx', parents=[common], help='Finite-gap approximants')
  s.add_argument('action', choices=['sweep', 'c4'])
  s.add_argument('--config', required=True)
  s.add_argument('--N', type=_int_list)
  s.add_argument('--x0', type=float, default=-1.0)
  s.add_argument('--x1', type=float, default=1.0)
  s.add_argument('--t0', type=float, default=-0.1)
  s.add_argument('--t1', type=float, default=0.1)
  s.add_argument('--nx', type=int, default=21)
  s.add_argument('--nt', type=int, default=5)
  s.set_defaults(func=cmd_approx)

  s = sub.add_parser('verify', parents=[common], help='Run the acceptance suite')
  s.add_argument('--quick', action='store_true')
  s.add_argument('--only', type=lambda v:[i for i in v.split(',') if i])
  s.set_defaults(func=cmd_verify)
  return p

def run(argv=None):
  """Run the CLI; returns the exit code."""
  try:
    args = parser().parse_args(argv)
  except SystemExit as e:
    return e.code if isinstance(e.code, int) else 2
  logging.basicConfig(level=logging.DEBUG if args.debug else logging.WARNING)
  try:
    return args.func(args)
  except errors.NumericalError as e:
    progress('Numerical failure: %s', e)
    return 3
  except ValueError as e:
    key = getattr(e, 'key', None)
    progress('Error%s: %s', ' (%s)'%key if key else '', e)
    return 2

if __name__ == '__main__':
  sys.exit(run())
