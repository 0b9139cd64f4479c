"""
Finite-gap solutions of the KdV equation.

Constructs solutions of u_t - 6 u u_x + u_xxx = 0 from a finite gap set by
integrating the Dubrovin flows on the isospectral torus, reconstructs u by
trace formulas, and checks the results against independent oracles.

Modules:
  gapset - Gap sets, geometry, spectral conditions
  torus - Dirichlet angles, metric, fields Psi and Xi
  flows - Adaptive integration of the translation and KdV flows
  reconstruct - Trace formulas and the diagonal Green's function
  abel - Harmonic measures and the Abel map
  oracle - Pseudo-spectral solver and finite-difference residuals
  approx - Convergence of finite-gap approximants
  registry - Run configurations
  verify - Acceptance suite
  cli - Command line interface
  util - Other utilities
  errors - Exceptions

"""

__version__ = '0.1.0'
