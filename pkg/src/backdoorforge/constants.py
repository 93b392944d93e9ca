# numeric defaults
# one place for the tolerances the stats, discovery and baseline modules share

"""backdoorforge.constants

Numeric tolerances, optimizer defaults and the full-size grid.

The tolerances are absolute unless stated otherwise. The grid values are
defaults of `backdoorbench.config.full_grid`, not limits.
"""

# Smoothing for |r| in gradients: |r| ~ sqrt(r^2 + SMOOTH_EPS^2)
SMOOTH_EPS = 1e-8

# Ridge applied by `backdoorbench benchmark --ridge` with no value (off by default)
RIDGE_EPS = 1e-8

# Relative eigenvalue floor below which a conditioning submatrix counts as singular
COND_TOL = 1e-12

# Var(beta^T Z) below this is a degenerate direction
DEGENERATE_VAR = 1e-12

# Symmetry tolerance for covariance views
SYM_TOL = 1e-12

# Significance level for Fisher-z tests when none is given
DEFAULT_ALPHA = 0.05

# lambda2 ladder: initial value, multiplier, number of rounds
LAMBDA2_INIT = 1e-4
LAMBDA2_GROWTH = 2.0
LAMBDA2_ROUNDS = 12

# Entner search defaults
ENTNER_BUDGET = 500

# full-size simulation grid
FULL_GRID_BLOCK_DIM = 30
FULL_GRID_N_TOTAL = 20_000
FULL_GRID_N_SETTINGS = 25
FULL_GRID_SIGMA_X2 = (0.01, 0.6)
FULL_GRID_OMEGA = (0.1, 0.5)
