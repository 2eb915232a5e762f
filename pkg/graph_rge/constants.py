# constants.py
"""Numerical tolerances and fixed protocol constants."""

# Weight vectors must sum to one within this bound.
WEIGHT_SUM_TOL = 1e-12

# Transport feasibility: marginal sums may differ by at most this much.
FEASIBILITY_TOL = 1e-9

# Agreement with brute-force oracles.
ORACLE_TOL = 1e-9

# Maximum asymmetry accepted for a distance matrix.
SYMMETRY_TOL = 1e-9

# Eigenvalues closer than this are treated as tied.
EIGEN_TIE_TOL = 1e-10

# Dense eigensolver up to this many nodes, Lanczos above.
DENSE_EIGEN_MAX_NODES = 512

# Transport marginals are rounded onto an integer grid of this many units.
TRANSPORT_GRID = 10**12

# Default number of random graphs for the Monte-Carlo kernel oracle.
ORACLE_RANDOM_GRAPHS = 8192

# Cross-validation protocol.
CV_FOLDS = 10
CV_REPETITIONS = 10
INNER_FOLDS = 3
GAMMA_GRID = (1e-3, 1e-2, 1e-1, 1.0, 10.0)
DMAX_GRID = tuple(range(3, 31, 3))
C_GRID = (1e-2, 1e-1, 1.0, 10.0, 100.0)

# Linear SVM stopping rule.
SVM_TOL = 1e-4
SVM_MAX_EPOCHS = 1000

# Refuse quadratic-memory kernel matrices above this many graphs.
KERNEL_MAX_GRAPHS = 5000

# Significant digits for every text export.
TEXT_DIGITS = 17
