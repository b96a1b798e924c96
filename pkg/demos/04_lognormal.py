"""
Lognormal by relabeling
=======================

Preparing a Gaussian and reading each grid point x as y = exp(x) gives a
lognormal sample with cells of width exp(x) dx.  No new circuit is needed.
"""

import numpy as np

from qprep import Gaussian, build_angle_table, build_upsampling_circuit, new_grid, simulate
from qprep.dist import lognormal_pdf, map_lognormal_support

grid = new_grid(6, 12.0, 0.0, 0.0)
table = build_angle_table(Gaussian(), grid)
probs = simulate(build_upsampling_circuit(table)).probabilities

ys, dys = map_lognormal_support(grid.xs(), table.delta_x_norm)
print("mass check:", np.max(np.abs(lognormal_pdf(ys) * dys - probs)))
print("mean of y :", np.sum(ys * probs), "exact", np.exp(0.5))
