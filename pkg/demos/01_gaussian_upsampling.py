"""
Loading a Gaussian by upsampling
================================

Each added qubit doubles the number of grid points inside a fixed window.
The rotation angles come from ratios of periodic image sums, so the
prepared probabilities match the wrapped density exactly.
"""

import numpy as np

from qprep import Gaussian, build_angle_table, build_upsampling_circuit, new_grid, simulate
from qprep.sim import oracle_xi

spec = Gaussian(mu=0.0, sigma=1.0)

# a 12-sigma window centred on the mode
for n in (2, 4, 6):
    grid = new_grid(n, 12.0, 0.0, 0.0)
    table = build_angle_table(spec, grid)
    circuit = build_upsampling_circuit(table)
    probs = simulate(circuit).probabilities
    err = np.max(np.abs(probs - oracle_xi(spec, grid) ** 2))
    print(f"n={n}: {len(circuit)} rotations, dx={grid.delta_x:.4f}, "
          f"norm factor={table.delta_x_norm:.6f}, max err vs oracle {err:.1e}")

###############################################################################
# The probabilities track P(x) times the normalization factor

grid = new_grid(5, 12.0, 0.0, 0.0)
table = build_angle_table(spec, grid)
probs = simulate(build_upsampling_circuit(table)).probabilities
for x, p in zip(grid.xs()[12:20], probs[12:20]):
    print(f"x={x:+.3f}  circuit={p:.6e}  P(x)dx={spec.pdf(x) * table.delta_x_norm:.6e}")
