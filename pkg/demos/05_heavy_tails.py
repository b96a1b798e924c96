"""
Heavy tails and wrap-around
===========================

The circuit always prepares the periodically wrapped density.  For a
Cauchy target the images from neighbouring windows never become
negligible, so the prepared state differs visibly from P(x) dx even though
it matches its own oracle to rounding.
"""

from qprep import Cauchy, build_angle_table, build_upsampling_circuit, new_grid
from qprep.sim import verify

spec = Cauchy(x0=0.0, gamma=1.0)
for w in (4.0, 40.0, 400.0):
    grid = new_grid(6, w, 0.0, 0.0)
    circuit = build_upsampling_circuit(build_angle_table(spec, grid))
    report = verify(spec, grid, circuit)
    print(f"w={w:6.0f}: passed={report.passed}, tvd={report.tvd:.1e}, "
          f"wrap error={report.wrap_error_estimate:.3e}")
