"""
Trading width for depth
=======================

The forked circuit puts every rotation on its own qubit, applies them all
at once, then routes the chosen branches into a short output register
with controlled swaps.
"""

from qprep import Laplace, build_angle_table, build_upsampling_circuit, new_grid, simulate
from qprep.circuit import depth_and_counts
from qprep.forking import fork_depth_report, fork_transform
from qprep.sim import marginal, tvd

spec = Laplace(mu=0.0, b=1.0)
for n in (2, 3, 4):
    table = build_angle_table(spec, new_grid(n, 12.0, 0.0, 0.0))
    seq = build_upsampling_circuit(table)
    forked, layout = fork_transform(table)
    report = fork_depth_report(forked, layout)
    dist = tvd(marginal(simulate(forked), layout.output_register), simulate(seq).probabilities)
    print(f"n={n}: sequential depth {depth_and_counts(seq)['depth']}, forked depth "
          f"{report['depth']} on {report['num_qubits']} qubits, "
          f"{report['cswap_count']} cswaps, tvd {dist:.1e}")

###############################################################################
# Depth grows like n**2 / 2 while the sequential form grows like 2**n

for n in range(5, 11):
    table = build_angle_table(spec, new_grid(n, 12.0, 0.0, 0.0))
    forked, layout = fork_transform(table)
    print(n, fork_depth_report(forked, layout)["depth"], 2**n - 1)
