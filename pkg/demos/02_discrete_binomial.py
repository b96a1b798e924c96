"""
Exact discrete distributions
============================

A probability table of length 2**(n-1) is loaded with Hadamards on the low
qubits and one multiplexed rotation on the top qubit.  Measuring the top
qubit in |0> leaves the table itself.
"""

import numpy as np

from qprep import build_discrete_circuit, discrete_theta, make_binomial, simulate
from qprep.sim import postselect

spec = make_binomial(7, 0.3)
n = spec.num_qubits
circuit = build_discrete_circuit(discrete_theta(spec), n)
sv = simulate(circuit)

kept = postselect(sv, n - 1, 0)
print("binomial(7, 0.3):", np.round(spec.array, 6))
print("post-selected    :", np.round(kept, 6))
print("max abs error    :", np.max(np.abs(kept - spec.array)))

# the other branch holds the normalized complement
print("complement       :", np.round(postselect(sv, n - 1, 1), 6))
