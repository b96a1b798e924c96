"""Upsampling state preparation for probability distributions.

Build angle tables from a density on a sampling window, turn them into
multiplexed-RY or forking circuits, and check the result against direct
amplitude oracles with a dense statevector simulator.
"""
from .angles import (AngleTable, build_angle_table, compute_delta_x, compute_theta,
                     discrete_table, discrete_theta, discrete_theta_numeric)
from .circuit import (Circuit, Gate, build_discrete_circuit, build_upsampling_circuit,
                      depth_and_counts, export_qasm, lower_to_basis, parse_qasm)
from .dist import (Cauchy, DiscreteSpec, Gaussian, Laplace, StudentT, TruncationError,
                   default_window, make_binomial, map_lognormal_support, mode, pdf_at,
                   periodic_sum)
from .forking import ForkingLayout, fork_depth_report, fork_transform
from .grid import SamplingGrid, bit_decompose, index_to_x, new_grid
from .sim import (StateVector, VerificationReport, marginal, oracle_amplitudes, oracle_xi,
                  postselect, simulate, tvd, unitary, verify)

__version__ = "0.1.0"
