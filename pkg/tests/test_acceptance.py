"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -s``
or in the ``-v`` log) before asserting.
"""
import math
import time

import numpy as np
import pytest

from dense import circuit_matrix
from qprep.angles import build_angle_table, discrete_theta, discrete_theta_numeric
from qprep.circuit import (build_discrete_circuit, build_upsampling_circuit, depth_and_counts,
                           lower_to_basis)
from qprep.dist import (Cauchy, DiscreteSpec, Gaussian, Laplace, StudentT, lognormal_pdf,
                        make_binomial, map_lognormal_support, periodic_sum)
from qprep.forking import DEPTH_CONSTANT, fork_depth_report, fork_transform
from qprep.grid import new_grid, random_zeta
from qprep.sim import marginal, oracle_amplitudes, oracle_xi, postselect, simulate, tvd


@pytest.fixture
def report(capsys):
    def emit(num, name, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return emit


def test_1_oracle_triangle(report):
    worst, t0 = 0.0, time.perf_counter()
    for spec in (Gaussian(0, 1), Laplace(0, 1)):
        for n in range(1, 13):
            for zeta in (0.0, random_zeta(n, 1000 + n)):
                grid = new_grid(n, 12.0, zeta, 0.0)
                table = build_angle_table(spec, grid)
                sim = simulate(build_upsampling_circuit(table)).amplitudes.real
                prod = oracle_amplitudes(table)
                xi = oracle_xi(spec, grid)
                worst = max(worst, np.max(np.abs(sim - prod)), np.max(np.abs(prod - xi)),
                            np.max(np.abs(sim - xi)))
    elapsed = time.perf_counter() - t0
    report(1, "oracle triangle", worst <= 1e-10 and elapsed < 5.0,
           f"max elementwise diff {worst:.2e}, {elapsed:.2f} s")


def test_2_sampling_fidelity(report):
    worst = 0.0
    spec = Gaussian(0, 1)
    for n in range(3, 11):
        grid = new_grid(n, 12.0)
        table = build_angle_table(spec, grid)
        probs = simulate(build_upsampling_circuit(table)).probabilities
        naive = spec.pdf(grid.xs()) * table.delta_x_norm
        worst = max(worst, float(np.sum(np.abs(probs - naive))))
    report(2, "sampled density fidelity", worst < 1e-6, f"max sum |p - P dx| {worst:.2e}")


def test_3_discrete_exactness(report):
    worst = 0.0
    for p in (0.5, 0.3):
        spec = make_binomial(7, p)
        sv = simulate(build_discrete_circuit(discrete_theta(spec), 4))
        worst = max(worst, np.max(np.abs(postselect(sv, 3, 0) - spec.array)),
                    np.max(np.abs(postselect(sv, 3, 1) - (1 - spec.array) / 7)))
    report(3, "discrete exactness", worst <= 1e-12, f"max abs err {worst:.2e}")


def test_4_discrete_limits(report):
    rng = np.random.default_rng(20240604)
    raw = rng.random(8)
    spec = DiscreteSpec(tuple(raw / raw.sum()))
    exact = discrete_theta(spec)
    worst = 0.0
    for m in range(1, 5):
        for i in range(1 << (4 - m)):
            got = discrete_theta_numeric(spec, 4, m, i, eps=1e-5, w=1.0)
            want = exact[i] if m == 1 else math.pi / 2
            worst = max(worst, abs(got - want))
    report(4, "smoothed discrete limits", worst <= 1e-6, f"max angle err {worst:.2e}")


def test_5_forking(report):
    lines, ok = [], True
    for n in (2, 3, 4):
        table = build_angle_table(Gaussian(), new_grid(n, 12.0, random_zeta(n, 5)))
        seq = simulate(build_upsampling_circuit(table)).probabilities
        t0 = time.perf_counter()
        c, layout = fork_transform(table)
        dist = tvd(marginal(simulate(c), layout.output_register), seq)
        elapsed = time.perf_counter() - t0
        rep = fork_depth_report(c, layout)
        ok &= (dist <= 1e-10 and rep["rotation_depth"] == 1 and elapsed < 1.0
               and rep["depth"] <= DEPTH_CONSTANT * n**2)
        lines.append(f"n={n} tvd {dist:.1e} depth {rep['depth']}")
    report(5, "forking equivalence", ok, f"C={DEPTH_CONSTANT}; " + ", ".join(lines))


def test_6_gate_counts(report):
    ok = True
    for n in range(1, 13):
        c = build_upsampling_circuit(build_angle_table(Laplace(), new_grid(n, 12.0)))
        stats = depth_and_counts(c)
        ok &= stats["counts"]["ry"] == stats["total"] == 2**n - 1
        if n > 1:
            d = build_discrete_circuit(np.full(1 << (n - 1), 1.0), n)
            counts = depth_and_counts(d)["counts"]
            ok &= counts == {"h": n - 1, "ry": 2 ** (n - 1), "ry_controlled": 2 ** (n - 1)}
    report(6, "gate-count laws", ok, "n = 1..12")


def test_7_summation_identity(report):
    rng = np.random.default_rng(7)
    tol, worst = 1e-14, 0.0
    for _ in range(1000):
        k = rng.integers(4)
        if k == 0:
            spec = Gaussian(rng.uniform(-3, 3), rng.uniform(0.2, 3))
        elif k == 1:
            spec = Laplace(rng.uniform(-3, 3), rng.uniform(0.2, 3))
        elif k == 2:
            spec = Cauchy(rng.uniform(-3, 3), rng.uniform(0.2, 3))
        else:
            spec = StudentT(rng.uniform(0.5, 10))
        x = rng.uniform(-10, 10)
        y = spec.scale * rng.uniform(0.2, 10)
        whole = periodic_sum(spec, x, y, tol)
        split = periodic_sum(spec, x, 2 * y, tol) + periodic_sum(spec, x + y, 2 * y, tol)
        worst = max(worst, abs(whole - split) / (tol * whole))
    report(7, "summation identity", worst <= 4.0, f"max |residual| = {worst:.2f} tol S")


def test_8_lowering(report):
    worst = 0.0
    for n in range(1, 7):
        table = build_angle_table(Gaussian(), new_grid(n, 12.0, random_zeta(n, 3)))
        circuits = [build_upsampling_circuit(table)]
        if n > 1:
            circuits.append(build_discrete_circuit(discrete_theta(make_binomial(2 ** (n - 1) - 1, 0.3)), n))
        for c in circuits:
            worst = max(worst, np.max(np.abs(circuit_matrix(lower_to_basis(c)) - circuit_matrix(c))))
    report(8, "lowering soundness", worst <= 1e-10, f"max entry diff {worst:.2e}")


def test_9_lognormal(report):
    n = 8
    grid = new_grid(n, 12.0)
    table = build_angle_table(Gaussian(), grid)
    probs = simulate(build_upsampling_circuit(table)).probabilities
    xs = grid.xs()
    ys, dys = map_lognormal_support(xs, table.delta_x_norm)
    relabeled = dict(zip(ys.tolist(), probs.tolist()))
    ok = (np.array_equal(ys, np.exp(xs)) and np.array_equal(dys, np.exp(xs) * table.delta_x_norm)
          and [relabeled[y] for y in ys.tolist()] == probs.tolist() and np.all(np.diff(ys) > 0))
    # the density mass carried by each relabeled point is unchanged
    mass_err = float(np.max(np.abs(lognormal_pdf(ys) * dys - Gaussian().pdf(xs) * table.delta_x_norm)))
    ok = ok and mass_err < 1e-13
    report(9, "lognormal mapping", bool(ok), f"n={n}, mass err {mass_err:.1e}")
