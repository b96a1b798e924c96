"""Dense statevector simulation, the two amplitude oracles, and the
verification report.

State tensors have one axis per qubit, ordered so that the flattened
(C-order) array is indexed little-endian: qubit ``q_m`` is axis
``n - 1 - m``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .angles import AngleTable, build_angle_table, compute_delta_x, discrete_theta
from .circuit import Circuit, depth_and_counts
from .dist import DEFAULT_TOL, DiscreteSpec, Distribution, periodic_sum
from .grid import MAX_QUBITS, SamplingGrid

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


class BudgetError(RuntimeError):
    """Requested register exceeds the simulator's qubit budget."""


def qubit_budget() -> int:
    """24 qubits, lowered by ``QPREP_MAX_QUBITS`` when set."""
    env = os.environ.get("QPREP_MAX_QUBITS")
    if env:
        return max(1, min(MAX_QUBITS, int(env)))
    return MAX_QUBITS


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities)))


def _index(n, fixed, rest=0):
    idx = [slice(None)] * (n + rest)
    for q, v in fixed:
        idx[n - 1 - q] = v
    return tuple(idx)


def _apply(psi, g, n, rest):
    ctrl = [(q, 1 if pos else 0) for q, pos in g.controls]
    if g.kind in ("ry", "h", "x"):
        t = g.targets[0]
        i0 = _index(n, ctrl + [(t, 0)], rest)
        i1 = _index(n, ctrl + [(t, 1)], rest)
        a = psi[i0].copy()
        b = psi[i1]
        if g.kind == "x":
            psi[i0] = b
            psi[i1] = a
            return
        if g.kind == "ry":
            c, s = math.cos(g.angle / 2.0), math.sin(g.angle / 2.0)
            m = ((c, -s), (s, c))
        else:
            m = _H
        psi[i0] = m[0][0] * a + m[0][1] * b
        psi[i1] = m[1][0] * a + m[1][1] * b
    elif g.kind in ("swap", "cswap"):
        ta, tb = g.targets
        i01 = _index(n, ctrl + [(ta, 0), (tb, 1)], rest)
        i10 = _index(n, ctrl + [(ta, 1), (tb, 0)], rest)
        tmp = psi[i01].copy()
        psi[i01] = psi[i10]
        psi[i10] = tmp
    else:
        raise ValueError(f"cannot simulate gate kind {g.kind!r}")


def _check_budget(n):
    budget = qubit_budget()
    if n > budget:
        raise BudgetError(f"{n} qubits exceed the simulation budget of {budget}")


def simulate(c: Circuit, initial=None) -> StateVector:
    """Apply ``c`` to ``|0...0>`` (or to ``initial``)."""
    n = c.num_qubits
    _check_budget(n)
    if initial is None:
        psi = np.zeros(1 << n, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(initial, dtype=complex)
        if psi.shape != (1 << n,):
            raise ValueError("initial state has the wrong dimension")
    psi = psi.reshape((2,) * n)
    for g in c.gates:
        _apply(psi, g, n, 0)
    return StateVector(n, psi.reshape(-1))


def unitary(c: Circuit) -> np.ndarray:
    """Dense unitary of ``c``; column j is the image of basis state j."""
    n = c.num_qubits
    if n > 12:
        raise BudgetError("dense unitaries are limited to 12 qubits")
    u = np.eye(1 << n, dtype=complex).reshape((2,) * n + (1 << n,))
    for g in c.gates:
        _apply(u, g, n, 1)
    return u.reshape(1 << n, 1 << n)


def oracle_amplitudes(table: AngleTable) -> np.ndarray:
    """Amplitudes from the product formula over the angle table.

    Basis index i gets ``prod_m cos(-pi/2 * b_m + theta_m(low_m) / 2)`` where
    ``b_m`` is bit ``n-m`` of i and ``low_m`` the integer of the bits below it.
    """
    n = table.n
    idx = np.arange(1 << n)
    amp = np.ones(1 << n)
    for m in range(1, n + 1):
        theta = table.level(m)
        bit = (idx >> (n - m)) & 1
        low = idx & ((1 << (n - m)) - 1)
        amp = amp * np.cos(-0.5 * np.pi * bit + 0.5 * theta[low])
    return amp


def oracle_xi(spec: Distribution, grid: SamplingGrid, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Amplitudes ``sqrt(delta_x * sum_j P(x_i + j w))`` evaluated directly."""
    dx = compute_delta_x(spec, grid, tol)
    return np.sqrt(dx * periodic_sum(spec, grid.xs(), grid.w, tol))


def marginal(sv: StateVector, qubits) -> np.ndarray:
    """Distribution over the listed qubits; ``qubits[0]`` is the low bit."""
    qubits = list(qubits)
    n = sv.num_qubits
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < n for q in qubits):
        raise ValueError(f"bad qubit list {qubits}")
    p = sv.probabilities.reshape((2,) * n)
    axes = [n - 1 - q for q in qubits]
    others = tuple(a for a in range(n) if a not in axes)
    p = p.sum(axis=others) if others else p
    # remaining axes are in increasing axis order; put the highest listed qubit first
    kept = sorted(axes)
    order = [kept.index(a) for a in reversed(axes)]
    return np.transpose(p, order).reshape(-1)


def postselect(sv: StateVector, qubit: int, bit: int) -> np.ndarray:
    """Distribution over the other qubits (ascending, little-endian) given
    that ``qubit`` measured ``bit``."""
    n = sv.num_qubits
    if not 0 <= qubit < n or bit not in (0, 1):
        raise ValueError("bad post-selection request")
    p = sv.probabilities.reshape((2,) * n)
    branch = np.take(p, bit, axis=n - 1 - qubit).reshape(-1)
    weight = branch.sum()
    if weight <= 1e-15:
        raise ValueError(f"qubit {qubit} = {bit} has zero probability")
    return branch / weight


def tvd(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


@dataclass
class IndexRecord:
    index: int
    x: float
    prob_circuit: float
    prob_oracle: float
    pdf_delta: float

    @property
    def abs_err(self) -> float:
        return abs(self.prob_circuit - self.prob_oracle)


@dataclass
class VerificationReport:
    records: list
    tvd: float
    max_abs_err: float
    max_rel_err: float
    wrap_error_estimate: float
    gate_counts: dict
    depth: int
    amplitude_err: float = float("nan")
    extra: dict = field(default_factory=dict)
    passed: bool = True
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["records"] = [dict(asdict(r), abs_err=r.abs_err) for r in self.records]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "x", "prob_circuit", "prob_oracle", "pdf_delta", "abs_err"])
        for r in self.records:
            w.writerow([r.index, repr(r.x), repr(r.prob_circuit), repr(r.prob_oracle),
                        repr(r.pdf_delta), repr(r.abs_err)])
        return buf.getvalue()


def _output_distribution(circuit, layout):
    sv = simulate(circuit)
    imag = float(np.max(np.abs(sv.amplitudes.imag), initial=0.0))
    if imag > 1e-14:
        raise AssertionError(f"builder circuit produced complex amplitudes (|imag| = {imag:g})")
    if layout is None:
        return sv, sv.probabilities
    return sv, marginal(sv, layout.output_register)


def verify(target, grid: SamplingGrid | None, circuit: Circuit, *, layout=None,
           tol: float = DEFAULT_TOL, max_tvd: float = 1e-10,
           max_amp_err: float = 1e-10) -> VerificationReport:
    """Simulate ``circuit`` and compare with the oracles for ``target``.

    For a continuous ``target`` the reference is the direct wrapped-density
    amplitude; the product-formula oracle and the unwrapped ``P(x_i) dx``
    are reported alongside.  For a :class:`DiscreteSpec` the circuit is
    post-selected on the top logical qubit reading 0 and compared with the
    probabilities themselves.  ``layout`` selects the output register of a
    forked circuit.
    """
    stats = depth_and_counts(circuit)
    sv, probs = _output_distribution(circuit, layout)
    failures = []
    if isinstance(target, DiscreteSpec):
        n = target.num_qubits
        p = target.array
        if layout is None:
            cond = postselect(sv, n - 1, 0)
            comp = postselect(sv, n - 1, 1)
        else:
            half = probs.reshape(2, -1)
            cond = half[0] / half[0].sum()
            comp = half[1] / half[1].sum()
        want_comp = (1.0 - p) / ((1 << (n - 1)) - 1)
        records = [IndexRecord(i, float(i), float(cond[i]), float(p[i]), float("nan"))
                   for i in range(p.size)]
        err = np.abs(cond - p)
        amp_err = float(np.max(np.abs(comp - want_comp)))
        report = VerificationReport(
            records, tvd(cond, p), float(err.max()),
            float(np.max(err[p > 0] / p[p > 0])) if np.any(p > 0) else 0.0,
            0.0, stats["counts"], stats["depth"], amp_err,
            {"complement_max_abs_err": amp_err})
        if report.max_abs_err > 1e-12:
            failures.append(f"post-selected max abs error {report.max_abs_err:.3g} > 1e-12")
        if amp_err > 1e-12:
            failures.append(f"complement branch error {amp_err:.3g} > 1e-12")
    else:
        xi = oracle_xi(target, grid, tol)
        table = build_angle_table(target, grid, tol)
        amp = oracle_amplitudes(table)
        want = xi**2
        xs = grid.xs()
        naive = np.asarray(target.pdf(xs)) * table.delta_x_norm
        records = [IndexRecord(i, float(xs[i]), float(probs[i]), float(want[i]), float(naive[i]))
                   for i in range(xs.size)]
        err = np.abs(probs - want)
        nz = want > 0
        amp_err = float(np.max(np.abs(amp - xi)))
        extra = {"oracle_norm_err": abs(float(np.sum(want)) - 1.0),
                 "delta_x_norm": table.delta_x_norm, "delta_x": grid.delta_x}
        if layout is None:
            extra["circuit_amplitude_err"] = float(np.max(np.abs(sv.amplitudes.real - xi)))
        report = VerificationReport(
            records, tvd(probs, want), float(err.max()),
            float(np.max(err[nz] / want[nz])) if np.any(nz) else 0.0,
            float(np.sum(np.abs(want - naive))), stats["counts"], stats["depth"],
            amp_err, extra)
        if report.tvd > max_tvd:
            failures.append(f"tvd {report.tvd:.3g} > {max_tvd:g}")
        if amp_err > max_amp_err:
            failures.append(f"oracle disagreement {amp_err:.3g} > {max_amp_err:g}")
        if extra.get("circuit_amplitude_err", 0.0) > max_amp_err:
            failures.append(f"circuit amplitude error {extra['circuit_amplitude_err']:.3g}")
    if abs(sv.norm() - 1.0) > 1e-12:
        failures.append(f"state norm {sv.norm()!r} drifted from 1")
    report.failures = failures
    report.passed = not failures
    return report


def discrete_reference_state(probs: DiscreteSpec) -> np.ndarray:
    """Amplitudes of ``(|0>|phi> + |1>|phi*>) / sqrt(2**(n-1))`` for the top qubit."""
    p = probs.array
    half = p.size
    return np.concatenate([np.sqrt(p), np.sqrt(1.0 - p)]) / math.sqrt(half)


__all__ = [
    "BudgetError", "IndexRecord", "StateVector", "VerificationReport", "discrete_reference_state",
    "discrete_theta", "marginal", "oracle_amplitudes", "oracle_xi", "postselect", "qubit_budget",
    "simulate", "tvd", "unitary", "verify",
]
