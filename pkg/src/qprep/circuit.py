"""Gate-level circuit IR, the upsampling and discrete builders, lowering to a
basis gate set, and JSON / OpenQASM 3 serialization.

Qubit ``q_m`` is bit m of the little-endian basis index.  In QASM it is
``q[m]``; the register order is the same on both sides of that boundary.
"""
from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .angles import AngleTable

KINDS = ("ry", "h", "x", "swap", "cswap")
SCHEMA_VERSION = 1


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One gate.  ``controls`` holds ``(qubit, positive)`` pairs; a negative
    control fires when its qubit reads 0."""

    kind: str
    targets: tuple
    controls: tuple = ()
    angle: float | None = None

    @property
    def qubits(self) -> tuple:
        return tuple(q for q, _ in self.controls) + tuple(self.targets)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "ry":
            out["angle"] = self.angle
        if len(self.targets) == 1:
            out["target"] = self.targets[0]
        else:
            out["targets"] = list(self.targets)
        out["controls"] = [{"q": q, "pol": "+" if pos else "-"} for q, pos in self.controls]
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "Gate":
        kind = obj["kind"]
        targets = (obj["target"],) if "target" in obj else tuple(obj["targets"])
        controls = tuple((int(c["q"]), c["pol"] == "+") for c in obj.get("controls", []))
        for c in obj.get("controls", []):
            if c["pol"] not in ("+", "-", "−"):
                raise CircuitError(f"bad control polarity {c['pol']!r}")
        angle = float(obj["angle"]) if kind == "ry" else None
        return cls(kind, tuple(int(t) for t in targets), controls, angle)


def ry(target, angle, controls=()):
    return Gate("ry", (target,), tuple(controls), float(angle))


def h(target):
    return Gate("h", (target,))


def x(target, controls=()):
    return Gate("x", (target,), tuple(controls))


def cx(control, target):
    return Gate("x", (target,), ((control, True),))


def swap(a, b):
    return Gate("swap", (a, b))


def cswap(control, a, b):
    return Gate("cswap", (a, b), ((control, True),))


def polarity_controls(qubits, pattern):
    """Controls on ``qubits`` that fire on the bits of ``pattern`` (LSB first)."""
    return tuple((q, bool((pattern >> j) & 1)) for j, q in enumerate(qubits))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            _validate_gate(g, self.num_qubits)

    def __len__(self):
        return len(self.gates)

    def to_dict(self) -> dict:
        return {"version": SCHEMA_VERSION, "num_qubits": self.num_qubits,
                "gates": [g.to_dict() for g in self.gates], "metadata": self.metadata}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, obj: dict) -> "Circuit":
        if obj.get("version") != SCHEMA_VERSION:
            raise CircuitError(f"unsupported circuit schema version {obj.get('version')!r}")
        gates = [Gate.from_dict(g) for g in obj["gates"]]
        return cls(int(obj["num_qubits"]), gates, dict(obj.get("metadata", {})))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def _validate_gate(g: Gate, num_qubits: int):
    if g.kind not in KINDS:
        raise CircuitError(f"unknown gate kind {g.kind!r}")
    qs = g.qubits
    if len(set(qs)) != len(qs):
        raise CircuitError(f"{g.kind} gate reuses a qubit: {qs}")
    if any(not 0 <= q < num_qubits for q in qs):
        raise CircuitError(f"{g.kind} gate touches a qubit outside 0..{num_qubits - 1}: {qs}")
    want = 2 if g.kind in ("swap", "cswap") else 1
    if len(g.targets) != want:
        raise CircuitError(f"{g.kind} takes {want} target(s)")
    if g.kind == "ry" and (g.angle is None or not np.isfinite(g.angle)):
        raise CircuitError("ry gate needs a finite angle")
    if g.kind == "cswap" and (len(g.controls) != 1 or not g.controls[0][1]):
        raise CircuitError("cswap takes exactly one positive control")
    if g.kind in ("h", "swap") and g.controls:
        raise CircuitError(f"{g.kind} gates are uncontrolled in this IR")


def build_upsampling_circuit(table: AngleTable) -> Circuit:
    """Sequential multiplexed-RY circuit: qubit ``q_k`` gets ``2**k`` rotations
    selected by the pattern on ``q_0 .. q_{k-1}``."""
    n = table.n
    gates = []
    for k in range(n):
        angles = table.for_qubit(k)
        if angles.size != 1 << k:
            raise CircuitError(f"table level for qubit {k} has {angles.size} angles, need {1 << k}")
        lower = tuple(range(k))
        for i, theta in enumerate(angles):
            gates.append(ry(k, theta, polarity_controls(lower, i)))
    meta = {"builder": "upsampling", "n": n}
    if table.grid is not None:
        meta["grid"] = table.grid.to_dict()
    return Circuit(n, gates, meta)


def build_discrete_circuit(thetas, n: int) -> Circuit:
    """Hadamards on the n-1 low qubits, then one controlled RY on ``q_{n-1}``
    per pattern of the low qubits."""
    thetas = np.asarray(thetas, dtype=float)
    if n < 2:
        raise CircuitError("the discrete circuit needs n > 1")
    if thetas.shape != (1 << (n - 1),):
        raise CircuitError(f"expected {1 << (n - 1)} angles for n={n}, got {thetas.size}")
    low = tuple(range(n - 1))
    gates = [h(q) for q in low]
    gates += [ry(n - 1, t, polarity_controls(low, i)) for i, t in enumerate(thetas)]
    return Circuit(n, gates, {"builder": "discrete", "n": n})


def _fwht(a):
    a = np.array(a, dtype=float)
    hlen = 1
    while hlen < a.size:
        a = a.reshape(-1, 2, hlen)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1)
        hlen *= 2
    return a.ravel()


def multiplexed_ry(controls, target, alphas) -> list[Gate]:
    """Gray-code expansion of a uniformly controlled RY into 2**k RY and
    2**k CNOT gates.  ``alphas[b]`` is applied when control ``j`` reads bit
    j of ``b``."""
    k = len(controls)
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size != 1 << k:
        raise CircuitError("multiplexor needs 2**k angles")
    if k == 0:
        return [ry(target, alphas[0])]
    size = 1 << k
    gray = np.arange(size) ^ (np.arange(size) >> 1)
    betas = _fwht(alphas)[gray] / size
    out = []
    for s in range(size):
        out.append(ry(target, betas[s]))
        flip = int(gray[s] ^ gray[(s + 1) % size])
        out.append(cx(controls[flip.bit_length() - 1], target))
    return out


def lower_to_basis(c: Circuit) -> Circuit:
    """Rewrite into uncontrolled RY, H, X, CNOT and CSWAP.

    Consecutive RY gates sharing a target and a control set form a
    multiplexor and are expanded together.  A lone controlled RY has its
    negative controls conjugated by X and is expanded as the all-ones
    branch of a multiplexor.
    """
    out = []
    gates = c.gates
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.kind == "ry" and g.controls:
            key = (g.targets, tuple(q for q, _ in g.controls))
            j = i + 1
            while (j < len(gates) and gates[j].kind == "ry"
                   and gates[j].targets == g.targets
                   and tuple(sorted(q for q, _ in gates[j].controls)) == tuple(sorted(key[1]))):
                j += 1
            run = gates[i:j]
            ctrl = key[1]
            if len(run) == 1:
                neg = [q for q, pos in g.controls if not pos]
                out += [x(q) for q in neg]
                alphas = np.zeros(1 << len(ctrl))
                alphas[-1] = g.angle
                out += multiplexed_ry(ctrl, g.targets[0], alphas)
                out += [x(q) for q in neg]
            else:
                alphas = np.zeros(1 << len(ctrl))
                for r in run:
                    pol = dict(r.controls)
                    alphas[sum(1 << b for b, q in enumerate(ctrl) if pol[q])] += r.angle
                out += multiplexed_ry(ctrl, g.targets[0], alphas)
            i = j
            continue
        if g.kind == "swap":
            a, b = g.targets
            out += [cx(a, b), cx(b, a), cx(a, b)]
        elif g.kind == "x" and len(g.controls) == 1:
            q, pos = g.controls[0]
            out += [cx(q, g.targets[0])] if pos else [x(q), cx(q, g.targets[0]), x(q)]
        elif g.kind == "x" and g.controls:
            raise CircuitError("multi-controlled X is not supported by the lowering pass")
        else:
            out.append(g)
        i += 1
    meta = dict(c.metadata, lowered=True)
    return Circuit(c.num_qubits, out, meta)


def depth_and_counts(c: Circuit) -> dict:
    """Per-kind gate counts and depth; gates conflict iff they share a qubit."""
    level = [0] * c.num_qubits
    counts = Counter()
    for g in c.gates:
        qs = g.qubits
        d = max(level[q] for q in qs) + 1
        for q in qs:
            level[q] = d
        name = g.kind
        if g.kind == "x" and len(g.controls) == 1 and g.controls[0][1]:
            name = "cx"
        counts[name] += 1
        if g.kind == "ry" and g.controls:
            counts["ry_controlled"] += 1
    return {"num_qubits": c.num_qubits, "depth": max(level, default=0),
            "total": len(c.gates), "counts": dict(sorted(counts.items()))}


def _fmt(a: float) -> str:
    return repr(float(a))


def export_qasm(c: Circuit, negctrl: bool = True) -> str:
    """OpenQASM 3 text.  With ``negctrl=False`` negative controls are written
    as X conjugation around a positively controlled gate."""
    lines = ["OPENQASM 3.0;", 'include "stdgates.inc";', f"qubit[{c.num_qubits}] q;"]
    for g in c.gates:
        lines += _qasm_gate(g, negctrl)
    return "\n".join(lines) + "\n"


def _qasm_gate(g: Gate, negctrl: bool) -> list[str]:
    if g.kind == "swap":
        return [f"swap q[{g.targets[0]}], q[{g.targets[1]}];"]
    if g.kind == "cswap":
        return [f"cswap q[{g.controls[0][0]}], q[{g.targets[0]}], q[{g.targets[1]}];"]
    op = f"ry({_fmt(g.angle)})" if g.kind == "ry" else g.kind
    if g.kind == "x" and len(g.controls) == 1 and g.controls[0][1]:
        return [f"cx q[{g.controls[0][0]}], q[{g.targets[0]}];"]
    args = ", ".join(f"q[{q}]" for q in g.qubits)
    if negctrl:
        mods = "".join("ctrl @ " if pos else "negctrl @ " for _, pos in g.controls)
        return [f"{mods}{op} {args};"]
    flips = [f"x q[{q}];" for q, pos in g.controls if not pos]
    mods = "ctrl @ " * len(g.controls)
    return flips + [f"{mods}{op} {args};"] + flips


_QASM_LINE = re.compile(
    r"^(?P<mods>(?:(?:neg)?ctrl @ )*)(?P<name>[a-z]+)(?:\((?P<arg>[^)]*)\))?\s+"
    r"(?P<qubits>q\[\d+\](?:,\s*q\[\d+\])*);$")


def parse_qasm(text: str) -> Circuit:
    """Read back the subset written by :func:`export_qasm` (negctrl dialect)."""
    num_qubits = None
    gates = []
    for raw in text.splitlines():
        line = raw.split("//")[0].strip()
        if not line or line.startswith(("OPENQASM", "include")):
            continue
        decl = re.match(r"^qubit\[(\d+)\]\s+q;$", line)
        if decl:
            num_qubits = int(decl.group(1))
            continue
        m = _QASM_LINE.match(line)
        if not m:
            raise CircuitError(f"cannot parse QASM line: {raw!r}")
        qs = [int(v) for v in re.findall(r"q\[(\d+)\]", m.group("qubits"))]
        mods = re.findall(r"(neg)?ctrl @ ", m.group("mods"))
        ctrls = tuple((q, neg == "") for q, neg in zip(qs, mods))
        rest = qs[len(mods):]
        name = m.group("name")
        if name == "ry":
            gates.append(ry(rest[0], float(m.group("arg")), ctrls))
        elif name in ("h", "x") and len(rest) == 1:
            gates.append(Gate(name, (rest[0],), ctrls))
        elif name == "cx":
            gates.append(cx(rest[0], rest[1]))
        elif name == "swap":
            gates.append(swap(rest[0], rest[1]))
        elif name == "cswap":
            gates.append(cswap(rest[0], rest[1], rest[2]))
        else:
            raise CircuitError(f"unsupported QASM gate {name!r}")
    if num_qubits is None:
        raise CircuitError("no qubit register declared")
    return Circuit(num_qubits, gates)
