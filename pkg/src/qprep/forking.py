"""Polylog-depth forking form of the upsampling circuit.

Every multiplexor branch gets its own qubit: a binary tree of ``d = 2**n - 1``
nodes in heap order (root 1, children ``2t`` and ``2t + 1``) where node t
lives on qubit ``t - 1``.  All rotations are applied at once, uncontrolled.
A controlled-swap network then works bottom-up: each node, controlled on its
own value, swaps the left spine of its right subtree into its left subtree.
Afterwards the left spine of the whole tree (nodes 1, 2, 4, ...) carries the
prepared register, one node per logical qubit.

The tree path taken by qubits ``q_0 .. q_{l-1}`` reading ``i`` reaches the
level-l node at heap position ``bitrev_l(i)``, so that node gets the angle
of branch ``i`` of the level-l multiplexor.
"""
from __future__ import annotations

from dataclasses import dataclass

from .angles import AngleTable
from .circuit import Circuit, cswap, depth_and_counts, ry, x

MAX_FORK_QUBITS = 12
# measured depth / n**2 is 0.5, 0.444, 0.4375 for n = 2, 3, 4
DEPTH_CONSTANT = 0.5


class ForkingError(ValueError):
    pass


def _bitrev(v: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (v & 1)
        v >>= 1
    return out


@dataclass(frozen=True)
class ForkingLayout:
    n: int
    d: int
    node_map: tuple
    output_register: tuple
    control: int | None = None

    @property
    def num_qubits(self) -> int:
        return self.d + (self.control is not None)

    def qubit(self, node: int) -> int:
        return self.node_map[node - 1]

    def to_dict(self) -> dict:
        out = {"n": self.n, "d": self.d, "output_register": list(self.output_register),
               "node_map": list(self.node_map)}
        if self.control is not None:
            out["control"] = self.control
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "ForkingLayout":
        return cls(int(obj["n"]), int(obj["d"]), tuple(obj["node_map"]),
                   tuple(obj["output_register"]), obj.get("control"))


def fork_transform(table: AngleTable, control_qubit: bool = False,
                   max_n: int = MAX_FORK_QUBITS) -> tuple[Circuit, ForkingLayout]:
    """Rotation layer on the node tree followed by the swap network.

    With ``control_qubit`` an extra enable qubit (index d) is set to 1 and
    positively controls every rotation; the rotation layer then no longer
    has depth 1.
    """
    n = table.n
    if n > max_n:
        raise ForkingError(f"n={n} needs {2**n - 1} tree qubits; synthesis is limited to n <= {max_n}")
    d = (1 << n) - 1
    node_map = tuple(range(d))
    control = d if control_qubit else None
    enable = ((control, True),) if control_qubit else ()

    gates = [x(control)] if control_qubit else []
    for t in range(1, d + 1):
        level = t.bit_length() - 1
        branch = _bitrev(t - (1 << level), level)
        gates.append(ry(node_map[t - 1], table.for_qubit(level)[branch], enable))

    for level in range(n - 2, -1, -1):
        for t in range(1 << level, 1 << (level + 1)):
            depth_below = n - 1 - level
            for s in range(depth_below):
                a, b = (2 * t) << s, (2 * t + 1) << s
                gates.append(cswap(node_map[t - 1], node_map[a - 1], node_map[b - 1]))

    output = tuple(node_map[(1 << level) - 1] for level in range(n))
    layout = ForkingLayout(n, d, node_map, output, control)
    meta = {"builder": "forking", "n": n, "layout": layout.to_dict()}
    return Circuit(layout.num_qubits, gates, meta), layout


def fork_depth_report(c: Circuit, layout: ForkingLayout) -> dict:
    stats = depth_and_counts(c)
    rot = Circuit(c.num_qubits, [g for g in c.gates if g.kind == "ry"])
    n = layout.n
    cswaps = stats["counts"].get("cswap", 0)
    return {
        "n": n,
        "depth": stats["depth"],
        "rotation_depth": depth_and_counts(rot)["depth"],
        "cswap_count": cswaps,
        "stated_cswap_count": layout.d - 1,
        "cswap_count_matches_stated": cswaps == layout.d - 1,
        "depth_per_n2": stats["depth"] / n**2,
        "depth_constant": DEPTH_CONSTANT,
        "num_qubits": c.num_qubits,
    }
