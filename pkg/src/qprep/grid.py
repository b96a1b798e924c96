"""Sampling window and the integer-to-sample map.

Basis index ``i`` of an n-qubit register maps to ``x_o + dx * i`` with
``dx = w / 2**n`` and ``x_o = x_bar + w * (zeta - 1) / 2``.  Bits are
little-endian: bit m of ``i`` is the state of qubit ``q_m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 24


@dataclass(frozen=True)
class SamplingGrid:
    n: int
    w: float
    zeta: float = 0.0
    x_bar: float = 0.0
    x_o: float = field(init=False)
    delta_x: float = field(init=False)
    f_nyquist: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        if self.n > MAX_QUBITS:
            raise ValueError(f"n={self.n} exceeds the {MAX_QUBITS}-qubit ceiling")
        if not (np.isfinite(self.w) and self.w > 0):
            raise ValueError(f"window width must be positive, got {self.w!r}")
        if not 0.0 <= self.zeta < 1.0 / 2 ** (self.n - 1):
            raise ValueError(f"zeta must satisfy 0 <= zeta < 2**-(n-1), got {self.zeta!r}")
        dx = self.w / 2**self.n
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "delta_x", dx)
        object.__setattr__(self, "x_o", self.x_bar + self.w * (self.zeta - 1.0) / 2.0)
        object.__setattr__(self, "f_nyquist", 1.0 / (2.0 * dx))

    @property
    def size(self) -> int:
        return 1 << self.n

    def x(self, i):
        """Sample point(s) for basis index ``i`` (int or integer array)."""
        i = np.asarray(i)
        if np.any(i < 0) or np.any(i >= self.size):
            raise IndexError(f"index out of range for a {self.n}-qubit grid")
        return self.x_o + self.delta_x * i

    def xs(self) -> np.ndarray:
        return self.x_o + self.delta_x * np.arange(self.size)

    def to_dict(self) -> dict:
        return {"n": self.n, "w": self.w, "zeta": self.zeta, "x_bar": self.x_bar,
                "x_o": self.x_o, "delta_x": self.delta_x, "f_nyquist": self.f_nyquist}


def new_grid(n: int, w: float, zeta: float = 0.0, x_bar: float = 0.0) -> SamplingGrid:
    return SamplingGrid(n, float(w), float(zeta), float(x_bar))


def index_to_x(grid: SamplingGrid, i: int) -> float:
    return float(grid.x(int(i)))


def bit_decompose(i: int, n: int) -> list[int]:
    """Little-endian bits of ``i``; element ``n-1`` is the most significant."""
    if not 0 <= i < (1 << n):
        raise ValueError(f"{i} does not fit in {n} bits")
    return [(i >> m) & 1 for m in range(n)]


def random_zeta(n: int, seed: int) -> float:
    """Seeded shift in ``[0, 2**-(n-1))``; seed 0 means no shift."""
    if seed == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    return float(rng.uniform(0.0, 1.0 / 2 ** (n - 1)))
