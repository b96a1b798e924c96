"""Rotation angles for the upsampling circuit.

Qubit ``q_k`` is rotated by ``theta[m-1][i]`` with ``m = n - k``, where ``i``
is the integer held by the already-prepared qubits ``q_0 .. q_{k-1}``.  The
angle is fixed by the conditional probability that ``q_k`` reads 0:

    cos^2(theta/2) = S(x_i, w / 2**(m-1)) / S(x_i, w / 2**m)

with ``S`` the periodic image sum and ``x_i`` the grid point of index ``i``.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dist import DEFAULT_TOL, DiscreteSpec, SmoothedDiscrete, periodic_sum
from .grid import SamplingGrid, new_grid

DEAD_ZONE = 1e-300
RATIO_SLACK = 1e-9


class AngleError(ValueError):
    pass


@dataclass(frozen=True)
class AngleTable:
    """``theta[m-1]`` holds the ``2**(n-m)`` angles of refinement level m."""

    n: int
    theta: tuple
    delta_x_norm: float
    grid: SamplingGrid | None = None
    dead: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.theta) != self.n:
            raise AngleError(f"expected {self.n} levels, got {len(self.theta)}")
        levels = []
        for m, level in enumerate(self.theta, start=1):
            arr = np.asarray(level, dtype=float)
            if arr.shape != (1 << (self.n - m),):
                raise AngleError(f"level {m} must hold {1 << (self.n - m)} angles")
            arr.setflags(write=False)
            levels.append(arr)
        object.__setattr__(self, "theta", tuple(levels))
        if not self.dead:
            object.__setattr__(self, "dead", tuple(np.zeros(a.size, bool) for a in levels))

    def level(self, m: int) -> np.ndarray:
        return self.theta[m - 1]

    def for_qubit(self, k: int) -> np.ndarray:
        """Angles of the multiplexor targeting qubit ``q_k``."""
        return self.theta[self.n - k - 1]

    @property
    def count(self) -> int:
        return sum(a.size for a in self.theta)

    def to_dict(self) -> dict:
        out = {"n": self.n, "delta_x_norm": self.delta_x_norm,
               "theta": [a.tolist() for a in self.theta]}
        if self.grid is not None:
            out["grid"] = self.grid.to_dict()
        dead = [np.flatnonzero(d).tolist() for d in self.dead]
        if any(dead):
            out["dead"] = dead
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, obj: dict) -> "AngleTable":
        grid = None
        if "grid" in obj:
            g = obj["grid"]
            grid = new_grid(g["n"], g["w"], g["zeta"], g["x_bar"])
        n = int(obj["n"])
        dead = ()
        if "dead" in obj:
            dead = []
            for m, idx in enumerate(obj["dead"], start=1):
                mask = np.zeros(1 << (n - m), bool)
                mask[idx] = True
                dead.append(mask)
            dead = tuple(dead)
        return cls(n, tuple(obj["theta"]), float(obj["delta_x_norm"]), grid, dead)


def compute_delta_x(spec, grid: SamplingGrid, tol: float = DEFAULT_TOL) -> float:
    """Normalization making the squared amplitudes sum to one."""
    return 1.0 / periodic_sum(spec, grid.x_o, grid.w / 2**grid.n, tol)


def _angles(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    dead = den < DEAD_ZONE
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dead, 1.0, num / np.where(dead, 1.0, den))
    bad = (ratio > 1.0 + RATIO_SLACK) | (ratio < -RATIO_SLACK)
    if np.any(bad):
        worst = float(ratio[bad][0])
        raise AngleError(f"branch ratio {worst!r} lies outside [0, 1]; image sum truncated?")
    theta = 2.0 * np.arccos(np.sqrt(np.clip(ratio, 0.0, 1.0)))
    return np.where(dead, 0.0, theta), dead


def level_angles(spec, grid: SamplingGrid, m: int, tol: float = DEFAULT_TOL):
    """All angles of level m, with the dead-zone mask."""
    if not 1 <= m <= grid.n:
        raise ValueError(f"level m={m} outside 1..{grid.n}")
    xs = grid.x_o + grid.delta_x * np.arange(1 << (grid.n - m))
    num = periodic_sum(spec, xs, grid.w / 2 ** (m - 1), tol)
    den = periodic_sum(spec, xs, grid.w / 2**m, tol)
    return _angles(num, den)


def compute_theta(spec, grid: SamplingGrid, m: int, i: int, tol: float = DEFAULT_TOL) -> float:
    if not 1 <= m <= grid.n:
        raise ValueError(f"level m={m} outside 1..{grid.n}")
    if not 0 <= i < 1 << (grid.n - m):
        raise ValueError(f"index {i} outside 0..{(1 << (grid.n - m)) - 1} for level {m}")
    x = grid.x_o + grid.delta_x * i
    num = periodic_sum(spec, x, grid.w / 2 ** (m - 1), tol)
    den = periodic_sum(spec, x, grid.w / 2**m, tol)
    theta, _ = _angles(num, den)
    return float(theta)


def build_angle_table(spec, grid: SamplingGrid, tol: float = DEFAULT_TOL) -> AngleTable:
    levels, dead = [], []
    for m in range(1, grid.n + 1):
        th, dz = level_angles(spec, grid, m, tol)
        levels.append(th)
        dead.append(dz)
    return AngleTable(grid.n, tuple(levels), compute_delta_x(spec, grid, tol), grid, tuple(dead))


def discrete_theta(probs) -> np.ndarray:
    """``2 arccos sqrt(p)`` for each probability."""
    p = np.asarray(probs.probs if isinstance(probs, DiscreteSpec) else probs, dtype=float)
    if np.any((p < 0) | (p > 1)):
        warnings.warn("probabilities outside [0, 1] were clamped", RuntimeWarning, stacklevel=2)
        p = np.clip(p, 0.0, 1.0)
    return 2.0 * np.arccos(np.sqrt(p))


def discrete_table(probs: DiscreteSpec) -> AngleTable:
    """Limit-form angle table for a discrete target on ``n = log2(len) + 1`` qubits.

    Level 1 carries ``2 arccos sqrt(p)``; every finer level is pi/2.
    """
    n = probs.num_qubits
    levels = [discrete_theta(probs)]
    levels += [np.full(1 << (n - m), np.pi / 2) for m in range(2, n + 1)]
    return AngleTable(n, tuple(levels), float("nan"))


def delta_comb(probs: DiscreteSpec, eps: float, w: float = 1.0) -> tuple[SmoothedDiscrete, SamplingGrid]:
    """Gaussian-smoothed spike train whose wrapped amplitudes give the discrete state.

    Index ``k`` (low half) carries ``p_k / 2**(n-1)``; index ``2**(n-1) + k``
    carries the complement ``(1 - p_k) / 2**(n-1)``.  The grid is centred at 0
    with no shift.
    """
    p = probs.array
    n = probs.num_qubits
    if n < 2:
        raise ValueError("the smoothed construction needs n > 1")
    grid = new_grid(n, w, 0.0, 0.0)
    half = 1 << (n - 1)
    centers = grid.xs()
    weights = np.concatenate([p, 1.0 - p]) / half
    return SmoothedDiscrete(tuple(centers), tuple(weights), eps), grid


def discrete_theta_numeric(probs: DiscreteSpec, n: int, m: int, i: int, eps: float,
                           w: float = 1.0, tol: float = DEFAULT_TOL) -> float:
    """Angle of the smoothed spike train at finite ``eps`` (absolute units of ``w``).

    Converges to ``2 arccos sqrt(p_i)`` for ``m == 1`` and pi/2 for ``m > 1``.
    """
    if n != probs.num_qubits:
        raise ValueError(f"probs of length {len(probs.probs)} imply n={probs.num_qubits}, not {n}")
    if not eps > 0:
        raise ValueError("eps must be positive")
    # samples sit on the spike centres, so the failure mode is a spike peak
    # that is no longer representable rather than a vanishing tail
    with np.errstate(over="ignore"):
        peak = np.float64(1.0) / (eps * np.sqrt(2.0 * np.pi))
    if not np.isfinite(peak):
        raise AngleError(f"smoothed spikes are not representable at eps={eps:g}; use a larger eps")
    comb, grid = delta_comb(probs, eps, w)
    if not 1 <= m <= n or not 0 <= i < 1 << (n - m):
        raise ValueError(f"(m={m}, i={i}) outside the table for n={n}")
    x = grid.x_o + grid.delta_x * i
    num = comb.periodic_sum(x, w / 2 ** (m - 1), tol)
    den = comb.periodic_sum(x, w / 2**m, tol)
    if not (np.isfinite(num) and np.isfinite(den)) or den < DEAD_ZONE:
        raise AngleError(f"every smoothed spike underflowed at eps={eps:g}; use a larger eps")
    theta, _ = _angles(num, den)
    return float(theta)
