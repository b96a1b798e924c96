"""Probability densities on the real line, discrete probability vectors,
and their periodic image sums.

Every rotation angle in the upsampling construction is a ratio of two
periodic image sums ``S(x, p) = sum_j P(x + j p)``; this module owns that
sum.  Light-tailed kinds (Gaussian, Laplace) are summed shell by shell
outward from the image nearest the mode.  Heavy-tailed kinds (Cauchy,
Student's t) add an Euler-Maclaurin estimate of the two remaining tails so
that the default 1e-14 relative tolerance is reachable with a bounded
number of shells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

DEFAULT_TOL = 1e-14
MAX_SHELLS = 10**6

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
# elements held in memory per shell block
_BLOCK_BUDGET = 1 << 21


class TruncationError(RuntimeError):
    """The image sum did not meet its tolerance within the shell cap.

    ``bound`` is the relative size of the last examined contribution, i.e.
    the accuracy actually achieved when the cap was hit.
    """

    def __init__(self, message, bound):
        super().__init__(message)
        self.bound = bound


class Distribution:
    """Base class for univariate densities with support on all of R.

    Subclasses describe a standardized density ``f`` (mode at 0) plus a
    location and scale, so that ``P(x) = f((x - loc) / scale) / scale``.
    """

    kind: str = ""
    heavy_tailed: bool = False

    @property
    def loc(self) -> float:
        raise NotImplementedError

    @property
    def scale(self) -> float:
        raise NotImplementedError

    def _std_pdf(self, z):
        raise NotImplementedError

    def _std_dpdf(self, z):
        raise NotImplementedError

    def _std_tail(self, z):
        """Mass beyond ``|z|`` on one side, for ``|z|`` large."""
        raise NotImplementedError

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        return self._std_pdf(z) / self.scale

    def mode(self) -> float:
        return self.loc

    def periodic_sum(self, x, period, tol=DEFAULT_TOL, max_shells=MAX_SHELLS):
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        s = _wrapped_standard(self, z, period / self.scale, tol, max_shells)
        return s / self.scale

    def to_dict(self) -> dict:
        raise NotImplementedError


def _check_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class Gaussian(Distribution):
    mu: float = 0.0
    sigma: float = 1.0
    kind = "gaussian"

    def __post_init__(self):
        _check_positive("sigma", self.sigma)

    @property
    def loc(self):
        return self.mu

    @property
    def scale(self):
        return self.sigma

    def _std_pdf(self, z):
        return _INV_SQRT_2PI * np.exp(-0.5 * np.square(z))

    def to_dict(self):
        return {"kind": self.kind, "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class Laplace(Distribution):
    mu: float = 0.0
    b: float = 1.0
    kind = "laplace"

    def __post_init__(self):
        _check_positive("b", self.b)

    @property
    def loc(self):
        return self.mu

    @property
    def scale(self):
        return self.b

    def _std_pdf(self, z):
        return 0.5 * np.exp(-np.abs(z))

    def to_dict(self):
        return {"kind": self.kind, "mu": self.mu, "b": self.b}


@dataclass(frozen=True)
class Cauchy(Distribution):
    x0: float = 0.0
    gamma: float = 1.0
    kind = "cauchy"
    heavy_tailed = True

    def __post_init__(self):
        _check_positive("gamma", self.gamma)

    @property
    def loc(self):
        return self.x0

    @property
    def scale(self):
        return self.gamma

    def _std_pdf(self, z):
        return 1.0 / (math.pi * (1.0 + np.square(z)))

    def _std_dpdf(self, z):
        return -2.0 * z / (math.pi * np.square(1.0 + np.square(z)))

    def _std_tail(self, z):
        return np.arctan(1.0 / np.abs(z)) / math.pi

    def to_dict(self):
        return {"kind": self.kind, "x0": self.x0, "gamma": self.gamma}


@dataclass(frozen=True)
class StudentT(Distribution):
    nu: float = 1.0
    kind = "studentt"
    heavy_tailed = True
    _log_norm: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_positive("nu", self.nu)
        nu = self.nu
        log_norm = (math.lgamma(0.5 * (nu + 1.0)) - math.lgamma(0.5 * nu)
                    - 0.5 * math.log(nu * math.pi))
        object.__setattr__(self, "_log_norm", log_norm)

    @property
    def loc(self):
        return 0.0

    @property
    def scale(self):
        return 1.0

    def _std_pdf(self, z):
        nu = self.nu
        return np.exp(self._log_norm - 0.5 * (nu + 1.0) * np.log1p(np.square(z) / nu))

    def _std_dpdf(self, z):
        nu = self.nu
        return -self._std_pdf(z) * (nu + 1.0) * z / (nu + np.square(z))

    def _std_tail(self, z):
        return special.stdtr(self.nu, -np.abs(z))

    def to_dict(self):
        return {"kind": self.kind, "nu": self.nu}


DistributionSpec = Distribution


@dataclass(frozen=True)
class SmoothedDiscrete(Distribution):
    """Weighted comb of narrow Gaussians standing in for Dirac deltas.

    ``centers[k]`` carries weight ``weights[k]``; every spike has standard
    deviation ``eps``.  As ``eps -> 0`` this is a sum of delta functions.
    Its periodic sum is the weighted sum of the spikes' periodic sums, each
    of which is a unimodal Gaussian sum.
    """

    centers: tuple = ()
    weights: tuple = ()
    eps: float = 1e-3
    kind = "smoothed_discrete"

    def __post_init__(self):
        _check_positive("eps", self.eps)
        if len(self.centers) != len(self.weights) or not self.centers:
            raise ValueError("centers and weights must be non-empty and equal length")

    @property
    def loc(self):
        return 0.0

    @property
    def scale(self):
        return 1.0

    def mode(self):
        k = int(np.argmax(self.weights))
        return float(self.centers[k])

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        c = np.asarray(self.centers, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        z = (x[..., None] - c) / self.eps
        return (_INV_SQRT_2PI * np.exp(-0.5 * z * z) * wts).sum(axis=-1) / self.eps

    def periodic_sum(self, x, period, tol=DEFAULT_TOL, max_shells=MAX_SHELLS):
        x = np.asarray(x, dtype=float)
        c = np.asarray(self.centers, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        spike = Gaussian(0.0, self.eps)
        z = (x.reshape(-1, 1) - c).ravel()
        per_spike = spike.periodic_sum(z, period, tol, max_shells).reshape(-1, len(c))
        out = (per_spike * wts).sum(axis=1)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def to_dict(self):
        return {"kind": self.kind, "centers": list(self.centers),
                "weights": list(self.weights), "eps": self.eps}


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _wrapped_standard(dist, z, q, tol, max_shells):
    """Periodic sum of the standardized density at points ``z``, period ``q``.

    Each point is expanded symmetrically about its image nearest the mode
    (shell 0), adding shell k = the two images at offset +-k.  A point stops
    once the remainder bound is <= tol times the running total, after at
    least three shells.  For light tails the bound is the larger of the last
    shell and its geometric continuation; heavy tails use the size of the
    Euler-Maclaurin correction on the integral tail estimate.  Shells are processed in blocks of a fixed size schedule;
    each block is summed pairwise and folded into a compensated total.  The
    arithmetic applied to one point never depends on the rest of the batch.
    """
    if not q > 0:
        raise ValueError(f"period must be positive, got {q!r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    shape = np.shape(z)
    z = np.atleast_1d(np.asarray(z, dtype=float)).ravel()
    j0 = np.rint(-z / q)
    acc = dist._std_pdf(z + j0 * q)
    comp = np.zeros(z.size)
    total = np.zeros(z.size)
    last = np.zeros(z.size)
    prev = acc.copy()
    active = np.arange(z.size)
    k_next = 1
    nb = 16

    while active.size:
        if k_next > max_shells:
            rel = float(np.max(last[active] / np.maximum(acc[active], np.finfo(float).tiny)))
            raise TruncationError(
                f"periodic sum did not reach tol={tol:g} within {max_shells} shells "
                f"(achieved relative bound {rel:.3g})", rel)
        nb = min(nb, max_shells - k_next + 1)
        ks = np.arange(k_next, k_next + nb, dtype=float)
        rows_per_chunk = max(1, _BLOCK_BUDGET // nb)
        done = np.zeros(active.size, dtype=bool)
        for lo in range(0, active.size, rows_per_chunk):
            sel = active[lo:lo + rows_per_chunk]
            stop, value, tail_err, edge = _shell_block(dist, z[sel], j0[sel], q, ks, acc[sel],
                                                       comp[sel], prev[sel], tol, k_next)
            prev[sel] = edge
            done[lo:lo + len(sel)] = stop
            total[sel[stop]] = value[stop]
            acc[sel], comp[sel] = value, 0.0
            last[sel] = tail_err
        active = active[~done]
        k_next += nb
        nb = min(nb * 2, 1 << 14)

    return float(total[0]) if shape == () else total.reshape(shape)


def _shell_block(dist, z, j0, q, ks, acc, comp, prev_shell, tol, k_next):
    za = z[:, None]
    ja = j0[:, None]
    shells = dist._std_pdf(za + (ja + ks) * q) + dist._std_pdf(za + (ja - ks) * q)
    running = acc[:, None] + np.cumsum(shells, axis=1)
    if dist.heavy_tailed:
        u_hi = za + (ja + ks + 0.5) * q
        u_lo = za + (ja - ks - 0.5) * q
        tail = (dist._std_tail(u_hi) + dist._std_tail(u_lo)) / q
        correction = q / 24.0 * (dist._std_dpdf(u_hi) - dist._std_dpdf(u_lo))
        err = np.abs(correction)
        ok = err <= tol * (running + tail + correction)
    else:
        # geometric bound on everything beyond shell k, from the decay ratio
        prev = np.concatenate([prev_shell[:, None], shells[:, :-1]], axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(shells > 0, shells / prev, 0.0)
            err = np.where(r < 1.0, shells * np.maximum(1.0, r / (1.0 - r)), np.inf)
        ok = err <= tol * running
    ok[:, : max(0, 2 - k_next)] = False
    stop = ok.any(axis=1)
    cut = np.where(stop, np.argmax(ok, axis=1), ks.size - 1)
    keep = np.arange(ks.size) <= cut[:, None]
    block_sum = np.where(keep, shells, 0.0).sum(axis=1)
    value, c = _two_sum(acc, block_sum)
    value = value + (comp + c)
    if dist.heavy_tailed:
        r = np.arange(z.size)
        value = np.where(stop, value + (tail[r, cut] + correction[r, cut]), value)
    return stop, value, err[np.arange(z.size), cut], shells[:, -1]


def pdf_at(spec: Distribution, x):
    """Density of ``spec`` at ``x`` (scalar or array)."""
    out = spec.pdf(x)
    return float(out) if np.ndim(out) == 0 else out


def mode(spec: Distribution) -> float:
    return float(spec.mode())


def periodic_sum(spec: Distribution, x, period: float, tol: float = DEFAULT_TOL,
                 max_shells: int = MAX_SHELLS):
    """Return ``sum_j P(x + j*period)`` to relative accuracy ``tol``.

    Vectorized over ``x``.  Raises :class:`TruncationError` if more than
    ``max_shells`` shells would be needed.
    """
    return spec.periodic_sum(x, period, tol, max_shells)


def default_window(spec: Distribution, n: int) -> float:
    """Window width used when the caller does not supply one.

    Light tails get 12 scale units, heavy tails 40.  For heavy-tailed kinds
    the single-image approximation ``S(x, w) ~ P(x)`` holds only loosely at
    any practical width; see :func:`loose_wrap`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    factor = 40.0 if spec.heavy_tailed else 12.0
    return factor * spec.scale


def loose_wrap(spec: Distribution) -> bool:
    """True when the default window leaves a non-negligible wrap-around error."""
    return bool(spec.heavy_tailed)


@dataclass(frozen=True)
class DiscreteSpec:
    """Discrete probability vector of power-of-two length."""

    probs: tuple

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty vector")
        if p.size & (p.size - 1):
            raise ValueError(f"length {p.size} is not a power of two; use from_probs to pad")
        if np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
            raise ValueError("every probability must lie in [0, 1]")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", tuple(float(v) for v in p))

    @classmethod
    def from_probs(cls, probs) -> "DiscreteSpec":
        """Zero-pad ``probs`` at the high-index end to a power-of-two length."""
        p = [float(v) for v in probs]
        size = 1
        while size < len(p):
            size *= 2
        return cls(tuple(p + [0.0] * (size - len(p))))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.probs)

    @property
    def num_qubits(self) -> int:
        """Circuit size n: the vector fills the n-1 low qubits."""
        return len(self.probs).bit_length()

    def to_dict(self):
        return {"kind": "discrete", "probs": list(self.probs)}


def make_binomial(l: int, p: float) -> DiscreteSpec:
    """Binomial(l, p) probabilities, zero-padded to a power-of-two length."""
    if l < 0:
        raise ValueError("l must be >= 0")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    probs = [math.comb(l, k) * p**k * (1.0 - p) ** (l - k) for k in range(l + 1)]
    return DiscreteSpec.from_probs(probs)


def map_lognormal_support(grid_xs, delta_x):
    """Relabel Gaussian-domain samples for a lognormal target.

    Returns ``(ys, dys)`` with ``ys = exp(xs)`` and ``dys = exp(xs) * delta_x``;
    the probabilities attached to each sample are unchanged.
    """
    ys = np.exp(np.asarray(grid_xs, dtype=float))
    return ys, ys * delta_x


def lognormal_pdf(y, mu=0.0, sigma=1.0):
    y = np.asarray(y, dtype=float)
    return np.exp(-0.5 * ((np.log(y) - mu) / sigma) ** 2) / (y * sigma * math.sqrt(2 * math.pi))


_FIELDS = {
    "gaussian": (Gaussian, {"mu", "sigma"}),
    "laplace": (Laplace, {"mu", "b"}),
    "cauchy": (Cauchy, {"x0", "gamma"}),
    "studentt": (StudentT, {"nu"}),
}


def from_dict(obj: dict):
    """Build a distribution or discrete spec from its JSON form.

    Unknown keys are rejected.
    """
    obj = dict(obj)
    kind = str(obj.pop("kind", "")).lower().replace("_", "").replace("-", "")
    if kind in _FIELDS:
        cls, allowed = _FIELDS[kind]
        extra = set(obj) - allowed
        if extra:
            raise ValueError(f"unknown fields for {kind}: {sorted(extra)}")
        return cls(**{k: float(v) for k, v in obj.items()})
    if kind == "discrete":
        if set(obj) != {"probs"}:
            raise ValueError("discrete spec takes exactly one field, 'probs'")
        return DiscreteSpec.from_probs(obj["probs"])
    if kind == "binomial":
        if set(obj) != {"l", "p"}:
            raise ValueError("binomial spec takes exactly the fields 'l' and 'p'")
        return make_binomial(int(obj["l"]), float(obj["p"]))
    raise ValueError(f"unknown distribution kind {kind!r}")
