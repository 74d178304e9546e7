"""Decreasing rearrangements of elements of finite weighted trace algebras.

An algebra ``⊕_k M_{d_k}`` carries the trace ``Σ_k w_k Tr_k``; the
generalised singular value function of an element is then a right-continuous
step function on ``[0, Σ_k w_k d_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class StepFunction:
    """Nonincreasing step function given by (value, width) pairs.

    The canonical form has strictly decreasing positive values; equal values
    are merged and zero values dropped, since the function vanishes past its
    support anyway.  ``f(t)`` is right-continuous.
    """

    values: np.ndarray
    widths: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        w = np.asarray(self.widths, dtype=float).ravel()
        if v.shape != w.shape:
            raise ValueError("values and widths must have equal length")
        if np.any(v < 0) or np.any(w < 0) or not np.all(np.isfinite(v)):
            raise ValueError("step values must be finite and nonnegative, widths nonnegative")
        keep = (v > 0) & (w > 0)
        v, w = v[keep], w[keep]
        order = np.argsort(-v, kind="stable")
        v, w = v[order], w[order]
        if v.size:
            new = np.ones(v.size, dtype=bool)
            new[1:] = ~np.isclose(v[1:], v[:-1], rtol=1e-13, atol=0.0)
            groups = np.cumsum(new) - 1
            w = np.bincount(groups, weights=w)
            v = v[new]
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "widths", w)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "StepFunction":
        if not pairs:
            return cls(np.zeros(0), np.zeros(0))
        v, w = zip(*pairs)
        return cls(np.array(v), np.array(w))

    def pairs(self) -> list[tuple[float, float]]:
        return [(float(v), float(w)) for v, w in zip(self.values, self.widths)]

    @property
    def breakpoints(self) -> np.ndarray:
        """Right ends of the steps."""
        return np.cumsum(self.widths)

    @property
    def support(self) -> float:
        return float(self.widths.sum())

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        padded = np.append(self.values, 0.0)
        out = padded[idx]
        return float(out) if out.ndim == 0 else out

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (self.values.shape == other.values.shape
                and np.allclose(self.values, other.values, rtol=1e-12, atol=0)
                and np.allclose(self.widths, other.widths, rtol=1e-12, atol=0))

    def scaled(self, c: float) -> "StepFunction":
        return StepFunction(abs(c) * self.values, self.widths)

    def integral(self, upto: float = np.inf) -> float:
        """∫_0^upto f."""
        starts = self.breakpoints - self.widths
        overlap = np.clip(np.minimum(self.breakpoints, upto) - starts, 0.0, None)
        return float(np.dot(self.values, overlap))


@dataclass(frozen=True)
class WeightedTraceAlgebra:
    """``⊕_k M_{dim_k}`` with trace ``Σ_k weight_k Tr_k``."""

    blocks: tuple[tuple[int, float], ...]

    def __post_init__(self):
        blocks = tuple((int(d), float(w)) for d, w in self.blocks)
        for d, w in blocks:
            if d < 1 or not w > 0:
                raise ValueError("blocks need positive dimension and weight")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dims(self) -> list[int]:
        return [d for d, _ in self.blocks]

    @property
    def weights(self) -> list[float]:
        return [w for _, w in self.blocks]

    def trace(self, a: "MeasurableElement") -> complex:
        return sum(w * np.trace(b) for (_, w), b in zip(self.blocks, a.blocks))

    def element(self, mats: Sequence[np.ndarray]) -> "MeasurableElement":
        a = MeasurableElement(tuple(np.asarray(m, dtype=complex) for m in mats))
        if [m.shape for m in a.blocks] != [(d, d) for d in self.dims]:
            raise ValueError("block shapes do not match the algebra")
        return a

    def random_element(self, rng: np.random.Generator, positive: bool = False) -> "MeasurableElement":
        mats = []
        for d in self.dims:
            x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            mats.append(x.conj().T @ x if positive else x)
        return MeasurableElement(tuple(mats))


@dataclass(frozen=True)
class MeasurableElement:
    blocks: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __add__(self, other):
        return MeasurableElement(tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        return MeasurableElement(tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __matmul__(self, other):
        return MeasurableElement(tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def __rmul__(self, c):
        return MeasurableElement(tuple(c * a for a in self.blocks))

    def adjoint(self):
        return MeasurableElement(tuple(a.conj().T for a in self.blocks))

    def opnorm(self) -> float:
        return max(np.linalg.norm(a, 2) for a in self.blocks)


def mu(a: MeasurableElement, alg: WeightedTraceAlgebra) -> StepFunction:
    """Generalised singular values: each singular value of block k is a step of width w_k."""
    vals, widths = [], []
    for (_, w), b in zip(alg.blocks, a.blocks):
        s = np.linalg.svd(b, compute_uv=False)
        vals.append(s)
        widths.append(np.full(s.size, w))
    if not vals:
        return StepFunction(np.zeros(0), np.zeros(0))
    return StepFunction(np.concatenate(vals), np.concatenate(widths))


def distribution(a: MeasurableElement, alg: WeightedTraceAlgebra, s) -> np.ndarray:
    """τ(1 - e_s(|a|)): trace of the spectral projection of |a| on (s, ∞)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros(s.shape)
    for (_, w), b in zip(alg.blocks, a.blocks):
        sv = np.linalg.svd(b, compute_uv=False)
        out += w * (sv[None, :] > s[:, None]).sum(axis=1)
    return out


def mu_by_distribution(a: MeasurableElement, alg: WeightedTraceAlgebra, t,
                       grid: np.ndarray | None = None) -> np.ndarray:
    """μ_t = inf{s >= 0 : τ(1 - e_s(|a|)) <= t}, scanning ``grid`` for s.

    The infimum is always attained at 0 or at a singular value, so a grid
    that contains the singular values gives exact answers; any other grid
    gives the smallest grid point that qualifies.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if grid is None:
        grid = np.concatenate([[0.0], *[np.linalg.svd(b, compute_uv=False) for b in a.blocks]])
    grid = np.unique(grid)
    d = distribution(a, alg, grid)
    ok = d[None, :] <= t[:, None]
    return grid[np.argmax(ok, axis=1)]


def l1_linf_norm(f: StepFunction) -> float:
    """‖f‖_{L¹+L∞} = ∫_0^1 μ_t dt."""
    return f.integral(1.0)


def lambda_infty_quasinorm(f: StepFunction) -> float:
    """sup_{0<t<=1} t μ_t; on each step t μ_t increases, so only right ends matter."""
    ends = np.minimum(f.breakpoints, 1.0)
    starts = f.breakpoints - f.widths
    live = starts < 1.0
    return float(np.max(ends[live] * f.values[live], initial=0.0))


def pointwise_le(f: StepFunction, g: StepFunction, factor: float = 1.0,
                 rtol: float = 1e-12) -> tuple[bool, float]:
    """Is f_t <= factor * g_t for all t?  Returns the verdict and max excess."""
    cuts = np.unique(np.concatenate([[0.0], f.breakpoints, g.breakpoints]))
    excess = f(cuts) - factor * g(cuts)
    scale = rtol * np.maximum(np.abs(f(cuts)), 1e-300)
    worst = float(np.max(excess, initial=-np.inf))
    return bool(np.all(excess <= scale)), worst
