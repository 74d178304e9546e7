"""Luxemburg and Orlicz (Amemiya) norms, fundamental and dilation functions.

Fundamental functions are computed in log coordinates (``log φ`` as a
function of ``log t``) so that dilation suprema can be taken over ranges
such as ``t = e^{-10^7}`` where the slowly varying parts of a Young function
live.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .linalg import dagger
from .rearrangement import (MeasurableElement, StepFunction, WeightedTraceAlgebra,
                            l1_linf_norm, lambda_infty_quasinorm, mu)
from .young import YoungFunction, complementary

Norm = Literal["luxemburg", "orlicz"]
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _as_step(f, alg: WeightedTraceAlgebra | None) -> StepFunction:
    if isinstance(f, StepFunction):
        return f
    if isinstance(f, MeasurableElement):
        if alg is None:
            raise ValueError("an algebra is needed to rearrange a matrix element")
        return mu(f, alg)
    raise TypeError(f"cannot take a norm of {type(f).__name__}")


def _golden_min(fn, lo: np.ndarray, hi: np.ndarray, iters: int = 120):
    """Elementwise golden-section minimisation of a unimodal ``fn``."""
    for _ in range(iters):
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        left = fn(c) <= fn(d)
        lo = np.where(left, lo, c)
        hi = np.where(left, d, hi)
    x = 0.5 * (lo + hi)
    return x, fn(x)


def luxemburg_norm(f, phi: YoungFunction, alg: WeightedTraceAlgebra | None = None,
                   iters: int = 200) -> float:
    """inf{λ > 0 : ∫ Φ(μ_t/λ) dt <= 1}, by bisection on log λ.

    The search is run on f scaled to unit sup over λ in [1e-12, 1e12];
    ``inf`` is returned if even the largest λ leaves the modular above 1.
    """
    g = _as_step(f, alg)
    if g.values.size == 0:
        return 0.0
    scale = float(g.values[0])
    v, w = g.values / scale, g.widths

    def fits(log_lam: float) -> bool:
        with np.errstate(over="ignore"):
            return float(np.sum(w * phi(v / math.exp(log_lam)))) <= 1.0

    lo, hi = math.log(1e-12), math.log(1e12)
    if not fits(hi):
        return math.inf
    if fits(lo):
        return scale * 1e-12
    for _ in range(iters):
        m = 0.5 * (lo + hi)
        if fits(m):
            hi = m
        else:
            lo = m
    return scale * math.exp(hi)


def orlicz_amemiya_norm(f, phi: YoungFunction, alg: WeightedTraceAlgebra | None = None,
                        iters: int = 200) -> float:
    """inf_{k>0} (1/k)(1 + ∫ Φ(k μ_t) dt), golden section in log k."""
    g = _as_step(f, alg)
    if g.values.size == 0:
        return 0.0
    scale = float(g.values[0])
    v, w = g.values / scale, g.widths

    def objective(logk: np.ndarray) -> np.ndarray:
        k = np.exp(np.atleast_1d(logk))
        with np.errstate(over="ignore", invalid="ignore"):
            modular = np.array([np.sum(w * phi(kk * v)) for kk in k])
            return (1.0 + modular) / k

    x, val = _golden_min(objective, np.array([math.log(1e-12)]), np.array([math.log(1e12)]), iters)
    return scale * float(val[0])


# ---------------------------------------------------------------------------
# fundamental functions


def log_fundamental(phi: YoungFunction, log_t, norm: Norm = "luxemburg") -> np.ndarray:
    """log of the norm of an indicator of measure t, as a function of log t.

    Luxemburg: bisection for inf{ℓ : log t + log Φ(e^{-ℓ}) <= 0}.
    Orlicz: golden section for min_κ log(1 + t Φ(e^κ)) - κ.
    """
    lt = np.atleast_1d(np.asarray(log_t, dtype=float))
    reach = np.abs(lt) + 800.0
    if norm == "luxemburg":
        lo, hi = -reach, reach.copy()
        for _ in range(250):
            m = 0.5 * (lo + hi)
            ok = lt + phi.log_at(-m) <= 0.0
            hi = np.where(ok, m, hi)
            lo = np.where(ok, lo, m)
        return hi
    if norm == "orlicz":
        def objective(kappa):
            with np.errstate(over="ignore", invalid="ignore"):
                return np.logaddexp(0.0, lt + phi.log_at(kappa)) - kappa
        _, val = _golden_min(objective, -reach, reach.copy(), iters=160)
        return val
    raise ValueError(f"unknown norm {norm!r}")


def fundamental_function(phi: YoungFunction, t, norm: Norm = "luxemburg"):
    """φ(t) = ‖χ_E‖ for τ(E) = t."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("fundamental functions are defined for t >= 0")
    flat = np.atleast_1d(arr)
    out = np.zeros(flat.shape)
    pos = flat > 0
    if pos.any():
        with np.errstate(over="ignore"):
            out[pos] = np.exp(log_fundamental(phi, np.log(flat[pos]), norm))
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def fundamental_closed_form(phi: YoungFunction, t):
    """1 / Φ^{-1}(1/t), the Luxemburg fundamental function via the inverse."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return 1.0 / phi.inverse(1.0 / t)


# ---------------------------------------------------------------------------
# dilation function and indices


def default_log_r_grid(half: int = 400, reach: float = 1e7) -> np.ndarray:
    """Symmetric grid in log r: dense near 0 and reaching ±reach."""
    mags = np.logspace(-3.0, math.log10(reach), half)
    return np.concatenate([-mags[::-1], [0.0], mags])


def log_dilation(phi: YoungFunction, log_s, norm: Norm = "luxemburg",
                 log_r: np.ndarray | None = None) -> np.ndarray:
    """log M(s), M(s) = sup_{r>0} φ(s r)/φ(r).

    The supremum is taken on a log-r grid and polished by zooming in on
    interior grid maxima; a maximum at the edge of the grid stands
    for a limit at 0 or infinity and is reported as the edge value.
    """
    ls = np.atleast_1d(np.asarray(log_s, dtype=float))
    lr = default_log_r_grid() if log_r is None else np.asarray(log_r, dtype=float)
    base = log_fundamental(phi, lr, norm)
    shape = ls.shape
    ls = ls.reshape(-1)
    ratio = log_fundamental(phi, lr[None, :] + ls[:, None], norm) - base[None, :]
    j = np.argmax(ratio, axis=1)
    best = ratio[np.arange(ls.size), j]
    inner = (j > 0) & (j < len(lr) - 1)
    if inner.any():
        s_in = ls[inner]
        a = lr[j[inner] - 1]
        b = lr[j[inner] + 1]
        rows = np.arange(s_in.size)
        zbest = best[inner]
        for _ in range(3):
            zoom = np.linspace(a, b, 33, axis=1)
            zr = log_fundamental(phi, zoom + s_in[:, None], norm) - log_fundamental(phi, zoom, norm)
            k = np.argmax(zr, axis=1)
            zbest = np.maximum(zbest, zr[rows, k])
            a = zoom[rows, np.maximum(k - 1, 0)]
            b = zoom[rows, np.minimum(k + 1, 32)]
        best[inner] = zbest
    return best.reshape(shape)


def dilation_function(phi: YoungFunction, s, norm: Norm = "luxemburg",
                      log_r: np.ndarray | None = None):
    arr = np.asarray(s, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("the dilation function is defined for s > 0")
    out = np.exp(log_dilation(phi, np.log(np.atleast_1d(arr)), norm, log_r)).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class IndexEstimate:
    lower: float
    upper: float
    lower_spread: float
    upper_spread: float
    lower_raw: tuple[float, ...]
    upper_raw: tuple[float, ...]


def _richardson(ks: np.ndarray, a: np.ndarray) -> np.ndarray:
    # a_k = β + c/k  =>  β = k a_k - (k-1) a_{k-1} for consecutive k
    return ks[1:] * a[1:] - ks[:-1] * a[:-1]


def fundamental_indices(phi: YoungFunction, norm: Norm = "luxemburg",
                        ks=range(2, 9), log_r: np.ndarray | None = None) -> IndexEstimate:
    """Lower/upper fundamental indices from log M(s)/log s along s = 10^{∓k}.

    The estimate is the Richardson-extrapolated value at the largest k; the
    spread is the range of the extrapolants over k.
    """
    ks = np.asarray(list(ks), dtype=float)
    logs = ks * math.log(10.0)
    low = log_dilation(phi, -logs, norm, log_r) / -logs
    up = log_dilation(phi, logs, norm, log_r) / logs
    rl, ru = _richardson(ks, low), _richardson(ks, up)
    return IndexEstimate(
        lower=float(rl[-1]), upper=float(ru[-1]),
        lower_spread=float(rl.max() - rl.min()), upper_spread=float(ru.max() - ru.min()),
        lower_raw=tuple(map(float, low)), upper_raw=tuple(map(float, up)),
    )


# ---------------------------------------------------------------------------
# the modular d_s operator and the embedding inequality


def ds_operator(rho: np.ndarray, phi: YoungFunction, s: float,
                conj: YoungFunction | None = None) -> np.ndarray:
    """φ̃(e^{-s}ρ)^{-1} φ̃(ρ) with φ̃ the Orlicz fundamental function of Φ*."""
    conj = complementary(phi) if conj is None else conj
    w, u = np.linalg.eigh(rho)
    if np.any(w <= 0):
        raise ValueError("ρ must be positive definite")
    lw = np.log(w)
    ratio = np.exp(log_fundamental(conj, lw, "orlicz") - log_fundamental(conj, lw - s, "orlicz"))
    return (u * ratio) @ dagger(u)


@dataclass(frozen=True)
class DsBoundReport:
    exponent: float
    worst_excess: float
    passed: bool


def ds_bound_check(rho: np.ndarray, phi: YoungFunction, s_grid, n: int = 4,
                   beta_star: float | None = None, rtol: float = 1e-9) -> DsBoundReport:
    """‖d_s‖ <= t^{(n-1)/n · β̲*} with t = e^s, over the given s <= 0."""
    conj = complementary(phi)
    if beta_star is None:
        beta_star = fundamental_indices(conj, "orlicz").lower
    a = (n - 1) / n * beta_star
    worst = -math.inf
    for s in s_grid:
        norm = np.linalg.norm(ds_operator(rho, phi, s, conj), 2)
        bound = math.exp(a * s)
        worst = max(worst, (norm - bound) / bound)
    return DsBoundReport(a, worst, worst <= rtol)


def homogeneous_profile(phi: YoungFunction, amplitudes, spectrum, t_grid: np.ndarray) -> StepFunction:
    """Step approximation of t -> inf{σ : Σ_j λ_j Φ(a_j/σ) <= t}.

    These are the singular value functions of the elements ⊕_j a_j φ(h_j),
    with h_j the generator of the modular flow scaled by λ_j; they are the
    elements whose rearrangements scale the way the embedding estimate needs.
    Each step takes the value at its left end, so the approximation sits
    above the profile.
    """
    a = np.asarray(amplitudes, dtype=float)
    lam = np.asarray(spectrum, dtype=float)
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    lo = np.full(t_grid.shape, math.log(a.max()) - 200.0)
    hi = np.full(t_grid.shape, math.log(a.max()) + 200.0)
    for _ in range(200):
        m = 0.5 * (lo + hi)
        with np.errstate(over="ignore"):
            mass = np.sum(lam * phi(a[None, :] / np.exp(m)[:, None]), axis=1)
        ok = mass <= t_grid
        hi = np.where(ok, m, hi)
        lo = np.where(ok, lo, m)
    vals = np.exp(hi)
    widths = np.diff(np.concatenate([[0.0], t_grid]))
    vals = np.concatenate([[vals[0]], vals[:-1]])
    return StepFunction(vals, widths)


@dataclass(frozen=True)
class EmbeddingReport:
    constant: float
    t0: float
    exponent: float
    beta_star: float
    samples: int
    violations: int
    worst_ratio: float


def embedding_constant(conj: YoungFunction, beta_star: float, n: int = 4,
                       t_grid: np.ndarray | None = None) -> tuple[float, float, float]:
    """C = ∫_0^{t0} r^{-(1-a)} dr + ∫_{t0}^1 dr/r with a = (n-1)/n β̲*.

    t0 is the largest grid point below which log M̃(t)/log t >= a throughout.
    """
    a = (n - 1) / n * beta_star
    if not a > 0:
        raise ValueError("the embedding estimate needs a positive lower index")
    t_grid = np.logspace(-8, -1e-3, 161) if t_grid is None else np.sort(t_grid)
    lt = np.log(t_grid)
    ok = log_dilation(conj, lt, "orlicz") / lt >= a - 1e-12
    prefix = np.cumprod(ok).astype(bool)
    if not prefix[0]:
        raise ValueError("no t0 found on the grid")
    t0 = 1.0 if prefix.all() else float(t_grid[prefix.sum() - 1])
    return t0 ** a / a - math.log(t0), t0, a


def embedding_inequality_check(phi: YoungFunction, samples: int = 200, n: int = 4,
                               rng: np.random.Generator | None = None,
                               upper_index: float | None = None) -> EmbeddingReport:
    """∫_0^1 μ <= C sup_{t<=1} t μ_t on homogeneous profiles in the unit ball."""
    rng = np.random.default_rng(0) if rng is None else rng
    if upper_index is None:
        upper_index = fundamental_indices(phi).upper
    if not upper_index < 1.0:
        raise ValueError("the embedding estimate needs an upper index below 1")
    conj = complementary(phi)
    beta_star = fundamental_indices(conj, "orlicz").lower
    c, t0, a = embedding_constant(conj, beta_star, n)
    t_grid = np.logspace(-12, 1, 500)
    worst, violations = 0.0, 0
    for _ in range(samples):
        m = int(rng.integers(1, 5))
        amps = np.exp(rng.normal(scale=2.0, size=m))
        spec = rng.dirichlet(np.ones(m)) * math.exp(rng.normal(scale=2.0))
        f = homogeneous_profile(phi, amps, spec, t_grid)
        f = f.scaled(rng.uniform(0.1, 1.0) / luxemburg_norm(f, phi))
        ratio = l1_linf_norm(f) / lambda_infty_quasinorm(f)
        worst = max(worst, ratio)
        violations += ratio > c * (1 + 1e-12)
    return EmbeddingReport(c, t0, a, beta_star, samples, violations, worst)
