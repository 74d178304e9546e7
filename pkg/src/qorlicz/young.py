"""Young functions, their complementary functions and equivalence testing.

A Young function is convex, nondecreasing, vanishes at 0 and may jump to
``+inf``.  Besides plain evaluation every function exposes ``log_at``
(``log F(e^u)``) and ``log_inverse`` so that fundamental and dilation
functions can be explored far outside the double-precision range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import lambertw

E = math.e


class DomainError(ValueError):
    """Young functions are only defined on [0, inf]."""


def _as_array(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


def _check_nonneg(t: np.ndarray) -> None:
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DomainError("Young functions take nonnegative arguments")


def _scalar_or_array(x: np.ndarray, like):
    return float(x) if np.ndim(like) == 0 else x


def _bisect_log_inverse(log_at, ly: np.ndarray, lo: float = -800.0, hi: float = 800.0,
                        iters: int = 160, reach: float = 1e15) -> np.ndarray:
    """sup{u : log_at(u) <= ly}, elementwise, by bisection in log-argument.

    The bracket starts at [lo, hi] and is doubled outwards where needed, up
    to ``reach``; values still outside it are reported as -inf or +inf.
    """
    ly = np.atleast_1d(_as_array(ly))
    a = np.full(ly.shape, lo)
    b = np.full(ly.shape, hi)
    while True:
        grow = (log_at(a) > ly) & (a > -reach)
        if not grow.any():
            break
        a = np.where(grow, 2.0 * a, a)
    while True:
        grow = (log_at(b) <= ly) & (b < reach)
        if not grow.any():
            break
        b = np.where(grow, 2.0 * b, b)
    below = log_at(a) > ly
    above = log_at(b) <= ly
    for _ in range(iters):
        m = 0.5 * (a + b)
        ok = log_at(m) <= ly
        a = np.where(ok, m, a)
        b = np.where(ok, b, m)
    out = a.copy()
    out[below] = -np.inf
    out[above] = np.inf
    return out


class YoungFunction:
    """Base class; subclasses provide ``_eval`` and optionally closed forms."""

    kind: str = ""

    def params(self) -> dict[str, Any]:
        return {}

    def spec(self) -> dict[str, Any]:
        return {"kind": self.kind, "params": self.params()}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"

    def __eq__(self, other) -> bool:
        return isinstance(other, YoungFunction) and self.spec() == other.spec()

    def __hash__(self) -> int:
        return hash(repr(self.spec()))

    # evaluation ---------------------------------------------------------
    def _eval(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        arr = _as_array(t)
        _check_nonneg(arr)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = self._eval(np.atleast_1d(arr)).reshape(arr.shape)
        return _scalar_or_array(out, t)

    def log_at(self, u) -> np.ndarray:
        """``log F(e^u)`` for real ``u`` (``-inf`` where F vanishes)."""
        u = _as_array(u)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return np.log(self._eval(np.exp(u)))

    # generalised inverse F^{-1}(y) = sup{t : F(t) <= y} -------------------
    def log_inverse(self, ly) -> np.ndarray:
        return _bisect_log_inverse(self.log_at, ly)

    def inverse(self, y):
        arr = _as_array(y)
        _check_nonneg(arr)
        with np.errstate(divide="ignore", over="ignore"):
            out = np.exp(self.log_inverse(np.log(np.atleast_1d(arr)))).reshape(arr.shape)
        return _scalar_or_array(out, y)

    def derivative(self, t: np.ndarray) -> np.ndarray:
        """Right derivative on t >= 0 (central differences unless overridden)."""
        h = 1e-6 * np.maximum(t, 1e-6)
        return (self._eval(t + h) - self._eval(np.maximum(t - h, 0.0))) / (t + h - np.maximum(t - h, 0.0))

    def conjugate_closed_form(self) -> "YoungFunction | None":
        return None


def evaluate(f: YoungFunction, t):
    return f(t)


def inverse(f: YoungFunction, y):
    return f.inverse(y)


# --------------------------------------------------------------------------
# builtins


class PsiE(YoungFunction):
    """(e^2/4) t^2 up to t = 2, e^t beyond; C^1 at the seam."""

    kind = "psi_e"

    def _eval(self, t):
        return np.where(t <= 2.0, 0.25 * E**2 * t**2, np.exp(t))

    def derivative(self, t):
        return np.where(t < 2.0, 0.5 * E**2 * t, np.exp(t))

    def log_at(self, u):
        u = _as_array(u)
        with np.errstate(over="ignore"):
            return np.where(u <= math.log(2.0), 2.0 - math.log(4.0) + 2.0 * u, np.exp(u))

    def log_inverse(self, ly):
        ly = _as_array(ly)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(ly <= 2.0, math.log(2.0 / E) + 0.5 * ly, np.log(np.maximum(ly, 2.0)))


class CoshMinusOne(YoungFunction):
    kind = "cosh_minus_one"

    def _eval(self, t):
        return 2.0 * np.sinh(0.5 * t) ** 2

    def derivative(self, t):
        return np.sinh(t)

    def log_at(self, u):
        u = _as_array(u)
        with np.errstate(over="ignore", divide="ignore"):
            t = np.exp(u)
            big = t > 40.0
            tiny = u < -20.0
            mid = math.log(2.0) + 2.0 * np.log(np.sinh(0.5 * np.where(big | tiny, 1.0, t)))
            large = t - math.log(2.0) + 2.0 * np.log1p(-np.exp(-np.where(big, t, 40.0)))
            # cosh t - 1 = t²/2 (1 + O(t²))
            return np.where(big, large, np.where(tiny, 2.0 * u - math.log(2.0), mid))

    def log_inverse(self, ly):
        # F^{-1}(y) = 2 asinh(sqrt(y/2)); asinh(e^w) evaluated stably for large w
        w = 0.5 * (_as_array(ly) - math.log(2.0))
        with np.errstate(over="ignore", divide="ignore"):
            big = w > 20.0
            tiny = w < -20.0
            direct = np.arcsinh(np.exp(np.where(big | tiny, 0.0, w)))
            asym = np.where(big, w, 0.0) + math.log(2.0)
            out = np.log(2.0 * np.where(big, asym, direct))
            # asinh(e^w) = e^w (1 + O(e^{2w}))
            return np.where(tiny, math.log(2.0) + w, out)


class LLogLPlusOne(YoungFunction):
    kind = "l_log_l_plus_one"

    def _eval(self, t):
        return t * np.log1p(t)

    def derivative(self, t):
        return np.log1p(t) + t / (1.0 + t)

    def log_at(self, u):
        u = _as_array(u)
        with np.errstate(over="ignore", divide="ignore"):
            t = np.exp(u)
            # log log(1+t) ~ log(u) once t is huge
            loglog = np.where(u > 30.0, np.log(np.maximum(u, 1.0)), np.log(np.log1p(t)))
            # log(1+t) = t (1 + O(t))
            loglog = np.where(u < -40.0, u, loglog)
            return u + loglog


def _lambertw_exp(ly: np.ndarray) -> np.ndarray:
    """W(e^ly) without forming e^ly when it would overflow."""
    ly = _as_array(ly)
    safe = ly < 600.0
    with np.errstate(over="ignore"):
        direct = lambertw(np.exp(np.where(safe, ly, 0.0))).real
    w = np.where(safe, 0.0, ly - np.log(np.maximum(ly, 1.0)))
    for _ in range(60):
        w = np.where(safe, w, ly - np.log(np.maximum(w, 1e-300)))
    return np.where(safe, direct, w)


class ZygmundLLogL(YoungFunction):
    """t log^+ t: identically zero on [0, 1]."""

    kind = "zygmund_llogl"

    def _eval(self, t):
        return np.where(t <= 1.0, 0.0, t * np.log(np.maximum(t, 1.0)))

    def derivative(self, t):
        return np.where(t < 1.0, 0.0, np.log(np.maximum(t, 1.0)) + 1.0)

    def log_at(self, u):
        u = _as_array(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(u <= 0.0, -np.inf, u + np.log(np.maximum(u, 1e-300)))

    def log_inverse(self, ly):
        # t log t = y  <=>  log t = W(y); the zero set gives sup = 1 at y = 0
        ly = _as_array(ly)
        return np.where(np.isneginf(ly), 0.0, _lambertw_exp(np.where(np.isneginf(ly), 0.0, ly)))


class ZygmundExp(YoungFunction):
    """s on [0, 1], e^{s-1} beyond."""

    kind = "zygmund_exp"

    def _eval(self, t):
        return np.where(t <= 1.0, t, np.exp(t - 1.0))

    def derivative(self, t):
        return np.where(t < 1.0, 1.0, np.exp(t - 1.0))

    def log_at(self, u):
        u = _as_array(u)
        with np.errstate(over="ignore"):
            return np.where(u <= 0.0, u, np.exp(u) - 1.0)

    def log_inverse(self, ly):
        ly = _as_array(ly)
        with np.errstate(invalid="ignore"):
            return np.where(ly <= 0.0, ly, np.log1p(np.maximum(ly, 0.0)))


class Power(YoungFunction):
    """coef * t^p with p >= 1."""

    kind = "power"

    def __init__(self, p: float, coef: float = 1.0):
        if not p >= 1.0:
            raise DomainError("power Young function needs p >= 1")
        if not coef > 0.0:
            raise DomainError("power Young function needs a positive coefficient")
        self.p = float(p)
        self.coef = float(coef)

    def params(self):
        out = {"p": self.p}
        if self.coef != 1.0:
            out["coef"] = self.coef
        return out

    def _eval(self, t):
        return self.coef * t**self.p

    def derivative(self, t):
        return self.coef * self.p * t ** (self.p - 1.0)

    def log_at(self, u):
        return math.log(self.coef) + self.p * _as_array(u)

    def log_inverse(self, ly):
        return (_as_array(ly) - math.log(self.coef)) / self.p

    def conjugate_closed_form(self):
        if self.p == 1.0:
            return Indicator(self.coef)
        p, c = self.p, self.coef
        q = p / (p - 1.0)
        return Power(q, (p - 1.0) * c * (c * p) ** (-q))


class Indicator(YoungFunction):
    """0 on [0, level], +inf beyond: the gauge of L^infinity."""

    kind = "indicator"

    def __init__(self, level: float = 1.0):
        if not level > 0.0:
            raise DomainError("indicator level must be positive")
        self.level = float(level)

    def params(self):
        return {"level": self.level}

    def _eval(self, t):
        return np.where(t <= self.level, 0.0, np.inf)

    def derivative(self, t):
        return np.where(t < self.level, 0.0, np.inf)

    def log_at(self, u):
        return np.where(_as_array(u) <= math.log(self.level), -np.inf, np.inf)

    def log_inverse(self, ly):
        return np.full(np.shape(ly), math.log(self.level))

    def conjugate_closed_form(self):
        return Power(1.0, self.level)


# --------------------------------------------------------------------------
# tabulated complementary functions


def _conjugate_exact(f: YoungFunction, u: np.ndarray, iters: int = 160):
    """sup_v (u v - f(v)) and its maximiser, for each u.

    The maximiser is located from the first-order condition
    ``f'(v) <= u <= f'(v+)`` by bisection in log v; since f' is
    nondecreasing this is exact up to rounding even where the objective
    itself is too flat to resolve the optimum.
    """
    u = _as_array(u)
    lo = np.full(u.shape, -690.0)
    hi = np.full(u.shape, 690.0)
    with np.errstate(over="ignore", invalid="ignore"):
        runaway = f.derivative(np.exp(hi)) <= u
        at_zero = f.derivative(np.exp(lo)) > u
        for _ in range(iters):
            m = 0.5 * (lo + hi)
            up = f.derivative(np.exp(m)) <= u
            lo = np.where(up, m, lo)
            hi = np.where(up, hi, m)
        v = np.exp(0.5 * (lo + hi))
        val = u * v - f._eval(v)
    v = np.where(at_zero, 0.0, v)
    val = np.where(at_zero | ~(val > 0.0), 0.0, val)
    val = np.where(runaway, np.inf, val)
    return val, v


class Tabulated(YoungFunction):
    """Piecewise cubic Hermite table of a complementary function.

    Knots live on an adaptively refined log grid and interpolation runs in
    log-log coordinates, with the exact Legendre maximisers supplying the
    slopes.  A leading run of exact zeros stays zero and is bridged to the
    first positive knot in linear coordinates.  Outside the table the
    function continues as a power law with the local log-log slope.
    """

    kind = "tabulated"

    def __init__(self, knots, values, slopes, finite_until: float = math.inf,
                 source: dict | None = None):
        self.knots = _as_array(knots)
        self.values = _as_array(values)
        self.slopes = _as_array(slopes)
        self.finite_until = float(finite_until)
        self.source = source
        pos = np.nonzero(self.values > 0)[0]
        if pos.size < 2:
            raise ValueError("a tabulated Young function needs two positive knots")
        i0 = int(pos[0])
        x, f, d = self.knots[i0:], self.values[i0:], self.slopes[i0:]
        self._lx = np.log(x)
        self._elas = x * d / f
        self._loglog = CubicHermiteSpline(self._lx, np.log(f), self._elas)
        self._zero_until = self.knots[i0 - 1] if i0 > 0 else None
        self._bridge_end = i0
        self._bridge = None
        if i0 > 0:
            j = slice(i0 - 1, i0 + 1)
            self._bridge = CubicHermiteSpline(self.knots[j], self.values[j], self.slopes[j])

    def params(self):
        return {"conjugate_of": self.source} if self.source else {"knots": len(self.knots)}

    def log_at(self, u):
        u = _as_array(u)
        lx0, lxk = self._lx[0], self._lx[-1]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = self._loglog(np.clip(u, lx0, lxk))
            out = np.where(u > lxk, self._loglog(lxk) + self._elas[-1] * (u - lxk), out)
            if self._bridge is None:
                lo = self._loglog(lx0) + self._elas[0] * (u - lx0)
            else:
                t = np.clip(np.exp(np.minimum(u, lx0)), self._zero_until, None)
                lo = np.log(np.maximum(self._bridge(t), 0.0))
                lo = np.where(np.exp(u) <= self._zero_until, -np.inf, lo)
            out = np.where(u < lx0, lo, out)
            return np.where(np.exp(u) > self.finite_until, np.inf, out)

    def _eval(self, t):
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(self.log_at(np.log(t)))

    def derivative(self, t):
        t = _as_array(t)
        lt = np.log(np.maximum(t, 1e-300))
        lx0, lxk = self._lx[0], self._lx[-1]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            elas = self._loglog.derivative()(np.clip(lt, lx0, lxk))
            elas = np.where(lt > lxk, self._elas[-1], elas)
            if self._bridge is None:
                elas = np.where(lt < lx0, self._elas[0], elas)
            out = self._eval(t) * elas / t
            if self._bridge is not None:
                zb = self._zero_until
                bridge = self._bridge.derivative()(np.clip(t, zb, self.knots[self._bridge_end]))
                out = np.where(lt < lx0, np.where(t < zb, 0.0, bridge), out)
        return np.where(t > self.finite_until, np.inf, out)


def complementary(f: YoungFunction, lo: float = 1e-8, hi: float = 1e8,
                  per_decade: int = 20, rtol: float = 1e-10,
                  max_rounds: int = 60) -> YoungFunction:
    """Complementary function sup_v (u v - f(v)); closed form where known.

    Otherwise the transform is evaluated exactly on a log grid over
    [lo, hi], and intervals whose midpoint disagrees with the interpolant
    by more than ``rtol`` are split until they agree.
    """
    closed = f.conjugate_closed_form()
    if closed is not None:
        return closed
    decades = math.log10(hi) - math.log10(lo)
    x = np.logspace(math.log10(lo), math.log10(hi), int(round(decades * per_decade)) + 1)
    vals, slopes = _conjugate_exact(f, x)
    for _ in range(max_rounds):
        fin = np.isfinite(vals)
        nfin = int(np.argmin(fin)) if not fin.all() else len(x)
        if nfin < 2 or np.count_nonzero(vals[:nfin] > 0) < 2:
            raise ValueError(f"complementary function of {f!r} is degenerate on the grid")
        table = Tabulated(x[:nfin], vals[:nfin], slopes[:nfin])
        wide = x[1:nfin] / x[: nfin - 1] > 1.0 + 1e-8
        idx = np.nonzero(wide)[0]
        mids = np.sqrt(x[idx] * x[idx + 1])
        mv, ms = _conjugate_exact(f, mids)
        err = np.abs(table._eval(mids) - mv)
        bad = (err > rtol * np.abs(mv) + 1e-300) | ~np.isfinite(mv)
        new_x, new_v, new_s = [mids[bad]], [mv[bad]], [ms[bad]]
        if nfin < len(x) and x[nfin] / x[nfin - 1] > 1.0 + 1e-9:
            edge = np.array([math.sqrt(x[nfin - 1] * x[nfin])])
            ev, es = _conjugate_exact(f, edge)
            new_x.append(edge)
            new_v.append(ev)
            new_s.append(es)
        add = np.concatenate(new_x)
        if add.size == 0:
            break
        x = np.concatenate([x, add])
        vals = np.concatenate([vals] + new_v)
        slopes = np.concatenate([slopes] + new_s)
        order = np.argsort(x)
        x, vals, slopes = x[order], vals[order], slopes[order]
    fin = np.isfinite(vals)
    nfin = int(np.argmin(fin)) if not fin.all() else len(x)
    finite_until = math.inf if nfin == len(x) else float(x[nfin])
    return Tabulated(x[:nfin], vals[:nfin], slopes[:nfin], finite_until, source=f.spec())


# --------------------------------------------------------------------------
# construction from specs

_BUILTINS: dict[str, type[YoungFunction]] = {
    cls.kind: cls
    for cls in (PsiE, CoshMinusOne, LLogLPlusOne, ZygmundLLogL, ZygmundExp, Power, Indicator)
}


def builtin(name: str, **params) -> YoungFunction:
    if name not in _BUILTINS:
        raise DomainError(f"unknown Young function {name!r}")
    return _BUILTINS[name](**params)


def from_spec(spec: dict | str) -> YoungFunction:
    """Build from ``{"kind", "params"}`` or a shorthand such as ``"power_2"``."""
    if isinstance(spec, str):
        if spec.startswith("power_"):
            return Power(float(spec[len("power_"):]))
        return builtin(spec)
    kind = spec.get("kind")
    params = dict(spec.get("params") or {})
    if kind == "tabulated":
        if "conjugate_of" not in params:
            raise DomainError("tabulated specs must name the function they conjugate")
        return complementary(from_spec(params["conjugate_of"]))
    if kind is None:
        raise DomainError("Young function spec needs a 'kind'")
    try:
        return builtin(kind, **params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {kind!r}: {exc}") from exc


# --------------------------------------------------------------------------
# equivalence


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    b1: float
    b2: float
    inconclusive: bool = False
    diverging: bool = False

    def __bool__(self) -> bool:
        return self.equivalent


def _dominates(fa: YoungFunction, fb: YoungFunction, lb: np.ndarray, lx: np.ndarray) -> np.ndarray:
    """For each log b: fa(b x) >= fb(x) on every grid x (log domain)."""
    left = fa.log_at(lb[:, None] + lx[None, :])
    right = np.broadcast_to(fb.log_at(lx)[None, :], left.shape)
    margin = 1e-12 * (1.0 + np.abs(np.where(np.isfinite(right), right, 0.0)))
    return np.all((left >= right) | (left >= right - margin), axis=1)


def minimal_witness(fa: YoungFunction, fb: YoungFunction, lx: np.ndarray,
                    lb: np.ndarray) -> float:
    """Smallest b on (a refinement of) the grid with fa(b x) >= fb(x); nan if none."""
    ok = _dominates(fa, fb, lb, lx)
    if not ok.any():
        return math.nan
    i = int(np.argmax(ok))
    if i == 0:
        return float(math.exp(lb[0]))
    a, b = lb[i - 1], lb[i]
    for _ in range(60):
        m = 0.5 * (a + b)
        if _dominates(fa, fb, np.array([m]), lx)[0]:
            b = m
        else:
            a = m
    return float(math.exp(b))


def equivalent(f1: YoungFunction, f2: YoungFunction,
               x_range: tuple[float, float] = (1e-6, 1e6), n_x: int = 400,
               b_range: tuple[float, float] = (1e-6, 1e6), n_b: int = 241,
               growth_tol: float = 0.01) -> EquivalenceResult:
    """Grid test for F1 ~ F2: F1(b1 x) >= F2(x) and F2(b2 x) >= F1(x).

    A witness that keeps growing when the x-range is widened (compared with
    the central two thirds of the log range) means the constant only exists
    on the finite grid, so the pair is reported as not equivalent.
    """
    lx = np.linspace(math.log(x_range[0]), math.log(x_range[1]), n_x)
    lb = np.linspace(math.log(b_range[0]), math.log(b_range[1]), n_b)
    span = lx[-1] - lx[0]
    inner = lx[(lx >= lx[0] + span / 6) & (lx <= lx[-1] - span / 6)]
    b1 = minimal_witness(f1, f2, lx, lb)
    b2 = minimal_witness(f2, f1, lx, lb)
    if math.isnan(b1) or math.isnan(b2):
        return EquivalenceResult(False, b1, b2, inconclusive=True)
    b1_in = minimal_witness(f1, f2, inner, lb)
    b2_in = minimal_witness(f2, f1, inner, lb)
    diverging = b1 > b1_in * (1 + growth_tol) or b2 > b2_in * (1 + growth_tol)
    return EquivalenceResult(not diverging, b1, b2, diverging=diverging)
