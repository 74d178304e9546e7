"""Crossed product M_n ⋊ ℤ_N by a periodic modular flow.

When the eigenvalues of ρ are ``c q^{m_j}`` the automorphism ``α = σ_{t₁}``
with ``t₁ = 2π/(N|log q|)`` has period N, so ℤ_N acts.  The crossed product
lives on ℂᴺ ⊗ ℂⁿ (index ``(k, i) -> k*n + i``) and is generated by

    π(x) = ⊕_k α_{-k}(x),        λ(m) = Sᵐ ⊗ 1,   (λ(m)ξ)(k) = ξ(k - m).

Every element is uniquely ``Σ_m λ(m) π(x_m)``, and ``x_m`` is the (m, 0) block.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .channels import QuantumChannel, check_modular_commutation
from .linalg import Verdict, dagger, matrix_units, random_complex
from .rearrangement import MeasurableElement, StepFunction, WeightedTraceAlgebra, mu, pointwise_le
from .standard_form import StandardForm


@dataclass(frozen=True)
class PeriodicState:
    q: float = 0.5
    N: int = 4
    exponents: tuple[int, ...] = (0, 1)

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        if self.N < 1:
            raise ValueError("N must be positive")
        object.__setattr__(self, "exponents", tuple(int(m) for m in self.exponents))

    @property
    def n(self) -> int:
        return len(self.exponents)

    @cached_property
    def rho(self) -> np.ndarray:
        w = self.q ** np.array(self.exponents, dtype=float)
        return np.diag(w / w.sum()).astype(complex)

    @cached_property
    def sf(self) -> StandardForm:
        return StandardForm(self.rho)

    @property
    def step(self) -> float:
        return 2 * np.pi / (self.N * abs(np.log(self.q)))

    @cached_property
    def _phases(self) -> np.ndarray:
        # α(E_ij) = (λ_i/λ_j)^{i t₁} E_ij = exp(-2πi (m_i - m_j)/N) E_ij
        m = np.array(self.exponents)
        return np.exp(-2j * np.pi * (m[:, None] - m[None, :]) / self.N)

    def alpha(self, x: np.ndarray, k: int = 1) -> np.ndarray:
        """α^k(x) = σ_{k t₁}(x); entrywise phases since ρ is diagonal."""
        return self._phases ** (k % self.N) * x

    def period_defect(self) -> float:
        """‖α^N - id‖ computed through the modular group itself."""
        units = matrix_units(self.n)
        out = self.sf.modular_automorphism(units, self.N * self.step)
        return float(np.max(np.abs(out - units)))


class CrossedProduct:
    def __init__(self, state: PeriodicState):
        self.state = state
        self.n, self.N = state.n, state.N
        self.dim = self.n * self.N

    # generators -------------------------------------------------------------
    def pi(self, x: np.ndarray) -> np.ndarray:
        n, N = self.n, self.N
        out = np.zeros(x.shape[:-2] + (self.dim, self.dim), dtype=complex)
        for k in range(N):
            out[..., k * n:(k + 1) * n, k * n:(k + 1) * n] = self.state.alpha(x, -k)
        return out

    def lam(self, m: int) -> np.ndarray:
        shift = np.roll(np.eye(self.N), m % self.N, axis=0)  # S^m e_j = e_{j+m}
        return np.kron(shift, np.eye(self.n)).astype(complex)

    def element(self, coeffs: np.ndarray) -> np.ndarray:
        """Σ_m λ(m) π(x_m) from coefficients of shape (N, n, n)."""
        return sum(self.lam(m) @ self.pi(coeffs[m]) for m in range(self.N))

    def expand(self, a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Coefficients x_m of a; raises if a is not in the span."""
        n = self.n
        coeffs = np.array([a[m * n:(m + 1) * n, :n] for m in range(self.N)])
        scale = max(1.0, float(np.linalg.norm(a)))
        if np.linalg.norm(self.element(coeffs) - a) > tol * scale:
            raise ValueError("element is not in the crossed product")
        return coeffs

    def basis(self) -> np.ndarray:
        """λ(m) π(E_ij) for all m, i, j: shape (N n², nN, nN)."""
        units = matrix_units(self.n)
        return np.array([self.lam(m) @ p for m in range(self.N) for p in self.pi(units)])

    def span_rank(self) -> int:
        b = self.basis()
        return int(np.linalg.matrix_rank(b.reshape(len(b), -1)))

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return self.element(random_complex(rng, (self.N, self.n, self.n)))

    # relations --------------------------------------------------------------
    def relation_defects(self, rng: np.random.Generator | None = None, samples: int = 5) -> dict[str, float]:
        """Max deviation in each of the four generator relations, over matrix units
        and a few random x, y (product rule read with λ(t+s))."""
        rng = np.random.default_rng(0) if rng is None else rng
        n, N = self.n, self.N
        xs = np.concatenate([matrix_units(n), random_complex(rng, (samples, n, n))])
        cov = prod = adj = 0.0
        for m in range(N):
            L = self.lam(m)
            cov = max(cov, float(np.max(np.abs(L @ self.pi(xs) @ dagger(L) - self.pi(self.state.alpha(xs, m))))))
            lhs = dagger(self.pi(xs) @ L)
            rhs = self.pi(self.state.alpha(dagger(xs), -m)) @ self.lam(-m)
            adj = max(adj, float(np.max(np.abs(lhs - rhs))))
            for s in range(N):
                ys = xs[::-1]
                lhs = self.pi(xs) @ L @ self.pi(ys) @ self.lam(s)
                rhs = self.pi(xs @ self.state.alpha(ys, m)) @ self.lam(m + s)
                prod = max(prod, float(np.max(np.abs(lhs - rhs))))
        span = float(n * n * N - self.span_rank())
        return {"covariance": cov, "product": prod, "adjoint": adj, "span": span}

    # dual action ------------------------------------------------------------
    def dual_unitary(self, j: int) -> np.ndarray:
        ph = np.exp(-2j * np.pi * j * np.arange(self.N) / self.N)
        return np.kron(np.diag(ph), np.eye(self.n))

    def dual_action(self, j: int, a: np.ndarray) -> np.ndarray:
        v = self.dual_unitary(j)
        return v @ a @ dagger(v)

    def dual_average(self, a: np.ndarray) -> np.ndarray:
        return sum(self.dual_action(j, a) for j in range(self.N)) / self.N

    # dual trace -------------------------------------------------------------
    @cached_property
    def trace_weights(self) -> np.ndarray:
        """g(m) = Σ_k q^{-k} e^{-2πimk/N}."""
        k = np.arange(self.N)
        m = k[:, None]
        return (self.state.q ** (-k)[None, :] * np.exp(-2j * np.pi * m * k[None, :] / self.N)).sum(axis=1)

    def dual_trace(self, a: np.ndarray) -> complex:
        """τ_d(Σ λ(m)π(x_m)) = Σ_m ω(x_m) g(m)."""
        c = self.expand(a)
        om = np.einsum("ij,mji->m", self.state.rho, c)
        return complex(np.dot(om, self.trace_weights))

    # channel extension ------------------------------------------------------
    def extend(self, T: QuantumChannel, check: bool = True):
        """T̃(λ(m)π(x)) = λ(m)π(T(x)), extended linearly."""
        if check:
            v = check_modular_commutation(T, self.state.sf)
            if not v:
                raise ValueError(f"channel does not commute with the modular group ({v.violation:.3g})")

        def apply(a: np.ndarray) -> np.ndarray:
            return self.element(T(self.expand(a)))

        return apply

    def extend_by_kraus(self, T: QuantumChannel):
        """Σ π(V_i)* a π(V_i): equals the linear extension when every V_i is α-invariant."""
        if T.kraus is None:
            raise ValueError("channel has no Kraus form")
        pv = [self.pi(v) for v in T.kraus]

        def apply(a: np.ndarray) -> np.ndarray:
            return sum(dagger(p) @ a @ p for p in pv)

        return apply


# ---------------------------------------------------------------------------
# checks used by the suite


@dataclass
class CrossedReport:
    relations: dict[str, float]
    trace_invariance: float
    module_property: float
    hermiticity: float
    positivity_min: float
    traciality: float
    extension_positivity_min: float
    functoriality: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def trace_invariance_check(cp: CrossedProduct, T: QuantumChannel, rng: np.random.Generator,
                           samples: int = 200) -> float:
    ext = cp.extend(T)
    worst = max(abs(cp.dual_trace(ext(b)) - cp.dual_trace(b)) for b in cp.basis())
    for _ in range(samples):
        a = cp.random_element(rng)
        for x in (a, dagger(a) @ a):
            worst = max(worst, abs(cp.dual_trace(ext(x)) - cp.dual_trace(x)))
    return float(worst)


def module_property_check(cp: CrossedProduct, T: QuantumChannel) -> float:
    """max ‖T̃(λ(m) b) - λ(m) T̃(b)‖ over m and spanning b."""
    ext = cp.extend(T)
    basis = cp.basis()
    worst = 0.0
    for m in range(cp.N):
        L = cp.lam(m)
        for b in basis:
            worst = max(worst, float(np.linalg.norm(ext(L @ b) - L @ ext(b))))
    return worst


def run_suite(cp: CrossedProduct, T: QuantumChannel, rng: np.random.Generator,
              samples: int = 200) -> CrossedReport:
    herm = trac = 0.0
    pos = epos = np.inf
    ext = cp.extend(T)
    for _ in range(samples):
        a, b = cp.random_element(rng), cp.random_element(rng)
        herm = max(herm, abs(cp.dual_trace(dagger(a)) - np.conj(cp.dual_trace(a))))
        pos = min(pos, cp.dual_trace(dagger(a) @ a).real)
        trac = max(trac, abs(cp.dual_trace(a @ b) - cp.dual_trace(b @ a)))
        epos = min(epos, float(np.linalg.eigvalsh(ext(dagger(a) @ a))[0]))
    T2 = T.compose(T)
    ext2 = cp.extend(T2)
    func = max(float(np.linalg.norm(ext(ext(x)) - ext2(x))) for x in cp.basis())
    return CrossedReport(
        relations=cp.relation_defects(rng),
        trace_invariance=trace_invariance_check(cp, T, rng, samples),
        module_property=module_property_check(cp, T),
        hermiticity=float(herm),
        positivity_min=float(pos),
        traciality=float(trac),
        extension_positivity_min=float(epos),
        functoriality=func,
    )


# ---------------------------------------------------------------------------
# singular-value bound for Kraus maps


@dataclass
class MuBoundReport:
    samples: int
    violations: int
    worst_excess: float
    lipschitz_violations: int
    lipschitz_worst_excess: float
    dilated_violations: int
    dilated_worst_excess: float


def kraus_apply(kraus: Sequence[MeasurableElement], a: MeasurableElement) -> MeasurableElement:
    out = None
    for v in kraus:
        term = v.adjoint() @ a @ v
        out = term if out is None else out + term
    return out


def kraus_mu_bound(alg: WeightedTraceAlgebra, kraus: Sequence[MeasurableElement],
                   a: MeasurableElement, b: MeasurableElement | None = None,
                   rtol: float = 1e-9) -> dict:
    """Compare μ(Σ V_i* a V_i) with (Σ‖V_i‖²) μ(a), and the Lipschitz form
    μ(T a - T b) <= N μ(a - b).  Also the time-dilated form
    μ_{Nt}(T a) <= (Σ‖V_i‖²) μ_t(a), which holds for any a >= 0."""
    N = len(kraus)
    c = sum(v.opnorm() ** 2 for v in kraus)
    lhs, rhs = mu(kraus_apply(kraus, a), alg), mu(a, alg)
    ok, excess = pointwise_le(lhs, rhs, c, rtol)
    dil = StepFunction(lhs.values, lhs.widths / N)
    ok_d, excess_d = pointwise_le(dil, rhs, c, rtol)
    out = {"bound": ok, "excess": excess, "dilated": ok_d, "dilated_excess": excess_d,
           "lhs": lhs.pairs(), "rhs": rhs.scaled(c).pairs()}
    if b is not None:
        d = kraus_apply(kraus, a) - kraus_apply(kraus, b)
        ok_l, excess_l = pointwise_le(mu(d, alg), mu(a - b, alg), N, rtol)
        out.update(lipschitz=ok_l, lipschitz_excess=excess_l)
    return out


def random_contractions(alg: WeightedTraceAlgebra, rng: np.random.Generator, count: int = 3,
                        normalise: bool = True) -> list[MeasurableElement]:
    """Random Kraus family; with ``normalise`` Σ V_i* V_i = 1 blockwise, so each ‖V_i‖ <= 1."""
    vs = [alg.random_element(rng) for _ in range(count)]
    if not normalise:
        return [(1.0 / v.opnorm()) * v for v in vs]
    blocks = []
    for k in range(len(alg.dims)):
        s = sum(dagger(v.blocks[k]) @ v.blocks[k] for v in vs)
        w, u = np.linalg.eigh(s)
        blocks.append((u * w ** -0.5) @ dagger(u))
    return [MeasurableElement(tuple(b @ r for b, r in zip(v.blocks, blocks))) for v in vs]


def mu_bound_suite(alg: WeightedTraceAlgebra, rng: np.random.Generator, samples: int = 200,
                   count: int = 3) -> MuBoundReport:
    kraus = random_contractions(alg, rng, count)
    viol = lviol = dviol = 0
    worst = lworst = dworst = -np.inf
    for _ in range(samples):
        a = alg.random_element(rng, positive=True)
        b = alg.random_element(rng, positive=True)
        r = kraus_mu_bound(alg, kraus, a, b)
        viol += not r["bound"]
        lviol += not r["lipschitz"]
        dviol += not r["dilated"]
        worst = max(worst, r["excess"])
        lworst = max(lworst, r["lipschitz_excess"])
        dworst = max(dworst, r["dilated_excess"])
    return MuBoundReport(samples, viol, float(worst), lviol, float(lworst), dviol, float(dworst))
