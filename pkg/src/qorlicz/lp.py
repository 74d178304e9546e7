"""Symmetric L^p embeddings of M_n and the maps they induce.

In finite dimensions ``L^p`` is M_n with the Schatten norm and
``ι_p(a) = ρ^{1/(2p)} a ρ^{1/(2p)}``.  A channel T induces
``T^(p) = ι_p ∘ T ∘ ι_p^{-1}``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channels import QuantumChannel, hat_map
from .linalg import Verdict, dagger, random_complex, random_unitary, sandwich_superop, schatten_norm
from .standard_form import StandardForm


@dataclass(frozen=True)
class LpElement:
    matrix: np.ndarray
    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("p must be at least 1")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("entries must be finite")

    def norm(self) -> float:
        return schatten_norm(self.matrix, self.p)


def _sf(rho) -> StandardForm:
    return rho if isinstance(rho, StandardForm) else StandardForm(rho)


def iota_p(a: np.ndarray, rho, p: float) -> LpElement:
    sf = _sf(rho)
    if np.isinf(p):
        return LpElement(np.asarray(a, dtype=complex), p)
    r = sf.power(1.0 / (2.0 * p))
    return LpElement(r @ a @ r, p)


def T_p(T: QuantumChannel, rho, p: float) -> np.ndarray:
    """Superoperator of ξ ↦ ι_p(T(ι_p^{-1}(ξ)))."""
    sf = _sf(rho)
    if sf.condition > 1e12:
        warnings.warn(f"ρ is ill-conditioned (condition {sf.condition:.3g})", RuntimeWarning)
    if np.isinf(p):
        return T.superop.copy()
    r, ri = sf.power(1.0 / (2.0 * p)), sf.power(-1.0 / (2.0 * p))
    return sandwich_superop(r, r) @ T.superop @ sandwich_superop(ri, ri)


@dataclass(frozen=True)
class T2Report:
    embedding_vs_sigma: float      # ‖ι_2(T a) - σ_{-i/4}(T a) ρ^{1/2}‖
    sigma_inside: float            # ‖σ_{-i/4}(T a) ρ^{1/2} - T(σ_{-i/4}(a)) ρ^{1/2}‖
    superop_path: float            # ‖T^(2)(ι_2 a) - ι_2(T a)‖

    @property
    def worst(self) -> float:
        return max(self.embedding_vs_sigma, self.sigma_inside, self.superop_path)

    def verdict(self, tol: float = 1e-8) -> Verdict:
        return Verdict("t2_identity", self.worst <= tol, self.worst)


def t2_identity_check(T: QuantumChannel, rho, rng: np.random.Generator | None = None,
                      samples: int = 100) -> T2Report:
    sf = _sf(rho)
    rng = np.random.default_rng(0) if rng is None else rng
    n = sf.n
    a = random_complex(rng, (samples, n, n))
    a /= np.linalg.norm(a, axis=(1, 2), keepdims=True)
    q, qi, h = sf.power(0.25), sf.power(-0.25), sf.power(0.5)
    ta = T(a)
    direct = q @ ta @ q
    via_sigma = q @ ta @ qi @ h
    inside = T(q @ a @ qi) @ h
    s2 = T_p(T, sf, 2.0)
    iota_a = q @ a @ q
    path = (iota_a.reshape(samples, -1) @ s2.T).reshape(a.shape)

    def worst(x, y):
        return float(np.max(np.linalg.norm(x - y, axis=(1, 2))))

    return T2Report(worst(direct, via_sigma), worst(via_sigma, inside), worst(path, direct))


def t2_hat_distance(T: QuantumChannel, rho) -> float:
    """‖T^(2) - T̂‖ with L²(M_n) and the GNS space both realised as M_n with Hilbert-Schmidt
    inner product (ρ^{1/2} playing Ω).  Zero exactly when T̂ commutes with Δ."""
    sf = _sf(rho)
    return float(np.linalg.norm(T_p(T, sf, 2.0) - hat_map(T, sf), 2))


# ---------------------------------------------------------------------------
# p -> p operator norms


def _apply(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    return (s @ x.reshape(-1)).reshape(n, n)


def _schatten_grad(y: np.ndarray, p: float) -> tuple[float, np.ndarray]:
    """‖y‖_p and G with d‖y‖_p = Re tr(G* dy)."""
    u, s, vh = np.linalg.svd(y)
    norm = float(np.sum(s ** p) ** (1.0 / p))
    g = (u * (s / norm) ** (p - 1.0)) @ vh
    return norm, g


def _pnorm_local(s: np.ndarray, p: float, x0: np.ndarray) -> float:
    n = x0.shape[0]

    def unpack(z):
        return (z[: n * n] + 1j * z[n * n:]).reshape(n, n)

    def f(z):
        x = unpack(z)
        nx, gx = _schatten_grad(x, p)
        y = _apply(s, x)
        ny, gy = _schatten_grad(y, p)
        if ny == 0.0:
            return 0.0, np.zeros_like(z)
        grad = (dagger_superop(s) @ gy.reshape(-1)).reshape(n, n) / ny - gx / nx
        grad = grad.reshape(-1)
        return -(np.log(ny) - np.log(nx)), -np.concatenate([grad.real, grad.imag])

    z0 = np.concatenate([x0.real.reshape(-1), x0.imag.reshape(-1)])
    res = minimize(f, z0, jac=True, method="L-BFGS-B", options={"maxiter": 300})
    x = unpack(res.x)
    return schatten_norm(_apply(s, x), p) / schatten_norm(x, p)


def _rank_one_local(s: np.ndarray, x0: np.ndarray) -> float:
    """p = 1: the trace-norm ball is the hull of rank-one uv*, so search over those."""
    n = x0.shape[0]
    u0, _, vh0 = np.linalg.svd(x0)

    def unpack(z):
        u = z[:n] + 1j * z[n:2 * n]
        v = z[2 * n:3 * n] + 1j * z[3 * n:]
        return np.outer(u, v.conj())

    def f(z):
        x = unpack(z)
        nx = schatten_norm(x, 1.0)
        return -schatten_norm(_apply(s, x), 1.0) / nx if nx > 0 else 0.0

    u, v = u0[:, 0], vh0[0].conj()
    z0 = np.concatenate([u.real, u.imag, v.real, v.imag])
    res = minimize(f, z0, method="L-BFGS-B", options={"maxiter": 300})
    return -float(res.fun)


def dagger_superop(s: np.ndarray) -> np.ndarray:
    return s.conj().T


def superop_pnorm(s: np.ndarray, p: float, rng: np.random.Generator | None = None,
                  starts: int = 20) -> float:
    """Estimate of sup ‖S x‖_p / ‖x‖_p over complex n×n x.

    Exact for p = 2 (largest singular value).  Otherwise the best of
    ``starts`` local ascents, which is a lower bound on the true norm.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = int(round(np.sqrt(s.shape[0])))
    if p == 2:
        return float(np.linalg.norm(s, 2))
    if np.isinf(p):
        # extreme points of the operator-norm ball are unitaries
        best = schatten_norm(_apply(s, np.eye(n, dtype=complex)), np.inf)
        for _ in range(50 * starts):
            best = max(best, schatten_norm(_apply(s, random_unitary(rng, n)), np.inf))
        return float(best)
    inits = [np.eye(n, dtype=complex)] + [random_complex(rng, (n, n)) for _ in range(starts - 1)]
    if p == 1:
        # rank-one starts, including the top right singular vector of S
        _, _, vh = np.linalg.svd(s)
        inits[0] = vh[0].conj().reshape(n, n)
        return float(max(_rank_one_local(s, x0) for x0 in inits))
    return float(max(_pnorm_local(s, p, x0) for x0 in inits))


# ---------------------------------------------------------------------------
# symmetric embedding i_0(x) = Δ^{1/4} x Ω = ρ^{1/4} x ρ^{1/4}


def symmetric_embedding_H(L: np.ndarray, rho, tol: float = 1e-9) -> tuple[np.ndarray, Verdict]:
    """H with H i_0(x) = i_0(L x), and whether H is self-adjoint on the GNS space."""
    sf = _sf(rho)
    q, qi = sf.power(0.25), sf.power(-0.25)
    h = sandwich_superop(q, q) @ np.asarray(L, dtype=complex) @ sandwich_superop(qi, qi)
    v = float(np.linalg.norm(h - dagger(h), 2))
    return h, Verdict("h_selfadjoint", v <= tol, v)
