"""Small dense linear-algebra helpers shared across the package.

Vectorisation is row-major throughout: ``vec(X) = X.reshape(-1)``, so the
map ``X -> A @ X @ B`` has matrix ``kron(A, B.T)``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


class ConvergenceError(RuntimeError):
    """An iterative routine hit its cap before meeting its tolerance."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


def dagger(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def hermitian_part(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + dagger(x))


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1)


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(v).reshape(n, n)


def sandwich_superop(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> left @ X @ right`` acting on row-major vectors."""
    return np.kron(left, right.T)


def superop_from_function(fn: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    cols = []
    for k in range(n * n):
        e = np.zeros(n * n, dtype=complex)
        e[k] = 1.0
        cols.append(vec(fn(unvec(e, n))))
    return np.array(cols).T


def apply_superop(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    return unvec(s @ vec(x), n)


def matrix_units(n: int) -> np.ndarray:
    """Array of shape (n*n, n, n) holding E_ij in row-major order."""
    return np.eye(n * n, dtype=complex).reshape(n * n, n, n)


def hfunc(h: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Functional calculus ``fn(h)`` for Hermitian ``h``."""
    w, u = np.linalg.eigh(hermitian_part(h))
    return (u * fn(w)) @ dagger(u)


def psd_clip(x: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix (Frobenius) to the Hermitian part of ``x``; batched."""
    w, u = np.linalg.eigh(hermitian_part(x))
    return (u * np.clip(w, 0.0, None)[..., None, :]) @ dagger(u)


def min_eig(x: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(hermitian_part(x))[..., 0]


def schatten_norm(x: np.ndarray, p: float) -> float:
    s = np.linalg.svd(x, compute_uv=False)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s**p) ** (1.0 / p))


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(rng: np.random.Generator, n: int, spread: float = 5.0,
                   diagonal: bool = False) -> np.ndarray:
    """Faithful density matrix with eigenvalue ratio at most ``spread``."""
    w = rng.uniform(1.0, spread, size=n)
    w[0], w[-1] = 1.0, spread
    w /= w.sum()
    if diagonal:
        return np.diag(w).astype(complex)
    u = random_unitary(rng, n)
    return (u * w) @ dagger(u)


class Verdict:
    """Outcome of a numerical check: name, pass flag and worst violation."""

    __slots__ = ("check", "passed", "violation", "detail")

    def __init__(self, check: str, passed: bool, violation: float, detail: dict | None = None):
        self.check = check
        self.passed = bool(passed)
        self.violation = float(violation)
        self.detail = detail or {}

    def __bool__(self) -> bool:
        return self.passed

    def __repr__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"Verdict({self.check}: {status}, violation={self.violation:.3g})"

    def to_dict(self) -> dict:
        out = {"check": self.check, "pass": self.passed, "violation": self.violation}
        if self.detail:
            out["detail"] = self.detail
        return out
