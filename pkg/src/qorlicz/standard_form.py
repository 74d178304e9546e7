"""Standard form of (M_n, ω) with ω = Tr(ρ ·) faithful.

GNS vectors are n x n matrices with the Hilbert-Schmidt inner product,
``xΩ = x ρ^{1/2}``.  The modular operator is ``Δξ = ρ ξ ρ^{-1}``, the
modular conjugation is ``Jξ = ξ*`` and the natural cone is
``P = {ρ^{1/4} a ρ^{1/4} : a ⪰ 0}``.  Congruence by the invertible
``ρ^{1/4}`` preserves positivity, so P is exactly the cone of positive
semidefinite matrices; projections onto it are spectral clippings.
"""

from __future__ import annotations

from typing import Literal

import numpy as np

from .linalg import (ConvergenceError, dagger, hermitian_part, min_eig, psd_clip,
                     sandwich_superop)

Convention = Literal["plus", "minus"]


class StandardForm:
    """Modular data of a faithful state on M_n."""

    def __init__(self, rho: np.ndarray, tol: float = 1e-10):
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("ρ must be a square matrix")
        if np.linalg.norm(rho - dagger(rho)) > tol * max(1.0, np.linalg.norm(rho)):
            raise ValueError("ρ must be Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-8:
            raise ValueError("ρ must have unit trace")
        w, u = np.linalg.eigh(hermitian_part(rho))
        if w[0] <= 1e-15 * w[-1]:
            raise ValueError("ρ must be faithful (positive definite)")
        self.rho = hermitian_part(rho)
        self.n = rho.shape[0]
        self.evals = w
        self.evecs = u

    # functional calculus --------------------------------------------------
    def power(self, z: complex) -> np.ndarray:
        """ρ^z for complex z."""
        return (self.evecs * self.evals.astype(complex) ** z) @ dagger(self.evecs)

    @property
    def omega(self) -> np.ndarray:
        return self.power(0.5)

    @property
    def condition(self) -> float:
        return float(self.evals[-1] / self.evals[0])

    def state(self, x: np.ndarray) -> complex:
        return complex(np.trace(self.rho @ x))

    def gns(self, x: np.ndarray) -> np.ndarray:
        return x @ self.power(0.5)

    def from_gns(self, xi: np.ndarray) -> np.ndarray:
        return xi @ self.power(-0.5)

    # modular objects ---------------------------------------------------------
    def delta_power(self, xi: np.ndarray, z: complex = 1.0) -> np.ndarray:
        """Δ^z ξ = ρ^z ξ ρ^{-z}."""
        return self.power(z) @ xi @ self.power(-z)

    def modular_automorphism(self, x: np.ndarray, t: complex) -> np.ndarray:
        """σ_t(x) = ρ^{it} x ρ^{-it}; complex t gives the analytic extension."""
        return self.power(1j * t) @ x @ self.power(-1j * t)

    @staticmethod
    def J(xi: np.ndarray) -> np.ndarray:
        return dagger(xi)

    def delta_superop(self, z: complex = 1.0) -> np.ndarray:
        return sandwich_superop(self.power(z), self.power(-z))

    def j_matrix(self) -> np.ndarray:
        """K with J v = K conj(v) on row-major vectors (a permutation)."""
        n = self.n
        perm = np.arange(n * n).reshape(n, n).T.reshape(-1)
        return np.eye(n * n)[perm]

    # natural cone ---------------------------------------------------------
    def cone_generator(self, a: np.ndarray) -> np.ndarray:
        """ρ^{1/4} a ρ^{1/4} (in P when a ⪰ 0)."""
        q = self.power(0.25)
        return q @ a @ q

    def cone_member(self, xi: np.ndarray, tol: float = 1e-10) -> bool:
        return self.cone_violation(xi) <= tol

    def cone_violation(self, xi: np.ndarray) -> float:
        """How far ρ^{-1/4} ξ ρ^{-1/4} is from being positive (0 inside P)."""
        qi = self.power(-0.25)
        a = qi @ xi @ qi
        herm = np.linalg.norm(a - dagger(a), axis=(-2, -1))
        neg = np.clip(-min_eig(a), 0.0, None)
        return float(np.max(np.maximum(herm, neg)))

    def cone_project(self, xi: np.ndarray) -> np.ndarray:
        """Orthogonal projection onto P (batched over leading axes)."""
        return psd_clip(xi)

    def cone_project_iterative(self, xi: np.ndarray, tol: float = 1e-12,
                               max_iter: int = 10_000) -> np.ndarray:
        """The same projection by accelerated projected gradient on a ⪰ 0.

        Minimises ½‖ξ - ρ^{1/4} a ρ^{1/4}‖² over a ⪰ 0 with FISTA and
        adaptive restart; stops when the optimality conditions
        (π ∈ P, π - ξ ∈ P, ⟨π - ξ, π⟩ = 0) hold to ``tol``.
        """
        u = self.evecs
        x = dagger(u) @ hermitian_part(np.asarray(xi, dtype=complex)) @ u
        w = np.outer(self.evals, self.evals) ** 0.25
        step = 1.0 / self.evals[-1] ** 0.5
        a = psd_clip(x / w)
        y, t = a.copy(), 1.0
        scale = max(1.0, float(np.linalg.norm(x)))
        residual = np.inf
        for _ in range(max_iter):
            grad = w * (w * y - x)
            a_next = psd_clip(y - step * grad)
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            # restart momentum when it points uphill
            if np.real(np.vdot(y - a_next, a_next - a)) > 0:
                t_next, y = 1.0, a_next
            else:
                y = a_next + ((t - 1.0) / t_next) * (a_next - a)
            a, t = a_next, t_next
            pi = w * a
            r = pi - x
            residual = max(float(max(-min_eig(r), 0.0)),
                           abs(float(np.real(np.vdot(r, pi)))) / scale) / scale
            if residual <= tol:
                return u @ pi @ dagger(u)
        raise ConvergenceError("cone projection did not converge", residual)

    def wedge(self, u: np.ndarray, v: np.ndarray, convention: Convention = "minus") -> np.ndarray:
        """Projection of u onto the closed convex set v - P ('minus') or v + P ('plus')."""
        if convention == "minus":
            return v - self.cone_project(v - u)
        if convention == "plus":
            return v + self.cone_project(u - v)
        raise ValueError(f"unknown wedge convention {convention!r}")

    def random_cone_element(self, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
        n = self.n
        k = n if rank is None else rank
        b = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
        return self.cone_generator(b @ dagger(b))

    def random_hermitian_vector(self, rng: np.random.Generator) -> np.ndarray:
        n = self.n
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return hermitian_part(b)


def modular_data(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Δ, K) as matrices on row-major vectors; J v = K conj(v)."""
    sf = StandardForm(rho)
    return sf.delta_superop(), sf.j_matrix()


def natural_cone_member(rho: np.ndarray, xi: np.ndarray, tol: float = 1e-10) -> bool:
    return StandardForm(rho).cone_member(xi, tol)


def cone_project(rho: np.ndarray, xi: np.ndarray) -> np.ndarray:
    return StandardForm(rho).cone_project(xi)


def wedge(rho: np.ndarray, u: np.ndarray, v: np.ndarray, convention: Convention = "minus") -> np.ndarray:
    return StandardForm(rho).wedge(u, v, convention)
