"""Quadratic forms on the GNS space, Markov semigroups and the Dirichlet property.

Sign convention: the semigroup is ``exp(-tA)`` and the form is
``E[ξ] = ⟨ξ, Aξ⟩``; a generator ``L`` in the ``exp(tL)`` convention is ``-A``.
Antilinear involutions are represented by a matrix ``M`` with ``J v = M conj(v)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .channels import hat_map, make_dbc_fixture
from .linalg import Verdict, dagger, hermitian_part, min_eig, random_complex
from .standard_form import Convention, StandardForm

T_GRID = (0.01, 0.1, 1.0, 10.0)


@dataclass
class QuadraticForm:
    A: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        self.n = int(round(np.sqrt(self.A.shape[0])))

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        """E[ξ] (complex in general; real on H^J for J-real forms). Batched."""
        flat = xi.reshape(xi.shape[:-2] + (-1,))
        return np.einsum("...i,...i->...", flat.conj(), flat @ self.A.T)

    @property
    def lower_bound(self) -> float:
        """Largest c with Re E[ξ] >= c‖ξ‖²."""
        return float(np.linalg.eigvalsh(hermitian_part(self.A))[0])


@dataclass
class MarkovSemigroup:
    A: np.ndarray
    t_grid: Sequence[float] = T_GRID

    def at(self, t: float) -> np.ndarray:
        return expm(-t * np.asarray(self.A, dtype=complex))

    @property
    def form(self) -> QuadraticForm:
        return QuadraticForm(self.A)


def hermitian_conjugation_J0(sf: StandardForm) -> np.ndarray:
    """J_0(xΩ) = x*Ω, i.e. ξ ↦ ρ^{-1/2} ξ* ρ^{1/2}, as M with J_0 v = M conj(v)."""
    left = np.kron(sf.power(-0.5), sf.power(0.5).T)
    return left @ sf.j_matrix()


def is_J_real(E: QuadraticForm, sf: StandardForm, rng: np.random.Generator | None = None,
              samples: int = 200, tol: float = 1e-9) -> Verdict:
    """E[Jξ] = E[ξ] on sampled ξ, with J the modular conjugation ξ ↦ ξ*."""
    rng = np.random.default_rng(0) if rng is None else rng
    xi = random_complex(rng, (samples, sf.n, sf.n))
    xi /= np.linalg.norm(xi, axis=(1, 2), keepdims=True)
    v = float(np.max(np.abs(E(dagger(xi)) - E(xi))))
    return Verdict("j_real", v <= tol, v)


def is_J0_selfadjoint(A: np.ndarray, J0: np.ndarray, tol: float = 1e-10) -> Verdict:
    """J_0 A J_0 = A* for J_0 v = M conj(v); requires J_0² = 1."""
    A = np.asarray(A, dtype=complex)
    m = np.asarray(J0, dtype=complex)
    inv = float(np.linalg.norm(m @ m.conj() - np.eye(m.shape[0]), 2))
    if inv > tol:
        return Verdict("j0_selfadjoint", False, inv, {"reason": "J0 is not an involution"})
    v = float(np.linalg.norm(m @ A.conj() @ m.conj() - dagger(A), 2))
    return Verdict("j0_selfadjoint", v <= tol, v)


# ---------------------------------------------------------------------------
# sampling ensembles


def cone_samples(sf: StandardForm, rng: np.random.Generator, samples: int) -> np.ndarray:
    """Unit-norm elements of P: full-rank, rank-one, and boundary points of random rank."""
    n = sf.n
    out = []
    for k in range(samples):
        rank = (k % n) + 1
        b = random_complex(rng, (n, rank))
        out.append(b @ dagger(b))
    for i in range(n):
        for j in range(i + 1, n):
            for ph in (1, -1, 1j, -1j):
                v = np.zeros(n, dtype=complex)
                v[i], v[j] = 1.0, ph
                out.append(np.outer(v, v.conj()))
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    p = np.array(out)
    return p / np.linalg.norm(p, axis=(1, 2), keepdims=True)


def real_samples(sf: StandardForm, rng: np.random.Generator, samples: int = 500,
                 eps: Sequence[float] = (0.01, 0.1)) -> np.ndarray:
    """ξ ∈ H^J (Hermitian matrices), four equal parts:

    Gaussian Hermitian; p - εΩ with p a random rank-deficient element of P;
    p - εΩ with p = vv* for v supported on one or two eigenvectors of ρ;
    Gaussian elements diagonal in the eigenbasis of ρ (the commutative sector).
    """
    n = sf.n
    u = sf.evecs
    q = samples // 4
    gauss = hermitian_part(random_complex(rng, (samples - 3 * q, n, n)))
    out = list(gauss / np.linalg.norm(gauss, axis=(1, 2), keepdims=True))
    for k in range(q):
        rank = int(rng.integers(1, n)) if n > 1 else 1
        b = random_complex(rng, (n, rank))
        p = b @ dagger(b)
        out.append(p / np.linalg.norm(p) - eps[k % len(eps)] * sf.omega)
    for k in range(q):
        c = np.zeros(n, dtype=complex)
        idx = rng.choice(n, size=min(n, 1 + k % 2), replace=False)
        c[idx] = random_complex(rng, idx.size)
        v = u @ c
        p = np.outer(v, v.conj())
        out.append(p / np.linalg.norm(p) - eps[k % len(eps)] * sf.omega)
    d = rng.normal(size=(q, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    out.extend((u * row) @ dagger(u) for row in d)
    return np.array(out)


# ---------------------------------------------------------------------------
# Markovianity and the Dirichlet property


def _cone_violation(x: np.ndarray) -> np.ndarray:
    """Distance-like measure of x ∉ PSD (P coincides with the PSD cone)."""
    herm = np.linalg.norm(x - dagger(x), axis=(-2, -1))
    return np.maximum(herm, np.clip(-min_eig(x), 0.0, None))


def is_markovian_map(T_hat: np.ndarray, sf: StandardForm, rng: np.random.Generator | None = None,
                     samples: int = 200, tol: float = 1e-8) -> Verdict:
    """T̂P ⊆ P on sampled generators and Ω - T̂Ω ∈ P."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = sf.n
    p = cone_samples(sf, rng, samples)
    imgs = (p.reshape(len(p), -1) @ np.asarray(T_hat).T).reshape(p.shape)
    cone = float(np.max(_cone_violation(imgs)))
    om = sf.omega
    sub = float(_cone_violation(om - (np.asarray(T_hat) @ om.reshape(-1)).reshape(n, n)))
    v = max(cone, sub)
    return Verdict("markov_map", v <= tol, v, {"cone": cone, "omega_sub": sub})


def is_dirichlet_form(E: QuadraticForm, sf: StandardForm, convention: Convention = "minus",
                      rng: np.random.Generator | None = None, samples: int = 500,
                      tol: float = 1e-8) -> Verdict:
    """E[ξ ∧ Ω] <= E[ξ] + tol over sampled ξ ∈ H^J (J-reality checked first)."""
    rng = np.random.default_rng(0) if rng is None else rng
    jr = is_J_real(E, sf, rng)
    if not jr:
        return Verdict("dirichlet_form", False, jr.violation,
                       {"reason": "form is not J-real", "convention": convention})
    xi = real_samples(sf, rng, samples)
    w = sf.wedge(xi, sf.omega, convention)
    excess = np.real(E(w)) - np.real(E(xi))
    v = float(np.max(excess))
    return Verdict("dirichlet_form", v <= tol, max(v, 0.0), {"convention": convention})


@dataclass
class EquivalenceReport:
    markov: bool
    dirichlet: bool
    convention: str
    worst_violation: float
    markov_by_t: dict[float, float] = field(default_factory=dict)
    dirichlet_violation: float = 0.0

    @property
    def agree(self) -> bool:
        return self.markov == self.dirichlet

    def to_dict(self) -> dict:
        return {"markov": self.markov, "dirichlet": self.dirichlet, "convention": self.convention,
                "worst_violation": self.worst_violation}


def equivalence_test(sg: MarkovSemigroup, sf: StandardForm, convention: Convention = "minus",
                     rng: np.random.Generator | None = None, samples: int = 500,
                     tol: float = 1e-8) -> EquivalenceReport:
    """Markovianity of exp(-tA) on the grid versus the Dirichlet property of E."""
    rng = np.random.default_rng(0) if rng is None else rng
    by_t = {}
    for t in sg.t_grid:
        by_t[float(t)] = is_markovian_map(sg.at(t), sf, rng, tol=tol).violation
    markov = all(v <= tol for v in by_t.values())
    d = is_dirichlet_form(sg.form, sf, convention, rng, samples, tol)
    return EquivalenceReport(markov, d.passed, convention,
                             max(max(by_t.values()), d.violation), by_t, d.violation)


@dataclass
class GeneratorDecomposition:
    H: np.ndarray
    D: np.ndarray
    h_selfadjoint: bool
    d_min_eig: float
    d_positive: bool
    residual: float


def generator_decomposition(A: np.ndarray, tol: float = 1e-10) -> GeneratorDecomposition:
    """L = -A = iH - D with H = (L - L*)/(2i), D = -(L + L*)/2."""
    L = -np.asarray(A, dtype=complex)
    H = (L - dagger(L)) / 2j
    D = -(L + dagger(L)) / 2
    dmin = float(np.linalg.eigvalsh(hermitian_part(D))[0])
    return GeneratorDecomposition(
        H, D,
        bool(np.linalg.norm(H - dagger(H)) <= tol),
        dmin, dmin >= -tol,
        float(np.linalg.norm(L - (1j * H - D))),
    )


# ---------------------------------------------------------------------------
# fixtures


def dbc_semigroup_fixture(rng: np.random.Generator, n: int) -> tuple[MarkovSemigroup, StandardForm]:
    """A = 1 - T̂ for a DBC Schur channel T; exp(-tA) is then Markov for every t."""
    T, sf = make_dbc_fixture(rng, n)
    A = np.eye(n * n) - hat_map(T, sf)
    return MarkovSemigroup(A), sf


def diagonal_mixing_direction(sf: StandardForm, weights: np.ndarray | None = None) -> np.ndarray:
    """Superoperator acting on the eigenbasis-diagonal of ξ by the real symmetric matrix
    ``11^T - 1`` (positive weights off the diagonal); it kills everything else.

    ``exp(-tεB)`` on the diagonal has negative off-diagonal entries for t, ε > 0,
    so adding it to a generator breaks positivity of the semigroup.
    """
    n = sf.n
    b = np.ones((n, n)) - np.eye(n) if weights is None else np.asarray(weights, dtype=float)
    u = sf.evecs
    out = np.zeros((n * n, n * n), dtype=complex)
    diag_vecs = np.array([np.outer(u[:, i], u[:, i].conj()).reshape(-1) for i in range(n)])
    for i in range(n):
        for j in range(n):
            out += b[i, j] * np.outer(diag_vecs[i], diag_vecs[j].conj())
    return out


def perturbed_fixture(rng: np.random.Generator, n: int, eps: float = 0.1) -> tuple[MarkovSemigroup, StandardForm]:
    sg, sf = dbc_semigroup_fixture(rng, n)
    return MarkovSemigroup(sg.A + eps * diagonal_mixing_direction(sf)), sf
