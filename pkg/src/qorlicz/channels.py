"""Quantum channels on M_n in the Heisenberg picture and their symmetry checks.

A channel acts on observables, ``T(x) = Σ_i V_i* x V_i`` for Kraus maps,
and is stored as its superoperator on row-major vectors.  Maps that are
not completely positive (the transpose, say) are built straight from a
superoperator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linalg import (Verdict, dagger, hermitian_part, matrix_units, min_eig, random_unitary,
                     random_density, sandwich_superop, superop_from_function)
from .standard_form import StandardForm


class QuantumChannel:
    def __init__(self, superop: np.ndarray, kraus: Sequence[np.ndarray] | None = None):
        superop = np.asarray(superop, dtype=complex)
        n = int(round(np.sqrt(superop.shape[0])))
        if superop.shape != (n * n, n * n):
            raise ValueError("superoperator must be n^2 x n^2")
        self.superop = superop
        self.n = n
        self.kraus = None if kraus is None else [np.asarray(v, dtype=complex) for v in kraus]

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray]) -> "QuantumChannel":
        kraus = [np.asarray(v, dtype=complex) for v in kraus]
        if not kraus:
            raise ValueError("need at least one Kraus operator")
        n = kraus[0].shape[0]
        if any(v.shape != (n, n) for v in kraus):
            raise ValueError("Kraus operators must be square and of equal size")
        excess = np.linalg.eigvalsh(hermitian_part(sum(dagger(v) @ v for v in kraus)))[-1] - 1.0
        if excess > 1e-10:
            raise ValueError(f"Σ V*V exceeds the identity by {excess:.3g}")
        return cls(sum(sandwich_superop(dagger(v), v) for v in kraus), kraus)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], n: int) -> "QuantumChannel":
        return cls(superop_from_function(fn, n))

    @classmethod
    def identity(cls, n: int) -> "QuantumChannel":
        return cls.from_kraus([np.eye(n)])

    @classmethod
    def transpose(cls, n: int) -> "QuantumChannel":
        return cls.from_function(lambda x: x.T, n)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        n = self.n
        flat = x.reshape(x.shape[:-2] + (n * n,))
        return (flat @ self.superop.T).reshape(x.shape)

    def compose(self, other: "QuantumChannel") -> "QuantumChannel":
        """self ∘ other."""
        return QuantumChannel(self.superop @ other.superop)

    def choi(self) -> np.ndarray:
        """Σ_ij E_ij ⊗ T(E_ij), indexed [(i,a),(j,b)]."""
        n = self.n
        images = self(matrix_units(n)).reshape(n, n, n, n)  # [i, j, a, b]
        return images.transpose(0, 2, 1, 3).reshape(n * n, n * n)

    def choi_min_eig(self) -> float:
        return float(min_eig(self.choi()))

    def unit_image(self) -> np.ndarray:
        return self(np.eye(self.n))

    @property
    def unital(self) -> bool:
        return bool(np.linalg.norm(self.unit_image() - np.eye(self.n), 2) <= 1e-10)

    def kraus_norm_sum(self) -> float:
        if self.kraus is None:
            raise ValueError("channel has no Kraus form")
        return float(sum(np.linalg.norm(v, 2) ** 2 for v in self.kraus))


def modular_channel(sf: StandardForm, t: float) -> QuantumChannel:
    """σ_t as a channel: V = ρ^{-it}, so V* x V = ρ^{it} x ρ^{-it}."""
    return QuantumChannel.from_kraus([sf.power(-1j * t)])


@dataclass(frozen=True)
class ReversingOperation:
    """Θ(x) = U conj(U* x U) U*: antilinear, multiplicative and involutive."""

    basis: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        u = self.basis
        return u @ np.conj(dagger(u) @ x @ u) @ dagger(u)

    def defects(self, sf: StandardForm) -> dict[str, float]:
        """Θ² - id and ω(Θ(xy)) - ω(Θ(x)Θ(y)) over pairs of matrix units."""
        units = matrix_units(sf.n)
        inv = float(np.max(np.abs(self(self(units)) - units)))
        th = self(units)
        prod = units[:, None] @ units[None, :]
        lhs = np.einsum("ij,klji->kl", sf.rho, self(prod))
        rhs = np.einsum("ij,klji->kl", sf.rho, th[:, None] @ th[None, :])
        return {"involution": inv, "state_compatibility": float(np.max(np.abs(lhs - rhs)))}


def reversing_operation(sf: StandardForm) -> ReversingOperation:
    """Θ as entrywise complex conjugation in the eigenbasis of ρ."""
    return ReversingOperation(sf.evecs)


# ---------------------------------------------------------------------------
# checks


def check_dbc(T: QuantumChannel, sf: StandardForm, tol: float = 1e-9,
              theta: ReversingOperation | None = None) -> Verdict:
    """ω(x* T(y)) = ω(Θ(y*) T(Θ(x))) on all pairs of matrix units."""
    if not T.unital:
        warnings.warn("detailed balance is meant for unital maps", RuntimeWarning)
    theta = reversing_operation(sf) if theta is None else theta
    units = matrix_units(sf.n)
    a = sf.rho @ dagger(units)
    lhs = np.einsum("kij,lji->kl", a, T(units))
    b = sf.rho @ theta(dagger(units))
    c = T(theta(units))
    rhs = np.einsum("lij,kji->kl", b, c)
    v = float(np.max(np.abs(lhs - rhs)))
    return Verdict("dbc", v <= tol, v)


def check_state_invariance(T: QuantumChannel, sf: StandardForm, tol: float = 1e-10) -> Verdict:
    units = matrix_units(sf.n)
    before = np.einsum("ij,kji->k", sf.rho, units)
    after = np.einsum("ij,kji->k", sf.rho, T(units))
    v = float(np.max(np.abs(after - before)))
    return Verdict("state_invariance", v <= tol, v)


def hat_map(T: QuantumChannel, sf: StandardForm) -> np.ndarray:
    """T̂(xΩ) = T(x)Ω as a matrix on GNS vectors."""
    n = sf.n
    eye = np.eye(n)
    return sandwich_superop(eye, sf.power(0.5)) @ T.superop @ sandwich_superop(eye, sf.power(-0.5))


def check_modular_commutation(T: QuantumChannel, sf: StandardForm,
                              ts: Sequence[float] = (-10.0, -1.0, -0.1, 0.1, 1.0, 10.0),
                              tol_delta: float = 1e-10, tol_sigma: float = 1e-9) -> Verdict:
    """‖[T̂, Δ]‖ and max_t ‖T∘σ_t - σ_t∘T‖ over matrix units."""
    th = hat_map(T, sf)
    delta = sf.delta_superop()
    comm = float(np.linalg.norm(th @ delta - delta @ th, 2))
    units = matrix_units(sf.n)
    sig = 0.0
    for t in ts:
        left = T(sf.modular_automorphism(units, t))
        right = sf.modular_automorphism(T(units), t)
        sig = max(sig, float(np.max(np.linalg.norm(left - right, axis=(1, 2)))))
    passed = comm <= tol_delta and sig <= tol_sigma
    return Verdict("modular_commutation", passed, max(comm, sig),
                   {"delta_commutator": comm, "sigma_commutator": sig})


def check_j_selfadjoint(T: QuantumChannel, sf: StandardForm, tol: float = 1e-9) -> Verdict:
    """J T̂ J = T̂* (J v = K conj(v) with K a real permutation)."""
    th = hat_map(T, sf)
    k = sf.j_matrix()
    v = float(np.linalg.norm(k @ np.conj(th) @ k - dagger(th), 2))
    return Verdict("j_selfadjoint", v <= tol, v)


def check_omega_fixed(T: QuantumChannel, sf: StandardForm, tol: float = 1e-10) -> Verdict:
    th = hat_map(T, sf)
    om = sf.omega.reshape(-1)
    v = float(np.linalg.norm(th @ om - om))
    return Verdict("omega_fixed", v <= tol, v)


def check_kms_selfadjoint(T: QuantumChannel, sf: StandardForm, tol: float = 1e-9) -> Verdict:
    """ω(T(x) σ_{-i/2}(y)) = ω(σ_{i/2}(x) T(y)) over matrix units."""
    units = matrix_units(sf.n)
    half, mhalf = sf.power(0.5), sf.power(-0.5)
    sy = half @ units @ mhalf          # σ_{-i/2}(y)
    sx = mhalf @ units @ half          # σ_{i/2}(x)
    tx = sf.rho @ T(units)
    lhs = np.einsum("kij,lji->kl", tx, sy)
    rhs = np.einsum("kij,lji->kl", sf.rho @ sx, T(units))
    v = float(np.max(np.abs(lhs - rhs)))
    return Verdict("kms_selfadjoint", v <= tol, v)


# ---------------------------------------------------------------------------
# complete positivity through the matrix-level natural cones


def amplify(T: QuantumChannel, k: int) -> Callable[[np.ndarray], np.ndarray]:
    """T ⊗ id_k on M_n ⊗ M_k, with composite index (i, α) -> i*k + α."""
    n = T.n

    def apply(x: np.ndarray) -> np.ndarray:
        lead = x.shape[:-2]
        blocks = x.reshape(lead + (n, k, n, k))
        blocks = np.moveaxis(blocks, (-3, -1), (-4, -3))  # (..., k, k, n, n)
        out = T(blocks)
        out = np.moveaxis(out, (-4, -3), (-3, -1))
        return out.reshape(lead + (n * k, n * k))

    return apply


@dataclass
class CPReport:
    levels: dict[int, Verdict]
    choi_min_eig: float
    cp_by_choi: bool
    structure: dict[str, Verdict] = field(default_factory=dict)

    @property
    def cp_by_cones(self) -> bool:
        return all(v.passed for v in self.levels.values())

    @property
    def consistent(self) -> bool:
        return self.cp_by_cones == self.cp_by_choi

    def first_failing_level(self) -> int | None:
        for k in sorted(self.levels):
            if not self.levels[k].passed:
                return k
        return None


def _cone_generators(n: int, rng: np.random.Generator, samples: int) -> np.ndarray:
    """Positive matrices: random rank-one, random full-rank and the
    rank-one projections onto e_i ± e_j, e_i ± i e_j."""
    gens = []
    for _ in range(samples):
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        gens.append(np.outer(v, v.conj()))
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        gens.append(b @ dagger(b))
    for i in range(n):
        for j in range(i + 1, n):
            for ph in (1, -1, 1j, -1j):
                v = np.zeros(n, dtype=complex)
                v[i], v[j] = 1.0, ph
                gens.append(np.outer(v, v.conj()))
    return np.array(gens)


def cp_via_cones(T: QuantumChannel, sf: StandardForm, k_max: int = 3,
                 rng: np.random.Generator | None = None, samples: int = 100,
                 tol: float = 1e-9) -> CPReport:
    """Test (T ⊗ id_k)^ on the natural cone of M_n ⊗ M_k for k = 1..k_max.

    The state at level k is ω ⊗ tr_k/k; Choi positivity is the
    authoritative verdict the levels are compared against.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    structure = {
        "modular_commutation": check_modular_commutation(T, sf),
        "j_selfadjoint": check_j_selfadjoint(T, sf),
        "omega_fixed": check_omega_fixed(T, sf),
    }
    levels = {}
    for k in range(1, k_max + 1):
        sk = StandardForm(np.kron(sf.rho, np.eye(k) / k))
        amp = amplify(T, k)
        gens = sk.cone_generator(_cone_generators(sf.n * k, rng, samples))
        half, mhalf = sk.power(0.5), sk.power(-0.5)
        images = amp(gens @ mhalf) @ half
        qi = sk.power(-0.25)
        a = qi @ images @ qi
        herm = np.linalg.norm(a - dagger(a), axis=(1, 2))
        neg = np.clip(-min_eig(a), 0.0, None)
        scale = np.maximum(1.0, np.linalg.norm(a, axis=(1, 2)))
        v = float(np.max(np.maximum(herm, neg) / scale))
        levels[k] = Verdict(f"cone_level_{k}", v <= tol, v)
    ce = T.choi_min_eig()
    return CPReport(levels, ce, ce >= -tol, structure)


# ---------------------------------------------------------------------------
# fixtures


def schur_channel(sf: StandardForm, factors: np.ndarray) -> QuantumChannel:
    """Schur multiplier by m = F F* in the eigenbasis of ρ; Kraus U diag(F[:,k]) U*."""
    u = sf.evecs
    kraus = [u @ np.diag(factors[:, k]) @ dagger(u) for k in range(factors.shape[1])]
    return QuantumChannel.from_kraus(kraus)


def make_dbc_fixture(rng: np.random.Generator, n: int, rank: int | None = None,
                     spread: float = 5.0, max_tries: int = 10) -> tuple[QuantumChannel, StandardForm]:
    """Random faithful ρ and a unital Schur channel with real, PSD, unit-diagonal multiplier."""
    for _ in range(max_tries):
        sf = StandardForm(random_density(rng, n, spread=spread))
        r = n if rank is None else rank
        f = rng.normal(size=(n, r))
        f /= np.linalg.norm(f, axis=1, keepdims=True)
        T = schur_channel(sf, f)
        if check_dbc(T, sf):
            return T, sf
    raise RuntimeError("could not produce a DBC fixture")


def random_kraus_channel(rng: np.random.Generator, n: int, r: int = 3) -> QuantumChannel:
    """Generic unital CP map: Kraus maps rescaled so that Σ V* V = 1."""
    vs = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(r)]
    s = sum(dagger(v) @ v for v in vs)
    w, u = np.linalg.eigh(s)
    root = (u * w ** -0.5) @ dagger(u)
    return QuantumChannel.from_kraus([v @ root for v in vs])


def operator_norm_estimate(T: QuantumChannel, rng: np.random.Generator, samples: int = 200) -> float:
    """max ‖T(x)‖ over sampled Hermitian contractions (including ±1)."""
    n = T.n
    xs = [np.eye(n), -np.eye(n)]
    for _ in range(samples):
        u = random_unitary(rng, n)
        d = rng.choice([-1.0, 1.0], size=n) if rng.random() < 0.5 else rng.uniform(-1, 1, size=n)
        xs.append((u * d) @ dagger(u))
    imgs = T(np.array(xs))
    return float(max(np.linalg.norm(hermitian_part(y), 2) for y in imgs))


def replacement_channel(sigma: np.ndarray) -> QuantumChannel:
    """T(x) = Tr(σx)·1; Kraus V_ij = √s_j |u_j⟩⟨e_i| for σ = Σ s_j |u_j⟩⟨u_j|."""
    s, u = np.linalg.eigh(hermitian_part(np.asarray(sigma, dtype=complex)))
    n = len(s)
    kraus = []
    for j in range(n):
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            kraus.append(np.sqrt(max(s[j], 0.0)) * np.outer(u[:, j], e))
    return QuantumChannel.from_kraus(kraus)
