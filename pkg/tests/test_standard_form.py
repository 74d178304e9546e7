import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from qorlicz.linalg import dagger, hermitian_part, random_complex, random_density
from qorlicz.standard_form import StandardForm, cone_project, natural_cone_member, wedge

QUBIT = np.diag([2 / 3, 1 / 3])


def random_sf(seed, n=3):
    return StandardForm(random_density(np.random.default_rng(seed), n, spread=5.0))


def test_rejects_bad_states():
    with pytest.raises(ValueError):
        StandardForm(np.diag([1.0, 0.0]))
    with pytest.raises(ValueError):
        StandardForm(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        StandardForm(np.diag([0.5, 0.6]))


def test_modular_automorphism_examples(rng):
    sf = StandardForm(QUBIT)
    e12 = np.array([[0, 1], [0, 0]], dtype=complex)
    for t in [0.3, -1.7, 5.0]:
        assert np.allclose(sf.modular_automorphism(e12, t), 2 ** (1j * t) * e12, atol=1e-14)
    d = np.diag([3.0, -1.0]).astype(complex)
    assert np.allclose(sf.modular_automorphism(d, 2.2), d)
    sf3 = random_sf(1)
    x = random_complex(rng, (3, 3))
    s, t = 0.4, -1.3
    assert np.allclose(sf3.modular_automorphism(sf3.modular_automorphism(x, s), t),
                       sf3.modular_automorphism(x, s + t), atol=1e-12)


def test_delta_power_examples(rng):
    sf = random_sf(2)
    xi = random_complex(rng, (3, 3))
    assert np.allclose(sf.delta_power(xi, 0.0), xi, atol=1e-14)
    assert np.allclose(sf.delta_power(sf.delta_power(xi, 0.5), 0.5), sf.delta_power(xi, 1.0), atol=1e-12)
    # Δ^{it}(xΩ) = σ_t(x)Ω, two routes
    x = random_complex(rng, (3, 3))
    t = 0.77
    assert np.allclose(sf.delta_power(sf.gns(x), 1j * t), sf.gns(sf.modular_automorphism(x, t)), atol=1e-12)


def test_modular_invariants(rng):
    sf = random_sf(3)
    om = sf.omega
    assert np.allclose(sf.delta_power(om), om, atol=1e-12)
    assert np.allclose(sf.J(om), om)
    j = sf.j_matrix()
    d, dinv = sf.delta_superop(1.0), sf.delta_superop(-1.0)
    # J is antilinear: J A J acts as K conj(A) K
    assert np.linalg.norm(j @ d.conj() @ j - dinv) <= 1e-10 * np.linalg.norm(dinv)
    v = random_complex(rng, 9)
    assert np.allclose(j @ v.conj(), sf.J(v.reshape(3, 3)).reshape(-1))


def test_j_fixed_vectors_are_hermitian(rng):
    sf = random_sf(4)
    xi = random_complex(rng, (3, 3))
    assert not np.allclose(sf.J(xi), xi)
    h = hermitian_part(xi)
    assert np.array_equal(sf.J(h), dagger(h))
    assert np.allclose(sf.J(h), h)


def test_cone_membership_examples(rng):
    sf = random_sf(5)
    assert sf.cone_member(sf.omega)
    assert not sf.cone_member(-sf.omega)
    for _ in range(20):
        assert sf.cone_member(sf.random_cone_element(rng))
        assert natural_cone_member(sf.rho, sf.random_cone_element(rng, rank=1))


def test_cone_is_self_dual_on_samples(rng):
    sf = random_sf(6)
    p = np.array([sf.random_cone_element(rng, rank=1 + k % 3) for k in range(500)])
    q = np.array([sf.random_cone_element(rng, rank=1 + k % 3) for k in range(500)])
    inner = np.real(np.einsum("kij,kij->k", p.conj(), q))
    assert inner.min() >= -1e-10
    # a vector with nonnegative pairing against sampled rays is in the cone
    rays = np.array([sf.random_cone_element(rng, rank=1) for _ in range(2000)])
    for _ in range(20):
        xi = hermitian_part(random_complex(rng, (3, 3)))
        pair = np.real(np.einsum("kij,ij->k", rays.conj(), xi))
        if pair.min() >= 0:
            assert sf.cone_violation(xi) <= 1e-8
        if sf.cone_member(xi):
            assert pair.min() >= -1e-10


def test_projection_fixes_cone(rng):
    sf = random_sf(7)
    p = sf.random_cone_element(rng)
    assert np.allclose(sf.cone_project(p), p, atol=1e-12)


def test_projection_commutative_case(rng):
    sf = StandardForm(np.diag([0.5, 0.3, 0.2]))
    d = rng.normal(size=3)
    assert np.allclose(sf.cone_project(np.diag(d)), np.diag(np.maximum(d, 0)), atol=1e-14)


def brute_force_projection(xi, starts=6, rng=None):
    rng = np.random.default_rng(0) if rng is None else rng

    def build(z):
        L = np.array([[z[0], 0], [z[1] + 1j * z[2], z[3]]])
        return L @ dagger(L)

    def f(z):
        return np.linalg.norm(build(z) - xi) ** 2

    best = min((minimize(f, rng.normal(size=4), method="BFGS", options={"gtol": 1e-12}) for _ in range(starts)),
               key=lambda r: r.fun)
    return build(best.x)


def test_projection_matches_brute_force_on_qubits(rng):
    sf = StandardForm(QUBIT)
    for _ in range(10):
        xi = hermitian_part(random_complex(rng, (2, 2)))
        assert np.linalg.norm(sf.cone_project(xi) - brute_force_projection(xi, rng=rng)) <= 1e-6


def test_iterative_projection_agrees(rng):
    for seed in range(5):
        sf = random_sf(seed, 4)
        xi = hermitian_part(random_complex(rng, (4, 4)))
        assert np.linalg.norm(sf.cone_project_iterative(xi) - sf.cone_project(xi)) <= 1e-8


def test_wedge_examples(rng):
    sf = random_sf(8)
    v = hermitian_part(random_complex(rng, (3, 3)))
    u = v + sf.random_cone_element(rng)
    assert np.allclose(sf.wedge(u, v, "plus"), u, atol=1e-12)
    w = hermitian_part(random_complex(rng, (3, 3)))
    assert np.allclose(sf.wedge(w, np.zeros((3, 3)), "minus"), -sf.cone_project(-w), atol=1e-14)
    with pytest.raises(ValueError):
        sf.wedge(u, v, "sideways")
    # commutative case with v = 1: pointwise min
    sfd = StandardForm(np.diag([0.6, 0.4]))
    d = rng.normal(scale=2.0, size=2)
    assert np.allclose(sfd.wedge(np.diag(d), np.eye(2)), np.diag(np.minimum(d, 1.0)), atol=1e-14)
    assert np.allclose(wedge(sfd.rho, np.diag(d), np.eye(2)), np.diag(np.minimum(d, 1.0)), atol=1e-14)


herm_seed = st.integers(0, 2**32 - 1)


@given(seed=herm_seed)
def test_projection_moreau_decomposition(seed):
    rng = np.random.default_rng(seed)
    sf = random_sf(seed % 50)
    xi = hermitian_part(random_complex(rng, (3, 3)))
    p = sf.cone_project(xi)
    r = p - xi
    assert sf.cone_violation(p) <= 1e-10
    assert sf.cone_violation(r) <= 1e-10
    assert abs(np.vdot(r, p)) <= 1e-10 * max(1.0, np.linalg.norm(xi) ** 2)


@given(seed=herm_seed)
def test_projection_idempotent_and_nonexpansive(seed):
    rng = np.random.default_rng(seed)
    sf = random_sf(seed % 50)
    a = hermitian_part(random_complex(rng, (3, 3)))
    b = hermitian_part(random_complex(rng, (3, 3)))
    pa = sf.cone_project(a)
    assert np.allclose(sf.cone_project(pa), pa, atol=1e-12)
    assert np.linalg.norm(pa - sf.cone_project(b)) <= np.linalg.norm(a - b) + 1e-8


@given(seed=herm_seed)
def test_generated_elements_in_cone(seed):
    rng = np.random.default_rng(seed)
    sf = random_sf(seed % 50, 4)
    b = random_complex(rng, (4, 2))
    assert sf.cone_member(sf.cone_generator(b @ dagger(b)))
    assert np.allclose(cone_project(sf.rho, sf.cone_generator(b @ dagger(b))), sf.cone_generator(b @ dagger(b)))
