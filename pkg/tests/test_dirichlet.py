import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qorlicz.channels import hat_map, make_dbc_fixture
from qorlicz.dirichlet import (T_GRID, MarkovSemigroup, QuadraticForm, dbc_semigroup_fixture,
                               diagonal_mixing_direction, equivalence_test, generator_decomposition,
                               hermitian_conjugation_J0, is_dirichlet_form, is_J0_selfadjoint, is_J_real,
                               is_markovian_map, perturbed_fixture, real_samples)
from qorlicz.linalg import dagger, hermitian_part, random_complex, random_density
from qorlicz.standard_form import StandardForm


def random_sf(rng, n=3):
    return StandardForm(random_density(rng, n, spread=5.0))


def omega_projection(sf):
    om = sf.omega.reshape(-1)
    return np.outer(om, om.conj())


def test_grid():
    assert T_GRID == (0.01, 0.1, 1.0, 10.0)


def test_j_real_examples(rng):
    sf = random_sf(rng)
    assert is_J_real(QuadraticForm(np.eye(9)), sf, rng)
    h = hermitian_part(random_complex(rng, (9, 9)))
    v = is_J_real(QuadraticForm(1j * h), sf, rng)
    assert not v and v.violation > 1e-3
    sg, sf2 = dbc_semigroup_fixture(rng, 3)
    assert is_J_real(sg.form, sf2, rng)


def j_commuting_hermitian(rng, k):
    b = hermitian_part(random_complex(rng, (9, 9)))
    return 0.5 * (b + k @ b.conj() @ k)


def test_j0_selfadjoint_examples(rng):
    sf = random_sf(rng)
    k = sf.j_matrix()
    b = j_commuting_hermitian(rng, k)
    assert is_J0_selfadjoint(b, k)
    assert is_J0_selfadjoint(1j * b, k)
    assert not is_J0_selfadjoint(random_complex(rng, (9, 9)), k)
    bad = is_J0_selfadjoint(np.eye(9), 2 * k)
    assert not bad and bad.detail["reason"] == "J0 is not an involution"


def test_hermitian_conjugation_is_an_involution(rng):
    sf = random_sf(rng)
    m = hermitian_conjugation_J0(sf)
    assert np.linalg.norm(m @ m.conj() - np.eye(9)) <= 1e-10
    x = random_complex(rng, (3, 3))
    # J0(xΩ) = x*Ω
    assert np.allclose((m @ sf.gns(x).reshape(-1).conj()).reshape(3, 3), sf.gns(dagger(x)), atol=1e-12)


def test_markovian_map_examples(rng):
    sf = random_sf(rng)
    assert is_markovian_map(np.eye(9), sf, rng)
    assert not is_markovian_map(-np.eye(9), sf, rng)
    sg = MarkovSemigroup(np.eye(9) - omega_projection(sf))
    for t in T_GRID:
        assert is_markovian_map(sg.at(t), sf, rng)


def test_dirichlet_form_examples(rng):
    sf = random_sf(rng)
    assert is_dirichlet_form(QuadraticForm(np.eye(9) - omega_projection(sf)), sf, rng=rng)
    norm_sq = QuadraticForm(np.eye(9))
    minus = is_dirichlet_form(norm_sq, sf, "minus", rng)
    plus = is_dirichlet_form(norm_sq, sf, "plus", rng)
    # ‖ξ∧Ω‖ <= ‖ξ‖ only for the projection onto Ω - P, which contains 0
    assert minus.passed
    assert not plus.passed and plus.violation > 0.1
    h = hermitian_part(random_complex(rng, (9, 9)))
    v = is_dirichlet_form(QuadraticForm(np.eye(9) + 3j * h), sf, rng=rng)
    assert not v and v.detail["reason"] == "form is not J-real"


def test_diagonal_heat_kernel_without_damping_is_not_markov():
    # a graph Laplacian on the eigenbasis-diagonal that leaves coherences untouched:
    # a PSD ξ with |ξ_12|² = ξ_11 ξ_22 loses positivity as soon as ξ_11 shrinks
    sf = StandardForm(np.diag([0.5, 0.3, 0.2]))
    w = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], dtype=float)
    lap = np.diag(w.sum(1)) - w
    sg = MarkovSemigroup(diagonal_mixing_direction(sf, lap))
    rep = equivalence_test(sg, sf, rng=np.random.default_rng(0))
    assert not rep.markov and not rep.dirichlet and rep.agree


def test_equivalence_on_fixtures_and_negatives(rng):
    for _ in range(3):
        sg, sf = dbc_semigroup_fixture(rng, 3)
        rep = equivalence_test(sg, sf, rng=rng)
        assert rep.markov and rep.dirichlet and rep.agree
        neg, sfn = perturbed_fixture(rng, 3)
        rep = equivalence_test(neg, sfn, rng=rng)
        assert not rep.markov and not rep.dirichlet and rep.agree
    assert set(rep.to_dict()) == {"markov", "dirichlet", "convention", "worst_violation"}


def test_real_samples_are_hermitian(rng):
    sf = random_sf(rng, 4)
    xi = real_samples(sf, rng, 500)
    assert xi.shape == (500, 4, 4)
    assert np.allclose(xi, np.conj(np.swapaxes(xi, 1, 2)))


def test_generator_decomposition_examples(rng):
    h = hermitian_part(random_complex(rng, (4, 4)))
    dec = generator_decomposition(-1j * h)
    assert np.allclose(dec.D, 0) and np.allclose(dec.H, h) and dec.h_selfadjoint
    b = random_complex(rng, (4, 4))
    d = b @ dagger(b)
    dec = generator_decomposition(d)
    assert np.allclose(dec.H, 0) and np.allclose(dec.D, d) and dec.d_positive
    sg, _ = dbc_semigroup_fixture(rng, 3)
    dec = generator_decomposition(sg.A)
    assert dec.d_positive and dec.residual <= 1e-14


def test_j0_consistency_for_fixtures(rng):
    for _ in range(10):
        T, sf = make_dbc_fixture(rng, 3)
        a = np.eye(9) - hat_map(T, sf)
        delta = sf.delta_superop()
        assert is_J0_selfadjoint(a, sf.j_matrix())
        assert np.linalg.norm(a @ delta - delta @ a) <= 1e-10
        assert np.linalg.norm(a - dagger(a)) <= 1e-9
        # the Hermitian-conjugation involution passes for these fixtures too
        assert is_J0_selfadjoint(a, hermitian_conjugation_J0(sf))


@given(seed=st.integers(0, 2**32 - 1))
def test_semigroup_law(seed):
    rng = np.random.default_rng(seed)
    sg, _ = dbc_semigroup_fixture(rng, 3)
    for s in T_GRID:
        for t in T_GRID:
            assert np.linalg.norm(sg.at(s) @ sg.at(t) - sg.at(s + t)) <= 1e-10


@given(seed=st.integers(0, 2**32 - 1))
def test_form_lower_bound(seed):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, (9, 9))
    form = QuadraticForm(a)
    xi = random_complex(rng, (1000, 3, 3))
    vals = np.real(form(xi))
    norms = np.linalg.norm(xi, axis=(1, 2)) ** 2
    assert np.all(vals >= form.lower_bound * norms - 1e-10)
