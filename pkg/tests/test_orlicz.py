import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qorlicz.orlicz import (ds_bound_check, ds_operator, dilation_function, embedding_inequality_check,
                            fundamental_closed_form, fundamental_function, fundamental_indices,
                            luxemburg_norm, orlicz_amemiya_norm)
from qorlicz.rearrangement import StepFunction, WeightedTraceAlgebra
from qorlicz.young import Power, builtin, complementary, evaluate, inverse

E = math.e
NAMES = ["psi_e", "cosh_minus_one", "l_log_l_plus_one", "zygmund_llogl", "zygmund_exp"]


def indicator(t):
    return StepFunction.from_pairs([(1.0, t)])


def random_step(rng, k=None):
    k = int(rng.integers(1, 7)) if k is None else k
    return StepFunction(rng.exponential(2.0, k), rng.exponential(0.7, k))


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
def test_luxemburg_unit_indicator_power(p):
    assert luxemburg_norm(indicator(1.0), Power(p)) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("name", NAMES + ["power"])
def test_luxemburg_indicator_closed_form(name):
    phi = Power(2.5) if name == "power" else builtin(name)
    for t in np.logspace(-5, 3, 17):
        assert luxemburg_norm(indicator(t), phi) == pytest.approx(
            float(fundamental_closed_form(phi, t)), rel=1e-9)


def test_luxemburg_psi_e_at_branch_point():
    assert luxemburg_norm(indicator(E**-2), builtin("psi_e")) == pytest.approx(0.5, rel=1e-12)


def test_luxemburg_of_matrix_uses_rearrangement(rng):
    alg = WeightedTraceAlgebra(((3, 0.5), (2, 2.0)))
    a = alg.random_element(rng)
    from qorlicz.rearrangement import mu

    assert luxemburg_norm(a, Power(2.0), alg) == pytest.approx(
        luxemburg_norm(mu(a, alg), Power(2.0)), rel=1e-14)
    # Φ = t²: Luxemburg norm is the weighted Hilbert-Schmidt norm
    hs = math.sqrt(sum(w * np.linalg.norm(b) ** 2 for (_, w), b in zip(alg.blocks, a.blocks)))
    assert luxemburg_norm(a, Power(2.0), alg) == pytest.approx(hs, rel=1e-12)


def test_amemiya_frozen_values():
    # inf_k (1 + k²)/k = 2 at k = 1; inf_k (1 + k²/2)/k = √2 at k = √2
    assert orlicz_amemiya_norm(indicator(1.0), Power(2.0)) == pytest.approx(2.0, rel=1e-10)
    assert orlicz_amemiya_norm(indicator(1.0), Power(2.0, 0.5)) == pytest.approx(1.4142135623730950, rel=1e-10)


def test_norms_of_zero():
    z = StepFunction.from_pairs([])
    assert luxemburg_norm(z, builtin("psi_e")) == 0.0
    assert orlicz_amemiya_norm(z, builtin("psi_e")) == 0.0


@pytest.mark.parametrize("name", ["psi_e", "cosh_minus_one", "l_log_l_plus_one"])
def test_luxemburg_amemiya_sandwich(name, rng):
    phi = builtin(name)
    for _ in range(100):
        f = random_step(rng)
        lux, am = luxemburg_norm(f, phi), orlicz_amemiya_norm(f, phi)
        assert lux * (1 - 1e-9) <= am <= 2 * lux * (1 + 1e-9)


def test_fundamental_examples():
    psi = builtin("psi_e")
    assert fundamental_function(psi, 1.0) == pytest.approx(E / 2, rel=1e-12)
    assert fundamental_function(psi, E**-4) == pytest.approx(0.25, rel=1e-12)
    t = np.logspace(-4, 4, 9)
    assert np.allclose(fundamental_function(Power(3.0), t), t ** (1 / 3), rtol=1e-12)
    assert fundamental_function(psi, 0.0) == 0.0
    with pytest.raises(ValueError):
        fundamental_function(psi, -1.0)


@pytest.mark.parametrize("name", ["psi_e", "cosh_minus_one", "power"])
def test_orlicz_fundamental_via_conjugate_inverse(name):
    # ‖χ_E‖ in the Orlicz norm equals t (Φ*)^{-1}(1/t)
    phi = Power(3.0) if name == "power" else builtin(name)
    conj = complementary(phi)
    t = np.logspace(-4, 4, 17)
    assert np.allclose(fundamental_function(phi, t, "orlicz"), t * inverse(conj, 1 / t), rtol=1e-7)


@pytest.mark.parametrize("name", ["psi_e", "cosh_minus_one", "power"])
def test_fundamental_duality(name):
    phi = Power(1.5) if name == "power" else builtin(name)
    conj = complementary(phi)
    t = np.logspace(-4, 4, 17)
    prod = fundamental_function(phi, t) * fundamental_function(conj, t, "orlicz")
    assert np.allclose(prod, t, rtol=1e-7)


def test_dilation_examples():
    psi = builtin("psi_e")
    assert dilation_function(psi, 4.0) == pytest.approx(2.0, rel=1e-4)
    assert dilation_function(psi, 0.5) == pytest.approx(1.0, rel=1e-4)
    s = np.logspace(-3, 3, 13)
    assert np.allclose(dilation_function(Power(4.0), s), s ** 0.25, rtol=1e-6)
    with pytest.raises(ValueError):
        dilation_function(psi, 0.0)


@pytest.mark.parametrize("name", ["psi_e", "cosh_minus_one", "l_log_l_plus_one"])
def test_dilation_submultiplicative(name):
    phi = builtin(name)
    s = np.logspace(-3, 3, 9)
    m = dilation_function(phi, s)
    prod = dilation_function(phi, np.outer(s, s).ravel()).reshape(len(s), len(s))
    assert np.all(prod <= np.outer(m, m) * (1 + 1e-6))


def test_indices_psi_e():
    idx = fundamental_indices(builtin("psi_e"))
    assert abs(idx.lower) <= 0.02 and abs(idx.upper - 0.5) <= 0.02


@pytest.mark.parametrize("p", [4 / 3, 2.0, 4.0])
def test_indices_power(p):
    idx = fundamental_indices(Power(p))
    assert idx.lower == pytest.approx(1 / p, abs=0.02) and idx.upper == pytest.approx(1 / p, abs=0.02)


def test_index_duality_psi_e():
    psi = builtin("psi_e")
    conj = complementary(psi)
    lower_star = fundamental_indices(conj, "orlicz").lower
    assert lower_star == pytest.approx(1 - fundamental_indices(psi).upper, abs=0.02)
    assert lower_star == pytest.approx(0.5, abs=0.02)


def test_ds_scalar_and_identity():
    rho = np.array([[1.0]])
    for s in [-5.0, -1.0, -0.1]:
        assert ds_operator(rho, Power(2.0), s)[0, 0] == pytest.approx(math.exp(s / 2), rel=1e-8)
    r2 = np.diag([2 / 3, 1 / 3])
    assert np.allclose(ds_operator(r2, builtin("psi_e"), 0.0), np.eye(2), atol=1e-12)


def test_ds_bound_psi_e():
    rep = ds_bound_check(np.diag([2 / 3, 1 / 3]), builtin("psi_e"), np.linspace(-10, 0, 41))
    assert rep.passed
    assert rep.exponent == pytest.approx(0.375, abs=0.02)


def test_embedding_power_two():
    rep = embedding_inequality_check(Power(2.0), samples=200, rng=np.random.default_rng(3))
    assert rep.violations == 0
    # a unit indicator has ratio 1
    f = indicator(1.0)
    from qorlicz.rearrangement import l1_linf_norm, lambda_infty_quasinorm

    assert l1_linf_norm(f) / lambda_infty_quasinorm(f) == 1.0 <= rep.constant


def test_embedding_ratio_is_unbounded_off_homogeneous_profiles():
    # the ratio is scale invariant, so the unit ball alone cannot bound it
    from qorlicz.rearrangement import l1_linf_norm, lambda_infty_quasinorm

    phi = builtin("psi_e")
    rep = embedding_inequality_check(phi, samples=5)
    t = np.logspace(-12, 0, 400)
    f = StepFunction(1 / t, np.diff(np.concatenate([[0.0], t])))
    f = f.scaled(0.5 / luxemburg_norm(f, phi))
    assert l1_linf_norm(f) / lambda_infty_quasinorm(f) > 5 * rep.constant


def test_embedding_requires_upper_index_below_one():
    with pytest.raises(ValueError):
        embedding_inequality_check(Power(1.0), samples=1)


step_strategy = st.lists(st.tuples(st.floats(0.01, 20.0), st.floats(0.01, 5.0)), min_size=1, max_size=5)


@given(pairs=step_strategy, c=st.floats(0.01, 100.0), name=st.sampled_from(["psi_e", "cosh_minus_one"]))
def test_luxemburg_homogeneous(pairs, c, name):
    phi = builtin(name)
    f = StepFunction.from_pairs(pairs)
    assert luxemburg_norm(f.scaled(c), phi) == pytest.approx(c * luxemburg_norm(f, phi), rel=1e-9)


@given(pairs=step_strategy, bump=st.floats(1.0, 3.0))
def test_luxemburg_monotone(pairs, bump):
    phi = builtin("psi_e")
    f = StepFunction.from_pairs(pairs)
    g = StepFunction(f.values * bump, f.widths)
    assert luxemburg_norm(f, phi) <= luxemburg_norm(g, phi) * (1 + 1e-12)


@given(pairs=step_strategy)
def test_luxemburg_unit_modular(pairs):
    phi = builtin("cosh_minus_one")
    f = StepFunction.from_pairs(pairs)
    lam = luxemburg_norm(f, phi)
    modular = float(np.sum(f.widths * evaluate(phi, f.values / lam)))
    assert modular == pytest.approx(1.0, rel=1e-8)
