"""The thirteen acceptance criteria as plain functions.

Each returns a :class:`CriterionResult`; the pytest suite and ``qorlicz report``
both call :func:`run_all`.  Randomness is seeded per criterion.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from . import channels as ch
from . import crossed as cr
from . import dirichlet as di
from . import lp
from .linalg import dagger, random_density
from .orlicz import (ds_bound_check, embedding_inequality_check, fundamental_closed_form,
                     fundamental_function, fundamental_indices, dilation_function, luxemburg_norm)
from .rearrangement import StepFunction, WeightedTraceAlgebra, mu, mu_by_distribution
from .standard_form import StandardForm
from .young import Indicator, Power, builtin, complementary, equivalent


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"[{status}] criterion {self.number:2d} {self.name}: {shown} ({self.seconds:.1f}s)"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _rng(seed: int, number: int) -> np.random.Generator:
    return np.random.default_rng([seed, number])


# ---------------------------------------------------------------------------


def psi_e_example(seed: int = 0) -> CriterionResult:
    """Fundamental function, dilation function and indices of Ψ_e."""
    start = time.perf_counter()
    phi = builtin("psi_e")
    t = np.logspace(-6, 3, 400)
    with np.errstate(divide="ignore"):
        closed = np.where(t >= math.e ** -2, 0.5 * math.e * np.sqrt(t), 1.0 / -np.log(t))
    fund_err = float(np.max(np.abs(fundamental_function(phi, t) / closed - 1)))
    s = np.logspace(-4, 4, 81)
    dil_err = float(np.max(np.abs(dilation_function(phi, s) / np.maximum(1.0, np.sqrt(s)) - 1)))
    idx = fundamental_indices(phi)
    fast = time.perf_counter() - start < 10
    ok = (fund_err <= 1e-6 and dil_err <= 1e-4
          and abs(idx.lower - 0.0) <= 0.02 and abs(idx.upper - 0.5) <= 0.02 and fast)
    return CriterionResult(1, "psi_e fundamental function and indices", ok,
                           {"fundamental_rel_err": fund_err, "dilation_rel_err": dil_err,
                            "lower": idx.lower, "upper": idx.upper, "under_10s": fast})


def psi_e_cosh_equivalence(seed: int = 0) -> CriterionResult:
    """Ψ_e ≈ cosh - 1 with witnesses, and the norm ratio inside the witness band."""
    rng = _rng(seed, 2)
    pe, ch1 = builtin("psi_e"), builtin("cosh_minus_one")
    res = equivalent(pe, ch1)
    violations = 0
    lo, hi = math.inf, 0.0
    for _ in range(100):
        k = int(rng.integers(1, 8))
        f = StepFunction(np.exp(rng.normal(scale=2.0, size=k)), np.exp(rng.normal(scale=2.0, size=k)))
        r = luxemburg_norm(f, ch1) / luxemburg_norm(f, pe)
        lo, hi = min(lo, r), max(hi, r)
        # ‖f‖_cosh <= b1 ‖f‖_Ψe and ‖f‖_Ψe <= b2 ‖f‖_cosh
        violations += not (1.0 / res.b2 * (1 - 1e-9) <= r <= res.b1 * (1 + 1e-9))
    return CriterionResult(2, "psi_e ~ cosh-1 with norm-level witnesses", bool(res) and violations == 0,
                           {"equivalent": bool(res), "b1": res.b1, "b2": res.b2,
                            "ratio_min": lo, "ratio_max": hi, "violations": violations})


def index_duality(seed: int = 0) -> CriterionResult:
    """β̲(Ψ*) = 1 - β̄(Ψ) (Orlicz norm on the conjugate side)."""
    cases = {"psi_e": builtin("psi_e"), "power_4/3": Power(4 / 3), "power_2": Power(2.0),
             "power_4": Power(4.0)}
    worst = 0.0
    metrics = {}
    for name, phi in cases.items():
        up = fundamental_indices(phi).upper
        low_star = fundamental_indices(complementary(phi), "orlicz").lower
        gap = abs(low_star - (1 - up))
        worst = max(worst, gap)
        metrics[name] = gap
    metrics["worst_gap"] = worst
    return CriterionResult(3, "index duality", worst <= 0.02, metrics)


def ds_bound(seed: int = 0) -> CriterionResult:
    rho = np.diag([2 / 3, 1 / 3]).astype(complex)
    rep = ds_bound_check(rho, builtin("psi_e"), np.linspace(-10.0, 0.0, 101))
    return CriterionResult(4, "d_s operator bound", rep.passed,
                           {"exponent": rep.exponent, "worst_rel_excess": rep.worst_excess})


def embedding(seed: int = 0) -> CriterionResult:
    rep = embedding_inequality_check(builtin("psi_e"), samples=200, rng=_rng(seed, 5))
    return CriterionResult(5, "L1+Linf embedding inequality", rep.violations == 0,
                           {"C": rep.constant, "t0": rep.t0, "worst_ratio": rep.worst_ratio,
                            "violations": rep.violations})


def dbc_suite(seed: int = 0, fixtures: int = 50) -> CriterionResult:
    rng = _rng(seed, 6)
    worst = {"dbc": 0.0, "state": 0.0, "delta": 0.0, "sigma": 0.0}
    for k in range(fixtures):
        n = 2 + k % 5
        T, sf = ch.make_dbc_fixture(rng, n)
        worst["dbc"] = max(worst["dbc"], ch.check_dbc(T, sf).violation)
        worst["state"] = max(worst["state"], ch.check_state_invariance(T, sf).violation)
        mc = ch.check_modular_commutation(T, sf)
        worst["delta"] = max(worst["delta"], mc.detail["delta_commutator"])
        worst["sigma"] = max(worst["sigma"], mc.detail["sigma_commutator"])
    ok = worst["dbc"] <= 1e-9 and worst["state"] <= 1e-10 and worst["delta"] <= 1e-10 and worst["sigma"] <= 1e-9
    return CriterionResult(6, "DBC fixtures and consequences", ok, {"fixtures": fixtures, **worst})


def t2_identity(seed: int = 0, fixtures: int = 10) -> CriterionResult:
    rng = _rng(seed, 7)
    worst_id, worst_norm = 0.0, 0.0
    for k in range(fixtures):
        n = 2 + k % 5
        T, sf = ch.make_dbc_fixture(rng, n)
        worst_id = max(worst_id, lp.t2_identity_check(T, sf, rng, samples=100).worst)
        for p in (1.0, 4 / 3, 2.0, 4.0):
            worst_norm = max(worst_norm, lp.superop_pnorm(lp.T_p(T, sf, p), p, rng))
    ok = worst_id <= 1e-8 and worst_norm <= 1 + 1e-6
    return CriterionResult(7, "T^(2) identity and L^p contractivity", ok,
                           {"identity_dev": worst_id, "max_pnorm": worst_norm})


def cp_separation(seed: int = 0, fixtures: int = 10) -> CriterionResult:
    rng = _rng(seed, 8)
    sf2 = StandardForm(np.eye(2) / 2)
    rep = ch.cp_via_cones(ch.QuantumChannel.transpose(2), sf2, k_max=3, rng=rng, samples=200)
    transpose_ok = rep.levels[1].passed and not rep.levels[2].passed and not rep.cp_by_choi
    fixtures_ok = True
    for k in range(fixtures):
        T, sf = ch.make_dbc_fixture(rng, 2 + k % 3)
        r = ch.cp_via_cones(T, sf, k_max=3, rng=rng, samples=200)
        fixtures_ok &= r.cp_by_cones and r.cp_by_choi
    return CriterionResult(8, "CP versus positivity through cones", transpose_ok and fixtures_ok,
                           {"transpose_level1": rep.levels[1].passed,
                            "transpose_level2": rep.levels[2].passed,
                            "transpose_choi_min": rep.choi_min_eig, "fixtures_cp": fixtures_ok})


def kms_modular(seed: int = 0) -> CriterionResult:
    rng = _rng(seed, 9)
    worst_sigma = math.inf
    ident_ok = True
    for n in (2, 3, 4):
        sf = StandardForm(random_density(rng, n))
        v = ch.check_kms_selfadjoint(ch.modular_channel(sf, 1.0), sf)
        worst_sigma = min(worst_sigma, v.violation if not v.passed else 0.0)
        ident_ok &= ch.check_kms_selfadjoint(ch.QuantumChannel.identity(n), sf).passed
    return CriterionResult(9, "modular flow is not KMS-symmetric", worst_sigma > 1e-3 and ident_ok,
                           {"min_sigma1_violation": worst_sigma, "identity_passes": ident_ok})


CROSSED_CONFIGS = ((4, (0, 1)), (4, (0, 1, 2, 3)), (8, (0, 1, 3)), (8, (0, 2, 5, 7)))


def crossed_suite(seed: int = 0) -> CriterionResult:
    rng = _rng(seed, 10)
    start = time.perf_counter()
    rel = inv = mod = 0.0
    for N, ex in CROSSED_CONFIGS:
        state = cr.PeriodicState(0.5, N, ex)
        cp = cr.CrossedProduct(state)
        n = state.n
        f = rng.normal(size=(n, n))
        f /= np.linalg.norm(f, axis=1, keepdims=True)
        T = ch.schur_channel(state.sf, f)
        rel = max(rel, *cp.relation_defects(rng).values())
        inv = max(inv, cr.trace_invariance_check(cp, T, rng, 200))
        mod = max(mod, cr.module_property_check(cp, T))
    elapsed = time.perf_counter() - start
    ok = rel <= 1e-12 and inv <= 1e-9 and mod <= 1e-10 and elapsed < 60
    return CriterionResult(10, "crossed-product relations, trace invariance, module property", ok,
                           {"relations": rel, "trace_invariance": inv, "module": mod,
                            "under_60s": elapsed < 60})


def kraus_mu(seed: int = 0) -> CriterionResult:
    rng = _rng(seed, 11)
    rep = cr.mu_bound_suite(WeightedTraceAlgebra(((4, 1.0),)), rng, samples=200, count=3)
    ok = rep.violations == 0 and rep.lipschitz_violations == 0
    return CriterionResult(11, "Kraus singular-value bound", ok,
                           {"violations": rep.violations, "lipschitz_violations": rep.lipschitz_violations,
                            "dilated_violations": rep.dilated_violations, "worst_excess": rep.worst_excess})


def dirichlet_markov(seed: int = 0, fixtures: int = 10) -> CriterionResult:
    rng = _rng(seed, 12)
    pos = neg = 0
    worst = 0.0
    for k in range(fixtures):
        n = 2 + k % 3
        sg, sf = di.dbc_semigroup_fixture(rng, n)
        r = di.equivalence_test(sg, sf, "minus", rng, samples=500)
        pos += r.markov and r.dirichlet
        worst = max(worst, r.worst_violation)
        sg, sf = di.perturbed_fixture(rng, n, 0.1)
        r = di.equivalence_test(sg, sf, "minus", rng, samples=500)
        neg += (not r.markov) and (not r.dirichlet)
    return CriterionResult(12, "Dirichlet form iff Markov semigroup", pos == fixtures and neg == fixtures,
                           {"positives_passing": pos, "negatives_failing": neg,
                            "worst_positive_violation": worst})


def _brute_force_projection(sf: StandardForm, xi: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """min ‖ξ - ρ^{1/4} L L* ρ^{1/4}‖ over complex L by multistart BFGS."""
    n = sf.n
    q = sf.power(0.25)

    def build(z):
        L = (z[: n * n] + 1j * z[n * n:]).reshape(n, n)
        return q @ L @ dagger(L) @ q

    def f(z):
        return float(np.linalg.norm(xi - build(z)) ** 2)

    best = None
    for _ in range(8):
        res = minimize(f, rng.normal(size=2 * n * n), method="BFGS", options={"gtol": 1e-12})
        if best is None or res.fun < best.fun:
            best = res
    return build(best.x)


def oracles(seed: int = 0) -> CriterionResult:
    rng = _rng(seed, 13)
    alg = WeightedTraceAlgebra(((2, 1.0), (3, 0.5)))
    mu_err = 0.0
    for _ in range(50):
        a = alg.random_element(rng)
        f = mu(a, alg)
        ts = np.concatenate([f.breakpoints - 1e-9, f.breakpoints, rng.uniform(0, f.support + 1, 20)])
        ts = ts[ts >= 0]
        mu_err = max(mu_err, float(np.max(np.abs(f(ts) - mu_by_distribution(a, alg, ts)))))
    lux_err = 0.0
    for phi in (builtin("psi_e"), builtin("cosh_minus_one"), Power(1.5), Power(3.0), Indicator(1.0)):
        for t in np.logspace(-4, 3, 15):
            got = luxemburg_norm(StepFunction([1.0], [t]), phi)
            want = float(fundamental_closed_form(phi, t))
            lux_err = max(lux_err, abs(got / want - 1))
    cone_err = 0.0
    for _ in range(5):
        sf = StandardForm(random_density(rng, 2))
        xi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        xi = 0.5 * (xi + dagger(xi))
        cone_err = max(cone_err, float(np.linalg.norm(sf.cone_project(xi) - _brute_force_projection(sf, xi, rng))))
    ok = mu_err == 0.0 and lux_err <= 1e-9 and cone_err <= 1e-6
    return CriterionResult(13, "oracle cross-checks", ok,
                           {"mu_err": mu_err, "luxemburg_rel_err": lux_err, "cone_err": cone_err})


CRITERIA: tuple[Callable[..., CriterionResult], ...] = (
    psi_e_example, psi_e_cosh_equivalence, index_duality, ds_bound, embedding, dbc_suite,
    t2_identity, cp_separation, kms_modular, crossed_suite, kraus_mu, dirichlet_markov, oracles,
)


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    fn = CRITERIA[number - 1]
    start = time.perf_counter()
    res = fn(seed)
    res.seconds = time.perf_counter() - start
    return res


def run_all(seed: int = 0) -> list[CriterionResult]:
    return [run_criterion(k, seed) for k in range(1, len(CRITERIA) + 1)]
