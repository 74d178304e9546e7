"""Command-line front end.

Exit codes: 0 all checks passed, 1 a check failed, 2 bad input,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import acceptance, channels as ch, crossed as cr, dirichlet as di, lp
from .io import (InputError, decode_matrix, dumps, load_json, parse_algebra, parse_channel,
                 parse_crossed, parse_state, parse_young, to_jsonable)
from .linalg import ConvergenceError
from .orlicz import (dilation_function, fundamental_function, fundamental_indices,
                     luxemburg_norm, orlicz_amemiya_norm)
from .rearrangement import StepFunction, WeightedTraceAlgebra, mu
from .young import complementary, equivalent

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# input helpers


def _json_arg(value: str) -> Any:
    """A path to a JSON file, an inline JSON document, or a bare name."""
    text = value.strip()
    if not text.startswith(("{", "[")) and Path(value).is_file():
        return load_json(value)
    if text.startswith(("{", "[")):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad inline JSON: {exc}") from exc
    return value


def _young(value: str):
    return parse_young(_json_arg(value))


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from exc


def _steps(text: str) -> StepFunction:
    """'value:width,value:width,...'"""
    try:
        pairs = [tuple(float(y) for y in item.split(":")) for item in text.split(",") if item.strip()]
        return StepFunction.from_pairs(pairs)
    except ValueError as exc:
        raise InputError(f"steps must look like 'v:w,v:w': {exc}") from exc


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed)


# ---------------------------------------------------------------------------
# commands; each returns a report dict with a 'passed' flag and optional 'table'


def cmd_young(args) -> dict:
    report: dict[str, Any] = {"action": args.action}
    if args.action == "eval":
        phi = _young(args.spec)
        t = np.array(_floats(args.t))
        vals = np.asarray(phi(t), dtype=float)
        inv = np.asarray(phi.inverse(t), dtype=float)
        report.update(spec=phi.spec(), values=dict(zip(map(repr, t.tolist()), vals.tolist())))
        report["table"] = {"columns": ["t", "value", "inverse"],
                           "rows": [[a, b, c] for a, b, c in zip(t.tolist(), vals.tolist(), inv.tolist())]}
    elif args.action == "conjugate":
        phi = _young(args.spec)
        conj = complementary(phi)
        u = np.array(_floats(args.t))
        vals = np.asarray(conj(u), dtype=float)
        report.update(spec=phi.spec(), conjugate=conj.spec(), finite_until=getattr(conj, "finite_until", None))
        report["table"] = {"columns": ["u", "conjugate"], "rows": [[a, b] for a, b in zip(u.tolist(), vals.tolist())]}
    elif args.action == "equiv":
        a, b = _young(args.a), _young(args.b)
        res = equivalent(a, b)
        report.update(a=a.spec(), b=b.spec(), verdict="EQUIVALENT" if res else "NOT EQUIVALENT",
                      equivalent=res.equivalent, b1=res.b1, b2=res.b2,
                      inconclusive=res.inconclusive, diverging=res.diverging)
    elif args.action == "indices":
        phi = _young(args.spec)
        idx = fundamental_indices(phi, args.norm)
        report.update(spec=phi.spec(), norm=args.norm, lower=idx.lower, upper=idx.upper,
                      lower_spread=idx.lower_spread, upper_spread=idx.upper_spread)
    elif args.action == "fundamental":
        phi = _young(args.spec)
        t = np.logspace(-6, 6, args.points)
        report.update(spec=phi.spec(), norm=args.norm)
        report["table"] = {"columns": ["t", "fundamental"],
                           "rows": [[a, b] for a, b in zip(t.tolist(), fundamental_function(phi, t, args.norm).tolist())]}
    elif args.action == "dilation":
        phi = _young(args.spec)
        s = np.logspace(-4, 4, args.points)
        report.update(spec=phi.spec(), norm=args.norm)
        report["table"] = {"columns": ["s", "dilation"],
                           "rows": [[a, b] for a, b in zip(s.tolist(), dilation_function(phi, s, args.norm).tolist())]}
    report["passed"] = True
    return report


def cmd_norm(args) -> dict:
    phi = _young(args.spec)
    if args.steps:
        f = _steps(args.steps)
    else:
        if not (args.algebra and args.element):
            raise InputError("give --steps, or both --algebra and --element")
        alg = parse_algebra(_json_arg(args.algebra))
        el = _json_arg(args.element)
        if not isinstance(el, dict) or set(el) != {"blocks"}:
            raise InputError("element JSON must be {\"blocks\": [matrix, ...]}")
        try:
            f = mu(alg.element([decode_matrix(b) for b in el["blocks"]]), alg)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return {"spec": phi.spec(), "rearrangement": f.pairs(),
            "luxemburg": luxemburg_norm(f, phi), "orlicz": orlicz_amemiya_norm(f, phi), "passed": True}


def _verdicts_passed(items: dict) -> bool:
    return all(v["pass"] for v in items.values())


def cmd_dbc(args) -> dict:
    T = parse_channel(_json_arg(args.channel))
    sf = parse_state(_json_arg(args.state))
    if T.n != sf.n:
        raise InputError("channel and state sizes differ")
    tol = args.tol
    checks = {
        "dbc": ch.check_dbc(T, sf, **({"tol": tol} if tol else {})),
        "state_invariance": ch.check_state_invariance(T, sf, **({"tol": tol} if tol else {})),
        "modular_commutation": ch.check_modular_commutation(T, sf),
        "kms_selfadjoint": ch.check_kms_selfadjoint(T, sf, **({"tol": tol} if tol else {})),
    }
    cp = ch.cp_via_cones(T, sf, k_max=args.levels, rng=_rng(args), samples=200)
    for k, v in cp.levels.items():
        checks[f"cp_level_{k}"] = v
    checks["choi_positive"] = ch.Verdict("choi_positive", cp.cp_by_choi, max(0.0, -cp.choi_min_eig))
    wanted = args.checks.split(",") if args.checks else list(checks)
    unknown = set(wanted) - set(checks)
    if unknown:
        raise InputError(f"unknown checks {sorted(unknown)}")
    out = {k: checks[k].to_dict() for k in wanted}
    report = {"checks": out, "structure": {k: v.to_dict() for k, v in cp.structure.items()},
              "cones_agree_with_choi": cp.consistent, "passed": _verdicts_passed(out)}
    report["table"] = {"columns": ["check", "pass", "violation"],
                       "rows": [[k, v["pass"], v["violation"]] for k, v in out.items()]}
    return report


def cmd_evolve(args) -> dict:
    sf = parse_state(_json_arg(args.state))
    T = None
    if args.generator:
        gen = _json_arg(args.generator)
        if not isinstance(gen, dict) or set(gen) != {"A"}:
            raise InputError("generator JSON must be {\"A\": matrix}")
        A = decode_matrix(gen["A"])
    elif args.channel:
        T = parse_channel(_json_arg(args.channel))
        A = np.eye(T.n ** 2) - ch.hat_map(T, sf)
    else:
        raise InputError("give --generator or --channel")
    if A.shape != (sf.n ** 2, sf.n ** 2):
        raise InputError("generator size does not match the state")
    t_grid = _floats(args.t_grid)
    rng = _rng(args)
    sg = di.MarkovSemigroup(A, tuple(t_grid))
    tol = args.tol or 1e-8
    eq = di.equivalence_test(sg, sf, args.convention, rng, tol=tol)
    report: dict[str, Any] = {
        "convention": args.convention,
        "markov": {repr(t): {"pass": v <= tol, "violation": v} for t, v in eq.markov_by_t.items()},
        "dirichlet": {"pass": eq.dirichlet, "violation": eq.dirichlet_violation},
        "markov_all": eq.markov,
    }
    passed = eq.markov and eq.dirichlet
    if T is not None:
        r = lp.t2_identity_check(T, sf, rng)
        report["t2_residual"] = r.worst
        passed &= r.worst <= 1e-8
    probes = [sf.omega, np.eye(sf.n) / np.sqrt(sf.n)] + [sf.random_hermitian_vector(rng) for _ in range(2)]
    rows = []
    for t in t_grid:
        St = sg.at(t)
        rows.append([t] + [float(np.linalg.norm(St @ p.reshape(-1))) for p in probes])
    report["table"] = {"columns": ["t"] + [f"probe_{k}" for k in range(len(probes))], "rows": rows}
    report["passed"] = bool(passed)
    return report


def cmd_crossed(args) -> dict:
    state, T = parse_crossed(_json_arg(args.config))
    rng = _rng(args)
    if T is None:
        f = rng.normal(size=(state.n, state.n))
        f /= np.linalg.norm(f, axis=1, keepdims=True)
        T = ch.schur_channel(state.sf, f)
    cp = cr.CrossedProduct(state)
    tol = args.tol or 1e-9
    rel = cp.relation_defects(rng)
    try:
        inv = cr.trace_invariance_check(cp, T, rng, args.samples)
        mod = cr.module_property_check(cp, T)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    # dual_j(λ(m)) = phase · λ(m); read the phase off the first nonzero entry
    phases = [[j] + [complex((cp.dual_action(j, cp.lam(m)) @ cp.lam(m).conj().T)[0, 0]) for m in range(cp.N)]
              for j in range(cp.N)]
    mub = cr.mu_bound_suite(WeightedTraceAlgebra(((state.n, 1.0),)), rng, samples=args.samples)
    checks = {
        "relations": {"pass": max(rel.values()) <= 1e-12, "violation": max(rel.values())},
        "trace_invariance": {"pass": inv <= tol, "violation": inv},
        "module_property": {"pass": mod <= 1e-10, "violation": mod},
        "mu_bound": {"pass": mub.violations == 0 and mub.lipschitz_violations == 0,
                     "violation": max(mub.worst_excess, mub.lipschitz_worst_excess)},
        "mu_bound_dilated": {"pass": mub.dilated_violations == 0, "violation": mub.dilated_worst_excess},
    }
    if args.checks:
        wanted = args.checks.split(",")
        unknown = set(wanted) - set(checks)
        if unknown:
            raise InputError(f"unknown checks {sorted(unknown)}")
        checks = {k: checks[k] for k in wanted}
    return {
        "q": state.q, "N": state.N, "m": list(state.exponents),
        "relations": rel, "checks": checks,
        "mu_bound": mub, "dual_action_phases": phases,
        "passed": all(c["pass"] for c in checks.values()),
        "table": {"columns": ["check", "pass", "violation"],
                  "rows": [[k, v["pass"], v["violation"]] for k, v in checks.items()]},
    }


def cmd_report(args) -> dict:
    numbers = [int(x) for x in args.criteria.split(",")] if args.criteria else list(range(1, 14))
    if any(not 1 <= k <= len(acceptance.CRITERIA) for k in numbers):
        raise InputError("criteria are numbered 1 to 13")
    results = [acceptance.run_criterion(k, args.seed) for k in numbers]
    if args.format == "text":
        for r in results:
            print(r.line(), file=sys.stderr)
    return {
        "criteria": [{"number": r.number, "name": r.name, "pass": r.passed, "metrics": r.metrics}
                     for r in results],
        "passed": all(r.passed for r in results),
        "table": {"columns": ["criterion", "pass"], "rows": [[r.number, r.passed] for r in results]},
    }


# ---------------------------------------------------------------------------
# rendering


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    if fmt == "csv":
        table = report.get("table")
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if table:
            w.writerow(table["columns"])
            for row in table["rows"]:
                w.writerow(to_jsonable(row))
        return buf.getvalue()
    lines = []

    def walk(prefix: str, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                if k != "table":
                    walk(f"{prefix}{k}.", obj[k])
        else:
            lines.append(f"{prefix[:-1]}: {json.dumps(obj)}")

    walk("", to_jsonable(report))
    lines.append("RESULT: " + ("PASS" if report.get("passed") else "FAIL"))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="override the main check tolerance")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="qorlicz", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    y = sub.add_parser("young", parents=[common], help="Young functions: eval, conjugate, equiv, indices")
    y.add_argument("action", choices=("eval", "conjugate", "equiv", "indices", "fundamental", "dilation"))
    y.add_argument("--spec", default="psi_e")
    y.add_argument("--t", default="1")
    y.add_argument("--a")
    y.add_argument("--b")
    y.add_argument("--norm", choices=("luxemburg", "orlicz"), default="luxemburg")
    y.add_argument("--points", type=int, default=49)

    n = sub.add_parser("norm", parents=[common], help="Luxemburg and Orlicz norms")
    n.add_argument("--spec", required=True)
    n.add_argument("--steps", help="'value:width,...'")
    n.add_argument("--algebra")
    n.add_argument("--element")

    d = sub.add_parser("dbc", parents=[common], help="detailed balance and related checks")
    d.add_argument("--channel", required=True)
    d.add_argument("--state", required=True)
    d.add_argument("--levels", type=int, default=3)
    d.add_argument("--checks", help="comma-separated subset of checks")

    e = sub.add_parser("evolve", parents=[common], help="semigroup Markovianity and Dirichlet form")
    e.add_argument("--state", required=True)
    e.add_argument("--generator")
    e.add_argument("--channel")
    e.add_argument("--t-grid", default="0.01,0.1,1,10")
    e.add_argument("--convention", choices=("minus", "plus"), default="minus")

    c = sub.add_parser("crossed", parents=[common], help="crossed-product checks")
    c.add_argument("--config", default='{"q": 0.5, "N": 8, "m": [0, 1, 3]}')
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--checks", help="comma-separated subset of: relations, trace_invariance, "
                                    "module_property, mu_bound, mu_bound_dilated")

    r = sub.add_parser("report", parents=[common], help="run the acceptance criteria")
    r.add_argument("--criteria", help="comma-separated criterion numbers")
    return p


COMMANDS = {"young": cmd_young, "norm": cmd_norm, "dbc": cmd_dbc, "evolve": cmd_evolve,
            "crossed": cmd_crossed, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"did not converge: {exc} (residual {exc.residual:.3g})", file=sys.stderr)
        return EXIT_NUMERIC
    report = {"command": args.command, "seed": args.seed, "tol": args.tol, **report}
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.get("passed") else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
