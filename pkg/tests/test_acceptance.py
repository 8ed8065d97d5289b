"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget.

Every criterion computes its own data (no shared cache), so the measured
runtime is that of a cold run.  One PASS/FAIL line per criterion is printed
at the end of the pytest session, or directly when run as a script:

    python tests/test_acceptance.py
"""

from __future__ import annotations

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from biharmonic.closedform import (CriticalSolution, instability_energy_closed_form,
                                   phi_critical, phi_critical_derivatives)
from biharmonic.emden import (check_bound, check_intersection, check_monotone,
                              emden_ode_residual, emden_residual_from_state, to_emden)
from biharmonic.quartic import (ProblemParams, p_critical, p_polynomial_coefficients, q4,
                                q_limit_coefficient, r_polynomial_coefficients,
                                rellich_constant, roots_p_polynomial, roots_r_polynomial,
                                script_q, sobolev_exponent)
from biharmonic.radial_ode import eval_solution, shoot
from biharmonic.spectral import (CriticalZeta, energy, instability_probe,
                                 rellich_pointwise_check)

RESULTS: list[str] = []


def _record(number: int, title: str, budget: float, body) -> None:
    start = time.perf_counter()
    failures = body()
    elapsed = time.perf_counter() - start
    if elapsed > budget:
        failures.append(f"runtime {elapsed:.1f} s exceeds {budget:g} s")
    verdict = "PASS" if not failures else "FAIL"
    line = f"criterion {number:>2} {verdict}  {title}  ({elapsed:.2f} s / {budget:g} s)"
    if failures:
        line += "  " + "; ".join(failures)
    RESULTS.append(line)
    assert not failures, line


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def criterion_1() -> list[str]:
    bad = []
    for n in range(5, 21):
        if script_q(1.0, n) != -4096:
            bad.append(f"Q(1) n={n}")
        if script_q(0.0, n) != n * n * (n - 4) ** 2:
            bad.append(f"Q(0) n={n}")
        pn = sobolev_exponent(n)
        if _rel(script_q(pn, n), -2 ** 15 * n * n / (n - 4) ** 3) > 1e-12:
            bad.append(f"Q(p_n) n={n}")
        q = (n + 2) / (n - 2)
        if _rel(script_q(q, n), 2 ** 8 * n * n * (n - 4) ** 2 / (n - 2) ** 4) > 1e-12:
            bad.append(f"Q((n+2)/(n-2)) n={n}")
        for p in np.linspace(1.0, 60.0, 500):
            e, f = script_q(p, n), script_q(p, n, form="factored")
            if abs(e - f) > 1e-12 * max(abs(e), abs(f), 1.0):
                bad.append(f"factored vs expanded n={n} p={p:.6g}: {e} vs {f}")
                break
    return bad


def criterion_2() -> list[str]:
    bad = []
    for n in range(5, 13):
        if not q_limit_coefficient(n) < 0:
            bad.append(f"limit coefficient n={n}")
        if p_critical(n) is not None:
            bad.append(f"p_c exists for n={n}")
    for n in range(13, 21):
        if not q_limit_coefficient(n) > 0:
            bad.append(f"limit coefficient n={n}")
        pc = p_critical(n)
        if pc is None or abs(script_q(pc, n)) / abs(script_q(0.0, n)) > 1e-9:
            bad.append(f"p_c residual n={n}")
    if not 20 < p_critical(13) < 30:
        bad.append("p_c(13) outside (20, 30)")
    return bad


def _poly_scale(coeffs: np.ndarray, x: float) -> float:
    return float(sum(abs(c) * abs(x) ** k for k, c in enumerate(coeffs[::-1])))


def criterion_3() -> list[str]:
    bad = []
    for n, p in [(13, 30.0), (15, 10.0)]:
        if script_q(p, n) <= 0:
            bad.append(f"({n},{p}) not stable")
        params = ProblemParams(n, p)
        lam = roots_p_polynomial(params)
        if sum(x < 0 for x in lam) != 3 or sum(x > 0 for x in lam) != 1:
            bad.append(f"({n},{p}) P root signs {lam.roots}")
        centre = lam.symmetry_center
        if abs(lam[0] + lam[3] - 2 * centre) > 1e-10 or abs(lam[1] + lam[2] - 2 * centre) > 1e-10:
            bad.append(f"({n},{p}) symmetry sums")
        mu = roots_r_polynomial(params)
        if mu[2] != 0.0 or mu[1] != 2 * mu.symmetry_center or not mu[3] > params.m:
            bad.append(f"({n},{p}) R root structure {mu.roots}")
        for rs, coeffs in ((lam, p_polynomial_coefficients(params)),
                           (mu, r_polynomial_coefficients(params))):
            for x in rs:
                if abs(np.polyval(coeffs, x)) > 1e-8 * _poly_scale(coeffs, x):
                    bad.append(f"({n},{p}) {rs.which} residual at {x}")
    return bad


def criterion_4() -> list[str]:
    bad = []
    sol = shoot(1.0, ProblemParams(5, 9.0))
    exact = CriticalSolution.from_alpha(5, 1.0)
    beta = float(phi_critical_derivatives(0.0, exact)[2])
    if not sol.resolved or _rel(sol.beta, beta) > 1e-6:
        bad.append(f"beta {sol.beta} vs {beta}")
    r = np.linspace(0.0, 10.0, 2001)
    err = np.max(np.abs(eval_solution(sol, r) / phi_critical(r, exact) - 1))
    if err > 1e-4:
        bad.append(f"profile sup error {err:.2e}")
    return bad


def criterion_5() -> list[str]:
    sol = shoot(1.0, ProblemParams(13, 30.0))
    limit = q4(4 / 29, 13)
    e1000 = _rel(sol.tail_value(1000.0), limit)
    e500 = _rel(sol.tail_value(500.0), limit)
    bad = []
    if not sol.resolved or e1000 > 0.02:
        bad.append(f"tail error at 1000 is {e1000:.2e}")
    if not e1000 < e500:
        bad.append(f"tail error not decreasing: {e500:.2e} -> {e1000:.2e}")
    return bad


def criterion_6() -> list[str]:
    bad = []
    for n, p in [(13, 30.0), (15, 10.0)]:
        params = ProblemParams(n, p)
        sols = [shoot(a, params) for a in (0.25, 1.0, 4.0, 16.0)]
        for sol in sols:
            tag = f"({n},{p:g}) alpha={sol.alpha:g}"
            if not sol.resolved:
                bad.append(f"{tag} unresolved")
                continue
            prof = to_emden(sol)
            for rep in (check_bound(prof), check_monotone(prof), rellich_pointwise_check(sol)):
                if rep.status != "pass":
                    bad.append(f"{tag} {rep.name}: {rep.detail}")
        for a, b in itertools.combinations(sols, 2):
            rep = check_intersection(a, b)
            if rep.status != "pass":
                bad.append(f"({n},{p:g}) pair {rep.pair}: {rep.sign_changes} crossings, "
                           f"ordered={rep.ordered}")
    return bad


def criterion_7() -> list[str]:
    params = ProblemParams(13, 30.0)
    a, b = shoot(1.0, params), shoot(16.0, params)
    m, p = params.m, params.p
    k = 16.0 ** (1 / m)
    top = min(b.r_max, a.r_max / k)
    r = np.concatenate([[0.0], np.geomspace(1e-8 * top, top, 400)])
    lhs = eval_solution(b, r)
    rhs = 16.0 * eval_solution(a, np.minimum(k * r, a.r_max))
    err = np.max(np.abs(lhs / rhs - 1))
    ratio = _rel(b.beta / a.beta, 16.0 ** ((p + 1) / 2))
    bad = []
    if err > 1e-4:
        bad.append(f"scaling profile error {err:.2e}")
    if ratio > 1e-4:
        bad.append(f"beta ratio error {ratio:.2e}")
    return bad


def criterion_8() -> list[str]:
    bad = []
    for n in (5, 6, 7):
        for lam in (0.5, 1.0, 2.0):
            rep = energy(CriticalZeta(lam, n), CriticalSolution(n, lam))
            exact = instability_energy_closed_form(n, lam)
            if not rep.energy < 0 or _rel(rep.energy, exact) > 1e-3:
                bad.append(f"n={n} lam={lam}: {rep.energy} vs {exact}")
    return bad


def criterion_9() -> list[str]:
    bad = []
    if not script_q(2.0, 13) < 0:
        bad.append("Q(2) not negative for n=13")
    found = instability_probe(shoot(1.0, ProblemParams(13, 2.0)))
    if found is None or not found.energy < 0:
        bad.append("no negative direction found for (13, 2)")
    stable = shoot(1.0, ProblemParams(13, 30.0))
    if instability_probe(stable) is not None:
        bad.append("probe found a negative direction for (13, 30)")
    if not rellich_pointwise_check(stable).passed:
        bad.append("Rellich check failed for (13, 30)")
    return bad


def criterion_10() -> list[str]:
    bad = []
    for n, p in [(13, 30.0), (15, 10.0)]:
        sol = shoot(1.0, ProblemParams(n, p))
        res = emden_ode_residual(to_emden(sol), sol)
        if res > 1e-6:
            bad.append(f"({n},{p:g}) residual {res:.2e}")
    for n, p in [(13, 30.0), (15, 10.0), (13, 2.0)]:
        params = ProblemParams(n, p)
        a, m = params.singular_amplitude, params.m
        if _rel(q4(m, n) * a, a ** p) > 1e-12:
            bad.append(f"({n},{p:g}) fixed point identity")
        r = np.geomspace(1e-2, 1e2, 9)
        c = m * (n - m - 2)
        state = (a * r ** -m, -m * a * r ** (-m - 1), -c * a * r ** (-m - 2),
                 c * (m + 2) * a * r ** (-m - 3))
        if np.max(np.abs(emden_residual_from_state(params, r, *state))) > 1e-10:
            bad.append(f"({n},{p:g}) singular residual")
    return bad


CRITERIA = [
    (1, "polynomial identities", 1.0, criterion_1),
    (2, "dichotomy", 1.0, criterion_2),
    (3, "root lemmas", 1.0, criterion_3),
    (4, "closed-form oracle for the solver", 30.0, criterion_4),
    (5, "tail law", 60.0, criterion_5),
    (6, "stability theorems as properties", 120.0, criterion_6),
    (7, "scaling", 60.0, criterion_7),
    (8, "instability energy", 10.0, criterion_8),
    (9, "instability probe", 120.0, criterion_9),
    (10, "Emden residual", 30.0, criterion_10),
]


@pytest.mark.parametrize("number,title,budget,body", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(number, title, budget, body):
    _record(number, title, budget, body)


if __name__ == "__main__":
    import sys
    ok = True
    for entry in CRITERIA:
        try:
            _record(*entry)
        except AssertionError:
            ok = False
        print(RESULTS[-1], flush=True)
    sys.exit(0 if ok else 1)
