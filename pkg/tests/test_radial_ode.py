import math

import numpy as np
import pytest

from biharmonic.closedform import CriticalSolution, phi_critical, phi_critical_derivatives
from biharmonic.errors import DomainError, RegimeError
from biharmonic.quartic import ProblemParams, q4
from biharmonic.radial_ode import (Outcome, ShootingConfig, State, eval_emden_deviation,
                                   eval_solution, integrate, rhs, scale_solution, shoot,
                                   taylor_start)

CRIT = ProblemParams(5, 9.0)


def test_rhs_is_the_first_order_system():
    params = ProblemParams(13, 2.0)
    out = rhs(State(2.0, 3.0, -1.0, 0.5, 0.25), params)
    assert np.allclose(out, [-1.0, 0.5 - 12 * -1.0 / 2, 0.25, 9.0 - 12 * 0.25 / 2])
    # negative u is clipped in the nonlinearity
    assert rhs(State(1.0, -1.0, 0.0, 0.0, 0.0), params)[3] == 0.0


def test_taylor_start_converges_at_eighth_and_sixth_order():
    sol = CriticalSolution(5, 1.0)
    alpha, beta = sol.alpha, float(phi_critical_derivatives(0.0, sol)[2])
    errs = []
    for r in (0.1, 0.05):
        st = taylor_start(alpha, beta, CRIT, r)
        u, du, v, dv = phi_critical_derivatives(r, sol)
        errs.append((abs(st.u - u), abs(st.v - v)))
    assert errs[0][0] / errs[1][0] >= 2 ** 7
    assert errs[0][1] / errs[1][1] >= 2 ** 5


def test_taylor_start_rejects_bad_input():
    with pytest.raises(DomainError):
        taylor_start(0.0, -1.0, CRIT, 1e-3)
    with pytest.raises(DomainError):
        taylor_start(1.0, -1.0, CRIT, 0.0)


def test_shooting_config_validation():
    with pytest.raises(DomainError):
        ShootingConfig(r_start=2.0)
    with pytest.raises(DomainError):
        ShootingConfig(rel_tol=0.0)
    with pytest.raises(DomainError):
        ShootingConfig(r_max=0.5)
    cfg = ShootingConfig()
    assert cfg.resolved_r_max(CRIT) == 100.0
    assert cfg.resolved_r_max(ProblemParams(13, 30)) == 1000.0
    assert cfg.to_dict()["rel_tol"] == 1e-10


def test_integrate_classifies_brackets():
    params = ProblemParams(13, 30.0)
    cls, traj = integrate(1.0, 0.0, params)
    assert cls.outcome is Outcome.DIVERGED
    cls, traj = integrate(1.0, -10.0, params)
    assert cls.outcome is Outcome.CROSSED_ZERO
    assert traj.r[-1] <= cls.radius * (1 + 1e-12)


def test_critical_shoot_matches_closed_form(solve):
    sol = solve(5, 9.0)
    exact = CriticalSolution.from_alpha(5, 1.0)
    beta = float(phi_critical_derivatives(0.0, exact)[2])
    assert sol.resolved
    assert sol.beta == pytest.approx(beta, rel=1e-9)
    r = np.linspace(0.0, 10.0, 401)
    assert np.max(np.abs(eval_solution(sol, r) / phi_critical(r, exact) - 1)) < 1e-6


def test_shoot_rejects_subcritical_and_bad_alpha():
    with pytest.raises(RegimeError):
        shoot(1.0, ProblemParams(13, 1.5))
    with pytest.raises(DomainError):
        shoot(-1.0, ProblemParams(13, 30.0))


@pytest.mark.parametrize("case", [(13, 30.0), (15, 10.0), (13, 2.0)])
def test_bisection_history_is_monotone(solve, case):
    sol = solve(*case)
    hist = sol.bisection_history
    assert hist[0] == (0.0, Outcome.DIVERGED)
    last = hist[-5:]
    crossed = [b for b, o in last if o is Outcome.CROSSED_ZERO]
    diverged = [b for b, o in hist if o is Outcome.DIVERGED]
    assert crossed and max(crossed) < min(diverged)
    assert sol.beta < 0


@pytest.mark.parametrize("case", [(13, 30.0), (15, 10.0)])
def test_stable_solutions_resolve_with_small_residual(solve, case):
    sol = solve(*case)
    assert sol.resolved
    assert sol.residual_report < 1e-8
    assert np.all(np.diff(sol.u) < 0)
    assert sol.tail_value() == pytest.approx(q4(sol.params.m, sol.params.n), rel=1e-6)


def test_scale_solution_matches_independent_shoot(solve):
    a, b = solve(13, 30.0, 1.0), solve(13, 30.0, 16.0)
    scaled = scale_solution(a, 16.0)
    p = a.params.p
    assert b.beta / a.beta == pytest.approx(16.0 ** ((p + 1) / 2), rel=1e-8)
    assert scaled.beta == pytest.approx(b.beta, rel=1e-8)
    r = np.geomspace(1e-6 * scaled.r_max, 0.9 * scaled.r_max, 300)
    assert np.allclose(eval_solution(scaled, r), eval_solution(b, r), rtol=1e-7, atol=0)


def test_scale_solution_round_trip(solve):
    sol = solve(15, 10.0)
    back = scale_solution(scale_solution(sol, 4.0), 1.0)
    assert np.allclose(back.r, sol.r, rtol=1e-14)
    assert np.allclose(back.u, sol.u, rtol=1e-14)
    with pytest.raises(DomainError):
        scale_solution(sol, 0.0)


def test_eval_solution_domain_and_origin(solve):
    sol = solve(13, 30.0)
    assert eval_solution(sol, 0.0) == 1.0
    assert eval_solution(sol, sol.r[5]) == pytest.approx(sol.u[5], rel=1e-14)
    with pytest.raises(DomainError):
        eval_solution(sol, 2 * sol.r_max)
    with pytest.raises(DomainError):
        eval_solution(sol, -1.0)


def test_emden_deviation_is_consistent_with_profile(solve):
    sol = solve(13, 30.0)
    r = np.array([1e-4, 0.5, 3.0, 40.0])
    w = r ** sol.params.m * eval_solution(sol, r)
    assert np.allclose(eval_emden_deviation(sol, r) + sol.limit_amplitude, w, rtol=1e-8)


def test_summary_is_serialisable(solve):
    import json
    sol = solve(15, 10.0)
    data = json.loads(json.dumps(sol.summary()))
    assert data["alpha"] == 1.0 and data["beta"] < 0
    assert math.isfinite(data["tail_value"])
