import dataclasses

import numpy as np
import pytest

from biharmonic.closedform import CriticalSolution, phi_critical_derivatives
from biharmonic.emden import (EmdenProfile, check_bound, check_intersection, check_monotone,
                              emden_ode_residual, emden_residual_from_state, to_emden)
from biharmonic.errors import DomainError
from biharmonic.quartic import ProblemParams, q4
from biharmonic.radial_ode import Outcome, TrajectoryClass, scale_solution


def singular_state(params, r):
    n, m = params.n, params.m
    a = params.singular_amplitude
    u = a * r ** -m
    du = -m * a * r ** (-m - 1)
    v = -m * (n - m - 2) * a * r ** (-m - 2)
    dv = m * (n - m - 2) * (m + 2) * a * r ** (-m - 3)
    return u, du, v, dv


@pytest.mark.parametrize("n,p", [(13, 30.0), (15, 10.0), (20, 4.0)])
def test_singular_solution_is_a_fixed_point(n, p):
    params = ProblemParams(n, p)
    a = params.singular_amplitude
    assert q4(params.m, n) * a == pytest.approx(a ** p, rel=1e-13)
    r = np.geomspace(1e-2, 1e2, 9)
    res = emden_residual_from_state(params, r, *singular_state(params, r))
    assert np.max(np.abs(res)) < 1e-11


@pytest.mark.parametrize("n", [5, 7, 12])
def test_closed_form_critical_profile_residual(n):
    sol = CriticalSolution(n, 1.0)
    params = ProblemParams(n, sol.p)
    # W^p decays for r >> 1, so the normalised residual amplifies rounding there
    r = np.geomspace(1e-2, 1e1, 50)
    res = emden_residual_from_state(params, r, *phi_critical_derivatives(r, sol))
    assert np.max(np.abs(res)) < 1e-9


@pytest.mark.parametrize("case", [(13, 30.0), (15, 10.0), (5, 9.0)])
def test_solved_profiles_satisfy_emden_equation(solve, case):
    sol = solve(*case)
    assert emden_ode_residual(to_emden(sol), sol) <= 1e-6


@pytest.mark.parametrize("case", [(13, 30.0), (15, 10.0)])
def test_stable_profiles_are_bounded_and_increasing(solve, case):
    prof = to_emden(solve(*case))
    bound, mono = check_bound(prof), check_monotone(prof)
    assert bound.status == "pass" and bound.margin > 0
    assert mono.status == "pass" and mono.margin > 0
    assert prof.y[-1] == pytest.approx(0.0, abs=1e-6 * prof.limit_amplitude)
    assert np.all(prof.w < prof.limit_amplitude)


def test_singular_profile_fails_bound_with_zero_margin():
    params = ProblemParams(13, 30.0)
    prof = EmdenProfile.singular(params, np.linspace(-3, 3, 11))
    rep = check_bound(prof)
    assert rep.status == "fail" and rep.margin == 0.0
    assert check_monotone(prof).status == "fail"


def test_critical_profile_is_not_monotone():
    params = ProblemParams(5, 9.0)
    sol = CriticalSolution(5, 1.0)
    r = np.geomspace(1e-2, 1e2, 200)
    u, du, _, _ = phi_critical_derivatives(r, sol)
    rep = check_monotone(EmdenProfile.from_arrays(params, r, u, du))
    assert rep.passed is False


def test_open_regime_is_labelled(solve):
    sol = solve(13, 2.0)
    prof = to_emden(sol)
    assert check_bound(prof).status == "no theorem applies"
    assert check_monotone(prof).status == "no theorem applies"
    other = solve(13, 2.0, 16.0)
    assert check_intersection(sol, other).status == "no theorem applies"


@pytest.mark.parametrize("case", [(13, 30.0), (15, 10.0)])
def test_graphs_do_not_intersect(solve, case):
    a, b = solve(*case, 1.0), solve(*case, 4.0)
    rep = check_intersection(a, b)
    assert rep.sign_changes == 0 and rep.ordered and rep.status == "pass"
    assert rep.min_gap > 0
    flipped = check_intersection(b, a)
    assert flipped.ordered and flipped.sign_changes == 0


def test_intersection_with_itself_has_zero_gap(solve):
    sol = solve(13, 30.0)
    rep = check_intersection(sol, sol)
    assert rep.min_gap == 0.0 and rep.sign_changes == 0


def test_intersection_rejects_mismatched_problems(solve):
    with pytest.raises(DomainError):
        check_intersection(solve(13, 30.0), solve(15, 10.0))


def test_scale_covariance_is_a_shift(solve):
    sol = solve(15, 10.0)
    k = 16.0
    a, b = to_emden(sol), to_emden(scale_solution(sol, k))
    assert np.allclose(b.s, a.s - np.log(k) / sol.params.m, rtol=0, atol=1e-12)
    assert np.array_equal(a.w, b.w) and np.array_equal(a.y, b.y)


def test_unresolved_solution_is_rejected(solve):
    sol = solve(13, 30.0)
    broken = dataclasses.replace(sol, trajectory_class=TrajectoryClass(Outcome.CROSSED_ZERO, 5.0))
    with pytest.raises(DomainError):
        to_emden(broken)
