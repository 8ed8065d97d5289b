"""Emden-Fowler profiles and executable forms of the qualitative theorems.

With ``m = 4/(p-1)`` and ``s = log r`` a radial solution becomes
``W(s) = r^m φ(r)``, which solves the autonomous equation
``q4(m - ∂_s) W = W^p``.  The singular solution is the constant profile
``W ≡ q4(m)^(1/(p-1))``.  In the stable regime every regular profile stays
strictly below that constant and is strictly increasing, which is what keeps
the graphs of two different solutions apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quartic import ProblemParams, Regime
from .radial_ode import RadialSolution, eval_emden_deviation
from .report import VerificationReport

__all__ = [
    "EmdenProfile",
    "ShiftedProfile",
    "IntersectionReport",
    "to_emden",
    "emden_residual_from_state",
    "emden_ode_residual",
    "check_bound",
    "check_monotone",
    "check_intersection",
]

# dead-band for sign changes, in units of the singular amplitude
SIGN_DEADBAND = 1e-10


@dataclass(frozen=True)
class EmdenProfile:
    """Samples ``(s, W, W')`` plus the offset ``Y = W - limit_amplitude``.

    ``y`` is carried separately because ``W - limit`` cancels catastrophically
    once ``W`` is within rounding of the limit.
    """

    params: ProblemParams
    s: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    y: np.ndarray
    limit_amplitude: float

    @classmethod
    def from_arrays(cls, params: ProblemParams, r, u, du) -> "EmdenProfile":
        r = np.asarray(r, dtype=float)
        u = np.asarray(u, dtype=float)
        du = np.asarray(du, dtype=float)
        m = params.m
        w = r ** m * u
        dw = r ** m * (m * u + r * du)
        a = params.singular_amplitude
        return cls(params, np.log(r), w, dw, w - a, a)

    @classmethod
    def singular(cls, params: ProblemParams, s) -> "EmdenProfile":
        """The constant profile of the singular solution on the grid ``s``."""
        s = np.asarray(s, dtype=float)
        a = params.singular_amplitude
        return cls(params, s, np.full_like(s, a), np.zeros_like(s), np.zeros_like(s), a)

    def shifted(self) -> "ShiftedProfile":
        return ShiftedProfile(self.s, self.y)


@dataclass(frozen=True)
class ShiftedProfile:
    """``Y(s) = W(s) - q4(m)^(1/(p-1))``; negative for stable-regime solutions."""

    s: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class IntersectionReport:
    pair: tuple[float, float]
    sign_changes: int
    min_gap: float
    ordered: bool
    applicable: bool
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.sign_changes == 0 and self.ordered

    @property
    def status(self) -> str:
        if not self.applicable:
            return "no theorem applies"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "name": "non_intersection",
            "pair": list(self.pair),
            "sign_changes": self.sign_changes,
            "min_gap": self.min_gap,
            "ordered": self.ordered,
            "status": self.status,
            "applicable": self.applicable,
            "detail": self.detail,
        }


def _require_resolved(sol: RadialSolution) -> None:
    if not sol.resolved:
        raise DomainError(f"solution is not resolved ({sol.trajectory_class})")


def to_emden(sol: RadialSolution) -> EmdenProfile:
    """Emden-Fowler profile of a resolved solution on its own grid."""
    _require_resolved(sol)
    g = sol.grid
    return EmdenProfile(sol.params, g.s.copy(), g.w.copy(), g.dw.copy(), g.y.copy(),
                        sol.limit_amplitude)


def emden_residual_from_state(params: ProblemParams, r, u, du, v, dv) -> np.ndarray:
    """``(q4(m - ∂_s) W - W^p) / W^p`` evaluated from the radial state.

    ``q4(m - ∂_s) r^m = r^m q4(-D)`` with ``D = r ∂_r``; the powers of ``D``
    are expanded with Stirling numbers and the derivatives ``u''``, ``u'''``,
    ``u''''`` are taken from the radial system itself.
    """
    r = np.asarray(r, dtype=float)
    u, du, v, dv = (np.asarray(a, dtype=float) for a in (u, du, v, dv))
    n, p, m = params.n, params.p, params.m
    k = n - 1
    d2 = v - k * du / r
    d3 = dv - k * (d2 / r - du / r ** 2)
    dv2 = np.maximum(u, 0.0) ** p - k * dv / r
    d4 = dv2 - k * (d3 / r - 2 * d2 / r ** 2 + 2 * du / r ** 3)
    D1 = r * du
    D2 = D1 + r ** 2 * d2
    D3 = D1 + 3 * r ** 2 * d2 + r ** 3 * d3
    D4 = D1 + 7 * r ** 2 * d2 + 6 * r ** 3 * d3 + r ** 4 * d4
    # q4(x) = x(x+2)(x+2-n)(x+4-n) in monomials, evaluated at x = -D
    c = np.poly1d([1.0, 0.0]) * np.poly1d([1.0, 2.0]) * np.poly1d([1.0, 2.0 - n]) * np.poly1d([1.0, 4.0 - n])
    c4, c3, c2, c1, c0 = c.coeffs
    lhs = c0 * u - c1 * D1 + c2 * D2 - c3 * D3 + c4 * D4
    w = r ** m * u
    wp = w ** p
    return (r ** m * lhs - wp) / wp


def emden_ode_residual(profile: EmdenProfile, sol: RadialSolution) -> float:
    """Largest normalised residual of ``q4(m - ∂_s) W = W^p`` on the grid."""
    g = sol.grid
    res = emden_residual_from_state(sol.params, g.r, g.u, g.du, g.v, g.dv)
    return float(np.max(np.abs(res)))


def _theorem_applies(params: ProblemParams) -> bool:
    return params.regime is Regime.SUPERCRITICAL_STABLE


def check_bound(profile: EmdenProfile) -> VerificationReport:
    """``W(s) < q4(m)^(1/(p-1))`` at every sample (strict).

    The margin is ``min_s (1 - W/limit)``.
    """
    margin = float(np.min(-profile.y / profile.limit_amplitude))
    passed = bool(np.all(profile.y < 0))
    applicable = _theorem_applies(profile.params)
    i = int(np.argmax(profile.y))
    return VerificationReport(
        name="bound", passed=passed, margin=margin, applicable=applicable,
        detail=f"max W/limit - 1 = {profile.y[i] / profile.limit_amplitude:.3e} at s={profile.s[i]:.4g}")


def check_monotone(profile: EmdenProfile) -> VerificationReport:
    """``W'(s) > 0`` at every sample; the margin is ``min W' / limit``."""
    i = int(np.argmin(profile.dw))
    margin = float(profile.dw[i] / profile.limit_amplitude)
    passed = bool(np.all(profile.dw > 0))
    return VerificationReport(
        name="monotone", passed=passed, margin=margin,
        applicable=_theorem_applies(profile.params),
        detail=f"min W' = {profile.dw[i]:.3e} at s={profile.s[i]:.4g}")


def _count_sign_changes(d: np.ndarray, band: float) -> int:
    signs = np.sign(d[np.abs(d) > band])
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def check_intersection(sol_a: RadialSolution, sol_b: RadialSolution) -> IntersectionReport:
    """Count crossings of ``φ_α`` and ``φ_β`` on the union of their grids.

    The difference is taken in Emden-Fowler units, ``r^m (φ_α - φ_β)``, which
    stays O(1) instead of decaying with ``r``.  It is formed from the stored
    offsets ``Y = W - limit``: both profiles converge to the same limit, so
    subtracting raw ``u`` values would drown the tail gap in interpolation
    noise.  Sign changes below ``SIGN_DEADBAND`` (relative to the limit) are
    ignored; the strict ordering check uses no dead-band at all.
    """
    pa, pb = sol_a.params, sol_b.params
    if (pa.n, pa.p) != (pb.n, pb.p):
        raise DomainError(f"mismatched problems: (n={pa.n}, p={pa.p}) vs (n={pb.n}, p={pb.p})")
    _require_resolved(sol_a)
    _require_resolved(sol_b)
    a = sol_a.limit_amplitude
    r_top = min(sol_a.r_max, sol_b.r_max)
    r = np.union1d(sol_a.grid.r, sol_b.grid.r)
    r = r[r <= r_top]
    diff = eval_emden_deviation(sol_a, r) - eval_emden_deviation(sol_b, r)
    changes = _count_sign_changes(diff / a, SIGN_DEADBAND)
    gap = float(np.min(np.abs(diff)) / a)
    expected = np.sign(sol_a.alpha - sol_b.alpha)
    if expected == 0:
        ordered = bool(np.all(diff == 0))
    else:
        ordered = bool(np.all(np.sign(diff) == expected))
    return IntersectionReport(
        pair=(sol_a.alpha, sol_b.alpha), sign_changes=changes, min_gap=gap,
        ordered=ordered, applicable=_theorem_applies(pa),
        detail=f"{r.size} points on (0, {r_top:.4g}]")
