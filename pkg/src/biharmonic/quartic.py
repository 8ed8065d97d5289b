"""Quartic symbol, critical exponents and stability classification.

Everything here is a pure function of ``(n, p)``.  The central objects are

* ``q4(alpha, n) = alpha (alpha+2) (alpha+2-n) (alpha+4-n)``, the multiplier
  with ``|x|^(alpha+4) Δ² |x|^(-alpha) = q4(alpha, n)``;
* the stability polynomial ``script_q(p, n)``, whose sign decides linear
  stability of the radial solutions of ``Δ²φ = φ^p``;
* the characteristic quartics ``P(λ) = q4(m-λ) - p q4(m)`` and
  ``R(μ) = q4(m-μ) - q4(m)`` with ``m = 4/(p-1)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NoConvergence, RegimeError, StabilityViolated

__all__ = [
    "ProblemParams",
    "Regime",
    "RootSet",
    "q4",
    "rellich_constant",
    "sobolev_exponent",
    "script_q",
    "script_q_scale",
    "q_limit_coefficient",
    "p_critical",
    "classify",
    "roots_p_polynomial",
    "roots_r_polynomial",
    "p_polynomial_coefficients",
    "r_polynomial_coefficients",
]

# |p - 1| below this is evaluated with the expanded form of script_q.
_P_ONE_WINDOW = 1e-6


def _require_dimension(n: int) -> None:
    if n <= 4:
        raise DomainError(f"dimension n must be >= 5, got n={n}")


class Regime(enum.Enum):
    NO_POSITIVE_SOLUTION = "NoPositiveSolution"
    CRITICAL_SOBOLEV = "CriticalSobolev"
    SUPERCRITICAL_UNSTABLE = "SupercriticalUnstable"
    SUPERCRITICAL_STABLE = "SupercriticalStable"

    @property
    def theorem_applies(self) -> bool:
        """True where the non-intersection and bound theorems are proven."""
        return self is Regime.SUPERCRITICAL_STABLE

    @property
    def unstable(self) -> bool:
        return self in (Regime.CRITICAL_SOBOLEV, Regime.SUPERCRITICAL_UNSTABLE)


@dataclass(frozen=True)
class ProblemParams:
    """Dimension ``n`` and exponent ``p`` of ``Δ²φ = φ^p`` in ``R^n``.

    ``m = 4/(p-1)`` is the decay rate of the singular solution and is cached
    on construction.
    """

    n: int
    p: float
    m: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n:
            raise DomainError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        _require_dimension(self.n)
        if not self.p > 1:
            raise DomainError(f"exponent p must be > 1, got p={self.p}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "m", 4.0 / (self.p - 1.0))

    @property
    def sobolev_exponent(self) -> float:
        return sobolev_exponent(self.n)

    @property
    def is_critical(self) -> bool:
        return _is_sobolev(self.n, self.p)

    @property
    def regime(self) -> Regime:
        return classify(self.n, self.p)

    @property
    def singular_amplitude(self) -> float:
        """``q4(m)^(1/(p-1))``, the constant Emden-Fowler profile."""
        return q4(self.m, self.n) ** (1.0 / (self.p - 1.0))

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "m": self.m}


def q4(alpha, n):
    """Return ``alpha (alpha+2) (alpha+2-n) (alpha+4-n)``.

    Works elementwise on numpy arrays.  The polynomial is symmetric about
    ``(n-4)/2``, where it attains its local maximum ``n²(n-4)²/16``.
    """
    return alpha * (alpha + 2) * (alpha + 2 - n) * (alpha + 4 - n)


def rellich_constant(n: int) -> float:
    """Sharp constant ``n²(n-4)²/16`` of the Rellich inequality."""
    _require_dimension(n)
    return n * n * (n - 4) ** 2 / 16.0


def sobolev_exponent(n: int) -> float:
    """Sobolev-critical exponent ``p_n = (n+4)/(n-4)``."""
    _require_dimension(n)
    return (n + 4) / (n - 4)


def _is_sobolev(n: int, p: float) -> bool:
    return n > 4 and math.isclose(p, (n + 4) / (n - 4), rel_tol=1e-12, abs_tol=0.0)


def _script_q_expanded(p, n):
    return (n * n * (n - 4) ** 2 * (p - 1) ** 4
            - 128 * p * (p + 1) * ((n - 4) * p - n) * ((n - 2) * p - (n + 2)))


def _script_q_factored(p, n):
    return 16 * (p - 1) ** 4 * (q4((n - 4) / 2.0, n) - p * q4(4.0 / (p - 1), n))


def _script_q_exact(p: float, n: int, form: str) -> float:
    # p = a/b exactly (b a power of two).  Both forms are cleared of
    # denominators and evaluated in integers; int / int rounds correctly.
    a, b = float(p).as_integer_ratio()
    d = a - b
    if form == "factored" and d != 0:
        # 16 d⁴/b⁴ [n²(n-4)²/16 - (a/b) q4(4b/d)], with q4(4b/d) d⁴ expanded
        k = 4 * b
        inner = k * (k + 2 * d) * (k + (2 - n) * d) * (k + (4 - n) * d)
        return (n * n * (n - 4) ** 2 * d ** 4 * b - 16 * a * inner) / b ** 5
    num = (n * n * (n - 4) ** 2 * d ** 4
           - 128 * a * (a + b) * ((n - 4) * a - n * b) * ((n - 2) * a - (n + 2) * b))
    return num / b ** 4


def script_q(p, n: int, form: str = "expanded"):
    """Stability polynomial ``16(p-1)^4 [q4((n-4)/2) - p q4(4/(p-1))]``.

    Radial solutions with ``p >= p_n`` are linearly stable iff the value is
    non-negative.  ``form`` selects the ``"expanded"`` quartic in ``p`` or the
    ``"factored"`` expression.

    A scalar ``p`` is evaluated in exact integer arithmetic and rounded once,
    so both forms return the correctly rounded value even next to a root,
    where floating-point evaluation loses all relative accuracy.  Arrays are
    evaluated in floating point; the factored form then has a removable
    singularity at ``p = 1`` and falls back to the expanded quartic there.
    """
    _require_dimension(n)
    if form not in ("expanded", "factored"):
        raise DomainError(f"unknown form {form!r}; use 'expanded' or 'factored'")
    if np.ndim(p) == 0:
        return _script_q_exact(p, n, form)
    p = np.asarray(p, dtype=float)
    if form == "expanded":
        return _script_q_expanded(p, n)
    near_one = np.abs(p - 1.0) < _P_ONE_WINDOW
    safe = np.where(near_one, 2.0, p)
    return np.where(near_one, _script_q_expanded(p, n), _script_q_factored(safe, n))


def script_q_scale(p: float, n: int) -> float:
    """Sum of the magnitudes of the two terms of the expanded quartic.

    This is the natural size against which rounding in ``script_q`` is
    measured; relative comparisons near a root use it as denominator.
    """
    return abs(n * n * (n - 4) ** 2 * (p - 1) ** 4) + abs(
        128 * p * (p + 1) * ((n - 4) * p - n) * ((n - 2) * p - (n + 2)))


def q_limit_coefficient(n: int) -> float:
    """Leading coefficient ``(n-4)(n³-4n²-128n+256)`` of ``script_q`` in ``p``."""
    _require_dimension(n)
    return float((n - 4) * (n ** 3 - 4 * n ** 2 - 128 * n + 256))


def p_critical(n: int, p_ceiling: float = 1e8, rel_width: float = 1e-13) -> float | None:
    """Unique root of ``script_q`` above ``p_n``, or ``None`` when ``n <= 12``.

    The upper end of the bracket is found by doubling from ``p_n`` until
    ``script_q`` turns positive; bisection then runs until the bracket is
    narrower than ``rel_width`` relative, and on to the floating-point
    resolution, returning the endpoint with the smaller residual.

    Raises
    ------
    DomainError
        If ``n <= 4``.
    NoConvergence
        If doubling passes ``p_ceiling`` without a sign change (only possible
        through misconfiguration, since a root exists for every ``n >= 13``).
    """
    _require_dimension(n)
    if q_limit_coefficient(n) < 0:
        return None
    lo = sobolev_exponent(n)
    if script_q(lo, n) >= 0:
        raise NoConvergence(f"script_q(p_n) is not negative for n={n}")
    hi = 2.0 * lo
    while script_q(hi, n) <= 0:
        lo = hi
        hi *= 2.0
        if hi > p_ceiling:
            raise NoConvergence(f"no sign change of script_q below p={p_ceiling} for n={n}")
    f_lo, f_hi = script_q(lo, n), script_q(hi, n)
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        f_mid = script_q(mid, n)
        if f_mid == 0.0:
            return mid
        if f_mid < 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    if hi - lo > rel_width * hi:
        raise NoConvergence(f"bisection bracket degenerated at [{lo}, {hi}] for n={n}")
    return lo if abs(f_lo) <= abs(f_hi) else hi


def classify(n: int, p: float) -> Regime:
    """Regime of ``Δ²φ = φ^p`` in ``R^n`` for positive radial solutions.

    Exactly ``p = p_n`` (to 1e-12 relative) is the Sobolev-critical case,
    which is always unstable.  A vanishing ``script_q`` counts as stable.
    """
    if not p > 1:
        raise DomainError(f"exponent p must be > 1, got p={p}")
    if n <= 4:
        return Regime.NO_POSITIVE_SOLUTION
    if _is_sobolev(n, p):
        return Regime.CRITICAL_SOBOLEV
    if p < sobolev_exponent(n):
        return Regime.NO_POSITIVE_SOLUTION
    if script_q(p, n) < 0:
        return Regime.SUPERCRITICAL_UNSTABLE
    return Regime.SUPERCRITICAL_STABLE


@dataclass(frozen=True)
class RootSet:
    """Four ascending real roots of ``P`` or ``R`` and their symmetry centre."""

    roots: tuple[float, float, float, float]
    symmetry_center: float
    which: str

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    def to_dict(self) -> dict:
        return {"which": self.which, "roots": list(self.roots),
                "symmetry_center": self.symmetry_center}


def _check_supercritical(params: ProblemParams) -> None:
    if params.p <= params.sobolev_exponent or params.is_critical:
        raise RegimeError(
            f"p={params.p} must exceed p_n={params.sobolev_exponent} for n={params.n}")


def _shifted_coefficients(params: ProblemParams, const: float) -> np.ndarray:
    # q4(m - x) - const as a polynomial in x, highest degree first
    n, m = params.n, params.m
    a = np.poly1d([-1.0, m])
    poly = a * (a + 2) * (a + 2 - n) * (a + 4 - n) - const
    return poly.coeffs


def p_polynomial_coefficients(params: ProblemParams) -> np.ndarray:
    """Monomial coefficients of ``P(λ) = q4(m-λ) - p q4(m)``, highest first."""
    return _shifted_coefficients(params, params.p * q4(params.m, params.n))


def r_polynomial_coefficients(params: ProblemParams) -> np.ndarray:
    """Monomial coefficients of ``R(μ) = q4(m-μ) - q4(m)``, highest first."""
    return _shifted_coefficients(params, q4(params.m, params.n))


def roots_p_polynomial(params: ProblemParams) -> RootSet:
    """Roots ``λ1 <= λ2 <= λ3 < 0 < λ4`` of ``P(λ) = q4(m-λ) - p q4(m)``.

    With ``t = λ - λ*`` and ``λ* = m - (n-4)/2`` the quartic becomes
    ``(t² - c²)(t² - (c+2)²) - p q4(m)``, ``c = (n-4)/2``, a quadratic in
    ``t²``.  The smaller root in ``t²`` is non-negative exactly when the
    stability condition holds; a value within rounding of zero is treated as
    the double root ``λ2 = λ3 = λ*``.
    """
    _check_supercritical(params)
    n, m, p = params.n, params.m, params.p
    c = (n - 4) / 2.0
    center = m - c
    rellich = (c * (c + 2)) ** 2
    load = p * q4(m, n)
    gap = rellich - load
    if gap < 0:
        if gap >= -1e-12 * rellich:
            gap = 0.0
        else:
            raise StabilityViolated(
                f"p*q4(m)={load} exceeds the Rellich constant {rellich} for "
                f"n={n}, p={p}; the middle roots are complex")
    total = c * c + (c + 2) ** 2
    big = 0.5 * (total + math.sqrt((2 * c + 2) ** 2 * 4 + 4 * load))
    small = gap / big
    t_big, t_small = math.sqrt(big), math.sqrt(small)
    roots = (center - t_big, center - t_small, center + t_small, center + t_big)
    return RootSet(roots=roots, symmetry_center=center, which="P")


def roots_r_polynomial(params: ProblemParams) -> RootSet:
    """Roots ``μ1 < μ2 < μ3 = 0 < μ4`` of ``R(μ) = q4(m-μ) - q4(m)``.

    ``0`` and ``2μ*`` are known in closed form; the remaining pair comes from
    the quadratic in ``(μ - μ*)²``, whose roots sum to ``c² + (c+2)²``.
    """
    _check_supercritical(params)
    n, m = params.n, params.m
    c = (n - 4) / 2.0
    center = m - c
    other = c * c + (c + 2) ** 2 - center * center
    t = math.sqrt(other)
    mu4 = center + t
    roots = (2.0 * center - mu4, 2.0 * center, 0.0, mu4)
    return RootSet(roots=roots, symmetry_center=center, which="R")
