"""Exact solutions and closed-form energies used as oracles.

* ``phi_critical``: the explicit family at ``p = p_n`` (centred at the origin).
* ``phi_singular``: the homogeneous solution ``q4(m)^(1/(p-1)) r^(-m)``.
* ``instability_energy_closed_form``: quadratic-form value of the test function
  ``(λ² + r²)^(-(n-2)/2)`` against the critical solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError
from .quartic import q4, sobolev_exponent

__all__ = [
    "CriticalSolution",
    "SingularSolution",
    "gamma_half",
    "beta_half",
    "sphere_area",
    "phi_critical",
    "phi_critical_laplacian_at_zero",
    "phi_singular",
    "instability_energy_closed_form",
    "instability_integral",
    "radial_laplacian_fd",
    "radial_bilaplacian_fd",
]


def gamma_half(k: int) -> float:
    """``Γ(k/2)`` for a positive integer ``k``, by exact recursion.

    ``Γ(1/2) = √π``, ``Γ(1) = 1`` and ``Γ(x+1) = x Γ(x)``.
    """
    if k <= 0:
        raise DomainError(f"gamma_half needs k >= 1, got {k}")
    if k % 2 == 0:
        return float(math.factorial(k // 2 - 1))
    value = math.sqrt(math.pi)
    x = 0.5
    while 2 * x < k:
        value *= x
        x += 1.0
    return value


def beta_half(a2: int, b2: int) -> float:
    """``B(a2/2, b2/2)`` for positive integers ``a2``, ``b2``."""
    return gamma_half(a2) * gamma_half(b2) / gamma_half(a2 + b2)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in ``R^n``, ``2 π^(n/2) / Γ(n/2)``."""
    return 2.0 * math.pi ** (n / 2.0) / gamma_half(n)


@dataclass(frozen=True)
class CriticalSolution:
    """Critical-exponent solution with scale ``lam`` centred at the origin."""

    n: int
    lam: float = 1.0

    def __post_init__(self):
        if self.n <= 4:
            raise DomainError(f"n must be >= 5, got {self.n}")
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")

    @property
    def p(self) -> float:
        return sobolev_exponent(self.n)

    @property
    def coefficient(self) -> float:
        """``[(n-4)(n-2)n(n+2)]^(1/(p-1))``; note ``1/(p-1) = (n-4)/8``."""
        n = self.n
        return float((n - 4) * (n - 2) * n * (n + 2)) ** ((n - 4) / 8.0)

    @property
    def alpha(self) -> float:
        """Central value ``φ(0)``."""
        return self.coefficient * self.lam ** (-(self.n - 4) / 2.0)

    @classmethod
    def from_alpha(cls, n: int, alpha: float) -> "CriticalSolution":
        """The member of the family with ``φ(0) = alpha``."""
        probe = cls(n, 1.0)
        lam = (probe.coefficient / alpha) ** (2.0 / (n - 4))
        return cls(n, lam)


@dataclass(frozen=True)
class SingularSolution:
    """``Φ(r) = q4(m)^(1/(p-1)) r^(-m)`` for ``p > p_n``."""

    n: int
    p: float

    def __post_init__(self):
        if self.n <= 4:
            raise DomainError(f"n must be >= 5, got {self.n}")
        if not self.p > sobolev_exponent(self.n):
            raise RegimeError(f"singular solution needs p > p_n, got p={self.p}")

    @property
    def m(self) -> float:
        return 4.0 / (self.p - 1.0)

    @property
    def amplitude(self) -> float:
        return q4(self.m, self.n) ** (1.0 / (self.p - 1.0))


def phi_critical(r, sol: CriticalSolution):
    """Evaluate the critical solution at radius ``r`` (scalar or array)."""
    r = np.asarray(r, dtype=float)
    k = (sol.n - 4) / 2.0
    out = sol.coefficient * (sol.lam / (sol.lam ** 2 + r * r)) ** k
    return out if out.ndim else float(out)


def phi_critical_derivatives(r, sol: CriticalSolution):
    """Return ``(u, u', Δu, (Δu)')`` of the critical solution at ``r``.

    Closed forms for ``f = C λ^k (λ²+r²)^(-k)``, ``k = (n-4)/2``.
    """
    r = np.asarray(r, dtype=float)
    n, lam = sol.n, sol.lam
    k = (n - 4) / 2.0
    c = sol.coefficient * lam ** k
    q = lam * lam + r * r
    u = c * q ** (-k)
    du = -2 * k * c * r * q ** (-k - 1)
    # Δ(q^-k) = -2kn q^(-k-1) + 4k(k+1) r² q^(-k-2)
    v = c * (-2 * k * n * q ** (-k - 1) + 4 * k * (k + 1) * r * r * q ** (-k - 2))
    dv = c * (4 * k * (k + 1) * n * r * q ** (-k - 2)
              + 8 * k * (k + 1) * r * q ** (-k - 2)
              - 8 * k * (k + 1) * (k + 2) * r ** 3 * q ** (-k - 3))
    return u, du, v, dv


def phi_critical_laplacian_at_zero(sol: CriticalSolution) -> float:
    """``Δφ(0) = 2n a₂`` with ``a₂`` the ``r²`` Taylor coefficient.

    ``φ = C λ^k (λ² + r²)^(-k)`` gives ``a₂ = -k C λ^(-k-2)``, so
    ``Δφ(0) = -n(n-4) C λ^(-(n-4)/2 - 2)``.
    """
    n = sol.n
    return -n * (n - 4) * sol.coefficient * sol.lam ** (-(n - 4) / 2.0 - 2.0)


def phi_singular(r, sol: SingularSolution):
    """Evaluate the singular solution; ``r`` must be strictly positive."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("the singular solution is undefined at r = 0")
    out = sol.amplitude * r ** (-sol.m)
    return out if out.ndim else float(out)


def instability_integral(n: int, lam: float) -> float:
    """``∫_{R^n} (λ² + |x|²)^(-(n+2)) dx`` via the Beta function.

    Substituting ``r = λt`` gives ``ω λ^(-(n+4)) ∫ t^(n-1) (1+t²)^(-(n+2)) dt``
    and the last integral is ``B(n/2, (n+4)/2) / 2``.
    """
    return 0.5 * sphere_area(n) * lam ** (-(n + 4)) * beta_half(n, n + 4)


def instability_energy_closed_form(n: int, lam: float) -> float:
    """``-8 λ⁴ n(n-2)(n+1) ∫ (λ²+|x|²)^(-(n+2)) dx``; negative, scales as ``λ^(-n)``."""
    if n <= 4:
        raise DomainError(f"n must be >= 5, got {n}")
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    return -8.0 * lam ** 4 * n * (n - 2) * (n + 1) * instability_integral(n, lam)


# Finite-difference checks of the radial PDE.  Each Laplacian uses 5-point
# central stencils for f' and f''; Δ² composes two of them.

def radial_laplacian_fd(f, r: float, n: int, h: float):
    d1 = (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h)
    d2 = (-f(r - 2 * h) + 16 * f(r - h) - 30 * f(r) + 16 * f(r + h) - f(r + 2 * h)) / (12 * h * h)
    return d2 + (n - 1) * d1 / r


def radial_bilaplacian_fd(f, r: float, n: int, h: float | None = None) -> float:
    """``Δ²f(r)`` for a radial function ``f`` by composed 5-point stencils."""
    if h is None:
        h = 1e-2 * max(1.0, r)
    return radial_laplacian_fd(lambda x: radial_laplacian_fd(f, x, n, h), r, n, h)
