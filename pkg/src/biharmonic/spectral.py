"""Quadratic-form checks for the linearised operator ``Δ² - p φ^(p-1)``.

Stability is certified pointwise: ``p r⁴ φ^(p-1) <= n²(n-4)²/16`` puts the
potential under the Rellich constant, so the form is non-negative.
Instability is certified variationally by exhibiting a radial test function
with negative energy ``∫(Δζ)² - ∫ p φ^(p-1) ζ²``.

Every integral is computed in ``s = log r``:

    ∫_{R^n} f(|x|) dx = ω_{n-1} ∫ f(e^s) e^{ns} ds,

with composite Gauss-Legendre panels.  The error estimate is the change
between the full rule and the rule with half as many nodes per panel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from .closedform import CriticalSolution, SingularSolution, sphere_area
from .emden import EmdenProfile, to_emden
from .errors import DomainError
from .quartic import ProblemParams, q4, rellich_constant
from .radial_ode import RadialSolution, eval_emden_deviation
from .report import VerificationReport

__all__ = [
    "CriticalZeta",
    "HardyProfile",
    "TestFunction",
    "EnergyReport",
    "energy",
    "rellich_pointwise_check",
    "default_probe_grid",
    "instability_probe",
    "RELLICH_SLACK",
]

RELLICH_SLACK = 1e-9
PANEL_WIDTH = 0.25
# below this the integrands are e^(-40) relative to their peak
_DECAY = 40.0


@dataclass(frozen=True)
class CriticalZeta:
    """``ζ(r) = (λ² + r²)^(-(n-2)/2)``."""

    lam: float
    n: int

    def __post_init__(self):
        if self.n < 5:
            raise DomainError(f"CriticalZeta needs n >= 5 for finite energy, got n={self.n}")
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")

    @property
    def kind(self) -> str:
        return "CriticalZeta"

    def breakpoints(self) -> np.ndarray:
        c = math.log(self.lam)
        return np.array([c - _DECAY / (self.n - 4) - 1.0, c, c + _DECAY / self.n + 1.0])

    def _parts(self, s):
        r = np.exp(s)
        k = (self.n - 2) / 2.0
        q = self.lam ** 2 + r * r
        zeta = q ** (-k)
        lap = -2 * k * self.n * q ** (-k - 1) + 4 * k * (k + 1) * r * r * q ** (-k - 2)
        return r, zeta, lap

    def bilaplacian_density(self, s):
        """``(Δζ)² r^n`` as a function of ``s``."""
        r, _, lap = self._parts(s)
        return lap * lap * r ** self.n

    def potential_density(self, s):
        """``ζ² r^(n-4)``; multiplied by ``r⁴V`` this is the potential integrand."""
        r, zeta, _ = self._parts(s)
        return zeta * zeta * r ** (self.n - 4)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lambda": self.lam, "n": self.n}


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return (t ** 3 * (10 - 15 * t + 6 * t * t),
            30 * t * t * (1 - t) ** 2,
            60 * t * (1 - t) * (1 - 2 * t))


@dataclass(frozen=True)
class HardyProfile:
    """``ζ(r) = r^(-σ) χ(r)`` with ``χ = 1`` on ``[inner_cut, outer_cut]``.

    ``χ`` switches on over the decade below ``inner_cut`` and off over the
    decade above ``outer_cut`` with quintic smoothsteps in ``log r``, so
    ``ζ`` is C² and compactly supported.
    """

    sigma: float
    inner_cut: float
    outer_cut: float
    n: int

    def __post_init__(self):
        if not 0 < self.inner_cut < self.outer_cut:
            raise DomainError(
                f"need 0 < inner_cut < outer_cut, got {self.inner_cut}, {self.outer_cut}")

    @property
    def kind(self) -> str:
        return "HardyProfile"

    @classmethod
    def rellich(cls, n: int, inner_cut: float, outer_cut: float) -> "HardyProfile":
        """The profile with the Rellich-extremal exponent ``σ = (n-4)/2``."""
        return cls((n - 4) / 2.0, inner_cut, outer_cut, n)

    def breakpoints(self) -> np.ndarray:
        w = math.log(10.0)
        a, b = math.log(self.inner_cut), math.log(self.outer_cut)
        return np.array([a - w, a, b, b + w])

    def _chi(self, s):
        sa, sb, sc, sd = self.breakpoints()
        w = sb - sa
        up, dup, ddup = _smoothstep((s - sa) / w)
        dn, ddn, dddn = _smoothstep((sd - s) / w)
        chi = up * dn
        dchi = dup / w * dn - up * ddn / w
        d2chi = ddup / w ** 2 * dn - 2 * dup * ddn / w ** 2 + up * dddn / w ** 2
        return chi, dchi, d2chi

    def bilaplacian_density(self, s):
        s = np.asarray(s, dtype=float)
        chi, d1, d2 = self._chi(s)
        n, sig = self.n, self.sigma
        bracket = d2 + (n - 2 - 2 * sig) * d1 + sig * (sig - (n - 2)) * chi
        return np.exp((n - 4 - 2 * sig) * s) * bracket * bracket

    def potential_density(self, s):
        s = np.asarray(s, dtype=float)
        chi, _, _ = self._chi(s)
        return np.exp((self.n - 4 - 2 * self.sigma) * s) * chi * chi

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sigma": self.sigma, "inner_cut": self.inner_cut,
                "outer_cut": self.outer_cut, "n": self.n}


TestFunction = Union[CriticalZeta, HardyProfile]


@dataclass(frozen=True)
class EnergyReport:
    bilaplacian_term: float
    potential_term: float
    energy: float
    quadrature_error_estimate: float
    test: TestFunction
    converged: bool = True

    @property
    def negative(self) -> bool:
        return self.energy < 0

    def to_dict(self) -> dict:
        return {
            "bilaplacian_term": self.bilaplacian_term,
            "potential_term": self.potential_term,
            "energy": self.energy,
            "quadrature_error_estimate": self.quadrature_error_estimate,
            "converged": self.converged,
            "test_function": self.test.to_dict(),
        }


# -- potentials, all returned as r ↦ r⁴ V(r) --------------------------------

def _critical_r4v(sol: CriticalSolution):
    n, lam = sol.n, sol.lam
    c = float((n - 2) * n * (n + 2) * (n + 4))

    def r4v(r):
        return c * (lam * r) ** 4 / (lam * lam + r * r) ** 4
    return r4v


def _solution_r4v(sol: RadialSolution):
    if not sol.resolved:
        raise DomainError(f"solution is not resolved ({sol.trajectory_class})")
    params = sol.params
    p, m = params.p, params.m
    a = sol.limit_amplitude
    r0, r_top = sol.grid.r[0], sol.r_max
    n = params.n
    critical = params.is_critical
    tail = p * q4(m, n)
    u_top = float(sol.grid.u[-1]) if critical else 0.0

    def r4v(r):
        r = np.asarray(r, dtype=float)
        if critical:
            # φ decays like r^(4-n) once the profile has left its core
            out = p * r ** 4 * (u_top * (r_top / r) ** (n - 4)) ** (p - 1)
        else:
            out = np.full_like(r, tail)
        inner = r < r0
        if np.any(inner):
            ri = r[inner]
            # two series terms suffice: r⁴ makes the contribution negligible
            u = sol.alpha + sol.beta * ri * ri / (2 * n)
            out[inner] = p * ri ** 4 * u ** (p - 1)
        mid = ~inner & (r <= r_top)
        if np.any(mid):
            w = a + eval_emden_deviation(sol, r[mid])
            out[mid] = p * np.maximum(w, 0.0) ** (p - 1)
        return out
    return r4v


def _as_r4v(potential) -> Callable:
    if potential is None:
        return lambda r: np.zeros_like(np.asarray(r, dtype=float))
    if isinstance(potential, CriticalSolution):
        return _critical_r4v(potential)
    if isinstance(potential, SingularSolution):
        const = potential.p * q4(potential.m, potential.n)
        return lambda r: np.full_like(np.asarray(r, dtype=float), const)
    if isinstance(potential, RadialSolution):
        return _solution_r4v(potential)
    if callable(potential):
        return lambda r: np.asarray(r, dtype=float) ** 4 * potential(np.asarray(r, dtype=float))
    raise DomainError(f"unsupported potential of type {type(potential).__name__}")


def _panels(breaks: np.ndarray) -> np.ndarray:
    edges = [breaks[0]]
    for a, b in zip(breaks[:-1], breaks[1:]):
        k = max(1, int(math.ceil((b - a) / PANEL_WIDTH)))
        edges.extend(np.linspace(a, b, k + 1)[1:])
    return np.asarray(edges)


def _gauss(edges: np.ndarray, nodes: int):
    x, wts = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    w = (half[:, None] * wts[None, :]).ravel()
    return s, w


def energy(test: TestFunction, potential, params: ProblemParams | None = None,
           *, nodes: int = 24) -> EnergyReport:
    """Energy of ``test`` against the potential ``p φ^(p-1)``.

    ``potential`` may be a :class:`RadialSolution` (extended beyond ``r_max``
    by the tail law ``r⁴V → p q4(m)``), a :class:`CriticalSolution`, a
    :class:`SingularSolution`, ``None`` for zero, or a callable ``V(r)``.
    ``params`` is only used to cross-check the dimension.
    """
    if params is not None and params.n != test.n:
        raise DomainError(f"test function has n={test.n}, problem has n={params.n}")
    if nodes < 4 or nodes % 2:
        raise DomainError(f"nodes must be an even integer >= 4, got {nodes}")
    r4v = _as_r4v(potential)
    omega = sphere_area(test.n)
    edges = _panels(test.breakpoints())

    def terms(k):
        s, w = _gauss(edges, k)
        bil = omega * float(np.dot(w, test.bilaplacian_density(s)))
        pot = omega * float(np.dot(w, r4v(np.exp(s)) * test.potential_density(s)))
        return bil, pot

    bil, pot = terms(nodes)
    bil_h, pot_h = terms(nodes // 2)
    err = abs((bil - pot) - (bil_h - pot_h))
    scale = abs(bil) + abs(pot)
    converged = bool(np.isfinite(bil) and np.isfinite(pot) and err <= 1e-4 * max(scale, 1e-300))
    return EnergyReport(bil, pot, bil - pot, err, test, converged)


def rellich_pointwise_check(sol: Union[RadialSolution, EmdenProfile]) -> VerificationReport:
    """``max p r⁴ u^(p-1) <= n²(n-4)²/16 (1 + 1e-9)`` over the samples.

    ``p r⁴ u^(p-1) = p W^(p-1)`` depends only on the Emden-Fowler profile, so
    the verdict is the same for every member of a scaling family.
    """
    profile = sol if isinstance(sol, EmdenProfile) else to_emden(sol)
    params = profile.params
    p, n = params.p, params.n
    w = profile.limit_amplitude + profile.y
    values = p * np.maximum(w, 0.0) ** (p - 1)
    i = int(np.argmax(values))
    bound = rellich_constant(n)
    peak = float(values[i])
    return VerificationReport(
        name="rellich_pointwise", passed=peak <= bound * (1 + RELLICH_SLACK),
        margin=1.0 - peak / bound,
        detail=f"max p r^4 u^(p-1) = {peak:.10g} vs {bound:.10g} at s={profile.s[i]:.4g}",
        extra={"peak": peak, "rellich_constant": bound})


def default_probe_grid(sol: RadialSolution) -> list[HardyProfile]:
    """Rellich-exponent profiles with cuts placed in natural units of ``sol``.

    Inner cuts sit 1, 10 and 100 natural lengths out; plateaus span 2, 4 or
    6 decades.
    """
    n = sol.params.n
    ell = sol.alpha ** (-1.0 / sol.params.m)
    grid = []
    for decades in (2, 4, 6):
        for inner in (1.0, 10.0, 100.0):
            grid.append(HardyProfile.rellich(n, inner * ell, inner * ell * 10.0 ** decades))
    return grid


def instability_probe(sol: RadialSolution, grid: Iterable[TestFunction] | None = None,
                      *, include_critical_zeta: bool = False,
                      nodes: int = 24) -> EnergyReport | None:
    """First test function in ``grid`` with negative energy, or ``None``.

    ``None`` means the probe was inconclusive; it is not a stability verdict.
    With ``include_critical_zeta`` the sweep starts with ``(λ² + r²)^(-(n-2)/2)``
    at the scale of the critical solution with the same central value.
    """
    tests: list[TestFunction] = []
    if include_critical_zeta:
        n = sol.params.n
        lam = CriticalSolution.from_alpha(n, sol.alpha).lam
        tests.extend(CriticalZeta(lam * k, n) for k in (1.0, 0.5, 2.0))
    tests.extend(default_probe_grid(sol) if grid is None else grid)
    for test in tests:
        report = energy(test, sol, sol.params, nodes=nodes)
        if report.energy < 0 and report.energy + report.quadrature_error_estimate < 0:
            return report
    return None
