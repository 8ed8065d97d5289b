"""Radial shooting for the entire positive solutions of ``Δ²u = u^p``.

Writing ``v = Δu`` the radial equation becomes the first-order system

    u'' = v - (n-1) u'/r,        v'' = u^p - (n-1) v'/r.

A regular solution is fixed by ``u(0) = α`` and ``v(0) = β``; for each
``α > 0`` exactly one ``β < 0`` yields an entire positive solution.  Larger
``β`` makes the trajectory turn upward and blow up, smaller ``β`` makes it
cross zero, so ``β`` is found by bisection on that dichotomy.

Internally the system is integrated in Emden-Fowler variables
``s = log r`` and

    X = (r^m u, r^(m+1) u', r^(m+2) v, r^(m+3) v'),    m = 4/(p-1),

in which it is autonomous: ``dX/ds = M X + (0, 0, 0, X₀^p)``.  For
``p > p_n`` the singular solution is the fixed point ``X*`` and the entire
solution approaches it along its stable manifold.  Close to ``X*`` the
integration switches to the deviation ``Z = X - X*`` (so that ``W - q4(m)^(1/(p-1))``
keeps full relative precision however small it gets) and, once the
nonlinearity is negligible, the single unstable eigen-direction of the
linearisation is projected out at regular intervals.  Without that, rounding
noise grows like ``r^λ₄`` and no double-precision trajectory reaches
``r = 10³`` for large ``α``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, IntegrationError, NoConvergence, RegimeError
from .quartic import ProblemParams, q4

__all__ = [
    "State",
    "ShootingConfig",
    "Outcome",
    "TrajectoryClass",
    "Trajectory",
    "RadialSolution",
    "rhs",
    "taylor_start",
    "integrate",
    "shoot",
    "scale_solution",
    "eval_solution",
    "eval_emden_deviation",
]


@dataclass(frozen=True)
class State:
    """Radial state ``(r, u, u', v, v')`` with ``v = Δu``."""

    r: float
    u: float
    du: float
    v: float
    dv: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.du, self.v, self.dv])


@dataclass(frozen=True)
class ShootingConfig:
    """Numerical settings for :func:`integrate` and :func:`shoot`.

    ``r_start`` and the bisection horizon are measured in the natural length
    ``α^(-1/m)`` of the solution with ``u(0) = α``, so the series hand-off is
    equally accurate for every ``α``.  ``r_max=None`` picks 10³ for
    supercritical and 10² for Sobolev-critical exponents.
    """

    r_start: float = 1e-3
    r_max: float | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    beta_tol: float = 1e-12
    growth_factor: float = 4.0
    max_bisections: int = 200
    samples_per_unit: int = 32
    horizon: float = 1e8
    switch_tol: float = 0.5
    projection_tol: float = 1e-6
    max_step: float = 0.03125

    def __post_init__(self):
        if not 0 < self.r_start < 1:
            raise DomainError(f"r_start must lie in (0, 1), got {self.r_start}")
        if self.r_max is not None and not self.r_max >= 1:
            raise DomainError(f"r_max must be >= 1, got {self.r_max}")
        if min(self.rel_tol, self.abs_tol, self.beta_tol) <= 0:
            raise DomainError("tolerances must be positive")
        if not self.growth_factor > 1:
            raise DomainError(f"growth_factor must exceed 1, got {self.growth_factor}")
        if self.samples_per_unit < 1 or self.max_bisections < 1:
            raise DomainError("samples_per_unit and max_bisections must be positive")

    def resolved_r_max(self, params: ProblemParams) -> float:
        if self.r_max is not None:
            return float(self.r_max)
        return 1e2 if params.is_critical else 1e3

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class Outcome(enum.Enum):
    CROSSED_ZERO = "CrossedZero"
    DIVERGED = "Diverged"
    RESOLVED = "Resolved"


@dataclass(frozen=True)
class TrajectoryClass:
    """Fate of one trajectory; ``radius`` is where the event fired."""

    outcome: Outcome
    radius: float | None = None

    def __str__(self):
        if self.radius is None:
            return self.outcome.value
        return f"{self.outcome.value}(r={self.radius:.6g})"


def rhs(state: State, params: ProblemParams) -> np.ndarray:
    """Derivative ``(u', u'', v', v'')`` of the radial system at ``state``.

    ``u^p`` is evaluated as ``max(u, 0)^p`` so a trajectory that has crossed
    zero keeps producing real numbers until the crossing event stops it.
    """
    r = state.r
    if not r > 0:
        raise DomainError("rhs is singular at r = 0; start from taylor_start")
    n, p = params.n, params.p
    up = max(state.u, 0.0) ** p
    return np.array([
        state.du,
        state.v - (n - 1) * state.du / r,
        state.dv,
        up - (n - 1) * state.dv / r,
    ])


def taylor_start(alpha: float, beta: float, params: ProblemParams, r_start: float) -> State:
    """Regular series solution at ``r_start`` with ``u(0)=alpha``, ``Δu(0)=beta``.

    Uses ``Δ r^k = k(k+n-2) r^(k-2)``:

        u = α + β r²/(2n) + α^p r⁴/(8n(n+2)) + c₆ r⁶
        v = β + α^p r²/(2n) + p α^(p-1) β r⁴/(8n(n+2))

    with ``c₆ = p α^(p-1) β / (48 n(n+2)(n+4))``, so the truncation error is
    ``O(r⁸)`` in ``u`` and ``O(r⁶)`` in ``v``.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not r_start > 0:
        raise DomainError(f"r_start must be positive, got {r_start}")
    n, p = params.n, params.p
    r = r_start
    ap = alpha ** p
    a2 = beta / (2 * n)
    a4 = ap / (8 * n * (n + 2))
    b4 = p * alpha ** (p - 1) * beta / (8 * n * (n + 2))
    a6 = b4 / (6 * (n + 4))
    u = alpha + a2 * r ** 2 + a4 * r ** 4 + a6 * r ** 6
    du = 2 * a2 * r + 4 * a4 * r ** 3 + 6 * a6 * r ** 5
    v = beta + ap / (2 * n) * r ** 2 + b4 * r ** 4
    dv = ap / n * r + 4 * b4 * r ** 3
    return State(r, u, du, v, dv)


class _EmdenSystem:
    """Autonomous form of the radial system in Emden-Fowler variables."""

    def __init__(self, params: ProblemParams):
        self.params = params
        n, p, m = params.n, params.p, params.m
        self.M = np.array([
            [m, 1.0, 0.0, 0.0],
            [0.0, m + 2 - n, 1.0, 0.0],
            [0.0, 0.0, m + 2, 1.0],
            [0.0, 0.0, 0.0, m + 4 - n],
        ])
        self.supercritical = p > params.sobolev_exponent and not params.is_critical
        q = q4(m, n)
        self.amplitude = q ** (1.0 / (p - 1)) if q > 0 else float("nan")
        self.fixed = None
        if self.supercritical:
            a = self.amplitude
            u1 = -m * a
            v = (n - m - 2) * u1
            v1 = -(m + 2) * v
            self.fixed = np.array([a, u1, v, v1])
            self.scale = np.maximum(np.abs(self.fixed), a)
            jac = self.M.copy()
            jac[3, 0] += p * q
            lam, vecs = np.linalg.eig(jac)
            unstable = lam.real > 0
            # exactly one unstable direction for p > p_n (the root λ₄ > 0)
            self.unstable_rate = float(lam.real[unstable].max())
            inv = np.linalg.inv(vecs)
            self._proj = np.real(vecs[:, unstable] @ inv[unstable, :])
            self.eigenvalues = lam
            self.chunk = min(0.5, 1.0 / self.unstable_rate)
        else:
            self.chunk = 0.5

    def f_abs(self, s, x):
        out = self.M @ x
        out[3] += max(x[0], 0.0) ** self.params.p
        return out

    def f_dev(self, s, z):
        p, a = self.params.p, self.amplitude
        out = self.M @ z
        y = z[0] / a
        if y > -1.0:
            out[3] += a ** p * math.expm1(p * math.log1p(y))
        else:
            out[3] -= a ** p
        return out

    def to_dev(self, x):
        return x - self.fixed

    def to_abs(self, z):
        return z + self.fixed

    def deviation(self, z) -> float:
        return float(np.max(np.abs(z) / self.scale))

    def stable_part(self, z):
        return z - self._proj @ z

    def unstable_size(self, z) -> float:
        return self.deviation(self._proj @ z)

    def nonlinearity(self, z) -> float:
        """Relative size of the quadratic term in the deviation dynamics."""
        return 0.5 * (self.params.p - 1) * self.deviation(self.stable_part(z))


def _events(system: _EmdenSystem, cfg: ShootingConfig, dev: bool):
    """Terminal events: zero crossing, profile blow-up, unambiguous growth."""
    off = system.fixed if dev else np.zeros(4)
    a = system.amplitude

    def zero(s, y):
        return y[0] + off[0]
    zero.terminal, zero.direction = True, -1

    def growth(s, y):
        return min(y[1] + off[1], y[2] + off[2])
    growth.terminal, growth.direction = True, 1

    events = [zero, growth]
    if system.supercritical:
        k = cfg.growth_factor

        def blow(s, y):
            return y[0] + off[0] - k * a
        blow.terminal, blow.direction = True, 1
        events.append(blow)
    return events


_EVENT_OUTCOMES = (Outcome.CROSSED_ZERO, Outcome.DIVERGED, Outcome.DIVERGED)


@dataclass(frozen=True)
class Trajectory:
    """Samples of one integration on a uniform grid in ``s = log r``.

    ``w``, ``dw`` and ``y`` are the Emden-Fowler profile ``r^m u``, its
    ``s``-derivative and its offset from the singular amplitude; they come
    straight from the integration variables, so ``y`` and ``dw`` keep full
    relative precision near the fixed point.
    """

    s: np.ndarray
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    y: np.ndarray
    residual: float
    projections: int


class _Collector:
    def __init__(self, system: _EmdenSystem):
        self.system = system
        self.s, self.x, self.z = [], [], []
        self.residual = 0.0

    def add(self, s, x, z=None):
        self.s.append(s)
        self.x.append(x)
        self.z.append(z)

    def residual_check(self, dense, fun, s_a, s_b, ref):
        # derivative of the dense interpolant against the vector field
        h = (s_b - s_a) / 64.0
        if h <= 0:
            return
        mid = 0.5 * (s_a + s_b)
        d = (dense(mid - 2 * h) - 8 * dense(mid - h) + 8 * dense(mid + h) - dense(mid + 2 * h)) / (12 * h)
        y = dense(mid)
        f = fun(mid, y)
        scale = max(np.max(np.abs(y)), np.max(np.abs(f)), ref)
        self.residual = max(self.residual, float(np.max(np.abs(d - f)) / scale))

    def build(self, m: float, projections: int) -> Trajectory:
        s = np.array(self.s)
        x = np.array(self.x).reshape(-1, 4)
        r = np.exp(s)
        u = x[:, 0] * r ** -m
        du = x[:, 1] * r ** (-m - 1)
        v = x[:, 2] * r ** (-m - 2)
        dv = x[:, 3] * r ** (-m - 3)
        w = x[:, 0].copy()
        dw = m * x[:, 0] + x[:, 1]
        y = w - self.system.amplitude
        for i, z in enumerate(self.z):
            if z is not None:
                y[i] = z[0]
                dw[i] = m * z[0] + z[1]
        return Trajectory(s=s, r=r, u=u, du=du, v=v, dv=dv, w=w, dw=dw, y=y,
                          residual=self.residual, projections=projections)


def _natural_length(alpha: float, params: ProblemParams) -> float:
    return alpha ** (-1.0 / params.m)


def _initial_emden_state(alpha, beta, params, r0):
    st = taylor_start(alpha, beta, params, r0)
    m = params.m
    return np.array([r0 ** m * st.u, r0 ** (m + 1) * st.du,
                     r0 ** (m + 2) * st.v, r0 ** (m + 3) * st.dv])


def _run(alpha, beta, params, cfg, s_end, *, rel_tol, abs_tol, record,
         projection_tol=None):
    """Integrate from the series start to ``s_end`` or the first event."""
    system = _EmdenSystem(params)
    r0 = cfg.r_start * _natural_length(alpha, params)
    s0 = math.log(r0)
    x = _initial_emden_state(alpha, beta, params, r0)
    collector = _Collector(system) if record else None
    step = 1.0 / cfg.samples_per_unit
    if collector is not None:
        collector.add(s0, x.copy())

    if x[1] > 0 and x[2] > 0:
        return TrajectoryClass(Outcome.DIVERGED, r0), collector, 0

    dev = False
    z = None
    projecting = False
    prev_drift = math.inf
    projections = 0
    s = s0
    n_chunk = max(1, int(round(system.chunk / step)))
    max_step = cfg.max_step
    ev_abs = _events(system, cfg, dev=False)
    ev_dev = _events(system, cfg, dev=True) if system.supercritical else None
    a_ref = system.amplitude if system.supercritical else 0.0
    fixed_ref = float(np.max(np.abs(system.fixed))) if system.supercritical else 0.0
    k = 0
    while s < s_end:
        k_next = k + n_chunk
        s_next = min(s0 + k_next * step, s_end)
        if s_next <= s:
            break
        if not dev and system.supercritical and system.deviation(system.to_dev(x)) < cfg.switch_tol:
            dev = True
            z = system.to_dev(x)
        if dev:
            delta = max(system.deviation(z), 1e-300)
            atol = rel_tol * delta * system.scale
            y0, fun, events = z, system.f_dev, ev_dev
        else:
            atol = abs_tol
            y0, fun, events = x, system.f_abs, ev_abs
        t_eval = None
        if record:
            t_eval = s0 + step * np.arange(k + 1, k_next + 1)
            t_eval = t_eval[t_eval < s_next]
            t_eval = np.append(t_eval, s_next)
        sol = solve_ivp(fun, (s, s_next), y0, method="DOP853", rtol=rel_tol, atol=atol,
                        events=events, t_eval=t_eval, dense_output=record,
                        max_step=max_step)
        if sol.status == -1:
            raise IntegrationError(f"integrator failed at r={math.exp(s):.6g}: {sol.message}")
        if record:
            for j, sj in enumerate(sol.t):
                yj = sol.y[:, j]
                if dev:
                    collector.add(sj, system.to_abs(yj), yj)
                else:
                    collector.add(sj, yj)
            edges = np.concatenate(([s], sol.t))
            for a, b in zip(edges[:-1], edges[1:]):
                collector.residual_check(sol.sol, fun, a, b, fixed_ref if dev else a_ref)
        if sol.status == 1:
            for idx, times in enumerate(sol.t_events):
                if len(times):
                    return TrajectoryClass(_EVENT_OUTCOMES[idx], math.exp(times[0])), collector, projections
        yend = sol.y[:, -1]
        s = s_next
        k = k_next
        if dev:
            z = yend.copy()
            if projection_tol is not None:
                if not projecting:
                    eta = system.nonlinearity(z)
                    drift = system.unstable_size(z)
                    # start once the nonlinearity is negligible, or as soon as
                    # the unstable component grows, i.e. is dominated by noise
                    if eta <= projection_tol or (eta < 0.5 and drift > prev_drift):
                        projecting = True
                    prev_drift = drift
                if projecting:
                    z = system.stable_part(z)
                    projections += 1
                    if record:
                        collector.x[-1] = system.to_abs(z)
                        collector.z[-1] = z.copy()
            x = system.to_abs(z)
        else:
            x = yend.copy()
    return TrajectoryClass(Outcome.RESOLVED), collector, projections


def integrate(alpha: float, beta: float, params: ProblemParams,
              config: ShootingConfig | None = None, *, r_max: float | None = None,
              stabilize: bool = False, projection_tol: float | None = None,
              rel_tol: float | None = None, abs_tol: float | None = None):
    """Integrate one trajectory from the series start to ``r_max``.

    Returns ``(TrajectoryClass, Trajectory)``; the trajectory holds the
    samples up to the event radius when an event fired.  With
    ``stabilize=True`` (``p > p_n`` only) the unstable direction at the
    singular fixed point is projected out once the local nonlinearity drops
    below ``projection_tol``.

    Raises
    ------
    IntegrationError
        On step-size underflow.
    """
    cfg = config or ShootingConfig()
    r_end = r_max if r_max is not None else cfg.resolved_r_max(params)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    ptol = None
    if stabilize and params.p > params.sobolev_exponent and not params.is_critical:
        ptol = cfg.projection_tol if projection_tol is None else projection_tol
    cls, collector, nproj = _run(
        alpha, beta, params, cfg, math.log(r_end),
        rel_tol=rel_tol or cfg.rel_tol, abs_tol=abs_tol or cfg.abs_tol,
        record=True, projection_tol=ptol)
    return cls, collector.build(params.m, nproj)


def _classify_beta(alpha, beta, params, cfg, s_end):
    cls, _, _ = _run(alpha, beta, params, cfg, s_end, rel_tol=cfg.rel_tol,
                     abs_tol=cfg.abs_tol, record=False)
    return cls


@dataclass(frozen=True)
class RadialSolution:
    """Entire radial solution ``φ_α`` sampled on a log-uniform grid.

    The grid starts at the series hand-off radius; :func:`eval_solution`
    covers ``[0, r_max]``.  ``trajectory_class`` is the fate of the final
    integration (``Resolved`` for a successful solve).
    """

    params: ProblemParams
    alpha: float
    beta: float
    grid: Trajectory
    trajectory_class: TrajectoryClass
    r_max: float
    residual_report: float
    bisection_history: tuple = ()
    projection_tol: float | None = None
    config: ShootingConfig = field(default_factory=ShootingConfig)

    @property
    def resolved(self) -> bool:
        return self.trajectory_class.outcome is Outcome.RESOLVED

    @property
    def r(self) -> np.ndarray:
        return self.grid.r

    @property
    def u(self) -> np.ndarray:
        return self.grid.u

    @property
    def limit_amplitude(self) -> float:
        return q4(self.params.m, self.params.n) ** (1.0 / (self.params.p - 1))

    def states(self):
        g = self.grid
        return [State(*row) for row in zip(g.r, g.u, g.du, g.v, g.dv)]

    def tail_value(self, r: float | None = None) -> float:
        """``r⁴ u(r)^(p-1)``, which tends to ``q4(m)`` as ``r → ∞``."""
        r = self.r_max if r is None else r
        return r ** 4 * eval_solution(self, r) ** (self.params.p - 1)

    def summary(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "r_max": self.r_max,
            "trajectory": str(self.trajectory_class),
            "tail_value": self.tail_value() if self.resolved else None,
            "tail_limit": q4(self.params.m, self.params.n),
            "residual": self.residual_report,
            "projection_tol": self.projection_tol,
            "projections": self.grid.projections,
            "bisections": len(self.bisection_history),
            "samples": int(self.grid.r.size),
        }


def shoot(alpha: float, params: ProblemParams, config: ShootingConfig | None = None) -> RadialSolution:
    """Find ``β = Δφ_α(0)`` by bisection and return the sampled solution.

    ``β = 0`` always diverges; the lower end starts at ``-α^((p+1)/2)`` and
    doubles until the trajectory crosses zero.  Bisection stops once the
    bracket is below ``beta_tol`` relative (or at floating-point resolution).
    Classification runs out to ``horizon`` natural lengths so that every
    ``β`` off the true value is eventually caught by an event.  The final
    trajectory reuses the bisection tolerances, so it follows the same
    discrete flow that selected ``β``, and adds the stabilisation described
    in the module docstring.  If it still leaves the neighbourhood of the
    fixed point the projection threshold is raised tenfold and it is rerun.

    Raises
    ------
    RegimeError
        If ``p < p_n`` (no positive solution exists).
    NoConvergence
        If ``max_bisections`` is exhausted.
    """
    cfg = config or ShootingConfig()
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if params.p < params.sobolev_exponent and not params.is_critical:
        raise RegimeError(
            f"no positive solution for n={params.n}, p={params.p} < p_n={params.sobolev_exponent}")
    r_end = cfg.resolved_r_max(params)
    s_end = max(math.log(r_end), math.log(cfg.horizon * _natural_length(alpha, params)))

    history = []

    def classify(beta):
        cls = _classify_beta(alpha, beta, params, cfg, s_end)
        history.append((beta, cls.outcome))
        return cls

    hi = 0.0
    cls_hi = classify(hi)
    lo = -alpha ** ((params.p + 1) / 2.0)
    for _ in range(200):
        cls_lo = classify(lo)
        if cls_lo.outcome is not Outcome.DIVERGED:
            break
        hi, cls_hi = lo, cls_lo
        lo *= 2.0
    else:
        raise NoConvergence(f"no zero-crossing lower bracket found for alpha={alpha}")

    if cls_lo.outcome is Outcome.RESOLVED:
        beta = lo
    else:
        for _ in range(cfg.max_bisections):
            if hi - lo <= cfg.beta_tol * abs(lo):
                break
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            cls = classify(mid)
            if cls.outcome is Outcome.CROSSED_ZERO:
                lo, cls_lo = mid, cls
            elif cls.outcome is Outcome.DIVERGED:
                hi, cls_hi = mid, cls
            else:
                lo = hi = mid
                cls_lo = cls_hi = cls
                break
        else:
            raise NoConvergence(
                f"bisection on beta not converged after {cfg.max_bisections} steps "
                f"(bracket [{lo}, {hi}])")
        # the endpoint whose trajectory survives longest tracks the separatrix
        # of this very discretisation best
        beta = lo if _survival(cls_lo) >= _survival(cls_hi) else hi

    stabilize = params.p > params.sobolev_exponent and not params.is_critical
    ptol = cfg.projection_tol if stabilize else None
    best = None
    while True:
        cls, traj = integrate(alpha, beta, params, cfg, r_max=r_end, stabilize=stabilize,
                              projection_tol=ptol)
        if best is None or traj.r[-1] > best[1].r[-1]:
            best = (cls, traj, ptol)
        if cls.outcome is Outcome.RESOLVED or ptol is None or ptol >= 1.0:
            break
        ptol *= 10.0
    cls, traj, ptol = best
    return RadialSolution(
        params=params, alpha=float(alpha), beta=float(beta), grid=traj,
        trajectory_class=cls, r_max=float(traj.r[-1]) if cls.outcome is not Outcome.RESOLVED else r_end,
        residual_report=traj.residual, bisection_history=tuple(history),
        projection_tol=ptol, config=cfg)


def _survival(cls: TrajectoryClass) -> float:
    return math.inf if cls.radius is None else cls.radius


def scale_solution(sol: RadialSolution, new_alpha: float) -> RadialSolution:
    """Rescale ``φ_α`` to ``φ_(α·k)`` exactly, ``k = new_alpha / sol.alpha``.

    Uses ``φ_(kα)(r) = k φ_α(k^(1/m) r)``; the Emden-Fowler columns are
    unchanged and the grid moves to ``r k^(-1/m)``.
    """
    if not new_alpha > 0:
        raise DomainError(f"new_alpha must be positive, got {new_alpha}")
    k = new_alpha / sol.alpha
    m = sol.params.m
    shrink = k ** (-1.0 / m)
    g = sol.grid
    grid = replace(
        g,
        s=g.s + math.log(shrink),
        r=g.r * shrink,
        u=g.u * k,
        du=g.du * k ** (1 + 1 / m),
        v=g.v * k ** (1 + 2 / m),
        dv=g.dv * k ** (1 + 3 / m),
    )
    cls = sol.trajectory_class
    if cls.radius is not None:
        cls = TrajectoryClass(cls.outcome, cls.radius * shrink)
    return replace(sol, alpha=float(new_alpha), beta=sol.beta * k ** (1 + 2 / m),
                   grid=grid, trajectory_class=cls, r_max=sol.r_max * shrink,
                   bisection_history=())


def _hermite(sol: RadialSolution):
    g = sol.grid
    return CubicHermiteSpline(g.r, g.u, g.du)


def eval_solution(sol: RadialSolution, r):
    """``φ_α(r)`` for ``0 <= r <= r_max``.

    Below the first grid node the series is used (``φ_α(0) = α`` exactly);
    elsewhere a cubic Hermite interpolant through the stored ``(u, u')``.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(r_arr > sol.r_max * (1 + 1e-12)):
        raise DomainError(f"r must lie in [0, {sol.r_max}]")
    r0 = sol.grid.r[0]
    out = np.empty_like(r_arr)
    inner = r_arr < r0
    if np.any(inner):
        ri = r_arr[inner]
        out[inner] = [taylor_start(sol.alpha, sol.beta, sol.params, x).u if x > 0 else sol.alpha
                      for x in np.atleast_1d(ri)]
    if np.any(~inner):
        out[~inner] = _hermite(sol)(np.minimum(r_arr[~inner], sol.grid.r[-1]))
    return out if out.ndim else float(out)


def eval_emden_deviation(sol: RadialSolution, r):
    """``r^m φ_α(r) - q4(m)^(1/(p-1))`` with full relative precision.

    Interpolates the stored offset in ``s = log r`` using ``dY/ds = dW/ds``.
    """
    r_arr = np.asarray(r, dtype=float)
    g = sol.grid
    m = sol.params.m
    a = sol.limit_amplitude
    out = np.empty_like(r_arr)
    inner = r_arr < g.r[0]
    if np.any(inner):
        ri = np.atleast_1d(r_arr[inner])
        out[inner] = [x ** m * taylor_start(sol.alpha, sol.beta, sol.params, x).u - a
                      if x > 0 else -a for x in ri]
    if np.any(~inner):
        spline = CubicHermiteSpline(g.s, g.y, g.dw)
        out[~inner] = spline(np.minimum(np.log(r_arr[~inner]), g.s[-1]))
    return out if out.ndim else float(out)
