"""Entire radial solutions of the biharmonic Lane-Emden equation ``Δ²φ = φ^p``.

Modules, bottom up:

* :mod:`~biharmonic.quartic`: the stability polynomial, the critical exponent
  ``p_c`` and the regime classifier.
* :mod:`~biharmonic.closedform`: exact solutions used as oracles.
* :mod:`~biharmonic.radial_ode`: the shooting solver.
* :mod:`~biharmonic.emden`: Emden-Fowler profiles and property checks.
* :mod:`~biharmonic.spectral`: Rellich and energy-based stability probes.
* :mod:`~biharmonic.cli`: the ``biharmonic`` command.
"""

from .closedform import CriticalSolution, SingularSolution, instability_energy_closed_form
from .emden import (EmdenProfile, IntersectionReport, check_bound, check_intersection,
                    check_monotone, emden_ode_residual, to_emden)
from .errors import (BiharmonicError, DomainError, IntegrationError, NoConvergence,
                     RegimeError, StabilityViolated)
from .quartic import (ProblemParams, Regime, RootSet, classify, p_critical, q4,
                      q_limit_coefficient, rellich_constant, roots_p_polynomial,
                      roots_r_polynomial, script_q, sobolev_exponent)
from .radial_ode import (Outcome, RadialSolution, ShootingConfig, TrajectoryClass,
                         eval_solution, integrate, scale_solution, shoot)
from .report import VerificationReport
from .spectral import (CriticalZeta, EnergyReport, HardyProfile, energy,
                       instability_probe, rellich_pointwise_check)

__version__ = "0.1.0"

__all__ = [
    "BiharmonicError", "CriticalSolution", "CriticalZeta", "DomainError", "EmdenProfile",
    "EnergyReport", "HardyProfile", "IntegrationError", "IntersectionReport", "NoConvergence",
    "Outcome", "ProblemParams", "RadialSolution", "Regime", "RegimeError", "RootSet",
    "ShootingConfig", "SingularSolution", "StabilityViolated", "TrajectoryClass",
    "VerificationReport", "check_bound", "check_intersection", "check_monotone", "classify",
    "emden_ode_residual", "energy", "eval_solution", "instability_energy_closed_form",
    "instability_probe", "integrate", "p_critical", "q4", "q_limit_coefficient",
    "rellich_constant", "rellich_pointwise_check", "roots_p_polynomial", "roots_r_polynomial",
    "scale_solution", "script_q", "shoot", "sobolev_exponent", "to_emden",
]
