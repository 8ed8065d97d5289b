from __future__ import annotations

from dataclasses import dataclass, field

NO_THEOREM = "no theorem applies"


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one property check.

    ``applicable`` is False where no theorem covers the regime; the check is
    still evaluated but its status reads "no theorem applies".
    """

    name: str
    passed: bool
    margin: float
    applicable: bool = True
    detail: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        if not self.applicable:
            return NO_THEOREM
        return "pass" if self.passed else "fail"

    @property
    def failed(self) -> bool:
        """True only for a failure in a regime where a theorem applies."""
        return self.applicable and not self.passed

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "passed": self.passed,
            "applicable": self.applicable,
            "margin": self.margin,
            "detail": self.detail,
        }
        out.update(self.extra)
        return out
