"""
sktpol - Checks
Named pass/fail records collected by every computation for its report
"""

from dataclasses import dataclass, field
from typing import List


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class CheckLog:
    """Ordered list of checks; passed is true only when every entry passed"""

    checks: List[Check] = field(default_factory=list)

    def record(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return bool(passed)

    def extend(self, other: "CheckLog") -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def to_list(self) -> List[dict]:
        return [check.to_dict() for check in self.checks]
