"""Named inequality records used by every report."""
from __future__ import annotations

from dataclasses import asdict, dataclass

DEFAULT_SLACK_TOL = 1e-8


@dataclass(frozen=True)
class Inequality:
    """``lhs <= rhs`` with ``slack = rhs - lhs``; passes iff ``slack >= -tol``."""

    name: str
    lhs: float
    rhs: float
    tol: float = DEFAULT_SLACK_TOL

    @property
    def slack(self) -> float:
        return float(self.rhs - self.lhs)

    @property
    def passed(self) -> bool:
        return self.slack >= -self.tol

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(slack=self.slack, passed=self.passed)
        return d


def leq(name: str, lhs: float, rhs: float, tol: float = DEFAULT_SLACK_TOL) -> Inequality:
    return Inequality(name, float(lhs), float(rhs), float(tol))


def all_pass(items) -> bool:
    return all(item.passed for item in items)
