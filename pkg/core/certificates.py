"""Ledger of exact inequalities checked while building a construction."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List
import logging
import operator

from config.errors import InequalityFails
from core.rational import format_rational, parse_rational

logger = logging.getLogger(__name__)

RELATIONS: Dict[str, Callable[[Fraction, Fraction], bool]] = {
    '<': operator.lt,
    '<=': operator.le,
    '==': operator.eq,
    '>=': operator.ge,
    '>': operator.gt,
}


@dataclass(frozen=True)
class Check:
    name: str
    lhs: Fraction
    relation: str
    rhs: Fraction
    passed: bool

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'lhs': format_rational(self.lhs),
            'relation': self.relation,
            'rhs': format_rational(self.rhs),
            'passed': self.passed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Check':
        return cls(data['name'], parse_rational(data['lhs']), data['relation'],
                   parse_rational(data['rhs']), bool(data['passed']))

    def __str__(self) -> str:
        mark = 'ok' if self.passed else 'FAILED'
        return f"{self.name}: {format_rational(self.lhs)} {self.relation} {format_rational(self.rhs)} [{mark}]"


class Certificate:
    """Records every comparison; ``strict`` ledgers raise on the first failure."""

    def __init__(self, strict: bool = False):
        self.strict = strict
        self.checks: List[Check] = []

    def check(self, name: str, lhs: Fraction, relation: str, rhs: Fraction) -> bool:
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        passed = RELATIONS[relation](lhs, rhs)
        record = Check(name, lhs, relation, rhs, passed)
        self.checks.append(record)
        if not passed:
            logger.warning("Certificate check failed: %s", record)
            if self.strict:
                raise InequalityFails(check=name, detail=str(record))
        return passed

    def check_between(self, name: str, lo: Fraction, value: Fraction, hi: Fraction) -> bool:
        """lo <= value <= hi, recorded as two checks."""
        low = self.check(f"{name} (lower)", lo, '<=', value)
        high = self.check(f"{name} (upper)", value, '<=', hi)
        return low and high

    def check_flag(self, name: str, flag: bool) -> bool:
        """Record a boolean fact (membership, containment) as 1 == 1 or 0 == 1."""
        return self.check(name, Fraction(int(bool(flag))), '==', Fraction(1))

    def extend(self, other: 'Certificate', prefix: str = '') -> None:
        for record in other.checks:
            self.checks.append(Check(prefix + record.name, record.lhs, record.relation, record.rhs, record.passed))

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [record for record in self.checks if not record.passed]

    def raise_if_failed(self) -> None:
        failures = self.failures
        if failures:
            raise InequalityFails(check=failures[0].name, detail=f"{len(failures)} failing, first {failures[0]}")

    def __len__(self) -> int:
        return len(self.checks)

    def to_dict(self) -> dict:
        return {
            'passed': self.passed,
            'count': len(self.checks),
            'failed': len(self.failures),
            'checks': [record.to_dict() for record in self.checks],
        }
