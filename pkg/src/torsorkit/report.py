"""Check records and reports.

Statuses are three-valued: ``pass`` (hypotheses certified and conclusion
verified), ``hypothesis-uncertified`` (conclusion verified, but a freeness
certificate standing in for faithful flatness was not found) and ``fail``.
Check ids are stable strings keyed to the statements they verify.
"""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
UNCERTIFIED = "hypothesis-uncertified"


@dataclass
class Check:
    check_id: str
    ref: str
    status: str
    witness: str | None = None
    dims: dict | None = None

    def to_json(self):
        out = {"id": self.check_id, "paper_ref": self.ref, "status": self.status}
        out["witnesses"] = [self.witness] if self.witness else []
        out["dims"] = dict(sorted((self.dims or {}).items()))
        return out


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)

    def add(self, check_id, ref, ok, witness=None, dims=None, certified=True):
        if ok:
            status = PASS if certified else UNCERTIFIED
        else:
            status = FAIL
        self.checks.append(Check(check_id, ref, status, witness, dims))
        return ok

    def extend(self, other: "Report"):
        self.checks.extend(other.checks)

    @property
    def ok(self):
        return all(c.status != FAIL for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.status == FAIL]

    def find(self, check_id):
        for c in self.checks:
            if c.check_id == check_id:
                return c
        return None

    def to_json(self):
        return {"name": self.name, "checks": [c.to_json() for c in self.checks]}

    def summary(self):
        lines = [f"[{self.name}]"]
        for c in self.checks:
            extra = f"  witness={c.witness}" if c.witness else ""
            dims = f"  dims={c.dims}" if c.dims else ""
            lines.append(f"  {c.status:<24} {c.check_id}{extra}{dims}")
        return "\n".join(lines)
