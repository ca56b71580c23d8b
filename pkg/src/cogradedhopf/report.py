"""Deterministic certificate reports produced by the verification suites.

A report is an ordered list of named checks, each tagged with the law it
verifies, a pass/fail flag and a witness on failure. Identical inputs yield
byte-identical text and JSON renderings, so reports can be digested and
compared across export/reload round trips.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

TOOL_NAME = "cogradedhopf"
TOOL_VERSION = "0.1.0"


@dataclass(frozen=True)
class CheckEntry:
    name: str
    law: str
    passed: bool
    witness: Optional[str] = None


@dataclass
class CertificateReport:
    title: str
    window: str
    subject_digest: str = ""
    entries: list = field(default_factory=list)

    def add(self, name: str, law: str, passed: bool, witness: Optional[str] = None):
        if passed:
            witness = None
        self.entries.append(CheckEntry(name, law, bool(passed), witness))

    def extend(self, other: "CertificateReport", prefix: str = ""):
        for e in other.entries:
            name = prefix + e.name if prefix else e.name
            self.entries.append(CheckEntry(name, e.law, e.passed, e.witness))

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e.passed]

    def counts(self) -> "tuple[int, int]":
        ok = sum(1 for e in self.entries if e.passed)
        return ok, len(self.entries) - ok

    def to_dict(self) -> dict:
        return {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "title": self.title,
            "subject_digest": self.subject_digest,
            "window": self.window,
            "checks": [
                {
                    "name": e.name,
                    "law": e.law,
                    "passed": e.passed,
                    "witness": e.witness,
                }
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def text(self) -> str:
        ok, bad = self.counts()
        lines = [
            "%s %s -- %s" % (TOOL_NAME, TOOL_VERSION, self.title),
            "subject: %s" % (self.subject_digest or "-"),
            "window: %s" % self.window,
            "",
        ]
        for e in self.entries:
            status = "PASS" if e.passed else "FAIL"
            line = "[%s] %-44s (%s)" % (status, e.name, e.law)
            if e.witness:
                line += "\n       witness: %s" % e.witness
            lines.append(line)
        lines.append("")
        lines.append("%d passed, %d failed" % (ok, bad))
        lines.append("report digest: %s" % self.digest())
        return "\n".join(lines)
