"""Deterministic run reports: every number is tagged with the step that produced it."""

import hashlib
from dataclasses import dataclass

import numpy as np


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return f"{float(v.real)!r}{float(v.imag):+.17g}j"
    return str(v)


@dataclass(frozen=True)
class Certification:
    name: str
    inequality: str
    lhs: float
    rhs: float
    tol: float

    @property
    def slack(self):
        return self.rhs + self.tol - self.lhs

    @property
    def passed(self):
        return bool(self.lhs <= self.rhs + self.tol)

    def to_text(self):
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"certify {self.name} {verdict} {self.inequality} lhs {_fmt(self.lhs)} rhs {_fmt(self.rhs)} "
            f"tol {_fmt(self.tol)} slack {_fmt(self.slack)}"
        )


class ReductionReport:
    """Collects inputs, tagged values, embedded module reports and certifications.

    No timing or host data is recorded, so equal inputs give byte-identical text.
    """

    def __init__(self, command):
        self.command = command
        self.inputs = []
        self.params = []
        self.rows = []
        self.certs = []

    def add_input(self, name, text):
        digest = hashlib.sha256(text.encode()).hexdigest()[:16]
        self.inputs.append((name, digest))

    def param(self, key, value):
        self.params.append((key, value))

    def record(self, op, key, value):
        self.rows.append(f"{op} {key} {_fmt(value)}")

    def embed(self, text):
        """Append an already-tagged module report verbatim."""
        self.rows.extend(line for line in text.splitlines() if line)

    def certify(self, name, inequality, lhs, rhs, tol=0.0):
        c = Certification(name, inequality, float(lhs), float(rhs), float(tol))
        self.certs.append(c)
        return c.passed

    def threshold(self, lam, a, b):
        """Record ``lambda`` against promise thresholds ``a < b``."""
        if not a < b:
            raise ValueError("thresholds need a < b")
        verdict = "yes" if lam <= a else ("no" if lam >= b else "outside-promise")
        self.rows.append(f"threshold lambda {_fmt(lam)} a {_fmt(a)} b {_fmt(b)} verdict {verdict}")

    @property
    def ok(self):
        return all(c.passed for c in self.certs)

    def failures(self):
        return [c for c in self.certs if not c.passed]

    def to_text(self):
        out = [f"hamforge {self.command}"]
        out += [f"input {name} sha256 {h}" for name, h in self.inputs]
        out += [f"param {k} {_fmt(v)}" for k, v in self.params]
        out += self.rows
        out += [c.to_text() for c in self.certs]
        out.append(f"status {'ok' if self.ok else 'certification-failed'}")
        return "\n".join(out) + "\n"
