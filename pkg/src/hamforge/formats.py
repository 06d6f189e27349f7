"""Plain-text formats for Pauli sums, circuits, paths and spectral reports.

Pauli sums::

    qubits 3
    # comment
    0.5 0:X 1:X
    -1.0

Circuits::

    circuit N 2 m 0
    u1 0 <re00 im00 re01 im01 re10 im10 re11 im11>
    cphase 0 1

Paths are three Pauli-sum blocks, each introduced by a line ``A``, ``B`` or ``C``.
"""

import numpy as np

from .adiabatic import HamiltonianPath
from .circuit import Circuit, Gate
from .pauli import PauliString, PauliSum
from .spectral import SpectralReport


class FormatError(ValueError):
    """Malformed input; the message starts with ``line <k>:`` when a line is at fault."""

    def __init__(self, lineno, msg):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)


def _lines(text):
    """Yield ``(lineno, stripped)`` for non-blank, non-comment lines."""
    for k, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield k, s


def _real(tok, k):
    try:
        return float(tok)
    except ValueError:
        pass
    try:
        z = complex(tok.replace("i", "j"))
    except ValueError:
        raise FormatError(k, f"cannot parse number {tok!r}") from None
    if z.imag != 0:
        raise FormatError(k, f"non-real coefficient {tok!r}; Pauli weights must be real")
    return z.real


def _int(tok, k, what):
    try:
        return int(tok)
    except ValueError:
        raise FormatError(k, f"{what} must be an integer, got {tok!r}") from None


# -- Pauli sums ----------------------------------------------------------------------


def _parse_pauli_lines(items):
    items = list(items)
    if not items:
        raise FormatError(0, "empty Pauli sum: missing 'qubits <n>' header")
    k, head = items[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "qubits":
        raise FormatError(k, f"expected header 'qubits <n>', got {head!r}")
    n = _int(parts[1], k, "qubit count")
    if n < 0:
        raise FormatError(k, "qubit count must be non-negative")
    terms = []
    for k, line in items[1:]:
        toks = line.split()
        coef = _real(toks[0], k)
        axes = []
        for tok in toks[1:]:
            q, sep, a = tok.partition(":")
            if not sep:
                raise FormatError(k, f"expected '<qubit>:<X|Y|Z>', got {tok!r}")
            axes.append((_int(q, k, "qubit index"), a))
        try:
            terms.append((coef, PauliString(n, axes)))
        except ValueError as exc:
            raise FormatError(k, str(exc)) from None
    return PauliSum(n, terms)


def parse_pauli_sum(text):
    return _parse_pauli_lines(_lines(text))


def serialize_pauli_sum(H, comments=()):
    """Canonical text: header, then terms in sorted string order with ``repr`` coefficients."""
    out = [f"# {c}" for c in comments]
    out.append(f"qubits {H.n}")
    for c, s in H.terms:
        out.append(" ".join([repr(float(c))] + [f"{q}:{a}" for q, a in s.axes]))
    return "\n".join(out) + "\n"


# -- circuits ------------------------------------------------------------------------


def parse_circuit(text):
    items = list(_lines(text))
    if not items:
        raise FormatError(0, "empty circuit: missing 'circuit N <n> m <m>' header")
    k, head = items[0]
    p = head.split()
    if len(p) != 5 or p[0] != "circuit" or p[1] != "N" or p[3] != "m":
        raise FormatError(k, f"expected header 'circuit N <n> m <m>', got {head!r}")
    N, m = _int(p[2], k, "N"), _int(p[4], k, "m")
    gates = []
    for k, line in items[1:]:
        toks = line.split()
        op = toks[0]
        try:
            if op == "u1":
                if len(toks) != 10:
                    raise FormatError(k, f"u1 needs a qubit and 8 reals, got {len(toks) - 1} fields")
                q = _int(toks[1], k, "qubit")
                vals = [_real(t, k) for t in toks[2:]]
                U = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
                gates.append(Gate.one_qubit(U.reshape(2, 2), q))
            elif op == "cphase":
                if len(toks) != 3:
                    raise FormatError(k, "cphase needs two qubit indices")
                gates.append(Gate.cphase(_int(toks[1], k, "qubit"), _int(toks[2], k, "qubit")))
            else:
                raise FormatError(k, f"unknown gate {op!r} (expected u1 or cphase)")
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(k, f"{op}: {exc}") from None
    try:
        return Circuit(N, m, gates)
    except (ValueError, TypeError) as exc:
        raise FormatError(k if gates else items[0][0], str(exc)) from None


def _num(x):
    return repr(float(x))


def serialize_circuit(c):
    out = [f"circuit N {c.N} m {c.m}"]
    for g in c.gates:
        if g.is_cphase:
            out.append(f"cphase {g.qubits[0]} {g.qubits[1]}")
        else:
            flat = []
            for z in g.matrix.ravel():
                flat += [_num(z.real), _num(z.imag)]
            out.append(f"u1 {g.qubits[0]} " + " ".join(flat))
    return "\n".join(out) + "\n"


# -- paths ---------------------------------------------------------------------------


def parse_path(text):
    """Read labeled ``A``/``B``/``C`` blocks; absent ``B`` or ``C`` blocks are zero."""
    blocks, current = {}, None
    for k, line in _lines(text):
        if line in ("A", "B", "C"):
            if line in blocks:
                raise FormatError(k, f"block {line} appears twice")
            current = line
            blocks[line] = []
            continue
        if current is None:
            raise FormatError(k, "content before the first block label (A, B or C)")
        blocks[current].append((k, line))
    if "A" not in blocks:
        raise FormatError(0, "path file needs an 'A' block")
    sums = {key: _parse_pauli_lines(v) for key, v in blocks.items()}
    return HamiltonianPath(sums["A"], sums.get("B"), sums.get("C"))


def serialize_path(p):
    return "".join(f"{lab}\n" + serialize_pauli_sum(S) for lab, S in (("A", p.A), ("B", p.B), ("C", p.C)))


# -- spectral reports ----------------------------------------------------------------


def serialize_spectral_report(rep):
    return rep.to_text()


def parse_spectral_report(text):
    items = list(_lines(text))
    if not items or not items[0][1].startswith("method "):
        raise FormatError(items[0][0] if items else 0, "expected 'method <dense|iterative>' first")
    method = items[0][1].split()[1]
    vals, res = [], []
    for k, line in items[1:]:
        t = line.split()
        if len(t) != 4 or not t[0].startswith("lambda_") or t[2] != "residual":
            raise FormatError(k, f"expected 'lambda_<j> <value> residual <r>', got {line!r}")
        vals.append(_real(t[1], k))
        res.append(_real(t[3], k))
    return SpectralReport(np.array(vals), None, method, np.array(res))
