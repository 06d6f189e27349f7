"""Command-line entry point.

Exit codes: 0 success, 1 a certification failed, 2 bad input.
"""

import argparse
import sys

import numpy as np

from . import adiabatic, clock, gadgets, projection
from ._config import DenseLimitError
from .circuit import canonicalize, optimal_acceptance
from .formats import (
    FormatError,
    parse_circuit,
    parse_path,
    parse_pauli_sum,
    serialize_pauli_sum,
)
from .report import ReductionReport
from .spectral import eigen_low

EXIT_OK, EXIT_CERT, EXIT_INPUT = 0, 1, 2
HISTORY_TOL = 1e-10


class InputError(Exception):
    pass


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _floats(spec, count, what):
    try:
        vals = [float(x) for x in spec.split(",")]
    except ValueError:
        raise InputError(f"{what}: expected {count} comma-separated numbers, got {spec!r}") from None
    if len(vals) != count:
        raise InputError(f"{what}: expected {count} values, got {len(vals)}")
    return vals


# -- compile -------------------------------------------------------------------------


def _compile(c, form, weights):
    if form == "log-local":
        if weights == "auto":
            return clock.build_log_local(c)
        J_in, J_prop = _floats(weights, 2, "--weights for log-local (J_in,J_prop)")
        return clock.build_log_local(c, J_in, J_prop)
    cc = canonicalize(c)
    if weights == "auto":
        return clock.build_two_local(cc)
    J_in, J_1, J_2, J_clock = _floats(weights, 4, "--weights for two-local (J_in,J_1,J_2,J_clock)")
    return clock.build_two_local(cc, J_in=J_in, J_2=J_2, J_1=J_1, J_clock=J_clock)


def _history_checks(rep, H, c, encoding):
    """Record history-state expectations and certify the identities."""
    p_opt, proof = optimal_acceptance(c, return_proof=True)
    target = H.canonical if encoding == "unary" else c
    eta = clock.build_history_state(target, proof, encoding).vector
    rep.record("circuit", "p_acc_opt", p_opt)
    for name, comp in H.components().items():
        val = comp.expectation(eta)
        rep.record("history", f"<eta|{name}|eta>", val)
        if name == "H_out":
            rep.certify("history_out", "|<H_out>-(1-p)|<=tol", abs(val - (1 - p_opt)), 0.0, HISTORY_TOL)
        else:
            rep.certify(f"history_{name}", f"<{name}><=tol", val, 0.0, HISTORY_TOL)
    energy = H.total().expectation(eta)
    rep.record("history", "<eta|H|eta>", energy)
    return energy, p_opt


def _provenance(H, form):
    lines = [f"hamforge compile form {form}"]
    w = H.weights()
    for name in H.components():
        key = {"H_in": "J_in", "H_prop": "J_prop", "H_prop1": "J_1", "H_prop2": "J_2", "H_clock": "J_clock"}.get(name)
        lines.append(f"component {name} weight {w[key]!r}" if key else f"component {name} weight 1.0")
    return lines


def cmd_compile(args):
    text = _read(args.input)
    c = parse_circuit(text)
    H = _compile(c, args.form, args.weights)
    total = H.total()
    _write(args.out, serialize_pauli_sum(total, comments=_provenance(H, args.form)))
    rep = ReductionReport("compile")
    rep.add_input("circuit", text)
    rep.param("form", args.form)
    rep.param("weights", args.weights)
    for k, v in H.weights().items():
        rep.record("weights", k, v)
    rep.record("compile", "qubits", total.n)
    rep.record("compile", "terms", len(total))
    rep.record("compile", "locality", total.locality)
    _history_checks(rep, H, c, "binary" if args.form == "log-local" else "unary")
    if args.report:
        _write(args.report, rep.to_text())
    return EXIT_OK if rep.ok else EXIT_CERT


# -- spectrum ------------------------------------------------------------------------


def cmd_spectrum(args):
    H = parse_pauli_sum(_read(args.input))
    rep = eigen_low(H, args.k, method=args.method, seed=args.seed)
    _write(args.out, rep.to_text())
    return EXIT_OK


# -- gadget-reduce -------------------------------------------------------------------


def _matrix_text(B):
    return " ".join(f"{float(z.real)!r}{float(z.imag):+.17g}j" for z in np.asarray(B).ravel())


def cmd_gadget_reduce(args):
    text = _read(args.input)
    H3 = parse_pauli_sum(text)
    dec = gadgets.decompose_3local(H3)
    H2, info = gadgets.reduce_3to2(H3, args.delta, decomposition=dec)
    _write(args.out, serialize_pauli_sum(
        H2, comments=[f"hamforge gadget-reduce delta {args.delta!r} c_r {dec.c_r!r} M {dec.M}"]))
    rep = ReductionReport("gadget-reduce")
    rep.add_input("hamiltonian", text)
    rep.param("delta", args.delta)
    rep.record("decompose", "c_r", dec.c_r)
    rep.record("decompose", "M", dec.M)
    rep.record("decompose", "n_eff", dec.n_eff)
    for m, (tr, key, cm) in enumerate(zip(dec.triples, dec.keys, dec.coefficients), start=1):
        label = " ".join(f"{q}:{a}" for q, a in key)
        rep.rows.append(f"triple {m} string {label} c_m {cm!r} targets {' '.join(map(str, tr.targets))}")
        for i, B in enumerate(tr.B, start=1):
            rep.rows.append(f"triple {m} B{i} {_matrix_text(B)}")
    rep.record("reduce", "qubits", info.n_out)
    rep.record("reduce", "terms", info.terms_out)
    rep.record("reduce", "locality", info.locality_out)
    if H3.n <= 12:
        res = dec.residual()
        rep.record("decompose", "reconstruction_residual", res)
        rep.certify("reconstruction", "residual<=tol", res, 0.0, 1e-9)
    if dec.M:
        rep.certify("B_floor", "n^-3-min_eig(B)<=tol", dec.n_eff ** -3 - dec.min_B_eigenvalue(), 0.0, 1e-12)
    rep.certify("locality", "locality(H2)<=2", info.locality_out, 2)
    if args.report:
        _write(args.report, rep.to_text())
    return EXIT_OK if rep.ok else EXIT_CERT


# -- verify --------------------------------------------------------------------------


def _verify_circuit(args, rep, form):
    text = _read(_need(args.input, "--in circuit file"))
    rep.add_input("circuit", text)
    c = parse_circuit(text)
    H = _compile(c, form, args.weights)
    for k, v in H.weights().items():
        rep.record("weights", k, v)
    energy, p_opt = _history_checks(rep, H, c, "binary" if form == "log-local" else "unary")
    lam = float(eigen_low(H.total(), 1, seed=args.seed).eigenvalues[0])
    rep.record("spectrum", "lambda", lam)
    rep.certify("variational", "lambda<=1-p_opt", lam, 1 - p_opt, 1e-9 * max(1.0, abs(energy)))
    if args.a is not None and args.b is not None:
        rep.threshold(lam, args.a, args.b)


def _need(value, what):
    if value is None:
        raise InputError(f"missing {what}")
    return value


def cmd_verify(args):
    rep = ReductionReport(f"verify {args.kind}")
    rep.param("seed", args.seed)
    if args.kind == "kitaev":
        _verify_circuit(args, rep, "log-local")
    elif args.kind == "two-local":
        _verify_circuit(args, rep, "two-local")
    elif args.kind == "restriction":
        text = _read(_need(args.input, "--in circuit file"))
        rep.add_input("circuit", text)
        cc = canonicalize(parse_circuit(text))
        rr = clock.verify_restriction_identities(cc, tol=args.tol)
        rep.embed(rr.to_text())
        for name, chk in rr.checks.items():
            rep.certify(name, "deviation<=tol", chk["deviation"], 0.0, args.tol)
    elif args.kind == "gadget":
        text = _read(_need(args.input, "--in Hamiltonian file"))
        rep.add_input("hamiltonian", text)
        delta = _need(args.delta, "--delta")
        rep.param("delta", delta)
        chk = gadgets.verify_reduction(parse_pauli_sum(text), delta)
        rep.embed(chk.to_text())
        rep.certify("reduction_error", "|lambda_H2-lambda_H3|<=c_r*eps", chk.difference, chk.c_r * chk.eps_measured,
                    1e-9 * max(1.0, chk.c_r))
        if chk.spectrum_check is not None:
            rep.certify("effective_spectrum", "max_eig_dist<=eps", chk.spectrum_check.max_eig_dist, chk.spectrum_check.eps_measured, 1e-9)
        rep.certify("all_plus", "ground(H_eff) in all-plus sector", 0.0 if chk.all_plus_ok else 1.0, 0.0)
    elif args.kind == "projection":
        if args.random:
            rng = np.random.default_rng(args.seed)
            for _ in range(args.random):
                res = projection.projection_bounds(projection.random_instance(rng), tol=args.tol)
                rep.embed(res.to_text())
                rep.certify("projection_sandwich", "lower-tol<=lambda<=restricted+tol",
                            0.0 if res.ok else 1.0, 0.0)
        else:
            J = 10.0 if args.J is None else args.J
            res = projection.projection_bounds(projection.canned_instance(J), tol=args.tol)
            rep.embed(res.to_text())
            rep.certify("projection_lower", "lower<=lambda", res.lower, res.lambda_H, args.tol)
            rep.certify("projection_upper", "lambda<=restricted", res.lambda_H, res.lambda_restricted, args.tol)
    _write(args.report, rep.to_text())
    return EXIT_OK if rep.ok else EXIT_CERT


# -- adiabatic-run -------------------------------------------------------------------


def cmd_adiabatic(args):
    text = _read(args.path)
    p = parse_path(text)
    if args.delta is not None:
        p = adiabatic.gadget_lift_path(p, args.delta).path
    vecs = np.linalg.eigh(p.dense(0.0))[1]
    res = adiabatic.evolve(p, args.time, args.steps, vecs[:, 0])
    _write(args.report, res.to_csv())
    if args.min_fidelity is not None and res.fidelity < args.min_fidelity:
        sys.stderr.write(f"certification failed: fidelity {res.fidelity!r} < {args.min_fidelity!r}\n")
        return EXIT_CERT
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="hamforge", description="Circuit-to-Hamiltonian compiler and gadget toolkit.")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a circuit file into a clock Hamiltonian")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--form", choices=["log-local", "two-local"], default="two-local")
    p.add_argument("--weights", default="auto", help="auto, J_in,J_prop (log-local) or J_in,J_1,J_2,J_clock")
    p.add_argument("--out", default="-")
    p.add_argument("--report")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("spectrum", help="lowest eigenvalues of a Pauli-sum file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("-k", type=int, default=1)
    p.add_argument("--method", choices=["dense", "iterative"], default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("gadget-reduce", help="reduce a 3-local Pauli sum to a 2-local one")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--report")
    p.set_defaults(func=cmd_gadget_reduce)

    p = sub.add_parser("verify", help="run a certification")
    p.add_argument("--kind", required=True, choices=["kitaev", "two-local", "gadget", "restriction", "projection"])
    p.add_argument("--in", dest="input")
    p.add_argument("--weights", default="auto")
    p.add_argument("--delta", type=float)
    p.add_argument("--J", type=float, help="penalty for the canned projection instance")
    p.add_argument("--random", type=int, default=0, help="number of seeded random projection instances")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--a", type=float, help="yes threshold for the ground energy")
    p.add_argument("--b", type=float, help="no threshold for the ground energy")
    p.add_argument("--report", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("adiabatic-run", help="evolve along a Hamiltonian path and emit a CSV")
    p.add_argument("--path", required=True)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--delta", type=float, help="lift 3-local terms with gadgets first")
    p.add_argument("--min-fidelity", type=float)
    p.add_argument("--report", default="-")
    p.set_defaults(func=cmd_adiabatic)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FormatError, DenseLimitError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ValueError, TypeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
