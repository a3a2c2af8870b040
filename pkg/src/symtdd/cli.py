"""Command-line interface: simulate circuit files, run built-in verifiers,
evaluate amplitudes, export diagrams and statistics.

Exit codes: 0 success, 1 parse/usage error, 2 runtime or capacity error,
3 verification failure (the report is still printed).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import report as _report
from . import verify as _verify
from .circuit import CircuitSyntaxError, parse_circuit, simulate
from .core import Manager

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_RUNTIME = 2
EXIT_VERIFY_FAILED = 3


def build_parser():
    p = argparse.ArgumentParser(prog="symtdd",
                                description="Symbolic decision-diagram "
                                            "simulation and verification of "
                                            "quantum circuits.")
    p.add_argument("--epsilon", type=float, default=1e-10,
                   help="engine-wide numeric tolerance (default 1e-10)")
    p.add_argument("--no-rr3", action="store_true",
                   help="disable the RR3 reduction pass after each gate")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("sim", help="simulate a circuit file")
    sim.add_argument("file")
    sim.add_argument("--dot", metavar="PATH",
                     help="write the final diagram as DOT")
    sim.add_argument("--json", metavar="PATH",
                     help="also write the statistics record to a file")

    ver = sub.add_parser("verify", help="run a built-in verification case")
    ver.add_argument("case",
                     choices=["qft", "bv", "grover", "bitflip", "exhaustive"])
    ver.add_argument("-n", type=int, default=3, help="problem size (qft/bv)")
    ver.add_argument("--search", type=int, default=2,
                     help="search qubits (grover)")
    ver.add_argument("--iters", type=int, default=None,
                     help="Grover iterations (default floor(sqrt(2^n) pi/4))")
    ver.add_argument("-f", "--file", help="circuit file (exhaustive)")
    ver.add_argument("--sweep", metavar="A:B:S",
                     help="size sweep start:stop:step (qft/bv)")
    ver.add_argument("--sweep-cap", type=int, default=64,
                     help="largest sweep size (default 64)")
    ver.add_argument("--csv", metavar="PATH", default="sweep.csv",
                     help="sweep CSV output path")
    ver.add_argument("--plot", metavar="PATH",
                     help="also render the sweep curves to an image file")

    ev = sub.add_parser("eval", help="evaluate one amplitude of a circuit")
    ev.add_argument("file")
    ev.add_argument("--qubits", required=True,
                    help="output index bits, qubit 0 first")
    ev.add_argument("--symbols", default="",
                    help="symbol bits in declaration order")
    return p


def _load_circuit(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_RUNTIME) from None
    try:
        return parse_circuit(text)
    except CircuitSyntaxError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE) from None


def cmd_sim(args):
    circuit = _load_circuit(args.file)
    man = Manager(args.epsilon)
    try:
        result = simulate(circuit, man, rr3=not args.no_rr3)
    except (ValueError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    blob = json.dumps(result.stats, sort_keys=True)
    print(blob)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(blob + "\n")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(man.to_dot(result.state))
    return EXIT_OK


def cmd_verify(args):
    rr3 = not args.no_rr3
    if args.sweep:
        if args.case not in ("qft", "bv"):
            print("error: --sweep supports qft and bv only", file=sys.stderr)
            return EXIT_PARSE
        try:
            start, stop, step = (int(x) for x in args.sweep.split(":"))
        except ValueError:
            print("error: --sweep expects start:stop:step", file=sys.stderr)
            return EXIT_PARSE
        stop = min(stop, args.sweep_cap)
        points = _report.sweep_points(args.case, start, stop, step, rr3=rr3)
        rows = _report.write_sweep(points, args.csv, args.plot, args.case)
        print(json.dumps({"schema": 1, "case": args.case, "sweep": True,
                          "rows": len(rows), "csv": args.csv}, sort_keys=True))
        return EXIT_OK
    try:
        if args.case == "qft":
            rep = _verify.verify_qft(args.n, Manager(args.epsilon), rr3=rr3)
        elif args.case == "bv":
            rep = _verify.verify_bv(args.n, Manager(args.epsilon), rr3=rr3)
        elif args.case == "grover":
            _, rep = _verify.grover_success_probability(
                args.search, args.iters, Manager(args.epsilon), rr3=rr3)
        elif args.case == "bitflip":
            rep = _verify.verify_bitflip(Manager(args.epsilon))
        else:
            if not args.file:
                print("error: exhaustive needs --file", file=sys.stderr)
                return EXIT_PARSE
            circuit = _load_circuit(args.file)
            rep = _verify.exhaustive_check(circuit, Manager(args.epsilon),
                                           rr3=rr3)
    except _verify.CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(rep.to_json())
    return EXIT_OK if rep.passed else EXIT_VERIFY_FAILED


def cmd_eval(args):
    circuit = _load_circuit(args.file)
    if len(args.qubits) != circuit.n_qubits or set(args.qubits) - {"0", "1"}:
        print(f"error: --qubits needs {circuit.n_qubits} bits",
              file=sys.stderr)
        return EXIT_PARSE
    if len(args.symbols) != len(circuit.symbols) \
            or set(args.symbols) - {"0", "1"}:
        print(f"error: --symbols needs {len(circuit.symbols)} bits",
              file=sys.stderr)
        return EXIT_PARSE
    man = Manager(args.epsilon)
    try:
        result = simulate(circuit, man, rr3=not args.no_rr3)
    except (ValueError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    qassign = {2 * k: int(b) for k, b in enumerate(args.qubits)}
    sassign = {k: int(b) for k, b in enumerate(args.symbols)}
    amp = man.evaluate(result.state, qassign, sassign)
    print(f"{amp.real:.10f} {amp.imag:.10f}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "sim":
        return cmd_sim(args)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_eval(args)


if __name__ == "__main__":
    sys.exit(main())
