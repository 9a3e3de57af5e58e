"""Command-line front end.

Machine output goes to stdout as JSON (``rewrite`` prints the classical
circuit text); human-readable notes go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import bench as _bench
from . import frames, oracle
from .circuit_ir import CircuitError, QuantumCircuit, analyze, parse_circuit
from .classical_sim import (
    code_form,
    compile_affine,
    exact_distribution,
    sample_affine,
    sample_direct,
    sample_from_code,
    stepwise_code_form,
    strong_probability,
)
from .exact import Exact
from .qfe import circuit_contract, tuple_to_json
from .rewriter import rewrite_circuit

__all__ = ["main", "build_parser"]

COMMANDS = ("rewrite", "sample", "prob", "contract", "framed-sample", "magic", "oracle-check", "bench")
CHECK_PATHS = ("auto", "I", "II", "III", "IV", "framed", "rebit", "magic")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _input(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or value not in ("0", "1"):
        raise argparse.ArgumentTypeError(f"expected name=0|1, got {text!r}")
    return name, int(value)


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _lengths(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stabrw", description="Classical simulation of stabilizer circuits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def circuit(sp, required=True):
        sp.add_argument("circuit", nargs=None if required else "?", help="circuit file")

    def inputs(sp):
        sp.add_argument("--input", action="append", type=_input, default=[], metavar="NAME=BIT")

    sp = sub.add_parser("rewrite", help="emit the classical circuit")
    circuit(sp)

    sp = sub.add_parser("sample", help="sample the rewritten circuit")
    sp.add_argument("--method", choices=("I", "II", "III", "IV"), default="I")
    sp.add_argument("--samples", type=_nonneg, default=1000)
    sp.add_argument("--seed", type=_nonneg, default=0)
    inputs(sp)
    circuit(sp)

    sp = sub.add_parser("prob", help="exact probability of one outcome")
    sp.add_argument("--method", choices=("III", "IV"), default="III")
    sp.add_argument("--outcome", required=True, help="bit string ordered like the record labels")
    inputs(sp)
    circuit(sp)

    sp = sub.add_parser("contract", help="quadratic form tuple of the output state")
    circuit(sp)

    sp = sub.add_parser("framed-sample", help="sample through the framed dynamics")
    sp.add_argument("--samples", type=_nonneg, default=1000)
    sp.add_argument("--seed", type=_nonneg, default=0)
    sp.add_argument("--rebit", action="store_true")
    inputs(sp)
    circuit(sp)

    sp = sub.add_parser("magic", help="quasiprobability estimate for magic-state inputs")
    sp.add_argument("--epsilon", type=float, default=0.02)
    sp.add_argument("--p-fail", type=float, default=1e-3)
    sp.add_argument("--seed", type=_nonneg, default=0)
    sp.add_argument("--target", default=None, help="record label (default: first)")
    sp.add_argument("--value", type=int, choices=(0, 1), default=0)
    circuit(sp)

    sp = sub.add_parser("oracle-check", help="compare an exact fast path with the dense oracle")
    sp.add_argument("--path", choices=CHECK_PATHS, default="auto")
    sp.add_argument("--oracle-bound", type=_nonneg, default=oracle.DEFAULT_BOUND)
    inputs(sp)
    circuit(sp)

    sp = sub.add_parser("bench", help="per-sample time versus circuit length")
    sp.add_argument("--lengths", type=_lengths, default=[1_000, 10_000, 100_000])
    sp.add_argument("--qubits", type=_nonneg, default=8)
    sp.add_argument("--samples", type=_nonneg, default=16)
    sp.add_argument("--seed", type=_nonneg, default=0)
    sp.add_argument("--compare-backends", action="store_true")
    circuit(sp, required=False)
    return p


def _load(path: str) -> QuantumCircuit:
    return parse_circuit(Path(path).read_text())


def _bits(text: str) -> list[int]:
    if any(ch not in "01" for ch in text):
        raise ValueError(f"outcome must be a bit string, got {text!r}")
    return [int(ch) for ch in text]


def _exact_str(v: Exact) -> str:
    if v.is_rational():
        f = v.to_fraction()
        return f"{f.numerator}/{f.denominator}"
    return repr(v)


def _cmd_rewrite(args) -> str:
    return rewrite_circuit(_load(args.circuit)).text()


def _cmd_sample(args) -> dict:
    cc = rewrite_circuit(_load(args.circuit))
    ins = dict(args.input)
    if args.method == "I":
        batch = sample_direct(cc, args.samples, args.seed, ins)
    elif args.method == "II":
        batch = sample_affine(compile_affine(cc, ins), cc.labels, args.samples, args.seed)
    else:
        cf = code_form(compile_affine(cc, ins)) if args.method == "III" else stepwise_code_form(cc, ins)
        batch = sample_from_code(cf, args.samples, args.seed, cc.labels)
        batch = type(batch)(batch.labels, batch.rows, batch.seed, args.method)
    return batch.to_json()


def _cmd_prob(args) -> dict:
    cc = rewrite_circuit(_load(args.circuit))
    ins = dict(args.input)
    cf = code_form(compile_affine(cc, ins)) if args.method == "III" else stepwise_code_form(cc, ins)
    y = _bits(args.outcome)
    p = strong_probability(cf, y)
    return {"outcome": y, "probability": f"{p.numerator}/{p.denominator}"}


def _cmd_contract(args) -> dict:
    return tuple_to_json(circuit_contract(_load(args.circuit)))


def _cmd_framed(args) -> dict:
    run = frames.framed_run(_load(args.circuit), args.samples, args.seed, dict(args.input), args.rebit)
    return run.to_json()


def _cmd_magic(args) -> dict:
    qc = _load(args.circuit)
    if not qc.labels:
        raise CircuitError("circuit has no measurement records")
    target = args.target if args.target is not None else qc.labels[0]
    est = frames.magic_estimate(qc, target, args.epsilon, args.p_fail, args.seed, args.value)
    print(f"P({target}={args.value}) ~ {est.estimate:.6f} from {est.n_samples} samples", file=sys.stderr)
    return est.to_json()


def _choose_path(qc: QuantumCircuit) -> str:
    prof = analyze(qc)
    if prof.magic_count:
        return "magic"
    return "I" if prof.css_preserving else "framed"


def fast_distribution(qc: QuantumCircuit, path: str, inputs=None) -> dict[tuple[int, ...], Exact]:
    """Exact distribution from one of the fast simulation paths."""
    if path == "auto":
        path = _choose_path(qc)
    if path == "magic":
        return frames.magic_distribution(qc, inputs)
    if path in ("framed", "rebit"):
        dist = frames.framed_distribution(qc, inputs, rebit=path == "rebit")
    else:
        dist = exact_distribution(rewrite_circuit(qc), path, inputs)
    return {k: Exact.coerce(v) for k, v in dist.items()}


def first_divergence(expected: dict, got: dict) -> tuple | None:
    for key in sorted(set(expected) | set(got)):
        a = expected.get(key, Exact(0))
        b = got.get(key, Exact(0))
        if a != b:
            return key, a, b
    return None


def _cmd_oracle_check(args) -> tuple[dict, int]:
    qc = _load(args.circuit)
    path = _choose_path(qc) if args.path == "auto" else args.path
    ins = dict(args.input)
    dense = oracle.dense_run(qc, ins, bound=args.oracle_bound).dist
    fast = fast_distribution(qc, path, ins)
    div = first_divergence(dense, fast)
    out = {"result": "PASS" if div is None else "FAIL", "path": path, "labels": list(qc.labels), "outcomes": len(dense)}
    if div is not None:
        key, a, b = div
        out["first_divergence"] = {"outcome": list(key), "oracle": _exact_str(a), "fast": _exact_str(b)}
    print(f"{out['result']} {args.circuit} via {path}", file=sys.stderr)
    return out, 0 if div is None else 2


def _cmd_bench(args) -> dict:
    rows = _bench.scaling_table(args.lengths, args.qubits, args.samples, seed=args.seed)
    out: dict = {"per_sample_seconds": rows}
    if args.compare_backends:
        out["backends"] = _bench.backend_comparison(args.lengths, args.qubits)
    if args.circuit:
        out["circuit"] = _bench.circuit_times(_load(args.circuit), args.samples, args.seed)
    return out


_HANDLERS = {
    "rewrite": _cmd_rewrite,
    "sample": _cmd_sample,
    "prob": _cmd_prob,
    "contract": _cmd_contract,
    "framed-sample": _cmd_framed,
    "magic": _cmd_magic,
    "bench": _cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "oracle-check":
            result, status = _cmd_oracle_check(args)
        else:
            result, status = _HANDLERS[args.command](args), 0
    except UsageError as exc:
        print(f"stabrw: usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, oracle.OracleBoundError, CircuitError) as exc:
        print(f"stabrw: error: {exc}", file=sys.stderr)
        return 1
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        sys.stdout.write(json.dumps(result, default=_json_default) + "\n")
    return status


def _json_default(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


if __name__ == "__main__":
    raise SystemExit(main())
