"""Timing helpers: per-sample cost versus circuit length, and backend comparison."""

from __future__ import annotations

import gc
import math
import time
from typing import Iterable

import numpy as np

from . import _backend
from .classical_sim import (
    code_form,
    compile_affine,
    encode,
    execute,
    random_bits,
    sample_affine,
    sample_from_code,
    stepwise_code_form,
)
from .corpus import long_css_circuit
from .rewriter import rewrite_circuit

__all__ = [
    "per_sample_times",
    "scaling_table",
    "scaling_study",
    "backend_comparison",
    "circuit_times",
    "linear_fit",
    "slope_t",
]


def _best(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def per_sample_times(
    length: int,
    n_qubits: int = 8,
    n_samples: int = 16,
    methods: Iterable[str] = ("I", "II", "III", "IV"),
    seed: int = 0,
    repeats: int = 3,
) -> dict[str, float]:
    """Seconds per sample for each method on a random CSS circuit of ``length`` gates.

    Compilation (Methods II-IV) is excluded; it happens once per circuit.
    """
    cc = rewrite_circuit(long_css_circuit(n_qubits, length, seed))
    out: dict[str, float] = {}
    methods = tuple(methods)
    if "I" in methods:
        program = encode(cc)
        rand = random_bits(seed, n_samples, cc.n_random)
        out["I"] = _best(lambda: execute(cc, rand, program=program), repeats) / n_samples
    if "II" in methods:
        am = compile_affine(cc)
        out["II"] = _best(lambda: sample_affine(am, cc.labels, n_samples, seed), repeats) / n_samples
    if "III" in methods:
        cf = code_form(compile_affine(cc))
        out["III"] = _best(lambda: sample_from_code(cf, n_samples, seed), repeats) / n_samples
    if "IV" in methods:
        cf4 = stepwise_code_form(cc)
        out["IV"] = _best(lambda: sample_from_code(cf4, n_samples, seed), repeats) / n_samples
    return out


def scaling_table(
    lengths: Iterable[int] = (1_000, 10_000, 100_000),
    n_qubits: int = 8,
    n_samples: int = 16,
    methods: Iterable[str] = ("I", "II", "III", "IV"),
    seed: int = 0,
) -> list[dict]:
    rows = []
    for L in lengths:
        times = per_sample_times(L, n_qubits, n_samples, methods, seed)
        rows.append({"L": L, "backend": _backend.BACKEND, **{f"method_{k}": v for k, v in times.items()}})
    return rows


def scaling_study(
    lengths: Iterable[int] = (1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000),
    n_qubits: int = 8,
    reps: int = 7,
    seed: int = 0,
) -> dict[str, list[tuple[int, float]]]:
    """Repeated per-sample timings of Methods I and III, in shuffled order.

    Method III is timed in its own pass, after the classical programs are
    released and with the collector paused; each point is the best of three
    warm calls, so large Method I programs do not leak into its timings.
    """
    lengths = list(lengths)
    runs = {}
    forms = {}
    for L in lengths:
        cc = rewrite_circuit(long_css_circuit(n_qubits, L, seed + L))
        runs[L] = (cc, encode(cc), random_bits(seed, 8, cc.n_random))
        forms[L] = code_form(compile_affine(cc))
    rng = np.random.default_rng(seed)
    out: dict[str, list[tuple[int, float]]] = {"I": [], "III": []}
    order = [L for L in lengths for _ in range(reps)]
    rng.shuffle(order)
    for L in order:
        cc, program, rand = runs[L]
        t0 = time.perf_counter()
        execute(cc, rand, program=program)
        out["I"].append((L, (time.perf_counter() - t0) / rand.shape[0]))
    del runs, cc, program, rand
    gc.collect()
    rng.shuffle(order)
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for L in order:
            cf = forms[L]
            sample_from_code(cf, 8, seed + 1)
            best = math.inf
            for _ in range(3):
                t0 = time.perf_counter()
                sample_from_code(cf, 64, seed)
                best = min(best, time.perf_counter() - t0)
            out["III"].append((L, best / 64))
    finally:
        if was_enabled:
            gc.enable()
    return out


def backend_comparison(lengths: Iterable[int] = (1_000, 10_000, 100_000), n_qubits: int = 8, n_samples: int = 64) -> list[dict]:
    """Method I execution time with the compiled kernel and with the numpy fallback."""
    rows = []
    for L in lengths:
        cc = rewrite_circuit(long_css_circuit(n_qubits, L))
        program = encode(cc)
        rand = random_bits(0, n_samples, cc.n_random)
        row = {"L": L, "numpy": _best(lambda: execute(cc, rand, program=program, runner=_backend.fallback_run_program), 3)}
        if _backend.BACKEND == "cython":
            row["cython"] = _best(lambda: execute(cc, rand, program=program), 3)
            row["speedup"] = row["numpy"] / row["cython"]
        rows.append(row)
    return rows


def circuit_times(qc, n_samples: int = 16, seed: int = 0) -> dict[str, float]:
    """Seconds per sample for one circuit: Method I when it rewrites, else framed."""
    from .circuit_ir import analyze
    from .frames import framed_run

    prof = analyze(qc)
    if prof.magic_count:
        return {}
    if prof.css_preserving:
        cc = rewrite_circuit(qc)
        program = encode(cc)
        rand = random_bits(seed, n_samples, cc.n_random)
        return {"I": _best(lambda: execute(cc, rand, program=program), 3) / n_samples}
    return {"framed": _best(lambda: framed_run(qc, n_samples, seed), 3) / n_samples}


def linear_fit(x, y) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def slope_t(x, y) -> float:
    """t statistic of the least-squares slope (zero slope as the null)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept, _ = linear_fit(x, y)
    res = y - (slope * x + intercept)
    sxx = float(np.sum((x - x.mean()) ** 2))
    se = float(np.sqrt(np.sum(res**2) / (len(x) - 2) / sxx))
    return slope / se if se > 0 else 0.0
