from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabrw import corpus, frames, oracle, qfe
from stabrw import gf2core as g
from stabrw.circuit_ir import CircuitError, Instruction, QuantumCircuit, parse_circuit
from stabrw.exact import Exact

from conftest import dense_fractions

ALL_GATES = corpus.CSS_GATES + corpus.NON_CSS_GATES
CONTROLLED = ("X", "Z", "CNOT", "H", "S", "CZ")


def test_frame_update_fixture():
    F1 = frames.frame_update(np.zeros((4, 4)), qfe.elementary_qfe("CZ"))
    assert F1.tolist() == qfe.elementary_qfe("CZ").Q.tolist()
    assert F1.tolist() == [[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 1, 0, 0]]
    F2 = frames.frame_update(F1, qfe.elementary_qfe("CNOT"))
    assert F2.tolist() == [[0, 0, 0, 0], [0, 2, 0, 1], [0, 0, 0, 0], [0, 1, 0, 0]]


@pytest.mark.parametrize("kind", ["X", "Z", "CNOT", "SWAP", "DEPHZ"])
def test_css_gates_keep_zero_frame(kind):
    f = qfe.elementary_qfe(kind)
    assert not frames.frame_update(np.zeros((2 * f.n_in,) * 2), f).any()


def test_frame_update_dimension_check():
    with pytest.raises(ValueError):
        frames.frame_update(np.zeros((2, 2)), qfe.elementary_qfe("CNOT"))


def test_frame_correct_trivial():
    F = np.array([[1, 1], [1, 2]])
    H = np.array([[0], [1]])
    assert np.array_equal(frames.frame_correct(F, H, np.zeros((2, 1)), np.zeros((1, 1))), F)


def _random_state(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 3))
    qc = corpus.random_circuit(rng, n, int(rng.integers(n, 10)), gates=ALL_GATES, adaptive=False, channels=False)
    body = [i for i in qc.instructions if i.kind not in ("MZ", "MX")]
    return QuantumCircuit(n, tuple(body))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_frame_correct_keeps_symbol(seed, seed2):
    qc = _random_state(seed)
    f = qfe.circuit_contract(qc)
    rho, _ = oracle.dense_state(qc)
    n = f.n_out
    rng = np.random.default_rng(seed2)
    F = qfe.g.quad_canon(rng.integers(0, 4, size=(2 * n, 2 * n)) * 2 + np.diag(rng.integers(0, 4, size=2 * n)))
    N = rng.integers(0, 2, size=f.H.shape)
    M = rng.integers(0, 4, size=(f.k, f.k))
    M = M + M.T
    F2 = frames.frame_correct(F, f.H, N, M)
    assert oracle.dense_symbol(rho, n, F) == oracle.dense_symbol(rho, n, F2)


def test_counterexample_framed_gives_one():
    qc = corpus.load("counterexample")
    run = frames.framed_run(qc, 100, seed=0)
    assert run.samples.rows.all()
    assert frames.framed_distribution(qc) == {(1,): 1}
    assert frames.framed_distribution(qc, rebit=True) == {(1,): 1}


def test_framed_run_is_deterministic():
    qc = corpus.load("cz_injection")
    a = frames.framed_run(qc, 64, seed=11).to_json()
    b = frames.framed_run(qc, 64, seed=11).to_json()
    assert a == b


def test_frame_trace_entries():
    js = frames.framed_run(corpus.load("h_injection"), 4, seed=1).to_json()
    assert [t["label"] for t in js["frame_trace"]] == list(corpus.load("h_injection").labels)
    for t in js["frame_trace"]:
        for F in t["frames"]:
            assert np.array(F).shape == (2 * corpus.load("h_injection").n_qubits,) * 2


def test_framed_rejects_magic():
    with pytest.raises(CircuitError):
        frames.framed_run(corpus.load("magic_h"), 1)


@pytest.mark.parametrize("name", [n for n in corpus.names() if n not in ("defect_move", "magic_h", "magic_h_pair")])
def test_framed_matches_dense_on_corpus(name):
    qc = corpus.load(name)
    inputs = [{}] if not qc.inputs else [dict(zip(qc.inputs, (a, b))) for a in (0, 1) for b in (0, 1)]
    for ins in inputs:
        ref = dense_fractions(qc, ins)
        assert frames.framed_distribution(qc, ins) == ref
        assert frames.framed_distribution(qc, ins, rebit=True) == ref


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_framed_matches_dense_random(seed):
    rng = np.random.default_rng(seed)
    qc = corpus.random_circuit(
        rng, int(rng.integers(1, 5)), int(rng.integers(4, 30)), gates=ALL_GATES, controlled_gates=CONTROLLED, chaos=True
    )
    if frames.count_random(qc) > 12:
        return
    assert frames.framed_distribution(qc) == dense_fractions(qc)


CORRELATED_READOUT = """QUBITS 4
PREPP 0
PREP1 1
PREPM 3
S 0
SDG 3
SDG 0
CNOT 0 3
SDG 0
SWAP 0 3
CNOT 3 1
CNOT 1 0
CNOT 3 0
MX 1 -> a
MZ 0 -> b
MX 3 -> c
"""


def test_record_keeps_correlated_direction():
    # the first reading fixes the parity of z0 + x3; the odd frame on z0 must move onto x3
    qc = parse_circuit(CORRELATED_READOUT)
    dist = frames.framed_distribution(qc)
    assert dist == dense_fractions(qc)
    assert all(sum(k) % 2 == 1 for k in dist)


def test_condition_on_record_drops_measured_qubit():
    # dephased Bell pair read on qubit 1: support direction z0 + z1 becomes z0
    H = g.left_kernel(np.array([[1, 0, 1, 0]], dtype=np.uint8).T).T
    assert g.left_kernel(frames.condition_on_record(H, 1)).tolist() == [[1, 0, 0, 0]]
    assert frames.condition_on_record(np.eye(4, dtype=np.uint8), 0).tolist() == np.eye(4).tolist()


def test_measurement_correction_deterministic_sign():
    F = np.zeros((2, 2), dtype=np.int64)
    F[0, 0] = 2
    a, F2 = frames.measurement_correction(F, np.array([[0], [1]]), 0, 0)
    assert a == 2 and not F2.any()


def test_h_symbol_and_negativity():
    p = frames.state_symbol(parse_circuit("QUBITS 1\nPREPMAGIC_H 0\n"))
    assert p.values == frames.H_SYMBOL
    assert p[(1, 1)] == Exact(1, -1, e=2)
    assert p.total() == Exact(1)
    assert frames.negativity(p) == Exact(1, 1, e=1)
    assert abs(float(p.negativity()) - (1 + math.sqrt(2)) / 2) < 1e-12


def test_stabilizer_symbol_is_nonnegative():
    p = frames.state_symbol(parse_circuit("QUBITS 1\nPREPP 0\n"))
    assert all(v.sign() >= 0 for v in p.values.values())
    assert p.negativity() == Exact(1)


def test_hoeffding_count():
    neg = float(frames.H_NEGATIVITY)
    assert frames.hoeffding_samples(neg, 0.02, 1e-3) == math.ceil(2 * neg**2 * math.log(2000) / 0.0004)
    with pytest.raises(ValueError):
        frames.hoeffding_samples(1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        frames.hoeffding_samples(1.0, 0.1, 1.5)


def test_magic_negativity_powers():
    assert frames.exact_magic_negativity(2) == frames.H_NEGATIVITY * frames.H_NEGATIVITY


def test_magic_estimate_small_run_is_deterministic():
    qc = corpus.load("magic_h")
    a = frames.magic_estimate(qc, "m", n_samples=500, seed=4)
    b = frames.magic_estimate(qc, "m", n_samples=500, seed=4)
    assert a == b and a.n_samples == 500
    assert set(a.to_json()) == {"estimate", "n_samples", "negativity"}


def test_magic_estimate_rejects():
    with pytest.raises(CircuitError):
        frames.magic_estimate(corpus.load("magic_h"), "nope")
    with pytest.raises(CircuitError):
        frames.magic_estimate(corpus.load("teleport"), "a")


@pytest.mark.parametrize("name", ["magic_h", "magic_h_pair", "s_injection"])
def test_magic_distribution_matches_dense(name):
    qc = corpus.load(name)
    assert frames.magic_distribution(qc) == oracle.dense_run(qc).dist


def _with_magic(seed, gates):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    base = corpus.random_circuit(rng, n, int(rng.integers(4, 16)), gates=gates, adaptive=False, chaos=True)
    t = int(rng.integers(1, n + 1))
    ins = [Instruction("PREPMAGIC_H", i.targets) if i.kind.startswith("PREP") and i.targets[0] < t else i for i in base.instructions]
    return QuantumCircuit(n, tuple(ins))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_magic_distribution_random_css(seed):
    qc = _with_magic(seed, corpus.CSS_GATES)
    try:
        got = frames.magic_distribution(qc, max_random=14)
    except ValueError:
        return
    assert got == oracle.dense_run(qc).dist
    assert sum((v for v in got.values()), Exact(0)) == Exact(1)
    assert all(v.sign() >= 0 for v in got.values())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_magic_distribution_random_clifford_exact_or_refused(seed):
    qc = _with_magic(seed, ALL_GATES)
    try:
        got = frames.magic_distribution(qc, max_random=14)
    except ValueError as exc:
        assert isinstance(exc, CircuitError) or "bound" in str(exc)
        return
    assert got == oracle.dense_run(qc).dist
