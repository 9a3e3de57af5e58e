"""Acceptance criteria; one PASS/FAIL line per criterion.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import itertools
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from stabrw import bench, corpus, frames, oracle, qfe  # noqa: E402
from stabrw import classical_sim as cs  # noqa: E402
from stabrw import gf2core as g  # noqa: E402
from stabrw.circuit_ir import QuantumCircuit, parse_circuit  # noqa: E402
from stabrw.exact import Exact, ExactArray  # noqa: E402
from stabrw.rewriter import instruction_offsets, rewrite_circuit, x_bit, z_bit  # noqa: E402

from conftest import dense_fractions  # noqa: E402

RESULTS: dict[int, tuple[str, str, str]] = {}

TITLES = {
    1: "counterexample witness pair",
    2: "CSS rewriting equals dense on random circuits",
    3: "framed simulation equals dense on random circuits",
    4: "Methods I-IV agree; strong probabilities",
    5: "quadratic-form engine against dense channels",
    6: "frame update fixture",
    7: "magic-state symbol, negativity and estimate",
    8: "defect move byproduct relations",
    9: "per-sample scaling shape",
    10: "invariant suites",
}


@contextlib.contextmanager
def criterion(n: int):
    t0 = time.perf_counter()
    notes: list[str] = []
    try:
        yield notes
    except BaseException:
        RESULTS[n] = ("FAIL", TITLES[n], f"{time.perf_counter() - t0:.1f}s")
        raise
    detail = "; ".join(notes + [f"{time.perf_counter() - t0:.1f}s"])
    RESULTS[n] = ("PASS", TITLES[n], detail)


def summary_lines() -> list[str]:
    out = []
    for n in sorted(TITLES):
        status, title, detail = RESULTS.get(n, ("FAIL", TITLES[n], "not run"))
        out.append(f"criterion {n:2d} {status}: {title} ({detail})")
    return out


# -- 1 ------------------------------------------------------------------------


def test_criterion_01_counterexample():
    with criterion(1) as notes:
        t0 = time.perf_counter()
        qc = corpus.load("counterexample")
        cc = rewrite_circuit(qc)
        assert cs.exact_distribution(cc, "I") == {(0,): 1}
        assert cs.sample_direct(cc, 200, seed=1).counts() == {(0,): 200}
        assert frames.framed_distribution(qc) == {(1,): 1}
        assert frames.framed_run(qc, 200, seed=1).samples.counts() == {(1,): 200}
        assert dense_fractions(qc) == {(1,): 1}
        assert time.perf_counter() - t0 < 1.0
        notes.append("rewritten 0, framed 1, dense 1")


# -- 2 ------------------------------------------------------------------------


def _random_css(rng):
    return corpus.random_circuit(
        rng,
        int(rng.integers(1, 7)),
        int(rng.integers(4, 41)),
        gates=corpus.CSS_GATES,
        controlled_gates=corpus.CSS_GATES,
        n_inputs=int(rng.integers(0, 2)),
    )


def test_criterion_02_css_correctness():
    with criterion(2) as notes:
        rng = np.random.default_rng(2024)
        checked = adaptive = 0
        while checked < 200:
            qc = _random_css(rng)
            assert qc.n_qubits <= 6 and len(qc) <= 40
            cc = rewrite_circuit(qc)
            if cc.n_random > 14:
                continue
            inputs = {name: int(rng.integers(0, 2)) for name in qc.inputs}
            assert cs.exact_distribution(cc, "I", inputs) == dense_fractions(qc, inputs), qc.text()
            checked += 1
            adaptive += cc.adaptive
        assert adaptive >= 50
        notes.append(f"{checked} circuits, {adaptive} adaptive")


# -- 3 ------------------------------------------------------------------------


def test_criterion_03_framed_correctness():
    with criterion(3) as notes:
        rng = np.random.default_rng(2025)
        checked = non_css = 0
        while checked < 200:
            qc = corpus.random_circuit(
                rng,
                int(rng.integers(1, 6)),
                int(rng.integers(4, 41)),
                gates=corpus.CSS_GATES + ("H", "S", "SDG", "CZ"),
                controlled_gates=("X", "Z", "CNOT", "H", "S", "CZ"),
                chaos=True,
            )
            if frames.count_random(qc) > 14:
                continue
            assert frames.framed_distribution(qc) == dense_fractions(qc), qc.text()
            checked += 1
            non_css += any(i.kind in ("H", "S", "SDG", "CZ") for i in qc.instructions)
        assert non_css >= 150
        notes.append(f"{checked} circuits, {non_css} non-CSS")


# -- 4 ------------------------------------------------------------------------


def test_criterion_04_method_equivalence():
    with criterion(4) as notes:
        rng = np.random.default_rng(4)
        checked = 0
        while checked < 50:
            qc = corpus.random_circuit(rng, int(rng.integers(1, 7)), int(rng.integers(4, 41)), controlled_gates=("X", "Z"), n_inputs=1)
            cc = rewrite_circuit(qc)
            if cc.n_random > 14:
                continue
            inputs = {"in0": int(rng.integers(0, 2))}
            ref = cs.exact_distribution(cc, "I", inputs)
            for m in ("II", "III", "IV"):
                assert cs.exact_distribution(cc, m, inputs) == ref
            cf = cs.code_form(cs.compile_affine(cc, inputs))
            total = Fraction(0)
            for y in itertools.product((0, 1), repeat=cf.k):
                p = cs.strong_probability(cf, y)
                assert p in (0, Fraction(1, 1 << cf.r))
                assert p == ref.get(y, 0)
                total += p
            assert total == 1
            checked += 1
        notes.append(f"{checked} circuits")


# -- 5 ------------------------------------------------------------------------

TABLE_KINDS = (
    "PREP0", "PREP1", "PREPP", "PREPM", "PREPCHAOS", "PREPMAGIC_I",
    "I", "X", "Z", "H", "S", "SDG", "CNOT", "CZ", "SWAP",
    "DEPHZ", "DEPHX", "MZ", "MX", "DISCARD",
)
ONE = ("I", "X", "Z", "H", "S", "SDG", "DEPHZ", "DEPHX")
TWO = ("CNOT", "CZ", "SWAP")
PREPS = ("PREP0", "PREP1", "PREPP", "PREPM", "PREPCHAOS")


def _textbook(kind):
    if kind == "PREPMAGIC_I":
        sigma = ExactArray.from_gaussian([[1, 0], [0, 1]], [[0, -1], [1, 0]], e=1)
        return (lambda rho: sigma.scale(rho.item() if rho.shape == () else rho[0, 0])), 0, 1
    return oracle.textbook_channel(kind)


def _basis(i, j, d):
    m = np.zeros((d, d), dtype=np.int64)
    m[i, j] = 1
    return ExactArray.from_gaussian(m)


def _product(fa, fb):
    def apply(rho):
        acc = ExactArray.zeros((4, 4))
        for r, c in itertools.product(range(4), repeat=2):
            x = rho[r, c]
            if x != 0:
                acc = acc + fa(_basis(r >> 1, c >> 1, 2)).kron(fb(_basis(r & 1, c & 1, 2))).scale(x)
        return acc

    return apply


def _hermitian_projector(u, c):
    T = oracle.pauli_dense(u)
    if u[0] and u[1]:
        T = T.scale(Exact(0, 0, -1))
    if c:
        T = -T
    I = ExactArray.from_gaussian(np.eye(2, dtype=np.int64))
    return (I + T).half()


PROJ = {("Z", 0): ([1, 0], "PREP0"), ("Z", 1): ([1, 0], "PREP1"), ("X", 0): ([0, 1], "PREPP"), ("X", 1): ([0, 1], "PREPM")}


def _proj_td(basis, c):
    if basis == "Y":
        u = [1, 1]
        prep = qfe.elementary_qfe("PREPMAGIC_I")
        if c:
            prep = qfe.compose(qfe.elementary_qfe("Z"), prep)
    else:
        u, name = PROJ[(basis, c)]
        prep = qfe.elementary_qfe(name)
    return qfe.compose_td(qfe.td_from_std(prep), qfe.td_from_check(qfe.pauli_check([u], [c]))), u


def test_criterion_05_quadratic_form_engine():
    with criterion(5) as notes:
        for kind in TABLE_KINDS:
            f = qfe.elementary_qfe(kind)
            fn, n_in, n_out = _textbook(kind)
            assert oracle.choi_dense(f) == oracle.choi_of_channel(fn, n_in, n_out), kind
            assert qfe.validate(f), kind
        rng = np.random.default_rng(5)
        pairs = 0
        while pairs < 100:
            roll = rng.integers(0, 4)
            if roll == 0:
                a, b = rng.choice(ONE, 2)
                f = qfe.tensor(qfe.elementary_qfe(a), qfe.elementary_qfe(b))
                fa, fb = _textbook(a)[0], _textbook(b)[0]
                ref = oracle.choi_of_channel(_product(fa, fb), 2, 2)
            else:
                if roll == 1:
                    a, b = rng.choice(ONE, 2)
                elif roll == 2:
                    a, b = rng.choice(TWO, 2)
                else:
                    a, b = rng.choice(ONE + ("DISCARD",)), rng.choice(PREPS)
                f = qfe.compose(qfe.elementary_qfe(a), qfe.elementary_qfe(b))
                fa, _, n_out = _textbook(a)
                fb, n_in, _ = _textbook(b)
                ref = oracle.choi_of_channel(lambda r: fa(fb(r)), n_in, n_out)
            nf = qfe.normalize(f)
            assert oracle.choi_dense(f) == ref and oracle.choi_dense(nf) == ref
            assert qfe.validate(f) and qfe.validate(nf)
            pairs += 1
        cases = [(p, ("chan", k)) for p in itertools.product("ZXY", (0, 1)) for k in ONE]
        cases += [(p, ("proj", q)) for p in itertools.product("ZXY", (0, 1)) for q in itertools.product("ZXY", (0, 1))]
        picks = rng.choice(len(cases), size=50, replace=False)
        zero = 0
        for idx in picks:
            (b1, c1), (what, arg) = cases[idx]
            P1, u1 = _proj_td(b1, c1)
            Pd1 = _hermitian_projector(u1, c1)
            if what == "chan":
                td = qfe.compose_td(P1, qfe.td_from_std(qfe.elementary_qfe(arg)))
                fn = _textbook(arg)[0]
                ref = oracle.choi_of_channel(lambda r: Pd1.matmul(fn(r)).matmul(Pd1), 1, 1)
            else:
                P2, u2 = _proj_td(*arg)
                Pd2 = _hermitian_projector(u2, arg[1])
                td = qfe.compose_td(P1, P2)
                ref = oracle.choi_of_channel(lambda r: Pd1.matmul(Pd2).matmul(r).matmul(Pd2).matmul(Pd1), 1, 1)
            zero += td.is_zero
            assert oracle.choi_dense(td) == ref, (b1, c1, what, arg)
        notes.append(f"{len(TABLE_KINDS)} table entries, {pairs} gate pairs, 50 projector pairs ({zero} zero)")


# -- 6 ------------------------------------------------------------------------


def test_criterion_06_frame_fixture():
    with criterion(6):
        t0 = time.perf_counter()
        F1 = frames.frame_update(np.zeros((4, 4), dtype=np.int64), qfe.elementary_qfe("CZ"))
        assert F1.tolist() == [[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 1, 0, 0]]
        F2 = frames.frame_update(F1, qfe.elementary_qfe("CNOT"))
        assert F2.tolist() == [[0, 0, 0, 0], [0, 2, 0, 1], [0, 0, 0, 0], [0, 1, 0, 0]]
        assert time.perf_counter() - t0 < 1.0


# -- 7 ------------------------------------------------------------------------


def test_criterion_07_magic():
    with criterion(7) as notes:
        p = frames.state_symbol(parse_circuit("QUBITS 1\nPREPMAGIC_H 0\n"))
        r2 = math.sqrt(2)
        want = {(0, 0): Exact(1, 1, e=2), (0, 1): Exact(1, e=2), (1, 0): Exact(1, e=2), (1, 1): Exact(1, -1, e=2)}
        assert p.values == want
        floats = {(0, 0): (1 + r2) / 4, (0, 1): 0.25, (1, 0): 0.25, (1, 1): (1 - r2) / 4}
        assert all(abs(float(p[v]) - floats[v]) < 1e-12 for v in floats)
        neg = frames.negativity(p)
        assert neg == Exact(1, 1, e=1) and abs(float(neg) - (1 + r2) / 2) < 1e-12
        qc = corpus.load("magic_h")
        est = frames.magic_estimate(qc, "m", epsilon=0.02, p_fail=1e-3, seed=0)
        assert est.n_samples == frames.hoeffding_samples(float(neg), 0.02, 1e-3)
        truth = (2 + r2) / 4
        assert abs(est.estimate - truth) <= 0.02
        assert frames.magic_distribution(qc)[(0,)] == Exact(2, 1, e=2)
        notes.append(f"estimate {est.estimate:.4f} vs {truth:.4f}, N={est.n_samples}")


# -- 8 ------------------------------------------------------------------------


def test_criterion_08_defect_move():
    with criterion(8) as notes:
        t0 = time.perf_counter()
        qc = corpus.load("defect_move")
        cc = rewrite_circuit(qc)
        off = instruction_offsets(qc)
        step2 = next(i for i, ins in enumerate(qc.instructions) if ins.kind == "MX")
        rand = cs.random_bits(8, 1000, cc.n_random)
        before, after = cs.snapshots(cc, rand, [off[step2], off[-1]])

        def par(B, idx):
            return np.bitwise_xor.reduce(B[:, idx], axis=1)

        # data qubit j of the patch is wire j-1; wire 9 is data qubit 4 after re-preparation
        d_z = par(before, [z_bit(q) for q in (0, 1, 2, 3)]) ^ par(after, [z_bit(q) for q in (9, 4, 5, 6)])
        d_x = par(before, [x_bit(q) for q in (8, 7, 0)]) ^ par(after, [x_bit(q) for q in (8, 7, 0, 9)])
        out = dict(cc.outputs)
        assert np.array_equal(d_z, after[:, out["za"]])
        assert np.array_equal(d_x, after[:, out["x4m"]])
        assert 0 < d_z.sum() < 1000 and 0 < d_x.sum() < 1000
        assert time.perf_counter() - t0 < 10.0
        notes.append("1000 trajectories, both byproducts nontrivial")


# -- 9 ------------------------------------------------------------------------

T_CRIT_01 = 2.68  # two-sided 1% point of Student t, 47 degrees of freedom


def test_criterion_09_scaling():
    with criterion(9) as notes:
        study = bench.scaling_study(reps=7, seed=0)
        x1, y1 = zip(*study["I"])
        _, _, r2 = bench.linear_fit(x1, y1)
        assert r2 >= 0.95
        x3, y3 = zip(*study["III"])
        t3 = bench.slope_t(x3, y3)
        assert abs(t3) < T_CRIT_01
        notes.append(f"Method I R^2={r2:.3f}, Method III slope t={t3:.2f}")


# -- 10 -----------------------------------------------------------------------


def _points(n):
    return [np.array(u, dtype=np.uint8) for u in itertools.product((0, 1), repeat=2 * n)]


def _coboundary_exhaustive(n):
    m = 2 * n
    U = np.array(list(itertools.product((0, 1), repeat=m)), dtype=np.int64)
    iu = np.triu_indices(m, 1)
    Qs = []
    for diag in itertools.product(range(4), repeat=m):
        for off in itertools.product((0, 1), repeat=len(iu[0])):
            Q = np.diag(diag).astype(np.int64)
            Q[iu] = off
            Q[(iu[1], iu[0])] = off
            Qs.append(Q)
    Qs = np.array(Qs)
    q = np.einsum("ui,kij,uj->ku", U, Qs, U) & 3
    cross = np.einsum("ai,kij,bj->kab", U, Qs, U) & 1
    idx = {tuple(u): i for i, u in enumerate(U.tolist())}
    xor = np.array([[idx[tuple((a ^ b).tolist())] for b in U] for a in U])
    lhs = q[:, xor]
    rhs = (q[:, :, None] + q[:, None, :] + 2 * cross) & 3
    assert np.array_equal(lhs, rhs)
    return len(Qs)


def _css_states():
    out = []
    for name in ("bell", "teleport", "superdense"):
        qc = corpus.load(name)
        body = []
        for ins in qc.instructions:
            if ins.kind in ("MZ", "MX") or ins.control:
                break
            body.append(ins)
        out.append(QuantumCircuit(qc.n_qubits, tuple(body), qc.inputs))
    rng = np.random.default_rng(10)
    for _ in range(30):
        qc = corpus.random_circuit(rng, int(rng.integers(1, 4)), 12, adaptive=False, channels=False)
        out.append(QuantumCircuit(qc.n_qubits, tuple(i for i in qc.instructions if i.kind not in ("MZ", "MX"))))
    return out


def test_criterion_10_invariants():
    with criterion(10) as notes:
        for n in (1, 2):
            pts = _points(n)
            P = {tuple(u): oracle.pauli_dense(u) for u in pts}
            A = {tuple(u): oracle.phase_point_dense(u) for u in pts}
            for u, v in itertools.product(pts, repeat=2):
                lhs = P[tuple(u)].matmul(P[tuple(v)])
                rhs = P[tuple(u ^ v)]
                assert lhs.to_list() == (-rhs if g.tau(u, v) else rhs).to_list()
                d = Exact(1 << n) if np.array_equal(u, v) else Exact(0)
                assert oracle.hs_inner(P[tuple(u)], P[tuple(v)]) == d
                assert oracle.hs_inner(A[tuple(u)], A[tuple(v)]) == d
            for u, v, w in itertools.product(pts, repeat=3):
                assert g.tau(u, v) ^ g.tau(u ^ v, w) == g.tau(v, w) ^ g.tau(u, v ^ w)
        n_forms = _coboundary_exhaustive(1) + _coboundary_exhaustive(2)

        states = _css_states()
        for qc in states:
            rho, wires = oracle.dense_state(qc)
            n = len(wires)
            sym = {k: v.to_fraction() for k, v in oracle.dense_symbol(rho, n).items()}
            pz: dict = {}
            px: dict = {}
            for v, p in sym.items():
                pz[v[0::2]] = pz.get(v[0::2], 0) + p
                px[v[1::2]] = px.get(v[1::2], 0) + p
            for v, p in sym.items():
                assert p >= 0 and p == pz[v[0::2]] * px[v[1::2]], qc.text()

        tuples = [qfe.elementary_qfe(k) for k in TABLE_KINDS]
        rng = np.random.default_rng(11)
        for _ in range(60):
            qc = corpus.random_circuit(
                rng, int(rng.integers(1, 5)), int(rng.integers(3, 25)),
                gates=corpus.CSS_GATES + corpus.NON_CSS_GATES, adaptive=False, chaos=True,
            )
            tuples.append(qfe.circuit_contract(qc))
        for a, b in itertools.product(ONE, repeat=2):
            tuples.append(qfe.compose(qfe.elementary_qfe(a), qfe.elementary_qfe(b)))
            tuples.append(qfe.tensor(qfe.elementary_qfe(a), qfe.elementary_qfe(b)))
        for f in tuples:
            assert qfe.validate(f, bound=4)
            assert qfe.validate(qfe.normalize(f), bound=4)
        notes.append(f"{n_forms} forms, {len(states)} CSS states, {len(tuples)} tuples validated")


def main() -> int:
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for fn in tests:
        try:
            fn()
        except Exception as exc:  # report and keep going
            print(f"  {fn.__name__}: {type(exc).__name__}: {exc}", file=sys.stderr)
    print("\n".join(summary_lines()))
    return 0 if all(RESULTS.get(n, ("FAIL",))[0] == "PASS" for n in TITLES) else 1


if __name__ == "__main__":
    raise SystemExit(main())
