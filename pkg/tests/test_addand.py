import math
import random

import pytest

from circuit_entropy import addand
from circuit_entropy.addand import AddAndDiagram, NodeStore, conj, decision, terminal
from circuit_entropy.instances import FIVE_OUTPUT_ORDER, block_pair_circuit, block_pair_order, five_output_circuit
from circuit_entropy.pse import PseConfig, pse_entropy

H_BLOCK = 0.8112781244591328


def block_diagram(n: int, store: NodeStore | None = None) -> AddAndDiagram:
    """Hand-built diagram for the block-pair family: a conjunction of n blocks."""
    st = store or NodeStore()
    t3, t0, t1 = st.terminal(3), st.terminal(0), st.terminal(1)
    blocks = []
    for i in range(1, n + 1):
        first, second = 2 * n + i, 3 * n + i
        blocks.append(st.decision(first, st.decision(second, t3, t0), st.decision(second, t0, t1)))
    return AddAndDiagram(st.conj(blocks), block_pair_order(n))


def test_single_block_diagram_has_seven_nodes():
    d = block_diagram(1)
    assert d.node_count() == 7
    assert d.root.kind == addand.CONJ
    d.check()


def test_block_diagram_eval():
    d = block_diagram(1)
    assert addand.eval_assignment(d, {3: False, 4: False}) == 3
    assert addand.eval_assignment(d, {3: True, 4: True}) == 1
    assert addand.eval_assignment(d, {3: True, 4: False}) == 0
    assert addand.eval_assignment(d, {3: False, 4: True}) == 0


def test_conj_of_blocks_multiplies():
    d = block_diagram(2)
    assert addand.eval_assignment(d, {5: False, 7: False, 6: True, 8: True}) == 3


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_block_diagram_weight_and_entropy(n):
    d = block_diagram(n)
    assert addand.weight(d) == 4**n
    for child in d.root.children:
        assert addand.weight(AddAndDiagram(child)) == 4
    assert addand.entropy(d) == pytest.approx(n * H_BLOCK, abs=1e-12)


def test_terminal_only():
    d = AddAndDiagram(terminal(3))
    assert addand.eval_assignment(d, {}) == 3
    assert addand.weight(d) == 3 and addand.entropy(d) == 0.0
    dot = addand.export(d, "dot")
    assert dot.count("shape=box") == 1


def test_all_zero_diagram():
    z = terminal(0)
    d = AddAndDiagram(decision(1, z, decision(2, z, z)))
    assert addand.weight(d) == 0 and addand.entropy(d) == 0.0


def test_gap_factor():
    # x1 false -> weight 1 for both values of x2; x1 true -> x2 decides
    d = AddAndDiagram(decision(1, terminal(1), decision(2, terminal(0), terminal(1))))
    assert addand.weight(d) == 3
    w, h = addand.enumerate_distribution(d)
    assert w == 3 and addand.entropy(d) == pytest.approx(h) == pytest.approx(math.log2(3))


def test_eval_requires_total_assignment():
    with pytest.raises(ValueError):
        addand.eval_assignment(block_diagram(1), {3: True})


def test_check_rejects_bad_structure():
    t = terminal(1)
    with pytest.raises(ValueError):
        AddAndDiagram(conj([decision(1, t, t), decision(1, t, t)])).check()
    with pytest.raises(ValueError):
        AddAndDiagram(decision(2, decision(1, t, t), t), [1, 2]).check()
    with pytest.raises(ValueError):
        terminal(-1)


@pytest.mark.parametrize("seed", range(40))
def test_recursions_match_enumeration(seed):
    rng = random.Random(seed)
    d = addand.random_diagram(rng, rng.randint(1, 10))
    d.check()
    w, h = addand.enumerate_distribution(d)
    assert addand.weight(d) == w
    assert addand.entropy(d) == pytest.approx(h, abs=1e-9)


def test_reduce_shares_terminals():
    d = AddAndDiagram(decision(1, terminal(3), decision(2, terminal(3), terminal(1))))
    assert d.node_count() == 5
    r = addand.reduce(d)
    assert r.node_count() == 4
    assert addand.reduce(r).node_count() == 4


@pytest.mark.parametrize("seed", range(15))
def test_reduce_preserves_semantics(seed):
    d = addand.random_diagram(random.Random(seed), 8)
    r = addand.reduce(d)
    assert r.node_count() <= d.node_count()
    assert addand.weight(r) == addand.weight(d)
    assert addand.entropy(r) == pytest.approx(addand.entropy(d), abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_text_roundtrip(seed):
    d = addand.reduce(addand.random_diagram(random.Random(seed), 7))
    back = addand.import_text(addand.export(d, "text"))
    assert addand.structurally_equal(back, d)
    assert back.order == d.order


def test_import_rejects_garbage():
    with pytest.raises(ValueError):
        addand.import_text("t 0 1\nq 1\nroot 0\n")
    with pytest.raises(ValueError):
        addand.import_text("t 0 1\n")


def test_dot_export_block_diagram():
    dot = addand.export(block_diagram(1), "dot")
    assert dot.startswith("digraph")
    assert dot.count("->") == 1 + 2 + 4
    assert "dashed" in dot


def _trace_diagram(f, order, decomposition=True):
    cfg = PseConfig(use_pre=False, order=order, emit_trace=True, use_decomposition=decomposition)
    res = pse_entropy(f, cfg)
    return res, addand.build_from_trace(res.trace)


def test_trace_five_output_sizes():
    res, d = _trace_diagram(five_output_circuit(), FIVE_OUTPUT_ORDER)
    assert d.node_count() == 14
    assert d.root.kind == addand.DECISION and d.root.var == 6
    assert any(u.kind == addand.CONJ for u in d.nodes())
    d.check()
    assert addand.weight(d) == 28 == res.count
    assert addand.entropy(d) == pytest.approx(res.entropy, abs=1e-12)
    _, flat = _trace_diagram(five_output_circuit(), FIVE_OUTPUT_ORDER, decomposition=False)
    assert flat.node_count() == 24
    assert not any(u.kind == addand.CONJ for u in flat.nodes())
    flat.check()


def test_trace_block_pair():
    res, d = _trace_diagram(block_pair_circuit(1), block_pair_order(1))
    assert addand.weight(d) == 4
    assert addand.entropy(d) == pytest.approx(res.entropy, abs=1e-12)
    res, d = _trace_diagram(block_pair_circuit(3), block_pair_order(3))
    assert d.root.kind == addand.CONJ and len(d.root.children) == 3


@pytest.mark.parametrize("n", range(2, 6))
def test_trace_matches_hand_built_blocks(n):
    _, d = _trace_diagram(block_pair_circuit(n), block_pair_order(n))
    assert addand.structurally_equal(d, block_diagram(n))


def test_single_block_trace_has_no_conj():
    # a lone component is not wrapped in a conjunction
    _, d = _trace_diagram(block_pair_circuit(1), block_pair_order(1))
    assert d.node_count() == 6
    assert addand.structurally_equal(d, AddAndDiagram(block_diagram(1).root.children[0]))


def test_trace_enumeration_agrees():
    _, d = _trace_diagram(five_output_circuit(), FIVE_OUTPUT_ORDER, decomposition=False)
    w, h = addand.enumerate_distribution(d)
    assert w == 28 and h == pytest.approx(addand.entropy(d), abs=1e-12)
