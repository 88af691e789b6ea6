import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ec3 import (
    brute_force_oracle,
    check_assignment,
    emit_assignment,
    emit_instance,
    generate_instance,
    make_instance,
    parse_assignment,
    parse_instance,
)
from conftest import REF15_SOLUTION


def slow_oracle(n_vars, clauses):
    """Independent reference: enumerate assignment indices with plain
    Python (bit v of index a is z_{v+1}, the same order the packed oracle
    scans)."""
    count = 0
    witness = None
    for a in range(2**n_vars):
        z = [(a >> v) & 1 for v in range(n_vars)]
        if all(z[k - 1] + z[m - 1] + z[j - 1] == 1 for k, m, j in clauses):
            count += 1
            if witness is None:
                witness = z
    return witness, count


# --- parsing ---------------------------------------------------------------


def test_parse_round_trip(ref15):
    text = emit_instance(ref15, comments=["round trip"])
    back = parse_instance(text)
    assert back.n_vars == ref15.n_vars
    assert np.array_equal(back.clauses, ref15.clauses)
    assert np.array_equal(back.clause_degree, ref15.clause_degree)


def test_parse_minimal():
    inst = parse_instance("p ec3 3 1\n1 2 3\n")
    assert inst.n_vars == 3 and inst.n_clauses == 1
    assert inst.clause_degree.tolist() == [1, 1, 1]


def test_parse_accepts_comments_anywhere():
    inst = parse_instance("c top\np ec3 4 2\nc middle\n1 2 3\n2 3 4\nc tail\n")
    assert inst.n_clauses == 2


def test_parse_rejects_bad_header():
    with pytest.raises(ValueError, match="header"):
        parse_instance("p cnf 3 1\n1 2 3\n")
    with pytest.raises(ValueError, match="header"):
        parse_instance("1 2 3\n")


def test_parse_rejects_out_of_range_index():
    with pytest.raises(ValueError, match="out of range"):
        parse_instance("p ec3 3 1\n1 2 4\n")


def test_parse_rejects_repeated_index_within_clause():
    with pytest.raises(ValueError, match="repeats"):
        parse_instance("p ec3 3 1\n1 1 3\n")


def test_parse_rejects_clause_count_mismatch():
    with pytest.raises(ValueError, match="promises"):
        parse_instance("p ec3 4 3\n1 2 3\n2 3 4\n")
    with pytest.raises(ValueError, match="promises"):
        parse_instance("p ec3 4 1\n1 2 3\n2 3 4\n")


def test_parse_warns_on_duplicate_clause():
    with pytest.warns(UserWarning, match="duplicate clause"):
        inst = parse_instance("p ec3 4 2\n1 2 3\n3 2 1\n")
    assert inst.n_clauses == 2  # accepted, just noisy


def test_assignment_file_round_trip():
    z = np.array([1, 0, 1, 0], dtype=np.uint8)
    assert np.array_equal(parse_assignment(emit_assignment(z), 4), z)
    with pytest.raises(ValueError, match="values"):
        parse_assignment("1 0 1", 4)
    with pytest.raises(ValueError, match="0 or 1"):
        parse_assignment("1 0 2 0", 4)


# --- generation ------------------------------------------------------------


def test_generate_is_deterministic():
    a = generate_instance(20, 12, seed=7)
    b = generate_instance(20, 12, seed=7)
    assert np.array_equal(a.clauses, b.clauses)
    c = generate_instance(20, 12, seed=8)
    assert not np.array_equal(a.clauses, c.clauses)


def test_generate_forced_single_triple():
    inst = generate_instance(3, 1, seed=0)
    assert sorted(inst.clauses[0].tolist()) == [1, 2, 3]


def test_generate_rejects_infeasible():
    with pytest.raises(ValueError, match="distinct clauses"):
        generate_instance(3, 2, seed=0)
    with pytest.raises(ValueError, match="n_vars"):
        generate_instance(2, 1, seed=0)


@given(n=st.integers(4, 16), seed=st.integers(0, 2**32 - 1), data=st.data())
@settings(max_examples=40, deadline=None)
def test_generate_invariants(n, seed, data):
    m = data.draw(st.integers(1, min(20, math.comb(n, 3))))
    inst = generate_instance(n, m, seed)
    assert inst.n_clauses == m
    # distinct indices per clause, all in range
    for row in inst.clauses:
        assert len(set(row.tolist())) == 3
        assert 1 <= row.min() and row.max() <= n
    # no duplicate clauses as unordered triples
    keys = {frozenset(row.tolist()) for row in inst.clauses}
    assert len(keys) == m
    assert int(inst.clause_degree.sum()) == 3 * m


# --- checking --------------------------------------------------------------


def test_check_known_solution(ref15):
    res = check_assignment(ref15, REF15_SOLUTION)
    assert res.satisfied and res.unsatisfied_count == 0


def test_check_all_zeros_and_all_ones(ref15):
    # every clause sums to 0 (or 3): nothing is satisfied
    assert check_assignment(ref15, np.zeros(15, np.uint8)).unsatisfied_count == 8
    assert check_assignment(ref15, np.ones(15, np.uint8)).unsatisfied_count == 8


def test_check_length_mismatch(ref15):
    with pytest.raises(ValueError, match="length"):
        check_assignment(ref15, np.zeros(14, np.uint8))


# --- exact oracle ----------------------------------------------------------


def test_oracle_ref15(ref15):
    res = brute_force_oracle(ref15)
    assert res.satisfiable
    assert res.n_solutions == 30  # exact enumeration, frozen
    assert check_assignment(ref15, res.witness).satisfied
    # the reference solution is among the satisfying assignments
    assert check_assignment(ref15, REF15_SOLUTION).satisfied


def test_oracle_unsat4(unsat4):
    res = brute_force_oracle(unsat4)
    assert not res.satisfiable
    assert res.witness is None and res.n_solutions == 0


def test_oracle_no_clauses():
    inst = make_instance(5, np.zeros((0, 3), dtype=np.int32))
    res = brute_force_oracle(inst)
    assert res.satisfiable and res.n_solutions == 2**5
    assert res.witness.tolist() == [0, 0, 0, 0, 0]


def test_oracle_cap():
    inst = make_instance(30, [(1, 2, 3)])
    with pytest.raises(ValueError, match="cap"):
        brute_force_oracle(inst)
    # and a permissive cap admits larger N explicitly
    brute_force_oracle(make_instance(8, [(1, 2, 3)]), cap=8)


@given(n=st.integers(3, 9), seed=st.integers(0, 2**32 - 1), data=st.data())
@settings(max_examples=30, deadline=None)
def test_oracle_matches_slow_reference(n, seed, data):
    m = data.draw(st.integers(1, min(8, math.comb(n, 3))))
    inst = generate_instance(n, m, seed)
    witness, count = slow_oracle(n, inst.clauses.tolist())
    res = brute_force_oracle(inst)
    assert res.n_solutions == count
    assert res.satisfiable == (count > 0)
    if count:
        # both report the lowest-index satisfying assignment
        assert res.witness.tolist() == witness
        assert check_assignment(inst, res.witness).satisfied
