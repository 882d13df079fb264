from fractions import Fraction
from itertools import product

import pytest

from dense import predicate_oracle
from gapq.compiler import (AMPLITUDE_VALUES, EPSILON, GATES, compile_gap, designated_state,
                           expected_amplitude, generalized_hadamard, is_orthogonal, mat_mul,
                           verify_compilation)
from gapq.counting import PredicateSpec, gap
from gapq.extnum import CanonicalForm, Index, validate_presentation
from gapq.program import check_unitarity
from gapq.simulator import decide_nqp, run

F = Fraction


def test_gates_are_exactly_orthogonal():
    for g in (GATES.H, GATES.J, GATES.K, GATES.J4):
        assert is_orthogonal(g)


def test_gate_entries():
    assert GATES.H == ((F(4, 5), F(3, 5)), (F(3, 5), F(-4, 5)))
    assert GATES.J == ((F(3, 5), F(4, 5)), (F(4, 5), F(-3, 5)))
    assert EPSILON == F(12, 25)


def test_jk_matrix_elements():
    jk = GATES.JK
    assert jk == mat_mul(GATES.J4, GATES.K)
    assert jk[1][0] == EPSILON
    assert jk[1][1] == -EPSILON


def test_per_branch_prefactor():
    for y in (0, 1):
        assert GATES.J[0][y] * GATES.H[y][0] == EPSILON


def test_generalized_hadamard_unitary_reading():
    g = generalized_hadamard(0, 1, F(4, 5))
    assert g == GATES.H
    assert is_orthogonal(g)
    lit = generalized_hadamard(0, 1, F(4, 5), literal=True)
    assert not is_orthogonal(lit)


def test_two_level_pieces_sum_to_k():
    g = generalized_hadamard(1, 3, F(3, 5), dim=4)
    # zero outside the two touched symbols, so two pieces sum to a full unitary
    assert g[0] == (0, 0, 0, 0) and g[2] == (0, 0, 0, 0)
    assert g[1][1] == F(3, 5) and g[3][1] == F(4, 5)
    assert GATES.K[0][2] == F(4, 5) and GATES.K[1][3] == F(3, 5)


def test_compiled_amplitude_ids_are_restricted():
    allowed = {str(v) for v in AMPLITUDE_VALUES}
    prog = compile_gap(PredicateSpec.from_bits("01101001"))
    for layer in prog.layers:
        if layer.matrix is not None:
            assert {x for row in layer.matrix for x in row} <= allowed
        assert check_unitarity(layer, prog.field, prog.register).ok
    assert validate_presentation(prog.field).ok
    assert prog.T == 2 * 3 + 3


def _all_predicates(p):
    for bits in product("01", repeat=2 ** p):
        yield PredicateSpec.from_bits("".join(bits))


@pytest.mark.parametrize("p", [1, 2])
def test_dense_oracle_agrees_exhaustively(p):
    for r in _all_predicates(p):
        dense = predicate_oracle(r.table, p)
        # designated index: y = 0, output symbol 1
        assert dense[1] == expected_amplitude(r) == -EPSILON ** (p + 1) * gap(r)
        exact, _, _ = run(compile_gap(r), mode="exact")
        prog_T = 2 * p + 3
        form = exact.amps.get(designated_state(p), CanonicalForm())
        assert F(form.coefficient(Index(0, ())), 5 ** (2 * prog_T - 1)) == dense[1]


def test_full_final_vector_matches_dense_oracle():
    r = PredicateSpec.from_bits("0111")
    prog = compile_gap(r)
    exact, _, _ = run(prog, mode="exact")
    dense = predicate_oracle(r.table, 2)
    scale = 5 ** (2 * prog.T - 1)
    for i, want in enumerate(dense):
        y, b = divmod(i, 4)
        state = (y >> 1, y & 1, b)
        got = exact.amps.get(state, CanonicalForm()).coefficient(Index(0, ()))
        assert F(got, scale) == want


@pytest.mark.parametrize("bits", ["00", "11", "01", "0110", "1111", "10110100"])
def test_verify_compilation(bits):
    rep = verify_compilation(PredicateSpec.from_bits(bits))
    assert rep.ok, rep.problems
    assert (rep.decision == "accept") == (rep.gap != 0)


def test_all_zero_is_positive_and_accepts():
    r = PredicateSpec.from_bits("00")
    assert expected_amplitude(r) == 2 * EPSILON ** 2 == F(288, 625)
    assert decide_nqp(compile_gap(r)).accept


def test_arity_cap():
    with pytest.raises(ValueError):
        compile_gap(PredicateSpec.from_bits("0" * 32))


def test_compiled_program_is_deterministic():
    from gapq.program import format_program
    r = PredicateSpec.from_bits("10010110")
    assert format_program(compile_gap(r)) == format_program(compile_gap(r))
