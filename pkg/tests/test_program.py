import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapq.compiler import compile_gap, generalized_hadamard, rational_presentation
from gapq.counting import PredicateSpec
from gapq.fixtures import identity_program, random_program, trivial_presentation
from gapq.program import (Layer, NonUnitaryLayer, ProgramError, Register, StateSpaceTooLarge,
                          check_unitarity, expand_layer, format_program, load_program,
                          parse_program, program_to_json)

RAT = rational_presentation(5)
J = Layer("unitary", (0,), matrix=(("3/5", "4/5"), ("4/5", "-3/5")))


def _doc(**over):
    doc = {
        "field": trivial_presentation().to_json(),
        "register": [2],
        "initial": [0],
        "layers": [{"kind": "unitary", "cells": [0], "matrix": [["one", "0"], ["0", "one"]]}],
        "accepting": {"states": [[0]]},
    }
    doc.update(over)
    return json.dumps(doc)


def test_minimal_identity_program():
    prog = parse_program(_doc())
    assert prog.T == 1
    assert prog.register.cells == (2,)
    assert prog.accepting((0,)) and not prog.accepting((1,))


def test_compiled_program_roundtrip():
    prog = compile_gap(PredicateSpec.from_bits("0110"))
    assert parse_program(format_program(prog)) == prog


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_roundtrip_random_programs(seed):
    prog = random_program(random.Random(seed))
    text = format_program(prog)
    assert parse_program(text) == prog
    assert format_program(parse_program(text)) == text


def test_literal_hadamard_rejected():
    # off-diagonal 1 - 4/5 = 1/5 gives column norm 17/25
    lit = generalized_hadamard(0, 1, Fraction(4, 5), literal=True)
    assert lit[0][0] ** 2 + lit[1][0] ** 2 == Fraction(17, 25)
    fp = rational_presentation(5, values=[0, 1, -1, "4/5", "-4/5", "1/5"])
    doc = json.loads(_doc())
    doc["field"] = fp.to_json()
    doc["layers"] = [{"kind": "unitary", "cells": [0],
                      "matrix": [[str(x) for x in row] for row in lit]}]
    with pytest.raises(NonUnitaryLayer) as info:
        parse_program(json.dumps(doc))
    assert info.value.location == "layers[0]"


def test_parse_errors_carry_locations():
    with pytest.raises(ProgramError) as info:
        parse_program('{"field": 1,\n "register": [2,]}')
    assert "line 2" in str(info.value)

    bad = json.loads(_doc())
    bad["layers"][0]["matrix"][1][0] = "missing"
    with pytest.raises(ProgramError) as info:
        parse_program(json.dumps(bad))
    assert info.value.location == "layers[0].matrix[1][0]"
    assert "missing" in str(info.value)

    with pytest.raises(ProgramError) as info:
        parse_program(_doc(initial=[2]))
    assert info.value.location == "initial"

    with pytest.raises(ProgramError) as info:
        parse_program(_doc(layers=[{"kind": "permutation", "cells": [0], "perm": [0, 0]}]))
    assert info.value.location == "layers[0].perm"

    with pytest.raises(ProgramError):
        parse_program(_doc(layers=[]))


def test_state_space_cap():
    with pytest.raises(StateSpaceTooLarge):
        Register((2,) * 25)
    with pytest.raises(StateSpaceTooLarge):
        parse_program(_doc(register=[4] * 13, initial=[0] * 13))
    assert Register((2,) * 24).size == 2 ** 24


def test_field_by_path(tmp_path):
    (tmp_path / "field.json").write_text(trivial_presentation().dumps())
    (tmp_path / "prog.json").write_text(_doc(field="field.json"))
    prog = load_program(tmp_path / "prog.json")
    assert prog.field == trivial_presentation()


def test_constraint_accepting():
    prog = parse_program(_doc(register=[2, 4], initial=[0, 0],
                              accepting={"constraints": [{"cell": 1, "value": 3}]}))
    assert prog.accepting((1, 3)) and not prog.accepting((1, 2))
    assert prog.accepting.enumerate(prog.register) == [(0, 3), (1, 3)]
    assert parse_program(format_program(prog)) == prog


# check_unitarity ---------------------------------------------------------------------

def test_j_is_unitary():
    rep = check_unitarity(J, RAT)
    assert rep.ok and rep.deviation < 1e-15


def test_identity_permutation_is_unitary():
    assert check_unitarity(Layer("permutation", (0,), perm=(0, 1)), RAT).ok


def test_shear_is_not_unitary():
    shear = Layer("unitary", (0,), matrix=(("1", "1"), ("0", "1")))
    rep = check_unitarity(shear, RAT)
    assert not rep.ok and rep.deviation == pytest.approx(1.0)


# expand_layer ----------------------------------------------------------------------------

def test_identity_expansion():
    prog = identity_program((2, 2))
    act = expand_layer(prog.layers[0], prog.register, prog.field)
    for s in prog.register.states():
        assert act.successors(s) == [(s, "one")]


def test_j_expansion_on_two_cells():
    act = expand_layer(J, Register((2, 2)), RAT)
    assert sorted(act.successors((0, 1))) == [((0, 1), "3/5"), ((1, 1), "4/5")]


def test_swap_permutation_on_cell_1():
    act = expand_layer(Layer("permutation", (1,), perm=(1, 0)), Register((2, 2)), RAT)
    assert act.successors((0, 0)) == [((0, 1), None)]


def test_expansion_rejects_bad_cell():
    with pytest.raises(ProgramError):
        expand_layer(Layer("permutation", (3,), perm=(1, 0)), Register((2, 2)), RAT)


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6))
def test_expansion_preserves_untouched_cells(seed):
    prog = random_program(random.Random(seed))
    for layer in prog.layers:
        act = expand_layer(layer, prog.register, prog.field)
        for s in prog.register.states():
            for nxt, _ in act.successors(s):
                for c in range(len(s)):
                    if c not in layer.cells:
                        assert nxt[c] == s[c]


def test_program_json_has_documented_keys():
    doc = program_to_json(compile_gap(PredicateSpec.from_bits("01")))
    assert set(doc) == {"field", "register", "initial", "layers", "accepting"}
    assert {layer["kind"] for layer in doc["layers"]} == {"unitary", "permutation"}
