"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
"acceptance criteria" section of the terminal summary.
"""
import random
import time
from fractions import Fraction
from itertools import product

import pytest

from gapq.compiler import (DENOMINATOR, EPSILON, GATES, compile_gap, designated_state,
                           generalized_hadamard, is_orthogonal, rational_presentation)
from gapq.counting import PredicateSpec, crosscheck, gap
from gapq.extnum import CanonicalForm, Index, validate_presentation
from gapq.fixtures import (corrupt_struct, hadamard_sqrt2_program, oracle_fixtures, random_program,
                           with_field)
from gapq.program import Layer, check_unitarity
from gapq.simulator import decide_from, run

pytestmark = pytest.mark.acceptance

B0 = Index(0, ())


def _predicates():
    for p in (1, 2, 3):
        for bits in product("01", repeat=2 ** p):
            yield PredicateSpec.from_bits("".join(bits))
    rng = random.Random(4)
    for _ in range(50):
        yield PredicateSpec(4, tuple(rng.randint(0, 1) for _ in range(16)))


def test_amplitude_identity(verdict):
    start = time.perf_counter()
    preds = list(_predicates())
    bad = []
    for r in preds:
        prog = compile_gap(r)
        exact, _, _ = run(prog, mode="exact")
        form = exact.amps.get(designated_state(r.p), CanonicalForm())
        target = -(EPSILON ** (r.p + 1)) * gap(r) * DENOMINATOR ** (2 * prog.T - 1)
        assert target.denominator == 1
        dec = decide_from(prog, exact)
        if form != CanonicalForm({B0: target.numerator}) or dec.accept != (gap(r) != 0):
            bad.append(r.bits)
    elapsed = time.perf_counter() - start
    ok = verdict("amplitude identity on 276 + 50 predicates, < 30 s",
                 not bad and len(preds) == 326 and elapsed < 30,
                 f"{len(preds)} predicates, {len(bad)} mismatches, {elapsed:.1f} s")
    assert ok, bad[:5]


def test_gate_facts(verdict):
    jk = GATES.JK
    ok = (all(is_orthogonal(g) for g in (GATES.H, GATES.J, GATES.K, GATES.J4))
          and jk[1][0] == Fraction(12, 25) and jk[1][1] == Fraction(-12, 25))
    assert verdict("gate facts: exact unitarity, <1|JK|0> = 12/25, <1|JK|1> = -12/25", ok)


def test_index_bound(verdict):
    rng = random.Random(100)
    runs = violations = 0
    for _ in range(150):
        prog = random_program(rng, max_layers=6, m=rng.choice([0, 1, 2]))
        assert prog.field.m <= 2 and prog.field.d <= 2 and prog.T <= 6
        assert prog.register.size <= 8
        assert validate_presentation(prog.field).ok
        _, _, trace = run(prog, mode="exact", check_bound=False)
        runs += 1
        e = prog.field.e_bound
        violations += sum(rec.max_ind > 2 * e * rec.t for rec in trace.steps)
    ok = verdict("index bound over >= 100 random programs", runs >= 100 and violations == 0,
                 f"{runs} programs, {violations} violations")
    assert ok


def test_oracle_equivalence(verdict):
    start = time.perf_counter()
    fixtures = oracle_fixtures(25)
    compared = discrepancies = 0
    for prog in fixtures:
        assert prog.T <= 4 and prog.register.size <= 8
        rep = crosscheck(prog)
        compared += rep.compared
        discrepancies += len(rep.discrepancies)
    elapsed = time.perf_counter() - start
    ok = verdict("oracle equivalence on >= 25 fixtures, < 60 s",
                 len(fixtures) >= 25 and compared > 0 and discrepancies == 0 and elapsed < 60,
                 f"{len(fixtures)} fixtures, {compared} coefficients, {discrepancies} "
                 f"discrepancies, {elapsed:.1f} s")
    assert ok


def test_exact_numeric_consistency(verdict):
    progs = oracle_fixtures(25)
    progs += [compile_gap(PredicateSpec.from_bits(b)) for b in ("00", "11", "0110", "10110100")]
    worst_err = worst_drift = 0.0
    for prog in progs:
        _, _, trace = run(prog)
        worst_err = max(worst_err, trace.max_consistency_err)
        worst_drift = max(worst_drift, trace.max_norm_drift)
    ok = verdict("exact/numeric consistency and norm within 1e-6",
                 worst_err <= 1e-6 and worst_drift <= 1e-6,
                 f"{len(progs)} programs, max err {worst_err:.2e}, max drift {worst_drift:.2e}")
    assert ok


def test_rejection_criterion(verdict):
    balanced = [r for r in _predicates() if gap(r) == 0]
    bad = []
    for r in balanced:
        prog = compile_gap(r)
        exact, numeric, _ = run(prog)
        dec = decide_from(prog, exact)
        forms_zero = all(exact.amps.get(c, CanonicalForm()).is_zero()
                         for c in prog.accepting.enumerate(prog.register))
        mag = abs(numeric.amps.get(designated_state(r.p), 0j))
        if dec.g != 0 or dec.accept or not forms_zero or mag >= 1e-9:
            bad.append(r.bits)
    ok = verdict("rejection criterion on every balanced compiled predicate", not bad,
                 f"{len(balanced)} balanced predicates, {len(bad)} failures")
    assert ok


def _corruption_fixtures():
    base = [hadamard_sqrt2_program(2), hadamard_sqrt2_program(3)]
    rng = random.Random(7)
    base += [random_program(rng, max_layers=4, m=m, family=fam)
             for m in (0, 1, 2) for fam in ("rational", "sqrt2", "gauss")]
    for prog in base:
        for pair in sorted(prog.field.struct):
            for delta in (-1, 1):
                yield with_field(prog, corrupt_struct(prog.field, pair, delta))


def test_negative_controls(verdict):
    lit = generalized_hadamard(0, 1, Fraction(4, 5), literal=True)
    fp = rational_presentation(5, values=[0, 1, -1, "4/5", "-4/5", "1/5"])
    layer = Layer("unitary", (0,), matrix=tuple(tuple(str(x) for x in row) for row in lit))
    literal_rejected = not is_orthogonal(lit) and not check_unitarity(layer, fp).ok

    total = caught = 0
    for prog in _corruption_fixtures():
        total += 1
        if not validate_presentation(prog.field).ok or not crosscheck(prog).ok:
            caught += 1
    ok = verdict("negative controls: literal Hadamard rejected, corrupted structure constants caught",
                 literal_rejected and total > 0 and caught == total,
                 f"literal rejected: {literal_rejected}, corruptions caught {caught}/{total}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
