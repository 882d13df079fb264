"""Compile counting predicates into programs and read the gap off one amplitude.

A predicate R on p bits has gap(R) = #ones - #zeros. The compiled program uses
only the rationals 0, +-1, +-3/5 and +-4/5, so every amplitude is exact. Its
amplitude at |0...0>|1> is -(12/25)**(p+1) * gap(R). It is nonzero exactly when
the counts differ, which is what the acceptance decision observes.

Run:  python demos/01_gap_to_amplitude.py
"""
from fractions import Fraction

from gapq import PredicateSpec, compile_gap, decide_nqp, gap, run
from gapq.compiler import EPSILON, designated_state
from gapq.extnum import Index

for bits in ["11", "01", "0111", "0110", "10110100", "11101110"]:
    r = PredicateSpec.from_bits(bits)
    prog = compile_gap(r)
    exact, numeric, _ = run(prog)
    target = designated_state(r.p)

    # the stored integer is u**(2T-1) times the amplitude, with u = 5
    coeff = exact.amps[target].coefficient(Index(0, ())) if target in exact.amps else 0
    amplitude = Fraction(coeff, 5 ** (2 * prog.T - 1))
    dec = decide_nqp(prog)

    print(f"R = {bits:<9} gap = {gap(r):+d}  T = {prog.T:2d}  "
          f"amplitude = {str(amplitude):>14}  float = {numeric.amps.get(target, 0j).real:+.6f}  "
          f"{dec.label}")
    assert amplitude == -EPSILON ** (r.p + 1) * gap(r)
