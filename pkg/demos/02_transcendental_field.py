"""Exact simulation when amplitudes involve transcendental numbers.

The field here adjoins alpha = e^{i} (treated as transcendental) to Q(i).
Amplitudes are stored as integer combinations of beta_j * alpha^k, so exact
cancellation is decided by integer arithmetic even though each amplitude
has a float witness. Both evolutions run side by side, and the trace reports
how far the embedded exact forms drift from the float ones (should be ~1e-16).

Run:  python demos/02_transcendental_field.py
"""
import random

from gapq import decide_nqp, run, validate_presentation
from gapq.extnum import numeric_embed
from gapq.fixtures import random_program

rng = random.Random(2)
prog = random_program(rng, max_layers=6, min_layers=6, m=1, family="gauss", accept_all=True)
fp = prog.field

print(f"field: m = {fp.m} transcendental(s), d = {fp.d} basis elements, e_bound = {fp.e_bound}")
print(f"alpha = {fp.alpha[0]:.6f}   u = {fp.u_numeric}")
print("presentation valid:", validate_presentation(fp).ok)
print(f"register {prog.register.cells}, {prog.T} layers\n")

exact, numeric, trace = run(prog)
for rec in trace.steps:
    print(f"t = {rec.t}  live = {rec.live_states}  max ind = {rec.max_ind:2d} "
          f"(bound {2 * fp.e_bound * rec.t:2d})  norm = {rec.norm:.12f}  "
          f"consistency err = {rec.consistency_max_err:.1e}")

print("\nfinal exact forms (u**(2T-1) times the amplitude):")
scale = fp.u_numeric ** (2 * prog.T - 1)
for state, form in sorted(exact.amps.items()):
    terms = " + ".join(f"{c}*b{k.basis_pos}*a^{k.exponents[0]}" for k, c in form.sorted_terms())
    print(f"  {state}: {terms}")
    print(f"      embeds to {numeric_embed(form, fp) / scale:.6f}, float run gives "
          f"{numeric.amps.get(state, 0j):.6f}")

print("\ndecision:", decide_nqp(prog).label)
