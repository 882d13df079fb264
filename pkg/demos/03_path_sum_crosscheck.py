"""Cross-check the simulator against brute-force path sums, then break it on purpose.

Every stored coefficient is a sum over computation paths of integer
products. The counting oracle enumerates those paths independently of the
superposition code and should agree exactly. A corrupted structure constant
(sqrt2 * sqrt2 claimed to be 3/2 instead of 2) is flagged both by presentation
validation and by the numeric side of the crosscheck.

Run:  python demos/03_path_sum_crosscheck.py
"""
from gapq import crosscheck, path_sums
from gapq.fixtures import corrupt_struct, hadamard_sqrt2_program, oracle_fixtures, with_field

total = 0
for i, prog in enumerate(oracle_fixtures(25)):
    rep = crosscheck(prog)
    total += rep.compared
    status = "ok" if rep.ok else "MISMATCH"
    print(f"fixture {i:2d}: {prog.register.cells!s:<10} T={prog.T}  paths={rep.paths:4d}  "
          f"compared={rep.compared}  {status}")
print(f"{total} coefficients compared\n")

prog = hadamard_sqrt2_program(2)
sums = path_sums(prog)
print("H*H with 1/sqrt2 entries: path sums per final state")
for state in [(0,), (1,)]:
    print(f"  {state}: {sums.form_at(state)!r}")

bad = with_field(prog, corrupt_struct(prog.field, (1, 1)))
rep = crosscheck(bad)
print("\ncorrupted presentation:")
print("  crosscheck ok:", rep.ok)
for v in rep.presentation_violations:
    print("  -", v)
print(f"  exact/numeric consistency error: {rep.consistency_max_err:.3f}")
