"""Exact simulation of finite quantum programs over presented amplitude fields,
with gap-counting compilation and a brute-force path-sum cross-check."""
from .compiler import EPSILON, GATES, GateSet, compile_gap, generalized_hadamard, verify_compilation
from .counting import (BudgetExceeded, PredicateSpec, aggregate_g, crosscheck, gap, h_step,
                       path_sum_f, path_sums)
from .extnum import (Amplitude, CanonicalForm, FieldPresentation, Index, PresentationMismatch,
                     cf_add, cf_scale_mul, ind, numeric_embed, validate_presentation)
from .program import (Accepting, Layer, Program, ProgramError, Register, check_unitarity,
                      expand_layer, format_program, load_program, parse_program)
from .simulator import (ExactSuperposition, NumericSuperposition, decide_nqp, run, step_exact,
                        step_numeric)

__version__ = "0.1.0"
