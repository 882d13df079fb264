"""Classical counting side: predicate gaps and brute-force path sums.

The path sum enumerates every computation path ``C_0..C_T`` together with
every index sequence ``k_0..k_T`` (``k_0`` the zero index) and adds up the
products of single-step transfers. It never merges paths by state, so it is an
independent check of the simulator's stored coefficients.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .extnum import CanonicalForm, FieldPresentation, Index, validate_presentation, zero_index
from .program import BasisState, Layer, LayerAction, Program
from .simulator import CONSISTENCY_TOL, NORM_TOL, run

DEFAULT_BUDGET = 10 ** 7
MAX_GAP_ARITY = 20
LATTICE_COMPARE_CAP = 10 ** 6  # above this many points per state, compare supports only


class BudgetExceeded(RuntimeError):
    pass


def default_budget() -> int:
    raw = os.environ.get("GAPQ_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class PredicateSpec:
    """Truth table of ``R`` on ``{0,1}^p``; ``table[y]`` with ``y`` read as a binary integer."""

    p: int
    table: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.p <= MAX_GAP_ARITY:
            raise ValueError(f"arity {self.p} outside [0, {MAX_GAP_ARITY}]")
        if len(self.table) != 2 ** self.p:
            raise ValueError(f"table has {len(self.table)} entries, expected {2 ** self.p}")
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("table entries must be 0 or 1")

    @classmethod
    def from_bits(cls, bits: str) -> "PredicateSpec":
        n = len(bits)
        p = n.bit_length() - 1
        if n == 0 or 2 ** p != n:
            raise ValueError(f"bitstring length {n} is not a power of two")
        if set(bits) - {"0", "1"}:
            raise ValueError("bitstring may only contain 0 and 1")
        return cls(p, tuple(int(b) for b in bits))

    @property
    def bits(self) -> str:
        return "".join(map(str, self.table))

    def __call__(self, y: int) -> int:
        return self.table[y]

    def to_json(self) -> dict:
        return {"p": self.p, "table": self.bits}

    @classmethod
    def from_json(cls, data: dict) -> "PredicateSpec":
        pred = cls.from_bits(str(data["table"]))
        if pred.p != int(data["p"]):
            raise ValueError(f"p = {data['p']} but the table has length {len(pred.table)}")
        return pred

    @classmethod
    def loads(cls, text: str) -> "PredicateSpec":
        return cls.from_json(json.loads(text))


def gap(r: PredicateSpec) -> int:
    """Number of ones minus number of zeros."""
    ones = sum(r.table)
    return ones - (len(r.table) - ones)


# single-step transfers ----------------------------------------------------------

def transfers(k: Index, u_delta: CanonicalForm, fp: FieldPresentation) -> dict[Index, int]:
    """All nonzero ``h(k -> k')`` for one transition with ``u*delta`` form ``u_delta``.

    ``h`` is the sum of ``b_j * c_h`` over pairs (term ``j`` of ``u*delta``,
    term ``h`` of ``u * beta_k * beta_j``) with ``h``'s basis equal to ``k'``'s
    and ``k_i + j_i + h_i = k'_i`` for every exponent.
    """
    out: dict[Index, int] = {}
    for j, b in u_delta.terms.items():
        for hh, c in fp.struct[(k.basis_pos, j.basis_pos)].terms.items():
            target = Index(hh.basis_pos, tuple(a + x + y for a, x, y in
                                               zip(k.exponents, j.exponents, hh.exponents)))
            out[target] = out.get(target, 0) + b * c
    return {t: v for t, v in out.items() if v}


def initial_transfers(u_delta: CanonicalForm) -> dict[Index, int]:
    """First-step transfer from the zero index: the major signs of ``u*delta`` itself."""
    return dict(u_delta.terms)


def _amplitude_between(layer: Layer, register, fp, c: BasisState, c2: BasisState):
    for nxt, name in LayerAction(layer, register, fp).successors(c):
        if nxt == c2:
            return True, name
    return False, None


def _u_delta(name, fp: FieldPresentation) -> CanonicalForm:
    return fp.u_form if name is None else fp.amplitudes[name].form


def h_step(c: BasisState, k: Index, c2: BasisState, k2: Index, layer: Layer,
           program: Program) -> int:
    """Major ``k2``-sign of ``u**2 * monomial(k) * delta(c -> c2)``; 0 when unreachable."""
    fp = program.field
    found, name = _amplitude_between(layer, program.register, fp, c, c2)
    if not found:
        return 0
    return transfers(k, _u_delta(name, fp), fp).get(k2, 0)


def in_lattice(k: Index, fp: FieldPresentation, t: int) -> bool:
    bound = 2 * fp.e_bound * t
    return 0 <= k.basis_pos < fp.d and all(abs(x) <= bound for x in k.exponents)


def lattice(fp: FieldPresentation, t: int) -> Iterator[Index]:
    bound = 2 * fp.e_bound * t
    rng = range(-bound, bound + 1)
    for basis in range(fp.d):
        for exps in product(rng, repeat=fp.m):
            yield Index(basis, exps)


# path enumeration ---------------------------------------------------------------

@dataclass
class PathSums:
    values: dict[tuple[BasisState, Index], int]
    visits: int
    paths: int
    dropped: int  # transfers landing outside the lattice

    def f(self, c: BasisState, k: Index) -> int:
        return self.values.get((tuple(c), k), 0)

    def form_at(self, c: BasisState) -> CanonicalForm:
        c = tuple(c)
        return CanonicalForm({k: v for (st, k), v in self.values.items() if st == c})


def path_sums(program: Program, budget: int | None = None) -> PathSums:
    """Enumerate all indexed paths depth-first and total ``h'`` per final (state, index)."""
    budget = default_budget() if budget is None else budget
    if budget < 1:
        raise ValueError("budget must be at least 1")
    fp = program.field
    actions = [LayerAction(layer, program.register, fp) for layer in program.layers]
    T = len(actions)
    cache: dict[tuple[Index, object], dict[Index, int]] = {}

    def step_transfers(i: int, k: Index, name) -> dict[Index, int]:
        key = (k, name) if i else (None, name)
        got = cache.get(key)
        if got is None:
            u_delta = _u_delta(name, fp)
            got = initial_transfers(u_delta) if i == 0 else transfers(k, u_delta, fp)
            cache[key] = got
        return got

    values: dict[tuple[BasisState, Index], int] = {}
    visits = paths = dropped = 0
    stack = [(0, program.initial, zero_index(fp.m), 1)]
    while stack:
        i, c, k, weight = stack.pop()
        visits += 1
        if visits > budget:
            raise BudgetExceeded(f"path enumeration exceeded the budget of {budget} visits")
        if i == T:
            paths += 1
            key = (c, k)
            values[key] = values.get(key, 0) + weight
            continue
        for c2, name in actions[i].successors(c):
            for k2, h in step_transfers(i, k, name).items():
                if not in_lattice(k2, fp, i + 1):
                    dropped += 1
                    continue
                stack.append((i + 1, c2, k2, weight * h))
    return PathSums({key: v for key, v in values.items() if v}, visits, paths, dropped)


def path_sum_f(program: Program, c: BasisState, k: Index, budget: int | None = None) -> int:
    return path_sums(program, budget).f(c, k)


def aggregate_g(program: Program, budget: int | None = None, sums: PathSums | None = None) -> int:
    """Sum of squared path sums over accepting states and lattice indices."""
    if sums is None:
        sums = path_sums(program, budget)
    return sum(v * v for (c, _), v in sums.values.items() if program.accepting(c))


# oracle versus simulator ----------------------------------------------------------

@dataclass
class CrosscheckReport:
    compared: int
    discrepancies: list[dict]
    max_discrepancy: int
    consistency_max_err: float
    norm_max_drift: float
    presentation_ok: bool
    presentation_violations: list[str]
    visits: int
    paths: int
    full_lattice: bool = True

    @property
    def ok(self) -> bool:
        return (not self.discrepancies and self.presentation_ok
                and self.consistency_max_err <= CONSISTENCY_TOL
                and self.norm_max_drift <= NORM_TOL)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "compared": self.compared,
            "max_discrepancy": str(self.max_discrepancy),
            "discrepancies": self.discrepancies,
            "consistency_max_err": self.consistency_max_err,
            "norm_max_drift": self.norm_max_drift,
            "presentation_ok": self.presentation_ok,
            "presentation_violations": self.presentation_violations,
            "visits": self.visits,
            "paths": self.paths,
            "full_lattice": self.full_lattice,
        }


def lattice_size(fp: FieldPresentation, t: int) -> int:
    return fp.d * (4 * fp.e_bound * t + 1) ** fp.m


def crosscheck(program: Program, budget: int | None = None) -> CrosscheckReport:
    """Compare path sums with the simulator at every accepting state and lattice index.

    When the lattice is too large to walk, only the union of both supports is
    compared; indices outside it are zero on both sides anyway.
    """
    sums = path_sums(program, budget)
    exact, _, trace = run(program, mode="both", check_bound=False)
    fp = program.field
    accepting = program.accepting.enumerate(program.register) \
        if program.accepting.states is not None else \
        sorted({c for c, _ in sums.values if program.accepting(c)}
               | {c for c in exact.amps if program.accepting(c)})
    full = lattice_size(fp, program.T) <= LATTICE_COMPARE_CAP
    points = list(lattice(fp, program.T)) if full else None
    compared = 0
    worst = 0
    bad = []
    for c in accepting:
        form = exact.amps.get(c, CanonicalForm())
        if full:
            keys = points
            # anything the simulator stored outside the lattice is a discrepancy too
            keys = keys + sorted((k for k in form.terms if not in_lattice(k, fp, program.T)),
                                 key=lambda i: (i.basis_pos, i.exponents))
        else:
            keys = sorted({k for (st, k) in sums.values if st == c} | set(form.terms),
                          key=lambda i: (i.basis_pos, i.exponents))
        for k in keys:
            compared += 1
            oracle, sim = sums.f(c, k), form.coefficient(k)
            if oracle != sim:
                worst = max(worst, abs(oracle - sim))
                bad.append({"state": list(c), "index": k.to_list(),
                            "path_sum": str(oracle), "simulator": str(sim)})
    pres = validate_presentation(fp)
    return CrosscheckReport(compared, bad, worst, trace.max_consistency_err,
                            trace.max_norm_drift, pres.ok, pres.violations,
                            sums.visits, sums.paths, full)
