"""Ready-made presentations and programs, plus a seeded random generator.

Random presentations use unit-modulus transcendentals ``exp(i*theta)`` as the
alphas, an optional quadratic basis element (``sqrt 2`` or ``i``) and a
denominator ``u = r * alpha**w``. Gate entries are built as
``phase * rotation * phase`` so each gate is unitary. Every value is tracked
twice: symbolically (for the canonical form) and as a float product of its
factors (for the numeric witness), so presentation consistency is a real check.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .extnum import Amplitude, CanonicalForm, FieldPresentation, Index
from .program import Accepting, Layer, Program, Register

THETAS = (1.0, math.sqrt(2.0), math.sqrt(3.0), math.pi / math.e)
BASES = {
    "rational": None,
    "sqrt2": (math.sqrt(2.0) + 0j, 2),  # beta_1 and beta_1**2 as an integer
    "gauss": (1j, -1),
}


@dataclass(frozen=True)
class Value:
    """A field element as ``{(basis, exponents): rational}`` with a float witness."""

    terms: tuple
    numeric: complex

    @classmethod
    def make(cls, terms: dict, numeric: complex) -> "Value":
        return cls(tuple(sorted((k, v) for k, v in terms.items() if v)), complex(numeric))

    @property
    def key(self):
        return self.terms


class ValueAlgebra:
    def __init__(self, m: int, square: int | None):
        self.m = m
        self.square = square  # beta_1**2, None when d = 1

    def const(self, q, numeric=None) -> Value:
        q = Fraction(q)
        return Value.make({(0, (0,) * self.m): q}, float(q) if numeric is None else numeric)

    def mul(self, a: Value, b: Value) -> Value:
        out: dict = {}
        for (ka, ea), qa in a.terms:
            for (kb, eb), qb in b.terms:
                exps = tuple(x + y for x, y in zip(ea, eb))
                basis, q = ka + kb, qa * qb
                if basis == 2:
                    basis, q = 0, q * self.square
                out[(basis, exps)] = out.get((basis, exps), 0) + q
        return Value.make(out, a.numeric * b.numeric)


@dataclass
class RandomField:
    family: str
    m: int
    alg: ValueAlgebra
    alpha: tuple[complex, ...]
    beta: tuple[complex, ...]
    phases: list[Value]
    rotations: list[tuple[tuple[Value, ...], ...]]


def _random_field(rng: random.Random, m: int | None = None, family: str | None = None) -> RandomField:
    m = rng.choice([0, 1, 2]) if m is None else m
    family = rng.choice(list(BASES)) if family is None else family
    base = BASES[family]
    alg = ValueAlgebra(m, None if base is None else base[1])
    thetas = rng.sample(THETAS, m)
    alpha = tuple(cmath.exp(1j * th) for th in thetas)
    beta = (1 + 0j,) if base is None else (1 + 0j, base[0])

    def mono(exps, sign=1):
        num = sign * math.prod((a ** e if e >= 0 else (1 / a) ** -e) for a, e in zip(alpha, exps))
        return Value.make({(0, tuple(exps)): Fraction(sign)}, num)

    phases = [alg.const(1), alg.const(-1)]
    for i in range(m):
        unit = [0] * m
        unit[i] = 1
        phases.append(mono(unit))
        phases.append(mono([-x for x in unit], -1))
    if m == 2:
        phases.append(mono([1, -1]))
    if family == "gauss":
        zero = (0,) * m
        phases.append(Value.make({(1, zero): Fraction(1)}, 1j))
        phases.append(Value.make({(0, zero): Fraction(3, 5), (1, zero): Fraction(4, 5)},
                                 complex(0.6, 0.8)))
        phases.append(Value.make({(0, zero): Fraction(5, 13), (1, zero): Fraction(-12, 13)},
                                 complex(5 / 13, -12 / 13)))

    def rot(c, s):
        c, s = Fraction(c), Fraction(s)
        return ((alg.const(c), alg.const(s)), (alg.const(s), alg.const(-c)))

    rotations = [rot(Fraction(3, 5), Fraction(4, 5)), rot(Fraction(4, 5), Fraction(3, 5)),
                 rot(Fraction(5, 13), Fraction(12, 13)),
                 ((alg.const(1), alg.const(0)), (alg.const(0), alg.const(1))),
                 ((alg.const(0), alg.const(1)), (alg.const(1), alg.const(0)))]
    if family == "sqrt2":
        zero = (0,) * m
        h = Value.make({(1, zero): Fraction(1, 2)}, 1 / math.sqrt(2.0))
        hn = Value.make({(1, zero): Fraction(-1, 2)}, -1 / math.sqrt(2.0))
        rotations.append(((h, h), (h, hn)))
    return RandomField(family, m, alg, alpha, beta, phases, rotations)


def _random_gate2(rng: random.Random, fld: RandomField) -> list[list[Value]]:
    rot = rng.choice(fld.rotations)
    left = [rng.choice(fld.phases) for _ in range(2)]
    right = [rng.choice(fld.phases) for _ in range(2)]
    return [[fld.alg.mul(fld.alg.mul(left[i], rot[i][j]), right[j]) for j in range(2)]
            for i in range(2)]


def _embed(block: list[list[Value]], dim: int, a: int, b: int, fld: RandomField) -> list[list[Value]]:
    mat = [[fld.alg.const(int(i == j)) for j in range(dim)] for i in range(dim)]
    pos = (a, b)
    for i in range(2):
        for j in range(2):
            mat[pos[i]][pos[j]] = block[i][j]
    return mat


def _controlled(block: list[list[Value]], fld: RandomField) -> list[list[Value]]:
    mat = [[fld.alg.const(int(i == j)) for j in range(4)] for i in range(4)]
    for i in range(2):
        for j in range(2):
            mat[2 + i][2 + j] = block[i][j]
    return mat


def build_presentation(fld: RandomField, values: list[Value], u_rational: int,
                       u_exps: tuple[int, ...]) -> tuple[FieldPresentation, dict]:
    """Presentation with ``u = u_rational * alpha**u_exps``; returns it with a value-to-id map."""
    m = fld.m
    u_num = u_rational * math.prod((a ** e if e >= 0 else (1 / a) ** -e)
                                   for a, e in zip(fld.alpha, u_exps))
    u_val = Value.make({(0, u_exps): Fraction(u_rational)}, u_num)

    def form_of(v: Value) -> CanonicalForm:
        scaled = fld.alg.mul(u_val, v)
        terms = {}
        for (basis, exps), q in scaled.terms:
            if q.denominator != 1:
                raise ValueError(f"u does not clear the denominator of {v}")
            terms[Index(basis, exps)] = q.numerator
        return CanonicalForm(terms)

    d = len(fld.beta)
    zero = (0,) * m
    basis_vals = [fld.alg.const(1)]
    if d == 2:
        basis_vals.append(Value.make({(1, zero): Fraction(1)}, fld.beta[1]))
    struct = {(i, j): form_of(fld.alg.mul(basis_vals[i], basis_vals[j]))
              for i in range(d) for j in range(d)}
    ids: dict = {}
    amps = {}
    for v in [fld.alg.const(0), fld.alg.const(1), *values]:
        if v.key in ids:
            continue
        name = {(): "0"}.get(v.key, "1" if v.key == fld.alg.const(1).key else f"a{len(ids) - 2}")
        ids[v.key] = name
        amps[name] = Amplitude(form_of(v), v.numeric)
    fp = FieldPresentation(m=m, d=d, alpha=fld.alpha, beta=fld.beta, u_numeric=u_num,
                           u_form=form_of(fld.alg.const(1)), struct=struct, amplitudes=amps)
    return fp, ids


def _denominator_lcm(values: list[Value]) -> int:
    out = 1
    for v in values:
        for _, q in v.terms:
            out = math.lcm(out, q.denominator)
    return out


REGISTERS = ((2,), (4,), (2, 2), (2, 4), (4, 2), (2, 2, 2))


def random_program(rng: random.Random, max_layers: int = 6, m: int | None = None,
                   family: str | None = None, registers=REGISTERS, min_layers: int = 1,
                   accept_all: bool = False) -> Program:
    """Random valid program over at most eight basis states."""
    fld = _random_field(rng, m, family)
    cells = rng.choice(registers)
    register = Register(tuple(cells))
    T = rng.randint(min_layers, max_layers)
    raw_layers = []  # (kind, cells, matrix of Value | perm)
    for _ in range(T):
        roll = rng.random()
        qubits = [c for c, n in enumerate(cells) if n == 2]
        if roll < 0.15:
            k = rng.randint(1, len(cells))
            targets = tuple(sorted(rng.sample(range(len(cells)), k)))
            dim = math.prod(cells[c] for c in targets)
            perm = list(range(dim))
            rng.shuffle(perm)
            raw_layers.append(("permutation", targets, tuple(perm)))
        elif roll < 0.3 and len(qubits) >= 2:
            targets = tuple(rng.sample(qubits, 2))
            raw_layers.append(("unitary", targets, _controlled(_random_gate2(rng, fld), fld)))
        else:
            c = rng.randrange(len(cells))
            block = _random_gate2(rng, fld)
            if cells[c] == 2:
                mat = block
            else:
                a, b = rng.sample(range(cells[c]), 2)
                mat = _embed(block, cells[c], a, b, fld)
            raw_layers.append(("unitary", (c,), mat))

    values = [v for kind, _, mat in raw_layers if kind == "unitary" for row in mat for v in row]
    u_rational = _denominator_lcm(values) * rng.choice([1, 1, 2])
    u_exps = tuple(rng.choice([-1, 0, 0, 1]) for _ in range(fld.m))
    fp, ids = build_presentation(fld, values, u_rational, u_exps)

    layers = []
    for kind, targets, body in raw_layers:
        if kind == "permutation":
            layers.append(Layer("permutation", targets, perm=body))
        else:
            layers.append(Layer("unitary", targets,
                                matrix=tuple(tuple(ids[v.key] for v in row) for row in body)))
    all_states = list(register.states())
    if accept_all:
        accepting = Accepting(states=tuple(all_states))
    elif rng.random() < 0.25:
        c = rng.randrange(len(cells))
        accepting = Accepting(constraints=((c, rng.randrange(cells[c])),))
    else:
        accepting = Accepting(states=tuple(sorted(rng.sample(all_states, rng.randint(1, min(3, len(all_states)))))))
    return Program(register, fp, tuple(layers), rng.choice(all_states), accepting)


# hand-built fixtures ----------------------------------------------------------------

def sqrt2_presentation() -> FieldPresentation:
    """``beta = (1, sqrt 2)``, ``u = 2``, amplitudes ``+-1/sqrt 2``, 0 and 1."""
    b0, b1 = Index(0, ()), Index(1, ())
    r = 1 / math.sqrt(2.0)
    return FieldPresentation(
        m=0, d=2, alpha=(), beta=(1 + 0j, math.sqrt(2.0) + 0j), u_numeric=2 + 0j,
        u_form=CanonicalForm({b0: 2}),
        struct={(0, 0): CanonicalForm({b0: 2}), (0, 1): CanonicalForm({b1: 2}),
                (1, 0): CanonicalForm({b1: 2}), (1, 1): CanonicalForm({b0: 4})},
        amplitudes={"0": Amplitude(CanonicalForm(), 0j), "1": Amplitude(CanonicalForm({b0: 2}), 1 + 0j),
                    "inv_sqrt2": Amplitude(CanonicalForm({b1: 1}), complex(r)),
                    "-inv_sqrt2": Amplitude(CanonicalForm({b1: -1}), complex(-r))},
    )


def trivial_presentation() -> FieldPresentation:
    one = CanonicalForm({Index(0, ()): 1})
    return FieldPresentation(m=0, d=1, alpha=(), beta=(1 + 0j,), u_numeric=1 + 0j, u_form=one,
                             struct={(0, 0): one},
                             amplitudes={"one": Amplitude(one, 1 + 0j), "0": Amplitude(CanonicalForm(), 0j)})


def hadamard_sqrt2_program(layers: int = 2) -> Program:
    """Repeated ``1/sqrt 2`` Hadamards on one qubit, accepting ``|1>``."""
    h = Layer("unitary", (0,), matrix=(("inv_sqrt2", "inv_sqrt2"), ("inv_sqrt2", "-inv_sqrt2")))
    return Program(Register((2,)), sqrt2_presentation(), (h,) * layers, (0,),
                   Accepting(states=((1,),)))


def rational_hh_program() -> Program:
    """H = [[4/5, 3/5], [3/5, -4/5]] twice on ``|0>``; the ``|1>`` amplitude cancels exactly."""
    from .compiler import GATES, _unitary_layer, rational_presentation
    h = _unitary_layer((0,), GATES.H)
    return Program(Register((2,)), rational_presentation(5), (h, h), (0,),
                   Accepting(states=((1,),)))


def identity_program(cells=(2,), layers: int = 1, fp: FieldPresentation | None = None) -> Program:
    fp = trivial_presentation() if fp is None else fp
    one = "one" if "one" in fp.amplitudes else "1"
    zero = "0"
    n = cells[0]
    mat = tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
    lay = Layer("unitary", (0,), matrix=mat)
    init = (0,) * len(cells)
    return Program(Register(tuple(cells)), fp, (lay,) * layers, init, Accepting(states=(init,)))


def corrupt_struct(fp: FieldPresentation, pair: tuple[int, int] | None = None, delta: int = -1
                   ) -> FieldPresentation:
    """Copy of ``fp`` with one structure-constant coefficient shifted by ``delta``."""
    pair = (fp.d - 1, fp.d - 1) if pair is None else pair
    form = fp.struct[pair]
    idx, c = form.sorted_terms()[0]
    struct = dict(fp.struct)
    struct[pair] = CanonicalForm({**form.terms, idx: c + delta})
    return FieldPresentation(m=fp.m, d=fp.d, alpha=fp.alpha, beta=fp.beta, u_numeric=fp.u_numeric,
                             u_form=fp.u_form, struct=struct, amplitudes=fp.amplitudes)


def with_field(program: Program, fp: FieldPresentation) -> Program:
    return Program(program.register, fp, program.layers, program.initial, program.accepting)


def oracle_fixtures(count: int = 25, seed: int = 2024) -> list[Program]:
    """Hand fixtures followed by seeded random programs (<= 8 states, T <= 4).

    The random ones accept every basis state so the whole final superposition
    is compared.
    """
    progs = [identity_program(), rational_hh_program(), hadamard_sqrt2_program(2),
             hadamard_sqrt2_program(3), identity_program((2, 4), layers=3)]
    rng = random.Random(seed)
    families = list(BASES)
    i = 0
    while len(progs) < count:
        progs.append(random_program(rng, max_layers=4, min_layers=3, m=i % 3,
                                    family=families[i % 3], accept_all=True))
        i += 1
    return progs


__all__ = [
    "RandomField", "Value", "ValueAlgebra", "build_presentation", "corrupt_struct",
    "hadamard_sqrt2_program", "identity_program", "oracle_fixtures",
    "random_program", "rational_hh_program", "sqrt2_presentation", "trivial_presentation",
    "with_field",
]
