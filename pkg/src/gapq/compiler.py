"""Compile a predicate truth table into a program whose designated amplitude is
``-eps**(p+1) * gap(R)`` with ``eps = 12/25``.

Layout: ``p`` qubit cells followed by one four-symbol output cell. The layers
are H on every qubit, a reversible permutation writing ``R(y)`` into the output
cell, J on every qubit, then K and J on the output cell. All amplitudes lie in
``{0, +-3/5, +-4/5, +-1}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .counting import PredicateSpec, gap
from .extnum import Amplitude, CanonicalForm, FieldPresentation, Index
from .program import Accepting, Layer, Program, Register, encode_substate
from .simulator import decide_from, run

EPSILON = Fraction(12, 25)
DENOMINATOR = 5
MAX_ARITY = 4

Matrix = tuple[tuple[Fraction, ...], ...]


def _exact_sqrt(q: Fraction) -> Fraction:
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num != q.numerator or den * den != q.denominator:
        raise ValueError(f"{q} has no rational square root")
    return Fraction(num, den)


def generalized_hadamard(a: int, b: int, delta: Fraction, dim: int = 2,
                         literal: bool = False) -> Matrix:
    """Two-level rotation on symbols ``a, b`` and zero elsewhere.

    Diagonal entries are ``delta`` and ``-delta``. The off-diagonal entry is
    ``sqrt(1 - delta**2)``; ``literal=True`` uses ``1 - delta`` instead, which
    is not unitary and exists only as a negative control.
    """
    delta = Fraction(delta)
    off = 1 - delta if literal else _exact_sqrt(1 - delta * delta)
    m = [[Fraction(0)] * dim for _ in range(dim)]
    m[a][a] = delta
    m[b][b] = -delta
    m[a][b] = m[b][a] = off
    return tuple(tuple(r) for r in m)


def mat_add(x: Matrix, y: Matrix) -> Matrix:
    return tuple(tuple(p + q for p, q in zip(rx, ry)) for rx, ry in zip(x, y))


def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    cols = list(zip(*y))
    return tuple(tuple(sum((p * q for p, q in zip(row, col)), Fraction(0)) for col in cols)
                 for row in x)


def transpose(x: Matrix) -> Matrix:
    return tuple(zip(*x))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def is_orthogonal(x: Matrix) -> bool:
    """Exact ``U^T U == I`` for a real rational matrix."""
    return mat_mul(transpose(x), x) == identity(len(x))


@dataclass(frozen=True)
class GateSet:
    H: Matrix = field(default_factory=lambda: generalized_hadamard(0, 1, Fraction(4, 5)))
    J: Matrix = field(default_factory=lambda: generalized_hadamard(0, 1, Fraction(3, 5)))
    K: Matrix = field(default_factory=lambda: mat_add(
        generalized_hadamard(0, 2, Fraction(3, 5), dim=4),
        generalized_hadamard(1, 3, Fraction(4, 5), dim=4)))
    epsilon: Fraction = EPSILON

    @property
    def J4(self) -> Matrix:
        """J on symbols 0, 1 of the output cell, identity on 2, 3."""
        m = [list(r) for r in identity(4)]
        for i in range(2):
            for j in range(2):
                m[i][j] = self.J[i][j]
        return tuple(tuple(r) for r in m)

    @property
    def JK(self) -> Matrix:
        return mat_mul(self.J4, self.K)


GATES = GateSet()

AMPLITUDE_VALUES = (Fraction(0), Fraction(1), Fraction(-1), Fraction(3, 5), Fraction(-3, 5),
                    Fraction(4, 5), Fraction(-4, 5))


def amplitude_id(q: Fraction) -> str:
    return str(Fraction(q))


def rational_presentation(u: int, values=AMPLITUDE_VALUES) -> FieldPresentation:
    """``m = 0``, ``d = 1`` presentation whose amplitudes are the given rationals."""
    idx = Index(0, ())
    amps = {}
    for q in values:
        q = Fraction(q)
        scaled = q * u
        if scaled.denominator != 1:
            raise ValueError(f"u = {u} does not clear the denominator of {q}")
        amps[amplitude_id(q)] = Amplitude(CanonicalForm({idx: scaled.numerator}), complex(float(q)))
    u_form = CanonicalForm({idx: u})
    return FieldPresentation(m=0, d=1, alpha=(), beta=(1 + 0j,), u_numeric=complex(u),
                             u_form=u_form, struct={(0, 0): u_form}, amplitudes=amps)


def _unitary_layer(cells: tuple[int, ...], mat: Matrix) -> Layer:
    return Layer("unitary", cells, matrix=tuple(tuple(amplitude_id(x) for x in row) for row in mat))


def designated_state(p: int) -> tuple[int, ...]:
    return (0,) * p + (1,)


def compile_gap(r: PredicateSpec, gates: GateSet = GATES) -> Program:
    if r.p > MAX_ARITY:
        raise ValueError(f"arity {r.p} exceeds the compilation cap of {MAX_ARITY}")
    p = r.p
    out = p
    dims = (2,) * p + (4,)
    perm = []
    for i in range(2 ** p * 4):
        y, b = divmod(i, 4)
        nb = b ^ r(y) if b < 2 else b
        perm.append(encode_substate(tuple(int(c) for c in format(y, f"0{p}b")) + (nb,), dims) if p
                    else nb)
    layers = [_unitary_layer((c,), gates.H) for c in range(p)]
    layers.append(Layer("permutation", tuple(range(p + 1)), perm=tuple(perm)))
    layers += [_unitary_layer((c,), gates.J) for c in range(p)]
    layers.append(_unitary_layer((out,), gates.K))
    layers.append(_unitary_layer((out,), gates.J4))
    return Program(
        register=Register(dims),
        field=rational_presentation(DENOMINATOR),
        layers=tuple(layers),
        initial=(0,) * (p + 1),
        accepting=Accepting(states=(designated_state(p),)),
    )


def expected_amplitude(r: PredicateSpec) -> Fraction:
    return -(EPSILON ** (r.p + 1)) * gap(r)


@dataclass
class CompilationReport:
    predicate: str
    gap: int
    T: int
    expected_coefficient: int
    simulated_coefficient: int
    decision: str
    ok: bool
    problems: list[str]

    def to_json(self) -> dict:
        return {"predicate": self.predicate, "gap": self.gap, "T": self.T,
                "expected_coefficient": str(self.expected_coefficient),
                "simulated_coefficient": str(self.simulated_coefficient),
                "decision": self.decision, "ok": self.ok, "problems": self.problems}


def verify_compilation(r: PredicateSpec) -> CompilationReport:
    """Simulate the compiled program exactly and compare against ``-eps**(p+1) * gap``."""
    prog = compile_gap(r)
    exact, _, _ = run(prog, mode="exact")
    g = gap(r)
    scaled = Fraction(DENOMINATOR) ** (2 * prog.T - 1) * expected_amplitude(r)
    problems = []
    if scaled.denominator != 1:
        problems.append(f"scaled target {scaled} is not an integer")
    form = exact.amps.get(designated_state(r.p), CanonicalForm())
    if set(form.terms) - {Index(0, ())}:
        problems.append(f"designated form has unexpected indices: {form!r}")
    simulated = form.coefficient(Index(0, ()))
    if simulated != scaled:
        problems.append(f"designated coefficient {simulated} != expected {scaled}")
    dec = decide_from(prog, exact)
    if dec.accept != (g != 0):
        problems.append(f"decision {dec.label} disagrees with gap {g}")
    return CompilationReport(r.bits, g, prog.T, int(scaled), simulated, dec.label,
                             not problems, problems)
