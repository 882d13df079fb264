"""Exact and floating-point evolution of program superpositions.

Exact amplitudes at time ``t >= 1`` are stored as canonical forms of
``u**(2t-1) * amplitude``. The first layer multiplies the unit initial
amplitude by the ``u*delta`` forms directly (scale ``u**1``); every later layer
goes through :func:`~gapq.extnum.scale_mul_form`, which contributes ``u**2``.
Permutation layers act as amplitude-1 gates and use ``u_form`` so every live
state shares one scale.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .extnum import (CanonicalForm, FieldPresentation, cf_add, ind, numeric_embed,
                     scale_mul_form, zero_index)
from .program import BasisState, Layer, LayerAction, Program

log = logging.getLogger(__name__)

NORM_TOL = 1e-6
CONSISTENCY_TOL = 1e-6
PRUNE_TOL = 1e-15


class IndexBoundViolation(RuntimeError):
    """A live form has an index beyond ``2 * e * t``; the presentation is broken."""


@dataclass(frozen=True)
class ExactSuperposition:
    t: int
    amps: dict[BasisState, CanonicalForm]

    @classmethod
    def initial(cls, state: BasisState, fp: FieldPresentation) -> "ExactSuperposition":
        # t = 0 holds the unscaled unit amplitude; it is never zero-tested
        return cls(0, {state: CanonicalForm.constant(1, fp.m)})

    def max_ind(self) -> int:
        return max((ind(f) for f in self.amps.values()), default=0)


@dataclass(frozen=True)
class NumericSuperposition:
    amps: dict[BasisState, complex]

    def norm(self) -> float:
        return sum(abs(a) ** 2 for a in self.amps.values()) ** 0.5


def _u_delta(name: str | None, fp: FieldPresentation) -> CanonicalForm:
    return fp.u_form if name is None else fp.amplitudes[name].form


def step_exact(s: ExactSuperposition, layer: Layer | LayerAction, fp: FieldPresentation,
               register=None, check_bound: bool = True) -> ExactSuperposition:
    action = layer if isinstance(layer, LayerAction) else LayerAction(layer, register, fp)
    out: dict[BasisState, CanonicalForm] = {}
    first = s.t == 0
    origin = zero_index(fp.m)
    if first and any(set(f.terms) - {origin} for f in s.amps.values()):
        raise ValueError("a t = 0 superposition must hold integer constants")
    for state, form in s.amps.items():
        for nxt, name in action.successors(state):
            u_delta = _u_delta(name, fp)
            if first:
                # t = 0 forms are integer constants, so u * c * delta is c times the u*delta form
                contrib = u_delta.scale(form.coefficient(origin))
            else:
                contrib = scale_mul_form(form, u_delta, fp)
            prev = out.get(nxt)
            out[nxt] = contrib if prev is None else cf_add(prev, contrib)
    t = s.t + 1
    amps = {st: f for st, f in out.items() if f}
    if check_bound:
        bound = 2 * fp.e_bound * t
        for st, f in amps.items():
            if ind(f) > bound:
                raise IndexBoundViolation(
                    f"state {list(st)} at t={t} has ind {ind(f)} > 2*e*t = {bound}")
    return ExactSuperposition(t, amps)


def step_numeric(s: NumericSuperposition, layer: Layer | LayerAction, fp: FieldPresentation,
                 register=None) -> NumericSuperposition:
    action = layer if isinstance(layer, LayerAction) else LayerAction(layer, register, fp)
    out: dict[BasisState, complex] = {}
    for state, amp in s.amps.items():
        for nxt, name in action.successors(state):
            val = amp if name is None else amp * fp.amplitudes[name].numeric
            out[nxt] = out.get(nxt, 0j) + val
    return NumericSuperposition({st: a for st, a in out.items() if abs(a) >= PRUNE_TOL})


@dataclass
class StepRecord:
    t: int
    norm: float
    live_states: int
    max_ind: int
    consistency_max_err: float

    def to_json(self) -> dict:
        return {"t": self.t, "norm": self.norm, "live_states": self.live_states,
                "max_ind": self.max_ind, "consistency_max_err": self.consistency_max_err}


@dataclass
class Trace:
    steps: list[StepRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def max_consistency_err(self) -> float:
        return max((s.consistency_max_err for s in self.steps), default=0.0)

    @property
    def max_norm_drift(self) -> float:
        return max((abs(s.norm - 1.0) for s in self.steps), default=0.0)


def consistency_error(exact: ExactSuperposition, numeric: NumericSuperposition,
                      fp: FieldPresentation) -> float:
    """Largest ``|embed(form) / u**(2t-1) - amplitude|`` over the union of live states."""
    t = exact.t
    scale = fp.u_numeric ** (2 * t - 1) if t > 0 else 1.0
    worst = 0.0
    for st in set(exact.amps) | set(numeric.amps):
        form = exact.amps.get(st)
        got = numeric_embed(form, fp) / scale if form is not None else 0j
        worst = max(worst, abs(got - numeric.amps.get(st, 0j)))
    return worst


def run(program: Program, mode: str = "both", check_bound: bool = True
        ) -> tuple[ExactSuperposition | None, NumericSuperposition | None, Trace]:
    """Apply every layer in the requested flavours (``exact``, ``numeric`` or ``both``)."""
    if mode not in ("exact", "numeric", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    fp = program.field
    do_exact = mode in ("exact", "both")
    do_numeric = mode in ("numeric", "both")
    exact = ExactSuperposition.initial(program.initial, fp) if do_exact else None
    numeric = NumericSuperposition({program.initial: 1 + 0j}) if do_numeric else None
    trace = Trace()
    for layer in program.layers:
        action = LayerAction(layer, program.register, fp)
        if do_exact:
            exact = step_exact(exact, action, fp, check_bound=check_bound)
        if do_numeric:
            numeric = step_numeric(numeric, action, fp)
        t = exact.t if exact is not None else len(trace.steps) + 1
        norm = numeric.norm() if numeric is not None else float("nan")
        if numeric is not None and abs(norm - 1.0) > NORM_TOL:
            trace.warnings.append(f"t={t}: norm drifted to {norm!r}")
        err = consistency_error(exact, numeric, fp) if do_exact and do_numeric else 0.0
        if err > CONSISTENCY_TOL:
            trace.warnings.append(f"t={t}: exact/numeric consistency error {err:.3g}")
        live = len(exact.amps) if exact is not None else len(numeric.amps)
        trace.steps.append(StepRecord(t, norm, live, exact.max_ind() if exact else 0, err))
    for w in trace.warnings:
        log.warning(w)
    return exact, numeric, trace


@dataclass
class Decision:
    accept: bool
    g: int
    evidence: list[dict]

    @property
    def label(self) -> str:
        return "accept" if self.accept else "reject"


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def decide_from(program: Program, exact: ExactSuperposition) -> Decision:
    fp = program.field
    scale = fp.u_numeric ** (2 * exact.t - 1)
    if program.accepting.states is not None:
        candidates = sorted(set(program.accepting.states))
    else:
        candidates = sorted(st for st in exact.amps if program.accepting(st))
    evidence = []
    g = 0
    for st in candidates:
        form = exact.amps.get(st, CanonicalForm())
        g += sum(c * c for _, c in form)
        evidence.append({
            "state": list(st),
            "form": form.to_json(),
            "numeric": _pair(numeric_embed(form, fp) / scale),
        })
    accept = any(exact.amps.get(st) for st in candidates)
    return Decision(accept, g, evidence)


def decide_nqp(program: Program) -> Decision:
    """Accept iff some accepting state ends with a nonzero canonical form."""
    exact, _, _ = run(program, mode="exact")
    return decide_from(program, exact)


def trace_report(program: Program, exact: ExactSuperposition | None,
                 numeric: NumericSuperposition | None, trace: Trace) -> dict:
    final = []
    states = set()
    if exact is not None:
        states |= set(exact.amps)
    if numeric is not None:
        states |= set(numeric.amps)
    for st in sorted(states):
        entry: dict = {"state": list(st)}
        if exact is not None:
            entry["form"] = exact.amps.get(st, CanonicalForm()).to_json()
        if numeric is not None:
            z = numeric.amps.get(st, 0j)
            entry["numeric"] = _pair(z)
        final.append(entry)
    report = {"steps": [s.to_json() for s in trace.steps], "final": final,
              "warnings": list(trace.warnings), "decision": None, "g": None}
    if exact is not None:
        dec = decide_from(program, exact)
        report["decision"] = dec.label
        report["g"] = str(dec.g)
    return report
