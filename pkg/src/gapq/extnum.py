"""Exact arithmetic for u-scaled amplitudes over a declared field presentation.

An amplitude field is presented by transcendentals ``alpha_1..alpha_m``, a basis
``beta_0..beta_{d-1}`` (with ``beta_0 = 1``) and a common denominator ``u``.
Every u-scaled value is stored as a :class:`CanonicalForm`: a finite map from
an :class:`Index` ``(k; k_1..k_m)`` to a nonzero integer coefficient, standing
for ``sum a_k * prod(alpha_i ** k_i) * beta_k``.

Python integers are unbounded, so coefficients never overflow.
"""
from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

CONSISTENCY_RTOL = 1e-9
CONSISTENCY_ATOL = 1e-12
MIN_ALPHA_MAGNITUDE = 1e-300


class PresentationMismatch(ValueError):
    """Forms or indices whose dimensions disagree with each other or a presentation."""


class UnknownAmplitude(KeyError):
    pass


class Index(NamedTuple):
    basis_pos: int
    exponents: tuple[int, ...]

    @property
    def magnitude(self) -> int:
        return max((abs(k) for k in self.exponents), default=0)

    def to_list(self) -> list[int]:
        return [self.basis_pos, *self.exponents]

    @classmethod
    def from_list(cls, seq: Iterable[int]) -> "Index":
        seq = [int(v) for v in seq]
        if not seq:
            raise ValueError("an index needs at least the basis position")
        return cls(seq[0], tuple(seq[1:]))


def zero_index(m: int) -> Index:
    return Index(0, (0,) * m)


class CanonicalForm:
    """Immutable integer combination of indexed monomials.

    Zero coefficients are dropped on construction, so equality is plain
    equality of the term maps and the empty form is the zero value.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Index, int] | Iterable[tuple[Index, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Index, int] = {}
        width = None
        for idx, coeff in items:
            if not isinstance(idx, Index):
                idx = Index(idx[0], tuple(idx[1]))
            if width is None:
                width = len(idx.exponents)
            elif len(idx.exponents) != width:
                raise PresentationMismatch(
                    f"index {idx.to_list()} has {len(idx.exponents)} exponents, expected {width}"
                )
            acc[idx] = acc.get(idx, 0) + int(coeff)
        self._terms = {k: v for k, v in acc.items() if v != 0}
        self._hash = None

    @classmethod
    def _trusted(cls, terms: dict[Index, int]) -> "CanonicalForm":
        # caller guarantees nonzero coefficients and uniform width
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, value: int, m: int = 0) -> "CanonicalForm":
        return cls({zero_index(m): value})

    @property
    def terms(self) -> Mapping[Index, int]:
        return self._terms

    @property
    def width(self) -> int | None:
        """Number of exponents per index, or None for the zero form."""
        for idx in self._terms:
            return len(idx.exponents)
        return None

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def coefficient(self, idx: Index) -> int:
        return self._terms.get(idx, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CanonicalForm):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "CanonicalForm") -> "CanonicalForm":
        return cf_add(self, other)

    def __neg__(self) -> "CanonicalForm":
        return CanonicalForm._trusted({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "CanonicalForm") -> "CanonicalForm":
        return cf_add(self, -other)

    def scale(self, factor: int) -> "CanonicalForm":
        if factor == 0:
            return CanonicalForm()
        return CanonicalForm._trusted({k: v * factor for k, v in self._terms.items()})

    def sorted_terms(self) -> list[tuple[Index, int]]:
        return sorted(self._terms.items(), key=lambda kv: (kv[0].basis_pos, kv[0].exponents))

    def to_json(self) -> list:
        return [[idx.to_list(), str(c)] for idx, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: Iterable) -> "CanonicalForm":
        return cls((Index.from_list(idx), int(coeff)) for idx, coeff in data)

    def __repr__(self) -> str:
        if not self._terms:
            return "CanonicalForm(0)"
        body = ", ".join(f"{idx.to_list()}: {c}" for idx, c in self.sorted_terms())
        return f"CanonicalForm({{{body}}})"


def _check_width(a: CanonicalForm, b: CanonicalForm) -> None:
    wa, wb = a.width, b.width
    if wa is not None and wb is not None and wa != wb:
        raise PresentationMismatch(f"cannot combine forms over m={wa} and m={wb}")


def cf_add(a: CanonicalForm, b: CanonicalForm) -> CanonicalForm:
    _check_width(a, b)
    if len(a) < len(b):
        a, b = b, a
    out = dict(a.terms)
    for idx, c in b.terms.items():
        s = out.get(idx, 0) + c
        if s:
            out[idx] = s
        else:
            out.pop(idx, None)
    return CanonicalForm._trusted(out)


def ind(a: CanonicalForm) -> int:
    """Largest exponent magnitude over the principal indices; 0 for the zero form."""
    return max((idx.magnitude for idx in a.terms), default=0)


@dataclass(frozen=True)
class Amplitude:
    form: CanonicalForm  # canonical form of u * value
    numeric: complex


@dataclass(frozen=True, eq=True)
class FieldPresentation:
    """User-declared presentation of an amplitude field.

    ``struct[(i, j)]`` is the canonical form of ``u * beta_i * beta_j`` and
    ``amplitudes[name]`` carries the form of ``u * delta`` with a float witness.
    ``e_bound`` is derived from the stored forms unless ``declared_e`` is given,
    in which case the declared value is kept and checked by validation.
    """

    m: int
    d: int
    alpha: tuple[complex, ...]
    beta: tuple[complex, ...]
    u_numeric: complex
    u_form: CanonicalForm
    struct: Mapping[tuple[int, int], CanonicalForm]
    amplitudes: Mapping[str, Amplitude]
    declared_e: int | None = None
    e_bound: int = field(init=False, compare=False)

    def __post_init__(self):
        if len(self.alpha) != self.m:
            raise PresentationMismatch(f"expected {self.m} alpha values, got {len(self.alpha)}")
        if len(self.beta) != self.d or self.d < 1:
            raise PresentationMismatch(f"expected {self.d} beta values, got {len(self.beta)}")
        for i, a in enumerate(self.alpha):
            if abs(a) < MIN_ALPHA_MAGNITUDE:
                raise ValueError(f"alpha_{i + 1} is numerically zero; negative powers undefined")
        missing = [(i, j) for i in range(self.d) for j in range(self.d) if (i, j) not in self.struct]
        if missing:
            raise PresentationMismatch(f"structure constants missing for pairs {missing}")
        for form in self.stored_forms():
            self.check_form(form)
        e = self.computed_e()
        object.__setattr__(self, "e_bound", e if self.declared_e is None else self.declared_e)

    def stored_forms(self):
        yield self.u_form
        yield from self.struct.values()
        for amp in self.amplitudes.values():
            yield amp.form

    def computed_e(self) -> int:
        return max([self.d, *(ind(f) for f in self.stored_forms())])

    def check_form(self, form: CanonicalForm) -> None:
        for idx in form.terms:
            if len(idx.exponents) != self.m or not 0 <= idx.basis_pos < self.d:
                raise PresentationMismatch(
                    f"index {idx.to_list()} outside presentation (m={self.m}, d={self.d})"
                )

    def amplitude(self, name: str) -> Amplitude:
        try:
            return self.amplitudes[name]
        except KeyError:
            raise UnknownAmplitude(name) from None

    # serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        data = {
            "m": self.m,
            "d": self.d,
            "alpha": [_cplx_out(a) for a in self.alpha],
            "beta": [_cplx_out(b) for b in self.beta],
            "u": {"numeric": _cplx_out(self.u_numeric), "form": self.u_form.to_json()},
            "struct": {f"{i},{j}": self.struct[(i, j)].to_json()
                       for i in range(self.d) for j in range(self.d)},
            "amplitudes": {name: {"numeric": _cplx_out(a.numeric), "form": a.form.to_json()}
                           for name, a in sorted(self.amplitudes.items())},
        }
        if self.declared_e is not None:
            data["e"] = self.declared_e
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "FieldPresentation":
        struct = {}
        for key, form in data["struct"].items():
            i, j = (int(s) for s in key.split(","))
            struct[(i, j)] = CanonicalForm.from_json(form)
        amps = {
            str(name): Amplitude(CanonicalForm.from_json(entry["form"]), _cplx_in(entry["numeric"]))
            for name, entry in data.get("amplitudes", {}).items()
        }
        return cls(
            m=int(data["m"]),
            d=int(data["d"]),
            alpha=tuple(_cplx_in(a) for a in data.get("alpha", [])),
            beta=tuple(_cplx_in(b) for b in data["beta"]),
            u_numeric=_cplx_in(data["u"]["numeric"]),
            u_form=CanonicalForm.from_json(data["u"]["form"]),
            struct=struct,
            amplitudes=amps,
            declared_e=int(data["e"]) if "e" in data else None,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "FieldPresentation":
        return cls.from_json(json.loads(text))


def _cplx_in(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    re, im = v
    return complex(float(re), float(im))


def _cplx_out(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


# arithmetic against a presentation -------------------------------------------

def scale_mul_form(state: CanonicalForm, u_delta: CanonicalForm, fp: FieldPresentation) -> CanonicalForm:
    """Return the form of ``u * state * (u*delta)`` given the form of ``u*delta``.

    Each pair of terms multiplies coefficients, adds alpha exponents and expands
    ``u * beta_k * beta_j`` through the structure constants.
    """
    out: dict[Index, int] = {}
    struct = fp.struct
    for kidx, a in state.terms.items():
        kexp = kidx.exponents
        for jidx, b in u_delta.terms.items():
            ab = a * b
            summed = tuple(x + y for x, y in zip(kexp, jidx.exponents))
            for hidx, c in struct[(kidx.basis_pos, jidx.basis_pos)].terms.items():
                key = Index(hidx.basis_pos, tuple(x + y for x, y in zip(summed, hidx.exponents)))
                out[key] = out.get(key, 0) + ab * c
    return CanonicalForm._trusted({k: v for k, v in out.items() if v})


def cf_scale_mul(state: CanonicalForm, delta_id: str, fp: FieldPresentation) -> CanonicalForm:
    """Multiply a u^(2t-1)-scaled value by amplitude ``delta_id``, giving the u^(2t+1) scale."""
    amp = fp.amplitude(delta_id)
    if state.width not in (None, fp.m):
        raise PresentationMismatch(f"form over m={state.width}, presentation has m={fp.m}")
    return scale_mul_form(state, amp.form, fp)


def monomial_value(idx: Index, fp: FieldPresentation) -> complex:
    if len(idx.exponents) != fp.m or not 0 <= idx.basis_pos < fp.d:
        raise PresentationMismatch(f"index {idx.to_list()} outside presentation (m={fp.m}, d={fp.d})")
    v = fp.beta[idx.basis_pos]
    for a, k in zip(fp.alpha, idx.exponents):
        if k:
            v *= a ** k if k > 0 else (1 / a) ** (-k)
    return v


def numeric_embed(a: CanonicalForm, fp: FieldPresentation) -> complex:
    total = 0j
    for idx, c in a.terms.items():
        total += c * monomial_value(idx, fp)
    return total


def close_enough(got: complex, want: complex, rtol: float = CONSISTENCY_RTOL,
                 atol: float = CONSISTENCY_ATOL) -> bool:
    return abs(got - want) <= max(atol, rtol * max(abs(got), abs(want)))


@dataclass
class ValidationReport:
    ok: bool = True
    violations: list[str] = field(default_factory=list)
    max_rel_error: float = 0.0

    def flag(self, message: str) -> None:
        self.ok = False
        self.violations.append(message)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations),
                "max_rel_error": self.max_rel_error}


def validate_presentation(fp: FieldPresentation, rtol: float = CONSISTENCY_RTOL,
                          atol: float = CONSISTENCY_ATOL) -> ValidationReport:
    """Check a presentation numerically; collects every violation instead of stopping."""
    rep = ValidationReport()
    if fp.beta[0] != 1:
        rep.flag(f"beta_0 must be exactly 1, got {fp.beta[0]!r}")
    u = fp.u_numeric
    if abs(u) < MIN_ALPHA_MAGNITUDE:
        rep.flag("u is numerically zero")
        return rep

    def check(label: str, form: CanonicalForm, want: complex) -> None:
        try:
            got = numeric_embed(form, fp) / u
        except (PresentationMismatch, ZeroDivisionError, OverflowError) as exc:
            rep.flag(f"{label}: {exc}")
            return
        err = abs(got - want)
        scale = max(abs(got), abs(want))
        if scale > 0:
            rep.max_rel_error = max(rep.max_rel_error, err / scale)
        if not close_enough(got, want, rtol, atol):
            rep.flag(f"{label}: form embeds to {got!r}, expected {want!r}")

    check("u", fp.u_form, 1.0)
    for i in range(fp.d):
        for j in range(fp.d):
            check(f"struct {i},{j}", fp.struct[(i, j)], fp.beta[i] * fp.beta[j])
    for name, amp in sorted(fp.amplitudes.items()):
        check(f"amplitude {name!r}", amp.form, amp.numeric)

    computed = fp.computed_e()
    if fp.e_bound != computed:
        rep.flag(f"e_bound is {fp.e_bound}, stored forms require {computed}")
    return rep
