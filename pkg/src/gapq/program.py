"""Finite register-of-cells programs: layers of local unitaries or permutations.

A program file is JSON::

    {"field": {...} | "path/to/field.json",
     "register": [2, 2, 4],
     "initial": [0, 0, 0],
     "layers": [{"kind": "unitary", "cells": [0], "matrix": [["a", "b"], ["b", "c"]]},
                {"kind": "permutation", "cells": [1, 2], "perm": [0, 1, ...]}],
     "accepting": {"states": [[0, 0, 1]]} | {"constraints": [{"cell": 2, "value": 1}]}}

Matrices are indexed ``matrix[out][in]`` over the targeted sub-space, whose
sub-states are numbered in mixed radix with the first listed cell most
significant. ``perm[i]`` is the image of sub-state ``i``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterator

import numpy as np

from .extnum import FieldPresentation, PresentationMismatch, UnknownAmplitude

MAX_STATES = 2 ** 24
UNITARITY_TOL = 1e-9

BasisState = tuple[int, ...]


class ProgramError(ValueError):
    """Malformed or invalid program; ``location`` names the offending field."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class StateSpaceTooLarge(ProgramError):
    pass


class NonUnitaryLayer(ProgramError):
    pass


@dataclass(frozen=True)
class Register:
    cells: tuple[int, ...]

    def __post_init__(self):
        for i, size in enumerate(self.cells):
            if size < 1:
                raise ProgramError(f"alphabet size must be positive, got {size}", f"register[{i}]")
        if self.size > MAX_STATES:
            raise StateSpaceTooLarge(f"{self.size} basis states exceeds the cap of {MAX_STATES}",
                                     "register")

    @property
    def size(self) -> int:
        return math.prod(self.cells)

    def check_state(self, state, where: str = "state") -> BasisState:
        state = tuple(int(s) for s in state)
        if len(state) != len(self.cells):
            raise ProgramError(f"expected {len(self.cells)} symbols, got {len(state)}", where)
        for c, (s, n) in enumerate(zip(state, self.cells)):
            if not 0 <= s < n:
                raise ProgramError(f"symbol {s} out of alphabet of size {n} at cell {c}", where)
        return state

    def states(self) -> Iterator[BasisState]:
        return product(*(range(n) for n in self.cells))


@dataclass(frozen=True)
class Layer:
    kind: str  # "unitary" or "permutation"
    cells: tuple[int, ...]
    matrix: tuple[tuple[str, ...], ...] | None = None
    perm: tuple[int, ...] | None = None

    def sub_dims(self, register: Register) -> tuple[int, ...]:
        return tuple(register.cells[c] for c in self.cells)


@dataclass(frozen=True)
class Accepting:
    states: tuple[BasisState, ...] | None = None
    constraints: tuple[tuple[int, int], ...] | None = None

    def __call__(self, state: BasisState) -> bool:
        if self.states is not None:
            return state in self.states
        return all(state[c] == v for c, v in self.constraints)

    def enumerate(self, register: Register) -> list[BasisState]:
        if self.states is not None:
            return sorted(set(self.states))
        fixed = dict(self.constraints)
        ranges = [(fixed[c],) if c in fixed else range(n) for c, n in enumerate(register.cells)]
        return list(product(*ranges))


@dataclass(frozen=True)
class Program:
    register: Register
    field: FieldPresentation
    layers: tuple[Layer, ...]
    initial: BasisState
    accepting: Accepting

    @property
    def T(self) -> int:
        return len(self.layers)


# layer semantics ----------------------------------------------------------------

def encode_substate(sub: tuple[int, ...], dims: tuple[int, ...]) -> int:
    i = 0
    for s, n in zip(sub, dims):
        i = i * n + s
    return i


def decode_substate(i: int, dims: tuple[int, ...]) -> tuple[int, ...]:
    out = []
    for n in reversed(dims):
        i, s = divmod(i, n)
        out.append(s)
    return tuple(reversed(out))


def numeric_matrix(layer: Layer, fp: FieldPresentation, register: Register) -> np.ndarray:
    dim = math.prod(layer.sub_dims(register))
    if layer.kind == "permutation":
        mat = np.zeros((dim, dim), dtype=complex)
        for i, j in enumerate(layer.perm):
            mat[j, i] = 1.0
        return mat
    return np.array([[fp.amplitude(a).numeric for a in row] for row in layer.matrix], dtype=complex)


@dataclass
class UnitarityReport:
    ok: bool
    deviation: float
    detail: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "deviation": self.deviation, "detail": self.detail}


def check_unitarity(layer: Layer, fp: FieldPresentation, register: Register | None = None,
                    tol: float = UNITARITY_TOL) -> UnitarityReport:
    """Numeric ``max|U^H U - I|``; permutation layers are checked exactly for bijectivity."""
    if layer.kind == "permutation":
        n = len(layer.perm)
        ok = sorted(layer.perm) == list(range(n))
        return UnitarityReport(ok, 0.0 if ok else 1.0, "" if ok else "table is not a bijection")
    try:
        mat = np.array([[fp.amplitude(a).numeric for a in row] for row in layer.matrix],
                       dtype=complex)
    except UnknownAmplitude as exc:
        return UnitarityReport(False, math.inf, f"unknown amplitude {exc}")
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return UnitarityReport(False, math.inf, f"matrix shape {mat.shape} is not square")
    dev = float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))
    ok = dev <= tol
    return UnitarityReport(ok, dev, "" if ok else f"deviation {dev:.3g} exceeds {tol:g}")


class LayerAction:
    """Sparse action of one layer on full basis states.

    ``successors(state)`` lists ``(next_state, amplitude_id)``; permutation
    layers report ``None`` for the exact amplitude 1. Entries that are zero both
    symbolically and numerically are omitted.
    """

    def __init__(self, layer: Layer, register: Register, fp: FieldPresentation):
        for c in layer.cells:
            if not 0 <= c < len(register.cells):
                raise ProgramError(f"cell index {c} out of range", "layer.cells")
        if len(set(layer.cells)) != len(layer.cells):
            raise ProgramError("target cells must be distinct", "layer.cells")
        self.layer = layer
        self.cells = layer.cells
        self.dims = layer.sub_dims(register)
        dim = math.prod(self.dims)
        # column table: sub-index in -> [(sub-state out, amplitude id)]
        self._columns: list[list[tuple[tuple[int, ...], str | None]]] = []
        if layer.kind == "permutation":
            for i in range(dim):
                self._columns.append([(decode_substate(layer.perm[i], self.dims), None)])
        else:
            for i in range(dim):
                col = []
                for j in range(dim):
                    name = layer.matrix[j][i]
                    amp = fp.amplitude(name)
                    if amp.form or amp.numeric != 0:
                        col.append((decode_substate(j, self.dims), name))
                self._columns.append(col)

    def successors(self, state: BasisState) -> list[tuple[BasisState, str | None]]:
        sub = tuple(state[c] for c in self.cells)
        out = []
        for target, name in self._columns[encode_substate(sub, self.dims)]:
            nxt = list(state)
            for c, s in zip(self.cells, target):
                nxt[c] = s
            out.append((tuple(nxt), name))
        return out


def expand_layer(layer: Layer, register: Register, fp: FieldPresentation) -> LayerAction:
    return LayerAction(layer, register, fp)


# parsing / printing -------------------------------------------------------------

def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ProgramError(f"missing field {key!r}", where)
    return obj[key]


def _int_list(value, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool)
                                               for v in value):
        raise ProgramError("expected a list of integers", where)
    return tuple(value)


def _parse_layer(raw, i: int, register: Register, fp: FieldPresentation) -> Layer:
    where = f"layers[{i}]"
    if not isinstance(raw, dict):
        raise ProgramError("layer must be an object", where)
    kind = _require(raw, "kind", where)
    cells = _int_list(_require(raw, "cells", where), f"{where}.cells")
    if not cells:
        raise ProgramError("a layer must target at least one cell", f"{where}.cells")
    for c in cells:
        if not 0 <= c < len(register.cells):
            raise ProgramError(f"cell index {c} out of range", f"{where}.cells")
    if len(set(cells)) != len(cells):
        raise ProgramError("target cells must be distinct", f"{where}.cells")
    dim = math.prod(register.cells[c] for c in cells)
    if kind == "permutation":
        perm = _int_list(_require(raw, "perm", where), f"{where}.perm")
        if len(perm) != dim:
            raise ProgramError(f"table has {len(perm)} entries, sub-space has {dim}", f"{where}.perm")
        if sorted(perm) != list(range(dim)):
            raise ProgramError("permutation table is not a bijection", f"{where}.perm")
        return Layer("permutation", cells, perm=perm)
    if kind == "unitary":
        matrix = _require(raw, "matrix", where)
        if not isinstance(matrix, list) or len(matrix) != dim:
            raise ProgramError(f"matrix must have {dim} rows", f"{where}.matrix")
        rows = []
        for r, row in enumerate(matrix):
            if not isinstance(row, list) or len(row) != dim:
                raise ProgramError(f"row must have {dim} entries", f"{where}.matrix[{r}]")
            for c, name in enumerate(row):
                if not isinstance(name, str):
                    raise ProgramError("amplitude ids must be strings", f"{where}.matrix[{r}][{c}]")
                if name not in fp.amplitudes:
                    raise ProgramError(f"unknown amplitude id {name!r}", f"{where}.matrix[{r}][{c}]")
            rows.append(tuple(row))
        return Layer("unitary", cells, matrix=tuple(rows))
    raise ProgramError(f"unknown layer kind {kind!r}", f"{where}.kind")


def parse_program(text: str, base_dir: str | Path | None = None, check: bool = True) -> Program:
    """Parse a program file; with ``check`` every unitary layer must pass :func:`check_unitarity`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProgramError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ProgramError("program must be a JSON object", "<root>")

    raw_field = _require(doc, "field", "<root>")
    if isinstance(raw_field, str):
        path = Path(raw_field)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        try:
            raw_field = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ProgramError(f"cannot read field presentation: {exc}", "field") from None
        except json.JSONDecodeError as exc:
            raise ProgramError(exc.msg, f"field file line {exc.lineno} column {exc.colno}") from None
    try:
        fp = FieldPresentation.from_json(raw_field)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProgramError(f"bad field presentation: {exc}", "field") from None

    register = Register(_int_list(_require(doc, "register", "<root>"), "register"))
    initial = register.check_state(_int_list(_require(doc, "initial", "<root>"), "initial"),
                                   "initial")
    raw_layers = _require(doc, "layers", "<root>")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ProgramError("a program needs at least one layer", "layers")
    layers = tuple(_parse_layer(raw, i, register, fp) for i, raw in enumerate(raw_layers))

    acc = _require(doc, "accepting", "<root>")
    if "states" in acc:
        states = tuple(register.check_state(_int_list(s, f"accepting.states[{i}]"),
                                            f"accepting.states[{i}]")
                       for i, s in enumerate(acc["states"]))
        accepting = Accepting(states=states)
    elif "constraints" in acc:
        cons = []
        for i, con in enumerate(acc["constraints"]):
            where = f"accepting.constraints[{i}]"
            cell, value = int(_require(con, "cell", where)), int(_require(con, "value", where))
            if not 0 <= cell < len(register.cells) or not 0 <= value < register.cells[cell]:
                raise ProgramError(f"constraint cell {cell} = {value} out of range", where)
            cons.append((cell, value))
        accepting = Accepting(constraints=tuple(cons))
    else:
        raise ProgramError("expected 'states' or 'constraints'", "accepting")

    program = Program(register, fp, layers, initial, accepting)
    if check:
        for i, layer in enumerate(layers):
            rep = check_unitarity(layer, fp, register)
            if not rep.ok:
                raise NonUnitaryLayer(rep.detail, f"layers[{i}]")
    return program


def program_to_json(program: Program) -> dict:
    layers = []
    for layer in program.layers:
        entry = {"kind": layer.kind, "cells": list(layer.cells)}
        if layer.kind == "permutation":
            entry["perm"] = list(layer.perm)
        else:
            entry["matrix"] = [list(row) for row in layer.matrix]
        layers.append(entry)
    acc = program.accepting
    if acc.states is not None:
        accepting = {"states": [list(s) for s in acc.states]}
    else:
        accepting = {"constraints": [{"cell": c, "value": v} for c, v in acc.constraints]}
    return {
        "field": program.field.to_json(),
        "register": list(program.register.cells),
        "initial": list(program.initial),
        "layers": layers,
        "accepting": accepting,
    }


def format_program(program: Program) -> str:
    return json.dumps(program_to_json(program), indent=1, sort_keys=True) + "\n"


def load_program(path: str | Path, check: bool = True) -> Program:
    path = Path(path)
    return parse_program(path.read_text(encoding="utf-8"), base_dir=path.parent, check=check)


__all__ = [
    "Accepting", "BasisState", "Layer", "LayerAction", "MAX_STATES", "NonUnitaryLayer",
    "PresentationMismatch", "Program", "ProgramError", "Register", "StateSpaceTooLarge",
    "UnitarityReport", "check_unitarity", "expand_layer", "format_program", "load_program",
    "numeric_matrix", "parse_program", "program_to_json",
]
