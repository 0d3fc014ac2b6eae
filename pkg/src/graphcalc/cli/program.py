"""Einsum programs: subscripts plus operands bound to built-in mediators.

Text form::

    ij,ijk->k @ 2=delta[3,4]
    ab,bc,cd->ad @ 2=fourier[4,inverse]; 3=chi[++-,4]

Operand positions are 1-based. The canonical printed form always carries an
explicit ``->`` and lists bindings by position, so ``parse(str(p)) == p``.

The integer-list calling form lives in a JSON program file::

    {"operands": [[0, 1], [1, 2]], "output": [0, 2], "bindings": {"2": "delta[2,3]"}}

Integer label ``n`` becomes the ``n``-th ASCII letter (``a..z`` then ``A..Z``).
"""
from __future__ import annotations

import json
import re
import string
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..contraction import IndexSpec, parse_subscripts
from ..errors import ParseError, UnknownBuiltin
from ..mediators import Signature, chi_dense, delta_dense, fourier_matrix, gamma_dense

LETTERS = string.ascii_lowercase + string.ascii_uppercase
BUILTINS = ("delta", "gamma", "chi", "fourier")
DIRECTIONS = ("forward", "inverse")

_BUILTIN = re.compile(r"([A-Za-z_]\w*)\[([^\]]*)\]")
_BINDING = re.compile(r"\s*(\d+)\s*=\s*")


@dataclass(frozen=True)
class Builtin:
    """A mediator tensor named in program text, e.g. ``chi[+-+,5]``."""

    kind: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.kind}[{','.join(str(a) for a in self.args)}]"

    @property
    def extents(self) -> tuple[int, ...]:
        if self.kind == "delta":
            return (self.args[1],) * self.args[0]
        if self.kind == "gamma":
            return tuple(self.args) + (int(np.prod(self.args)),)
        if self.kind == "chi":
            return (self.args[1],) * 3
        return (self.args[0],) * 2

    def dense(self, cap=None) -> np.ndarray:
        if self.kind == "delta":
            return delta_dense(self.args[0], self.args[1], cap)
        if self.kind == "gamma":
            return gamma_dense(self.args, cap)
        if self.kind == "chi":
            return chi_dense(self.args[0], self.args[1], cap)
        return fourier_matrix(self.args[0], inverse=self.args[1] == "inverse")


def _int(text: str, pos: int, what: str) -> int:
    text = text.strip()
    if not text.isdigit():
        raise ParseError(f"{what} must be a non-negative integer, got {text!r}", pos)
    return int(text)


def parse_builtin(text: str, offset: int = 0) -> Builtin:
    """Parse ``delta[N,D]``, ``gamma[I1,...,In]``, ``chi[sig,D]`` or ``fourier[D,dir]``."""
    stripped = text.strip()
    lead = offset + len(text) - len(text.lstrip())
    m = _BUILTIN.fullmatch(stripped)
    if m is None:
        raise ParseError(f"malformed builtin {stripped!r}", lead)
    kind, body = m.group(1), m.group(2)
    if kind not in BUILTINS:
        raise UnknownBuiltin(f"unknown builtin {kind!r}; expected one of {', '.join(BUILTINS)}", lead)
    args = body.split(",") if body.strip() else []
    at = lead + len(kind) + 1
    if kind == "gamma":
        if not args:
            raise ParseError("gamma needs at least one input extent", at)
        dims = tuple(_int(a, at, "gamma extent") for a in args)
        if min(dims) < 1:
            raise ParseError("gamma extents must be >= 1", at)
        return Builtin(kind, dims)
    if len(args) != 2:
        raise ParseError(f"{kind} takes 2 arguments, got {len(args)}", at)
    a0, a1 = args[0].strip(), args[1].strip()
    if kind == "delta":
        rank, dim = _int(a0, at, "delta rank"), _int(a1, at, "delta extent")
        if rank < 1 or dim < 1:
            raise ParseError("delta rank and extent must be >= 1", at)
        return Builtin(kind, (rank, dim))
    if kind == "chi":
        try:
            sig = Signature.parse(a0)
        except ValueError as exc:
            raise ParseError(f"bad signature {a0!r}: {exc}", at) from None
        dim = _int(a1, at, "chi extent")
        if dim < 1:
            raise ParseError("chi extent must be >= 1", at)
        return Builtin(kind, (str(sig), dim))
    dim = _int(a0, at, "fourier extent")
    if dim < 1:
        raise ParseError("fourier extent must be >= 1", at)
    if a1 not in DIRECTIONS:
        raise ParseError(f"fourier direction must be forward or inverse, got {a1!r}", at)
    return Builtin(kind, (dim, a1))


@dataclass(frozen=True)
class EinsumProgram:
    spec: IndexSpec
    builtins: tuple[tuple[int, Builtin], ...] = field(default=())

    def __post_init__(self):
        n = len(self.spec.inputs)
        seen = set()
        for pos, b in self.builtins:
            if not 1 <= pos <= n:
                raise ParseError(f"binding for operand {pos}, but the program has {n} operands")
            if pos in seen:
                raise ParseError(f"operand {pos} bound twice")
            seen.add(pos)
            if len(b.extents) != len(self.spec.inputs[pos - 1]):
                raise ParseError(
                    f"operand {pos} has {len(self.spec.inputs[pos - 1])} labels "
                    f"but {b} has rank {len(b.extents)}")
        object.__setattr__(self, "builtins", tuple(sorted(self.builtins, key=lambda t: t[0])))

    @property
    def n_operands(self) -> int:
        return len(self.spec.inputs)

    @property
    def free_positions(self) -> tuple[int, ...]:
        """1-based positions that still need a tensor from the caller."""
        bound = {pos for pos, _ in self.builtins}
        return tuple(p for p in range(1, self.n_operands + 1) if p not in bound)

    def __str__(self) -> str:
        text = str(self.spec)
        if self.builtins:
            text += " @ " + "; ".join(f"{pos}={b}" for pos, b in self.builtins)
        return text

    def operands(self, tensors, cap=None) -> list[np.ndarray]:
        """Interleave caller tensors (for free positions, in order) with builtins."""
        tensors = list(tensors)
        if len(tensors) != len(self.free_positions):
            raise ParseError(
                f"program needs {len(self.free_positions)} operand tensors, got {len(tensors)}")
        fixed = dict(self.builtins)
        it = iter(tensors)
        return [fixed[p].dense(cap) if p in fixed else next(it)
                for p in range(1, self.n_operands + 1)]


def _split_bindings(text: str, offset: int):
    pos = offset
    for chunk in text.split(";"):
        m = _BINDING.match(chunk)
        if m is None:
            raise ParseError("expected '<operand>=<builtin>'", pos)
        yield int(m.group(1)), parse_builtin(chunk[m.end():], pos + m.end())
        pos += len(chunk) + 1


def parse(text: str) -> EinsumProgram:
    """Parse program text; positions in errors count characters of ``text``."""
    head, at, tail = text.partition("@")
    try:
        spec = parse_subscripts(head)
    except ParseError as exc:
        # parse_subscripts counts positions after dropping spaces
        raise ParseError(str(exc).rsplit(" at position", 1)[0],
                         _raw_position(head, exc.position)) from None
    builtins = tuple(_split_bindings(tail, len(head) + 1)) if at else ()
    if at and not tail.strip():
        raise ParseError("empty binding list", len(text))
    return EinsumProgram(spec, builtins)


def _raw_position(text: str, squeezed: int | None) -> int | None:
    if squeezed is None:
        return None
    seen = 0
    for k, ch in enumerate(text):
        if ch == " ":
            continue
        if seen == squeezed:
            return k
        seen += 1
    return len(text)


def label_for(n: int) -> str:
    if not 0 <= n < len(LETTERS):
        raise ParseError(f"integer label {n} outside 0..{len(LETTERS) - 1}")
    return LETTERS[n]


def from_lists(operands, output=None, bindings=None) -> EinsumProgram:
    """Program from the integer-list calling form."""
    try:
        inputs = [[label_for(int(n)) for n in labels] for labels in operands]
        out = None if output is None else [label_for(int(n)) for n in output]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"integer labels expected: {exc}") from None
    if not inputs:
        raise ParseError("no operands", 0)
    spec = IndexSpec.from_lists(inputs, out)
    builtins = tuple((int(k), parse_builtin(v)) for k, v in (bindings or {}).items())
    return EinsumProgram(spec, builtins)


def load_program(path) -> EinsumProgram:
    """Read a JSON program file: either ``{"program": "<text>"}`` or the integer-list form."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"program file is not JSON: {exc.msg}", exc.pos) from None
    if not isinstance(obj, dict):
        raise ParseError("program file must hold a JSON object")
    if "program" in obj:
        return parse(obj["program"])
    if "operands" not in obj:
        raise ParseError("program file needs 'program' or 'operands'")
    return from_lists(obj["operands"], obj.get("output"), obj.get("bindings"))
