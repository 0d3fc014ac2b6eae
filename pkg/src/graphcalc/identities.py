"""The identity catalog as checkable equalities.

Each identity states its two sides once, against a small operations
interface. :class:`NumericOps` evaluates them directly; the diagram
builder :class:`~graphcalc.diagram.Net` implements the same interface, so
the same definition also yields both sides as diagrams for the rewrite
engine.

Identities 9 and 10 are the textbook statements and hold with the
``textbook`` Kronecker layout. Under the default layout the Kronecker factors
swap places; :data:`MIRRORED` holds that form of identity 9.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import products
from .contraction import einsum_eval
from .errors import ShapeContractError, UnknownIdentity
from .mediators import diag_embed, diag_extract, trace
from .tensor import relative_residual, vectorize_col, vectorize_row

IDENTITY_TOL = 1e-10


class NumericOps:
    """Dense evaluation of the combinators used by the catalog."""

    def dot(self, x, y):
        if np.ndim(y) == 1:
            return products.dot(x, y[:, None])[:, 0]
        return products.dot(x, y)

    def kron(self, x, y, layout="gamma"):
        return products.kronecker(x, y, layout)

    def hadamard(self, x, y):
        return products.hadamard(x, y)

    def khatri_rao_col(self, x, y, layout="gamma"):
        return products.khatri_rao_col(x, y, layout)

    def khatri_rao_row(self, x, y, layout="gamma"):
        return products.khatri_rao_row(x, y, layout)

    def tracy_singh(self, x, y):
        return products.tracy_singh(x, y)

    def transpose(self, x):
        return np.transpose(x)

    def times(self, x, y):
        return np.multiply.outer(x, y)

    def block(self, x, row_dims, col_dims):
        (ro, ri), (co, ci) = row_dims, col_dims
        # flat = outer + inner * n_outer, so row-major axes are (inner, outer)
        return x.reshape(ri, ro, ci, co).transpose(1, 3, 0, 2)

    def block_dot(self, x, y):
        return einsum_eval("ijkl,jmln->imkn", [x, y])

    def col(self, x):
        return vectorize_col(x)

    def row(self, x):
        return vectorize_row(x)

    def trace(self, x):
        return trace(x)

    def diag(self, x):
        return diag_embed(x) if np.ndim(x) == 1 else diag_extract(x)

    def identity(self, n):
        return np.eye(n)


Sides = Callable[[object, Mapping, Mapping], object]


@dataclass(frozen=True)
class Identity:
    """One catalog entry.

    ``shapes`` maps operand names to tuples of extent symbols. ``lhs`` and
    ``rhs`` take ``(ops, operands, dims)``.
    """

    index: int
    name: str
    statement: str
    shapes: Mapping[str, tuple[str, ...]]
    lhs: Sides
    rhs: Sides
    diagonal: tuple[str, ...] = ()

    @property
    def symbols(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for syms in self.shapes.values():
            seen.update(dict.fromkeys(syms))
        return tuple(seen)


def bisymmetry(f: str, g: str) -> tuple[Sides, Sides]:
    """Both sides of ``f(g(A, B), g(C, D)) == g(f(A, C), f(B, D))``."""

    def lhs(ops, x, dims):
        F, G = getattr(ops, f), getattr(ops, g)
        return F(G(x["A"], x["B"]), G(x["C"], x["D"]))

    def rhs(ops, x, dims):
        F, G = getattr(ops, f), getattr(ops, g)
        return G(F(x["A"], x["C"]), F(x["B"], x["D"]))

    return lhs, rhs


def _entry(index, name, statement, shapes, lhs, rhs, diagonal=()):
    return Identity(index, name, statement, shapes, lhs, rhs, diagonal)


_KR = bisymmetry("hadamard", "khatri_rao_col")
_KH = bisymmetry("hadamard", "kron")

CATALOG: tuple[Identity, ...] = (
    _entry(
        1, "mixed-product", "(AB)⊗(CD) == (A⊗C)(B⊗D)",
        {"A": ("I", "J"), "B": ("J", "K"), "C": ("L", "M"), "D": ("M", "N")},
        lambda o, x, d: o.kron(o.dot(x["A"], x["B"]), o.dot(x["C"], x["D"])),
        lambda o, x, d: o.dot(o.kron(x["A"], x["C"]), o.kron(x["B"], x["D"])),
    ),
    _entry(
        2, "kr-hadamard-bisym", "(A⊙B)∘(C⊙D) == (A∘C)⊙(B∘D)",
        {"A": ("I", "J"), "B": ("K", "J"), "C": ("I", "J"), "D": ("K", "J")},
        *_KR,
    ),
    _entry(
        3, "kron-hadamard-bisym", "(A⊗B)∘(C⊗D) == (A∘C)⊗(B∘D)",
        {"A": ("I", "J"), "B": ("K", "L"), "C": ("I", "J"), "D": ("K", "L")},
        *_KH,
    ),
    _entry(
        4, "tracy-singh-mixed", "(A⋆B)(C⋆D) == (AC)⋆(BD)",
        {"A": ("I", "J", "K", "L"), "B": ("P", "Q", "R", "S"),
         "C": ("J", "M", "L", "N"), "D": ("Q", "T", "S", "U")},
        lambda o, x, d: o.dot(o.tracy_singh(x["A"], x["B"]), o.tracy_singh(x["C"], x["D"])),
        lambda o, x, d: o.tracy_singh(o.block_dot(x["A"], x["C"]), o.block_dot(x["B"], x["D"])),
    ),
    _entry(
        5, "kr-transpose", "(A⊙B)ᵀ(C⊙D) == AᵀC ∘ BᵀD",
        {"A": ("I", "J"), "B": ("K", "J"), "C": ("I", "L"), "D": ("K", "L")},
        lambda o, x, d: o.dot(o.transpose(o.khatri_rao_col(x["A"], x["B"])),
                              o.khatri_rao_col(x["C"], x["D"])),
        lambda o, x, d: o.hadamard(o.dot(o.transpose(x["A"]), x["C"]),
                                   o.dot(o.transpose(x["B"]), x["D"])),
    ),
    _entry(
        6, "kron-factor", "A⊗B == (A⊗𝟙)(𝟙⊗B)",
        {"A": ("I", "J"), "B": ("K", "L")},
        lambda o, x, d: o.kron(x["A"], x["B"]),
        lambda o, x, d: o.dot(o.kron(x["A"], o.identity(d["K"])),
                              o.kron(o.identity(d["J"]), x["B"])),
    ),
    _entry(
        7, "kron-trace", "Tr(A⊗B) == Tr(A)Tr(B)",
        {"A": ("I", "I"), "B": ("K", "K")},
        lambda o, x, d: o.trace(o.kron(x["A"], x["B"])),
        lambda o, x, d: o.times(o.trace(x["A"]), o.trace(x["B"])),
    ),
    _entry(
        8, "kron-transpose", "(A⊗B)ᵀ == Aᵀ⊗Bᵀ",
        {"A": ("I", "J"), "B": ("K", "L")},
        lambda o, x, d: o.transpose(o.kron(x["A"], x["B"])),
        lambda o, x, d: o.kron(o.transpose(x["A"]), o.transpose(x["B"])),
    ),
    _entry(
        9, "vec-triple", "col(ABC) == (Cᵀ⊗A)col(B)",
        {"A": ("I", "J"), "B": ("J", "K"), "C": ("K", "L")},
        lambda o, x, d: o.col(o.dot(o.dot(x["A"], x["B"]), x["C"])),
        lambda o, x, d: o.dot(o.kron(o.transpose(x["C"]), x["A"], "textbook"),
                              o.col(x["B"])),
    ),
    _entry(
        10, "vec-triple-diag", "col(ABC) == (Cᵀ⊙A)diag(B), B diagonal",
        {"A": ("I", "J"), "B": ("J", "J"), "C": ("J", "L")},
        lambda o, x, d: o.col(o.dot(o.dot(x["A"], x["B"]), x["C"])),
        lambda o, x, d: o.dot(o.khatri_rao_col(o.transpose(x["C"]), x["A"], "textbook"),
                              o.diag(x["B"])),
        diagonal=("B",),
    ),
    _entry(
        11, "new-tracy-singh", "col(A⊗B)row(C⊗D) == (col(A)row(C))⋆(col(B)row(D))",
        {"A": ("I", "J"), "B": ("K", "L"), "C": ("P", "Q"), "D": ("R", "S")},
        lambda o, x, d: o.times(o.col(o.kron(x["A"], x["B"])), o.row(o.kron(x["C"], x["D"]))),
        lambda o, x, d: o.tracy_singh(
            o.block(o.times(o.col(x["A"]), o.row(x["C"])), (d["I"], d["J"]), (d["Q"], d["P"])),
            o.block(o.times(o.col(x["B"]), o.row(x["D"])), (d["K"], d["L"]), (d["S"], d["R"])),
        ),
    ),
    _entry(
        12, "new-hadamard", "col(A∘B)row(C∘D) == (col(A)row(C))∘(col(B)row(D))",
        {"A": ("I", "J"), "B": ("I", "J"), "C": ("P", "Q"), "D": ("P", "Q")},
        lambda o, x, d: o.times(o.col(o.hadamard(x["A"], x["B"])),
                                o.row(o.hadamard(x["C"], x["D"]))),
        lambda o, x, d: o.hadamard(o.times(o.col(x["A"]), o.row(x["C"])),
                                   o.times(o.col(x["B"]), o.row(x["D"]))),
    ),
    _entry(
        13, "col-hadamard", "col(A∘B) == col(A)∘col(B)",
        {"A": ("I", "J"), "B": ("I", "J")},
        lambda o, x, d: o.col(o.hadamard(x["A"], x["B"])),
        lambda o, x, d: o.hadamard(o.col(x["A"]), o.col(x["B"])),
    ),
    _entry(
        14, "row-hadamard", "row(C∘D) == row(C)∘row(D)",
        {"C": ("I", "J"), "D": ("I", "J")},
        lambda o, x, d: o.row(o.hadamard(x["C"], x["D"])),
        lambda o, x, d: o.hadamard(o.row(x["C"]), o.row(x["D"])),
    ),
    _entry(
        15, "colrow-transpose", "col(A)ᵀ == row(Aᵀ)",
        {"A": ("I", "J")},
        lambda o, x, d: o.transpose(o.col(x["A"])),
        lambda o, x, d: o.row(o.transpose(x["A"])),
    ),
)

BY_NAME: dict[str, Identity] = {e.name: e for e in CATALOG}
NAMES: tuple[str, ...] = tuple(BY_NAME)

# identity 9 with the default layout: the Kronecker factors trade places
MIRRORED = _entry(
    9, "vec-triple-gamma", "col(ABC) == (A⊗Cᵀ)col(B)",
    BY_NAME["vec-triple"].shapes,
    BY_NAME["vec-triple"].lhs,
    lambda o, x, d: o.dot(o.kron(x["A"], o.transpose(x["C"])), o.col(x["B"])),
)


@dataclass(frozen=True)
class IdentityCase:
    name: str
    dims: dict[str, int]
    seed: int
    residual: float
    tolerance: float = IDENTITY_TOL
    passed: bool = field(init=False)

    def __post_init__(self):
        if not self.residual >= 0:
            raise ValueError(f"residual must be >= 0, got {self.residual}")
        object.__setattr__(self, "passed", bool(self.residual < self.tolerance))

    def to_dict(self) -> dict:
        return asdict(self)


def lookup(name) -> Identity:
    if isinstance(name, Identity):
        return name
    if isinstance(name, int) and 1 <= name <= len(CATALOG):
        return CATALOG[name - 1]
    try:
        return BY_NAME[name]
    except (KeyError, TypeError):
        raise UnknownIdentity(f"unknown identity {name!r}; known: {', '.join(NAMES)}") from None


def _check_dims(entry: Identity, dims: Mapping[str, int]) -> dict[str, int]:
    missing = [s for s in entry.symbols if s not in dims]
    if missing:
        raise ShapeContractError(f"{entry.name}: no extent given for {', '.join(missing)}")
    out = {}
    for s in entry.symbols:
        n = dims[s]
        if int(n) != n or n < 1:
            raise ShapeContractError(f"{entry.name}: extent {s}={n} must be a positive integer")
        out[s] = int(n)
    return out


def _random(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.random(shape) + 1j * rng.random(shape)


def make_operands(entry: Identity, dims: Mapping[str, int], seed: int) -> dict[str, np.ndarray]:
    """Random complex operands, entries uniform in the unit square."""
    rng = np.random.default_rng(seed)
    ops = {}
    for name, syms in entry.shapes.items():
        shape = tuple(dims[s] for s in syms)
        if name in entry.diagonal:
            ops[name] = diag_embed(_random(rng, shape[0]))
        else:
            ops[name] = _random(rng, shape)
    return ops


def _check_operands(entry: Identity, dims: Mapping[str, int], operands: Mapping) -> dict:
    out = {}
    for name, syms in entry.shapes.items():
        if name not in operands:
            raise ShapeContractError(f"{entry.name}: operand {name} missing")
        t = np.asarray(operands[name])
        want = tuple(dims[s] for s in syms)
        if t.shape != want:
            raise ShapeContractError(
                f"{entry.name}: {name} has shape {t.shape}, contract {''.join(syms)} needs {want}")
        if name in entry.diagonal and np.any(t[~np.eye(t.shape[0], dtype=bool)]):
            raise ShapeContractError(f"{entry.name}: {name} must be diagonal")
        out[name] = t
    return out


def sides(name, dims: Mapping[str, int], seed: int = 0, operands: Mapping | None = None):
    """Evaluate both sides numerically; returns ``(lhs, rhs)``."""
    entry = lookup(name)
    dims = _check_dims(entry, dims)
    if operands is None:
        operands = make_operands(entry, dims, seed)
    x = _check_operands(entry, dims, operands)
    ops = NumericOps()
    return entry.lhs(ops, x, dims), entry.rhs(ops, x, dims)


def check(name, dims: Mapping[str, int], seed: int = 0, operands: Mapping | None = None,
          tolerance: float = IDENTITY_TOL) -> IdentityCase:
    """Residual of one identity on seeded random operands (or the given ones).

    Raises :class:`UnknownIdentity` for names outside the catalog and
    :class:`ShapeContractError` when ``dims`` or ``operands`` break the
    identity's shape contract.
    """
    entry = lookup(name)
    lhs, rhs = sides(entry, dims, seed, operands)
    residual = relative_residual(lhs, rhs) if np.shape(lhs) == np.shape(rhs) else float("inf")
    return IdentityCase(entry.name, dict(_check_dims(entry, dims)), seed, residual, tolerance)


def diagrams(name, dims: Mapping[str, int], seed: int = 0, operands: Mapping | None = None):
    """Both sides built as diagrams over dense operand nodes."""
    from .diagram import Net

    entry = lookup(name)
    dims = _check_dims(entry, dims)
    if operands is None:
        operands = make_operands(entry, dims, seed)
    x = _check_operands(entry, dims, operands)
    out = []
    for side in (entry.lhs, entry.rhs):
        net = Net()
        leaves = {k: net.dense(v, k) for k, v in x.items()}
        out.append(net.build(side(net, leaves, dims)))
    return tuple(out)


def check_structural(name, dims: Mapping[str, int], seed: int = 0, trace: list | None = None) -> IdentityCase:
    """Simplify both diagram sides, then compare their values with each other.

    The returned residual is the worst of: simplified left vs simplified
    right, and each simplified side vs its direct numeric value.
    """
    from .diagram import evaluate, simplify

    entry = lookup(name)
    dims = _check_dims(entry, dims)
    operands = make_operands(entry, dims, seed)
    num = sides(entry, dims, seed, operands)
    vals = []
    for d in diagrams(entry, dims, seed, operands):
        steps: list = []
        vals.append(evaluate(simplify(d, steps)))
        if trace is not None:
            trace.append(steps)
    residual = max(
        relative_residual(vals[0], vals[1]),
        relative_residual(vals[0], num[0]),
        relative_residual(vals[1], num[1]),
    )
    return IdentityCase(entry.name, dict(dims), seed, residual)


def random_dims(entry: Identity, rng: np.random.Generator, profile: tuple[int, int]) -> dict[str, int]:
    lo, hi = profile
    return {s: int(rng.integers(lo, hi + 1)) for s in entry.symbols}


def check_all(profile: tuple[int, int] = (2, 5), trials: int = 100, seed: int = 0,
              names=None, tolerance: float = IDENTITY_TOL) -> list[IdentityCase]:
    """Run each identity ``trials`` times over random extents in ``profile``.

    Returns the worst case per identity, in catalog order. Failures are
    recorded in the report, never raised.
    """
    if trials <= 0:
        return []
    entries = CATALOG if names is None else tuple(lookup(n) for n in names)
    report = []
    for entry in entries:
        rng = np.random.default_rng([seed, entry.index])
        worst = None
        for t in range(trials):
            dims = random_dims(entry, rng, profile)
            case = check(entry, dims, seed=seed * 1_000_003 + t, tolerance=tolerance)
            if worst is None or case.residual > worst.residual:
                worst = case
        report.append(worst)
    return report

