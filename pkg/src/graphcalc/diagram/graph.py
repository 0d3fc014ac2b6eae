"""Tensor diagrams: node kinds, the immutable multigraph, evaluation, export."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from math import prod
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Union

import numpy as np

from ..contraction import IndexSpec, einsum_eval
from ..errors import DanglingPort, DiagramError, ExtentMismatch, PortReuse
from ..mediators import (
    GammaSpec,
    Signature,
    chi_dense,
    delta_dense,
    fourier_matrix,
    gamma_dense,
)
from ..serialization import load_tensor, tensor_from_record, tensor_to_record
from ..tensor import as_tensor

DEFAULT_BUDGET = 10**9

Port = tuple  # (node_id, port_index)


@dataclass(frozen=True, eq=False)
class Dense:
    tensor: np.ndarray
    name: str = "T"

    def __post_init__(self):
        t = as_tensor(self.tensor).copy()
        t.flags.writeable = False
        object.__setattr__(self, "tensor", t)

    @property
    def extents(self) -> tuple[int, ...]:
        return self.tensor.shape

    def dense(self, cap=None) -> np.ndarray:
        return self.tensor

    def key(self):
        return ("dense", self.name, self.tensor.shape, self.tensor.dtype.str, self.tensor.tobytes())


@dataclass(frozen=True)
class Delta:
    rank: int
    dim: int

    @property
    def extents(self):
        return (self.dim,) * self.rank

    def dense(self, cap=None):
        return delta_dense(self.rank, self.dim, cap)

    def key(self):
        return ("delta", self.rank, self.dim)


@dataclass(frozen=True)
class Gamma:
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", GammaSpec(tuple(self.dims)).input_dims)

    @property
    def extents(self):
        return self.dims + (prod(self.dims),)

    def dense(self, cap=None):
        return gamma_dense(self.dims, cap)

    def key(self):
        return ("gamma", self.dims)


@dataclass(frozen=True)
class Chi:
    signature: Signature
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "signature", Signature.coerce(self.signature))

    @property
    def extents(self):
        return (self.dim,) * 3

    def dense(self, cap=None):
        return chi_dense(self.signature, self.dim, cap)

    def key(self):
        return ("chi", str(self.signature), self.dim)


@dataclass(frozen=True)
class Fourier:
    dim: int
    inverse: bool = False

    @property
    def extents(self):
        return (self.dim, self.dim)

    def dense(self, cap=None):
        return fourier_matrix(self.dim, self.inverse)

    def key(self):
        return ("fourier", self.dim, self.inverse)


NodeKind = Union[Dense, Delta, Gamma, Chi, Fourier]


@dataclass(frozen=True, eq=False)
class Diagram:
    """Nodes joined by wires; unwired ports are the output indices, in ``free`` order.

    ``scale`` is a scalar multiplier accumulated by rewrites. Construct
    through :func:`build`, which checks every invariant.
    """

    nodes: Mapping[int, NodeKind]
    wires: tuple[tuple[Port, Port], ...]
    free: tuple[Port, ...]
    scale: complex = 1.0

    @cached_property
    def partner(self) -> dict[Port, Port]:
        out = {}
        for p, q in self.wires:
            out[p] = q
            out[q] = p
        return out

    @cached_property
    def free_slot(self) -> dict[Port, int]:
        return {p: k for k, p in enumerate(self.free)}

    def extent(self, port: Port) -> int:
        return self.nodes[port[0]].extents[port[1]]

    def ports(self, node_id: int) -> list[Port]:
        return [(node_id, k) for k in range(len(self.nodes[node_id].extents))]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def wire_count(self) -> int:
        return len(self.wires)

    @property
    def free_extents(self) -> tuple[int, ...]:
        return tuple(self.extent(p) for p in self.free)

    def neighbours(self, node_id: int) -> list[int]:
        seen = []
        for p in self.ports(node_id):
            q = self.partner.get(p)
            if q is not None and q[0] != node_id and q[0] not in seen:
                seen.append(q[0])
        return seen

    def structure(self):
        """Hashable summary used to compare diagrams structurally."""
        nodes = tuple((i, self.nodes[i].key()) for i in sorted(self.nodes))
        return nodes, self.wires, self.free, complex(self.scale)

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return self.structure() == other.structure()

    def __hash__(self):
        return hash(self.structure())

    def __repr__(self):
        kinds = ", ".join(f"{i}:{type(k).__name__}" for i, k in sorted(self.nodes.items()))
        return f"Diagram([{kinds}], wires={len(self.wires)}, free={len(self.free)}, scale={self.scale})"


def _canonical_wires(wires) -> tuple:
    pairs = []
    for p, q in wires:
        p, q = (int(p[0]), int(p[1])), (int(q[0]), int(q[1]))
        pairs.append((p, q) if p <= q else (q, p))
    return tuple(sorted(pairs))


def make_diagram(nodes: Mapping[int, NodeKind], wires, free, scale=1.0, allow_empty=True) -> Diagram:
    """Validate and freeze a diagram. Rewrites use this with ``allow_empty``."""
    nodes = dict(sorted((int(i), k) for i, k in nodes.items()))
    wires = _canonical_wires(wires)
    free = tuple((int(p[0]), int(p[1])) for p in free)
    if not nodes and not allow_empty:
        raise DiagramError("empty diagram")
    used: set = set()

    def claim(port, where):
        node_id, idx = port
        if node_id not in nodes:
            raise DiagramError(f"{where} references unknown node {node_id}")
        if not 0 <= idx < len(nodes[node_id].extents):
            raise DiagramError(f"{where} references missing port {port}")
        if port in used:
            raise PortReuse(f"port {port} is used more than once")
        used.add(port)

    for p, q in wires:
        claim(p, "wire")
        claim(q, "wire")
        ep = nodes[p[0]].extents[p[1]]
        eq = nodes[q[0]].extents[q[1]]
        if ep != eq:
            raise ExtentMismatch(f"wire {p}-{q}", ep, eq)
    for p in free:
        claim(p, "free list")
    for node_id, kind in nodes.items():
        for k in range(len(kind.extents)):
            if (node_id, k) not in used:
                raise DanglingPort(f"port {(node_id, k)} is neither wired nor free")
    return Diagram(MappingProxyType(nodes), wires, free, scale)


def build(nodes, wiring, free_order, scale=1.0) -> Diagram:
    """Build a diagram from node kinds, port pairs and the output port order.

    ``nodes`` is a mapping ``id -> kind`` or a sequence (ids are positions).
    """
    if not isinstance(nodes, Mapping):
        nodes = dict(enumerate(nodes))
    return make_diagram(nodes, wiring, free_order, scale, allow_empty=False)


# ---------------------------------------------------------------------------
# evaluation


class _Labels:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def new(self) -> int:
        k = len(self.parent)
        self.parent[k] = k
        return k

    def find(self, k: int) -> int:
        while self.parent[k] != k:
            self.parent[k] = self.parent[self.parent[k]]
            k = self.parent[k]
        return k

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def to_einsum(d: Diagram, structured: bool = True, cap=None):
    """Translate a diagram into (IndexSpec, operands).

    With ``structured`` the Kronecker nodes are not materialized: all of
    their wires share one summation label.
    """
    labels = _Labels()
    port_label: dict[Port, int] = {}
    for p, q in d.wires:
        port_label[p] = port_label[q] = labels.new()
    for p in d.free:
        port_label[p] = labels.new()
    inputs, operands = [], []
    for node_id, kind in d.nodes.items():
        ports = d.ports(node_id)
        if structured and isinstance(kind, Delta):
            first = port_label[ports[0]]
            for p in ports[1:]:
                labels.union(first, port_label[p])
    extent = {}
    for p, lab in port_label.items():
        extent[labels.find(lab)] = d.extent(p)
    touched = set()
    for node_id, kind in d.nodes.items():
        if structured and isinstance(kind, Delta):
            continue
        ls = [labels.find(port_label[p]) for p in d.ports(node_id)]
        touched.update(ls)
        inputs.append(ls)
        operands.append(kind.dense(cap))
    if structured:
        roots = sorted({labels.find(port_label[p]) for node_id, kind in d.nodes.items()
                        if isinstance(kind, Delta) for p in d.ports(node_id)})
        for root in roots:
            if root not in touched:
                inputs.append([root])
                operands.append(np.ones(extent[root]))
    output = [labels.find(port_label[p]) for p in d.free]
    return IndexSpec.from_lists(inputs, output), operands


def evaluate(d: Diagram, budget: int | None = DEFAULT_BUDGET, cap=None, structured: bool = True) -> np.ndarray:
    """Contract the whole diagram; output axes follow ``d.free``, times ``d.scale``."""
    spec, operands = to_einsum(d, structured=structured, cap=cap)
    if not operands:
        return as_tensor(np.asarray(d.scale))
    out = einsum_eval(spec, operands, budget=budget)
    if d.scale != 1:
        out = out * d.scale
    return out


# ---------------------------------------------------------------------------
# export


def _node_label(kind: NodeKind) -> str:
    if isinstance(kind, Dense):
        return kind.name
    if isinstance(kind, Delta):
        return f"δ{kind.rank},{kind.dim}"
    if isinstance(kind, Gamma):
        return "γ[" + ",".join(map(str, kind.dims)) + "]"
    if isinstance(kind, Chi):
        return f"χ{kind.signature},{kind.dim}"
    return ("F⁻¹" if kind.inverse else "F") + str(kind.dim)


def _plain_wires(d: Diagram) -> set[int]:
    """Rank-2 deltas drawn as bare edges: not self-wired, no rank-2 delta neighbour."""
    def is_wire(node_id):
        k = d.nodes[node_id]
        return isinstance(k, Delta) and k.rank == 2

    out = set()
    for node_id in d.nodes:
        if not is_wire(node_id):
            continue
        partners = [d.partner.get(p) for p in d.ports(node_id)]
        if any(q is not None and (q[0] == node_id or is_wire(q[0])) for q in partners):
            continue
        out.add(node_id)
    return out


def to_dot(d: Diagram) -> str:
    """GraphViz text for a diagram; identical diagrams give identical bytes.

    Identity (rank-2 Kronecker) nodes are drawn as plain edges where possible.
    """
    plain = _plain_wires(d)

    def end(port):
        if port in d.free_slot:
            return f"out{d.free_slot[port]}", None
        return f"n{port[0]}", port[1]

    def edge(p, q):
        (a, i), (b, j) = end(p), end(q)
        labels = [f'taillabel="{i}"'] if i is not None else []
        if j is not None:
            labels.append(f'headlabel="{j}"')
        return f"  {a} -- {b}" + (f" [{', '.join(labels)}]" if labels else "") + ";"

    lines = ["graph diagram {"]
    if d.scale != 1:
        lines.append(f'  label="scale={d.scale!r}";')
    for node_id, kind in d.nodes.items():
        if node_id not in plain:
            lines.append(f'  n{node_id} [label="{_node_label(kind)}"];')
    for k, _ in enumerate(d.free):
        lines.append(f'  out{k} [shape=plaintext, label="{k}"];')
    for node_id in sorted(plain):
        p, q = ((d.partner.get(port) or port) for port in d.ports(node_id))
        lines.append(edge(p, q))
    for p, q in d.wires:
        if p[0] not in plain and q[0] not in plain:
            lines.append(edge(p, q))
    for k, (a, i) in enumerate(d.free):
        if a not in plain:
            lines.append(f'  n{a} -- out{k} [taillabel="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _scale_to_json(scale):
    scale = complex(scale)
    return scale.real if scale.imag == 0 else [scale.real, scale.imag]


def node_to_json(node_id: int, kind: NodeKind) -> dict:
    if isinstance(kind, Dense):
        return {"id": node_id, "kind": "dense", "name": kind.name, "tensor": tensor_to_record(kind.tensor)}
    if isinstance(kind, Delta):
        return {"id": node_id, "kind": "delta", "rank": kind.rank, "dim": kind.dim}
    if isinstance(kind, Gamma):
        return {"id": node_id, "kind": "gamma", "dims": list(kind.dims)}
    if isinstance(kind, Chi):
        return {"id": node_id, "kind": "chi", "signature": str(kind.signature), "dim": kind.dim}
    return {"id": node_id, "kind": "fourier", "dim": kind.dim,
            "direction": "inverse" if kind.inverse else "forward"}


def to_json(d: Diagram) -> dict:
    return {
        "nodes": [node_to_json(i, k) for i, k in d.nodes.items()],
        "wires": [[list(p), list(q)] for p, q in d.wires],
        "free": [list(p) for p in d.free],
        "scale": _scale_to_json(d.scale),
    }


def node_from_json(obj: dict, base_dir: Path | None = None) -> NodeKind:
    kind = obj.get("kind")
    try:
        if kind == "dense":
            if "tensor" in obj:
                tensor = tensor_from_record(obj["tensor"])
            elif "tensor_ref" in obj:
                path = Path(obj["tensor_ref"])
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                tensor = load_tensor(path)
            else:
                raise DiagramError("dense node needs 'tensor' or 'tensor_ref'")
            return Dense(tensor, obj.get("name", "T"))
        if kind == "delta":
            return Delta(int(obj["rank"]), int(obj["dim"]))
        if kind == "gamma":
            return Gamma(tuple(int(x) for x in obj["dims"]))
        if kind == "chi":
            return Chi(Signature.parse(obj["signature"]), int(obj["dim"]))
        if kind == "fourier":
            direction = obj.get("direction", "forward")
            if direction not in ("forward", "inverse"):
                raise DiagramError(f"unknown Fourier direction {direction!r}")
            return Fourier(int(obj["dim"]), direction == "inverse")
    except (KeyError, TypeError) as exc:
        raise DiagramError(f"malformed {kind} node: {exc!r}") from None
    raise DiagramError(f"unknown node kind {kind!r}")


def from_json(obj: dict, base_dir: Path | None = None) -> Diagram:
    if not isinstance(obj, dict):
        raise DiagramError("diagram JSON must be an object")
    try:
        nodes = {int(n["id"]): node_from_json(n, base_dir) for n in obj["nodes"]}
        wires = [(tuple(p), tuple(q)) for p, q in obj.get("wires", [])]
        free = [tuple(p) for p in obj.get("free", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise DiagramError(f"malformed diagram JSON: {exc!r}") from None
    scale = obj.get("scale", 1.0)
    if isinstance(scale, list):
        scale = complex(scale[0], scale[1])
    # a fully contracted diagram simplifies to a bare scale, so files may be empty
    return make_diagram(nodes, wires, free, scale, allow_empty=True)


def load_diagram(path) -> Diagram:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DiagramError(f"invalid JSON in {path}: {exc}") from None
    return from_json(obj, base_dir=path.parent)
