"""Build diagrams for matrix expressions.

An expression is a tuple of open ports: ``(row, col)`` for a matrix,
``(v,)`` for a vector and ``()`` for a scalar. Rank-4 block matrices (the
Tracy-Singh operands) are ``(outer_row, outer_col, inner_row, inner_col)``.
Combinators add mediator nodes to a :class:`Net` and return the new open
ports; :meth:`Net.build` turns the finished net into a :class:`Diagram`.
"""
from __future__ import annotations

import numpy as np

from ..errors import ExtentMismatch, RankMismatch
from ..products import LAYOUTS
from .graph import Delta, Dense, Diagram, Gamma, NodeKind, Port, build

Expr = tuple


class Net:
    def __init__(self):
        self.nodes: list[NodeKind] = []
        self.wires: list[tuple[Port, Port]] = []

    def add(self, kind: NodeKind) -> tuple[Port, ...]:
        node_id = len(self.nodes)
        self.nodes.append(kind)
        return tuple((node_id, k) for k in range(len(kind.extents)))

    def extent(self, port: Port) -> int:
        return self.nodes[port[0]].extents[port[1]]

    def join(self, p: Port, q: Port) -> None:
        if self.extent(p) != self.extent(q):
            raise ExtentMismatch(f"wire {p}-{q}", self.extent(p), self.extent(q), "join")
        self.wires.append((p, q))

    def build(self, expr: Expr, scale=1.0) -> Diagram:
        return build(self.nodes, self.wires, list(expr), scale)

    # leaves

    def dense(self, tensor, name: str = "T") -> Expr:
        return self.add(Dense(np.asarray(tensor), name))

    def identity(self, n: int) -> Expr:
        return self.add(Delta(2, n))

    def ones(self, n: int) -> Expr:
        return self.add(Delta(1, n))

    # combinators

    def dot(self, x: Expr, y: Expr) -> Expr:
        """Matrix product; ``y`` may be a vector."""
        self.join(x[1], y[0])
        return (x[0],) + y[1:]

    def _pair(self, p: Port, q: Port, layout: str) -> Port:
        # one gamma merging two wires; the first input varies fastest
        if layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")
        if layout == "textbook":
            p, q = q, p
        g = self.add(Gamma((self.extent(p), self.extent(q))))
        self.join(p, g[0])
        self.join(q, g[1])
        return g[2]

    def _share(self, p: Port, q: Port) -> Port:
        d = self.add(Delta(3, self.extent(p)))
        self.join(p, d[0])
        self.join(q, d[1])
        return d[2]

    def kron(self, x: Expr, y: Expr, layout: str = "gamma") -> Expr:
        return (self._pair(x[0], y[0], layout), self._pair(x[1], y[1], layout))

    def hadamard(self, x: Expr, y: Expr) -> Expr:
        if len(x) != len(y):
            raise RankMismatch("hadamard operands differ in rank")
        return tuple(self._share(p, q) for p, q in zip(x, y))

    def khatri_rao_col(self, x: Expr, y: Expr, layout: str = "gamma") -> Expr:
        return (self._pair(x[0], y[0], layout), self._share(x[1], y[1]))

    def khatri_rao_row(self, x: Expr, y: Expr, layout: str = "gamma") -> Expr:
        return (self._share(x[0], y[0]), self._pair(x[1], y[1], layout))

    def tracy_singh(self, x: Expr, y: Expr) -> Expr:
        (i, j, k, l), (p, q, r, s) = x, y
        rows = self.add(Gamma(tuple(self.extent(t) for t in (i, p, k, r))))
        cols = self.add(Gamma(tuple(self.extent(t) for t in (j, q, l, s))))
        for t, port in zip((i, p, k, r), rows):
            self.join(t, port)
        for t, port in zip((j, q, l, s), cols):
            self.join(t, port)
        return (rows[4], cols[4])

    def transpose(self, x: Expr) -> Expr:
        return x[::-1]

    def times(self, x: Expr, y: Expr) -> Expr:
        """Tensor product: the open ports of both, side by side."""
        return x + y

    def block(self, x: Expr, row_dims: tuple[int, int], col_dims: tuple[int, int]) -> Expr:
        """View a matrix as a rank-4 block matrix ``(outer_row, outer_col, inner_row, inner_col)``.

        Each flat index splits with the outer factor varying fastest.
        """
        ro, ri = self.split(x[0], row_dims)
        co, ci = self.split(x[1], col_dims)
        return (ro, co, ri, ci)

    def block_dot(self, x: Expr, y: Expr) -> Expr:
        """Matrix product of two rank-4 block matrices, blockwise."""
        self.join(x[1], y[0])
        self.join(x[3], y[2])
        return (x[0], y[1], x[2], y[3])

    def col(self, x: Expr) -> Expr:
        return (self._pair(x[0], x[1], "gamma"),)

    def row(self, x: Expr) -> Expr:
        return (self._pair(x[1], x[0], "gamma"),)

    def split(self, p: Port, dims: tuple[int, ...]) -> Expr:
        """Unflatten one port into ``len(dims)`` ports, first fastest."""
        g = self.add(Gamma(dims))
        self.join(p, g[-1])
        return g[:-1]

    def trace(self, x: Expr) -> Expr:
        self.join(x[0], x[1])
        return ()

    def diag(self, x: Expr) -> Expr:
        """Vector to diagonal matrix, or matrix to its diagonal vector."""
        if len(x) == 1:
            d = self.add(Delta(3, self.extent(x[0])))
            self.join(x[0], d[2])
            return (d[0], d[1])
        return (self._share(x[0], x[1]),)
