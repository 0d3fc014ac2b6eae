"""Random diagram and program generators for the soundness and round-trip runs."""
from __future__ import annotations

import random
from math import prod

import numpy as np

from graphcalc.cli.program import EinsumProgram, parse_builtin
from graphcalc.contraction import IndexSpec
from graphcalc.diagram import Chi, Delta, Dense, Fourier, Gamma, build
from graphcalc.errors import GraphCalcError

SIGNS = ["+++", "++-", "+-+", "+--", "-++", "-+-", "--+", "---"]


def _gamma_dims(rng: random.Random, max_extent: int) -> tuple[int, ...]:
    while True:
        dims = tuple(rng.choice([1, 2, 2, 3, 4]) for _ in range(rng.randint(1, 3)))
        if prod(dims) <= max_extent:
            return dims


def _dense(rng: random.Random, max_extent: int) -> Dense:
    shape = tuple(rng.choice([1, 2, 2, 4][: max_extent]) for _ in range(rng.randint(1, 3)))
    data = np.array([complex(rng.random(), rng.random()) for _ in range(prod(shape))])
    return Dense(data.reshape(shape), "T")


def _chi_block(rng: random.Random, max_extent: int):
    D = rng.randint(2, max_extent)
    sig = rng.choice(SIGNS)
    flip = rng.random() < 0.5
    nodes = [Chi(sig, D)] + [Fourier(D, (s == "-") != flip) for s in sig]
    return nodes, [((0, t), (t + 1, 1)) for t in range(3)]


def _swap_block(rng: random.Random, max_extent: int, room: int):
    # a delta on the flat ports of identical gammas: the swap rule's pattern
    while True:
        dims = _gamma_dims(rng, max_extent)
        if len(dims) >= 2:
            break
    N = rng.randint(2, min(3, room - 1))
    leftover = rng.randint(0, 1)
    nodes = [Delta(N + leftover, prod(dims))] + [Gamma(dims) for _ in range(N)]
    return nodes, [((0, k), (k + 1, len(dims))) for k in range(N)]


def random_diagram(rng: random.Random, max_nodes: int = 6, max_extent: int = 4, max_free: int = 6):
    """A valid diagram mixing every node kind, biased toward rule matches."""
    while True:
        n = rng.randint(1, max_nodes)
        nodes, wires = [], []
        while len(nodes) < n:
            r = rng.random()
            if r < 0.2 and len(nodes) + 3 <= n:
                if r < 0.1 and len(nodes) + 4 <= n:
                    block, links = _chi_block(rng, max_extent)
                else:
                    block, links = _swap_block(rng, max_extent, n - len(nodes))
                base = len(nodes)
                nodes += block
                wires += [((base + a[0], a[1]), (base + b[0], b[1])) for a, b in links]
            elif r < 0.5:
                nodes.append(Delta(rng.randint(1, 4), rng.choice([1, 2, 2, 4][: max_extent])))
            elif r < 0.72:
                nodes.append(Gamma(_gamma_dims(rng, max_extent)))
            elif r < 0.8:
                nodes.append(Fourier(rng.randint(1, max_extent), rng.random() < 0.5))
            elif r < 0.85:
                nodes.append(Chi(rng.choice(SIGNS), rng.randint(1, max_extent)))
            else:
                nodes.append(_dense(rng, max_extent))
        used = {p for w in wires for p in w}
        open_ports = [(i, k) for i, kind in enumerate(nodes)
                      for k in range(len(kind.extents)) if (i, k) not in used]
        rng.shuffle(open_ports)
        extent = lambda p: nodes[p[0]].extents[p[1]]  # noqa: E731
        free = []
        while open_ports:
            p = open_ports.pop()
            partners = [q for q in open_ports if extent(q) == extent(p)]
            if partners and rng.random() < 0.8:
                q = rng.choice(partners)
                open_ports.remove(q)
                wires.append((p, q))
            else:
                free.append(p)
        if len(free) > max_free:
            continue
        rng.shuffle(free)
        try:
            return build(nodes, wires, free)
        except GraphCalcError:
            continue


def _builtin_for(rng: random.Random, rank: int):
    options = [f"delta[{rank},{rng.randint(1, 5)}]"]
    if rank >= 2:
        dims = ",".join(str(rng.randint(1, 4)) for _ in range(rank - 1))
        options.append(f"gamma[{dims}]")
    if rank == 3:
        options.append(f"chi[{rng.choice(SIGNS)},{rng.randint(1, 6)}]")
    if rank == 2:
        options.append(f"fourier[{rng.randint(1, 6)},{rng.choice(['forward', 'inverse'])}]")
    return parse_builtin(rng.choice(options))


def random_program(rng: random.Random) -> EinsumProgram:
    """A program drawn from the grammar: subscripts plus optional bindings."""
    alphabet = "abcdefijkXY"
    inputs = []
    for _ in range(rng.randint(1, 4)):
        inputs.append(tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 4))))
    labels = sorted({l for ls in inputs for l in ls})
    if labels and rng.random() < 0.7:
        output = tuple(rng.choice(labels) for _ in range(rng.randint(0, 3)))
        spec = IndexSpec.from_lists(inputs, output)
    else:
        spec = IndexSpec.from_lists(inputs)
    bindings = []
    for pos, ls in enumerate(inputs, start=1):
        if ls and rng.random() < 0.3:
            bindings.append((pos, _builtin_for(rng, len(ls))))
    rng.shuffle(bindings)
    return EinsumProgram(spec, tuple(bindings))
