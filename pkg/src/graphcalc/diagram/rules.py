"""Rewrite rules on tensor diagrams.

Every rule comes in two forms. ``rewrite_*(d)`` applies the rule at the
lowest-id match and returns ``(diagram, applied)``; when nothing matches the
input diagram comes back with ``applied=False``. The ``*_at`` functions fire
at a named node and raise :class:`NoMatch` when the pattern is absent.

All rules preserve the free-port list. Only the chi/Fourier rule changes
the scale (by ``sqrt(D)``); closed loops left behind by a rewrite fold
their extent into the scale.
"""
from __future__ import annotations

from math import prod, sqrt
from typing import Iterable, Sequence

from ..errors import DimsListMismatch, DiagramError, NoMatch
from .graph import Chi, Delta, Diagram, Fourier, Gamma, NodeKind, Port, make_diagram

# An end of a splice link: ("old", port) is a port of a removed node,
# ("new", (local_index, port_index)) a port of a node being added.
End = tuple


def splice(
    d: Diagram,
    remove: Iterable[int],
    add: Sequence[NodeKind] = (),
    links: Iterable[tuple[End, End]] = (),
    factor: complex = 1.0,
) -> Diagram:
    """Replace nodes by new ones, joining ends pairwise with identity wires.

    Wires between two removed ports that no link mentions are consumed by
    the replacement. Closed loops of linked wires contribute their extent
    to the scale.
    """
    remove = set(remove)
    next_id = max(d.nodes, default=-1) + 1
    new_ids = [next_id + k for k in range(len(add))]

    def resolve(end):
        kind, ref = end
        if kind == "old":
            return ("old", ref)
        local, idx = ref
        return ("new", (new_ids[local], idx))

    link = {}
    for a, b in links:
        a, b = resolve(a), resolve(b)
        if a in link or b in link:
            raise DiagramError(f"splice end used twice: {a} / {b}")
        link[a] = b
        link[b] = a

    def outside(port):
        """Where an old port leads outside the removed region."""
        q = d.partner.get(port)
        if q is None:
            return ("free", d.free_slot[port])
        if q[0] in remove:
            return ("old", q)
        return ("ext", q)

    # terminals: external ports touching the region, free slots it owns, new ports
    terminals = []
    for node_id in sorted(remove):
        for p in d.ports(node_id):
            o = outside(p)
            if o[0] == "free":
                terminals.append((o, ("old", p)))
            elif o[0] == "ext":
                terminals.append((o, ("old", p)))
    for nid, kind in zip(new_ids, add):
        for k in range(len(kind.extents)):
            terminals.append((("new", (nid, k)), None))

    visited = set()
    pairs = []
    done = set()
    for term, entry in terminals:
        if term in done:
            continue
        # step from the terminal into the region
        if entry is None:
            cur = link.get(term)
            if cur is None:
                raise DiagramError(f"new port {term} was not linked")
        else:
            if entry not in link:
                raise DiagramError(f"boundary port {entry[1]} was not linked")
            visited.add(entry)
            cur = link[entry]
        while True:
            if cur[0] == "new":
                end = cur
                break
            visited.add(cur)
            o = outside(cur[1])
            if o[0] in ("free", "ext"):
                end = o
                break
            nxt = ("old", o[1])
            visited.add(nxt)
            if nxt not in link:
                raise DiagramError(f"path through {nxt[1]} was not linked")
            cur = link[nxt]
        done.add(term)
        done.add(end)
        pairs.append((term, end))

    # linked old ports never reached from a terminal sit on closed loops
    loop_ports = [e for e in link if e[0] == "old" and e not in visited]
    scale = d.scale * factor
    seen_loop = set()
    for start in loop_ports:
        if start in seen_loop:
            continue
        cur = start
        while cur not in seen_loop:
            seen_loop.add(cur)
            other = link[cur]
            seen_loop.add(other)
            o = outside(other[1])
            cur = ("old", o[1])
        scale *= d.extent(start[1])

    nodes = {i: k for i, k in d.nodes.items() if i not in remove}
    nodes.update(zip(new_ids, add))
    wires = [(p, q) for p, q in d.wires if p[0] not in remove and q[0] not in remove]
    free = list(d.free)

    def port_of(t):
        return t[1]

    for a, b in pairs:
        if a[0] == "free" and b[0] == "free":
            nid = max(nodes, default=-1) + 1
            nodes[nid] = Delta(2, d.extent(d.free[a[1]]))
            free[a[1]] = (nid, 0)
            free[b[1]] = (nid, 1)
        elif a[0] == "free":
            free[a[1]] = port_of(b)
        elif b[0] == "free":
            free[b[1]] = port_of(a)
        else:
            wires.append((port_of(a), port_of(b)))
    return make_diagram(nodes, wires, free, scale)


def _old(port: Port) -> End:
    return ("old", port)


def _new(local: int, idx: int) -> End:
    return ("new", (local, idx))


def _first(d: Diagram, matches, apply):
    for match in matches(d):
        return apply(d, match), True
    return d, False


def _ids(d: Diagram, cls) -> list[int]:
    return [i for i, k in d.nodes.items() if isinstance(k, cls)]


# ---------------------------------------------------------------------------
# Kronecker-tensor fusion


def _self_wire(d: Diagram, node_id: int):
    for p in d.ports(node_id):
        q = d.partner.get(p)
        if q is not None and q[0] == node_id:
            return p, q
    return None


def _fuse_delta_self(d: Diagram, a: int) -> Diagram:
    kind = d.nodes[a]
    p, q = _self_wire(d, a)
    rest = [x for x in d.ports(a) if x not in (p, q)]
    if not rest:
        return splice(d, [a], factor=kind.dim)
    new = Delta(len(rest), kind.dim)
    return splice(d, [a], [new], [(_old(x), _new(0, k)) for k, x in enumerate(rest)])


def _fuse_delta_pair(d: Diagram, a: int, b: int) -> Diagram:
    dim = d.nodes[a].dim
    rest = [x for x in d.ports(a) if d.partner.get(x, (None,))[0] != b]
    rest += [x for x in d.ports(b) if d.partner.get(x, (None,))[0] != a]
    if not rest:
        return splice(d, [a, b], factor=dim)
    new = Delta(len(rest), dim)
    return splice(d, [a, b], [new], [(_old(x), _new(0, k)) for k, x in enumerate(rest)])


def _elidable_identity(d: Diagram, a: int) -> bool:
    kind = d.nodes[a]
    if kind.rank != 2 or _self_wire(d, a):
        return False
    return any(p in d.partner for p in d.ports(a))


def _delta_matches(d: Diagram):
    deltas = _ids(d, Delta)
    for a in deltas:
        if _self_wire(d, a):
            yield ("self", a)
        if _elidable_identity(d, a):
            yield ("identity", a)
        for b in d.neighbours(a):
            if b > a and isinstance(d.nodes[b], Delta):
                yield ("pair", a, b)


def _apply_delta(d: Diagram, match) -> Diagram:
    if match[0] == "self":
        return _fuse_delta_self(d, match[1])
    if match[0] == "identity":
        p, q = d.ports(match[1])
        return splice(d, [match[1]], links=[(_old(p), _old(q))])
    return _fuse_delta_pair(d, match[1], match[2])


def rewrite_fuse_delta(d: Diagram):
    """Fuse Kronecker tensors joined by wires into one; drop identity wires.

    A rank-2 Kronecker tensor is an identity wire and is spliced out unless
    both of its ports are free. A tensor wired to itself loses the loop.
    """
    return _first(d, _delta_matches, _apply_delta)


def fuse_delta_at(d: Diagram, a: int, b: int | None = None) -> Diagram:
    if b is None:
        if a in d.nodes and isinstance(d.nodes[a], Delta):
            if _self_wire(d, a):
                return _fuse_delta_self(d, a)
            if _elidable_identity(d, a):
                return _apply_delta(d, ("identity", a))
        raise NoMatch(f"node {a} is not a self-wired or elidable Kronecker tensor")
    a, b = sorted((a, b))
    if not (isinstance(d.nodes.get(a), Delta) and isinstance(d.nodes.get(b), Delta)):
        raise NoMatch(f"nodes {a} and {b} are not both Kronecker tensors")
    if b not in d.neighbours(a):
        raise NoMatch(f"Kronecker tensors {a} and {b} share no wire")
    return _fuse_delta_pair(d, a, b)


# ---------------------------------------------------------------------------
# vectorization-tensor fusion


def _gamma_pair_kind(d: Diagram, a: int, b: int) -> str | None:
    ga, gb = d.nodes[a], d.nodes[b]
    n = len(ga.dims)
    if d.partner.get((a, n)) == (b, len(gb.dims)):
        return "flat"
    if len(ga.dims) == len(gb.dims) and all(
        d.partner.get((a, t)) == (b, t) for t in range(n)
    ):
        return "inputs"
    return None


def _fuse_gamma_pair(d: Diagram, a: int, b: int, how: str) -> Diagram:
    n = len(d.nodes[a].dims)
    if how == "flat":
        links = [(_old((a, t)), _old((b, t))) for t in range(n)]
    else:
        links = [(_old((a, n)), _old((b, n)))]
    return splice(d, [a, b], links=links)


def _gamma_matches(d: Diagram):
    gammas = _ids(d, Gamma)
    for a in gammas:
        g = d.nodes[a]
        if len(g.dims) == 1 and any(p in d.partner for p in d.ports(a)):
            yield ("single", a)
        for b in d.neighbours(a):
            if b > a and isinstance(d.nodes[b], Gamma) and d.nodes[b].dims == g.dims:
                how = _gamma_pair_kind(d, a, b)
                if how is not None:
                    yield (how, a, b)


def _apply_gamma(d: Diagram, match) -> Diagram:
    if match[0] == "single":
        a = match[1]
        return splice(d, [a], links=[(_old((a, 0)), _old((a, 1)))])
    return _fuse_gamma_pair(d, match[1], match[2], match[0])


def rewrite_fuse_gamma(d: Diagram):
    """Cancel two vectorization tensors with identical input dims.

    Joined on the flat port they become one identity wire per input;
    joined on all inputs (position by position) they become one flat
    identity wire. A single-input vectorization tensor is an identity.
    """
    return _first(d, _gamma_matches, _apply_gamma)


def fuse_gamma_at(d: Diagram, a: int, b: int) -> Diagram:
    a, b = sorted((a, b))
    ga, gb = d.nodes.get(a), d.nodes.get(b)
    if not (isinstance(ga, Gamma) and isinstance(gb, Gamma)):
        raise NoMatch(f"nodes {a} and {b} are not both vectorization tensors")
    if b not in d.neighbours(a):
        raise NoMatch(f"vectorization tensors {a} and {b} share no wire")
    if ga.dims != gb.dims:
        raise DimsListMismatch(f"input dims {list(ga.dims)} and {list(gb.dims)} differ")
    how = _gamma_pair_kind(d, a, b)
    if how is None:
        raise NoMatch(f"vectorization tensors {a} and {b} are not wired flat-to-flat "
                      "or input-to-input in order")
    return _fuse_gamma_pair(d, a, b, how)


# ---------------------------------------------------------------------------
# Kronecker/vectorization swap


def _swap_groups(d: Diagram, a: int):
    """Vectorization tensors hanging off Kronecker tensor ``a`` by their flat port."""
    delta = d.nodes[a]
    attached = []
    for p in d.ports(a):
        q = d.partner.get(p)
        if q is None or q[0] == a:
            continue
        kind = d.nodes[q[0]]
        if isinstance(kind, Gamma) and q[1] == len(kind.dims) and prod(kind.dims) == delta.dim:
            attached.append((q[0], p))
    if not attached:
        return None
    dims = d.nodes[min(g for g, _ in attached)].dims
    group = sorted((g, p) for g, p in attached if d.nodes[g].dims == dims)
    group_ports = {p for _, p in group}
    leftover = [p for p in d.ports(a) if p not in group_ports]
    return dims, [g for g, _ in group], leftover


def _swap_matches(d: Diagram):
    for a in _ids(d, Delta):
        found = _swap_groups(d, a)
        if found is not None:
            yield (a,) + found


def _apply_swap(d: Diagram, match) -> Diagram:
    return _swap(d, *match)


def _swap(d: Diagram, a: int, dims, gammas, leftover) -> Diagram:
    L = len(leftover)
    add: list[NodeKind] = [Gamma(dims) for _ in range(L)]
    links = []
    for ell, p in enumerate(leftover):
        links.append((_new(ell, len(dims)), _old(p)))
    for t, extent in enumerate(dims):
        ends = [_old((g, t)) for g in gammas] + [_new(ell, t) for ell in range(L)]
        if len(ends) == 2:
            links.append((ends[0], ends[1]))
            continue
        add.append(Delta(len(ends), extent))
        local = len(add) - 1
        links += [(e, _new(local, k)) for k, e in enumerate(ends)]
    return splice(d, [a] + gammas, add, links)


def rewrite_swap_delta_gamma(d: Diagram, shrinking_only: bool = True):
    """Push a Kronecker tensor through the identical vectorization tensors on it.

    ``N`` copies of ``gamma(dims)`` on a Kronecker tensor of extent
    ``prod(dims)`` become one Kronecker tensor per input wire feeding a
    vectorization tensor for each remaining port. With ``shrinking_only``
    the rule fires only when the node count drops.
    """
    for match in _swap_matches(d):
        out = _apply_swap(d, match)
        if not shrinking_only or out.node_count < d.node_count:
            return out, True
    return d, False


def swap_delta_gamma_at(d: Diagram, a: int) -> Diagram:
    if not isinstance(d.nodes.get(a), Delta):
        raise NoMatch(f"node {a} is not a Kronecker tensor")
    found = _swap_groups(d, a)
    if found is None:
        raise NoMatch(f"no vectorization tensor of extent {d.nodes[a].dim} is attached "
                      f"to node {a} by its flat port")
    return _swap(d, a, *found)


def unswap_delta_gamma_at(d: Diagram, g: int) -> Diagram:
    """Inverse swap: a vectorization tensor fed by per-wire Kronecker tensors.

    Every input of ``g`` must come from a distinct Kronecker tensor, all of
    the same rank ``K + 1``; the result is ``K`` copies of ``g``'s
    vectorization tensor joined by one Kronecker tensor of the flat extent.
    """
    kind = d.nodes.get(g)
    if not isinstance(kind, Gamma):
        raise NoMatch(f"node {g} is not a vectorization tensor")
    deltas = []
    for t in range(len(kind.dims)):
        q = d.partner.get((g, t))
        if q is None or not isinstance(d.nodes[q[0]], Delta) or q[0] in [x for x, _ in deltas]:
            raise NoMatch(f"input {t} of node {g} is not fed by its own Kronecker tensor")
        deltas.append((q[0], q))
    ranks = {d.nodes[x].rank for x, _ in deltas}
    if len(ranks) != 1:
        raise NoMatch("feeding Kronecker tensors have different ranks")
    K = ranks.pop() - 1
    n = len(kind.dims)
    others = [[p for p in d.ports(x) if p != q] for x, q in deltas]
    add: list[NodeKind] = [Gamma(kind.dims) for _ in range(K)]
    links = []
    for k in range(K):
        for t in range(n):
            links.append((_new(k, t), _old(others[t][k])))
    flat_ends = [_new(k, n) for k in range(K)] + [_old((g, n))]
    if len(flat_ends) == 2:
        links.append((flat_ends[0], flat_ends[1]))
    else:
        add.append(Delta(len(flat_ends), prod(kind.dims)))
        links += [(e, _new(len(add) - 1, k)) for k, e in enumerate(flat_ends)]
    return splice(d, [g] + [x for x, _ in deltas], add, links)


# ---------------------------------------------------------------------------
# convolution tensor conjugated by Fourier matrices


def _chi_match(d: Diagram, c: int):
    chi = d.nodes[c]
    fouriers = []
    for t in range(3):
        q = d.partner.get((c, t))
        if q is None or not isinstance(d.nodes[q[0]], Fourier):
            return None, "every port of the convolution tensor must meet a Fourier matrix"
        if q[0] in [f for f, _ in fouriers]:
            return None, "the three Fourier matrices must be distinct"
        if d.nodes[q[0]].dim != chi.dim:
            return None, "Fourier dimension differs"
        fouriers.append(q)
    inverse = tuple(d.nodes[f].inverse for f, _ in fouriers)
    want = tuple(s < 0 for s in chi.signature)
    if inverse != want and inverse != tuple(not w for w in want):
        return None, (f"Fourier directions {inverse} do not follow signature {chi.signature}")
    return fouriers, None


def _chi_fourier(d: Diagram, c: int, fouriers) -> Diagram:
    dim = d.nodes[c].dim
    links = []
    for t, (f, idx) in enumerate(fouriers):
        links.append((_old((f, 1 - idx)), _new(0, t)))
    return splice(d, [c] + [f for f, _ in fouriers], [Delta(3, dim)], links, factor=sqrt(dim))


def _chi_matches(d: Diagram):
    for c in _ids(d, Chi):
        fouriers, _ = _chi_match(d, c)
        if fouriers is not None:
            yield (c, fouriers)


def _apply_chi(d: Diagram, match) -> Diagram:
    return _chi_fourier(d, *match)


def rewrite_chi_fourier(d: Diagram):
    """Replace a convolution tensor wrapped in matching Fourier matrices by sqrt(D) * delta."""
    return _first(d, _chi_matches, _apply_chi)


def chi_fourier_at(d: Diagram, c: int) -> Diagram:
    if not isinstance(d.nodes.get(c), Chi):
        raise NoMatch(f"node {c} is not a convolution tensor")
    fouriers, why = _chi_match(d, c)
    if fouriers is None:
        raise NoMatch(why)
    return _chi_fourier(d, c, fouriers)


# (name, match generator, apply) in the fixed order simplify tries them
RULES = (
    ("fuse_delta", _delta_matches, _apply_delta),
    ("fuse_gamma", _gamma_matches, _apply_gamma),
    ("swap_delta_gamma", _swap_matches, _apply_swap),
    ("chi_fourier", _chi_matches, _apply_chi),
)
