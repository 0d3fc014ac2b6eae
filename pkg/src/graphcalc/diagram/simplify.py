"""Fixpoint driver for the diagram rewrite rules."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .graph import Diagram
from .rules import RULES


@dataclass(frozen=True)
class Step:
    rule: str
    before: tuple[int, int]
    after: tuple[int, int]


def measure(d: Diagram) -> tuple[int, int]:
    return d.node_count, d.wire_count


def _accept(rule: str, before: Diagram, after: Diagram) -> bool:
    # the swap rule may grow a diagram; only its shrinking direction is used
    if rule == "swap_delta_gamma":
        return after.node_count < before.node_count
    return measure(after) < measure(before)


def simplify_steps(d: Diagram) -> Iterator[tuple[Step, Diagram]]:
    """Yield each rewrite applied by :func:`simplify` with the diagram it produced.

    Rules are tried in the fixed order of ``RULES`` and, within a rule, at
    the lowest node id first. A candidate is accepted only if it strictly
    lowers ``(node count, wire count)``, so the loop always terminates.
    """
    while True:
        for name, matches, apply in RULES:
            fired = None
            for match in matches(d):
                out = apply(d, match)
                if _accept(name, d, out):
                    fired = out
                    break
            if fired is not None:
                yield Step(name, measure(d), measure(fired)), fired
                d = fired
                break
        else:
            return


def simplify(d: Diagram, trace: list | None = None) -> Diagram:
    """Rewrite until no rule applies; appends each :class:`Step` to ``trace``."""
    for step, d in simplify_steps(d):
        if trace is not None:
            trace.append(step)
    return d
