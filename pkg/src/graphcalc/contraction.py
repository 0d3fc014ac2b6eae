"""Einsum-style contraction: index specs, pairwise kernel, greedy planning.

Labels are arbitrary hashables. The string form uses single letters
(``"ij,jk->ik"``); the integer-list form uses ints. A label repeated inside
one operand takes a diagonal, a label repeated in the output embeds a
diagonal (``"i->ii"``), and every label absent from the output is summed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Hashable, Sequence

import numpy as np
from numpy.lib.stride_tricks import as_strided

from .errors import (
    BudgetExceeded,
    EmptyOperands,
    ExtentMismatch,
    ParseError,
    RankMismatch,
    UnknownOutputLabel,
)
from .tensor import as_tensor, result_dtype

Label = Hashable


@dataclass(frozen=True)
class IndexSpec:
    inputs: tuple[tuple[Label, ...], ...]
    output: tuple[Label, ...]

    @classmethod
    def parse(cls, text: str) -> "IndexSpec":
        return parse_subscripts(text)

    @classmethod
    def from_lists(cls, inputs: Sequence[Sequence[Label]], output=None) -> "IndexSpec":
        inputs = tuple(tuple(labels) for labels in inputs)
        if output is None:
            output = implicit_output(inputs)
        return cls(inputs, tuple(output))

    def __str__(self) -> str:
        return ",".join("".join(map(str, t)) for t in self.inputs) + "->" + "".join(
            map(str, self.output)
        )

    def extents(self, shapes: Sequence[Sequence[int]]) -> dict[Label, int]:
        """Map each label to its extent, checking ranks and shared extents."""
        if len(shapes) != len(self.inputs):
            raise RankMismatch(
                f"spec has {len(self.inputs)} operands but {len(shapes)} were given"
            )
        sizes: dict[Label, int] = {}
        for pos, (labels, shape) in enumerate(zip(self.inputs, shapes)):
            if len(labels) != len(shape):
                raise RankMismatch(
                    f"operand {pos} has rank {len(shape)} but {len(labels)} labels"
                )
            for label, extent in zip(labels, shape):
                seen = sizes.setdefault(label, int(extent))
                if seen != extent:
                    raise ExtentMismatch(label, seen, int(extent), f"operand {pos}")
        for label in self.output:
            if label not in sizes:
                raise UnknownOutputLabel(f"output label {label!r} appears in no operand")
        return sizes


def implicit_output(inputs: Sequence[Sequence[Label]]) -> tuple[Label, ...]:
    counts: dict[Label, int] = {}
    for labels in inputs:
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
    return tuple(sorted((l for l, c in counts.items() if c == 1), key=str))


def parse_subscripts(text: str) -> IndexSpec:
    """Parse classic einsum subscripts, e.g. ``"ij,jk->ik"`` or ``"iijk"``."""
    body = text.replace(" ", "")
    lhs, arrow, rhs = body.partition("->")
    for pos, ch in enumerate(lhs):
        if not (ch.isalpha() or ch == ","):
            raise ParseError(f"unexpected {ch!r}", pos)
    for pos, ch in enumerate(rhs, start=len(lhs) + 2):
        if not ch.isalpha():
            raise ParseError(f"unexpected {ch!r}", pos)
    if not lhs and not arrow:
        raise ParseError("no operands", 0)
    inputs = tuple(tuple(part) for part in lhs.split(","))
    output = tuple(rhs) if arrow else implicit_output(inputs)
    return IndexSpec(inputs, output)


def _as_spec(spec) -> IndexSpec:
    return spec if isinstance(spec, IndexSpec) else parse_subscripts(spec)


# ---------------------------------------------------------------------------
# single-operand bookkeeping


def take_diagonals(arr: np.ndarray, labels: Sequence[Label]):
    """Collapse repeated labels of one operand onto their diagonal."""
    labels = list(labels)
    while len(set(labels)) != len(labels):
        for p, label in enumerate(labels):
            q = labels.index(label, p + 1) if labels.count(label) > 1 else -1
            if q >= 0:
                arr = np.diagonal(arr, axis1=p, axis2=q)
                labels = [l for k, l in enumerate(labels) if k not in (p, q)] + [label]
                break
    return arr, labels


def sum_out(arr: np.ndarray, labels: Sequence[Label], keep) -> tuple[np.ndarray, list]:
    drop = tuple(k for k, l in enumerate(labels) if l not in keep)
    if drop:
        arr = arr.sum(axis=drop)
    return arr, [l for l in labels if l in keep]


def embed_output(arr: np.ndarray, labels: Sequence[Label], output: Sequence[Label]) -> np.ndarray:
    """Arrange a unique-labelled array in output order, embedding diagonals.

    ``labels`` and ``set(output)`` must coincide.
    """
    labels = list(labels)
    unique = list(dict.fromkeys(output))
    arr = arr.transpose([labels.index(l) for l in unique])
    if len(unique) == len(output):
        return np.asarray(arr, order="C")
    extent = dict(zip(unique, arr.shape))
    out = np.zeros([extent[l] for l in output], dtype=arr.dtype)
    strides = [sum(out.strides[k] for k, l in enumerate(output) if l == u) for u in unique]
    view = as_strided(out, shape=arr.shape, strides=strides, writeable=True)
    view[...] = arr
    return out


# ---------------------------------------------------------------------------
# pairwise kernel


def _pair_kernel(a, la, b, lb, keep):
    """Contract two unique-labelled arrays; labels outside ``keep`` are summed.

    Returns the result and its label list (batch, a-only, b-only).
    """
    a, la = sum_out(a, la, set(keep) | set(lb))
    b, lb = sum_out(b, lb, set(keep) | set(la))
    batch = [l for l in la if l in lb and l in keep]
    summed = [l for l in la if l in lb and l not in keep]
    a_only = [l for l in la if l not in lb]
    b_only = [l for l in lb if l not in la]
    ext = dict(zip(la, a.shape))
    ext.update(zip(lb, b.shape))

    def size(ls):
        return prod(ext[l] for l in ls)

    at = a.transpose([la.index(l) for l in batch + a_only + summed])
    bt = b.transpose([lb.index(l) for l in batch + summed + b_only])
    at = at.reshape(size(batch), size(a_only), size(summed))
    bt = bt.reshape(size(batch), size(summed), size(b_only))
    out = np.matmul(at, bt)
    labels = batch + a_only + b_only
    return out.reshape([ext[l] for l in labels]), labels


def contract_pair(a, a_labels, b, b_labels, out_labels) -> np.ndarray:
    """Contract two tensors, summing every label not listed in ``out_labels``."""
    spec = IndexSpec((tuple(a_labels), tuple(b_labels)), tuple(out_labels))
    a = as_tensor(a)
    b = as_tensor(b)
    spec.extents([a.shape, b.shape])
    return _finish(*_contract_all(spec, [a, b], budget=None))


# ---------------------------------------------------------------------------
# planning


@dataclass(frozen=True)
class PlanStep:
    positions: tuple[int, int]
    result_labels: tuple[Label, ...]
    cost: int


@dataclass
class ContractionPlan:
    """Greedy pairwise order over preprocessed (unique-label) operands."""

    steps: list[PlanStep] = field(default_factory=list)
    preprocess_cost: int = 0

    @property
    def cost(self) -> int:
        return self.preprocess_cost + sum(s.cost for s in self.steps)


def _needed(labels_list, output, skip):
    need = set(output)
    for k, ls in enumerate(labels_list):
        if k not in skip:
            need.update(ls)
    return need


def greedy_plan(labels_list: Sequence[Sequence[Label]], output, sizes) -> ContractionPlan:
    """Repeatedly contract the pair whose result has the fewest entries.

    Ties go to the lowest (i, j) position pair; the result is appended last.
    """
    current = [list(ls) for ls in labels_list]
    plan = ContractionPlan()
    while len(current) > 1:
        best = None
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                need = _needed(current, output, {i, j})
                union = list(dict.fromkeys(current[i] + current[j]))
                kept = [l for l in union if l in need]
                key = prod(sizes[l] for l in kept)
                if best is None or key < best[0]:
                    best = (key, i, j, kept, prod(sizes[l] for l in union))
        _, i, j, kept, cost = best
        # result label order mirrors _pair_kernel: batch, a-only, b-only
        li, lj = current[i], current[j]
        ordered = [l for l in li if l in lj and l in kept]
        ordered += [l for l in li if l not in lj and l in kept]
        ordered += [l for l in lj if l not in li and l in kept]
        plan.steps.append(PlanStep((i, j), tuple(ordered), cost))
        current = [ls for k, ls in enumerate(current) if k not in (i, j)] + [ordered]
    return plan


def _preprocess(spec: IndexSpec, operands):
    arrays, labels = [], []
    cost = 0
    for pos, (arr, ls) in enumerate(zip(operands, spec.inputs)):
        cost += arr.size
        arr, ls = take_diagonals(arr, ls)
        others = _needed(spec.inputs, spec.output, {pos})
        arr, ls = sum_out(arr, ls, others)
        arrays.append(arr)
        labels.append(ls)
    return arrays, labels, cost


def plan_contraction(spec, shapes: Sequence[Sequence[int]]) -> ContractionPlan:
    spec = _as_spec(spec)
    sizes = spec.extents(shapes)
    labels = []
    cost = 0
    for pos, ls in enumerate(spec.inputs):
        cost += prod(sizes[l] for l in ls)
        others = _needed(spec.inputs, spec.output, {pos})
        labels.append([l for l in dict.fromkeys(ls) if l in others])
    plan = greedy_plan(labels, spec.output, sizes)
    plan.preprocess_cost = cost
    return plan


def _contract_all(spec: IndexSpec, operands, budget):
    if not operands:
        raise EmptyOperands("einsum needs at least one operand")
    sizes = spec.extents([op.shape for op in operands])
    dtype = result_dtype(*operands)
    arrays, labels, pre_cost = _preprocess(spec, operands)
    plan = greedy_plan(labels, spec.output, sizes)
    plan.preprocess_cost = pre_cost
    if budget is not None and plan.cost > budget:
        raise BudgetExceeded(
            f"contraction needs {plan.cost} multiply-adds, budget is {budget}"
        )
    for step in plan.steps:
        i, j = step.positions
        out, ls = _pair_kernel(arrays[i], labels[i], arrays[j], labels[j], step.result_labels)
        arrays = [a for k, a in enumerate(arrays) if k not in (i, j)] + [out]
        labels = [l for k, l in enumerate(labels) if k not in (i, j)] + [ls]
    arr, ls = sum_out(arrays[0], labels[0], set(spec.output))
    return arr.astype(dtype, copy=False), ls, spec.output


def _finish(arr, labels, output):
    return embed_output(arr, labels, output)


def einsum_eval(spec, operands: Sequence, budget: int | None = None) -> np.ndarray:
    """Evaluate an einsum over dense operands.

    Parameters
    ----------
    spec : str or IndexSpec
        Subscripts such as ``"ij,jk->ik"``; without ``->`` the output is the
        sorted list of labels that occur once.
    operands : sequence of array-like
    budget : int, optional
        Maximum number of scalar multiply-adds the plan may use.

    Returns
    -------
    numpy.ndarray
        float64 unless some operand is complex. A full contraction gives a
        rank-0 array.
    """
    spec = _as_spec(spec)
    if not operands:
        raise EmptyOperands("einsum needs at least one operand")
    operands = [as_tensor(op) for op in operands]
    return _finish(*_contract_all(spec, operands, budget))
