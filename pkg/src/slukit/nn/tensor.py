"""Minimal reverse-mode tape over dense float64 arrays (batch size 1)."""

from __future__ import annotations

import numpy as np


class DimensionError(ValueError):
    """Operand shapes are incompatible; the message names both shapes."""


class Tensor:
    """A float64 array plus the bookkeeping to backpropagate through it.

    Leaf tensors created with requires_grad=True are parameters; their .grad
    acts as an accumulator that only the optimizer (or zero_grads) resets.
    """

    __slots__ = ("value", "grad", "parents", "backward_fn", "requires_grad")

    def __init__(self, value, parents=(), backward_fn=None, requires_grad=False):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.parents = parents
        self.backward_fn = backward_fn
        self.requires_grad = requires_grad or any(p.requires_grad for p in parents)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def item(self) -> float:
        return float(self.value)

    def accumulate_grad(self, g) -> None:
        if self.grad is None:
            # copy: backward functions may hand the same buffer to two parents
            self.grad = np.array(g, dtype=np.float64)
        else:
            self.grad += g

    def __repr__(self):
        return f"Tensor(shape={self.value.shape}, requires_grad={self.requires_grad})"


def constant(value) -> Tensor:
    return Tensor(value)


def backward(loss: Tensor) -> None:
    """Backpropagate d(loss)=1 through the graph that produced `loss`."""
    if loss.value.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.value.shape}")
    if not np.isfinite(loss.value):
        raise FloatingPointError("non-finite loss")

    # post-order DFS over the requires_grad subgraph
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))

    loss.accumulate_grad(np.ones_like(loss.value))
    for node in reversed(order):
        if node.backward_fn is None or node.grad is None:
            continue
        grads = node.backward_fn(node.grad)
        for parent, grad in zip(node.parents, grads):
            if parent.requires_grad and grad is not None:
                parent.accumulate_grad(grad)
        if not node.requires_grad or node.backward_fn is not None:
            # free intermediate gradients; parameter leaves keep theirs
            node.grad = None
