"""Dense float64 tensors that record the operations applied to them.

A `Tensor` wraps a numpy array. When at least one operand requires a gradient,
every operation returns a tensor linked to its operands together with a
closure that pushes the output gradient back to them. `backward` replays those
closures in reverse topological order.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Mapping

import contextlib
import itertools
import threading

import numpy as np

_node_ids = itertools.count()
_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Evaluate without recording a graph, in the calling thread only."""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def _noop() -> None:
    return None


class Tensor:
    """A float64 array with an optional gradient and graph linkage.

    Attributes:
        data: The values, a numpy float64 array.
        grad: Gradient of the last `backward` root with respect to `data`,
            same shape, or None.
        requires_grad: Whether gradients flow into this tensor.
        node_id: Unique identifier of this node in the computation graph.
        op: Name of the operation that produced this tensor.
    """

    __slots__ = (
        "_backward",
        "_parents",
        "data",
        "grad",
        "name",
        "node_id",
        "op",
        "requires_grad",
    )

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self.node_id = next(_node_ids)
        self.op = "leaf"
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[], None] = _noop

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, op={self.op!r}{label})"

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            msg = f"item() needs a single-element tensor, got shape {self.shape}"
            raise ValueError(msg)
        return float(self.data.reshape(-1)[0])

    def accumulate(self, grad: np.ndarray) -> None:
        """Add `grad` into this tensor's gradient, summing out broadcast axes."""
        if not self.requires_grad:
            return
        grad = _unbroadcast(np.asarray(grad, dtype=np.float64), self.data.shape)
        if self.grad is None:
            self.grad = grad.copy()
        else:
            self.grad += grad

    # Elementwise arithmetic. Operands are tensors of identical shape or
    # plain scalars; no general broadcasting is needed by the networks.

    def __add__(self, other) -> Tensor:
        other = as_tensor(other)
        out = record(self.data + other.data, (self, other), "add")
        if out.requires_grad:

            def _backward():
                self.accumulate(out.grad)
                other.accumulate(out.grad)

            out._backward = _backward
        return out

    __radd__ = __add__

    def __neg__(self) -> Tensor:
        out = record(-self.data, (self,), "neg")
        if out.requires_grad:

            def _backward():
                self.accumulate(-out.grad)

            out._backward = _backward
        return out

    def __sub__(self, other) -> Tensor:
        return self + (-as_tensor(other))

    def __rsub__(self, other) -> Tensor:
        return as_tensor(other) + (-self)

    def __mul__(self, other) -> Tensor:
        other = as_tensor(other)
        out = record(self.data * other.data, (self, other), "mul")
        if out.requires_grad:

            def _backward():
                self.accumulate(out.grad * other.data)
                other.accumulate(out.grad * self.data)

            out._backward = _backward
        return out

    __rmul__ = __mul__

    def __truediv__(self, other) -> Tensor:
        other = as_tensor(other)
        return self * other**-1

    def __rtruediv__(self, other) -> Tensor:
        return as_tensor(other) * self**-1

    def __pow__(self, exponent: float) -> Tensor:
        if not isinstance(exponent, int | float):
            msg = "only scalar exponents are supported"
            raise TypeError(msg)
        out = record(self.data**exponent, (self,), f"pow{exponent}")
        if out.requires_grad:

            def _backward():
                self.accumulate(out.grad * exponent * self.data ** (exponent - 1))

            out._backward = _backward
        return out

    def square(self) -> Tensor:
        return self**2

    def log(self, floor: float = 0.0) -> Tensor:
        """Natural log of max(x, floor); no gradient flows where x < floor."""
        clipped = np.maximum(self.data, floor)
        out = record(np.log(clipped), (self,), "log")
        if out.requires_grad:

            def _backward():
                self.accumulate(out.grad * (self.data >= floor) / clipped)

            out._backward = _backward
        return out

    def sum(self, axis: int | None = None) -> Tensor:
        out = record(self.data.sum(axis=axis), (self,), "sum")
        if out.requires_grad:

            def _backward():
                grad = out.grad if axis is None else np.expand_dims(out.grad, axis)
                self.accumulate(np.broadcast_to(grad, self.data.shape))

            out._backward = _backward
        return out

    def mean(self, axis: int | None = None) -> Tensor:
        count = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis) * (1.0 / count)

    def reshape(self, *shape) -> Tensor:
        out = record(self.data.reshape(*shape), (self,), "reshape")
        if out.requires_grad:

            def _backward():
                self.accumulate(out.grad.reshape(self.data.shape))

            out._backward = _backward
        return out

    def __getitem__(self, index) -> Tensor:
        out = record(self.data[index], (self,), "getitem")
        if out.requires_grad:

            def _backward():
                grad = np.zeros_like(self.data)
                np.add.at(grad, index, out.grad)
                self.accumulate(grad)

            out._backward = _backward
        return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def record(data: np.ndarray, parents: tuple[Tensor, ...], op: str) -> Tensor:
    """Wrap the result of an operation, linking it to its operands if needed.

    Callers attach a `_backward` closure when the result requires a gradient.
    """
    out = Tensor(data)
    out.op = op
    if is_grad_enabled() and any(parent.requires_grad for parent in parents):
        out.requires_grad = True
        out._parents = parents
    return out


def concat(tensors: list[Tensor], axis: int) -> Tensor:
    """Concatenate tensors along `axis`."""
    tensors = [as_tensor(tensor) for tensor in tensors]
    out = record(
        np.concatenate([tensor.data for tensor in tensors], axis=axis),
        tuple(tensors),
        "concat",
    )
    if out.requires_grad:
        bounds = np.cumsum([tensor.shape[axis] for tensor in tensors])[:-1]

        def _backward():
            for tensor, grad in zip(
                tensors, np.split(out.grad, bounds, axis=axis), strict=True
            ):
                tensor.accumulate(grad)

        out._backward = _backward
    return out


def topological_order(root: Tensor) -> list[Tensor]:
    """Nodes reachable from `root`, every node after all of its operands."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node.node_id in visited:
            continue
        visited.add(node.node_id)
        stack.append((node, True))
        stack.extend(
            (parent, False)
            for parent in node._parents
            if parent.node_id not in visited
        )
    return order


def backward(
    loss: Tensor, params: Mapping[str, Tensor] | None = None
) -> dict[str, np.ndarray] | None:
    """Back-propagate from a scalar `loss`.

    Gradients left by earlier calls on the nodes of this graph are discarded
    first, so each call yields the gradient of `loss` alone.

    Args:
        loss: Single-element tensor produced by a recorded forward pass.
        params: Optional named parameters to collect gradients for.

    Returns:
        The gradient of every entry of `params` (zeros for parameters `loss`
        does not depend on), or None when `params` is not given.

    Raises:
        ValueError: If `loss` is not a scalar.
    """
    if loss.data.size != 1:
        msg = f"backward needs a scalar loss, got shape {loss.shape}"
        raise ValueError(msg)
    order = topological_order(loss)
    for node in order:
        node.grad = None
    if params is not None:
        for param in params.values():
            param.grad = None
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        node._backward()
    if params is None:
        return None
    return {
        name: param.grad if param.grad is not None else np.zeros_like(param.data)
        for name, param in params.items()
    }
