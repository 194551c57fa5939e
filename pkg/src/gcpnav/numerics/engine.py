"""Minimal reverse-mode automatic differentiation over float64 numpy arrays.

The engine records a DAG of array-valued nodes as ops are applied and
computes gradients of a scalar root by a single reverse sweep.  The
primitive set is intentionally small: affine maps, elementwise
nonlinearities, reductions, concatenation and row gathering.  Every model
in this package is expressed in these primitives, which keeps the
gradient suite checkable against finite differences end to end.

``no_grad()`` disables graph recording; ops then return constant nodes,
which is how rollouts and planners run the same model code without
paying for tape construction.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np


class EngineError(ValueError):
    """Base class for graph construction/backward errors."""


class UnsupportedPrimitiveError(EngineError):
    def __init__(self, name: str):
        super().__init__(f"unsupported primitive: {name!r}")
        self.primitive = name


class NonScalarRootError(EngineError):
    def __init__(self, shape):
        super().__init__(f"backward requires a scalar root, got shape {shape}")


_grad_enabled = True


@contextmanager
def no_grad():
    """Disable tape recording inside the block (evaluation-only forward passes)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def grad_enabled() -> bool:
    return _grad_enabled


class Node:
    """One value in the computation DAG.

    ``parents`` and ``vjp`` are empty for leaves.  ``param_name`` marks
    leaves that are views into a ParamStore so backward can report
    per-parameter gradients.
    """

    __slots__ = ("value", "parents", "vjp", "param_name")

    def __init__(self, value, parents=(), vjp=None, param_name=None):
        self.value = value if isinstance(value, np.ndarray) else np.asarray(value, dtype=np.float64)
        self.parents = parents
        self.vjp = vjp
        self.param_name = param_name

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Node(shape={self.value.shape}, leaf={self.vjp is None}, param={self.param_name})"

    # Operator sugar; constants are lifted automatically.
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)


def as_node(x) -> Node:
    if isinstance(x, Node):
        return x
    return Node(np.asarray(x, dtype=np.float64))


def value_of(x) -> np.ndarray:
    return x.value if isinstance(x, Node) else np.asarray(x, dtype=np.float64)


def _make(value, parents, vjp):
    if not _grad_enabled:
        return Node(value)
    return Node(value, parents, vjp)


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


# ---------------------------------------------------------------------------
# arithmetic


def add(a, b) -> Node:
    a, b = as_node(a), as_node(b)
    out = a.value + b.value
    return _make(out, (a, b), lambda g: (_unbroadcast(g, a.value.shape), _unbroadcast(g, b.value.shape)))


def sub(a, b) -> Node:
    a, b = as_node(a), as_node(b)
    out = a.value - b.value
    return _make(out, (a, b), lambda g: (_unbroadcast(g, a.value.shape), _unbroadcast(-g, b.value.shape)))


def mul(a, b) -> Node:
    a, b = as_node(a), as_node(b)
    out = a.value * b.value
    return _make(
        out,
        (a, b),
        lambda g: (_unbroadcast(g * b.value, a.value.shape), _unbroadcast(g * a.value, b.value.shape)),
    )


def div(a, b) -> Node:
    a, b = as_node(a), as_node(b)
    out = a.value / b.value
    return _make(
        out,
        (a, b),
        lambda g: (
            _unbroadcast(g / b.value, a.value.shape),
            _unbroadcast(-g * a.value / (b.value * b.value), b.value.shape),
        ),
    )


def neg(a) -> Node:
    a = as_node(a)
    return _make(-a.value, (a,), lambda g: (-g,))


def square(a) -> Node:
    a = as_node(a)
    return _make(a.value * a.value, (a,), lambda g: (2.0 * a.value * g,))


def matmul(a, b) -> Node:
    """2-D matrix product; higher ranks are out of scope for this engine."""
    a, b = as_node(a), as_node(b)
    if a.value.ndim != 2 or b.value.ndim != 2:
        raise EngineError(f"matmul expects 2-D operands, got {a.value.shape} @ {b.value.shape}")
    out = a.value @ b.value
    return _make(out, (a, b), lambda g: (g @ b.value.T, a.value.T @ g))


def affine(x, w, b) -> Node:
    """x @ w + b with b broadcast over rows."""
    return add(matmul(x, w), b)


# ---------------------------------------------------------------------------
# elementwise nonlinearities


def exp(a) -> Node:
    a = as_node(a)
    out = np.exp(a.value)
    return _make(out, (a,), lambda g: (g * out,))


def log(a) -> Node:
    a = as_node(a)
    return _make(np.log(a.value), (a,), lambda g: (g / a.value,))


def tanh(a) -> Node:
    a = as_node(a)
    out = np.tanh(a.value)
    return _make(out, (a,), lambda g: (g * (1.0 - out * out),))


def sigmoid(a) -> Node:
    a = as_node(a)
    out = np.empty_like(a.value)
    pos = a.value >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a.value[pos]))
    ez = np.exp(a.value[~pos])
    out[~pos] = ez / (1.0 + ez)
    return _make(out, (a,), lambda g: (g * out * (1.0 - out),))


def relu(a) -> Node:
    a = as_node(a)
    mask = a.value > 0
    return _make(a.value * mask, (a,), lambda g: (g * mask,))


def softplus(a) -> Node:
    """log(1 + exp(x)), computed overflow-safe."""
    a = as_node(a)
    out = np.logaddexp(0.0, a.value)
    return _make(out, (a,), lambda g: (g * _sigmoid_value(a.value),))


def _sigmoid_value(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ez = np.exp(x[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ---------------------------------------------------------------------------
# reductions and shape ops


def sum_(a, axis=None, keepdims=False) -> Node:
    a = as_node(a)
    out = a.value.sum(axis=axis, keepdims=keepdims)

    def vjp(g):
        if axis is None:
            return (np.broadcast_to(g, a.value.shape).copy(),)
        gg = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gg, a.value.shape).copy(),)

    return _make(out, (a,), vjp)


def mean_(a, axis=None, keepdims=False) -> Node:
    a = as_node(a)
    n = a.value.size if axis is None else a.value.shape[axis]
    return mul(sum_(a, axis=axis, keepdims=keepdims), 1.0 / n)


def logsumexp(a, axis=None, keepdims=False) -> Node:
    """Shift-stabilized log-sum-exp; tolerates -inf entries.

    Gradient is the softmax of the inputs along `axis`.
    """
    a = as_node(a)
    if a.value.size == 0:
        raise EngineError("logsumexp of empty input")
    hi = np.max(a.value, axis=axis, keepdims=True)
    hi = np.where(np.isfinite(hi), hi, 0.0)
    ex = np.exp(a.value - hi)
    s = ex.sum(axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        out_k = np.log(s) + hi
    if keepdims:
        out = out_k
    elif axis is None:
        out = out_k.reshape(())
    else:
        out = np.squeeze(out_k, axis=axis)

    def vjp(g):
        soft = ex / s
        if axis is None:
            return (np.asarray(g).reshape((1,) * a.value.ndim) * soft,)
        gg = g if keepdims else np.expand_dims(g, axis)
        return (gg * soft,)

    return _make(out, (a,), vjp)


def concat(nodes, axis=0) -> Node:
    nodes = [as_node(n) for n in nodes]
    if not nodes:
        raise EngineError("concat of empty list")
    out = np.concatenate([n.value for n in nodes], axis=axis)
    sizes = [n.value.shape[axis] for n in nodes]
    splits = np.cumsum(sizes)[:-1]

    def vjp(g):
        return tuple(np.split(g, splits, axis=axis))

    return _make(out, tuple(nodes), vjp)


def gather_rows(a, idx) -> Node:
    """Select rows of a 2-D node; backward scatter-adds into place."""
    a = as_node(a)
    idx = np.asarray(idx, dtype=np.intp)
    out = a.value[idx]

    def vjp(g):
        acc = np.zeros_like(a.value)
        np.add.at(acc, idx, g)
        return (acc,)

    return _make(out, (a,), vjp)


def transpose(a) -> Node:
    a = as_node(a)
    if a.value.ndim != 2:
        raise EngineError(f"transpose expects a 2-D node, got shape {a.value.shape}")
    return _make(a.value.T.copy(), (a,), lambda g: (g.T,))


# ---------------------------------------------------------------------------
# backward


def _toposort(root: Node) -> list:
    """Iterative post-order over the DAG reachable from root."""
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def backward(root: Node) -> dict:
    """Reverse sweep from a scalar root.

    Returns a dict mapping reachable Node objects (keyed by identity) to
    their gradient arrays.  Leaves that are parameter views appear with
    their accumulated gradients; unvisited parameters simply do not
    appear, which callers treat as an exact zero.
    """
    if root.value.size != 1:
        raise NonScalarRootError(root.value.shape)
    order = _toposort(root)
    grads: dict = {}
    grads[id(root)] = np.ones_like(root.value)
    node_by_id = {id(n): n for n in order}
    for node in reversed(order):
        g = grads.get(id(node))
        if g is None or node.vjp is None:
            continue
        pgs = node.vjp(g)
        for parent, pg in zip(node.parents, pgs):
            pid = id(parent)
            if pid in grads:
                grads[pid] = grads[pid] + pg
            else:
                grads[pid] = pg
    return {node_by_id[i]: g for i, g in grads.items()}


def reverse_mode_gradients(store, loss: Node) -> np.ndarray:
    """Gradient of a scalar loss with respect to every parameter in `store`.

    Parameters that do not participate in the graph get an exact zero
    gradient.  Raises NonScalarRootError for a non-scalar loss.
    """
    grads = backward(loss)
    flat = np.zeros(store.size, dtype=np.float64)
    for node, g in grads.items():
        if node.param_name is not None:
            off, shape = store.layout(node.param_name)
            n = int(np.prod(shape, dtype=np.intp)) if shape else 1
            flat[off : off + n] += np.asarray(g, dtype=np.float64).ravel()
    return flat


# ---------------------------------------------------------------------------
# primitive registry (name-dispatched construction)

_PRIMITIVES = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "neg": neg,
    "square": square,
    "matmul": matmul,
    "affine": affine,
    "exp": exp,
    "log": log,
    "tanh": tanh,
    "sigmoid": sigmoid,
    "relu": relu,
    "softplus": softplus,
    "sum": sum_,
    "mean": mean_,
    "logsumexp": logsumexp,
    "concat": concat,
    "gather_rows": gather_rows,
    "transpose": transpose,
}


def apply_primitive(name: str, *args, **kwargs) -> Node:
    """Name-dispatched op construction; unknown names raise UnsupportedPrimitiveError."""
    try:
        op = _PRIMITIVES[name]
    except KeyError:
        raise UnsupportedPrimitiveError(name) from None
    return op(*args, **kwargs)
