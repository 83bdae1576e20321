"""Minimal reverse-mode automatic differentiation over float64 numpy arrays.

Just enough operator coverage for the stance model: broadcast arithmetic,
matmul, indexing/gather, concat, segment sums, and the pointwise functions
the encoder and head use. Graphs are built per call and discarded, so there
is no grad zeroing; backward() topologically sorts the tape iteratively
(sample graphs are deep enough to overflow Python's recursion limit).
"""

import numpy as np


def _unbroadcast(grad, shape):
    """Sum out broadcast axes so grad matches the original operand shape."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def _is_fancy(key):
    if isinstance(key, tuple):
        return any(isinstance(k, (np.ndarray, list)) for k in key)
    return isinstance(key, (np.ndarray, list))


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = ()
        self._backward = None

    def _accumulate(self, grad):
        self.grad = grad if self.grad is None else self.grad + grad

    def backward(self):
        if self.data.size != 1:
            raise ValueError("backward() expects a scalar output")
        topo = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward(node.grad)

    # -- operator sugar -------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, -as_tensor(other))

    def __rsub__(self, other):
        return add(as_tensor(other), -self)

    def __truediv__(self, other):
        return div(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return getitem(self, key)

    def sum(self, axis=None):
        return tsum(self, axis=axis)

    def mean(self):
        return tsum(self) * (1.0 / self.data.size)

    def reshape(self, shape):
        return reshape(self, shape)

    def relu(self):
        return relu(self)

    def exp(self):
        return exp(self)

    def log(self):
        return log(self)


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _node(data, parents, backward) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g, b.data.shape))

    return _node(a.data + b.data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g * a.data, b.data.shape))

    return _node(a.data * b.data, (a, b), backward)


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g / b.data, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(-g * a.data / (b.data * b.data), b.data.shape))

    return _node(a.data / b.data, (a, b), backward)


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    ad, bd = a.data, b.data
    if ad.ndim > 2 or bd.ndim > 2:
        raise ValueError("matmul supports 1-D and 2-D operands only")

    def backward(g):
        if a.requires_grad:
            if ad.ndim == 1 and bd.ndim == 1:
                a._accumulate(g * bd)
            elif ad.ndim == 1:
                a._accumulate(bd @ g)
            elif bd.ndim == 1:
                a._accumulate(np.outer(g, bd))
            else:
                a._accumulate(g @ bd.T)
        if b.requires_grad:
            if ad.ndim == 1 and bd.ndim == 1:
                b._accumulate(g * ad)
            elif ad.ndim == 1:
                b._accumulate(np.outer(ad, g))
            elif bd.ndim == 1:
                b._accumulate(ad.T @ g)
            else:
                b._accumulate(ad.T @ g)

    return _node(ad @ bd, (a, b), backward)


def getitem(t: Tensor, key) -> Tensor:
    def backward(g):
        buf = np.zeros_like(t.data)
        if _is_fancy(key):
            np.add.at(buf, key, g)
        else:
            buf[key] += g
        t._accumulate(buf)

    return _node(t.data[key], (t,), backward)


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def backward(g):
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            if t.requires_grad:
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(lo, hi)
                t._accumulate(g[tuple(idx)])

    return _node(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward)


def segment_sum(t: Tensor, segment_ids: np.ndarray, num_segments: int) -> Tensor:
    """Sum rows of t into num_segments buckets; empty buckets stay zero."""
    t = as_tensor(t)
    out = np.zeros((num_segments,) + t.data.shape[1:], dtype=np.float64)
    np.add.at(out, segment_ids, t.data)

    def backward(g):
        if t.requires_grad:
            t._accumulate(g[segment_ids])

    return _node(out, (t,), backward)


def relu(t) -> Tensor:
    t = as_tensor(t)

    def backward(g):
        if t.requires_grad:
            t._accumulate(g * (t.data > 0))

    return _node(np.maximum(t.data, 0.0), (t,), backward)


def leaky_relu(t, slope: float) -> Tensor:
    t = as_tensor(t)
    scale = np.where(t.data > 0, 1.0, slope)

    def backward(g):
        if t.requires_grad:
            t._accumulate(g * scale)

    return _node(np.where(t.data > 0, t.data, slope * t.data), (t,), backward)


def exp(t) -> Tensor:
    t = as_tensor(t)
    out_data = np.exp(t.data)

    def backward(g):
        if t.requires_grad:
            t._accumulate(g * out_data)

    return _node(out_data, (t,), backward)


def log(t) -> Tensor:
    t = as_tensor(t)

    def backward(g):
        if t.requires_grad:
            t._accumulate(g / t.data)

    return _node(np.log(t.data), (t,), backward)


def clip_min(t, floor: float) -> Tensor:
    """Elementwise max(t, floor); gradient flows only where t > floor."""
    t = as_tensor(t)

    def backward(g):
        if t.requires_grad:
            t._accumulate(g * (t.data > floor))

    return _node(np.maximum(t.data, floor), (t,), backward)


def tsum(t, axis=None) -> Tensor:
    t = as_tensor(t)

    def backward(g):
        if t.requires_grad:
            if axis is None:
                t._accumulate(np.broadcast_to(g, t.data.shape).copy())
            else:
                t._accumulate(np.broadcast_to(np.expand_dims(g, axis), t.data.shape).copy())

    return _node(t.data.sum(axis=axis), (t,), backward)


def reshape(t, shape) -> Tensor:
    t = as_tensor(t)
    old_shape = t.data.shape

    def backward(g):
        if t.requires_grad:
            t._accumulate(g.reshape(old_shape))

    return _node(t.data.reshape(shape), (t,), backward)
