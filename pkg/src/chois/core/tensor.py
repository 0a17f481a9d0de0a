"""Dense float64 tensors with reverse-mode automatic differentiation.

Every operation records a vector-Jacobian closure on the output tensor;
``backward`` walks the graph once in reverse topological order and consumes
it. Arrays are numpy float64 throughout; shapes follow numpy broadcasting.
"""

import numpy as np
from scipy.special import erf

from chois.errors import MissingGradError, ShapeError

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)

_grad_enabled = True


class no_grad:
    """Context manager disabling graph recording (forward values only)."""

    def __enter__(self):
        global _grad_enabled
        self._prev = _grad_enabled
        _grad_enabled = False
        return self

    def __exit__(self, *exc):
        global _grad_enabled
        _grad_enabled = self._prev
        return False


def _as_array(value):
    arr = np.asarray(value, dtype=np.float64)
    return arr


class Tensor:
    __slots__ = ("data", "requires_grad", "name", "_parents")

    def __init__(self, data, requires_grad=False, name=None):
        self.data = _as_array(data)
        self.requires_grad = bool(requires_grad)
        self.name = name
        self._parents = ()

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        if self.data.size != 1:
            raise ShapeError(f"item() on tensor of shape {self.data.shape}")
        return float(self.data)

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    # operator sugar -------------------------------------------------------
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
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __getitem__(self, index):
        return take(self, index)

    def reshape(self, *shape):
        return reshape(self, *shape)

    def transpose(self, *axes):
        return transpose(self, *axes)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def backward(self):
        return backward(self)


def as_tensor(value):
    return value if isinstance(value, Tensor) else Tensor(value)


def constant(value):
    """Tensor that never tracks gradients (conditioning data, targets)."""
    return Tensor(value, requires_grad=False)


def _tracking(*tensors):
    return _grad_enabled and any(t.requires_grad for t in tensors)


def _make(data, parents):
    out = Tensor(data)
    if parents:
        out.requires_grad = True
        out._parents = tuple(parents)
    return out


def _unbroadcast(grad, shape):
    """Reduce ``grad`` back to ``shape`` after numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------

def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    data = a.data + b.data
    if not _tracking(a, b):
        return Tensor(data)
    parents = []
    if a.requires_grad:
        parents.append((a, lambda g, sh=a.data.shape: _unbroadcast(g, sh)))
    if b.requires_grad:
        parents.append((b, lambda g, sh=b.data.shape: _unbroadcast(g, sh)))
    return _make(data, parents)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    data = a.data - b.data
    if not _tracking(a, b):
        return Tensor(data)
    parents = []
    if a.requires_grad:
        parents.append((a, lambda g, sh=a.data.shape: _unbroadcast(g, sh)))
    if b.requires_grad:
        parents.append((b, lambda g, sh=b.data.shape: _unbroadcast(-g, sh)))
    return _make(data, parents)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    data = a.data * b.data
    if not _tracking(a, b):
        return Tensor(data)
    parents = []
    if a.requires_grad:
        parents.append((a, lambda g, o=b.data, sh=a.data.shape: _unbroadcast(g * o, sh)))
    if b.requires_grad:
        parents.append((b, lambda g, o=a.data, sh=b.data.shape: _unbroadcast(g * o, sh)))
    return _make(data, parents)


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    data = a.data / b.data
    if not _tracking(a, b):
        return Tensor(data)
    parents = []
    if a.requires_grad:
        parents.append((a, lambda g, o=b.data, sh=a.data.shape: _unbroadcast(g / o, sh)))
    if b.requires_grad:
        parents.append(
            (b, lambda g, n=a.data, o=b.data, sh=b.data.shape: _unbroadcast(-g * n / (o * o), sh))
        )
    return _make(data, parents)


def power(a, exponent):
    a = as_tensor(a)
    p = float(exponent)
    data = a.data ** p
    if not _tracking(a):
        return Tensor(data)

    def vjp(g, x=a.data, p=p):
        return g * p * x ** (p - 1.0)

    return _make(data, [(a, vjp)])


def absolute(a):
    """Elementwise |x|; subgradient 0 at x == 0."""
    a = as_tensor(a)
    data = np.abs(a.data)
    if not _tracking(a):
        return Tensor(data)
    return _make(data, [(a, lambda g, s=np.sign(a.data): g * s)])


def maximum(a, b):
    """Elementwise max; gradient routed to the left argument on ties."""
    a, b = as_tensor(a), as_tensor(b)
    data = np.maximum(a.data, b.data)
    if not _tracking(a, b):
        return Tensor(data)
    left = a.data >= b.data
    parents = []
    if a.requires_grad:
        parents.append((a, lambda g, m=left, sh=a.data.shape: _unbroadcast(g * m, sh)))
    if b.requires_grad:
        parents.append((b, lambda g, m=~left, sh=b.data.shape: _unbroadcast(g * m, sh)))
    return _make(data, parents)


def minimum(a, b):
    """Elementwise min; gradient routed to the left argument on ties."""
    a, b = as_tensor(a), as_tensor(b)
    data = np.minimum(a.data, b.data)
    if not _tracking(a, b):
        return Tensor(data)
    left = a.data <= b.data
    parents = []
    if a.requires_grad:
        parents.append((a, lambda g, m=left, sh=a.data.shape: _unbroadcast(g * m, sh)))
    if b.requires_grad:
        parents.append((b, lambda g, m=~left, sh=b.data.shape: _unbroadcast(g * m, sh)))
    return _make(data, parents)


# ---------------------------------------------------------------------------
# nonlinearities
# ---------------------------------------------------------------------------

def exp(a):
    a = as_tensor(a)
    data = np.exp(a.data)
    if not _tracking(a):
        return Tensor(data)
    return _make(data, [(a, lambda g, y=data: g * y)])


def log(a):
    a = as_tensor(a)
    data = np.log(a.data)
    if not _tracking(a):
        return Tensor(data)
    return _make(data, [(a, lambda g, x=a.data: g / x)])


def sqrt(a):
    """Elementwise square root; subgradient 0 at x == 0."""
    a = as_tensor(a)
    data = np.sqrt(a.data)
    if not _tracking(a):
        return Tensor(data)

    def vjp(g, y=data):
        out = np.zeros_like(g)
        nz = y > 0.0
        out[nz] = g[nz] * 0.5 / y[nz]
        return out

    return _make(data, [(a, vjp)])


def tanh(a):
    a = as_tensor(a)
    data = np.tanh(a.data)
    if not _tracking(a):
        return Tensor(data)
    return _make(data, [(a, lambda g, y=data: g * (1.0 - y * y))])


def relu(a):
    a = as_tensor(a)
    data = np.maximum(a.data, 0.0)
    if not _tracking(a):
        return Tensor(data)
    return _make(data, [(a, lambda g, m=a.data > 0.0: g * m)])


def gelu(a):
    """Exact GELU x * Phi(x) using the Gaussian CDF."""
    a = as_tensor(a)
    x = a.data
    cdf = 0.5 * (1.0 + erf(x / _SQRT2))
    data = x * cdf
    if not _tracking(a):
        return Tensor(data)

    def vjp(g, x=x, cdf=cdf):
        pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
        return g * (cdf + x * pdf)

    return _make(data, [(a, vjp)])


def softmax(a, axis=-1):
    """Numerically stable softmax along ``axis`` with a fused VJP."""
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    data = e / e.sum(axis=axis, keepdims=True)
    if not _tracking(a):
        return Tensor(data)

    def vjp(g, y=data, axis=axis):
        return y * (g - (g * y).sum(axis=axis, keepdims=True))

    return _make(data, [(a, vjp)])


# ---------------------------------------------------------------------------
# linear algebra / reductions
# ---------------------------------------------------------------------------

def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(f"matmul needs ndim >= 2, got {a.shape} @ {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul inner mismatch: {a.shape} @ {b.shape}")
    data = a.data @ b.data
    if not _tracking(a, b):
        return Tensor(data)
    parents = []
    if a.requires_grad:
        parents.append(
            (a, lambda g, o=b.data, sh=a.data.shape: _unbroadcast(g @ o.swapaxes(-1, -2), sh))
        )
    if b.requires_grad:
        parents.append(
            (b, lambda g, o=a.data, sh=b.data.shape: _unbroadcast(o.swapaxes(-1, -2) @ g, sh))
        )
    return _make(data, parents)


def tsum(a, axis=None, keepdims=False):
    a = as_tensor(a)
    data = a.data.sum(axis=axis, keepdims=keepdims)
    if not _tracking(a):
        return Tensor(data)

    def vjp(g, shape=a.data.shape, axis=axis, keepdims=keepdims):
        if axis is None:
            return np.broadcast_to(g, shape).copy()
        if not keepdims:
            axes = axis if isinstance(axis, tuple) else (axis,)
            axes = tuple(ax % len(shape) for ax in axes)
            for ax in sorted(axes):
                g = np.expand_dims(g, ax)
        return np.broadcast_to(g, shape).copy()

    return _make(data, [(a, vjp)])


def tmean(a, axis=None, keepdims=False):
    a = as_tensor(a)
    if axis is None:
        count = a.data.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        count = int(np.prod([a.data.shape[ax] for ax in axes]))
    return tsum(a, axis=axis, keepdims=keepdims) * (1.0 / count)


# ---------------------------------------------------------------------------
# shape manipulation
# ---------------------------------------------------------------------------

def reshape(a, *shape):
    a = as_tensor(a)
    if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
        shape = tuple(shape[0])
    data = a.data.reshape(shape)
    if not _tracking(a):
        return Tensor(data)
    return _make(data, [(a, lambda g, sh=a.data.shape: g.reshape(sh))])


def transpose(a, *axes):
    a = as_tensor(a)
    if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
        axes = tuple(axes[0])
    if not axes:
        axes = tuple(reversed(range(a.ndim)))
    data = a.data.transpose(axes)
    if not _tracking(a):
        return Tensor(data)
    inverse = tuple(np.argsort(axes))
    return _make(data, [(a, lambda g, inv=inverse: g.transpose(inv))])


def swapaxes(a, ax1, ax2):
    a = as_tensor(a)
    data = a.data.swapaxes(ax1, ax2)
    if not _tracking(a):
        return Tensor(data)
    return _make(data, [(a, lambda g, i=ax1, j=ax2: g.swapaxes(i, j))])


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    data = np.concatenate([t.data for t in tensors], axis=axis)
    if not _grad_enabled or not any(t.requires_grad for t in tensors):
        return Tensor(data)
    parents = []
    offset = 0
    for t in tensors:
        width = t.data.shape[axis]
        if t.requires_grad:
            sl = [slice(None)] * data.ndim
            sl[axis] = slice(offset, offset + width)

            def vjp(g, sl=tuple(sl)):
                return g[sl]

            parents.append((t, vjp))
        offset += width
    return _make(data, parents)


def _index_has_array(index):
    if isinstance(index, tuple):
        return any(isinstance(i, (np.ndarray, list)) for i in index)
    return isinstance(index, (np.ndarray, list))


def take(a, index):
    """Basic slicing / integer indexing; gradients scatter-add back."""
    a = as_tensor(a)
    data = a.data[index]
    if not _tracking(a):
        return Tensor(data)
    fancy = _index_has_array(index)

    def vjp(g, shape=a.data.shape, index=index, fancy=fancy):
        out = np.zeros(shape, dtype=np.float64)
        if fancy:
            np.add.at(out, index, g)  # repeated indices accumulate
        else:
            out[index] += g  # basic slices address unique cells
        return out

    return _make(data, [(a, vjp)])


def gather_rows(table, indices):
    """Row lookup ``table[indices]`` with scatter-add gradients."""
    table = as_tensor(table)
    idx = np.asarray(indices, dtype=np.int64)
    data = table.data[idx]
    if not _tracking(table):
        return Tensor(data)

    def vjp(g, shape=table.data.shape, idx=idx):
        out = np.zeros(shape, dtype=np.float64)
        np.add.at(out, idx, g)
        return out

    return _make(data, [(table, vjp)])


# ---------------------------------------------------------------------------
# composites
# ---------------------------------------------------------------------------

def layer_norm(x, gamma, beta, eps=1e-5):
    """Normalize the last axis to zero mean / unit variance, then affine."""
    mu = tmean(x, axis=-1, keepdims=True)
    centered = sub(x, mu)
    var = tmean(mul(centered, centered), axis=-1, keepdims=True)
    inv = power(add(var, eps), -0.5)
    return add(mul(mul(centered, inv), gamma), beta)


def l1_loss(pred, target):
    """Mean over all elements of |pred - target|."""
    return tmean(absolute(sub(pred, target)))


# ---------------------------------------------------------------------------
# reverse pass
# ---------------------------------------------------------------------------

class Gradients:
    """Result of a backward pass; indexable by tensor or by parameter name."""

    def __init__(self, by_id, by_name):
        self._by_id = by_id
        self._by_name = by_name

    def of(self, tensor):
        try:
            return self._by_id[id(tensor)]
        except KeyError:
            raise MissingGradError(
                "tensor was not part of the recorded computation (or requires_grad is unset)"
            ) from None

    def __getitem__(self, key):
        if isinstance(key, Tensor):
            return self.of(key)
        try:
            return self._by_name[key]
        except KeyError:
            raise MissingGradError(f"no gradient recorded under name {key!r}") from None

    def __contains__(self, key):
        if isinstance(key, Tensor):
            return id(key) in self._by_id
        return key in self._by_name

    def names(self):
        return dict(self._by_name)


def backward(loss):
    """Reverse-mode gradients of a scalar ``loss``; consumes the record.

    Returns a :class:`Gradients` mapping every ``requires_grad`` tensor on
    the record (named parameters also by name) to its gradient array.
    """
    if not isinstance(loss, Tensor):
        raise ShapeError("backward expects a Tensor")
    if loss.data.size != 1:
        raise ShapeError(f"backward expects a scalar loss, got shape {loss.data.shape}")

    order = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent, _ in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))

    grads = {id(loss): np.ones_like(loss.data)}
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node.requires_grad and not node._parents:
            grads[id(node)] = g  # leaf: keep
        for parent, vjp in node._parents:
            contribution = vjp(g)
            existing = grads.get(id(parent))
            if existing is None:
                grads[id(parent)] = contribution
            else:
                grads[id(parent)] = existing + contribution
        node._parents = ()  # consume the record

    by_id = {}
    by_name = {}
    for node in order:
        if node.requires_grad and id(node) in grads:
            by_id[id(node)] = grads[id(node)]
            if node.name is not None:
                by_name[node.name] = grads[id(node)]
    return Gradients(by_id, by_name)
