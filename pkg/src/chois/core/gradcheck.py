"""Finite-difference verification of reverse-mode gradients."""

import numpy as np

from chois import rng
from chois.errors import ShapeError
from chois.core.tensor import Tensor, backward, no_grad


def _rel_err(a, b):
    scale = max(abs(a), abs(b), 1e-8)
    return abs(a - b) / scale


def gradcheck(f, points, eps=1e-5, max_coords=None, seed=0):
    """Max relative error between reverse-mode and central finite differences.

    ``f`` maps one or more tensors to a scalar tensor. ``points`` is a single
    array/tensor or a sequence of them; every point is checked. When
    ``max_coords`` is set, a seeded subset of coordinates per tensor is
    probed instead of all of them (useful for whole-model checks).
    """
    single = not isinstance(points, (list, tuple))
    if single:
        points = [points]
    leaves = [
        Tensor(p.data.copy() if isinstance(p, Tensor) else p, requires_grad=True)
        for p in points
    ]

    out = f(*leaves)
    if not isinstance(out, Tensor) or out.data.size != 1:
        raise ShapeError("gradcheck expects a scalar-valued function")
    grads = backward(out)
    analytic = [grads.of(leaf) for leaf in leaves]

    worst = 0.0
    gen = rng.stream(seed, "gradcheck")
    for k, leaf in enumerate(leaves):
        flat = leaf.data.ravel()
        n = flat.size
        if max_coords is not None and n > max_coords:
            coords = gen.choice(n, size=max_coords, replace=False)
        else:
            coords = range(n)
        a_flat = analytic[k].ravel()
        for i in coords:
            orig = flat[i]
            step = eps * max(1.0, abs(orig))
            with no_grad():
                flat[i] = orig + step
                hi = f(*leaves).item()
                flat[i] = orig - step
                lo = f(*leaves).item()
            flat[i] = orig
            numeric = (hi - lo) / (2.0 * step)
            worst = max(worst, _rel_err(a_flat[i], numeric))
    return worst
