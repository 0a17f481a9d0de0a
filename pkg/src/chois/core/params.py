"""Named parameter collections and bit-exact JSON checkpoints."""

import hashlib
import json

import numpy as np

from chois import rng
from chois.errors import ShapeError
from chois.core.tensor import Tensor


def config_hash(config):
    """Stable short hash of a JSON-serializable config mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


class ParameterStore:
    """Uniquely named trainable tensors, frozen after construction.

    Initialization draws from a per-name stream derived from the store seed,
    so parameter values do not depend on registration order.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._params = {}
        self._frozen = False

    def add(self, name, shape, init="fanin", fan_in=None, value=None):
        if self._frozen:
            raise RuntimeError("parameter store is frozen; cannot add parameters")
        if name in self._params:
            raise ValueError(f"duplicate parameter name {name!r}")
        shape = tuple(int(s) for s in shape)
        if value is not None:
            data = np.asarray(value, dtype=np.float64).reshape(shape)
        elif init == "zeros":
            data = np.zeros(shape, dtype=np.float64)
        elif init == "ones":
            data = np.ones(shape, dtype=np.float64)
        elif init == "fanin":
            fan = fan_in if fan_in is not None else (shape[0] if shape else 1)
            bound = 1.0 / np.sqrt(max(fan, 1))
            gen = rng.stream(self.seed, "param", name)
            data = gen.uniform(-bound, bound, size=shape)
        else:
            raise ValueError(f"unknown init {init!r}")
        t = Tensor(data, requires_grad=True, name=name)
        self._params[name] = t
        return t

    def freeze(self):
        self._frozen = True

    def __getitem__(self, name):
        return self._params[name]

    def __contains__(self, name):
        return name in self._params

    def __iter__(self):
        return iter(self._params)

    def names(self):
        return list(self._params)

    def items(self):
        return self._params.items()

    def tensors(self):
        return list(self._params.values())

    def num_values(self):
        return sum(t.data.size for t in self._params.values())

    def state_dict(self):
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_state_dict(self, state):
        for name, t in self._params.items():
            if name not in state:
                raise ShapeError(f"missing parameter {name!r} in state dict")
            arr = np.asarray(state[name], dtype=np.float64)
            if arr.shape != t.data.shape:
                raise ShapeError(
                    f"parameter {name!r}: expected shape {t.data.shape}, got {arr.shape}"
                )
            t.data = arr.copy()

    def all_finite(self):
        return all(np.isfinite(t.data).all() for t in self._params.values())


def save_checkpoint(path, store, extra=None):
    """Write parameters plus metadata as JSON; floats round-trip bit-exactly."""
    doc = {
        "format": "chois-checkpoint-v1",
        "seed": store.seed,
        "extra": extra or {},
        "params": {
            name: {"shape": list(t.data.shape), "data": t.data.ravel().tolist()}
            for name, t in store.items()
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path):
    """Read a checkpoint; returns (state, seed, extra)."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != "chois-checkpoint-v1":
        raise ValueError(f"{path}: not a chois checkpoint")
    state = {}
    for name, rec in doc["params"].items():
        state[name] = np.asarray(rec["data"], dtype=np.float64).reshape(rec["shape"])
    return state, doc["seed"], doc.get("extra", {})
