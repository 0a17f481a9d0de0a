"""Minimal dense-tensor engine: autodiff, Adam, parameter storage."""

from chois.core.tensor import (
    Gradients,
    Tensor,
    absolute,
    add,
    as_tensor,
    backward,
    concat,
    constant,
    div,
    exp,
    gather_rows,
    gelu,
    l1_loss,
    layer_norm,
    log,
    matmul,
    maximum,
    minimum,
    mul,
    no_grad,
    power,
    relu,
    reshape,
    softmax,
    sqrt,
    sub,
    swapaxes,
    take,
    tanh,
    tmean,
    transpose,
    tsum,
)
from chois.core.adam import AdamState, adam_step
from chois.core.gradcheck import gradcheck
from chois.core.params import ParameterStore, config_hash, load_checkpoint, save_checkpoint

__all__ = [
    "AdamState",
    "Gradients",
    "ParameterStore",
    "Tensor",
    "absolute",
    "adam_step",
    "add",
    "as_tensor",
    "backward",
    "concat",
    "config_hash",
    "constant",
    "div",
    "exp",
    "gather_rows",
    "gelu",
    "gradcheck",
    "l1_loss",
    "layer_norm",
    "load_checkpoint",
    "log",
    "matmul",
    "maximum",
    "minimum",
    "mul",
    "no_grad",
    "power",
    "relu",
    "reshape",
    "save_checkpoint",
    "softmax",
    "sqrt",
    "sub",
    "swapaxes",
    "take",
    "tanh",
    "tmean",
    "transpose",
    "tsum",
]
