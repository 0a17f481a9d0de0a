"""Transformer denoiser predicting the clean sample from noisy input.

Per frame the network sees [bps feature | condition slots | noisy sample],
projects to d_model, prepends one embedding token (noise level + language),
runs full self-attention, and projects the frame tokens back to sample width.
"""

from dataclasses import dataclass, field, asdict

import numpy as np

from chois.core import (
    ParameterStore,
    Tensor,
    concat,
    gather_rows,
    gelu,
    layer_norm,
    load_checkpoint,
    matmul,
    save_checkpoint,
    softmax,
    swapaxes,
)
from chois.core import tensor as T
from chois.core.params import config_hash
from chois.errors import InvalidStep, ShapeError
from chois.representation import COND_DIM, SAMPLE_DIM

BPS_FLAT = 1024 * 3


@dataclass
class DenoiserConfig:
    d_model: int = 128
    layers: int = 4
    heads: int = 4
    ff: int = 512
    bps_out: int = 256
    bps_hidden: int = 128
    text_dim: int = 64
    max_T: int = 120
    max_steps: int = 100
    use_positional: bool = True

    def __post_init__(self):
        if self.d_model % self.heads != 0:
            raise ValueError("d_model must be divisible by heads")

    def to_dict(self):
        return asdict(self)


class TextVocab:
    """Closed token list for the templated command language; id 0 is UNK."""

    UNK = "<unk>"

    def __init__(self, tokens):
        self.tokens = [self.UNK] + [t for t in tokens if t != self.UNK]
        self.index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def encode(self, text):
        words = str(text).lower().replace(",", " ").replace(".", " ").split()
        return [self.index.get(w, 0) for w in words]


def sinusoidal(positions, dim):
    """Standard sin/cos encoding; positions (N,) -> (N, dim)."""
    positions = np.atleast_1d(np.asarray(positions, dtype=np.float64))
    half = dim // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half) / max(half - 1, 1))
    ang = positions[:, None] * freqs[None, :]
    enc = np.zeros((len(positions), dim))
    enc[:, 0::2] = np.sin(ang[:, : (dim + 1) // 2])
    enc[:, 1::2] = np.cos(ang[:, : dim // 2])
    return enc


def build_params(config, vocab_size, seed):
    d = config.d_model
    p = ParameterStore(seed)
    p.add("bps.w1", (BPS_FLAT, config.bps_hidden))
    p.add("bps.b1", (config.bps_hidden,), init="zeros")
    p.add("bps.w2", (config.bps_hidden, config.bps_out), fan_in=config.bps_hidden)
    p.add("bps.b2", (config.bps_out,), init="zeros")
    p.add("noise.w1", (d, d))
    p.add("noise.b1", (d,), init="zeros")
    p.add("noise.w2", (d, d))
    p.add("noise.b2", (d,), init="zeros")
    p.add("text.embed", (vocab_size, config.text_dim))
    p.add("text.proj.w", (config.text_dim, d), fan_in=config.text_dim)
    p.add("text.proj.b", (d,), init="zeros")
    in_width = config.bps_out + COND_DIM + SAMPLE_DIM
    p.add("in.w", (in_width, d), fan_in=in_width)
    p.add("in.b", (d,), init="zeros")
    for i in range(config.layers):
        pre = f"layer{i}."
        p.add(pre + "ln1.g", (d,), init="ones")
        p.add(pre + "ln1.b", (d,), init="zeros")
        p.add(pre + "qkv.w", (d, 3 * d), fan_in=d)
        p.add(pre + "qkv.b", (3 * d,), init="zeros")
        p.add(pre + "attn_out.w", (d, d), fan_in=d)
        p.add(pre + "attn_out.b", (d,), init="zeros")
        p.add(pre + "ln2.g", (d,), init="ones")
        p.add(pre + "ln2.b", (d,), init="zeros")
        p.add(pre + "ff.w1", (d, config.ff), fan_in=d)
        p.add(pre + "ff.b1", (config.ff,), init="zeros")
        p.add(pre + "ff.w2", (config.ff, d), fan_in=config.ff)
        p.add(pre + "ff.b2", (d,), init="zeros")
    p.add("final_ln.g", (d,), init="ones")
    p.add("final_ln.b", (d,), init="zeros")
    p.add("out.w", (d, SAMPLE_DIM), fan_in=d)
    p.add("out.b", (SAMPLE_DIM,), init="zeros")
    p.freeze()
    return p


class Denoiser:
    """Parameter bundle plus the forward pass."""

    def __init__(self, config, vocab, seed=0, params=None):
        self.config = config
        self.vocab = vocab
        self.params = params if params is not None else build_params(config, len(vocab), seed)

    # -- persistence --------------------------------------------------------

    def save(self, path, extra=None):
        meta = {
            "config": self.config.to_dict(),
            "vocab": self.vocab.tokens[1:],  # UNK is implicit
            "config_hash": config_hash(self.config.to_dict()),
        }
        if extra:
            meta.update(extra)
        save_checkpoint(path, self.params, extra=meta)

    @classmethod
    def load(cls, path):
        state, seed, extra = load_checkpoint(path)
        config = DenoiserConfig(**extra["config"])
        vocab = TextVocab(extra["vocab"])
        model = cls(config, vocab, seed=seed)
        model.params.load_state_dict(state)
        return model, extra

    # -- building blocks ----------------------------------------------------

    def project_bps(self, g_flat):
        """Flattened (B,3072) feature -> (B,bps_out) learned projection."""
        if g_flat.shape[-1] != BPS_FLAT:
            raise ShapeError(f"expected BPS width {BPS_FLAT}, got {g_flat.shape}")
        p = self.params
        x = T.as_tensor(g_flat)
        h = gelu(T.add(matmul(x, p["bps.w1"]), p["bps.b1"]))
        return T.add(matmul(h, p["bps.w2"]), p["bps.b2"])

    def embed_noise_and_text(self, levels, token_ids):
        """Noise-level MLP plus mean-pooled projected text: (B, d_model).

        ``levels`` are 0-based noise indices in [0, max_steps); ``token_ids``
        is one id list per batch element (empty list = zero text term).
        """
        levels = np.atleast_1d(np.asarray(levels, dtype=np.int64))
        if ((levels < 0) | (levels >= self.config.max_steps)).any():
            raise InvalidStep(f"noise level outside [0, {self.config.max_steps})")
        p = self.params
        enc = T.constant(sinusoidal(levels, self.config.d_model))
        h = gelu(T.add(matmul(enc, p["noise.w1"]), p["noise.b1"]))
        noise_emb = T.add(matmul(h, p["noise.w2"]), p["noise.b2"])

        pooled = []
        for ids in token_ids:
            if len(ids) == 0:
                pooled.append(T.constant(np.zeros((1, self.config.text_dim))))
            else:
                rows = gather_rows(p["text.embed"], np.asarray(ids, dtype=np.int64))
                pooled.append(T.tmean(rows, axis=0, keepdims=True))
        text = concat(pooled, axis=0)
        text_emb = T.add(matmul(text, p["text.proj.w"]), p["text.proj.b"])
        return T.add(noise_emb, text_emb)

    def _block(self, x, i):
        p = self.params
        pre = f"layer{i}."
        B, S, d = x.shape
        h = layer_norm(x, p[pre + "ln1.g"], p[pre + "ln1.b"])
        qkv = T.add(matmul(h, p[pre + "qkv.w"]), p[pre + "qkv.b"])
        heads = self.config.heads
        dh = d // heads
        qkv = T.reshape(qkv, (B, S, 3, heads, dh))
        q = swapaxes(qkv[:, :, 0], 1, 2)  # (B,H,S,dh)
        k = swapaxes(qkv[:, :, 1], 1, 2)
        v = swapaxes(qkv[:, :, 2], 1, 2)
        scores = T.mul(matmul(q, swapaxes(k, -1, -2)), 1.0 / np.sqrt(dh))
        attn = softmax(scores, axis=-1)
        mixed = matmul(attn, v)  # (B,H,S,dh)
        mixed = T.reshape(swapaxes(mixed, 1, 2), (B, S, d))
        x = T.add(x, T.add(matmul(mixed, p[pre + "attn_out.w"]), p[pre + "attn_out.b"]))
        h = layer_norm(x, p[pre + "ln2.g"], p[pre + "ln2.b"])
        h = gelu(T.add(matmul(h, p[pre + "ff.w1"]), p[pre + "ff.b1"]))
        h = T.add(matmul(h, p[pre + "ff.w2"]), p[pre + "ff.b2"])
        return T.add(x, h)

    def forward(self, tau_n, levels, cond, g_hat, token_ids):
        """Batched denoise: (B,T,131) noisy -> (B,T,131) clean prediction.

        ``cond`` is (B,T,129), ``g_hat`` (B,bps_out), ``token_ids`` a list of
        B id lists. Inputs may be Tensors (for gradients) or arrays.
        """
        tau_n = T.as_tensor(tau_n)
        cond = T.as_tensor(cond)
        if tau_n.ndim != 3 or cond.ndim != 3 or tau_n.shape[:2] != cond.shape[:2]:
            raise ShapeError(f"inconsistent shapes: tau {tau_n.shape}, cond {cond.shape}")
        if tau_n.shape[2] != SAMPLE_DIM or cond.shape[2] != COND_DIM:
            raise ShapeError(f"bad widths: tau {tau_n.shape}, cond {cond.shape}")
        B, frames = tau_n.shape[0], tau_n.shape[1]
        p = self.params

        g_hat = T.as_tensor(g_hat)
        g_rows = T.reshape(g_hat, (B, 1, self.config.bps_out))
        ones = T.constant(np.ones((1, frames, 1)))
        g_tiled = T.mul(g_rows, ones)  # broadcast to every frame
        x = concat([g_tiled, cond, tau_n], axis=2)
        x = T.add(matmul(x, p["in.w"]), p["in.b"])
        if self.config.use_positional:
            pe = sinusoidal(np.arange(frames), self.config.d_model)
            x = T.add(x, T.constant(pe[None, :, :]))

        e = self.embed_noise_and_text(levels, token_ids)  # (B,d)
        e_tok = T.reshape(e, (B, 1, self.config.d_model))
        x = concat([e_tok, x], axis=1)  # (B,T+1,d)

        for i in range(self.config.layers):
            x = self._block(x, i)
        x = layer_norm(x, p["final_ln.g"], p["final_ln.b"])
        frames_only = x[:, 1:, :]
        return T.add(matmul(frames_only, p["out.w"]), p["out.b"])

    def denoise(self, tau_n, level, cond, g_hat, token_ids):
        """Single-sequence convenience wrapper: (T,131) -> (T,131) array."""
        out = self.forward(
            np.asarray(tau_n)[None],
            [level],
            np.asarray(cond)[None],
            np.asarray(g_hat).reshape(1, -1) if np.asarray(g_hat).ndim == 1 else g_hat,
            [token_ids],
        )
        return out.data[0]
