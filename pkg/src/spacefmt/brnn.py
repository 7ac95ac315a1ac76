"""Bidirectional recurrent classifier over the interleaved stream.

For the slot before token i, a forward GRU digests the interleaved
(label, token) ids strictly to the left, and a backward GRU digests the
token ids only from the window end back down to token i; right-side labels
never enter the computation. The two hidden states are concatenated and fed
through a linear layer and softmax over the label vocabulary.

Training minimizes mean cross-entropy at the label slots with gradients
derived by hand (reverse-mode through the softmax, both GRUs, and the
embeddings), an Adam-style optimizer, and global-norm gradient clipping.
Documents are cut into overlapping windows and only interior slots of each
window contribute loss. Everything runs in 64-bit floats.
"""

from __future__ import annotations

import copy
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import EncodedDocument, LabelVocabulary, Vocabulary
from .errors import DivergenceError, ModelIoError, ParityError
from .model_io import (
    Reader,
    pack_label_vocab,
    pack_vocab,
    read_magic,
    unpack_label_vocab,
    unpack_vocab,
)

DEFAULT_D_EMB = 64
DEFAULT_D_HIDDEN = 128

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8

_MAGIC = b"SFBR"
_VERSION = 1


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 1e-3
    gradient_clip_norm: float = 5.0
    max_epochs: int = 30
    early_stop_patience: int = 3
    segment_length: int = 256  # stream items per window (two per token)
    segment_overlap: int = 32  # stream items shared between windows
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.gradient_clip_norm <= 0:
            raise ValueError("gradient clip norm must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")
        if self.early_stop_patience < 0:
            raise ValueError("patience must be non-negative")
        if self.segment_length < 2:
            raise ValueError("segment length must be at least 2")
        if not 0 <= self.segment_overlap < self.segment_length:
            raise ValueError("segment overlap must be smaller than the segment length")
        if self.batch_size < 1:
            raise ValueError("batch size must be at least 1")


@dataclass
class GruCell:
    w_z: np.ndarray
    w_r: np.ndarray
    w_h: np.ndarray
    u_z: np.ndarray
    u_r: np.ndarray
    u_h: np.ndarray
    b_z: np.ndarray
    b_r: np.ndarray
    b_h: np.ndarray


@dataclass
class BrnnModel:
    d_emb: int
    d_hidden: int
    seed: int
    vocab: Vocabulary
    label_vocab: LabelVocabulary
    token_emb: np.ndarray
    label_emb: np.ndarray
    fwd: GruCell
    bwd: GruCell
    w_out: np.ndarray
    b_out: np.ndarray

    def params(self) -> list[tuple[str, np.ndarray]]:
        """Named parameter tensors in the fixed serialization order."""
        out = [("token_emb", self.token_emb), ("label_emb", self.label_emb)]
        for prefix, cell in (("fwd", self.fwd), ("bwd", self.bwd)):
            for field in ("w_z", "w_r", "w_h", "u_z", "u_r", "u_h", "b_z", "b_r", "b_h"):
                out.append((f"{prefix}.{field}", getattr(cell, field)))
        out.append(("w_out", self.w_out))
        out.append(("b_out", self.b_out))
        return out

    def set_param(self, name: str, value: np.ndarray) -> None:
        if "." in name:
            prefix, field = name.split(".", 1)
            setattr(getattr(self, prefix), field, value)
        else:
            setattr(self, name, value)

    def copy(self) -> "BrnnModel":
        clone = copy.copy(self)
        clone.token_emb = self.token_emb.copy()
        clone.label_emb = self.label_emb.copy()
        clone.fwd = GruCell(**{k: v.copy() for k, v in vars(self.fwd).items()})
        clone.bwd = GruCell(**{k: v.copy() for k, v in vars(self.bwd).items()})
        clone.w_out = self.w_out.copy()
        clone.b_out = self.b_out.copy()
        return clone

    def predict_all(self, enc: EncodedDocument) -> np.ndarray:
        return predict_all(self, enc)

    def predict_distribution(self, enc: EncodedDocument, slot: int) -> np.ndarray:
        return predict_distribution(self, enc, slot)


def _uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def _init_cell(rng: np.random.Generator, d_in: int, d_h: int) -> GruCell:
    return GruCell(
        w_z=_uniform(rng, (d_in, d_h), d_in),
        w_r=_uniform(rng, (d_in, d_h), d_in),
        w_h=_uniform(rng, (d_in, d_h), d_in),
        u_z=_uniform(rng, (d_h, d_h), d_h),
        u_r=_uniform(rng, (d_h, d_h), d_h),
        u_h=_uniform(rng, (d_h, d_h), d_h),
        b_z=np.zeros(d_h),
        b_r=np.zeros(d_h),
        b_h=np.zeros(d_h),
    )


def init_brnn(
    vocab: Vocabulary,
    label_vocab: LabelVocabulary,
    d_emb: int = DEFAULT_D_EMB,
    d_hidden: int = DEFAULT_D_HIDDEN,
    seed: int = 0,
) -> BrnnModel:
    """Seeded initialization: uniform weights scaled by 1/sqrt(fan-in), zero biases."""
    if d_emb < 1 or d_hidden < 1:
        raise ValueError("embedding and hidden sizes must be positive")
    rng = np.random.default_rng(int(seed) & ((1 << 64) - 1))
    n_tokens = len(vocab)
    n_labels = len(label_vocab)
    return BrnnModel(
        d_emb=d_emb,
        d_hidden=d_hidden,
        seed=int(seed),
        vocab=vocab,
        label_vocab=label_vocab,
        token_emb=_uniform(rng, (n_tokens, d_emb), n_tokens),
        label_emb=_uniform(rng, (n_labels, d_emb), n_labels),
        fwd=_init_cell(rng, d_emb, d_hidden),
        bwd=_init_cell(rng, d_emb, d_hidden),
        w_out=_uniform(rng, (2 * d_hidden, n_labels), 2 * d_hidden),
        b_out=np.zeros(n_labels),
    )


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500.0, 500.0)))


def _gru_step(cell: GruCell, h: np.ndarray, x: np.ndarray):
    """One GRU step over a batch; returns the new state and a backprop cache."""
    az = x @ cell.w_z + h @ cell.u_z + cell.b_z
    ar = x @ cell.w_r + h @ cell.u_r + cell.b_r
    z = _sigmoid(az)
    r = _sigmoid(ar)
    rh = r * h
    ah = x @ cell.w_h + rh @ cell.u_h + cell.b_h
    hbar = np.tanh(ah)
    h_new = (1.0 - z) * h + z * hbar
    return h_new, (h, x, z, r, hbar, rh)


def _gru_step_back(cell: GruCell, grads: dict, prefix: str, cache, dh_new: np.ndarray):
    """Reverse one GRU step; returns gradients w.r.t. the previous state and input."""
    h, x, z, r, hbar, rh = cache
    dz = dh_new * (hbar - h)
    dhbar = dh_new * z
    dh = dh_new * (1.0 - z)
    daz = dz * z * (1.0 - z)
    dah = dhbar * (1.0 - hbar * hbar)
    drh = dah @ cell.u_h.T
    dr = drh * h
    dh = dh + drh * r
    dar = dr * r * (1.0 - r)
    dh = dh + daz @ cell.u_z.T + dar @ cell.u_r.T
    dx = daz @ cell.w_z.T + dar @ cell.w_r.T + dah @ cell.w_h.T
    grads[f"{prefix}.w_z"] += x.T @ daz
    grads[f"{prefix}.w_r"] += x.T @ dar
    grads[f"{prefix}.w_h"] += x.T @ dah
    grads[f"{prefix}.u_z"] += h.T @ daz
    grads[f"{prefix}.u_r"] += h.T @ dar
    grads[f"{prefix}.u_h"] += rh.T @ dah
    grads[f"{prefix}.b_z"] += daz.sum(axis=0)
    grads[f"{prefix}.b_r"] += dar.sum(axis=0)
    grads[f"{prefix}.b_h"] += dah.sum(axis=0)
    return dh, dx


def _forward_windows(
    model: BrnnModel,
    lab_ids: np.ndarray,
    tok_ids: np.ndarray,
    lengths: np.ndarray,
    keep_caches: bool,
):
    """Run both directions over a batch of windows.

    Positions past a window's length are padding; their states are computed
    but never read, and padding never influences a real slot because the
    reversed token inputs are packed from each window's true end.
    """
    batch, width = tok_ids.shape
    d_h = model.d_hidden
    lab_x = model.label_emb[lab_ids]
    tok_x = model.token_emb[tok_ids]

    left = np.empty((batch, width, d_h))
    fwd_caches = [] if keep_caches else None
    h = np.zeros((batch, d_h))
    for j in range(width):
        left[:, j] = h
        h, cache_lab = _gru_step(model.fwd, h, lab_x[:, j])
        h, cache_tok = _gru_step(model.fwd, h, tok_x[:, j])
        if keep_caches:
            fwd_caches.append((cache_lab, cache_tok))

    # Reversed token ids, padded with UNK past each window's length; the pad
    # rows receive zero gradient because no loss flows through them.
    offsets = lengths[:, None] - 1 - np.arange(width)[None, :]
    rev_ids = tok_ids[np.arange(batch)[:, None], np.clip(offsets, 0, width - 1)]
    rev_ids = np.where(offsets < 0, 0, rev_ids)
    rev_x = model.token_emb[rev_ids]

    b_states = np.empty((width + 1, batch, d_h))
    b_states[0] = 0.0
    bwd_caches = [] if keep_caches else None
    b = np.zeros((batch, d_h))
    for m in range(width):
        b, cache = _gru_step(model.bwd, b, rev_x[:, m])
        b_states[m + 1] = b
        if keep_caches:
            bwd_caches.append(cache)

    # Right state for slot j is the backward state after consuming tokens
    # length-1 down to j, i.e. b_states[length - j].
    gather = np.clip(lengths[:, None] - np.arange(width)[None, :], 0, width)
    right = b_states[gather, np.arange(batch)[:, None], :]

    concat = np.concatenate([left, right], axis=2)
    logits = concat @ model.w_out + model.b_out
    state = {
        "lab_ids": lab_ids,
        "tok_ids": tok_ids,
        "rev_ids": rev_ids,
        "gather": gather,
        "concat": concat,
        "fwd_caches": fwd_caches,
        "bwd_caches": bwd_caches,
    }
    return logits, state


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    peak = logits.max(axis=-1, keepdims=True)
    shifted = logits - peak
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def _window_loss(
    model: BrnnModel,
    lab_ids: np.ndarray,
    tok_ids: np.ndarray,
    lengths: np.ndarray,
    counted: np.ndarray,
    compute_grads: bool,
):
    """Mean cross-entropy over the counted slots, optionally with gradients."""
    batch, width = tok_ids.shape
    logits, state = _forward_windows(model, lab_ids, tok_ids, lengths, compute_grads)
    logp = _log_softmax(logits)
    rows = np.arange(batch)[:, None]
    cols = np.arange(width)[None, :]
    slot_losses = -logp[rows, cols, lab_ids]
    n_counted = int(counted.sum())
    if n_counted == 0:
        raise ValueError("no counted slots in this batch")
    loss = float((slot_losses * counted).sum() / n_counted)
    if not compute_grads:
        return loss, None, n_counted

    grads = {name: np.zeros_like(tensor) for name, tensor in model.params()}
    dlogits = np.exp(logp)
    dlogits[rows, cols, lab_ids] -= 1.0
    dlogits *= (counted / n_counted)[:, :, None]

    d_h = model.d_hidden
    concat = state["concat"]
    grads["w_out"] += concat.reshape(-1, 2 * d_h).T @ dlogits.reshape(-1, len(model.label_vocab))
    grads["b_out"] += dlogits.sum(axis=(0, 1))
    dconcat = dlogits @ model.w_out.T
    dleft = dconcat[:, :, :d_h]
    dright = dconcat[:, :, d_h:]

    # Backward GRU: scatter each slot's head gradient onto the state it read,
    # then unroll the chain from the window end.
    db_states = np.zeros((width + 1, batch, d_h))
    np.add.at(db_states, (state["gather"], rows), dright)
    db = np.zeros((batch, d_h))
    drev_x = np.empty((batch, width, model.d_emb))
    for m in range(width - 1, -1, -1):
        db = db + db_states[m + 1]
        db, dx = _gru_step_back(model.bwd, grads, "bwd", state["bwd_caches"][m], db)
        drev_x[:, m] = dx

    # Forward GRU: each slot reads the state just before its own label step.
    df = np.zeros((batch, d_h))
    dlab_x = np.empty((batch, width, model.d_emb))
    dtok_x = np.empty((batch, width, model.d_emb))
    for j in range(width - 1, -1, -1):
        cache_lab, cache_tok = state["fwd_caches"][j]
        df, dx = _gru_step_back(model.fwd, grads, "fwd", cache_tok, df)
        dtok_x[:, j] = dx
        df, dx = _gru_step_back(model.fwd, grads, "fwd", cache_lab, df)
        dlab_x[:, j] = dx
        df = df + dleft[:, j]

    d_e = model.d_emb
    np.add.at(grads["token_emb"], state["tok_ids"].reshape(-1), dtok_x.reshape(-1, d_e))
    np.add.at(grads["token_emb"], state["rev_ids"].reshape(-1), drev_x.reshape(-1, d_e))
    np.add.at(grads["label_emb"], state["lab_ids"].reshape(-1), dlab_x.reshape(-1, d_e))
    return loss, grads, n_counted


def predict_all(model: BrnnModel, enc: EncodedDocument) -> np.ndarray:
    """Label distributions for every slot, teacher-forced on the document's labels."""
    n = len(enc)
    if n == 0:
        return np.zeros((0, len(model.label_vocab)))
    logits, _ = _forward_windows(
        model,
        enc.label_ids[None, :],
        enc.token_ids[None, :],
        np.array([n]),
        keep_caches=False,
    )
    return np.exp(_log_softmax(logits[0]))


def predict_distribution(model: BrnnModel, enc: EncodedDocument, slot: int) -> np.ndarray:
    """Distribution at one slot of the interleaved stream.

    ``slot`` is a stream position: label slots sit at even positions.
    """
    if slot % 2:
        raise ParityError(f"stream position {slot} is a token position, not a spacing slot")
    i = slot // 2
    if not 0 <= i < len(enc):
        raise ValueError(f"slot {slot} is outside the document")
    return predict_all(model, enc)[i]


def _windows(n_tokens: int, config: TrainingConfig) -> list[tuple[int, int, int, int]]:
    """Cut a document into (start, end, count_from, count_to) windows.

    Consecutive windows overlap; each slot is counted in exactly one window
    and, away from document edges, only at interior positions.
    """
    width = max(1, config.segment_length // 2)
    margin = min(config.segment_overlap // 2, (width - 1) // 2)
    stride = width - 2 * margin
    out = []
    k = 0
    while True:
        start = k * stride
        lo = start + margin if k else 0
        if lo >= n_tokens:
            break
        end = min(start + width, n_tokens)
        hi = end if end == n_tokens else end - margin
        if hi > lo:
            out.append((start, end, lo, hi))
        if end >= n_tokens:
            break
        k += 1
    return out


def _clip_gradients(grads: dict, clip_norm: float) -> None:
    total = 0.0
    for g in grads.values():
        total += float((g * g).sum())
    norm = np.sqrt(total)
    if norm > clip_norm:
        scale = clip_norm / norm
        for g in grads.values():
            g *= scale


def _top1_accuracy(model: BrnnModel, encs: list[EncodedDocument]) -> float:
    correct = 0
    total = 0
    for enc in encs:
        probs = predict_all(model, enc)
        picks = probs.argmax(axis=1)  # argmax takes the lowest id on ties
        correct += int(((picks == enc.label_ids) & ~enc.label_oov).sum())
        total += len(enc)
    return correct / total if total else 0.0


def train_brnn(
    model: BrnnModel,
    train_docs: list[EncodedDocument],
    val_docs: list[EncodedDocument],
    config: TrainingConfig = TrainingConfig(),
    progress=None,
) -> tuple[BrnnModel, list[tuple[float, float]]]:
    """Train a copy of the model; return the best snapshot plus history.

    The input model is left untouched. History holds one (train_loss,
    val_accuracy) pair per epoch. Training stops once validation accuracy
    has failed to improve for ``early_stop_patience`` consecutive epochs
    (patience 0 stops at the first non-improving epoch). Without validation
    documents the (negated) training loss stands in for accuracy.
    ``progress``, when given, is called as ``progress(epoch, train_loss,
    val_accuracy)`` after each epoch.
    """
    if not train_docs:
        raise ValueError("cannot train without training documents")
    model = model.copy()
    rng = np.random.default_rng(int(config.seed) & ((1 << 64) - 1))
    adam_m = {name: np.zeros_like(t) for name, t in model.params()}
    adam_v = {name: np.zeros_like(t) for name, t in model.params()}
    step = 0

    width = max(1, config.segment_length // 2)
    history: list[tuple[float, float]] = []
    best_metric = -np.inf
    best_model = model.copy()
    since_best = 0

    for _epoch in range(config.max_epochs):
        order = rng.permutation(len(train_docs))
        pending: list[tuple[EncodedDocument, tuple[int, int, int, int]]] = []
        loss_sum = 0.0
        loss_slots = 0

        def flush(batch):
            nonlocal step, loss_sum, loss_slots
            if not batch:
                return
            b = len(batch)
            lab = np.zeros((b, width), dtype=np.int64)
            tok = np.zeros((b, width), dtype=np.int64)
            lengths = np.zeros(b, dtype=np.int64)
            counted = np.zeros((b, width), dtype=np.float64)
            for row, (enc, (start, end, lo, hi)) in enumerate(batch):
                span = end - start
                lab[row, :span] = enc.label_ids[start:end]
                tok[row, :span] = enc.token_ids[start:end]
                lengths[row] = span
                counted[row, lo - start : hi - start] = 1.0
            loss, grads, n_counted = _window_loss(model, lab, tok, lengths, counted, True)
            if not np.isfinite(loss):
                raise DivergenceError(f"training loss became {loss}")
            _clip_gradients(grads, config.gradient_clip_norm)
            step += 1
            bias1 = 1.0 - _ADAM_BETA1**step
            bias2 = 1.0 - _ADAM_BETA2**step
            for name, tensor in model.params():
                g = grads[name]
                adam_m[name] = _ADAM_BETA1 * adam_m[name] + (1 - _ADAM_BETA1) * g
                adam_v[name] = _ADAM_BETA2 * adam_v[name] + (1 - _ADAM_BETA2) * g * g
                tensor -= config.learning_rate * (adam_m[name] / bias1) / (
                    np.sqrt(adam_v[name] / bias2) + _ADAM_EPS
                )
            loss_sum += loss * n_counted
            loss_slots += n_counted

        for doc_idx in order:
            enc = train_docs[doc_idx]
            for window in _windows(len(enc), config):
                pending.append((enc, window))
                if len(pending) == config.batch_size:
                    flush(pending)
                    pending = []
        flush(pending)

        train_loss = loss_sum / loss_slots if loss_slots else 0.0
        if not np.isfinite(train_loss):
            raise DivergenceError(f"training loss became {train_loss}")
        for name, tensor in model.params():
            if not np.isfinite(tensor).all():
                raise DivergenceError(f"parameter {name} became non-finite")

        if val_docs:
            val_acc = _top1_accuracy(model, val_docs)
            metric = val_acc
        else:
            val_acc = float("nan")
            metric = -train_loss
        history.append((train_loss, val_acc))
        if progress is not None:
            progress(len(history), train_loss, val_acc)

        if metric > best_metric:
            best_metric = metric
            best_model = model.copy()
            since_best = 0
        else:
            since_best += 1
            if since_best >= max(1, config.early_stop_patience):
                break

    return best_model, history


def gradient_check(
    model: BrnnModel,
    enc: EncodedDocument,
    slot: int,
    epsilon: float = 1e-5,
    samples: int = 200,
    seed: int = 0,
) -> float:
    """Compare analytic slot-loss gradients against central differences.

    Samples at least ``samples`` coordinates spread over every parameter
    tensor and returns the worst relative error
    |g_a - g_fd| / max(1e-8, |g_a| + |g_fd|).
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValueError("epsilon must lie in [1e-7, 1e-3]")
    if slot % 2:
        raise ParityError(f"stream position {slot} is a token position, not a spacing slot")
    i = slot // 2
    n = len(enc)
    if not 0 <= i < n:
        raise ValueError(f"slot {slot} is outside the document")
    lab = enc.label_ids[None, :]
    tok = enc.token_ids[None, :]
    lengths = np.array([n])
    counted = np.zeros((1, n))
    counted[0, i] = 1.0

    _, grads, _ = _window_loss(model, lab, tok, lengths, counted, True)

    def loss_only() -> float:
        value, _, _ = _window_loss(model, lab, tok, lengths, counted, False)
        return value

    tensors = model.params()
    total_size = sum(t.size for _, t in tensors)
    rng = np.random.default_rng(int(seed) & ((1 << 64) - 1))
    worst = 0.0
    for name, tensor in tensors:
        share = max(3, int(np.ceil(samples * tensor.size / total_size)))
        share = min(share, tensor.size)
        coords = rng.choice(tensor.size, size=share, replace=False)
        for coord in coords:
            original = tensor.flat[coord]
            tensor.flat[coord] = original + epsilon
            plus = loss_only()
            tensor.flat[coord] = original - epsilon
            minus = loss_only()
            tensor.flat[coord] = original
            fd = (plus - minus) / (2.0 * epsilon)
            ana = grads[name].flat[coord]
            err = abs(ana - fd) / max(1e-8, abs(ana) + abs(fd))
            worst = max(worst, err)
    return worst


def save_brnn(model: BrnnModel, path: str | Path) -> None:
    parts = [
        _MAGIC,
        struct.pack(
            "<HIIQ", _VERSION, model.d_emb, model.d_hidden, model.seed & ((1 << 64) - 1)
        ),
        pack_vocab(model.vocab),
        pack_label_vocab(model.label_vocab),
    ]
    for _, tensor in model.params():
        parts.append(np.ascontiguousarray(tensor, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_brnn(path: str | Path) -> BrnnModel:
    data = Path(path).read_bytes()
    name = str(path)
    if read_magic(data, name) != _MAGIC:
        raise ModelIoError(f"{name} is not a recurrent model file")
    reader = Reader(data, name)
    reader.take(4)
    version, d_emb, d_hidden, seed = reader.unpack("<HIIQ")
    if version != _VERSION:
        raise ModelIoError(f"{name} has unsupported version {version}")
    if d_emb < 1 or d_hidden < 1:
        raise ModelIoError(f"{name} has bad dimensions")
    vocab = unpack_vocab(reader)
    label_vocab = unpack_label_vocab(reader)
    model = init_brnn(vocab, label_vocab, d_emb, d_hidden, seed=0)
    model.seed = seed
    for tensor_name, tensor in model.params():
        blob = reader.take(tensor.size * 8)
        loaded = np.frombuffer(blob, dtype="<f8").reshape(tensor.shape).copy()
        model.set_param(tensor_name, loaded)
    reader.expect_end()
    return model


def greedy_labels(model: BrnnModel, enc: EncodedDocument, allow) -> list[tuple[int, int]]:
    """Predict every slot left to right, feeding predictions back in.

    The right context is token-only, so it is computed once; the left state
    is rebuilt step by step from the labels chosen so far. ``allow(i, pair)``
    vetoes candidates; if everything is vetoed the spacing falls back to a
    single space.
    """
    n = len(enc)
    if n == 0:
        return []
    rev_x = model.token_emb[enc.token_ids[::-1]]
    b_states = np.empty((n + 1, model.d_hidden))
    b_states[0] = 0.0
    b = np.zeros((1, model.d_hidden))
    for m in range(n):
        b, _ = _gru_step(model.bwd, b, rev_x[m][None, :])
        b_states[m + 1] = b[0]

    labels = model.label_vocab.labels
    ids = np.arange(len(labels))
    out: list[tuple[int, int]] = []
    h = np.zeros((1, model.d_hidden))
    for i in range(n):
        features = np.concatenate([h[0], b_states[n - i]])
        logits = features @ model.w_out + model.b_out
        probs = np.exp(_log_softmax(logits))
        ranked = np.lexsort((ids, -probs))
        chosen: tuple[int, int] | None = None
        chosen_id = model.label_vocab.fallback_id
        for lid in ranked:
            pair = labels[lid]
            if allow(i, pair):
                chosen = pair
                chosen_id = int(lid)
                break
        if chosen is None:
            chosen = (0, 1)
            spacer = model.label_vocab.id_of(chosen)
            chosen_id = model.label_vocab.fallback_id if spacer is None else spacer
        out.append(chosen)
        h, _ = _gru_step(model.fwd, h, model.label_emb[chosen_id][None, :])
        h, _ = _gru_step(model.fwd, h, model.token_emb[enc.token_ids[i]][None, :])
    return out
