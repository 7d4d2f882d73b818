"""Native baseline text classifiers.

Two model families, both trained from scratch in float64 with seeded,
bit-reproducible optimization:

* a linear classifier over hashed bag-of-word-n-gram features (optionally
  augmented with the langid character featurizer), trained by SGD with a
  linearly decaying learning rate;
* a stacked 1-D convolutional network (embedding -> conv/ReLU layers ->
  max-over-time pool -> dense/ReLU/dropout -> dense softmax) trained with
  Adam and early stopping on validation F1.

Gradients for both are verified against central finite differences by
gradient_check.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .errors import FormatError, ModelError
from .evaluation import confusion, metrics
from .langid import LidConfig, featurize, fnv1a64

MODEL_MAGIC = b"CSMDL1"

PAD_ID = 0
UNK_ID = 1


@dataclass(frozen=True)
class TextDataset:
    texts: tuple[str, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if not self.texts:
            raise ModelError("dataset is empty")
        if len(self.texts) != len(self.labels):
            raise ModelError("texts and labels differ in length")
        if any(l not in (0, 1) for l in self.labels):
            raise ModelError("labels must be 0 or 1")
        if any(not t.strip() for t in self.texts):
            raise ModelError("dataset contains an empty text")

    def __len__(self):
        return len(self.texts)


def dataset_from_corpus(corpus: Corpus, ids: list[str] | tuple[str, ...]) -> TextDataset:
    """Space-joined token texts for the given utterance ids, in that order."""
    texts, labels = [], []
    for uid in ids:
        u = corpus.by_id(uid)
        texts.append(u.text())
        labels.append(u.label)
    return TextDataset(texts=tuple(texts), labels=tuple(labels))


# --- linear bag-of-n-grams ----------------------------------------------------

@dataclass(frozen=True)
class LinearTextConfig:
    word_ngram_max: int = 2  # 1..3
    embedding_dim: int = 50  # 10 | 50 | 100
    epochs: int = 20  # 5..50
    learning_rate: float = 0.25  # 0.05..1.0
    bucket_count: int = 2**20
    char_features: LidConfig | None = None  # reuse of the langid featurizer
    seed: int = 42

    def __post_init__(self):
        if not 1 <= self.word_ngram_max <= 3:
            raise ModelError("word_ngram_max must be in 1..3")
        if self.embedding_dim not in (10, 50, 100):
            raise ModelError("embedding_dim must be one of 10, 50, 100")
        if not 5 <= self.epochs <= 50:
            raise ModelError("epochs must be in 5..50")
        if not 0.05 <= self.learning_rate <= 1.0:
            raise ModelError("learning_rate must be in 0.05..1.0")
        if self.bucket_count < 1 or self.bucket_count & (self.bucket_count - 1):
            raise ModelError("bucket_count must be a power of two")
        if self.char_features and self.char_features.bucket_count != self.bucket_count:
            raise ModelError("char featurizer must share the model bucket_count")


def text_features(text: str | list[str], cfg: LinearTextConfig) -> list[int]:
    """Hashed word n-gram ids (n=1..word_ngram_max), plus per-word character
    n-grams when a char featurizer is configured."""
    words = text.split() if isinstance(text, str) else list(text)
    ids = []
    for n in range(1, cfg.word_ngram_max + 1):
        for i in range(len(words) - n + 1):
            gram = " ".join(words[i : i + n])
            ids.append(fnv1a64(gram.encode("utf-8")) % cfg.bucket_count)
    if cfg.char_features is not None:
        for w in words:
            ids.extend(featurize(w, cfg.char_features))
    return ids


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def linear_loss_and_grads(
    emb: np.ndarray, out_w: np.ndarray, feats: list[list[int]], labels: list[int]
) -> tuple[float, dict[int, np.ndarray], np.ndarray]:
    """Mean cross-entropy over a batch; embedding grads returned sparsely
    as {row: grad}."""
    total = 0.0
    grad_w = np.zeros_like(out_w)
    grad_rows: dict[int, np.ndarray] = {}
    for ids, y in zip(feats, labels):
        hidden = emb[ids].mean(axis=0)
        probs = _softmax_rows(out_w @ hidden)
        total += -float(np.log(probs[y] + 1e-300))
        dz = probs.copy()
        dz[y] -= 1.0
        grad_w += np.outer(dz, hidden)
        dh = (out_w.T @ dz) / len(ids)
        for i in ids:
            if i in grad_rows:
                grad_rows[i] = grad_rows[i] + dh
            else:
                grad_rows[i] = dh.copy()
    n = len(feats)
    for i in grad_rows:
        grad_rows[i] /= n
    return total / n, grad_rows, grad_w / n


@dataclass
class LinearModel:
    config: LinearTextConfig
    embeddings: np.ndarray  # (bucket_count, dim)
    out_weights: np.ndarray  # (2, dim)
    history: list[dict] = field(default_factory=list)

    kind = "linear-ngram"

    def scores(self, text: str | list[str]) -> np.ndarray | None:
        ids = text_features(text, self.config)
        if not ids:
            return None
        hidden = self.embeddings[ids].mean(axis=0)
        return _softmax_rows(self.out_weights @ hidden)


def _val_metrics(model, val: TextDataset) -> dict:
    preds = [predict(model, t).label for t in val.texts]
    m = metrics(confusion(preds, list(val.labels)))
    return {"val_accuracy": m.accuracy, "val_f1": m.f1}


def train_linear(
    train: TextDataset, val: TextDataset, cfg: LinearTextConfig | None = None
) -> LinearModel:
    """SGD over single examples, seeded shuffle per epoch, learning rate
    decaying linearly to zero. Deterministic per (data, config)."""
    cfg = cfg or LinearTextConfig()
    if len(set(train.labels)) < 2:
        raise ModelError("training set contains a single class")
    feats = [text_features(t, cfg) for t in train.texts]
    rng = np.random.default_rng(cfg.seed)
    dim = cfg.embedding_dim
    emb = rng.uniform(-1.0 / dim, 1.0 / dim, size=(cfg.bucket_count, dim))
    out_w = np.zeros((2, dim))
    model = LinearModel(config=cfg, embeddings=emb, out_weights=out_w)

    total_updates = cfg.epochs * len(train)
    step = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(train))
        epoch_loss = 0.0
        for idx in order:
            ids, y = feats[idx], train.labels[idx]
            lr = cfg.learning_rate * (1.0 - step / total_updates)
            hidden = emb[ids].mean(axis=0)
            probs = _softmax_rows(out_w @ hidden)
            epoch_loss += -float(np.log(probs[y] + 1e-300))
            dz = probs.copy()
            dz[y] -= 1.0
            out_w -= lr * np.outer(dz, hidden)
            np.add.at(emb, ids, -lr * (out_w.T @ dz) / len(ids))
            step += 1
        entry = {"epoch": epoch + 1, "train_loss": epoch_loss / len(train)}
        entry.update(_val_metrics(model, val))
        model.history.append(entry)
    return model


# --- autotune -------------------------------------------------------------------

@dataclass(frozen=True)
class AutotuneResult:
    config: LinearTextConfig
    model: "LinearModel"
    best_val_f1: float
    trial_scores: tuple[float, ...]


def autotune_linear(
    train: TextDataset,
    val: TextDataset,
    trials: int = 100,
    budget_seed: int = 0,
    base: LinearTextConfig | None = None,
) -> AutotuneResult:
    """Seeded random search over the linear config ranges, selecting the
    trial with the best validation F1 and refitting it.

    Trial configs are drawn sequentially from one generator, so a search of
    N trials is a prefix of any longer search with the same budget_seed.
    """
    if trials < 1:
        raise ModelError("trials must be >= 1")
    base = base or LinearTextConfig()
    rng = random.Random(budget_seed)
    best_f1, best_cfg = -1.0, None
    scores = []
    for _ in range(trials):
        cfg = replace(
            base,
            word_ngram_max=rng.choice([1, 2, 3]),
            embedding_dim=rng.choice([10, 50, 100]),
            epochs=rng.randint(5, 50),
            learning_rate=rng.uniform(0.05, 1.0),
            seed=rng.randrange(2**31),
        )
        model = train_linear(train, val, cfg)
        f1 = model.history[-1]["val_f1"]
        scores.append(f1)
        if f1 > best_f1:
            best_f1, best_cfg = f1, cfg
    refit = train_linear(train, val, best_cfg)
    return AutotuneResult(
        config=best_cfg, model=refit, best_val_f1=best_f1, trial_scores=tuple(scores)
    )


# --- CNN ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CnnConfig:
    sequence_length: int = 100
    embedding_dim: int = 300
    conv_layers: int = 3  # 3 for sarcasm, 4 for hate
    filters: int = 128
    kernel_width: int = 3
    hidden_dim: int = 128
    dropout: float = 0.1  # 0.1 sarcasm, 0.2 hate
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    epochs: int = 10
    patience: int = 3
    seed: int = 42

    def __post_init__(self):
        if self.sequence_length < self.kernel_width:
            raise ModelError("sequence_length must be >= kernel_width")
        if min(self.embedding_dim, self.conv_layers, self.filters, self.hidden_dim) < 1:
            raise ModelError("network dimensions must be positive")
        if not 0 <= self.dropout < 1:
            raise ModelError("dropout must lie in [0, 1)")


def build_vocab(texts: tuple[str, ...]) -> dict[str, int]:
    """Train-set vocabulary: id 0 is the frozen pad, 1 the unknown word;
    real words ordered by descending frequency then alphabetically."""
    counts: dict[str, int] = {}
    for t in texts:
        for w in t.split():
            counts[w] = counts.get(w, 0) + 1
    vocab = {"<pad>": PAD_ID, "<unk>": UNK_ID}
    for w in sorted(counts, key=lambda w: (-counts[w], w)):
        vocab[w] = len(vocab)
    return vocab


def encode(text: str | list[str], vocab: dict[str, int], length: int) -> np.ndarray:
    words = text.split() if isinstance(text, str) else list(text)
    ids = [vocab.get(w, UNK_ID) for w in words[:length]]
    ids += [PAD_ID] * (length - len(ids))
    return np.asarray(ids, dtype=np.int64)


def init_cnn_params(cfg: CnnConfig, vocab_size: int, rng: np.random.Generator) -> dict:
    params: dict[str, np.ndarray] = {}
    emb = rng.normal(0.0, 0.1, size=(vocab_size, cfg.embedding_dim))
    emb[PAD_ID] = 0.0
    params["emb"] = emb
    c_in = cfg.embedding_dim
    for l in range(cfg.conv_layers):
        fan_in = cfg.kernel_width * c_in
        params[f"conv{l}_w"] = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, cfg.filters))
        params[f"conv{l}_b"] = np.zeros(cfg.filters)
        c_in = cfg.filters
    params["w1"] = rng.normal(0.0, np.sqrt(2.0 / cfg.filters), size=(cfg.filters, cfg.hidden_dim))
    params["b1"] = np.zeros(cfg.hidden_dim)
    params["w2"] = rng.normal(0.0, np.sqrt(2.0 / cfg.hidden_dim), size=(cfg.hidden_dim, 2))
    params["b2"] = np.zeros(2)
    return params


def _im2col(act: np.ndarray, k: int) -> np.ndarray:
    """(B, L, C) -> (B, L, k*C) windows under same-padding."""
    left = (k - 1) // 2
    right = k - 1 - left
    b, l, c = act.shape
    padded = np.pad(act, ((0, 0), (left, right), (0, 0)))
    return np.concatenate([padded[:, i : i + l, :] for i in range(k)], axis=2)


def _col2im(dwin: np.ndarray, k: int, c: int, l: int) -> np.ndarray:
    left = (k - 1) // 2
    right = k - 1 - left
    b = dwin.shape[0]
    dpad = np.zeros((b, l + k - 1, c))
    for i in range(k):
        dpad[:, i : i + l, :] += dwin[:, :, i * c : (i + 1) * c]
    return dpad[:, left : left + l, :]


def cnn_forward(
    params: dict,
    cfg: CnnConfig,
    x: np.ndarray,
    dropout_rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, dict]:
    """Returns (probs (B,2), cache). Dropout is applied only when a
    generator is passed (training mode)."""
    cache: dict = {"x": x}
    act = params["emb"][x]  # (B, L, D)
    cache["emb_out"] = act
    for l in range(cfg.conv_layers):
        win = _im2col(act, cfg.kernel_width)
        z = win @ params[f"conv{l}_w"] + params[f"conv{l}_b"]
        act = np.maximum(z, 0.0)
        cache[f"win{l}"], cache[f"z{l}"] = win, z
    pooled = act.max(axis=1)
    cache["conv_out"], cache["pooled_arg"] = act, act.argmax(axis=1)
    pre1 = pooled @ params["w1"] + params["b1"]
    h1 = np.maximum(pre1, 0.0)
    cache["pooled"], cache["pre1"] = pooled, pre1
    if dropout_rng is not None and cfg.dropout > 0:
        mask = (dropout_rng.random(h1.shape) >= cfg.dropout) / (1.0 - cfg.dropout)
        h1 = h1 * mask
        cache["drop_mask"] = mask
    cache["h1"] = h1
    logits = h1 @ params["w2"] + params["b2"]
    return _softmax_rows(logits), cache


def cnn_loss_and_grads(
    params: dict,
    cfg: CnnConfig,
    x: np.ndarray,
    y: np.ndarray,
    dropout_rng: np.random.Generator | None = None,
) -> tuple[float, dict]:
    probs, cache = cnn_forward(params, cfg, x, dropout_rng)
    b = x.shape[0]
    loss = -float(np.mean(np.log(probs[np.arange(b), y] + 1e-300)))
    grads: dict[str, np.ndarray] = {}

    dlogits = probs.copy()
    dlogits[np.arange(b), y] -= 1.0
    dlogits /= b
    grads["w2"] = cache["h1"].T @ dlogits
    grads["b2"] = dlogits.sum(axis=0)
    dh1 = dlogits @ params["w2"].T
    if "drop_mask" in cache:
        dh1 = dh1 * cache["drop_mask"]
    dpre1 = dh1 * (cache["pre1"] > 0)
    grads["w1"] = cache["pooled"].T @ dpre1
    grads["b1"] = dpre1.sum(axis=0)
    dpooled = dpre1 @ params["w1"].T  # (B, F)

    # un-pool: gradient flows to the argmax position of each filter
    dact = np.zeros_like(cache["conv_out"])
    b_idx = np.arange(b)[:, None]
    f_idx = np.arange(cfg.filters)[None, :]
    dact[b_idx, cache["pooled_arg"], f_idx] = dpooled

    for l in reversed(range(cfg.conv_layers)):
        dz = dact * (cache[f"z{l}"] > 0)
        grads[f"conv{l}_w"] = np.einsum("blk,blf->kf", cache[f"win{l}"], dz)
        grads[f"conv{l}_b"] = dz.sum(axis=(0, 1))
        dwin = dz @ params[f"conv{l}_w"].T
        c_in = cfg.embedding_dim if l == 0 else cfg.filters
        dact = _col2im(dwin, cfg.kernel_width, c_in, x.shape[1])

    demb = np.zeros_like(params["emb"])
    np.add.at(demb, x, dact)
    demb[PAD_ID] = 0.0  # pad embedding is frozen
    grads["emb"] = demb
    return loss, grads


@dataclass
class CnnModel:
    config: CnnConfig
    vocab: dict[str, int]
    params: dict[str, np.ndarray]
    history: list[dict] = field(default_factory=list)

    kind = "cnn"

    def scores(self, text: str | list[str]) -> np.ndarray | None:
        words = text.split() if isinstance(text, str) else list(text)
        if not words:
            return None
        x = encode(words, self.vocab, self.config.sequence_length)[None, :]
        probs, _ = cnn_forward(self.params, self.config, x)
        return probs[0]


def train_cnn(
    train: TextDataset, val: TextDataset, cfg: CnnConfig | None = None
) -> CnnModel:
    """Mini-batch Adam with early stopping on validation F1; the returned
    parameters are the best-epoch snapshot. Deterministic per (data, config):
    batch order and dropout both come from the seeded generator."""
    cfg = cfg or CnnConfig()
    if len(set(train.labels)) < 2:
        raise ModelError("training set contains a single class")
    vocab = build_vocab(train.texts)
    x_train = np.stack([encode(t, vocab, cfg.sequence_length) for t in train.texts])
    y_train = np.asarray(train.labels, dtype=np.int64)

    rng = np.random.default_rng(cfg.seed)
    params = init_cnn_params(cfg, len(vocab), rng)
    model = CnnModel(config=cfg, vocab=vocab, params=params)

    adam_m = {k: np.zeros_like(v) for k, v in params.items()}
    adam_v = {k: np.zeros_like(v) for k, v in params.items()}
    t = 0
    best_f1, best_params, bad_epochs = -1.0, None, 0

    for epoch in range(cfg.epochs):
        order = rng.permutation(len(train))
        epoch_loss, seen = 0.0, 0
        for start in range(0, len(train), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, grads = cnn_loss_and_grads(
                params, cfg, x_train[idx], y_train[idx], dropout_rng=rng
            )
            epoch_loss += loss * len(idx)
            seen += len(idx)
            t += 1
            for k, g in grads.items():
                adam_m[k] = cfg.beta1 * adam_m[k] + (1 - cfg.beta1) * g
                adam_v[k] = cfg.beta2 * adam_v[k] + (1 - cfg.beta2) * g * g
                m_hat = adam_m[k] / (1 - cfg.beta1**t)
                v_hat = adam_v[k] / (1 - cfg.beta2**t)
                params[k] -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
            params["emb"][PAD_ID] = 0.0
        entry = {"epoch": epoch + 1, "train_loss": epoch_loss / seen}
        entry.update(_val_metrics(model, val))
        model.history.append(entry)
        if entry["val_f1"] > best_f1 + 1e-12:
            best_f1 = entry["val_f1"]
            best_params = {k: v.copy() for k, v in params.items()}
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= cfg.patience:
                break
    if best_params is not None:
        model.params = best_params
    return model


# --- prediction ----------------------------------------------------------------------

@dataclass(frozen=True)
class Prediction:
    label: int
    score: float  # positive-class probability
    degenerate: bool = False  # empty input fallback


def predict(model: LinearModel | CnnModel, text: str | list[str]) -> Prediction:
    """Positive-class probability and argmax label (ties break toward 0).
    Empty input falls back to (0, 0.5) with the degenerate flag raised."""
    probs = model.scores(text)
    if probs is None:
        return Prediction(label=0, score=0.5, degenerate=True)
    label = int(np.argmax(probs))
    return Prediction(label=label, score=float(probs[1]))


# --- gradient check --------------------------------------------------------------------

def gradient_check(
    kind: str,
    cfg,
    probe: TextDataset,
    n_coords: int = 200,
    step: float = 1e-5,
    seed: int = 0,
) -> float:
    """Max relative error between analytic gradients and central finite
    differences over a random sample of trainable coordinates. Runs at a
    random (seeded) parameter point with dropout disabled."""
    if len(probe) > 8:
        raise ModelError("probe batch must hold at most 8 items")
    rng = np.random.default_rng(seed)
    labels = list(probe.labels)

    if kind == "linear":
        feats = [text_features(t, cfg) for t in probe.texts]
        emb = rng.uniform(-1.0 / cfg.embedding_dim, 1.0 / cfg.embedding_dim,
                          size=(cfg.bucket_count, cfg.embedding_dim))
        out_w = rng.normal(0.0, 0.5, size=(2, cfg.embedding_dim))

        def loss_fn():
            return linear_loss_and_grads(emb, out_w, feats, labels)[0]

        _, grad_rows, grad_w = linear_loss_and_grads(emb, out_w, feats, labels)
        touched = sorted(grad_rows)
        coords = []
        for _ in range(n_coords):
            if rng.random() < 0.5:
                r = touched[rng.integers(len(touched))]
                j = int(rng.integers(cfg.embedding_dim))
                coords.append((emb, (r, j), grad_rows[r][j]))
            else:
                i = int(rng.integers(2))
                j = int(rng.integers(cfg.embedding_dim))
                coords.append((out_w, (i, j), grad_w[i, j]))
    elif kind == "cnn":
        vocab = build_vocab(probe.texts)
        x = np.stack([encode(t, vocab, cfg.sequence_length) for t in probe.texts])
        y = np.asarray(labels, dtype=np.int64)
        params = init_cnn_params(cfg, len(vocab), rng)
        # a generic point: zero biases would pin every pad-window
        # pre-activation exactly on the ReLU kink, where one-sided numeric
        # derivatives are meaningless
        for name in params:
            if name.endswith("_b") or name in ("b1", "b2"):
                params[name] = rng.normal(0.0, 0.1, size=params[name].shape)

        def loss_fn():
            return cnn_loss_and_grads(params, cfg, x, y)[0]

        _, grads = cnn_loss_and_grads(params, cfg, x, y)
        names = sorted(params)
        coords = []
        while len(coords) < n_coords:
            name = names[rng.integers(len(names))]
            arr = params[name]
            flat = int(rng.integers(arr.size))
            idx = np.unravel_index(flat, arr.shape)
            if name == "emb" and idx[0] == PAD_ID:
                continue  # frozen row is not a trainable coordinate
            coords.append((arr, idx, grads[name][idx]))
    else:
        raise ModelError(f"unknown model kind {kind!r}")

    worst = 0.0
    for arr, idx, analytic in coords:
        orig = arr[idx]
        arr[idx] = orig + step
        up = loss_fn()
        arr[idx] = orig - step
        down = loss_fn()
        arr[idx] = orig
        numeric = (up - down) / (2 * step)
        rel = abs(numeric - analytic) / max(abs(numeric), abs(analytic), 1e-8)
        worst = max(worst, rel)
    return worst


# --- serialization ------------------------------------------------------------------------

def save_model(model: LinearModel | CnnModel, path: str | Path) -> None:
    if model.kind == "linear-ngram":
        cfg = asdict(model.config)
        if model.config.char_features is not None:
            cfg["char_features"] = asdict(model.config.char_features)
        header = {
            "version": 1,
            "kind": model.kind,
            "config": cfg,
            "history": model.history,
            "tensors": [
                {"name": "embeddings", "shape": list(model.embeddings.shape)},
                {"name": "out_weights", "shape": list(model.out_weights.shape)},
            ],
        }
        tensors = [model.embeddings, model.out_weights]
    else:
        header = {
            "version": 1,
            "kind": model.kind,
            "config": asdict(model.config),
            "vocab": model.vocab,
            "history": model.history,
            "tensors": [
                {"name": k, "shape": list(model.params[k].shape)}
                for k in sorted(model.params)
            ],
        }
        tensors = [model.params[k] for k in sorted(model.params)]
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MODEL_MAGIC)
        f.write(len(blob).to_bytes(4, "little"))
        f.write(blob)
        for t in tensors:
            f.write(np.ascontiguousarray(t, dtype="<f8").tobytes())


def load_model(path: str | Path) -> LinearModel | CnnModel:
    with open(path, "rb") as f:
        if f.read(len(MODEL_MAGIC)) != MODEL_MAGIC:
            raise FormatError(f"{path}: not a {MODEL_MAGIC.decode()} model file")
        n = int.from_bytes(f.read(4), "little")
        header = json.loads(f.read(n).decode("utf-8"))
        tensors = {}
        for entry in header["tensors"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            tensors[entry["name"]] = (
                np.frombuffer(f.read(8 * count), dtype="<f8").reshape(shape).copy()
            )
    if header["kind"] == "linear-ngram":
        cfg_dict = dict(header["config"])
        if cfg_dict.get("char_features"):
            cfg_dict["char_features"] = LidConfig(**cfg_dict["char_features"])
        cfg = LinearTextConfig(**cfg_dict)
        return LinearModel(
            config=cfg,
            embeddings=tensors["embeddings"],
            out_weights=tensors["out_weights"],
            history=header.get("history", []),
        )
    if header["kind"] == "cnn":
        cfg = CnnConfig(**header["config"])
        return CnnModel(
            config=cfg,
            vocab=header["vocab"],
            params=tensors,
            history=header.get("history", []),
        )
    raise FormatError(f"{path}: unknown model kind {header['kind']!r}")
