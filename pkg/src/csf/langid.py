"""Token-level language identification.

Deterministic pattern overrides (non-word kinds, Devanagari script) sit in
front of a trainable classifier: hashed character n-grams are looked up in
an embedding table, averaged, and pushed through a linear softmax over
[hi, en, other]. Trained with plain SGD, learning rate decaying linearly
to zero over the run.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .corpus import Corpus, DEVANAGARI_END, DEVANAGARI_START, Lang, Token, TokenKind
from .errors import FormatError, LangidError

log = logging.getLogger(__name__)

LABELS = (Lang.HI, Lang.EN, Lang.OTHER)
MODEL_MAGIC = b"CSLID1"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """FNV-1a over bytes, 64-bit."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class LidConfig:
    char_ngram_min: int = 2
    char_ngram_max: int = 5
    include_whole_token: bool = True
    embedding_dim: int = 16
    bucket_count: int = 2**20
    epochs: int = 10
    learning_rate: float = 0.1  # decays linearly to 0
    seed: int = 42

    def __post_init__(self):
        if not (1 <= self.char_ngram_min <= self.char_ngram_max <= 8):
            raise LangidError("require 1 <= ngram_min <= ngram_max <= 8")
        if self.embedding_dim < 1:
            raise LangidError("embedding_dim must be >= 1")
        if self.bucket_count < 1 or self.bucket_count & (self.bucket_count - 1):
            raise LangidError("bucket_count must be a power of two")


def featurize(token_text: str, cfg: LidConfig) -> list[int]:
    """Hashed feature ids for one token.

    Character n-grams of "^"+text+"$" for every n in the configured range,
    emitted by start position then n, plus a whole-token feature when
    enabled. Hash is FNV-1a 64-bit modulo the bucket count.
    """
    if not token_text:
        raise LangidError("cannot featurize an empty token")
    padded = "^" + token_text + "$"
    ids = []
    for pos in range(len(padded)):
        for n in range(cfg.char_ngram_min, cfg.char_ngram_max + 1):
            if pos + n > len(padded):
                break
            gram = padded[pos : pos + n]
            ids.append(fnv1a64(gram.encode("utf-8")) % cfg.bucket_count)
    if cfg.include_whole_token:
        ids.append(fnv1a64(token_text.encode("utf-8")) % cfg.bucket_count)
    return ids


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def loss_and_grad(
    emb: np.ndarray, out_w: np.ndarray, ids: list[int], target: int
) -> tuple[float, np.ndarray, np.ndarray]:
    """Cross-entropy loss for one (token, tag) pair and its gradients.

    Returns (loss, grad wrt the averaged hidden vector, grad wrt out_w).
    The embedding-row gradient is grad_hidden / len(ids) for each id.
    """
    hidden = emb[ids].mean(axis=0)
    probs = _softmax(out_w @ hidden)
    loss = -float(np.log(probs[target] + 1e-300))
    dz = probs.copy()
    dz[target] -= 1.0
    grad_w = np.outer(dz, hidden)
    grad_hidden = out_w.T @ dz
    return loss, grad_hidden, grad_w


@dataclass
class LidModel:
    config: LidConfig
    embeddings: np.ndarray  # (bucket_count, dim)
    out_weights: np.ndarray  # (3, dim)
    labels: tuple[Lang, ...] = LABELS

    def scores(self, token_text: str) -> np.ndarray:
        """Softmax probabilities over (hi, en, other) for one token."""
        ids = featurize(token_text, self.config)
        hidden = self.embeddings[ids].mean(axis=0)
        return _softmax(self.out_weights @ hidden)

    def save(self, path: str | Path) -> None:
        header = {
            "version": 1,
            "config": asdict(self.config),
            "labels": [l.value for l in self.labels],
            "emb_shape": list(self.embeddings.shape),
            "out_shape": list(self.out_weights.shape),
        }
        blob = json.dumps(header).encode("utf-8")
        with open(path, "wb") as f:
            f.write(MODEL_MAGIC)
            f.write(len(blob).to_bytes(4, "little"))
            f.write(blob)
            f.write(np.ascontiguousarray(self.embeddings, dtype="<f8").tobytes())
            f.write(np.ascontiguousarray(self.out_weights, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "LidModel":
        with open(path, "rb") as f:
            magic = f.read(len(MODEL_MAGIC))
            if magic != MODEL_MAGIC:
                raise FormatError(f"{path}: not a {MODEL_MAGIC.decode()} model file")
            n = int.from_bytes(f.read(4), "little")
            header = json.loads(f.read(n).decode("utf-8"))
            cfg = LidConfig(**header["config"])
            emb_shape = tuple(header["emb_shape"])
            out_shape = tuple(header["out_shape"])
            emb = np.frombuffer(
                f.read(8 * emb_shape[0] * emb_shape[1]), dtype="<f8"
            ).reshape(emb_shape)
            out = np.frombuffer(
                f.read(8 * out_shape[0] * out_shape[1]), dtype="<f8"
            ).reshape(out_shape)
        labels = tuple(Lang(v) for v in header["labels"])
        if not np.isfinite(emb).all() or not np.isfinite(out).all():
            raise FormatError(f"{path}: model contains non-finite weights")
        return cls(config=cfg, embeddings=emb.copy(), out_weights=out.copy(), labels=labels)


def train_lid(corpus: Corpus, cfg: LidConfig | None = None) -> LidModel:
    """Fit the identifier on gold (token, tag) pairs from a tagged corpus.

    Deterministic given cfg.seed: pairs are collected in corpus order and
    reshuffled once per epoch by the seeded generator; updates are plain SGD
    with the learning rate decaying linearly to zero across all updates.
    """
    cfg = cfg or LidConfig()
    pairs: list[tuple[list[int], int]] = []
    tags_seen = set()
    for u in corpus:
        for t in u.tokens:
            if t.lang is None:
                raise LangidError(
                    f"utterance {u.id!r}: token {t.text!r} has no gold tag"
                )
            target = LABELS.index(t.lang)
            pairs.append((featurize(t.text, cfg), target))
            tags_seen.add(t.lang)
    if len(tags_seen) < 2:
        raise LangidError("training corpus has a single distinct tag")

    rng = np.random.default_rng(cfg.seed)
    dim = cfg.embedding_dim
    emb = rng.uniform(-1.0 / dim, 1.0 / dim, size=(cfg.bucket_count, dim))
    out_w = np.zeros((len(LABELS), dim))

    total_updates = cfg.epochs * len(pairs)
    step = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(pairs))
        epoch_loss = 0.0
        for idx in order:
            ids, target = pairs[idx]
            lr = cfg.learning_rate * (1.0 - step / total_updates)
            loss, grad_hidden, grad_w = loss_and_grad(emb, out_w, ids, target)
            out_w -= lr * grad_w
            np.add.at(emb, ids, -lr * grad_hidden / len(ids))
            epoch_loss += loss
            step += 1
        log.info(
            "lid epoch %d/%d: avg loss %.5f", epoch + 1, cfg.epochs, epoch_loss / len(pairs)
        )
    return LidModel(config=cfg, embeddings=emb, out_weights=out_w)


def _has_devanagari(text: str) -> bool:
    return any(DEVANAGARI_START <= c <= DEVANAGARI_END for c in text)


def predict_token(model: LidModel, token: Token) -> tuple[Lang, float]:
    """Tag one token. Pattern overrides come first and never touch the model:
    non-word kinds are Other, Devanagari-script text is Hindi."""
    if token.kind is not TokenKind.WORD:
        return Lang.OTHER, 1.0
    if _has_devanagari(token.text):
        return Lang.HI, 1.0
    probs = model.scores(token.text)
    idx = int(np.argmax(probs))  # ties resolve to hi > en > other by label order
    return model.labels[idx], float(probs[idx])


def tag_corpus(model: LidModel, corpus: Corpus) -> Corpus:
    """Fill in every unknown token tag; gold tags are left untouched."""
    new_utts = []
    changed_any = False
    for u in corpus:
        new_tokens = []
        changed = False
        for t in u.tokens:
            if t.lang is None:
                lang, _ = predict_token(model, t)
                new_tokens.append(replace(t, lang=lang))
                changed = True
            else:
                new_tokens.append(t)
        if changed:
            new_utts.append(replace(u, tokens=tuple(new_tokens)))
            changed_any = True
        else:
            new_utts.append(u)
    if not changed_any:
        return corpus
    return replace(corpus, utterances=tuple(new_utts))
