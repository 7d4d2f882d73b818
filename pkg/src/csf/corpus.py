"""Labeled code-switched corpora: ingestion, preprocessing, splits, statistics.

A corpus is an immutable collection of token-tagged utterances with binary
labels. Two on-disk formats are supported:

* canonical records: one JSON object per line,
  ``{"id": str, "label": 0|1, "tokens": [{"t": str, "l": "hi"|"en"|"other"|null}]}``
* token/tag columns: ``token<TAB>tag`` per line, utterances separated by a
  blank line and introduced by a header line ``# id=<id> label=<0|1>``
"""

from __future__ import annotations

import json
import logging
import math
import random
import re
import unicodedata
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import CorpusError, FormatError, SplitError, StatsError

log = logging.getLogger(__name__)

DEVANAGARI_START = "ऀ"
DEVANAGARI_END = "ॿ"


class Lang(str, Enum):
    HI = "hi"
    EN = "en"
    OTHER = "other"


class Task(str, Enum):
    SARCASM = "sarcasm"
    HATE = "hate"


class TokenKind(str, Enum):
    WORD = "word"
    HASHTAG = "hashtag"
    MENTION = "mention"
    URL = "url"
    PUNCT = "punct"
    NUMERIC = "numeric"
    EMOJI = "emoji"


# Kinds whose tokens can never carry a language tag.
OTHER_ONLY_KINDS = frozenset({TokenKind.HASHTAG, TokenKind.MENTION, TokenKind.PUNCT})

_URL_RE = re.compile(r"^[a-zA-Z][a-zA-Z0-9+.-]*://\S+$")

_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),
    (0x2600, 0x27BF),
    (0x1F1E6, 0x1F1FF),
    (0x2B00, 0x2BFF),
)
_EMOJI_JOINERS = {0x200D, 0xFE0E, 0xFE0F}


def _is_emoji_char(ch: str) -> bool:
    cp = ord(ch)
    if cp in _EMOJI_JOINERS:
        return True
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def infer_kind(text: str) -> TokenKind:
    """Classify a token's surface kind. Precedence for overlapping patterns:
    Url > Mention > Hashtag > Numeric > Punct > Emoji > Word."""
    if _URL_RE.match(text):
        return TokenKind.URL
    if text.startswith("@"):
        return TokenKind.MENTION
    if text.startswith("#"):
        return TokenKind.HASHTAG
    if text.isdigit():
        return TokenKind.NUMERIC
    if all(unicodedata.category(c).startswith(("P", "S")) for c in text) and not any(
        _is_emoji_char(c) for c in text
    ):
        return TokenKind.PUNCT
    if all(_is_emoji_char(c) for c in text):
        return TokenKind.EMOJI
    return TokenKind.WORD


@dataclass(frozen=True)
class Token:
    text: str
    lang: Lang | None = None  # None = unknown, to be filled in by langid
    kind: TokenKind = TokenKind.WORD

    def __post_init__(self):
        if not self.text:
            raise CorpusError("token text must be non-empty")
        if any(c.isspace() for c in self.text):
            raise CorpusError(f"token text contains whitespace: {self.text!r}")
        if self.kind in OTHER_ONLY_KINDS and self.lang is not Lang.OTHER:
            raise CorpusError(
                f"{self.kind.value} token {self.text!r} must be tagged 'other'"
            )


def make_token(text: str, lang: Lang | None = None) -> Token:
    """Build a token, inferring its kind and coercing the tag where the kind
    forces it (hashtags, mentions and punctuation are always Other)."""
    kind = infer_kind(text)
    if kind in OTHER_ONLY_KINDS:
        lang = Lang.OTHER
    return Token(text=text, lang=lang, kind=kind)


@dataclass(frozen=True)
class Utterance:
    id: str
    tokens: tuple[Token, ...]
    label: int

    def __post_init__(self):
        if not self.tokens:
            raise CorpusError(f"utterance {self.id!r} has no tokens")
        if self.label not in (0, 1):
            raise CorpusError(f"utterance {self.id!r}: label must be 0 or 1")

    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)


@dataclass(frozen=True)
class Corpus:
    name: str
    task: Task
    utterances: tuple[Utterance, ...]
    label_names: dict[int, str] = field(
        default_factory=lambda: {0: "negative", 1: "positive"}
    )

    def __post_init__(self):
        if not self.utterances:
            raise CorpusError(f"corpus {self.name!r} is empty")
        ids = [u.id for u in self.utterances]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise CorpusError(f"duplicate utterance ids: {dupes[:5]}")

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    def ids(self) -> list[str]:
        return [u.id for u in self.utterances]

    def by_id(self, uid: str) -> Utterance:
        try:
            return self._index[uid]
        except AttributeError:
            object.__setattr__(self, "_index", {u.id: u for u in self.utterances})
            return self._index[uid]


@dataclass(frozen=True)
class SplitCorpus:
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]
    seed: int
    fractions: tuple[float, float]  # (test_frac, val_frac)

    def part(self, name: str) -> tuple[str, ...]:
        return {"train": self.train, "val": self.val, "test": self.test}[name]


@dataclass(frozen=True)
class LanguageStats:
    counts: dict[Lang, int]
    total: int
    hindi_fraction: float  # percent of hi among language-marked (hi+en) tokens


@dataclass(frozen=True)
class IngestReport:
    utterances: int
    tokens: int
    unrecognized_tags: int


@dataclass(frozen=True)
class StripReport:
    removed_tokens: int
    dropped_ids: tuple[str, ...]


_TAG_MAP = {"hi": Lang.HI, "en": Lang.EN, "other": Lang.OTHER}


def _parse_tag(raw, where: str, strict: bool) -> tuple[Lang | None, bool]:
    """Returns (tag, was_unrecognized)."""
    if raw is None or raw == "":
        return None, False
    tag = _TAG_MAP.get(str(raw).lower())
    if tag is None:
        if strict:
            raise FormatError(f"{where}: unknown language tag {raw!r}")
        return Lang.OTHER, True
    return tag, False


def ingest(
    path: str | Path,
    format: str = "canonical-records",
    *,
    name: str | None = None,
    task: Task = Task.SARCASM,
) -> tuple[Corpus, IngestReport]:
    """Parse a dataset file into a Corpus.

    Token kind is inferred from surface patterns; source language tags are
    preserved where present and left unknown otherwise. Kinds that force the
    Other tag (hashtag/mention/punct) override any source tag.
    """
    path = Path(path)
    if format == "canonical-records":
        utterances, report = _ingest_canonical(path)
    elif format == "token-tag-columns":
        utterances, report = _ingest_columns(path)
    else:
        raise FormatError(f"unknown ingest format {format!r}")
    if not utterances:
        raise FormatError(f"{path}: file contains no records")
    corpus = Corpus(
        name=name or path.stem, task=task, utterances=tuple(utterances)
    )
    if report.unrecognized_tags:
        log.warning(
            "%s: %d unrecognized language tags mapped to 'other'",
            path,
            report.unrecognized_tags,
        )
    return corpus, report


def _ingest_canonical(path: Path) -> tuple[list[Utterance], IngestReport]:
    utterances: list[Utterance] = []
    seen: set[str] = set()
    n_tokens = 0
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({e.msg})") from e
            if not isinstance(rec, dict):
                raise FormatError(f"{path}:{lineno}: record must be an object")
            try:
                uid = rec["id"]
                label = rec["label"]
                raw_tokens = rec["tokens"]
            except KeyError as e:
                raise FormatError(f"{path}:{lineno}: missing field {e}") from e
            if not isinstance(uid, str) or not uid:
                raise FormatError(f"{path}:{lineno}: id must be a non-empty string")
            if label not in (0, 1):
                raise FormatError(f"{path}:{lineno}: label must be 0 or 1")
            if not isinstance(raw_tokens, list) or not raw_tokens:
                raise FormatError(f"{path}:{lineno}: tokens must be a non-empty list")
            if uid in seen:
                raise FormatError(f"{path}:{lineno}: duplicate id {uid!r}")
            seen.add(uid)
            tokens = []
            for j, t in enumerate(raw_tokens):
                if not isinstance(t, dict) or "t" not in t:
                    raise FormatError(f"{path}:{lineno}: token {j} malformed")
                tag, _ = _parse_tag(t.get("l"), f"{path}:{lineno}", strict=True)
                try:
                    tokens.append(make_token(t["t"], tag))
                except CorpusError as e:
                    raise FormatError(f"{path}:{lineno}: token {j}: {e}") from e
            n_tokens += len(tokens)
            utterances.append(Utterance(id=uid, tokens=tuple(tokens), label=label))
    return utterances, IngestReport(len(utterances), n_tokens, 0)


_HEADER_RE = re.compile(r"^#\s*id=(\S+)\s+label=([01])\s*$")


def _ingest_columns(path: Path) -> tuple[list[Utterance], IngestReport]:
    utterances: list[Utterance] = []
    seen: set[str] = set()
    n_tokens = 0
    n_unrecognized = 0

    cur_id: str | None = None
    cur_label: int | None = None
    cur_tokens: list[Token] = []

    def flush(lineno: int):
        nonlocal cur_id, cur_label, cur_tokens
        if cur_id is None:
            return
        if not cur_tokens:
            raise FormatError(f"{path}:{lineno}: utterance {cur_id!r} has no tokens")
        if cur_id in seen:
            raise FormatError(f"{path}:{lineno}: duplicate id {cur_id!r}")
        seen.add(cur_id)
        utterances.append(
            Utterance(id=cur_id, tokens=tuple(cur_tokens), label=cur_label)
        )
        cur_id, cur_label, cur_tokens = None, None, []

    lineno = 0
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                flush(lineno)
                continue
            # header lines never contain a TAB; hashtag token lines do
            if line.startswith("#") and "\t" not in line:
                m = _HEADER_RE.match(line)
                if not m:
                    raise FormatError(f"{path}:{lineno}: malformed header line")
                flush(lineno)
                cur_id, cur_label = m.group(1), int(m.group(2))
                continue
            if cur_id is None:
                raise FormatError(f"{path}:{lineno}: token line before any header")
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise FormatError(f"{path}:{lineno}: expected 'token<TAB>tag'")
            tag, unrec = _parse_tag(
                parts[1].strip(), f"{path}:{lineno}", strict=False
            )
            if unrec:
                n_unrecognized += 1
                log.debug("%s:%d: unrecognized tag %r", path, lineno, parts[1])
            try:
                cur_tokens.append(make_token(parts[0], tag))
            except CorpusError as e:
                raise FormatError(f"{path}:{lineno}: {e}") from e
            n_tokens += 1
        flush(lineno)
    return utterances, IngestReport(len(utterances), n_tokens, n_unrecognized)


def serialize(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the canonical record format (UTF-8, LF lines)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for u in corpus:
            rec = {
                "id": u.id,
                "label": u.label,
                "tokens": [
                    {"t": t.text, "l": t.lang.value if t.lang else None}
                    for t in u.tokens
                ],
            }
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def strip_hyperlinks(corpus: Corpus) -> tuple[Corpus, StripReport]:
    """Remove all Url tokens. Utterances left empty are dropped and reported;
    the order of the remaining tokens is preserved. Idempotent."""
    kept: list[Utterance] = []
    dropped: list[str] = []
    removed = 0
    for u in corpus:
        tokens = tuple(t for t in u.tokens if t.kind is not TokenKind.URL)
        removed += len(u.tokens) - len(tokens)
        if not tokens:
            dropped.append(u.id)
            continue
        kept.append(replace(u, tokens=tokens) if len(tokens) != len(u.tokens) else u)
    if not kept:
        raise CorpusError("all utterances consisted solely of URLs")
    out = replace(corpus, utterances=tuple(kept))
    return out, StripReport(removed_tokens=removed, dropped_ids=tuple(dropped))


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _apportion(total: int, weights: list[int]) -> list[int]:
    """Split `total` across groups proportionally to `weights` (largest
    remainder), so each group is within 1 of its exact quota."""
    n = sum(weights)
    quotas = [total * w / n for w in weights]
    counts = [math.floor(q) for q in quotas]
    leftover = total - sum(counts)
    order = sorted(range(len(weights)), key=lambda i: (quotas[i] - counts[i], -i), reverse=True)
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def split(
    corpus: Corpus,
    seed: int = 42,
    test_frac: float = 0.10,
    val_frac: float = 0.10,
    stratify: bool = False,
) -> SplitCorpus:
    """Deterministic train/val/test partition of utterance ids.

    The test part is drawn first from the full corpus (round-half-up of
    test_frac*N), then the validation part from the remainder. With
    stratify=True, parts keep label proportions within one utterance per
    label while the overall part sizes stay unchanged.
    """
    if not (0 < test_frac < 1 and 0 < val_frac < 1):
        raise SplitError("fractions must lie strictly between 0 and 1")
    n = len(corpus)
    if n < 10:
        raise SplitError(f"corpus of {n} utterances is too small to split")
    n_test = _round_half_up(test_frac * n)
    n_val = _round_half_up(val_frac * (n - n_test))
    rng = random.Random(seed)

    if not stratify:
        ids = corpus.ids()
        rng.shuffle(ids)
        test = ids[:n_test]
        val = ids[n_test : n_test + n_val]
        train = ids[n_test + n_val :]
    else:
        by_label: dict[int, list[str]] = {}
        for u in corpus:
            by_label.setdefault(u.label, []).append(u.id)
        labels = sorted(by_label)
        pools = []
        for lab in labels:
            pool = list(by_label[lab])
            rng.shuffle(pool)
            pools.append(pool)
        test_counts = _apportion(n_test, [len(p) for p in pools])
        test, rest = [], []
        for pool, k in zip(pools, test_counts):
            test.extend(pool[:k])
            rest.append(pool[k:])
        val_counts = _apportion(n_val, [len(p) for p in rest])
        val, train = [], []
        for pool, k in zip(rest, val_counts):
            val.extend(pool[:k])
            train.extend(pool[k:])

    return SplitCorpus(
        train=tuple(train),
        val=tuple(val),
        test=tuple(test),
        seed=seed,
        fractions=(test_frac, val_frac),
    )


def language_stats(corpus: Corpus) -> LanguageStats:
    """Token counts per language tag and the Hindi share of language-marked
    tokens (hi / (hi+en), as a percentage). Requires a fully tagged corpus."""
    counts = {Lang.HI: 0, Lang.EN: 0, Lang.OTHER: 0}
    total = 0
    for u in corpus:
        for t in u.tokens:
            if t.lang is None:
                raise StatsError(
                    f"utterance {u.id!r}: token {t.text!r} has no language tag; "
                    "tag the corpus first (csf lid tag)"
                )
            counts[t.lang] += 1
            total += 1
    marked = counts[Lang.HI] + counts[Lang.EN]
    if marked == 0:
        raise StatsError("corpus has no language-marked (hi/en) tokens")
    return LanguageStats(
        counts=counts,
        total=total,
        hindi_fraction=100.0 * counts[Lang.HI] / marked,
    )
