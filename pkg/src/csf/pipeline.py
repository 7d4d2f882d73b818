"""Conversion pipelines over tagged corpora.

Three variants: rewrite everything language-marked into Devanagari
(hindi), additionally translate each rewritten sentence into English
(english), or rewrite only the Hindi-tagged tokens and leave English
in Latin script (crosslingual). Hashtags, mentions and other non-word
tokens pass through every variant verbatim. Utterances that fail
conversion are excluded and reported, never passed through raw.
"""

from __future__ import annotations

import configparser
import json
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .corpus import Corpus, Lang, SplitCorpus, Task, Token, TokenKind
from .errors import ConfigError, PipelineError, TranslitError
from .providers import Cache, ProviderConfig, translate_sentences
from .translit import TransliterationTable, transliterate_token


class Variant(str, Enum):
    HINDI = "hindi"
    ENGLISH = "english"
    CROSSLINGUAL = "crosslingual"


@dataclass(frozen=True)
class ConvertedUtterance:
    id: str
    label: int
    tokens: tuple[Token, ...] | None  # token variants
    sentence: str | None  # english variant
    transliterated: tuple[int, ...]  # indices of rewritten tokens
    translated: bool = False

    def text(self) -> str:
        if self.sentence is not None:
            return self.sentence
        return " ".join(t.text for t in self.tokens)


@dataclass(frozen=True)
class ConvertedCorpus:
    base_name: str
    task: Task
    variant: Variant
    items: tuple[ConvertedUtterance, ...]
    excluded: tuple[tuple[str, str], ...] = ()  # (utterance id, reason)

    def __len__(self):
        return len(self.items)

    def by_id(self, uid: str) -> ConvertedUtterance:
        try:
            return self._index[uid]
        except AttributeError:
            object.__setattr__(self, "_index", {i.id: i for i in self.items})
            return self._index[uid]


def _require_tagged(corpus: Corpus) -> None:
    for u in corpus:
        for t in u.tokens:
            if t.lang is None:
                raise PipelineError(
                    f"utterance {u.id!r}: token {t.text!r} is untagged; "
                    "run langid tagging before conversion"
                )


def _convert_tokens(
    corpus: Corpus, table: TransliterationTable, langs: frozenset[Lang], variant: Variant
) -> ConvertedCorpus:
    items: list[ConvertedUtterance] = []
    excluded: list[tuple[str, str]] = []
    for u in corpus:
        new_tokens: list[Token] = []
        rewritten: list[int] = []
        try:
            for i, tok in enumerate(u.tokens):
                if tok.kind is TokenKind.WORD and tok.lang in langs:
                    new = transliterate_token(table, tok)
                    if new is not tok:
                        rewritten.append(i)
                    new_tokens.append(new)
                else:
                    new_tokens.append(tok)
        except TranslitError as e:
            excluded.append((u.id, str(e)))
            continue
        items.append(
            ConvertedUtterance(
                id=u.id,
                label=u.label,
                tokens=tuple(new_tokens),
                sentence=None,
                transliterated=tuple(rewritten),
            )
        )
    if not items:
        raise PipelineError("conversion excluded every utterance")
    return ConvertedCorpus(
        base_name=corpus.name,
        task=corpus.task,
        variant=variant,
        items=tuple(items),
        excluded=tuple(excluded),
    )


def convert_hindi(corpus: Corpus, table: TransliterationTable) -> ConvertedCorpus:
    """All language-marked word tokens (Hindi and English alike) rewritten
    into Devanagari; everything else passes through."""
    _require_tagged(corpus)
    return _convert_tokens(corpus, table, frozenset({Lang.HI, Lang.EN}), Variant.HINDI)


def convert_crosslingual(corpus: Corpus, table: TransliterationTable) -> ConvertedCorpus:
    """Only Hindi-tagged word tokens rewritten; English stays Latin."""
    _require_tagged(corpus)
    return _convert_tokens(corpus, table, frozenset({Lang.HI}), Variant.CROSSLINGUAL)


def convert_english(
    corpus: Corpus,
    table: TransliterationTable,
    provider_cfg: ProviderConfig,
    cache: Cache,
    *,
    transport=None,
    sleep_fn=None,
) -> ConvertedCorpus:
    """Devanagari rewrite, then whole-sentence translation into English.
    Needs a reachable provider or a warm cache."""
    hindi = convert_hindi(corpus, table)
    sentences = [item.text() for item in hindi.items]
    translated = translate_sentences(
        provider_cfg,
        cache,
        sentences,
        source="hi",
        target="en",
        transport=transport,
        sleep_fn=sleep_fn or time.sleep,
        on_failure="none",
    )
    items: list[ConvertedUtterance] = []
    excluded = list(hindi.excluded)
    for item, out in zip(hindi.items, translated):
        if out is None:
            excluded.append((item.id, "translation failed after retries"))
            continue
        items.append(
            ConvertedUtterance(
                id=item.id,
                label=item.label,
                tokens=None,
                sentence=out,
                transliterated=item.transliterated,
                translated=True,
            )
        )
    if not items:
        raise PipelineError("translation excluded every utterance")
    return ConvertedCorpus(
        base_name=corpus.name,
        task=corpus.task,
        variant=Variant.ENGLISH,
        items=tuple(items),
        excluded=tuple(excluded),
    )


def convert(corpus: Corpus, variant: Variant, table: TransliterationTable, **kw) -> ConvertedCorpus:
    if variant is Variant.HINDI:
        return convert_hindi(corpus, table)
    if variant is Variant.CROSSLINGUAL:
        return convert_crosslingual(corpus, table)
    return convert_english(corpus, table, **kw)


@dataclass(frozen=True)
class ExportResult:
    paths: dict[str, Path]
    counts: dict[str, int]
    excluded: int


def export_records(
    cc: ConvertedCorpus, split: SplitCorpus, out_dir: str | Path
) -> ExportResult:
    """Write train/val/test record files with the converted text in a
    "text" field. Token variants carry the converted token/tag list too.
    Byte-identical across runs for identical inputs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    counts: dict[str, int] = {}
    for part in ("train", "val", "test"):
        ids = split.part(part)
        if not ids:
            raise PipelineError(f"split part {part!r} is empty")
        path = out_dir / f"{part}.jsonl"
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for uid in ids:
                try:
                    item = cc.by_id(uid)
                except KeyError:
                    raise PipelineError(
                        f"utterance {uid!r} from the split is missing from the "
                        f"converted corpus (excluded or never ingested)"
                    ) from None
                rec: dict = {"id": item.id, "label": item.label, "text": item.text()}
                if item.tokens is not None:
                    rec["tokens"] = [
                        {"t": t.text, "l": t.lang.value if t.lang else None}
                        for t in item.tokens
                    ]
                f.write(json.dumps(rec, ensure_ascii=False) + "\n")
        paths[part] = path
        counts[part] = len(ids)
    return ExportResult(paths=paths, counts=counts, excluded=len(cc.excluded))


def save_converted(cc: ConvertedCorpus, path: str | Path) -> None:
    """Persist a converted corpus: one meta line, then one line per item."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        meta = {
            "meta": {
                "base_name": cc.base_name,
                "task": cc.task.value,
                "variant": cc.variant.value,
                "excluded": [list(e) for e in cc.excluded],
            }
        }
        f.write(json.dumps(meta, ensure_ascii=False) + "\n")
        for item in cc.items:
            rec = {
                "id": item.id,
                "label": item.label,
                "text": item.text(),
                "transliterated": list(item.transliterated),
                "translated": item.translated,
            }
            if item.tokens is not None:
                rec["tokens"] = [
                    {"t": t.text, "l": t.lang.value if t.lang else None}
                    for t in item.tokens
                ]
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_converted(path: str | Path) -> ConvertedCorpus:
    from .corpus import make_token

    with open(path, encoding="utf-8") as f:
        lines = [l for l in (raw.strip() for raw in f) if l]
    if not lines:
        raise PipelineError(f"{path}: empty converted-corpus file")
    try:
        meta = json.loads(lines[0])["meta"]
        items = []
        for line in lines[1:]:
            rec = json.loads(line)
            tokens = None
            sentence = None
            if "tokens" in rec:
                tokens = tuple(
                    make_token(t["t"], Lang(t["l"]) if t["l"] else None)
                    for t in rec["tokens"]
                )
            else:
                sentence = rec["text"]
            items.append(
                ConvertedUtterance(
                    id=rec["id"],
                    label=rec["label"],
                    tokens=tokens,
                    sentence=sentence,
                    transliterated=tuple(rec["transliterated"]),
                    translated=rec["translated"],
                )
            )
        return ConvertedCorpus(
            base_name=meta["base_name"],
            task=Task(meta["task"]),
            variant=Variant(meta["variant"]),
            items=tuple(items),
            excluded=tuple((e[0], e[1]) for e in meta["excluded"]),
        )
    except (KeyError, ValueError, TypeError) as e:
        raise PipelineError(f"{path}: malformed converted-corpus file: {e}") from e


# --- experiment configuration ---------------------------------------------------

@dataclass
class Settings:
    """One key=value sectioned document driving the CLI end to end."""

    dataset_path: str = ""
    dataset_format: str = "canonical-records"
    task: Task = Task.SARCASM
    name: str = ""
    variant: Variant = Variant.CROSSLINGUAL
    rules_path: str = ""  # empty = bundled default
    lexicon_path: str = ""
    schwa_final_deletion: bool = True
    endpoint: str = ""
    cache_path: str = "provider_cache.jsonl"
    mock_provider: str = ""  # "echo" | "dictionary:<path>" | ""
    seed: int = 42
    test_frac: float = 0.10
    val_frac: float = 0.10
    stratify: bool = False
    lid_model_path: str = "lid_model.bin"
    model_kind: str = "linear"
    autotune_trials: int = 0
    output_dir: str = "out"

    @classmethod
    def from_file(cls, path: str | Path) -> "Settings":
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise ConfigError(f"config file {path} not found")
        s = cls()
        try:
            if parser.has_section("dataset"):
                d = parser["dataset"]
                s.dataset_path = d.get("path", s.dataset_path)
                s.dataset_format = d.get("format", s.dataset_format)
                s.task = Task(d.get("task", s.task.value))
                s.name = d.get("name", s.name)
            if parser.has_section("convert"):
                c = parser["convert"]
                s.variant = Variant(c.get("variant", s.variant.value))
            if parser.has_section("translit"):
                t = parser["translit"]
                s.rules_path = t.get("rules", s.rules_path)
                s.lexicon_path = t.get("lexicon", s.lexicon_path)
                s.schwa_final_deletion = t.getboolean(
                    "schwa_final_deletion", s.schwa_final_deletion
                )
            if parser.has_section("providers"):
                p = parser["providers"]
                s.endpoint = p.get("endpoint", s.endpoint)
                s.cache_path = p.get("cache", s.cache_path)
                s.mock_provider = p.get("mock", s.mock_provider)
            if parser.has_section("split"):
                sp = parser["split"]
                s.seed = sp.getint("seed", s.seed)
                s.test_frac = sp.getfloat("test_frac", s.test_frac)
                s.val_frac = sp.getfloat("val_frac", s.val_frac)
                s.stratify = sp.getboolean("stratify", s.stratify)
            if parser.has_section("lid"):
                s.lid_model_path = parser["lid"].get("model", s.lid_model_path)
            if parser.has_section("train"):
                tr = parser["train"]
                s.model_kind = tr.get("model", s.model_kind)
                s.autotune_trials = tr.getint("autotune_trials", s.autotune_trials)
            if parser.has_section("output"):
                s.output_dir = parser["output"].get("dir", s.output_dir)
        except ValueError as e:
            raise ConfigError(f"{path}: {e}") from e
        if s.model_kind not in ("linear", "cnn"):
            raise ConfigError(f"{path}: unknown train model {s.model_kind!r}")
        return s
