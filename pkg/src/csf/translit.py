"""Romanized-Hindi to Devanagari transliteration.

A longest-match grapheme transducer: the input word is segmented greedily
into the table's Latin graphemes, then emitted position-aware. A vowel
right after a consonant attaches as its matra (the inherent "a" has an
empty matra); anywhere else it emits its independent form. A consonant
followed by another consonant carries a virama; a word-final consonant is
written bare while final schwa deletion is on. Full-word lexicon entries
bypass the rule engine entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .corpus import DEVANAGARI_END, DEVANAGARI_START, Token, TokenKind
from .errors import FormatError, TranslitError

VIRAMA = "्"

MAX_GRAPHEME_LEN = 4


def _in_devanagari_block(s: str) -> bool:
    return all(DEVANAGARI_START <= c <= DEVANAGARI_END for c in s)


@dataclass(frozen=True)
class Rule:
    latin: str
    is_vowel: bool
    base: str
    matra: str = ""  # only vowels carry one; empty for the inherent "a"


@dataclass(frozen=True)
class TransliterationTable:
    rules: tuple[Rule, ...]  # sorted by (-len(latin), latin)
    lexicon: dict[str, str]
    schwa_final_deletion: bool = True

    def __post_init__(self):
        by_key = {r.latin: r for r in self.rules}
        object.__setattr__(self, "_by_key", by_key)
        object.__setattr__(
            self, "_max_len", max((len(r.latin) for r in self.rules), default=0)
        )

    def rule_for(self, grapheme: str) -> Rule | None:
        return self._by_key.get(grapheme)

    @property
    def max_grapheme_len(self) -> int:
        return self._max_len


def _parse_rule_line(line: str, where: str) -> Rule:
    parts = line.split("\t")
    if len(parts) != 4:
        raise FormatError(f"{where}: expected 4 TAB-separated fields")
    latin, cls, base, matra = (p.strip() for p in parts)
    if not latin or not latin.isascii() or not latin.isalpha() or latin != latin.lower():
        raise FormatError(f"{where}: latin key must be 1-4 lowercase Latin letters")
    if len(latin) > MAX_GRAPHEME_LEN:
        raise FormatError(f"{where}: latin key longer than {MAX_GRAPHEME_LEN} chars")
    if cls not in ("C", "V"):
        raise FormatError(f"{where}: class must be C or V")
    if matra == "-":
        matra = ""
    if cls == "C" and matra:
        raise FormatError(f"{where}: consonant rules take no matra")
    if not base or not _in_devanagari_block(base):
        raise FormatError(f"{where}: base {base!r} not in the Devanagari block")
    if matra and not _in_devanagari_block(matra):
        raise FormatError(f"{where}: matra {matra!r} not in the Devanagari block")
    return Rule(latin=latin, is_vowel=(cls == "V"), base=base, matra=matra)


def load_table(
    rules_path: str | Path,
    lexicon_path: str | Path | None = None,
    schwa_final_deletion: bool = True,
) -> TransliterationTable:
    """Load and validate a rule file (and optional lexicon file)."""
    rules_path = Path(rules_path)
    rules: list[Rule] = []
    first_line: dict[str, int] = {}
    with open(rules_path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            rule = _parse_rule_line(line, f"{rules_path}:{lineno}")
            if rule.latin in first_line:
                raise FormatError(
                    f"{rules_path}:{lineno}: duplicate rule for {rule.latin!r} "
                    f"(first defined at line {first_line[rule.latin]})"
                )
            first_line[rule.latin] = lineno
            rules.append(rule)
    if not rules:
        raise FormatError(f"{rules_path}: no rules found")
    rules.sort(key=lambda r: (-len(r.latin), r.latin))

    lexicon: dict[str, str] = {}
    if lexicon_path is not None:
        lexicon_path = Path(lexicon_path)
        with open(lexicon_path, encoding="utf-8") as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not parts[0] or not parts[1]:
                    raise FormatError(
                        f"{lexicon_path}:{lineno}: expected 'latin<TAB>devanagari'"
                    )
                latin, deva = parts[0].strip().lower(), parts[1].strip()
                if not _in_devanagari_block(deva):
                    raise FormatError(
                        f"{lexicon_path}:{lineno}: {deva!r} not in the Devanagari block"
                    )
                if latin in lexicon:
                    raise FormatError(
                        f"{lexicon_path}:{lineno}: duplicate entry {latin!r}"
                    )
                lexicon[latin] = deva
    return TransliterationTable(
        rules=tuple(rules),
        lexicon=lexicon,
        schwa_final_deletion=schwa_final_deletion,
    )


def default_table(schwa_final_deletion: bool = True) -> TransliterationTable:
    """The table bundled with the package (rules + frequent-word lexicon)."""
    data = resources.files("csf") / "data"
    return load_table(
        data / "rules.tsv",
        data / "lexicon.tsv",
        schwa_final_deletion=schwa_final_deletion,
    )


def segment(table: TransliterationTable, word: str) -> list[Rule]:
    """Greedy longest-match split of a lowercase word into graphemes."""
    out: list[Rule] = []
    pos = 0
    while pos < len(word):
        rule = None
        for n in range(min(table.max_grapheme_len, len(word) - pos), 0, -1):
            rule = table.rule_for(word[pos : pos + n])
            if rule is not None:
                break
        if rule is None:
            raise TranslitError(
                f"no grapheme rule matches {word!r} at offset {pos}", offset=pos
            )
        out.append(rule)
        pos += len(rule.latin)
    return out


def transliterate_word(table: TransliterationTable, word: str) -> str:
    """Transliterate one romanized word to Devanagari."""
    if not word:
        raise TranslitError("cannot transliterate an empty word")
    word = word.lower()
    for i, c in enumerate(word):
        if not ("a" <= c <= "z"):
            raise TranslitError(
                f"{word!r}: non-Latin character {c!r} at offset {i}", offset=i
            )
    hit = table.lexicon.get(word)
    if hit is not None:
        return hit

    rules = segment(table, word)
    out: list[str] = []
    prev_was_consonant = False
    for i, rule in enumerate(rules):
        if rule.is_vowel:
            out.append(rule.matra if prev_was_consonant else rule.base)
        else:
            out.append(rule.base)
            is_last = i == len(rules) - 1
            if is_last:
                if not table.schwa_final_deletion:
                    out.append(VIRAMA)
            elif not rules[i + 1].is_vowel:
                out.append(VIRAMA)
        prev_was_consonant = not rule.is_vowel
    return "".join(out)


def transliterate_token(table: TransliterationTable, token: Token) -> Token:
    """Transliterate a Word token's text; anything else passes through.
    Text already in the Devanagari block is left untouched."""
    if token.kind is not TokenKind.WORD:
        return token
    if _in_devanagari_block(token.text):
        return token
    try:
        new_text = transliterate_word(table, token.text)
    except TranslitError as e:
        raise TranslitError(f"token {token.text!r}: {e}", offset=e.offset) from e
    return replace(token, text=new_text)
