import random

import pytest

from csf.corpus import Lang, Token, TokenKind, make_token
from csf.errors import FormatError, TranslitError
from csf import translit
from csf.translit import (
    TransliterationTable,
    default_table,
    load_table,
    segment,
    transliterate_token,
    transliterate_word,
)
from helpers import WORD_PAIRS, oracle_segment, random_matchable_words


@pytest.fixture(scope="module")
def table():
    return default_table()


# --- table loading -----------------------------------------------------------

def test_default_table_inventory(table):
    assert len(table.rules) >= 60
    vowel_bases = {r.base for r in table.rules if r.is_vowel}
    # the eleven standard vowel qualities, independent forms
    for v in "अ आ इ ई उ ऊ ऋ ए ऐ ओ औ".split():
        assert v in vowel_bases
    consonant_out = "".join(r.base for r in table.rules if not r.is_vowel)
    for c in "क ख ग घ च छ ज झ त थ द ध न प फ ब भ म य र ल व श स ह".split():
        assert c in consonant_out
    # sorted longest-first, then lexicographic
    keys = [r.latin for r in table.rules]
    assert keys == sorted(keys, key=lambda k: (-len(k), k))
    assert len(table.lexicon) >= 30


def test_load_rejects_duplicates(tmp_path):
    p = tmp_path / "r.tsv"
    p.write_text("aa\tV\tआ\tा\nk\tC\tक\t-\naa\tV\tआ\tा\n", encoding="utf-8")
    with pytest.raises(FormatError) as ei:
        load_table(p)
    assert ":3:" in str(ei.value) and "line 1" in str(ei.value)


def test_load_rejects_empty(tmp_path):
    p = tmp_path / "r.tsv"
    p.write_text("# only comments\n\n", encoding="utf-8")
    with pytest.raises(FormatError, match="no rules"):
        load_table(p)


def test_load_rejects_non_devanagari_output(tmp_path):
    p = tmp_path / "r.tsv"
    p.write_text("k\tC\tk\t-\n", encoding="utf-8")
    with pytest.raises(FormatError, match="Devanagari"):
        load_table(p)


def test_load_rejects_consonant_with_matra(tmp_path):
    p = tmp_path / "r.tsv"
    p.write_text("k\tC\tक\tा\n", encoding="utf-8")
    with pytest.raises(FormatError, match="matra"):
        load_table(p)


def test_load_lexicon_validation(tmp_path):
    rules = tmp_path / "r.tsv"
    rules.write_text("k\tC\tक\t-\n", encoding="utf-8")
    lex = tmp_path / "l.tsv"
    lex.write_text("ok\tnotdeva\n", encoding="utf-8")
    with pytest.raises(FormatError, match="Devanagari"):
        load_table(rules, lex)


@pytest.mark.parametrize("latin,deva", WORD_PAIRS)
def test_word_pairs(table, latin, deva):
    assert transliterate_word(table, latin) == deva


def test_at_least_fifty_pairs():
    assert len(WORD_PAIRS) >= 50


# --- emission edge cases -------------------------------------------------------

def test_lexicon_overrides(table):
    assert transliterate_word(table, "main") == "मैं"
    assert transliterate_word(table, "nahi") == "नहीं"
    assert transliterate_word(table, "kya") == "क्या"
    assert transliterate_word(table, "school") == "स्कूल"


def test_lexicon_never_invokes_segmentation(table, monkeypatch):
    calls = {"n": 0}
    orig = translit.segment

    def counting(tbl, word):
        calls["n"] += 1
        return orig(tbl, word)

    monkeypatch.setattr(translit, "segment", counting)
    for w in table.lexicon:
        transliterate_word(table, w)
    assert calls["n"] == 0
    transliterate_word(table, "namaste")
    assert calls["n"] == 1


def test_greedy_longest_match(table):
    # "aa" must fire as one grapheme, not two inherent-a vowels
    assert transliterate_word(table, "aa") == "आ"
    assert [r.latin for r in segment(table, "aakhir")] == ["aa", "kh", "i", "r"]


def test_case_folding(table):
    assert transliterate_word(table, "NAMASTE") == "नमस्ते"


def test_schwa_flag():
    t_on = default_table(schwa_final_deletion=True)
    t_off = default_table(schwa_final_deletion=False)
    assert transliterate_word(t_on, "kab") == "कब"
    assert transliterate_word(t_off, "kab") == "कब्"
    # final vowel: flag is irrelevant
    assert transliterate_word(t_off, "suno") == "सुनो"


def test_word_errors(table):
    with pytest.raises(TranslitError, match="empty"):
        transliterate_word(table, "")
    with pytest.raises(TranslitError, match="offset 3"):
        transliterate_word(table, "dil2")
    with pytest.raises(TranslitError):
        transliterate_word(table, "don't")


def test_unmatchable_offset(tmp_path):
    p = tmp_path / "r.tsv"
    p.write_text("a\tV\tअ\t-\nn\tC\tन\t-\n", encoding="utf-8")
    table = load_table(p)
    with pytest.raises(TranslitError) as ei:
        transliterate_word(table, "nax")
    assert ei.value.offset == 2


# --- token-level -----------------------------------------------------------------

def test_token_word_transliterated(table):
    tok = Token(text="yaar", lang=Lang.HI, kind=TokenKind.WORD)
    out = transliterate_token(table, tok)
    assert out.text == "यार" and out.lang == Lang.HI and out.kind == TokenKind.WORD


def test_token_non_word_passthrough(table):
    tok = make_token("#lol")
    assert transliterate_token(table, tok) is tok
    url = make_token("http://x.y/z")
    assert transliterate_token(table, url) is url


def test_token_devanagari_identity(table):
    tok = Token(text="यार", lang=Lang.HI, kind=TokenKind.WORD)
    assert transliterate_token(table, tok) is tok


def test_token_error_context(table):
    tok = Token(text="ab9z", lang=Lang.EN, kind=TokenKind.WORD)
    with pytest.raises(TranslitError, match="ab9z"):
        transliterate_token(table, tok)


# --- properties --------------------------------------------------------------------

def test_output_stays_in_devanagari_block(table):
    for w in random_matchable_words(table, 2000, seed=5):
        out = transliterate_word(table, w)
        assert out, w
        assert all("ऀ" <= c <= "ॿ" for c in out), (w, out)


def test_deterministic(table):
    for w in ["namaste", "aakhri", "chowk", "queen"]:
        assert transliterate_word(table, w) == transliterate_word(table, w)


def test_greedy_matches_bruteforce_oracle_sampled(table):
    rng = random.Random(17)
    words = random_matchable_words(table, 3000, seed=23)
    # plus adversarial short strings over busy letters
    letters = "acehikorstuwd"
    words += [
        "".join(rng.choice(letters) for _ in range(rng.randint(1, 6))) for _ in range(3000)
    ]
    for w in words:
        expected = oracle_segment(table, w)
        try:
            got = [r.latin for r in segment(table, w)]
        except TranslitError:
            assert expected is None, w
            continue
        assert got == list(expected), w
