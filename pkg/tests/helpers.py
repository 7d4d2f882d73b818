"""Shared fixtures and oracles used by both the module tests and the
acceptance suite."""

import json
import random

from csf.cli import main
from csf.models import TextDataset

# Hand-derived transliterations: expected values computed by manually
# applying the shipped rule table (greedy longest-match segmentation, matra
# after consonant, virama between consonants, bare final consonant).
WORD_PAIRS = [
    ("namaste", "नमस्ते"),
    ("dil", "दिल"),
    ("aap", "आप"),
    ("yaar", "यार"),
    ("yeh", "येह"),
    ("hai", "है"),
    ("kyaa", "क्या"),
    ("pyaar", "प्यार"),
    ("dost", "दोस्त"),
    ("tum", "तुम"),
    ("kab", "कब"),
    ("sab", "सब"),
    ("jab", "जब"),
    ("tab", "तब"),
    ("suno", "सुनो"),
    ("bolo", "बोलो"),
    ("chalo", "चलो"),
    ("milo", "मिलो"),
    ("mazaa", "मज़ा"),
    ("raat", "रात"),
    ("baat", "बात"),
    ("naam", "नाम"),
    ("kaam", "काम"),
    ("shaam", "शाम"),
    ("mushkil", "मुश्किल"),
    ("phool", "फूल"),
    ("kitaab", "किताब"),
    ("mohabbat", "मोहब्बत"),
    ("pakkaa", "पक्का"),
    ("dillee", "दिल्ली"),
    ("koii", "कोई"),
    ("jii", "जी"),
    ("maan", "मान"),
    ("ghar", "घर"),
    ("phir", "फिर"),
    ("sach", "सच"),
    ("log", "लोग"),
    ("vishvaas", "विश्वास"),
    ("aurat", "औरत"),
    ("aur", "और"),
    ("paisaa", "पैसा"),
    ("bhaiyaa", "भैया"),
    ("huaa", "हुआ"),
    ("jaao", "जाओ"),
    ("chaay", "चाय"),
    ("toofaan", "तूफ़ान"),
    ("duniyaa", "दुनिया"),
    ("khushee", "खुशी"),
    ("seedhaa", "सीधा"),
    ("paanee", "पानी"),
    ("hindee", "हिन्दी"),
    ("intezaar", "इन्तेज़ार"),
    ("acchaa", "अच्छा"),
    ("achchaa", "अच्छा"),
    ("samajh", "समझ"),
    ("samazh", "समझ"),
    ("parho", "पढ़ो"),
    ("charho", "चढ़ो"),
    ("krripaa", "कृपा"),
    ("queen", "क़ुईन"),
    ("new", "न्यू"),
    ("what", "व्हत"),
    ("match", "मच"),
    ("judge", "जुज"),
    ("chowk", "चौक"),
    ("road", "रोद"),
    ("movie", "मोवी"),
    ("sea", "सी"),
    ("hey", "हे"),
    ("back", "बक"),
    ("taxi", "तक्सि"),
    ("rakshaa", "रक्षा"),
    ("aadmi", "आद्मि"),
    ("oont", "ऊन्त"),
    ("dhyaan", "ध्यान"),
    ("shukriyaa", "शुक्रिया"),
]


def random_matchable_words(table, n, seed, max_chars=6):
    """Random concatenations of the table's grapheme keys."""
    keys = [r.latin for r in table.rules]
    rng = random.Random(seed)
    words = []
    while len(words) < n:
        w = ""
        while len(w) < max_chars:
            k = rng.choice(keys)
            if len(w) + len(k) > max_chars:
                break
            w += k
            if rng.random() < 0.35:
                break
        if w:
            words.append(w)
    return words


def all_segmentations(table, word):
    """Every split of `word` into rule graphemes (brute force, memoized)."""
    memo = {}

    def rec(pos):
        if pos == len(word):
            return [()]
        if pos in memo:
            return memo[pos]
        outs = []
        for n in range(1, min(table.max_grapheme_len, len(word) - pos) + 1):
            key = word[pos : pos + n]
            if table.rule_for(key) is not None:
                outs.extend((key,) + rest for rest in rec(pos + n))
        memo[pos] = outs
        return outs

    return rec(0)


def oracle_segment(table, word):
    """Longest-match-first segmentation chosen from the exhaustive set."""
    segs = all_segmentations(table, word)
    if not segs:
        return None
    return max(segs, key=lambda s: tuple(len(k) for k in s))


def separable_dataset(n_per_class=500, seed=0, vocab_size=40, words=(3, 8), n_negative=None):
    """Two classes over disjoint vocabularies; trivially separable."""
    rng = random.Random(seed)
    texts, labels = [], []
    sizes = {0: n_negative if n_negative is not None else n_per_class, 1: n_per_class}
    for label, prefix in ((0, "neg"), (1, "pos")):
        vocab = [f"{prefix}{i}" for i in range(vocab_size)]
        for _ in range(sizes[label]):
            n = rng.randint(*words)
            texts.append(" ".join(rng.choice(vocab) for _ in range(n)))
            labels.append(label)
    order = list(range(len(texts)))
    rng.shuffle(order)
    return TextDataset(
        texts=tuple(texts[i] for i in order), labels=tuple(labels[i] for i in order)
    )


def three_way_split(ds, n_val, n_test):
    n_train = len(ds) - n_val - n_test
    mk = lambda lo, hi: TextDataset(texts=ds.texts[lo:hi], labels=ds.labels[lo:hi])
    return mk(0, n_train), mk(n_train, n_train + n_val), mk(n_train + n_val, len(ds))


HI_WORDS = ["yeh", "sahi", "baat", "kitaab", "raat", "sach", "mushkil", "log"]
EN_WORDS = ["movie", "great", "plot", "nice", "show", "ending", "twist", "epic"]


def write_fixture_corpus(path, n=200, seed=13, tagged=True, with_urls=False):
    """Deterministic code-switched fixture in canonical records."""
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for i in range(n):
            tokens = []
            for _ in range(rng.randint(2, 7)):
                if rng.random() < 0.6:
                    tokens.append({"t": rng.choice(HI_WORDS), "l": "hi" if tagged else None})
                else:
                    tokens.append({"t": rng.choice(EN_WORDS), "l": "en" if tagged else None})
            if rng.random() < 0.3:
                tokens.append({"t": "#tag" + str(rng.randrange(5)), "l": None})
            if with_urls and rng.random() < 0.2:
                tokens.append({"t": "http://t.co/" + str(i), "l": None})
            label = 1 if rng.random() < 0.35 else 0
            rec = {"id": f"u{i:04d}", "label": label, "tokens": tokens}
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


def full_chain(workdir, seed="11"):
    """ingest -> lid train/tag -> convert x3 -> export -> train -> eval."""
    workdir.mkdir(parents=True, exist_ok=True)
    src = write_fixture_corpus(workdir / "src.jsonl", tagged=True)
    untagged = write_fixture_corpus(workdir / "raw.jsonl", seed=17, tagged=False)
    assert run_cli("ingest", "--workdir", workdir, "--input", src, "--out", "corpus.jsonl") == 0
    assert run_cli("lid", "train", "--workdir", workdir, "--input", "corpus.jsonl", "--out", "lid.bin") == 0
    assert run_cli(
        "lid", "tag", "--workdir", workdir, "--input", untagged,
        "--model", "lid.bin", "--out", "tagged.jsonl",
    ) == 0
    for variant in ("hindi", "crosslingual", "english"):
        args = [
            "convert", "--workdir", workdir, "--input", "corpus.jsonl",
            "--variant", variant, "--out", f"conv_{variant}.jsonl",
        ]
        if variant == "english":
            args += ["--mock", "echo"]
        assert run_cli(*args) == 0
    assert run_cli(
        "export", "--workdir", workdir, "--input", "corpus.jsonl",
        "--converted", "conv_crosslingual.jsonl", "--out-dir", "exported", "--seed", seed,
    ) == 0
    assert run_cli(
        "train", "--workdir", workdir, "--input", "corpus.jsonl", "--model", "linear",
        "--converted", "conv_crosslingual.jsonl", "--out", "model.bin", "--seed", seed,
    ) == 0
    assert run_cli(
        "eval", "--workdir", workdir, "--input", "corpus.jsonl", "--model-file", "model.bin",
        "--converted", "conv_crosslingual.jsonl", "--out", "report.jsonl", "--seed", seed,
    ) == 0
    files = [
        "corpus.jsonl", "tagged.jsonl",
        "conv_hindi.jsonl", "conv_crosslingual.jsonl", "conv_english.jsonl",
        "exported/train.jsonl", "exported/val.jsonl", "exported/test.jsonl",
        "model.bin", "report.jsonl",
    ]
    return {f: (workdir / f).read_bytes() for f in files}
