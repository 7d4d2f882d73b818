"""csf command-line tool.

One binary, subcommand style: ingest, stats, lid train/tag, translit,
convert, export, train, eval, compare. Every subcommand reads the shared
config file (flags win over file values), accepts --seed, writes a run
manifest, and exits non-zero with a one-line machine-parsable error code
on failure (2 for usage errors, 1 for pipeline errors). Logs go to stderr;
data only ever goes to files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .corpus import Task, ingest, language_stats, serialize, split, strip_hyperlinks
from .errors import ConfigError, CsfError
from .evaluation import compare, evaluate, read_report, render_text, write_report
from .langid import LidConfig, LidModel, tag_corpus, train_lid
from .models import (
    CnnConfig,
    LinearTextConfig,
    autotune_linear,
    dataset_from_corpus,
    load_model,
    predict,
    save_model,
    train_cnn,
    train_linear,
)
from .pipeline import (
    Settings,
    Variant,
    convert_crosslingual,
    convert_english,
    convert_hindi,
    export_records,
    load_converted,
    save_converted,
)
from .providers import Cache, DictionaryProvider, EchoProvider, ProviderConfig
from .translit import default_table, load_table, transliterate_token, transliterate_word

log = logging.getLogger("csf")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Per-run provenance record, written atomically at run end."""

    def __init__(self, command: str, args: argparse.Namespace, workdir: Path):
        self.command = command
        self.workdir = workdir
        self.started = time.time()
        self.data = {
            "tool": "csf",
            "version": __version__,
            "command": command,
            "args": {k: str(v) for k, v in vars(args).items() if k != "func"},
            "inputs": {},
            "outputs": {},
            "timings": {},
        }
        self._stage_start = self.started

    def add_input(self, path: Path | str):
        p = Path(path)
        self.data["inputs"][str(p)] = _sha256(p)

    def add_output(self, path: Path | str):
        p = Path(path)
        self.data["outputs"][str(p)] = _sha256(p)

    def stage(self, name: str):
        now = time.time()
        self.data["timings"][name] = round(now - self._stage_start, 6)
        self._stage_start = now

    def write(self):
        self.data["elapsed"] = round(time.time() - self.started, 6)
        path = self.workdir / f"manifest_{self.command.replace(' ', '_')}.json"
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(self.data, f, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp, path)
        return path


def _load_settings(args) -> Settings:
    s = Settings.from_file(args.config) if args.config else Settings()
    if getattr(args, "seed", None) is not None:
        s.seed = args.seed
    return s


def _resolve(workdir: Path, path: str | Path) -> Path:
    p = Path(path)
    return p if p.is_absolute() else workdir / p


def _ingest_corpus(args, s: Settings, workdir: Path):
    path = _resolve(workdir, args.input or s.dataset_path)
    if not str(args.input or s.dataset_path):
        raise ConfigError("no dataset path given (flag --input or [dataset] path)")
    fmt = getattr(args, "format", None) or s.dataset_format
    task = Task(getattr(args, "task", None) or s.task)
    corpus, report = ingest(path, format=fmt, task=task, name=s.name or None)
    return corpus, report, path


def _table_for(args, s: Settings, workdir: Path):
    rules = getattr(args, "rules", None) or s.rules_path
    lexicon = getattr(args, "lexicon", None) or s.lexicon_path
    if rules:
        return load_table(
            _resolve(workdir, rules),
            _resolve(workdir, lexicon) if lexicon else None,
            schwa_final_deletion=s.schwa_final_deletion,
        )
    return default_table(schwa_final_deletion=s.schwa_final_deletion)


def _provider_parts(args, s: Settings, workdir: Path):
    cache = Cache(_resolve(workdir, s.cache_path))
    mock = getattr(args, "mock", None) or s.mock_provider
    if mock == "echo":
        transport = EchoProvider()
    elif mock.startswith("dictionary:"):
        transport = DictionaryProvider.from_file(_resolve(workdir, mock.split(":", 1)[1]))
    elif mock:
        raise ConfigError(f"unknown mock provider {mock!r}")
    else:
        transport = None  # real HTTP, built from the endpoint by the client
    cfg = ProviderConfig(endpoint=s.endpoint)
    return cfg, cache, transport


# --- subcommands ------------------------------------------------------------------

def cmd_ingest(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("ingest", args, workdir)
    corpus, report, in_path = _ingest_corpus(args, s, workdir)
    man.add_input(in_path)
    if args.strip_urls:
        corpus, strip_rep = strip_hyperlinks(corpus)
        log.info(
            "removed %d url tokens, dropped %d empty utterances",
            strip_rep.removed_tokens,
            len(strip_rep.dropped_ids),
        )
    man.stage("ingest")
    out = _resolve(workdir, args.out)
    serialize(corpus, out)
    man.add_output(out)
    man.stage("write")
    man.write()
    log.info("ingested %d utterances, %d tokens -> %s", len(corpus), report.tokens, out)
    return 0


def cmd_stats(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("stats", args, workdir)
    corpus, _, in_path = _ingest_corpus(args, s, workdir)
    man.add_input(in_path)
    st = language_stats(corpus)
    man.stage("stats")
    man.write()
    print(f"{st.hindi_fraction:.3f}%")
    log.info(
        "tokens: %s total=%d",
        " ".join(f"{k.value}={v}" for k, v in st.counts.items()),
        st.total,
    )
    return 0


def cmd_lid_train(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("lid_train", args, workdir)
    corpus, _, in_path = _ingest_corpus(args, s, workdir)
    man.add_input(in_path)
    cfg = LidConfig(seed=s.seed)
    model = train_lid(corpus, cfg)
    man.stage("train")
    out = _resolve(workdir, args.out or s.lid_model_path)
    model.save(out)
    man.add_output(out)
    man.write()
    log.info("trained language identifier -> %s", out)
    return 0


def cmd_lid_tag(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("lid_tag", args, workdir)
    corpus, _, in_path = _ingest_corpus(args, s, workdir)
    model_path = _resolve(workdir, args.model or s.lid_model_path)
    man.add_input(in_path)
    man.add_input(model_path)
    model = LidModel.load(model_path)
    tagged = tag_corpus(model, corpus)
    man.stage("tag")
    out = _resolve(workdir, args.out)
    serialize(tagged, out)
    man.add_output(out)
    man.write()
    log.info("tagged corpus -> %s", out)
    return 0


def cmd_translit(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("translit", args, workdir)
    table = _table_for(args, s, workdir)
    if args.word:
        print(transliterate_word(table, args.word))
        man.write()
        return 0
    if args.file:
        in_path = _resolve(workdir, args.file)
        man.add_input(in_path)
        out = _resolve(workdir, args.out)
        with open(in_path, encoding="utf-8") as fin, open(
            out, "w", encoding="utf-8", newline="\n"
        ) as fout:
            for line in fin:
                word = line.strip()
                if word:
                    fout.write(transliterate_word(table, word) + "\n")
        man.add_output(out)
        man.stage("file")
        man.write()
        return 0
    # corpus mode: every word token, regardless of tag
    corpus, _, in_path = _ingest_corpus(args, s, workdir)
    man.add_input(in_path)
    from dataclasses import replace as _replace

    new_utts = []
    for u in corpus:
        toks = tuple(transliterate_token(table, t) for t in u.tokens)
        new_utts.append(_replace(u, tokens=toks))
    out = _resolve(workdir, args.out)
    serialize(_replace(corpus, utterances=tuple(new_utts)), out)
    man.add_output(out)
    man.stage("corpus")
    man.write()
    log.info("transliterated corpus -> %s", out)
    return 0


def cmd_convert(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("convert", args, workdir)
    variant = Variant(args.variant or s.variant)
    corpus, _, in_path = _ingest_corpus(args, s, workdir)
    man.add_input(in_path)
    table = _table_for(args, s, workdir)
    if variant is Variant.HINDI:
        cc = convert_hindi(corpus, table)
    elif variant is Variant.CROSSLINGUAL:
        cc = convert_crosslingual(corpus, table)
    else:
        pcfg, cache, transport = _provider_parts(args, s, workdir)
        cc = convert_english(corpus, table, pcfg, cache, transport=transport)
    man.stage("convert")
    out = _resolve(workdir, args.out)
    save_converted(cc, out)
    man.add_output(out)
    man.write()
    log.info(
        "converted %d utterances (%d excluded) -> %s", len(cc), len(cc.excluded), out
    )
    return 0


def cmd_export(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("export", args, workdir)
    corpus, _, in_path = _ingest_corpus(args, s, workdir)
    cc_path = _resolve(workdir, args.converted)
    man.add_input(in_path)
    man.add_input(cc_path)
    cc = load_converted(cc_path)
    sp = split(
        corpus, seed=s.seed, test_frac=s.test_frac, val_frac=s.val_frac, stratify=s.stratify
    )
    out_dir = _resolve(workdir, args.out_dir or s.output_dir)
    res = export_records(cc, sp, out_dir)
    man.stage("export")
    for p in res.paths.values():
        man.add_output(p)
    man.write()
    log.info(
        "exported train/val/test = %d/%d/%d (excluded %d) -> %s",
        res.counts["train"],
        res.counts["val"],
        res.counts["test"],
        res.excluded,
        out_dir,
    )
    return 0


def _texts_for_ids(ids, corpus, converted):
    if converted is None:
        return dataset_from_corpus(corpus, ids)
    from .models import TextDataset

    texts, labels = [], []
    for uid in ids:
        item = converted.by_id(uid)
        texts.append(item.text())
        labels.append(item.label)
    return TextDataset(texts=tuple(texts), labels=tuple(labels))


def cmd_train(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("train", args, workdir)
    corpus, _, in_path = _ingest_corpus(args, s, workdir)
    man.add_input(in_path)
    converted = None
    if args.converted:
        cc_path = _resolve(workdir, args.converted)
        man.add_input(cc_path)
        converted = load_converted(cc_path)
    sp = split(
        corpus, seed=s.seed, test_frac=s.test_frac, val_frac=s.val_frac, stratify=s.stratify
    )
    train_ds = _texts_for_ids(sp.train, corpus, converted)
    val_ds = _texts_for_ids(sp.val, corpus, converted)
    kind = args.model or s.model_kind
    trials = args.autotune if args.autotune is not None else s.autotune_trials
    if kind == "linear":
        if trials:
            result = autotune_linear(train_ds, val_ds, trials=trials, budget_seed=s.seed)
            model = result.model
            log.info("autotune best val F1 %.4f with %s", result.best_val_f1, result.config)
        else:
            model = train_linear(train_ds, val_ds, LinearTextConfig(seed=s.seed))
    elif kind == "cnn":
        cfg = CnnConfig(
            seed=s.seed,
            sequence_length=args.seq_len,
            embedding_dim=args.emb_dim,
            conv_layers=args.layers,
            filters=args.filters,
            dropout=args.dropout,
            epochs=args.epochs,
        )
        model = train_cnn(train_ds, val_ds, cfg)
    else:
        raise ConfigError(f"unknown model kind {kind!r}")
    man.stage("train")
    out = _resolve(workdir, args.out)
    save_model(model, out)
    man.add_output(out)
    man.write()
    log.info("trained %s model -> %s (val %s)", kind, out, model.history[-1])
    return 0


def cmd_eval(args) -> int:
    workdir = Path(args.workdir)
    s = _load_settings(args)
    man = Manifest("eval", args, workdir)
    corpus, _, in_path = _ingest_corpus(args, s, workdir)
    man.add_input(in_path)
    converted = None
    variant = "raw"
    if args.converted:
        cc_path = _resolve(workdir, args.converted)
        man.add_input(cc_path)
        converted = load_converted(cc_path)
        variant = converted.variant.value
    model_path = _resolve(workdir, args.model_file)
    man.add_input(model_path)
    model = load_model(model_path)
    sp = split(
        corpus, seed=s.seed, test_frac=s.test_frac, val_frac=s.val_frac, stratify=s.stratify
    )
    ids = sp.part(args.part)
    ds = _texts_for_ids(ids, corpus, converted)
    preds = [predict(model, t).label for t in ds.texts]
    report = evaluate(
        model_name=args.name or model.kind,
        task=corpus.task,
        preds=preds,
        golds=list(ds.labels),
        variant=variant,
        split=args.part,
        split_seed=s.seed,
    )
    man.stage("eval")
    out = _resolve(workdir, args.out)
    write_report(report, out)
    man.add_output(out)
    man.write()
    print(render_text(report))
    return 0


def cmd_compare(args) -> int:
    workdir = Path(args.workdir)
    man = Manifest("compare", args, workdir)
    report_path = _resolve(workdir, args.report)
    man.add_input(report_path)
    report = read_report(report_path)
    res = compare(report, task=args.task or report.task, model=args.against)
    man.stage("compare")
    man.write()
    print(
        f"f1={res.f1:.3f} vs {args.against} f1={res.reference_f1:.3f}: "
        f"{res.relative_f1_delta * 100:+.1f}% relative"
    )
    return 0


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csf",
        description="Code-switched corpus conversion and classification toolkit",
    )
    parser.add_argument("--version", action="version", version=f"csf {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config file (key=value sections)")
    common.add_argument("--workdir", default=".", help="base for relative paths")
    common.add_argument("--seed", type=int, default=None, help="override the split/train seed")
    common.add_argument("--verbose", action="store_true", help="info-level logs on stderr")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="dataset file (falls back to [dataset] path)")
    data.add_argument("--format", choices=["canonical-records", "token-tag-columns"])
    data.add_argument("--task", choices=[t.value for t in Task])

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common, data], help="parse a dataset into canonical records")
    p.add_argument("--strip-urls", action="store_true", help="drop url tokens while ingesting")
    p.add_argument("--out", default="corpus.jsonl")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", parents=[common, data], help="language statistics of a tagged corpus")
    p.set_defaults(func=cmd_stats)

    lid = sub.add_parser("lid", parents=[], help="token language identifier")
    lid_sub = lid.add_subparsers(dest="lid_command", required=True)
    p = lid_sub.add_parser("train", parents=[common, data], help="train on a gold-tagged corpus")
    p.add_argument("--out", help="model file (default from config)")
    p.set_defaults(func=cmd_lid_train)
    p = lid_sub.add_parser("tag", parents=[common, data], help="fill unknown tags")
    p.add_argument("--model", help="identifier model file")
    p.add_argument("--out", default="tagged.jsonl")
    p.set_defaults(func=cmd_lid_tag)

    p = sub.add_parser("translit", parents=[common, data], help="romanized-Hindi to Devanagari")
    p.add_argument("--word", help="transliterate one word to stdout")
    p.add_argument("--file", help="transliterate a word-per-line file")
    p.add_argument("--rules", help="rule file (default: bundled)")
    p.add_argument("--lexicon", help="lexicon file (default: bundled)")
    p.add_argument("--out", default="transliterated.jsonl")
    p.set_defaults(func=cmd_translit)

    p = sub.add_parser("convert", parents=[common, data], help="run a conversion variant")
    p.add_argument("--variant", choices=[v.value for v in Variant])
    p.add_argument("--rules")
    p.add_argument("--lexicon")
    p.add_argument("--mock", help="mock provider: echo | dictionary:<path>")
    p.add_argument("--out", default="converted.jsonl")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("export", parents=[common, data], help="write train/val/test record files")
    p.add_argument("--converted", required=True, help="converted corpus file")
    p.add_argument("--out-dir", help="output directory (default from config)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("train", parents=[common, data], help="train a baseline classifier")
    p.add_argument("--model", choices=["linear", "cnn"])
    p.add_argument("--converted", help="train on converted text instead of raw")
    p.add_argument("--autotune", type=int, default=None, metavar="N", help="random-search trials")
    p.add_argument("--out", default="model.bin")
    p.add_argument("--seq-len", type=int, default=100)
    p.add_argument("--emb-dim", type=int, default=300)
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--filters", type=int, default=128)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=10)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", parents=[common, data], help="evaluate a trained model")
    p.add_argument("--model-file", required=True)
    p.add_argument("--converted", help="evaluate on converted text")
    p.add_argument("--part", choices=["train", "val", "test"], default="test")
    p.add_argument("--name", help="model name recorded in the report")
    p.add_argument("--out", default="report.jsonl")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", parents=[common], help="relative F1 against a reference row")
    p.add_argument("--report", required=True, help="report file to compare")
    p.add_argument("--against", required=True, help="reference model name, e.g. cnn")
    p.add_argument("--task", help="override the report's task")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CsfError as e:
        print(f"error {e.code}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error CSF_IO: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
