"""Fine-tune a pretrained sequence-classification encoder on csf exports.

Reads the train/val/test record files written by `csf export` (one JSON
object per line with "id", "label" and "text" fields), fine-tunes a
sequence-classification head for a fixed number of epochs, evaluates on
the test file, and writes a metrics record in the same schema the csf
evaluation reports use, so `csf compare` consumes it directly.

Defaults follow the experiment settings this adapter reproduces:
learning rate 1e-5, 3 epochs, maximum sequence length 50. The monolingual
English variant pairs with roberta-large, the mixed-script cross-lingual
variant with xlm-roberta-large; any local path or hub id can be
substituted via --model-id. Optimizer is AdamW with no warmup and no
weight decay; the exact settings are embedded in the emitted report.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path


class AdapterError(Exception):
    pass


ENGLISH_DEFAULT_MODEL = "roberta-large"
CROSSLINGUAL_DEFAULT_MODEL = "xlm-roberta-large"


@dataclass(frozen=True)
class FinetuneConfig:
    model_id: str
    learning_rate: float = 1e-5
    epochs: int = 3
    max_sequence_length: int = 50
    batch_size: int = 16
    seed: int = 42

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.max_sequence_length < 1:
            raise AdapterError("epochs, batch_size and max_sequence_length must be >= 1")
        if self.learning_rate <= 0:
            raise AdapterError("learning_rate must be positive")


def read_split(path: str | Path) -> tuple[list[str], list[int]]:
    """Canonical records with a "text" field -> (texts, labels)."""
    path = Path(path)
    if not path.exists():
        raise AdapterError(f"split file not found: {path}")
    texts, labels = [], []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise AdapterError(f"{path}:{lineno}: invalid JSON ({e.msg})") from e
            for field in ("id", "label", "text"):
                if field not in rec:
                    raise AdapterError(f"{path}:{lineno}: missing field {field!r}")
            if rec["label"] not in (0, 1):
                raise AdapterError(f"{path}:{lineno}: label must be 0 or 1")
            if not isinstance(rec["text"], str) or not rec["text"].strip():
                raise AdapterError(f"{path}:{lineno}: empty text")
            texts.append(rec["text"])
            labels.append(int(rec["label"]))
    if not texts:
        raise AdapterError(f"{path}: split is empty")
    return texts, labels


def _metrics_from_counts(tp: int, fp: int, fn: int, tn: int) -> dict:
    total = tp + fp + fn + tn
    degenerate = False
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if tp + fp == 0 or tp + fn == 0:
        degenerate = True
    if precision + recall:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1, degenerate = 0.0, True
    return {
        "cm": {"tp": tp, "fp": fp, "fn": fn, "tn": tn},
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "accuracy": (tp + tn) / total,
        "degenerate": degenerate,
    }


def finetune(
    train_path: str | Path,
    val_path: str | Path,
    test_path: str | Path,
    cfg: FinetuneConfig,
    task: str = "sarcasm",
    variant: str = "crosslingual",
    model_name: str | None = None,
    split_seed: int = 42,
) -> dict:
    """Train, evaluate on test, and return the report record."""
    import torch
    from torch.utils.data import DataLoader, TensorDataset

    try:
        from transformers import AutoModelForSequenceClassification, AutoTokenizer
    except ImportError as e:
        raise AdapterError(f"transformers is not installed: {e}") from e

    torch.manual_seed(cfg.seed)
    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True)

    train_texts, train_labels = read_split(train_path)
    val_texts, val_labels = read_split(val_path)
    test_texts, test_labels = read_split(test_path)
    if len(set(train_labels)) < 2:
        raise AdapterError("training split contains a single class")

    try:
        tokenizer = AutoTokenizer.from_pretrained(cfg.model_id)
        model = AutoModelForSequenceClassification.from_pretrained(
            cfg.model_id, num_labels=2
        )
    except Exception as e:  # hub, filesystem, or weight-shape failures alike
        raise AdapterError(f"cannot load model {cfg.model_id!r}: {e}") from e
    model.train()

    def encode(texts: list[str]) -> dict:
        return tokenizer(
            texts,
            truncation=True,
            max_length=cfg.max_sequence_length,
            padding="max_length",
            return_tensors="pt",
        )

    enc = encode(train_texts)
    dataset = TensorDataset(
        enc["input_ids"], enc["attention_mask"], torch.tensor(train_labels)
    )
    generator = torch.Generator().manual_seed(cfg.seed)
    loader = DataLoader(
        dataset, batch_size=cfg.batch_size, shuffle=True, generator=generator
    )
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.learning_rate, weight_decay=0.0
    )

    @torch.no_grad()
    def evaluate(texts: list[str], labels: list[int]) -> tuple[list[int], float]:
        model.eval()
        preds = []
        correct = 0
        for start in range(0, len(texts), cfg.batch_size):
            batch = encode(texts[start : start + cfg.batch_size])
            logits = model(**batch).logits
            batch_preds = logits.argmax(dim=-1).tolist()
            preds.extend(batch_preds)
        correct = sum(p == y for p, y in zip(preds, labels))
        model.train()
        return preds, correct / len(labels)

    history = []
    for epoch in range(cfg.epochs):
        total_loss, seen = 0.0, 0
        for input_ids, attention_mask, labels in loader:
            optimizer.zero_grad()
            out = model(
                input_ids=input_ids, attention_mask=attention_mask, labels=labels
            )
            out.loss.backward()
            optimizer.step()
            total_loss += float(out.loss.detach()) * len(labels)
            seen += len(labels)
        _, val_acc = evaluate(val_texts, val_labels)
        history.append(
            {"epoch": epoch + 1, "train_loss": total_loss / seen, "val_accuracy": val_acc}
        )
        print(f"epoch {epoch + 1}/{cfg.epochs}: loss {total_loss / seen:.4f} "
              f"val acc {val_acc:.4f}", file=sys.stderr)

    preds, _ = evaluate(test_texts, test_labels)
    tp = sum(1 for p, y in zip(preds, test_labels) if p == 1 and y == 1)
    fp = sum(1 for p, y in zip(preds, test_labels) if p == 1 and y == 0)
    fn = sum(1 for p, y in zip(preds, test_labels) if p == 0 and y == 1)
    tn = sum(1 for p, y in zip(preds, test_labels) if p == 0 and y == 0)

    ones = sum(test_labels)
    report = {
        "model": model_name or Path(cfg.model_id).name,
        "task": task,
        "variant": variant,
        "split": "test",
        "split_seed": split_seed,
        **_metrics_from_counts(tp, fp, fn, tn),
        "majority_baseline": max(ones, len(test_labels) - ones) / len(test_labels),
        "config": asdict(cfg),
        "history": history,
        "predictions": preds,
    }
    return report


def write_report(report: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(report, ensure_ascii=False) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csf-finetune",
        description="Fine-tune a pretrained encoder on csf train/val/test exports",
    )
    parser.add_argument("--train", required=True, help="train split record file")
    parser.add_argument("--val", required=True, help="validation split record file")
    parser.add_argument("--test", required=True, help="test split record file")
    parser.add_argument(
        "--model-id",
        help="encoder checkpoint (hub id or local path); defaults per --variant",
    )
    parser.add_argument("--learning-rate", type=float, default=1e-5)
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--max-seq-len", type=int, default=50)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--task", choices=["sarcasm", "hate"], default="sarcasm")
    parser.add_argument(
        "--variant", choices=["english", "crosslingual"], default="crosslingual"
    )
    parser.add_argument("--split-seed", type=int, default=42,
                        help="recorded in the report for provenance")
    parser.add_argument("--model-name", help="model name recorded in the report")
    parser.add_argument("--out", default="finetune_report.jsonl")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    model_id = args.model_id or (
        ENGLISH_DEFAULT_MODEL if args.variant == "english" else CROSSLINGUAL_DEFAULT_MODEL
    )
    try:
        cfg = FinetuneConfig(
            model_id=model_id,
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            max_sequence_length=args.max_seq_len,
            batch_size=args.batch_size,
            seed=args.seed,
        )
        report = finetune(
            args.train,
            args.val,
            args.test,
            cfg,
            task=args.task,
            variant=args.variant,
            model_name=args.model_name,
            split_seed=args.split_seed,
        )
    except AdapterError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    write_report(report, args.out)
    print(
        f"f1={report['f1']:.3f} precision={report['precision']:.3f} "
        f"recall={report['recall']:.3f} accuracy={report['accuracy'] * 100:.2f}% "
        f"-> {args.out}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
