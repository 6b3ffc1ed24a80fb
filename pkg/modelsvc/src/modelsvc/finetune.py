"""Sequence-to-sequence fine-tuning on (input, target) instance files.

The instance file is newline-delimited JSON with "input" and "target"
fields (the toolkit's training-data format).  Training is standard
cross-entropy over the target tokens.  Defaults mirror the usual
fine-tuning recipe (lr 1e-5, weight decay 1e-5, 45 epochs, batch 32 for
ED/E2E and 6 for EAE); desk-scale smoke runs override them.
"""
from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

import torch
from torch.utils.data import DataLoader, Dataset

from .model import Checkpoint, build_model
from .vocab import Vocab

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    learning_rate: float = 1e-5
    weight_decay: float = 1e-5
    epochs: int = 45
    batch_size: int | None = None  # resolved from the task: 6 for EAE else 32
    seed: int = 0
    max_input_length: int = 256
    max_output_length: int = 64
    arch: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.learning_rate <= 0 or self.weight_decay < 0 or self.epochs < 0:
            raise ValueError("learning rate must be positive, weight decay and "
                             "epochs non-negative")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch size must be >= 1")


def read_instance_pairs(path: str | Path) -> tuple[list[tuple[str, str]], str]:
    """(input, target) pairs plus the dominant task tag of the file."""
    pairs = []
    tasks = set()
    with Path(path).open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "target" not in obj:
                raise ValueError(f"{path}:{line_no}: instance has no target; "
                                 f"fine-tuning needs training instances")
            pairs.append((obj["input"], obj["target"]))
            tasks.add(obj.get("task", ""))
    if not pairs:
        raise ValueError(f"{path}: no instances")
    task = tasks.pop() if len(tasks) == 1 else "mixed"
    return pairs, task


class _PairDataset(Dataset):
    def __init__(self, pairs, vocab: Vocab, cfg: TrainConfig):
        self.examples = []
        n_truncated = 0
        for src, tgt in pairs:
            if len(src.split()) > cfg.max_input_length - 2:
                n_truncated += 1
            src_ids = vocab.encode(src, max_len=cfg.max_input_length)
            n_words = len(tgt.split())
            if n_words > cfg.max_output_length - 2:
                # Inputs may be truncated, targets never: a clipped target
                # would teach the model a malformed output format.
                raise ValueError(f"target of {n_words} words exceeds "
                                 f"max_output_length={cfg.max_output_length}")
            tgt_ids = vocab.encode(tgt)
            self.examples.append((src_ids, tgt_ids))
        if n_truncated:
            logger.warning("%d of %d inputs truncated to %d words",
                           n_truncated, len(pairs), cfg.max_input_length - 2)

    def __len__(self):
        return len(self.examples)

    def __getitem__(self, i):
        return self.examples[i]


def _collate(batch, pad_id: int):
    src_width = max(len(s) for s, _ in batch)
    tgt_width = max(len(t) for _, t in batch)
    input_ids = torch.full((len(batch), src_width), pad_id, dtype=torch.long)
    attention = torch.zeros((len(batch), src_width), dtype=torch.long)
    labels = torch.full((len(batch), tgt_width), -100, dtype=torch.long)
    for row, (src, tgt) in enumerate(batch):
        input_ids[row, :len(src)] = torch.tensor(src)
        attention[row, :len(src)] = 1
        labels[row, :len(tgt)] = torch.tensor(tgt)
    return input_ids, attention, labels


def finetune(instances_path: str | Path, out_dir: str | Path,
             cfg: TrainConfig | None = None) -> tuple[Checkpoint, list[float]]:
    """Train from scratch on an instance file; returns the checkpoint and the
    per-epoch mean loss history (also written into the checkpoint dir)."""
    cfg = cfg or TrainConfig()
    pairs, task = read_instance_pairs(instances_path)
    batch_size = cfg.batch_size if cfg.batch_size is not None else \
        (6 if task == "EAE" else 32)

    torch.manual_seed(cfg.seed)
    random.seed(cfg.seed)
    vocab = Vocab.build(text for pair in pairs for text in pair)
    model = build_model(vocab, cfg.arch)
    dataset = _PairDataset(pairs, vocab, cfg)
    generator = torch.Generator().manual_seed(cfg.seed)
    loader = DataLoader(dataset, batch_size=batch_size, shuffle=True,
                        generator=generator,
                        collate_fn=lambda b: _collate(b, vocab.pad_id))
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate,
                                  weight_decay=cfg.weight_decay)
    history: list[float] = []
    model.train()
    for epoch in range(cfg.epochs):
        total, steps = 0.0, 0
        for input_ids, attention, labels in loader:
            optimizer.zero_grad()
            out = model(input_ids=input_ids, attention_mask=attention,
                        labels=labels)
            out.loss.backward()
            optimizer.step()
            total += out.loss.item()
            steps += 1
        history.append(total / max(steps, 1))
        logger.info("epoch %d/%d: loss %.4f", epoch + 1, cfg.epochs, history[-1])
    model.eval()
    checkpoint = Checkpoint(model, vocab, _arch_of(cfg))
    out_path = checkpoint.save(out_dir)
    (out_path / "training.json").write_text(json.dumps({
        "instances": str(instances_path),
        "task": task,
        "pairs": len(pairs),
        "batch_size": batch_size,
        "learning_rate": cfg.learning_rate,
        "weight_decay": cfg.weight_decay,
        "epochs": cfg.epochs,
        "seed": cfg.seed,
        "loss_history": history,
    }, indent=2), "utf-8")
    return checkpoint, history


def _arch_of(cfg: TrainConfig) -> dict:
    from .model import DEFAULT_ARCH

    arch = dict(DEFAULT_ARCH)
    arch.update(cfg.arch)
    return arch
