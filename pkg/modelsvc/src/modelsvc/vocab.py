"""Whitespace word-level vocabulary for the tiny reference model.

The toolkit's prompts and targets are whitespace-tokenizable by
construction, so a word-level vocabulary keeps the model small and makes
copying behavior easy to learn at desk scale.
"""
from __future__ import annotations

import json
from pathlib import Path

PAD, BOS, EOS, UNK = "<pad>", "<s>", "</s>", "<unk>"
SPECIALS = (PAD, BOS, EOS, UNK)


class Vocab:
    def __init__(self, words: list[str]):
        self.itos = list(SPECIALS) + [w for w in words if w not in SPECIALS]
        self.stoi = {w: i for i, w in enumerate(self.itos)}

    @classmethod
    def build(cls, texts) -> "Vocab":
        seen: dict[str, None] = {}
        for text in texts:
            for word in text.split():
                seen.setdefault(word, None)
        return cls(list(seen))

    def __len__(self) -> int:
        return len(self.itos)

    @property
    def pad_id(self) -> int:
        return self.stoi[PAD]

    @property
    def bos_id(self) -> int:
        return self.stoi[BOS]

    @property
    def eos_id(self) -> int:
        return self.stoi[EOS]

    @property
    def unk_id(self) -> int:
        return self.stoi[UNK]

    def encode(self, text: str, max_len: int | None = None,
               truncate: bool = True) -> list[int]:
        ids = [self.stoi.get(w, self.unk_id) for w in text.split()]
        if max_len is not None and len(ids) > max_len - 2:
            if not truncate:
                raise ValueError(f"sequence of {len(ids)} words exceeds {max_len}")
            ids = ids[:max_len - 2]
        return [self.bos_id] + ids + [self.eos_id]

    def decode(self, ids) -> str:
        words = []
        for i in ids:
            word = self.itos[i] if 0 <= int(i) < len(self.itos) else UNK
            if word in (PAD, BOS, EOS):
                continue
            words.append(word)
        return " ".join(words)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.itos, ensure_ascii=False), "utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocab":
        itos = json.loads(Path(path).read_text("utf-8"))
        vocab = cls.__new__(cls)
        vocab.itos = itos
        vocab.stoi = {w: i for i, w in enumerate(itos)}
        return vocab
