"""Tiny encoder-decoder checkpoint: build, save, load, batched generation."""
from __future__ import annotations

import json
from pathlib import Path

import torch
from transformers import BartConfig, BartForConditionalGeneration

from .vocab import Vocab

DEFAULT_ARCH = {
    "d_model": 128,
    "encoder_layers": 2,
    "decoder_layers": 2,
    "encoder_attention_heads": 4,
    "decoder_attention_heads": 4,
    "encoder_ffn_dim": 256,
    "decoder_ffn_dim": 256,
    "max_position_embeddings": 512,
    "dropout": 0.1,
}


def build_model(vocab: Vocab, arch: dict | None = None) -> BartForConditionalGeneration:
    params = dict(DEFAULT_ARCH)
    if arch:
        params.update(arch)
    config = BartConfig(
        vocab_size=len(vocab),
        pad_token_id=vocab.pad_id,
        bos_token_id=vocab.bos_id,
        eos_token_id=vocab.eos_id,
        decoder_start_token_id=vocab.bos_id,
        forced_eos_token_id=None,
        **params,
    )
    return BartForConditionalGeneration(config)


class Checkpoint:
    """A directory holding vocab.json, weights.pt, and arch.json."""

    def __init__(self, model: BartForConditionalGeneration, vocab: Vocab,
                 arch: dict):
        self.model = model
        self.vocab = vocab
        self.arch = arch
        self.model.eval()

    def save(self, out_dir: str | Path) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        self.vocab.save(out_dir / "vocab.json")
        (out_dir / "arch.json").write_text(json.dumps(self.arch, indent=2), "utf-8")
        torch.save(self.model.state_dict(), out_dir / "weights.pt")
        return out_dir

    @classmethod
    def load(cls, ckpt_dir: str | Path) -> "Checkpoint":
        ckpt_dir = Path(ckpt_dir)
        vocab = Vocab.load(ckpt_dir / "vocab.json")
        arch = json.loads((ckpt_dir / "arch.json").read_text("utf-8"))
        model = build_model(vocab, arch)
        state = torch.load(ckpt_dir / "weights.pt", map_location="cpu")
        model.load_state_dict(state)
        return cls(model, vocab, arch)

    @torch.no_grad()
    def generate(self, inputs: list[str], max_input_length: int = 256,
                 max_output_length: int = 64, beam_size: int = 1,
                 batch_size: int = 16) -> list[str]:
        device = next(self.model.parameters()).device
        outputs: list[str] = []
        for start in range(0, len(inputs), batch_size):
            batch = inputs[start:start + batch_size]
            encoded = [self.vocab.encode(t, max_len=max_input_length)
                       for t in batch]
            width = max(len(ids) for ids in encoded)
            input_ids = torch.full((len(batch), width), self.vocab.pad_id,
                                   dtype=torch.long)
            attention = torch.zeros((len(batch), width), dtype=torch.long)
            for row, ids in enumerate(encoded):
                input_ids[row, :len(ids)] = torch.tensor(ids)
                attention[row, :len(ids)] = 1
            generated = self.model.generate(
                input_ids=input_ids.to(device),
                attention_mask=attention.to(device),
                max_length=max_output_length,
                num_beams=beam_size,
                do_sample=False,
            ).cpu()
            outputs.extend(self.vocab.decode(row.tolist()) for row in generated)
        return outputs
