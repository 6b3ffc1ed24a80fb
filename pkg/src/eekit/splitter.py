"""Low-resource training splits and few/zero-shot corpus filtering.

Splits are taken by document.  The default selection greedily maximizes the
number of distinct event types covered, which mirrors how low-resource
training proportions are usually drawn so that rare types still appear.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, SentenceRecord


@dataclass(frozen=True)
class SplitConfig:
    proportion: float
    seed: int = 0
    coverage_greedy: bool = True

    def __post_init__(self):
        if not (0.0 < self.proportion <= 1.0):
            raise ValueError(f"proportion must be in (0, 1], got {self.proportion}")


@dataclass(frozen=True)
class FewShotConfig:
    n_common: int
    k: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n_common < 0 or self.k < 0:
            raise ValueError("n_common and k must be >= 0")


@dataclass
class _DocInfo:
    doc_id: str
    types: set
    event_count: int


def _doc_infos(corpus: Corpus) -> dict[str, _DocInfo]:
    infos: dict[str, _DocInfo] = {}
    for sent in corpus.sentences:
        info = infos.setdefault(sent.doc_id, _DocInfo(sent.doc_id, set(), 0))
        for ev in sent.events:
            info.types.add(ev.event_type)
            info.event_count += 1
    return infos


def target_doc_count(proportion: float, n_docs: int) -> int:
    """round(p * D) with half-up rounding, clamped to [1, D]."""
    n = int(math.floor(proportion * n_docs + 0.5))
    return max(1, min(n, n_docs))


def select_documents(corpus: Corpus, cfg: SplitConfig) -> list[str]:
    """The documents a split keeps, in selection order."""
    infos = _doc_infos(corpus)
    if not infos:
        raise ValueError("corpus has no documents")
    n = target_doc_count(cfg.proportion, len(infos))
    if not cfg.coverage_greedy:
        rng = random.Random(cfg.seed)
        return sorted(rng.sample(sorted(infos), n))
    covered: set = set()
    remaining = dict(infos)
    selected = []
    while len(selected) < n:
        # Most newly covered types first; ties by event count, then doc id.
        best = min(remaining.values(),
                   key=lambda d: (-len(d.types - covered), -d.event_count, d.doc_id))
        selected.append(best.doc_id)
        covered |= best.types
        del remaining[best.doc_id]
    return selected


def make_split(corpus: Corpus, cfg: SplitConfig) -> Corpus:
    keep = set(select_documents(corpus, cfg))
    sentences = tuple(s for s in corpus.sentences if s.doc_id in keep)
    return Corpus(sentences, ontology_id=corpus.ontology_id)


def _type_frequencies(corpus: Corpus) -> Counter:
    freq: Counter = Counter()
    for sent in corpus.sentences:
        for ev in sent.events:
            freq[ev.event_type] += 1
    return freq


def seen_types(corpus: Corpus, n_common: int) -> list[str]:
    """The top-n most frequent event types, ties broken by type name."""
    freq = _type_frequencies(corpus)
    ranked = sorted(freq, key=lambda t: (-freq[t], t))
    return ranked[:n_common]


def few_shot_filter(corpus: Corpus, cfg: FewShotConfig) -> tuple[Corpus, frozenset[str]]:
    """Keep all events of the common types and at most k mentions per rare
    type.  Sentences stripped of all their events stay in as negatives."""
    if not corpus.sentences:
        raise ValueError("corpus is empty")
    freq = _type_frequencies(corpus)
    seen = set(seen_types(corpus, cfg.n_common))
    unseen = frozenset(freq) - seen

    keep: dict[str, set[tuple[int, int]]] = {}
    for etype in sorted(unseen):
        mentions = [
            (si, ei)
            for si, sent in enumerate(corpus.sentences)
            for ei, ev in enumerate(sent.events)
            if ev.event_type == etype
        ]
        rng = random.Random(f"{cfg.seed}:{etype}")
        chosen = rng.sample(range(len(mentions)), min(cfg.k, len(mentions)))
        keep[etype] = {mentions[i] for i in chosen}

    sentences = []
    for si, sent in enumerate(corpus.sentences):
        events = tuple(
            ev for ei, ev in enumerate(sent.events)
            if ev.event_type in seen or (si, ei) in keep.get(ev.event_type, ())
        )
        sentences.append(SentenceRecord(sent.doc_id, sent.sent_id, sent.tokens, events))
    return Corpus(tuple(sentences), ontology_id=corpus.ontology_id), frozenset(unseen)


def eval_filter(corpus: Corpus, unseen_types) -> Corpus:
    """Keep only gold events of the given types (for unseen-only scoring)."""
    unseen = set(unseen_types)
    sentences = tuple(
        SentenceRecord(s.doc_id, s.sent_id, s.tokens,
                       tuple(ev for ev in s.events if ev.event_type in unseen))
        for s in corpus.sentences
    )
    return Corpus(sentences, ontology_id=corpus.ontology_id)
