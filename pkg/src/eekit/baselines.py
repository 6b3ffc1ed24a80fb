"""Zero-shot event-detection baselines: keyword matching and lemma matching.

Both predict a trigger wherever an event keyword occurs in the passage
(token-aligned, case-insensitive) and never predict arguments.  The lemma
variant compares lemmatized tokens against lemmatized keywords, using a
user-supplied lookup table with a minimal suffix-stripping fallback.
"""
from __future__ import annotations

from pathlib import Path

from .corpus import FOLD, Corpus, SentenceRecord, TokenSpan, find_occurrences
from .decoder import EventPrediction, PredictionRecord
from .ontology import Ontology

LemmaTable = dict[str, str]

# One suffix at most is stripped, longest first, and only when enough of the
# word remains for the residue to be meaningful.
_SUFFIXES = ("ing", "es", "ed", "s")
_MIN_RESIDUE = 3


def load_lemma_table(path: str | Path) -> LemmaTable:
    """Two-column TSV: surface form, lemma.  Keys are case-folded."""
    table: LemmaTable = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[1]:
                raise ValueError(f"{path}:{line_no}: expected 'surface<TAB>lemma'")
            table[parts[0].casefold()] = parts[1].casefold()
    return table


def lemma(word: str, table: LemmaTable | None = None) -> str:
    w = word.casefold()
    if table and w in table:
        return table[w]
    for suffix in _SUFFIXES:
        if w.endswith(suffix) and len(w) - len(suffix) >= _MIN_RESIDUE:
            return w[:-len(suffix)]
    return w


def matching_ed(sent: SentenceRecord, ontology: Ontology) -> list[EventPrediction]:
    """A trigger prediction at every case-folded keyword occurrence."""
    preds: list[EventPrediction] = []
    seen: set[tuple[str, TokenSpan]] = set()
    for etype in ontology.event_types():
        for keyword in ontology.schemas[etype].keywords:
            if not keyword.split():
                continue
            for span in find_occurrences(sent.tokens, keyword, FOLD):
                if (etype, span) not in seen:
                    seen.add((etype, span))
                    preds.append(EventPrediction(etype, span, ()))
    return preds


def lemma_ed(sent: SentenceRecord, ontology: Ontology,
             lemmas: LemmaTable | None = None) -> list[EventPrediction]:
    """As matching_ed, but tokens and keywords are compared by lemma."""
    lemmatized = [lemma(t, lemmas) for t in sent.tokens]
    preds: list[EventPrediction] = []
    seen: set[tuple[str, TokenSpan]] = set()
    for etype in ontology.event_types():
        for keyword in ontology.schemas[etype].keywords:
            words = [lemma(w, lemmas) for w in keyword.split()]
            if not words:
                continue
            m = len(words)
            for i in range(len(lemmatized) - m + 1):
                if lemmatized[i:i + m] == words:
                    span = TokenSpan(i, i + m)
                    if (etype, span) not in seen:
                        seen.add((etype, span))
                        preds.append(EventPrediction(etype, span, ()))
    return preds


def run_baseline(corpus: Corpus, ontology: Ontology, kind: str,
                 lemmas: LemmaTable | None = None) -> list[PredictionRecord]:
    if kind == "matching":
        predict = lambda sent: matching_ed(sent, ontology)
    elif kind == "lemma":
        predict = lambda sent: lemma_ed(sent, ontology, lemmas)
    else:
        raise ValueError(f"unknown baseline {kind!r}; use 'matching' or 'lemma'")
    return [
        PredictionRecord(sent.doc_id, sent.sent_id, tuple(predict(sent)))
        for sent in corpus.sentences
    ]
