"""Sentence-level event corpora: loading, validation, stats, and span search.

The canonical corpus file is JSON Lines, one sentence record per line.  All
spans are half-open token-index ranges; mention texts must equal the
whitespace join of the covered tokens, which is validated at load time.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .ontology import Ontology

EXACT = "exact"
FOLD = "fold"


class CorpusError(ValueError):
    """Raised when a corpus file violates the canonical format."""


@dataclass(frozen=True, order=True)
class TokenSpan:
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise CorpusError(f"invalid span [{self.start}, {self.end})")


@dataclass(frozen=True)
class ArgumentMention:
    span: TokenSpan
    role: str
    text: str


@dataclass(frozen=True)
class EventMention:
    event_type: str
    trigger: TokenSpan
    trigger_text: str
    arguments: tuple[ArgumentMention, ...]


@dataclass(frozen=True)
class SentenceRecord:
    doc_id: str
    sent_id: str
    tokens: tuple[str, ...]
    events: tuple[EventMention, ...]

    @property
    def key(self) -> tuple[str, str]:
        return (self.doc_id, self.sent_id)

    def span_text(self, span: TokenSpan) -> str:
        return " ".join(self.tokens[span.start:span.end])


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[SentenceRecord, ...]
    ontology_id: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def by_key(self) -> dict[tuple[str, str], SentenceRecord]:
        return {sent.key: sent for sent in self.sentences}

    def doc_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for sent in self.sentences:
            seen.setdefault(sent.doc_id, None)
        return list(seen)


@dataclass(frozen=True)
class StatsReport:
    """The per-split statistics columns: docs, sentences, events, distinct
    event types, arguments, distinct argument roles."""

    docs: int
    sents: int
    events: int
    event_types: int
    args: int
    arg_types: int

    HEADERS = ("#Docs", "#Sents", "#Events", "#Event Types", "#Args", "#Arg Types")

    def as_row(self) -> tuple[int, ...]:
        return (self.docs, self.sents, self.events, self.event_types,
                self.args, self.arg_types)


def _where(doc_id, sent_id, line_no) -> str:
    return f"record {doc_id}/{sent_id} (line {line_no})"


def _parse_span(obj: dict, n_tokens: int, what: str, where: str) -> TokenSpan:
    try:
        start, end = int(obj["start"]), int(obj["end"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"{where}: malformed {what} span: {exc}") from exc
    if not (0 <= start < end <= n_tokens):
        raise CorpusError(f"{where}: {what} span [{start}, {end}) out of range "
                          f"for {n_tokens} tokens")
    return TokenSpan(start, end)


def parse_sentence(obj: dict, ontology: Ontology, line_no: int = 0) -> SentenceRecord:
    doc_id = obj.get("doc_id", "")
    sent_id = obj.get("sent_id", "")
    where = _where(doc_id, sent_id, line_no)
    tokens = obj.get("tokens")
    if not tokens:
        raise CorpusError(f"{where}: empty token list")
    tokens = tuple(str(t) for t in tokens)
    events = []
    for ev in obj.get("events", []):
        etype = ev.get("event_type", "")
        schema = ontology.schemas.get(etype)
        if schema is None:
            raise CorpusError(f"{where}: unknown event type {etype!r}")
        trig = _parse_span(ev.get("trigger", {}), len(tokens), "trigger", where)
        trig_text = ev.get("trigger", {}).get("text", "")
        joined = " ".join(tokens[trig.start:trig.end])
        if trig_text != joined:
            raise CorpusError(f"{where}: trigger text {trig_text!r} does not match "
                              f"tokens {joined!r}")
        args = []
        for arg in ev.get("arguments", []):
            role = arg.get("role", "")
            if role not in schema.roles:
                raise CorpusError(f"{where}: role {role!r} is not valid for {etype}")
            span = _parse_span(arg, len(tokens), f"argument ({role})", where)
            text = arg.get("text", "")
            joined = " ".join(tokens[span.start:span.end])
            if text != joined:
                raise CorpusError(f"{where}: argument text {text!r} does not match "
                                  f"tokens {joined!r}")
            args.append(ArgumentMention(span, role, text))
        events.append(EventMention(etype, trig, trig_text, tuple(args)))
    return SentenceRecord(doc_id, sent_id, tokens, tuple(events))


def load_corpus(path: str | Path, ontology: Ontology) -> Corpus:
    path = Path(path)
    sentences = []
    seen_keys = set()
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{line_no}: not valid JSON: {exc}") from exc
            sent = parse_sentence(obj, ontology, line_no)
            if sent.key in seen_keys:
                raise CorpusError(f"{path}:{line_no}: duplicate sentence key {sent.key}")
            seen_keys.add(sent.key)
            sentences.append(sent)
    return Corpus(tuple(sentences), ontology_id=ontology.ontology_id)


def sentence_to_dict(sent: SentenceRecord) -> dict:
    return {
        "doc_id": sent.doc_id,
        "sent_id": sent.sent_id,
        "tokens": list(sent.tokens),
        "events": [
            {
                "event_type": ev.event_type,
                "trigger": {"start": ev.trigger.start, "end": ev.trigger.end,
                            "text": ev.trigger_text},
                "arguments": [
                    {"start": a.span.start, "end": a.span.end, "text": a.text,
                     "role": a.role}
                    for a in ev.arguments
                ],
            }
            for ev in sent.events
        ],
    }


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for sent in corpus.sentences:
            fh.write(json.dumps(sentence_to_dict(sent), sort_keys=True,
                                ensure_ascii=False) + "\n")


def corpus_stats(corpus: Corpus) -> StatsReport:
    docs = set()
    events = 0
    etypes = set()
    args = 0
    roles = set()
    for sent in corpus.sentences:
        docs.add(sent.doc_id)
        for ev in sent.events:
            events += 1
            etypes.add(ev.event_type)
            for arg in ev.arguments:
                args += 1
                roles.add(arg.role)
    return StatsReport(docs=len(docs), sents=len(corpus.sentences), events=events,
                       event_types=len(etypes), args=args, arg_types=len(roles))


def find_occurrences(tokens, query: str, case_mode: str = EXACT) -> list[TokenSpan]:
    """All token-aligned occurrences of the whitespace-tokenized query,
    in increasing start order.  ``fold`` compares case-insensitively."""
    words = query.split()
    if not words:
        raise ValueError("query must be non-empty")
    if case_mode == FOLD:
        haystack = [t.casefold() for t in tokens]
        words = [w.casefold() for w in words]
    elif case_mode == EXACT:
        haystack = list(tokens)
    else:
        raise ValueError(f"unknown case mode {case_mode!r}")
    m = len(words)
    spans = []
    for i in range(len(haystack) - m + 1):
        if haystack[i:i + m] == words:
            spans.append(TokenSpan(i, i + m))
    return spans


def convert_oneie(in_path: str | Path, out_path: str | Path) -> int:
    """Convert OneIE-style preprocessed JSON lines to the canonical format.

    Field renaming plus entity-id resolution only; tokens are copied as-is
    and mention texts are re-derived from the token span so the output is
    guaranteed loadable.  Returns the number of records written.
    """
    n = 0
    with Path(in_path).open(encoding="utf-8") as src, \
            Path(out_path).open("w", encoding="utf-8") as dst:
        for line_no, line in enumerate(src, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            tokens = obj.get("tokens")
            if not tokens:
                raise CorpusError(f"{in_path}:{line_no}: record without tokens")
            sent_id = obj.get("sent_id", obj.get("wnd_id", ""))
            entities = {e["id"]: e for e in obj.get("entity_mentions", [])}
            events = []
            for ev in obj.get("event_mentions", []):
                trig = ev["trigger"]
                arguments = []
                for arg in ev.get("arguments", []):
                    ent = entities.get(arg.get("entity_id"))
                    if ent is None:
                        raise CorpusError(
                            f"{in_path}:{line_no}: argument references unknown "
                            f"entity {arg.get('entity_id')!r}")
                    arguments.append({
                        "start": ent["start"],
                        "end": ent["end"],
                        "text": " ".join(tokens[ent["start"]:ent["end"]]),
                        "role": arg["role"],
                    })
                events.append({
                    "event_type": ev["event_type"],
                    "trigger": {
                        "start": trig["start"],
                        "end": trig["end"],
                        "text": " ".join(tokens[trig["start"]:trig["end"]]),
                    },
                    "arguments": arguments,
                })
            record = {
                "doc_id": obj.get("doc_id", ""),
                "sent_id": sent_id,
                "tokens": tokens,
                "events": events,
            }
            dst.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
            n += 1
    return n
