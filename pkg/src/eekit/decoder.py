"""Parse generated sentences back into trigger/argument span predictions.

Decoding is the inverse of target construction: the output string is aligned
to the template's fixed segments (greedy, left to right), the captured text
between segments becomes each slot's fill, and fills are resolved to token
spans by string matching in the passage.  Every step is total: malformed
output degrades to fewer predictions plus diagnostics, never to an error.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import (EXACT, FOLD, ArgumentMention, SentenceRecord, TokenSpan,
                     find_occurrences)
from .ontology import EAE, TRIGGER_ROLE, EventSchema, TemplateSpec, task_template
from .promptgen import PromptConfig


@dataclass(frozen=True)
class Diagnostic:
    code: str
    detail: str


@dataclass(frozen=True)
class SlotFill:
    """Raw fill for one slot; empty values mean the placeholder was kept."""

    slot_index: int
    role: str
    values: tuple[str, ...]


@dataclass(frozen=True)
class ChunkParse:
    fills: tuple[SlotFill, ...]
    anchored: bool
    diagnostics: tuple[Diagnostic, ...]


@dataclass(frozen=True)
class EventPrediction:
    event_type: str
    trigger: TokenSpan
    arguments: tuple[ArgumentMention, ...]


@dataclass(frozen=True)
class DecodeResult:
    events: tuple[EventPrediction, ...]
    diagnostics: tuple[Diagnostic, ...]
    n_chunks: int
    n_anchored: int

    @property
    def anchored_any(self) -> bool:
        return self.n_anchored > 0


def _parse_chunk(chunk: str, spec: TemplateSpec) -> ChunkParse:
    segs = spec.segments
    fills: list[SlotFill] = []
    diagnostics: list[Diagnostic] = []
    start = chunk.find(segs[0])
    if start < 0:
        diagnostics.append(Diagnostic(
            "UnanchoredSegment", f"segment 0 {segs[0]!r} not found"))
        empty = tuple(SlotFill(i, slot.role, ()) for i, slot in enumerate(spec.slots))
        return ChunkParse(empty, False, tuple(diagnostics))
    pos = start + len(segs[0])
    anchored = True
    for i, slot in enumerate(spec.slots):
        nxt = segs[i + 1]
        if nxt == "" and i + 1 == len(spec.slots):
            j = len(chunk)
        else:
            j = chunk.find(nxt, pos)
        if j < 0:
            diagnostics.append(Diagnostic(
                "UnanchoredSegment", f"segment {i + 1} {nxt!r} not found"))
            fills.extend(SlotFill(k, s.role, ())
                         for k, s in enumerate(spec.slots) if k >= i)
            anchored = False
            break
        raw = chunk[pos:j]
        pos = j + len(nxt)
        if raw == slot.placeholder or not raw.strip():
            fills.append(SlotFill(i, slot.role, ()))
        else:
            fills.append(SlotFill(i, slot.role, (raw.strip(),)))
    return ChunkParse(tuple(fills), anchored, tuple(diagnostics))


def parse_output(output: str, spec: TemplateSpec, cfg: PromptConfig) -> list[ChunkParse]:
    """Split the output on the multi-event separator and align each chunk to
    the template.  Splitting a fill on the "and" joiner is deferred to span
    resolution, where a whole-phrase match takes precedence."""
    chunks = output.split(cfg.multi_event_separator)
    return [_parse_chunk(chunk, spec) for chunk in chunks]


def _occurrences(sent: SentenceRecord, text: str) -> list[TokenSpan]:
    if not text.split():
        return []
    spans = find_occurrences(sent.tokens, text, EXACT)
    if not spans:
        spans = find_occurrences(sent.tokens, text, FOLD)
    return spans


def _resolve_value(value: str, sent: SentenceRecord, cfg: PromptConfig):
    """Resolve one raw fill to (piece, occurrences) pairs plus misses.

    The unsplit string is matched first so that phrases containing the
    joiner word ("Bosnia and Herzegovina") stay whole; only when the whole
    phrase is absent is the fill split into multiple values."""
    occs = _occurrences(sent, value)
    if occs:
        return [(value, occs)], []
    if cfg.and_joiner in value:
        resolved, missing = [], []
        for piece in value.split(cfg.and_joiner):
            piece = piece.strip()
            if not piece:
                continue
            occs = _occurrences(sent, piece)
            if occs:
                resolved.append((piece, occs))
            else:
                missing.append(piece)
        return resolved, missing
    return [], [value]


def _closest(occs: list[TokenSpan], anchor: TokenSpan | None) -> TokenSpan:
    if anchor is None:
        return occs[0]
    return min(occs, key=lambda s: (abs(s.start - anchor.start), s.start))


def resolve_spans(chunks: list[ChunkParse], sent: SentenceRecord, event_type: str,
                  cfg: PromptConfig,
                  anchor_trigger: TokenSpan | None = None) -> DecodeResult:
    """Turn parsed fills into span predictions.

    Trigger fills contribute a prediction at every matching offset; argument
    fills resolve to the occurrence closest to the anchor trigger (ties to
    the smaller start).  Argument strings absent from the passage are
    dropped with a diagnostic, since exact-offset scoring could never credit
    them anyway.
    """
    events: list[EventPrediction] = []
    diagnostics: list[Diagnostic] = []
    n_anchored = 0
    for chunk in chunks:
        diagnostics.extend(chunk.diagnostics)
        if chunk.anchored:
            n_anchored += 1
        trigger_spans: list[TokenSpan] = []
        has_arg_fill = False
        arg_fills: list[tuple[str, str]] = []  # (role, value)
        for fill in chunk.fills:
            if fill.role == TRIGGER_ROLE:
                for value in fill.values:
                    resolved, missing = _resolve_value(value, sent, cfg)
                    for _, occs in resolved:
                        trigger_spans.extend(occs)
                    for miss in missing:
                        diagnostics.append(Diagnostic(
                            "UnmatchedString", f"trigger {miss!r} not in passage"))
            else:
                for value in fill.values:
                    has_arg_fill = True
                    arg_fills.append((fill.role, value))
        # Dedupe trigger offsets, earliest first.
        trigger_spans = sorted(set(trigger_spans))
        if anchor_trigger is not None:
            anchor = anchor_trigger
        elif trigger_spans:
            anchor = trigger_spans[0]
        else:
            anchor = None
        arguments: list[ArgumentMention] = []
        if anchor is None and has_arg_fill:
            diagnostics.append(Diagnostic(
                "ArgumentWithoutTrigger",
                "argument fills present but no trigger resolved"))
        elif anchor is not None:
            for role, value in arg_fills:
                resolved, missing = _resolve_value(value, sent, cfg)
                for piece, occs in resolved:
                    span = _closest(occs, anchor)
                    arguments.append(ArgumentMention(span, role, sent.span_text(span)))
                for miss in missing:
                    diagnostics.append(Diagnostic(
                        "HallucinatedArgument", f"{role}: {miss!r} not in passage"))
        if anchor_trigger is not None:
            events.append(EventPrediction(event_type, anchor_trigger, tuple(arguments)))
        else:
            # Arguments are carried by every matched trigger offset so that
            # "choose all span offsets" keeps trigger and argument counts in step.
            for span in trigger_spans:
                events.append(EventPrediction(event_type, span, tuple(arguments)))
    deduped = []
    seen = set()
    for ev in events:
        if ev not in seen:
            seen.add(ev)
            deduped.append(ev)
    return DecodeResult(tuple(deduped), tuple(diagnostics),
                        n_chunks=len(chunks), n_anchored=n_anchored)


def decode(output: str, sent: SentenceRecord, schema: EventSchema, task: str,
           cfg: PromptConfig, anchor: TokenSpan | None = None) -> DecodeResult:
    spec = task_template(schema, task, cfg.template_variant)
    if task == EAE and anchor is None:
        raise ValueError("EAE decoding requires the query trigger as anchor")
    chunks = parse_output(output, spec, cfg)
    return resolve_spans(chunks, sent, schema.event_type, cfg, anchor_trigger=anchor)


@dataclass(frozen=True)
class PredictionRecord:
    doc_id: str
    sent_id: str
    events: tuple[EventPrediction, ...]
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def key(self) -> tuple[str, str]:
        return (self.doc_id, self.sent_id)


def prediction_to_dict(rec: PredictionRecord) -> dict:
    return {
        "doc_id": rec.doc_id,
        "sent_id": rec.sent_id,
        "events": [
            {
                "event_type": ev.event_type,
                "trigger": {"start": ev.trigger.start, "end": ev.trigger.end},
                "arguments": [
                    {"start": a.span.start, "end": a.span.end, "text": a.text,
                     "role": a.role}
                    for a in ev.arguments
                ],
            }
            for ev in rec.events
        ],
        "diagnostics": [{"code": d.code, "detail": d.detail} for d in rec.diagnostics],
    }


def prediction_from_dict(obj: dict) -> PredictionRecord:
    events = tuple(
        EventPrediction(
            ev["event_type"],
            TokenSpan(ev["trigger"]["start"], ev["trigger"]["end"]),
            tuple(ArgumentMention(TokenSpan(a["start"], a["end"]), a["role"],
                                  a.get("text", ""))
                  for a in ev.get("arguments", [])),
        )
        for ev in obj.get("events", [])
    )
    diags = tuple(Diagnostic(d["code"], d.get("detail", ""))
                  for d in obj.get("diagnostics", []))
    return PredictionRecord(obj.get("doc_id", ""), obj.get("sent_id", ""), events, diags)


def write_predictions(records, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(prediction_to_dict(rec), sort_keys=True,
                                ensure_ascii=False) + "\n")


def read_predictions(path: str | Path) -> list[PredictionRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(prediction_from_dict(json.loads(line)))
    return records
