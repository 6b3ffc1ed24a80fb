"""Build model inputs (prompts) and training targets for ED, EAE, and E2E.

A prompt concatenates the passage with weak-supervision components (type
definition, keyword list, query trigger) and the output template.  A target
is the template with its placeholders replaced by the gold mention texts;
slots with no gold argument keep their placeholder so that "no prediction"
is expressible.
"""
from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import Corpus, EventMention, SentenceRecord, TokenSpan
from .ontology import (E2E, EAE, ED, NATURAL, TRIGGER_ROLE, EventSchema,
                       Ontology, TemplateSpec, task_template)

logger = logging.getLogger(__name__)

TASKS = (ED, EAE, E2E)


@dataclass(frozen=True)
class PromptConfig:
    task: str = E2E
    include_definition: bool = True
    include_keywords: bool = True
    include_template: bool = True
    template_variant: str = NATURAL
    segment_separator: str = " \n "
    multi_event_separator: str = " <sep> "
    and_joiner: str = " and "

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")

    def for_task(self, task: str) -> "PromptConfig":
        return replace(self, task=task)


@dataclass(frozen=True)
class TrainingConfig:
    m: int = 15
    seed: int = 0
    resample_each_epoch: bool = True

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be >= 0")


@dataclass(frozen=True)
class PromptInstance:
    task: str
    event_type: str
    input_text: str
    target_text: str | None
    doc_id: str
    sent_id: str
    query_trigger: TokenSpan | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.doc_id, self.sent_id)


def keywords_sentence(schema: EventSchema) -> str:
    return f"Similar triggers such as {', '.join(schema.keywords)}."


def query_trigger_sentence(sent: SentenceRecord, trigger: TokenSpan) -> str:
    return f"The event trigger word is {sent.span_text(trigger)}."


def build_prompt(sent: SentenceRecord, schema: EventSchema, cfg: PromptConfig,
                 query_trigger: TokenSpan | None = None) -> str:
    if cfg.task == EAE:
        if query_trigger is None:
            raise ValueError("EAE prompts require a query trigger")
        if query_trigger.end > len(sent.tokens):
            raise ValueError(f"query trigger {query_trigger} out of range for "
                             f"{len(sent.tokens)} tokens")
    pieces = [" ".join(sent.tokens)]
    if cfg.include_definition:
        pieces.append(schema.definition)
    if cfg.include_keywords and cfg.task in (ED, E2E):
        pieces.append(keywords_sentence(schema))
    if cfg.task == EAE:
        pieces.append(query_trigger_sentence(sent, query_trigger))
    if cfg.include_template:
        pieces.append(task_template(schema, cfg.task, cfg.template_variant).text)
    return cfg.segment_separator.join(pieces)


def select_gold_events(sent: SentenceRecord, schema: EventSchema, task: str,
                       query_trigger: TokenSpan | None) -> list[EventMention]:
    """The gold events a target describes, in trigger-start order."""
    events = [ev for ev in sent.events if ev.event_type == schema.event_type]
    if task == EAE:
        if query_trigger is None:
            raise ValueError("EAE targets require a query trigger")
        events = [ev for ev in events if ev.trigger == query_trigger]
    return sorted(events, key=lambda ev: (ev.trigger.start, ev.trigger.end))


def event_fills(event: EventMention, spec: TemplateSpec) -> dict[int, list[str]]:
    """Per-slot gold fill values for one event (empty list = keep placeholder)."""
    fills: dict[int, list[str]] = {}
    slot_roles = {slot.role for slot in spec.slots}
    if spec.kind != ED:  # the ED template carries no argument slots by design
        for role in sorted({a.role for a in event.arguments} - slot_roles - {TRIGGER_ROLE}):
            logger.warning("%s: gold role %r has no template slot; argument skipped",
                           event.event_type, role)
    for i, slot in enumerate(spec.slots):
        if slot.role == TRIGGER_ROLE:
            fills[i] = [event.trigger_text]
        else:
            fills[i] = [a.text for a in event.arguments if a.role == slot.role]
    return fills


def render_filled(spec: TemplateSpec, fills: dict[int, list[str]],
                  cfg: PromptConfig) -> str:
    parts = []
    for i, slot in enumerate(spec.slots):
        parts.append(spec.segments[i])
        values = fills.get(i, [])
        parts.append(cfg.and_joiner.join(values) if values else slot.placeholder)
    parts.append(spec.segments[-1])
    return "".join(parts)


def build_target(sent: SentenceRecord, schema: EventSchema, task: str,
                 cfg: PromptConfig, query_trigger: TokenSpan | None = None) -> str:
    spec = task_template(schema, task, cfg.template_variant)
    events = select_gold_events(sent, schema, task, query_trigger)
    if not events:
        return spec.text
    rendered = [render_filled(spec, event_fills(ev, spec), cfg) for ev in events]
    return cfg.multi_event_separator.join(rendered)


def _negative_types(ontology: Ontology, present: set[str]) -> list[str]:
    return [t for t in ontology.event_types() if t not in present]


def _sample_negatives(available: list[str], m: int, rng_key: str) -> list[str]:
    if m > len(available):
        logger.warning("m=%d exceeds %d available negative types; clamping",
                       m, len(available))
        m = len(available)
    if m == 0:
        return []
    rng = random.Random(rng_key)
    return rng.sample(available, m)


def build_training_set(corpus: Corpus, ontology: Ontology, task: str,
                       pcfg: PromptConfig, tcfg: TrainingConfig,
                       epoch: int = 0) -> list[PromptInstance]:
    """One positive instance per annotated event type (per trigger for EAE)
    plus m sampled negative types whose target is the unfilled template.

    Negative sampling draws from a per-sentence substream keyed on the seed
    and the sentence identity, so parallel or reordered construction cannot
    change the output.  ``epoch`` enters the key only when the config asks
    for per-epoch resampling.
    """
    pcfg = pcfg.for_task(task)
    epoch_key = epoch if tcfg.resample_each_epoch else 0
    instances: list[PromptInstance] = []
    for sent in corpus.sentences:
        present = {ev.event_type for ev in sent.events}
        available = _negative_types(ontology, present)
        if task in (ED, E2E):
            for etype in sorted(present):
                schema = ontology.schemas[etype]
                instances.append(PromptInstance(
                    task=task, event_type=etype,
                    input_text=build_prompt(sent, schema, pcfg),
                    target_text=build_target(sent, schema, task, pcfg),
                    doc_id=sent.doc_id, sent_id=sent.sent_id))
            key = f"{tcfg.seed}:{sent.doc_id}:{sent.sent_id}:{epoch_key}"
            for etype in _sample_negatives(available, tcfg.m, key):
                schema = ontology.schemas[etype]
                instances.append(PromptInstance(
                    task=task, event_type=etype,
                    input_text=build_prompt(sent, schema, pcfg),
                    target_text=build_target(sent, schema, task, pcfg),
                    doc_id=sent.doc_id, sent_id=sent.sent_id))
        else:  # EAE: one positive per gold trigger, negatives share the trigger
            ordered = sorted(sent.events, key=lambda ev: (ev.trigger.start, ev.trigger.end,
                                                          ev.event_type))
            for ti, event in enumerate(ordered):
                schema = ontology.schemas[event.event_type]
                instances.append(PromptInstance(
                    task=task, event_type=event.event_type,
                    input_text=build_prompt(sent, schema, pcfg, event.trigger),
                    target_text=build_target(sent, schema, task, pcfg, event.trigger),
                    doc_id=sent.doc_id, sent_id=sent.sent_id,
                    query_trigger=event.trigger))
                key = f"{tcfg.seed}:{sent.doc_id}:{sent.sent_id}:{ti}:{epoch_key}"
                for etype in _sample_negatives(available, tcfg.m, key):
                    schema = ontology.schemas[etype]
                    instances.append(PromptInstance(
                        task=task, event_type=etype,
                        input_text=build_prompt(sent, schema, pcfg, event.trigger),
                        target_text=build_target(sent, schema, task, pcfg, event.trigger),
                        doc_id=sent.doc_id, sent_id=sent.sent_id,
                        query_trigger=event.trigger))
    return instances


TriggerTable = dict[tuple[str, str], list[tuple[str, TokenSpan]]]


def gold_trigger_table(corpus: Corpus) -> TriggerTable:
    table: TriggerTable = {}
    for sent in corpus.sentences:
        entries = [(ev.event_type, ev.trigger) for ev in sent.events]
        entries.sort(key=lambda e: (e[1].start, e[1].end, e[0]))
        table[sent.key] = entries
    return table


def build_inference_set(corpus: Corpus, ontology: Ontology, task: str,
                        pcfg: PromptConfig,
                        triggers: TriggerTable | None = None) -> list[PromptInstance]:
    """Enumerate all event types per sentence (ED/E2E), or one instance per
    supplied trigger (EAE).  Instances carry no target."""
    pcfg = pcfg.for_task(task)
    instances: list[PromptInstance] = []
    if task in (ED, E2E):
        for sent in corpus.sentences:
            for etype in ontology.event_types():
                schema = ontology.schemas[etype]
                instances.append(PromptInstance(
                    task=task, event_type=etype,
                    input_text=build_prompt(sent, schema, pcfg),
                    target_text=None,
                    doc_id=sent.doc_id, sent_id=sent.sent_id))
        return instances
    if triggers is None:
        raise ValueError("EAE inference requires a trigger table")
    for sent in corpus.sentences:
        for etype, trigger in triggers.get(sent.key, []):
            schema = ontology.schemas.get(etype)
            if schema is None:
                logger.warning("trigger table names unknown event type %r; skipped", etype)
                continue
            instances.append(PromptInstance(
                task=task, event_type=etype,
                input_text=build_prompt(sent, schema, pcfg, trigger),
                target_text=None,
                doc_id=sent.doc_id, sent_id=sent.sent_id,
                query_trigger=trigger))
    return instances


def instance_to_dict(inst: PromptInstance) -> dict:
    obj = {
        "task": inst.task,
        "event_type": inst.event_type,
        "input": inst.input_text,
        "doc_id": inst.doc_id,
        "sent_id": inst.sent_id,
    }
    if inst.target_text is not None:
        obj["target"] = inst.target_text
    if inst.query_trigger is not None:
        obj["trigger"] = {"start": inst.query_trigger.start,
                          "end": inst.query_trigger.end}
    return obj


def instance_from_dict(obj: dict) -> PromptInstance:
    trigger = obj.get("trigger")
    return PromptInstance(
        task=obj["task"],
        event_type=obj["event_type"],
        input_text=obj["input"],
        target_text=obj.get("target"),
        doc_id=obj.get("doc_id", ""),
        sent_id=obj.get("sent_id", ""),
        query_trigger=TokenSpan(trigger["start"], trigger["end"]) if trigger else None,
    )


def write_instances(instances, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(instance_to_dict(inst), sort_keys=True,
                                ensure_ascii=False) + "\n")


def read_instances(path: str | Path) -> list[PromptInstance]:
    instances = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                instances.append(instance_from_dict(json.loads(line)))
    return instances
