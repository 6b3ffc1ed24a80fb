"""Deterministic synthetic ontologies and corpora for tests and demos.

Sentences are built from globally disjoint token families (fillers ``w*``,
argument entities ``e*``, trigger keywords ``kw*``), so every gold mention
text occurs exactly once in its sentence.  That makes the oracle round trip
exact: decoding a gold-filled template recovers the gold annotation.
"""
from __future__ import annotations

import random

from .corpus import ArgumentMention, Corpus, EventMention, SentenceRecord, TokenSpan
from .ontology import Ontology, parse_ontology

_ROLE_POOL = ("Agent", "Theme", "Place", "Source", "Goal", "Helper", "Topic", "Device")

_PATTERNS = {
    1: "{p0} took part in {verb}.",
    2: "{p0} did {verb} to {p1}.",
    3: "{p0} did {verb} to {p1} at {p2}.",
    4: "{p0} did {verb} to {p1} at {p2} using {p3}.",
}

_INFLECTIONS = ("ed", "ing", "s", "es")


def make_ontology(n_types: int = 20, n_roles: int = 6, seed: int = 7) -> Ontology:
    if not (1 <= n_roles <= len(_ROLE_POOL)):
        raise ValueError(f"n_roles must be in [1, {len(_ROLE_POOL)}]")
    rng = random.Random(seed)
    roles = list(_ROLE_POOL[:n_roles])
    events = []
    for i in range(n_types):
        verb = f"act{i:02d}"
        n_slots = rng.randint(1, min(4, n_roles))
        slot_roles = rng.sample(roles, n_slots)
        placeholders = [f"some {r.lower()}" for r in slot_roles]
        text = _PATTERNS[n_slots].format(verb=verb,
                                         **{f"p{j}": ph for j, ph in enumerate(placeholders)})
        events.append({
            "type": f"Synth:Act{i:02d}",
            "definition": f"The event is related to synthetic activity {verb}.",
            "keywords": [f"kw{i:02d}a", f"kw{i:02d}b", f"kw{i:02d}c"],
            "template": text,
            "slots": [{"placeholder": ph, "role": r}
                      for ph, r in zip(placeholders, slot_roles)],
        })
    return parse_ontology({"roles": roles, "events": events}, ontology_id=f"synth{n_types}")


def make_corpus(ontology: Ontology, n_sentences: int = 200, seed: int = 11,
                sents_per_doc: int = 4, p_zero_events: float = 0.15,
                p_second_event: float = 0.25, arg_prob: float = 0.7,
                multi_value_prob: float = 0.15, inflect_frac: float = 0.0,
                with_args: bool = True) -> Corpus:
    """Generate sentences with 0-2 gold events whose mention texts are
    unique within the sentence.  ``inflect_frac`` appends a regular suffix
    to that fraction of trigger tokens (for the lemma-baseline setting)."""
    rng = random.Random(seed)
    types = ontology.event_types()
    sentences = []
    for si in range(n_sentences):
        draw = rng.random()
        if draw < p_zero_events:
            n_events = 0
        elif draw < 1.0 - p_second_event:
            n_events = 1
        else:
            n_events = 2
        entity_counter = 0
        used_keyword_slots: dict[str, list[int]] = {}
        units: list[tuple[str, object]] = []  # ("filler"|"trigger"|"arg", payload)
        planned = []
        for _ in range(n_events):
            etype = rng.choice(types)
            schema = ontology.schemas[etype]
            used = used_keyword_slots.setdefault(etype, [])
            free = [k for k in range(3) if k not in used]
            if not free:
                continue
            kslot = rng.choice(free)
            used.append(kslot)
            trigger_token = schema.keywords[kslot]
            if inflect_frac > 0 and rng.random() < inflect_frac:
                trigger_token = trigger_token + rng.choice(_INFLECTIONS)
            event_id = len(planned)
            units.append(("trigger", (event_id, trigger_token)))
            args = []
            if with_args:
                for slot in schema.eae_template.slots:
                    if rng.random() >= arg_prob:
                        continue
                    n_mentions = 2 if rng.random() < multi_value_prob else 1
                    for _ in range(n_mentions):
                        width = rng.randint(1, 2)
                        tokens = tuple(f"e{si}x{entity_counter + j}" for j in range(width))
                        entity_counter += width
                        args.append((slot.role, tokens))
                        units.append(("arg", (event_id, len(args) - 1, tokens)))
            planned.append({"etype": etype, "trigger_token": trigger_token, "args": args})
        for j in range(rng.randint(3, 8)):
            units.append(("filler", f"w{j}"))
        rng.shuffle(units)

        tokens: list[str] = []
        trigger_spans: dict[int, TokenSpan] = {}
        arg_spans: dict[tuple[int, int], TokenSpan] = {}
        for kind, payload in units:
            if kind == "filler":
                tokens.append(payload)
            elif kind == "trigger":
                event_id, trig = payload
                trigger_spans[event_id] = TokenSpan(len(tokens), len(tokens) + 1)
                tokens.append(trig)
            else:
                event_id, arg_id, arg_tokens = payload
                arg_spans[(event_id, arg_id)] = TokenSpan(len(tokens),
                                                          len(tokens) + len(arg_tokens))
                tokens.extend(arg_tokens)

        events = []
        for event_id, plan in enumerate(planned):
            trig_span = trigger_spans[event_id]
            arguments = tuple(
                ArgumentMention(arg_spans[(event_id, ai)], role, " ".join(arg_tokens))
                for ai, (role, arg_tokens) in enumerate(plan["args"])
            )
            events.append(EventMention(plan["etype"], trig_span,
                                       plan["trigger_token"], arguments))
        events.sort(key=lambda ev: (ev.trigger.start, ev.trigger.end))
        sentences.append(SentenceRecord(
            doc_id=f"doc{si // sents_per_doc:04d}",
            sent_id=f"s{si:04d}",
            tokens=tuple(tokens),
            events=tuple(events),
        ))
    return Corpus(tuple(sentences), ontology_id=ontology.ontology_id)
