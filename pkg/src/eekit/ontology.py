"""Event ontology: type definitions, keywords, and slotted output templates.

An ontology maps each event type to a natural-language template whose
placeholder phrases stand for argument roles.  Templates are stored with an
explicit slot table (placeholder string -> role) because the mapping from a
phrase like "some way" to a role like Instrument is editorial data, not
something that can be inferred from the text.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

logger = logging.getLogger(__name__)

# Template kinds.
ED = "ED"
EAE = "EAE"
E2E = "E2E"

# Template variants (natural phrasing, role special tokens, HTML-like tags).
NATURAL = "natural"
SPECIAL_TOKEN = "special"
HTML_LIKE = "html"
VARIANTS = (NATURAL, SPECIAL_TOKEN, HTML_LIKE)

# Distinguished role marker for the trigger slot.  Role names never contain
# angle brackets, so this cannot collide with a real role.
TRIGGER_ROLE = "<Trigger>"

ED_TEMPLATE_TEXT = "Event trigger is <Trigger>."


class OntologyError(ValueError):
    """Raised when an ontology file or template is structurally invalid."""


@dataclass(frozen=True)
class TemplateSlot:
    """One placeholder of a template, bound to a role (or the trigger)."""

    placeholder: str
    role: str
    position: int


@dataclass(frozen=True)
class TemplateSpec:
    """A template string plus its ordered slot table.

    ``segments`` are the fixed text pieces around the slots; interleaving
    segments and placeholders reproduces ``text`` exactly.  There are always
    ``len(slots) + 1`` segments.
    """

    text: str
    slots: tuple[TemplateSlot, ...]
    kind: str
    segments: tuple[str, ...]

    def rejoin(self) -> str:
        parts = []
        for seg, slot in zip(self.segments, self.slots):
            parts.append(seg)
            parts.append(slot.placeholder)
        parts.append(self.segments[-1])
        return "".join(parts)

    def trigger_slot_index(self) -> int | None:
        for i, slot in enumerate(self.slots):
            if slot.role == TRIGGER_ROLE:
                return i
        return None


def build_template(text: str, slot_pairs: list[tuple[str, str]], kind: str) -> TemplateSpec:
    """Build a TemplateSpec, resolving each placeholder to its location.

    Placeholders are located by sequential leftmost search: each one is
    looked up starting after the previous slot's occurrence, so a phrase
    like "somebody" may legitimately reappear inside a later placeholder
    ("somebody or some organization").
    """
    slots = []
    segments = []
    pos = 0
    seen_roles = set()
    for i, (placeholder, role) in enumerate(slot_pairs):
        if role != TRIGGER_ROLE and not role:
            raise OntologyError(f"slot {i} of template {text!r} has an empty role")
        if role in seen_roles:
            raise OntologyError(f"role {role!r} bound to more than one slot in template {text!r}")
        seen_roles.add(role)
        if role == TRIGGER_ROLE and kind == EAE:
            raise OntologyError("trigger slot is not allowed in an EAE template")
        idx = text.find(placeholder, pos)
        if idx < 0:
            raise OntologyError(
                f"placeholder {placeholder!r} not found in template {text!r} "
                f"(searching after offset {pos}; slots must appear in order)"
            )
        segments.append(text[pos:idx])
        slots.append(TemplateSlot(placeholder, role, i))
        pos = idx + len(placeholder)
    segments.append(text[pos:])
    # A placeholder string recurring inside the fixed text would make the
    # slot location ambiguous; recurring inside another placeholder is fine.
    for slot in slots:
        if slot.placeholder and any(slot.placeholder in seg for seg in segments):
            raise OntologyError(
                f"placeholder {slot.placeholder!r} also occurs in the fixed text "
                f"of template {text!r}"
            )
    return TemplateSpec(text=text, slots=tuple(slots), kind=kind, segments=tuple(segments))


def template_from_segments(segments: list[str], roles: list[str],
                           placeholders: list[str], kind: str) -> TemplateSpec:
    """Build a TemplateSpec from explicit segments (used for variants whose
    placeholders may be empty strings and thus cannot be searched for)."""
    if len(segments) != len(roles) + 1 or len(roles) != len(placeholders):
        raise OntologyError("segments/roles/placeholders lengths are inconsistent")
    slots = tuple(
        TemplateSlot(ph, role, i) for i, (ph, role) in enumerate(zip(placeholders, roles))
    )
    parts = []
    for seg, slot in zip(segments, slots):
        parts.append(seg)
        parts.append(slot.placeholder)
    parts.append(segments[-1])
    return TemplateSpec(text="".join(parts), slots=slots, kind=kind, segments=tuple(segments))


@dataclass(frozen=True)
class EventSchema:
    """One event type: definition, keywords, roles, and its EAE template."""

    event_type: str
    definition: str
    keywords: tuple[str, ...]
    roles: frozenset[str]
    eae_template: TemplateSpec


@dataclass(frozen=True)
class Ontology:
    schemas: dict[str, EventSchema]
    role_universe: frozenset[str]
    ontology_id: str = field(default="", compare=False)

    def event_types(self) -> list[str]:
        return list(self.schemas)

    def __len__(self) -> int:
        return len(self.schemas)


def ed_template() -> TemplateSpec:
    """The fixed event-detection template shared by every event type."""
    return build_template(ED_TEMPLATE_TEXT, [("<Trigger>", TRIGGER_ROLE)], ED)


def e2e_template(schema: EventSchema, variant: str = NATURAL) -> TemplateSpec:
    """Concatenate the ED template and the schema's EAE template."""
    eae = render_variant(schema.eae_template, variant)
    ed = ed_template()
    segments = list(ed.segments[:-1])
    segments.append(ed.segments[-1] + " " + eae.segments[0])
    segments.extend(eae.segments[1:])
    roles = [slot.role for slot in ed.slots] + [slot.role for slot in eae.slots]
    placeholders = [slot.placeholder for slot in ed.slots] + [slot.placeholder for slot in eae.slots]
    return template_from_segments(segments, roles, placeholders, E2E)


def render_variant(spec: TemplateSpec, variant: str) -> TemplateSpec:
    """Render an EAE template in one of the three output-format variants.

    ``natural`` keeps the template as written.  ``special`` swaps each
    placeholder phrase for a role token like "<Person>".  ``html`` drops the
    connecting prose entirely and emits "<Role> </Role>" pairs; fills go
    between the opening and closing tags, so the placeholder is empty.
    """
    if spec.kind != EAE:
        raise OntologyError(f"variant rendering applies to EAE templates, got kind {spec.kind}")
    if variant == NATURAL:
        return spec
    roles = [slot.role for slot in spec.slots]
    if variant == SPECIAL_TOKEN:
        placeholders = [f"<{role}>" for role in roles]
        return template_from_segments(list(spec.segments), roles, placeholders, EAE)
    if variant == HTML_LIKE:
        segments = []
        for i, role in enumerate(roles):
            opener = f"<{role}> " if i == 0 else f"</{roles[i - 1]}> <{role}> "
            segments.append(opener)
        segments.append(f"</{roles[-1]}>")
        return template_from_segments(segments, roles, [""] * len(roles), EAE)
    raise OntologyError(f"unknown template variant {variant!r}")


def task_template(schema: EventSchema, task: str, variant: str = NATURAL) -> TemplateSpec:
    """The output template a given task expects for this event type."""
    if task == ED:
        return ed_template()
    if task == EAE:
        return render_variant(schema.eae_template, variant)
    if task == E2E:
        return e2e_template(schema, variant)
    raise OntologyError(f"unknown task {task!r}")


def _build_schema(entry: dict, role_universe: set[str]) -> EventSchema:
    etype = entry.get("type")
    if not etype:
        raise OntologyError("event entry without a 'type'")
    definition = entry.get("definition")
    if not definition:
        raise OntologyError(f"{etype}: missing definition")
    keywords = entry.get("keywords")
    if not keywords:
        raise OntologyError(f"{etype}: missing keywords")
    if len(keywords) != 3:
        logger.warning("%s: %d keywords (3 is the usual convention)", etype, len(keywords))
    template_text = entry.get("template")
    if template_text is None:
        raise OntologyError(f"{etype}: missing template")
    slot_pairs = [(s["placeholder"], s["role"]) for s in entry.get("slots", [])]
    for _, role in slot_pairs:
        if role not in role_universe:
            raise OntologyError(f"{etype}: slot role {role!r} is not a declared role")
    try:
        template = build_template(template_text, slot_pairs, EAE)
    except OntologyError as exc:
        raise OntologyError(f"{etype}: {exc}") from exc
    declared = entry.get("roles")
    if declared is not None:
        roles = frozenset(declared)
        for slot in template.slots:
            if slot.role not in roles:
                raise OntologyError(f"{etype}: slot role {slot.role!r} not declared in schema roles")
        unplaced = roles - {slot.role for slot in template.slots}
        if unplaced:
            logger.warning("%s: roles without a template slot can never be predicted: %s",
                           etype, ", ".join(sorted(unplaced)))
    else:
        roles = frozenset(slot.role for slot in template.slots)
    return EventSchema(
        event_type=etype,
        definition=definition,
        keywords=tuple(keywords),
        roles=roles,
        eae_template=template,
    )


def parse_ontology(data: dict, ontology_id: str = "") -> Ontology:
    roles = data.get("roles")
    if not roles:
        raise OntologyError("ontology file declares no roles")
    role_universe = set(roles)
    events = data.get("events")
    if not events:
        raise OntologyError("no schemas")
    schemas: dict[str, EventSchema] = {}
    for entry in events:
        schema = _build_schema(entry, role_universe)
        if schema.event_type in schemas:
            raise OntologyError(f"duplicate event type {schema.event_type!r}")
        schemas[schema.event_type] = schema
    return Ontology(schemas=schemas, role_universe=frozenset(role_universe),
                    ontology_id=ontology_id)


def load_ontology(path: str | Path) -> Ontology:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise OntologyError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise OntologyError(f"{path}: expected a JSON object")
    return parse_ontology(data, ontology_id=path.stem)


def ontology_to_dict(ontology: Ontology) -> dict:
    events = []
    for schema in ontology.schemas.values():
        entry = {
            "type": schema.event_type,
            "definition": schema.definition,
            "keywords": list(schema.keywords),
            "template": schema.eae_template.text,
            "slots": [
                {"placeholder": slot.placeholder, "role": slot.role}
                for slot in schema.eae_template.slots
            ],
        }
        unplaced = schema.roles - {slot.role for slot in schema.eae_template.slots}
        if unplaced:
            entry["roles"] = sorted(schema.roles)
        events.append(entry)
    return {"roles": sorted(ontology.role_universe), "events": events}


def save_ontology(ontology: Ontology, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(ontology_to_dict(ontology), indent=2, sort_keys=False, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


BUILTIN_ONTOLOGIES = ("ace", "ere")


def load_builtin_ontology(name: str) -> Ontology:
    """Load one of the shipped template sets ("ace" or "ere")."""
    if name not in BUILTIN_ONTOLOGIES:
        raise OntologyError(f"unknown builtin ontology {name!r}; choose from {BUILTIN_ONTOLOGIES}")
    text = resources.files("eekit.data").joinpath(f"{name}_ontology.json").read_text("utf-8")
    return parse_ontology(json.loads(text), ontology_id=name)
