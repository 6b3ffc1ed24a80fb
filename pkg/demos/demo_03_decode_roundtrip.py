"""Decode generated sentences back into span predictions.

Decoding anchors the output on the template's fixed segments, captures the
text in between as slot fills, and resolves fills to token offsets by string
matching (all offsets for triggers, the trigger-closest offset for
arguments).  It is total: garbage in, diagnostics out.
"""
from eekit.corpus import SentenceRecord, TokenSpan
from eekit.decoder import decode
from eekit.ontology import load_builtin_ontology
from eekit.promptgen import PromptConfig

ace = load_builtin_ontology("ace")
schema = ace.schemas["Conflict:Attack"]
cfg = PromptConfig(task="E2E")

sent = SentenceRecord("demo", "s1",
                      ("Palestinian", "detonated", "a", "bomb", "."), ())

print("=== a well-formed generation ===")
output = ("Event trigger is detonated. Palestinian attacked some facility, "
          "someone, or some organization by bomb in somewhere.")
result = decode(output, sent, schema, "E2E", cfg)
for ev in result.events:
    print(f"{ev.event_type} trigger={ev.trigger}")
    for arg in ev.arguments:
        print(f"  {arg.role}: {arg.text!r} at {arg.span}")

print("\n=== ambiguity: the argument string occurs twice ===")
tokens = ("bomb", "squad", "said", "rebels", "hit", "town", "with", "bomb")
ambiguous = SentenceRecord("demo", "s2", tokens, ())
output = ("Event trigger is hit. rebels attacked town by bomb in somewhere.")
result = decode(output, ambiguous, schema, "E2E", cfg)
inst = [a for ev in result.events for a in ev.arguments
        if a.role == "Instrument"]
print(f"trigger at 4; 'bomb' occurs at 0 and 7; resolved to {inst[0].span}"
      " (closest to the trigger)")

print("\n=== hallucinated strings are dropped, with diagnostics ===")
output = ("Event trigger is hit. martians attacked town by ray-gun in "
          "somewhere.")
result = decode(output, ambiguous, schema, "E2E", cfg)
print("events:", [(ev.event_type, ev.trigger) for ev in result.events])
for diag in result.diagnostics:
    print(f"  {diag.code}: {diag.detail}")

print("\n=== total on garbage ===")
result = decode("%$#@!! nonsense", ambiguous, schema, "E2E", cfg)
print(f"events: {len(result.events)}, diagnostics: {len(result.diagnostics)},"
      " no exception")
