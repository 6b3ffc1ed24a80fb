"""Build prompts and training targets for one annotated sentence."""
from eekit.corpus import (ArgumentMention, EventMention, SentenceRecord,
                          TokenSpan)
from eekit.ontology import load_builtin_ontology
from eekit.promptgen import PromptConfig, build_prompt, build_target

ace = load_builtin_ontology("ace")
schema = ace.schemas["Conflict:Attack"]

sent = SentenceRecord(
    doc_id="demo", sent_id="s1",
    tokens=("Palestinian", "detonated", "a", "bomb", "."),
    events=(EventMention(
        "Conflict:Attack", TokenSpan(1, 2), "detonated",
        (ArgumentMention(TokenSpan(0, 1), "Attacker", "Palestinian"),
         ArgumentMention(TokenSpan(3, 4), "Instrument", "bomb"))),),
)

cfg = PromptConfig(task="E2E")
print("=== end-to-end prompt ===")
print(build_prompt(sent, schema, cfg))
print("\n=== training target (gold-filled template) ===")
print(build_target(sent, schema, "E2E", cfg))

print("\nUnfilled slots keep their placeholder; an absent event type just")
print("copies the template, which is how negative examples look:")
print(build_target(sent, ace.schemas["Life:Marry"], "E2E", cfg))

print("\n=== argument-extraction prompt (given the trigger) ===")
eae_cfg = PromptConfig(task="EAE")
print(build_prompt(sent, schema, eae_cfg, query_trigger=TokenSpan(1, 2)))

print("\nAblation toggles strip prompt components:")
bare = PromptConfig(task="ED", include_definition=False,
                    include_keywords=False, include_template=False)
print("  passage only:", build_prompt(sent, schema, bare))
