"""Tour of the shipped template registries and the output-format variants."""
from eekit.ontology import (e2e_template, load_builtin_ontology,
                            render_variant)

ace = load_builtin_ontology("ace")
ere = load_builtin_ontology("ere")
print(f"ACE registry: {len(ace)} event types, {len(ace.role_universe)} roles")
print(f"ERE registry: {len(ere)} event types, {len(ere.role_universe)} roles")

schema = ace.schemas["Conflict:Attack"]
print("\nEvent type:", schema.event_type)
print("Definition:", schema.definition)
print("Keywords:  ", ", ".join(schema.keywords))
print("EAE template:", schema.eae_template.text)
for slot in schema.eae_template.slots:
    print(f"  slot {slot.position}: {slot.placeholder!r} -> {slot.role}")

print("\nThe end-to-end template prepends the trigger part:")
print(" ", e2e_template(schema).text)

print("\nOutput-format variants for Life:Be-Born:")
born = ace.schemas["Life:Be-Born"].eae_template
for variant in ("natural", "special", "html"):
    print(f"  {variant:8s} {render_variant(born, variant).text}")

print("\nEvery template splits into fixed segments around its slots and")
print("rejoins byte-for-byte; that property is what makes decoding exact:")
spec = schema.eae_template
print("  segments:", spec.segments)
assert spec.rejoin() == spec.text
