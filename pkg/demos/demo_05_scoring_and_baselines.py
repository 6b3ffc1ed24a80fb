"""The verification loop: oracle round trip, corruption, and baselines.

The oracle generator replays gold-filled targets through the real pipeline
(prompt enumeration, generation contract, decoding, scoring), so a perfect
score here certifies the deterministic machinery end to end.
"""
from eekit import synth
from eekit.baselines import run_baseline
from eekit.genio import CorruptionConfig, OracleGenerator, run_pipeline
from eekit.metrics import LABELS, matrix_text, score, score_matrix
from eekit.promptgen import PromptConfig

ontology = synth.make_ontology(n_types=12, n_roles=6, seed=7)
corpus = synth.make_corpus(ontology, n_sentences=120, seed=11)
cfg = PromptConfig()

runs = []
for label, corruption in [
    ("clean", None),
    ("recase=1.0", CorruptionConfig(recase=1.0, seed=5)),
    ("drop=0.5", CorruptionConfig(drop_slot=0.5, seed=5)),
    ("garble=1.0", CorruptionConfig(garble=1.0, seed=5)),
]:
    oracle = OracleGenerator(corpus, ontology, corruption)
    records, _ = run_pipeline(corpus, ontology, oracle, "e2e", cfg)
    runs.append((label, records))

print("Oracle outputs, increasingly corrupted (F1 per criterion):")
print(matrix_text(score_matrix(runs, corpus)))
print("\nRecasing costs nothing (case-fold fallback); garbling everything")
print("drops F1 to zero without a single decode failure.")

print("\n=== zero-shot keyword baselines (trigger-only by design) ===")
inflected = synth.make_corpus(ontology, n_sentences=120, seed=11,
                              with_args=False, inflect_frac=0.5)
for kind in ("matching", "lemma"):
    report = score(run_baseline(inflected, ontology, kind), inflected)
    cells = "  ".join(f"{LABELS[c]} {report[c].f1 * 100:5.1f}"
                      for c in ("tri_id", "tri_cls"))
    print(f"{kind:9s} {cells}")
print("\nHalf the triggers are inflected, so plain matching misses them and")
print("the lemma baseline pulls ahead (both are trigger-only by design).")
