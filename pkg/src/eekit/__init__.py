"""eekit: template-based generative event extraction toolkit.

Compiles event ontologies and natural-language templates into prompts and
training targets, decodes generated sentences back into trigger/argument
span predictions, scores them, and manages low-resource data splits and
zero-shot baselines.  The generative model itself sits behind a pluggable
generation contract (see :mod:`eekit.genio`).
"""

__version__ = "0.1.0"
