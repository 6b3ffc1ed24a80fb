"""modelsvc: reference generation service for the event-extraction toolkit.

Implements the wire protocol (HTTP POST /generate and newline-delimited
stdio) around either a deterministic echo stub or a fine-tuned
encoder-decoder, plus the fine-tuning entry point that consumes the
toolkit's instance file format.
"""

__version__ = "0.1.0"
