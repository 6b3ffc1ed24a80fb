import pytest

from eekit import synth
from eekit.corpus import (ArgumentMention, Corpus, EventMention,
                          SentenceRecord, TokenSpan)
from eekit.ontology import load_builtin_ontology


@pytest.fixture(scope="session")
def ace():
    return load_builtin_ontology("ace")


@pytest.fixture(scope="session")
def ere():
    return load_builtin_ontology("ere")


@pytest.fixture(scope="session")
def synth_ontology():
    return synth.make_ontology(n_types=20, n_roles=6, seed=7)


@pytest.fixture(scope="session")
def synth_corpus(synth_ontology):
    return synth.make_corpus(synth_ontology, n_sentences=200, seed=11)


@pytest.fixture()
def attack_sentence():
    """The running example: a bombing sentence with one attack event."""
    tokens = ("Palestinian", "detonated", "a", "bomb", ".")
    event = EventMention(
        event_type="Conflict:Attack",
        trigger=TokenSpan(1, 2),
        trigger_text="detonated",
        arguments=(
            ArgumentMention(TokenSpan(0, 1), "Attacker", "Palestinian"),
            ArgumentMention(TokenSpan(3, 4), "Instrument", "bomb"),
        ),
    )
    return SentenceRecord("doc1", "s1", tokens, (event,))


@pytest.fixture()
def attack_corpus(attack_sentence):
    return Corpus((attack_sentence,), ontology_id="ace")
