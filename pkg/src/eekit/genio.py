"""Generation boundary: oracle and remote generators, plus the inference driver.

The generator contract is deliberately thin: a batch of input strings in, an
equal-length batch of output strings out, failures surfacing as empty
strings with error notes rather than shortened batches.  The oracle
generator replays gold targets (optionally corrupted) so the deterministic
pipeline around the model can be verified exactly.
"""
from __future__ import annotations

import json
import logging
import random
import shlex
import subprocess
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import requests

from .corpus import Corpus
from .decoder import (DecodeResult, Diagnostic, EventPrediction,
                      PredictionRecord, decode)
from .ontology import E2E, EAE, ED, Ontology, task_template
from .promptgen import (PromptConfig, PromptInstance, build_inference_set,
                        event_fills, gold_trigger_table, instance_from_dict,
                        instance_to_dict, render_filled, select_gold_events)

logger = logging.getLogger(__name__)

MODES = ("e2e", "pipeline", "gold-eae")

GARBLE_TEXT = "@@@ zq garbled output zq @@@"


class GenerationError(RuntimeError):
    """Raised when a generation service violates the wire protocol."""


@dataclass(frozen=True)
class ClientConfig:
    endpoint: str
    batch_size: int = 16
    timeout: float = 60.0
    max_in_flight: int = 4
    retries: int = 2
    backoff_base: float = 0.1

    def __post_init__(self):
        if self.batch_size < 1 or self.max_in_flight < 1 or self.retries < 0:
            raise ValueError("batch_size and max_in_flight must be >= 1, retries >= 0")


@dataclass(frozen=True)
class CorruptionConfig:
    drop_slot: float = 0.0
    recase: float = 0.0
    garble: float = 0.0
    seed: int = 0


class OracleGenerator:
    """Emits exactly the gold training target for each instance.

    Corruption knobs make the oracle useful for robustness testing: slots
    can be reverted to their placeholder, fill values recased, or whole
    outputs replaced with garbage.  All draws come from a per-instance
    stream, so batching order never changes the result.
    """

    def __init__(self, gold: Corpus, ontology: Ontology,
                 corruption: CorruptionConfig | None = None):
        self.gold = gold.by_key()
        self.ontology = ontology
        self.corruption = corruption or CorruptionConfig()
        self.notes: list[str] = []

    def _rng(self, inst: PromptInstance) -> random.Random:
        trig = inst.query_trigger
        trig_key = f"{trig.start}-{trig.end}" if trig else "-"
        return random.Random(f"{self.corruption.seed}:{inst.doc_id}:{inst.sent_id}:"
                             f"{inst.event_type}:{inst.task}:{trig_key}")

    def generate_for(self, instances: list[PromptInstance],
                     cfg: PromptConfig) -> list[str]:
        outputs = []
        for inst in instances:
            sent = self.gold.get(inst.key)
            if sent is None:
                raise GenerationError(f"instance not traceable to gold sentence {inst.key}")
            schema = self.ontology.schemas[inst.event_type]
            icfg = cfg.for_task(inst.task)
            rng = self._rng(inst)
            cor = self.corruption
            if cor.garble > 0 and rng.random() < cor.garble:
                outputs.append(GARBLE_TEXT)
                continue
            spec = task_template(schema, inst.task, icfg.template_variant)
            events = select_gold_events(sent, schema, inst.task, inst.query_trigger)
            if not events:
                outputs.append(spec.text)
                continue
            rendered = []
            for event in events:
                fills = event_fills(event, spec)
                for i in sorted(fills):
                    if fills[i] and cor.drop_slot > 0 and rng.random() < cor.drop_slot:
                        fills[i] = []
                    if cor.recase > 0:
                        fills[i] = [v.swapcase() if rng.random() < cor.recase else v
                                    for v in fills[i]]
                rendered.append(render_filled(spec, fills, icfg))
            outputs.append(icfg.multi_event_separator.join(rendered))
        return outputs


def check_health(endpoint: str, timeout: float = 10.0) -> dict:
    resp = requests.get(endpoint.rstrip("/") + "/health", timeout=timeout)
    resp.raise_for_status()
    return resp.json()


class HttpGenerator:
    """Client for the HTTP wire protocol: POST /generate with
    {"id", "inputs"} returning {"id", "outputs"} of equal length."""

    def __init__(self, cfg: ClientConfig):
        self.cfg = cfg
        self.notes: list[str] = []
        self._session = requests.Session()
        self._counter = 0
        self._lock = threading.Lock()

    def _next_id(self) -> str:
        with self._lock:
            self._counter += 1
            return f"req{self._counter:06d}"

    def _post_batch(self, batch: list[str]) -> list[str]:
        req_id = self._next_id()
        url = self.cfg.endpoint.rstrip("/") + "/generate"
        last_error = "no attempt made"
        for attempt in range(self.cfg.retries + 1):
            if attempt:
                time.sleep(self.cfg.backoff_base * (2 ** (attempt - 1)))
            try:
                resp = self._session.post(url, json={"id": req_id, "inputs": batch},
                                          timeout=self.cfg.timeout)
                resp.raise_for_status()
                body = resp.json()
                if body.get("id") != req_id:
                    raise GenerationError(f"response id {body.get('id')!r} != {req_id!r}")
                outputs = body.get("outputs")
                if not isinstance(outputs, list) or len(outputs) != len(batch):
                    raise GenerationError(
                        f"expected {len(batch)} outputs, got "
                        f"{len(outputs) if isinstance(outputs, list) else type(outputs)}")
                return [str(o) for o in outputs]
            except (requests.RequestException, ValueError, GenerationError) as exc:
                last_error = str(exc)
        with self._lock:
            self.notes.append(f"{req_id}: failed after {self.cfg.retries + 1} attempts: "
                              f"{last_error}")
        return [""] * len(batch)

    def generate(self, inputs: list[str]) -> list[str]:
        if not inputs:
            return []
        batches = [inputs[i:i + self.cfg.batch_size]
                   for i in range(0, len(inputs), self.cfg.batch_size)]
        with ThreadPoolExecutor(max_workers=self.cfg.max_in_flight) as pool:
            results = list(pool.map(self._post_batch, batches))
        outputs: list[str] = []
        for chunk in results:
            outputs.extend(chunk)
        return outputs


class ProcGenerator:
    """Client for the stdio wire protocol: one JSON request per line on the
    child's stdin, one JSON response per line on its stdout."""

    def __init__(self, command: str, cfg: ClientConfig | None = None):
        self.command = command
        self.cfg = cfg or ClientConfig(endpoint=command)
        self.notes: list[str] = []
        self._proc: subprocess.Popen | None = None
        self._counter = 0

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                shlex.split(self.command), stdin=subprocess.PIPE,
                stdout=subprocess.PIPE, text=True, bufsize=1)
        return self._proc

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)
        self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _roundtrip(self, batch: list[str]) -> list[str]:
        self._counter += 1
        req_id = f"req{self._counter:06d}"
        last_error = "no attempt made"
        for attempt in range(self.cfg.retries + 1):
            if attempt:
                time.sleep(self.cfg.backoff_base * (2 ** (attempt - 1)))
            try:
                proc = self._ensure_proc()
                proc.stdin.write(json.dumps({"id": req_id, "inputs": batch}) + "\n")
                proc.stdin.flush()
                line = proc.stdout.readline()
                if not line:
                    raise GenerationError("child process closed its stdout")
                body = json.loads(line)
                if body.get("id") != req_id:
                    raise GenerationError(f"response id {body.get('id')!r} != {req_id!r}")
                outputs = body.get("outputs")
                if not isinstance(outputs, list) or len(outputs) != len(batch):
                    raise GenerationError("output count does not match input count")
                return [str(o) for o in outputs]
            except (OSError, ValueError, GenerationError) as exc:
                last_error = str(exc)
                self.close()
        self.notes.append(f"{req_id}: failed after {self.cfg.retries + 1} attempts: "
                          f"{last_error}")
        return [""] * len(batch)

    def generate(self, inputs: list[str]) -> list[str]:
        outputs: list[str] = []
        for i in range(0, len(inputs), self.cfg.batch_size):
            outputs.extend(self._roundtrip(inputs[i:i + self.cfg.batch_size]))
        return outputs


@dataclass(frozen=True)
class RawGeneration:
    instance: PromptInstance
    output: str


def generate_for_instances(generator, instances: list[PromptInstance],
                           cfg: PromptConfig) -> list[str]:
    if hasattr(generator, "generate_for"):
        outputs = generator.generate_for(instances, cfg)
    else:
        outputs = generator.generate([inst.input_text for inst in instances])
    if len(outputs) != len(instances):
        raise GenerationError(f"generator returned {len(outputs)} outputs for "
                              f"{len(instances)} instances")
    return outputs


def _decode_instance(raw: RawGeneration, sent_index, ontology: Ontology,
                     cfg: PromptConfig) -> DecodeResult:
    inst = raw.instance
    sent = sent_index[inst.key]
    schema = ontology.schemas[inst.event_type]
    return decode(raw.output, sent, schema, inst.task, cfg.for_task(inst.task),
                  anchor=inst.query_trigger if inst.task == EAE else None)


def decode_raw_generations(raws: list[RawGeneration], corpus: Corpus,
                           ontology: Ontology,
                           cfg: PromptConfig) -> list[PredictionRecord]:
    """Decode per-instance outputs and merge them per sentence, collapsing
    exact duplicate events produced by different event-type queries."""
    sent_index = corpus.by_key()
    merged: dict[tuple[str, str], tuple[list[EventPrediction], list[Diagnostic]]] = {
        sent.key: ([], []) for sent in corpus.sentences
    }
    for raw in raws:
        if raw.instance.key not in merged:
            logger.warning("raw generation for unknown sentence %s; skipped",
                           raw.instance.key)
            continue
        result = _decode_instance(raw, sent_index, ontology, cfg)
        events, diags = merged[raw.instance.key]
        events.extend(result.events)
        diags.extend(result.diagnostics)
    records = []
    for sent in corpus.sentences:
        events, diags = merged[sent.key]
        deduped = []
        seen = set()
        for ev in events:
            if ev not in seen:
                seen.add(ev)
                deduped.append(ev)
        records.append(PredictionRecord(sent.doc_id, sent.sent_id,
                                        tuple(deduped), tuple(diags)))
    return records


def predicted_trigger_table(records: list[PredictionRecord]):
    table = {}
    for rec in records:
        entries = sorted({(ev.event_type, ev.trigger) for ev in rec.events},
                         key=lambda e: (e[1].start, e[1].end, e[0]))
        table[rec.key] = [(etype, trig) for etype, trig in entries]
    return table


def run_pipeline(corpus: Corpus, ontology: Ontology, generator, mode: str,
                 pcfg: PromptConfig) -> tuple[list[PredictionRecord], list[RawGeneration]]:
    """Drive inference end to end and return per-sentence predictions plus
    the raw generations (persist those before decoding so that decode-policy
    changes can be replayed without re-generation)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    raws: list[RawGeneration] = []
    if mode == "e2e":
        instances = build_inference_set(corpus, ontology, E2E, pcfg)
        outputs = generate_for_instances(generator, instances, pcfg)
        raws = [RawGeneration(i, o) for i, o in zip(instances, outputs)]
        records = decode_raw_generations(raws, corpus, ontology, pcfg)
        return records, raws
    if mode == "pipeline":
        ed_instances = build_inference_set(corpus, ontology, ED, pcfg)
        ed_outputs = generate_for_instances(generator, ed_instances, pcfg.for_task(ED))
        raws.extend(RawGeneration(i, o) for i, o in zip(ed_instances, ed_outputs))
        ed_records = decode_raw_generations(raws, corpus, ontology, pcfg)
        triggers = predicted_trigger_table(ed_records)
    else:  # gold-eae
        triggers = gold_trigger_table(corpus)
    eae_instances = build_inference_set(corpus, ontology, EAE, pcfg, triggers=triggers)
    eae_outputs = generate_for_instances(generator, eae_instances, pcfg.for_task(EAE))
    eae_raws = [RawGeneration(i, o) for i, o in zip(eae_instances, eae_outputs)]
    records = decode_raw_generations(eae_raws, corpus, ontology, pcfg)
    raws.extend(eae_raws)
    return records, raws


def make_generator(spec: str, gold: Corpus | None = None,
                   ontology: Ontology | None = None,
                   client: ClientConfig | None = None):
    """Build a generator from a CLI-style spec string:
    ``oracle[:k=v,...]``, ``http://host:port`` (or ``http:URL``), ``proc:CMD``."""
    if spec == "oracle" or spec.startswith("oracle:"):
        if gold is None or ontology is None:
            raise ValueError("oracle generator requires gold corpus and ontology")
        cor = CorruptionConfig()
        if spec.startswith("oracle:") and spec[len("oracle:"):]:
            kwargs = {}
            for part in spec[len("oracle:"):].split(","):
                key, _, value = part.partition("=")
                key = key.strip()
                if key not in ("drop_slot", "recase", "garble", "seed"):
                    raise ValueError(f"unknown corruption option {key!r}")
                kwargs[key] = int(value) if key == "seed" else float(value)
            cor = CorruptionConfig(**kwargs)
        return OracleGenerator(gold, ontology, cor)
    base = client or ClientConfig(endpoint=spec)
    if spec.startswith(("http://", "https://")):
        return HttpGenerator(replace(base, endpoint=spec))
    if spec.startswith("http:"):
        return HttpGenerator(replace(base, endpoint=spec[len("http:"):]))
    if spec.startswith("proc:"):
        command = spec[len("proc:"):]
        return ProcGenerator(command, replace(base, endpoint=command))
    raise ValueError(f"unknown generator spec {spec!r}")


def raw_to_dict(raw: RawGeneration) -> dict:
    obj = instance_to_dict(raw.instance)
    obj["output"] = raw.output
    return obj


def raw_from_dict(obj: dict) -> RawGeneration:
    obj = dict(obj)
    output = obj.pop("output", "")
    return RawGeneration(instance_from_dict(obj), output)


def write_raw_generations(raws, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for raw in raws:
            fh.write(json.dumps(raw_to_dict(raw), sort_keys=True, ensure_ascii=False) + "\n")


def read_raw_generations(path: str | Path) -> list[RawGeneration]:
    raws = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                raws.append(raw_from_dict(json.loads(line)))
    return raws
