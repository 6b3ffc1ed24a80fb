"""Micro-averaged Tri-I / Tri-C / Arg-I / Arg-C precision, recall, and F1.

A trigger is identified when its offset matches a gold trigger, classified
when the event type matches too.  An argument is identified when its offset
and event type match, classified when the role matches as well.  Matching is
one-to-one within a sentence: duplicates on either side pair up at most once.
"""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus
from .decoder import PredictionRecord

CRITERIA = ("tri_id", "tri_cls", "arg_id", "arg_cls")
LABELS = {"tri_id": "Tri-I", "tri_cls": "Tri-C", "arg_id": "Arg-I", "arg_cls": "Arg-C"}


@dataclass(frozen=True)
class PRF:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        if self.tp + self.fp == 0:
            return 1.0 if self.fn == 0 else 0.0
        return self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> float:
        if self.tp + self.fn == 0:
            return 1.0 if self.fp == 0 else 0.0
        return self.tp / (self.tp + self.fn)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        if p + r == 0.0:
            return 0.0
        return 2 * p * r / (p + r)


@dataclass(frozen=True)
class ScoreReport:
    scores: dict[str, PRF]
    structural_errors: int = 0

    def __getitem__(self, criterion: str) -> PRF:
        return self.scores[criterion]


def _tri_items(events, cls: bool):
    if cls:
        return [(ev.trigger.start, ev.trigger.end, ev.event_type) for ev in events]
    return [(ev.trigger.start, ev.trigger.end) for ev in events]


def _arg_items(events, cls: bool):
    items = []
    for ev in events:
        for arg in ev.arguments:
            item = (arg.span.start, arg.span.end, ev.event_type)
            items.append(item + (arg.role,) if cls else item)
    return items


_ITEMS = {
    "tri_id": lambda evs: _tri_items(evs, cls=False),
    "tri_cls": lambda evs: _tri_items(evs, cls=True),
    "arg_id": lambda evs: _arg_items(evs, cls=False),
    "arg_cls": lambda evs: _arg_items(evs, cls=True),
}


def _match(pred_items, gold_items) -> tuple[int, int, int]:
    """Multiset equality matching; each item pairs up at most once."""
    pred_counts = Counter(pred_items)
    gold_counts = Counter(gold_items)
    tp = sum((pred_counts & gold_counts).values())
    return tp, len(pred_items) - tp, len(gold_items) - tp


def score(preds: list[PredictionRecord], gold: Corpus,
          restrict_types=None) -> ScoreReport:
    restrict = set(restrict_types) if restrict_types is not None else None
    gold_by_key = gold.by_key()
    tallies = {c: [0, 0, 0] for c in CRITERIA}
    structural_errors = 0

    pred_by_key: dict[tuple[str, str], list] = {}
    for rec in preds:
        pred_by_key.setdefault(rec.key, []).extend(rec.events)

    for key, events in pred_by_key.items():
        if key not in gold_by_key:
            # Predictions for unknown sentences cannot match anything; they
            # contribute pure false-positive mass.
            structural_errors += 1
            filt = [ev for ev in events
                    if restrict is None or ev.event_type in restrict]
            for crit in CRITERIA:
                tallies[crit][1] += len(_ITEMS[crit](filt))

    for key, sent in gold_by_key.items():
        pred_events = pred_by_key.get(key, [])
        gold_events = list(sent.events)
        if restrict is not None:
            pred_events = [ev for ev in pred_events if ev.event_type in restrict]
            gold_events = [ev for ev in gold_events if ev.event_type in restrict]
        for crit in CRITERIA:
            tp, fp, fn = _match(_ITEMS[crit](pred_events), _ITEMS[crit](gold_events))
            tallies[crit][0] += tp
            tallies[crit][1] += fp
            tallies[crit][2] += fn

    return ScoreReport(
        scores={c: PRF(*tallies[c]) for c in CRITERIA},
        structural_errors=structural_errors,
    )


def report_text(report: ScoreReport) -> str:
    lines = []
    for crit in CRITERIA:
        prf = report[crit]
        lines.append(
            f"{LABELS[crit]:6s} P: {prf.precision * 100:6.2f} ({prf.tp}/{prf.tp + prf.fp})"
            f"  R: {prf.recall * 100:6.2f} ({prf.tp}/{prf.tp + prf.fn})"
            f"  F1: {prf.f1 * 100:6.2f}"
        )
    if report.structural_errors:
        lines.append(f"structural errors: {report.structural_errors} "
                     f"(predictions for unknown sentences)")
    return "\n".join(lines)


def score_matrix(runs: list[tuple[str, list[PredictionRecord]]], gold: Corpus,
                 restrict_types=None) -> list[tuple[str, ScoreReport]]:
    return [(label, score(preds, gold, restrict_types)) for label, preds in runs]


def matrix_text(rows: list[tuple[str, ScoreReport]]) -> str:
    label_w = max([len(label) for label, _ in rows] + [len("run")])
    header = "run".ljust(label_w) + "".join(f"  {LABELS[c]:>7s}" for c in CRITERIA)
    lines = [header]
    for label, report in rows:
        cells = "".join(f"  {report[c].f1 * 100:7.2f}" for c in CRITERIA)
        lines.append(label.ljust(label_w) + cells)
    return "\n".join(lines)


def matrix_csv(rows: list[tuple[str, ScoreReport]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["run"]
    for crit in CRITERIA:
        label = LABELS[crit]
        header += [f"{label} P", f"{label} R", f"{label} F1",
                   f"{label} tp", f"{label} fp", f"{label} fn"]
    writer.writerow(header)
    for label, report in rows:
        row = [label]
        for crit in CRITERIA:
            prf = report[crit]
            row += [f"{prf.precision:.6f}", f"{prf.recall:.6f}", f"{prf.f1:.6f}",
                    prf.tp, prf.fp, prf.fn]
        writer.writerow(row)
    return buf.getvalue()
