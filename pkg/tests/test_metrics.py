import random

from eekit.corpus import (ArgumentMention, Corpus, EventMention,
                          SentenceRecord, TokenSpan)
from eekit.decoder import EventPrediction, PredictionRecord
from eekit.metrics import (CRITERIA, matrix_csv, matrix_text, report_text,
                           score, score_matrix)


def exhaustive_match_count(pred_items, gold_items):
    """Independent oracle: maximum one-to-one equality matching, found by
    exhaustive search over assignments (branch and bound)."""
    best = 0

    def explore(i, used_mask, matched):
        nonlocal best
        best = max(best, matched)
        if i == len(pred_items) or matched + (len(pred_items) - i) <= best:
            return
        explore(i + 1, used_mask, matched)  # leave pred i unmatched
        for j in range(len(gold_items)):
            if not used_mask & (1 << j) and pred_items[i] == gold_items[j]:
                explore(i + 1, used_mask | (1 << j), matched + 1)

    explore(0, 0, 0)
    return best


def rand_events(rng, n, types, roles, max_span=6):
    events = []
    for _ in range(n):
        start = rng.randrange(max_span)
        trig = TokenSpan(start, start + 1)
        args = []
        for _ in range(rng.randint(0, 2)):
            astart = rng.randrange(max_span)
            args.append(ArgumentMention(TokenSpan(astart, astart + 1),
                                        rng.choice(roles), "x"))
        events.append((rng.choice(types), trig, tuple(args)))
    return events


def as_gold(events, doc="d", sid="s"):
    tokens = tuple(f"t{i}" for i in range(8))
    mentions = tuple(
        EventMention(etype, trig, tokens[trig.start],
                     tuple(ArgumentMention(a.span, a.role, tokens[a.span.start])
                           for a in args))
        for etype, trig, args in events
    )
    return SentenceRecord(doc, sid, tokens, mentions)


def as_preds(events, doc="d", sid="s"):
    return PredictionRecord(doc, sid, tuple(
        EventPrediction(etype, trig, args) for etype, trig, args in events))


def tri_items(events, cls):
    return [(t.start, t.end) + ((e,) if cls else ()) for e, t, _ in events]


def arg_items(events, cls):
    return [(a.span.start, a.span.end, e) + ((a.role,) if cls else ())
            for e, _, args in events for a in args]


class TestScore:
    def test_perfect_predictions(self, synth_corpus):
        preds = [
            PredictionRecord(s.doc_id, s.sent_id, tuple(
                EventPrediction(ev.event_type, ev.trigger, ev.arguments)
                for ev in s.events))
            for s in synth_corpus.sentences
        ]
        report = score(preds, synth_corpus)
        assert all(report[c].f1 == 1.0 for c in CRITERIA)

    def test_hand_computed_micro_f1(self):
        # 3 predicted triggers, 2 correct, 4 gold: P=2/3, R=1/2, F1=4/7.
        gold_events = [("A", TokenSpan(0, 1), ()), ("A", TokenSpan(1, 2), ()),
                       ("A", TokenSpan(2, 3), ()), ("A", TokenSpan(3, 4), ())]
        pred_events = [("A", TokenSpan(0, 1), ()), ("A", TokenSpan(1, 2), ()),
                       ("A", TokenSpan(5, 6), ())]
        gold = Corpus((as_gold(gold_events),))
        report = score([as_preds(pred_events)], gold)
        prf = report["tri_cls"]
        assert (prf.tp, prf.fp, prf.fn) == (2, 1, 2)
        assert abs(prf.precision - 2 / 3) < 1e-12
        assert abs(prf.recall - 1 / 2) < 1e-12
        assert abs(prf.f1 - 4 / 7) < 1e-12

    def test_matches_exhaustive_matcher(self):
        rng = random.Random(4)
        types = ["A", "B"]
        roles = ["R1", "R2"]
        for _ in range(800):
            gold_events = rand_events(rng, rng.randint(0, 6), types, roles)
            pred_events = rand_events(rng, rng.randint(0, 6), types, roles)
            gold = Corpus((as_gold(gold_events),))
            report = score([as_preds(pred_events)], gold)
            for crit, extract, cls in (
                ("tri_id", tri_items, False), ("tri_cls", tri_items, True),
                ("arg_id", arg_items, False), ("arg_cls", arg_items, True),
            ):
                p_items = extract(pred_events, cls)
                g_items = extract(gold_events, cls)
                tp = exhaustive_match_count(p_items, g_items)
                prf = report[crit]
                assert (prf.tp, prf.fp, prf.fn) == \
                    (tp, len(p_items) - tp, len(g_items) - tp)

    def test_reordering_invariance(self, synth_corpus):
        preds = [
            PredictionRecord(s.doc_id, s.sent_id, tuple(
                EventPrediction(ev.event_type, ev.trigger, ev.arguments)
                for ev in reversed(s.events)))
            for s in synth_corpus.sentences
        ]
        shuffled = list(preds)
        random.Random(0).shuffle(shuffled)
        gold_rev = Corpus(tuple(reversed(synth_corpus.sentences)))
        assert score(shuffled, gold_rev).scores == score(preds, synth_corpus).scores

    def test_cls_tp_bounded_by_id_tp(self):
        rng = random.Random(9)
        for _ in range(200):
            gold_events = rand_events(rng, rng.randint(0, 5), ["A", "B"], ["R"])
            pred_events = rand_events(rng, rng.randint(0, 5), ["A", "B"], ["R"])
            report = score([as_preds(pred_events)], Corpus((as_gold(gold_events),)))
            assert report["tri_cls"].tp <= report["tri_id"].tp
            assert report["arg_cls"].tp <= report["arg_id"].tp

    def test_duplicate_prediction_adds_fp_only(self):
        gold_events = [("A", TokenSpan(0, 1), ())]
        pred_once = [("A", TokenSpan(0, 1), ())]
        pred_twice = pred_once * 2
        gold = Corpus((as_gold(gold_events),))
        r1 = score([as_preds(pred_once)], gold)
        r2 = score([as_preds(pred_twice)], gold)
        assert r2["tri_cls"].tp == r1["tri_cls"].tp == 1
        assert r2["tri_cls"].fp == r1["tri_cls"].fp + 1

    def test_restrict_types(self):
        gold_events = [("A", TokenSpan(0, 1), ()), ("B", TokenSpan(1, 2), ())]
        pred_events = [("A", TokenSpan(0, 1), ()), ("B", TokenSpan(4, 5), ())]
        gold = Corpus((as_gold(gold_events),))
        unrestricted = score([as_preds(pred_events)], gold)
        all_types = score([as_preds(pred_events)], gold, restrict_types={"A", "B"})
        assert unrestricted.scores == all_types.scores
        only_a = score([as_preds(pred_events)], gold, restrict_types={"A"})
        assert only_a["tri_cls"].f1 == 1.0

    def test_zero_zero_conventions(self):
        gold_empty = Corpus((as_gold([]),))
        r = score([as_preds([])], gold_empty)
        assert all((r[c].precision, r[c].recall, r[c].f1) == (1.0, 1.0, 1.0)
                   for c in CRITERIA)
        gold_nonempty = Corpus((as_gold([("A", TokenSpan(0, 1), ())]),))
        r = score([as_preds([])], gold_nonempty)
        assert (r["tri_cls"].precision, r["tri_cls"].recall, r["tri_cls"].f1) == \
            (0.0, 0.0, 0.0)

    def test_unknown_sentence_counts_as_fp(self):
        gold = Corpus((as_gold([("A", TokenSpan(0, 1), ())]),))
        stray = as_preds([("A", TokenSpan(0, 1), ())], doc="other", sid="zz")
        good = as_preds([("A", TokenSpan(0, 1), ())])
        report = score([good, stray], gold)
        assert report.structural_errors == 1
        assert report["tri_cls"].fp == 1
        assert report["tri_cls"].tp == 1


class TestMatrix:
    def test_rows_equal_individual_scores(self, synth_corpus):
        preds = [
            PredictionRecord(s.doc_id, s.sent_id, tuple(
                EventPrediction(ev.event_type, ev.trigger, ())
                for ev in s.events))
            for s in synth_corpus.sentences
        ]
        rows = score_matrix([("run1", preds), ("run2", preds[:50])], synth_corpus)
        assert len(rows) == 2
        for label, report in rows:
            expected = score(preds if label == "run1" else preds[:50], synth_corpus)
            assert report.scores == expected.scores

    def test_text_and_csv_render(self, synth_corpus):
        rows = score_matrix([(f"{p}%", []) for p in (1, 2, 3, 5, 10, 20, 30, 50)],
                            synth_corpus)
        text = matrix_text(rows)
        assert text.count("\n") == 8
        assert "Tri-I" in text and "Arg-C" in text
        csv_text = matrix_csv(rows)
        assert csv_text.splitlines()[0].startswith("run,")
        assert len(csv_text.splitlines()) == 9
        assert report_text(rows[0][1])
