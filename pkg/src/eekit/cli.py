"""Command-line entry point covering the full workflow.

Every artifact-writing subcommand drops a ``<output>.manifest.json`` next to
its output with the full configuration, seeds, and input digests, so a run
can be audited and reproduced byte-for-byte.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__, baselines, genio, metrics, promptgen, splitter, synth
from .corpus import convert_oneie, corpus_stats, load_corpus, save_corpus
from .decoder import read_predictions, write_predictions
from .ontology import (BUILTIN_ONTOLOGIES, NATURAL, OntologyError,
                       load_builtin_ontology, load_ontology)

logger = logging.getLogger(__name__)

_VARIANT_BY_FLAG = {"natural": NATURAL, "special": "special", "html": "html"}
_TASK_BY_FLAG = {"ed": "ED", "eae": "EAE", "e2e": "E2E"}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(out_path: Path, subcommand: str, config: dict,
                   inputs: list[Path]) -> None:
    manifest = {
        "tool": "eekit",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs if p.exists()],
    }
    manifest_path = out_path.with_name(out_path.name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")


def _load_ontology_arg(spec: str):
    if spec in BUILTIN_ONTOLOGIES:
        return load_builtin_ontology(spec), None
    path = Path(spec)
    return load_ontology(path), path


def _prompt_config(args, task: str | None = None) -> promptgen.PromptConfig:
    return promptgen.PromptConfig(
        task=_TASK_BY_FLAG[args.task] if task is None else task,
        include_definition=not args.no_definition,
        include_keywords=not args.no_keywords,
        include_template=not args.no_template,
        template_variant=_VARIANT_BY_FLAG[args.variant],
        segment_separator=args.segment_separator,
        multi_event_separator=args.multi_event_separator,
        and_joiner=args.and_joiner,
    )


def _prompt_config_dict(cfg: promptgen.PromptConfig) -> dict:
    return {
        "task": cfg.task,
        "include_definition": cfg.include_definition,
        "include_keywords": cfg.include_keywords,
        "include_template": cfg.include_template,
        "template_variant": cfg.template_variant,
        "segment_separator": cfg.segment_separator,
        "multi_event_separator": cfg.multi_event_separator,
        "and_joiner": cfg.and_joiner,
    }


def _add_prompt_flags(sub, with_task: bool = True) -> None:
    if with_task:
        sub.add_argument("--task", choices=sorted(_TASK_BY_FLAG), default="e2e")
    sub.add_argument("--variant", choices=sorted(_VARIANT_BY_FLAG), default="natural")
    sub.add_argument("--no-definition", action="store_true")
    sub.add_argument("--no-keywords", action="store_true")
    sub.add_argument("--no-template", action="store_true")
    sub.add_argument("--segment-separator", default=" \n ")
    sub.add_argument("--multi-event-separator", default=" <sep> ")
    sub.add_argument("--and-joiner", default=" and ")


def cmd_validate(args) -> int:
    try:
        ontology, _ = _load_ontology_arg(args.ontology)
    except OntologyError as exc:
        print(f"ontology: INVALID: {exc}")
        return 1
    print(f"ontology: ok ({len(ontology)} event types, "
          f"{len(ontology.role_universe)} roles)")
    if args.corpus:
        try:
            corpus = load_corpus(args.corpus, ontology)
        except ValueError as exc:
            print(f"corpus: INVALID: {exc}")
            return 1
        print(f"corpus: ok ({len(corpus)} sentences)")
    return 0


def cmd_stats(args) -> int:
    ontology, _ = _load_ontology_arg(args.ontology)
    corpus = load_corpus(args.corpus, ontology)
    report = corpus_stats(corpus)
    widths = [max(len(h), 8) for h in report.HEADERS]
    print("  ".join(h.rjust(w) for h, w in zip(report.HEADERS, widths)))
    print("  ".join(str(v).rjust(w) for v, w in zip(report.as_row(), widths)))
    return 0


def cmd_convert(args) -> int:
    n = convert_oneie(args.input, args.out)
    write_manifest(Path(args.out), "convert", {"input": str(args.input)},
                   [Path(args.input)])
    print(f"wrote {n} records to {args.out}")
    return 0


def cmd_split(args) -> int:
    ontology, onto_path = _load_ontology_arg(args.ontology)
    corpus = load_corpus(args.corpus, ontology)
    out = Path(args.out)
    inputs = [Path(args.corpus)] + ([onto_path] if onto_path else [])
    if args.restrict_types_from:
        types = json.loads(Path(args.restrict_types_from).read_text("utf-8"))
        result = splitter.eval_filter(corpus, types)
        save_corpus(result, out)
        write_manifest(out, "split",
                       {"mode": "eval-filter", "types": sorted(types)}, inputs)
        print(f"kept events of {len(types)} types; wrote {len(result)} sentences")
        return 0
    if args.n_common is not None:
        cfg = splitter.FewShotConfig(n_common=args.n_common, k=args.k, seed=args.seed)
        result, unseen = splitter.few_shot_filter(corpus, cfg)
        save_corpus(result, out)
        unseen_path = out.with_name(out.stem + ".unseen_types.json")
        unseen_path.write_text(json.dumps(sorted(unseen), indent=2) + "\n", "utf-8")
        write_manifest(out, "split",
                       {"mode": "few-shot", "n_common": args.n_common, "k": args.k,
                        "seed": args.seed, "unseen_types": sorted(unseen)}, inputs)
        print(f"few-shot split: {len(result)} sentences, {len(unseen)} unseen types "
              f"(listed in {unseen_path.name})")
        return 0
    cfg = splitter.SplitConfig(proportion=args.proportion, seed=args.seed,
                               coverage_greedy=not args.no_coverage_greedy)
    docs = splitter.select_documents(corpus, cfg)
    result = splitter.make_split(corpus, cfg)
    save_corpus(result, out)
    write_manifest(out, "split",
                   {"mode": "proportion", "proportion": args.proportion,
                    "seed": args.seed, "coverage_greedy": cfg.coverage_greedy,
                    "selected_docs": docs}, inputs)
    print(f"selected {len(docs)} documents, {len(result)} sentences")
    return 0


def cmd_build_data(args) -> int:
    ontology, onto_path = _load_ontology_arg(args.ontology)
    corpus = load_corpus(args.corpus, ontology)
    pcfg = _prompt_config(args)
    task = _TASK_BY_FLAG[args.task]
    inputs = [Path(args.corpus)] + ([onto_path] if onto_path else [])
    if args.split == "train":
        tcfg = promptgen.TrainingConfig(m=args.m, seed=args.seed,
                                        resample_each_epoch=not args.no_resample)
        instances = promptgen.build_training_set(corpus, ontology, task, pcfg, tcfg,
                                                 epoch=args.epoch)
        config = {"split": "train", "m": args.m, "seed": args.seed,
                  "epoch": args.epoch, "resample_each_epoch": tcfg.resample_each_epoch,
                  "prompt": _prompt_config_dict(pcfg)}
    else:
        triggers = None
        if task == "EAE":
            if args.triggers:
                triggers = genio.predicted_trigger_table(read_predictions(args.triggers))
                inputs.append(Path(args.triggers))
            else:
                triggers = promptgen.gold_trigger_table(corpus)
        instances = promptgen.build_inference_set(corpus, ontology, task, pcfg,
                                                  triggers=triggers)
        config = {"split": "inference", "triggers": args.triggers,
                  "prompt": _prompt_config_dict(pcfg)}
    promptgen.write_instances(instances, args.out)
    write_manifest(Path(args.out), "build-data", config, inputs)
    print(f"wrote {len(instances)} instances to {args.out}")
    return 0


def cmd_infer(args) -> int:
    ontology, onto_path = _load_ontology_arg(args.ontology)
    corpus = load_corpus(args.corpus, ontology)
    pcfg = _prompt_config(args, task="E2E")
    client = genio.ClientConfig(endpoint="", batch_size=args.batch_size,
                                timeout=args.timeout, max_in_flight=args.jobs,
                                retries=args.retries)
    generator = genio.make_generator(args.generator, gold=corpus, ontology=ontology,
                                     client=client)
    records, raws = genio.run_pipeline(corpus, ontology, generator, args.mode, pcfg)
    prefix = Path(args.out_prefix)
    raw_path = prefix.with_name(prefix.name + ".raw.jsonl")
    pred_path = prefix.with_name(prefix.name + ".preds.jsonl")
    # Raw generations are persisted before decoding is committed to disk so
    # decode policy changes can be replayed without re-generation.
    genio.write_raw_generations(raws, raw_path)
    write_predictions(records, pred_path)
    config = {"mode": args.mode, "generator": args.generator,
              "batch_size": args.batch_size, "jobs": args.jobs,
              "retries": args.retries, "prompt": _prompt_config_dict(pcfg)}
    inputs = [Path(args.corpus)] + ([onto_path] if onto_path else [])
    write_manifest(pred_path, "infer", config, inputs)
    notes = getattr(generator, "notes", [])
    for note in notes:
        print(f"generator note: {note}", file=sys.stderr)
    print(f"wrote {raw_path} and {pred_path}")
    if hasattr(generator, "close"):
        generator.close()
    return 0


def cmd_decode(args) -> int:
    ontology, onto_path = _load_ontology_arg(args.ontology)
    corpus = load_corpus(args.corpus, ontology)
    pcfg = _prompt_config(args, task="E2E")
    raws = genio.read_raw_generations(args.raw)
    records = genio.decode_raw_generations(raws, corpus, ontology, pcfg)
    write_predictions(records, args.out)
    inputs = [Path(args.raw), Path(args.corpus)] + ([onto_path] if onto_path else [])
    write_manifest(Path(args.out), "decode",
                   {"raw": str(args.raw), "prompt": _prompt_config_dict(pcfg)}, inputs)
    print(f"decoded {len(raws)} generations into {args.out}")
    return 0


def cmd_score(args) -> int:
    ontology, _ = _load_ontology_arg(args.ontology)
    gold = load_corpus(args.gold, ontology)
    restrict = None
    if args.restrict_types:
        if args.restrict_types.startswith("@"):
            restrict = json.loads(Path(args.restrict_types[1:]).read_text("utf-8"))
        else:
            restrict = [t for t in args.restrict_types.split(",") if t]
    runs = [(Path(p).name, read_predictions(p)) for p in args.preds]
    rows = metrics.score_matrix(runs, gold, restrict_types=restrict)
    if len(rows) == 1:
        print(metrics.report_text(rows[0][1]))
    else:
        print(metrics.matrix_text(rows))
    if args.csv:
        Path(args.csv).write_text(metrics.matrix_csv(rows), encoding="utf-8")
        print(f"wrote {args.csv}")
    if any(report.structural_errors for _, report in rows):
        return 1
    return 0


def cmd_baseline(args) -> int:
    ontology, onto_path = _load_ontology_arg(args.ontology)
    corpus = load_corpus(args.corpus, ontology)
    lemmas = baselines.load_lemma_table(args.lemmas) if args.lemmas else None
    records = baselines.run_baseline(corpus, ontology, args.kind, lemmas)
    write_predictions(records, args.out)
    inputs = [Path(args.corpus)] + ([onto_path] if onto_path else [])
    if args.lemmas:
        inputs.append(Path(args.lemmas))
    write_manifest(Path(args.out), "baseline",
                   {"kind": args.kind, "lemmas": args.lemmas}, inputs)
    print(f"wrote {sum(len(r.events) for r in records)} trigger predictions to {args.out}")
    return 0


def cmd_synth(args) -> int:
    ontology = synth.make_ontology(n_types=args.types, n_roles=args.roles,
                                   seed=args.seed)
    corpus_seed = args.corpus_seed if args.corpus_seed is not None else args.seed + 1
    corpus = synth.make_corpus(ontology, n_sentences=args.sentences, seed=corpus_seed,
                               inflect_frac=args.inflect,
                               with_args=not args.no_args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    onto_path = out_dir / "ontology.json"
    corpus_path = out_dir / "corpus.jsonl"
    from .ontology import save_ontology

    save_ontology(ontology, onto_path)
    save_corpus(corpus, corpus_path)
    write_manifest(corpus_path, "synth",
                   {"types": args.types, "roles": args.roles,
                    "sentences": args.sentences, "seed": args.seed,
                    "corpus_seed": corpus_seed, "inflect": args.inflect,
                    "with_args": not args.no_args}, [])
    print(f"wrote {onto_path} and {corpus_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eekit",
        description="Template-based generative event extraction toolkit")
    parser.add_argument("--version", action="version", version=f"eekit {__version__}")
    parser.add_argument("--config", help="JSON file with flag defaults")
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    parser.eekit_subparsers = subs

    p = subs.add_parser("validate", help="check an ontology (and optionally a corpus)")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus")
    p.set_defaults(func=cmd_validate)

    p = subs.add_parser("stats", help="corpus statistics table")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_stats)

    p = subs.add_parser("convert", help="convert OneIE-style files to the canonical format")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = subs.add_parser("split", help="proportional or few-shot training splits")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--proportion", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-coverage-greedy", action="store_true")
    p.add_argument("--n-common", type=int, default=None)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--restrict-types-from",
                   help="JSON list of event types; keep only their gold events")
    p.set_defaults(func=cmd_split)

    p = subs.add_parser("build-data", help="build training or inference instances")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--split", choices=("train", "inference"), default="train")
    p.add_argument("--m", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epoch", type=int, default=0)
    p.add_argument("--no-resample", action="store_true")
    p.add_argument("--triggers", help="prediction file supplying EAE query triggers")
    _add_prompt_flags(p)
    p.set_defaults(func=cmd_build_data)

    p = subs.add_parser("infer", help="run the end-to-end inference pipeline")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--mode", choices=genio.MODES, default="e2e")
    p.add_argument("--generator", required=True,
                   help="oracle[:opts], http://URL, or proc:COMMAND")
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--retries", type=int, default=2)
    _add_prompt_flags(p, with_task=False)
    p.set_defaults(func=cmd_infer, task="e2e")

    p = subs.add_parser("decode", help="re-decode a saved raw-generation file")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--raw", required=True)
    p.add_argument("--out", required=True)
    _add_prompt_flags(p, with_task=False)
    p.set_defaults(func=cmd_decode, task="e2e")

    p = subs.add_parser("score", help="score prediction files against gold")
    p.add_argument("--ontology", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--preds", action="append", required=True,
                   help="prediction file (repeat for a score matrix)")
    p.add_argument("--restrict-types",
                   help="comma-separated types, or @file.json with a list")
    p.add_argument("--csv", help="also write the report as CSV")
    p.set_defaults(func=cmd_score)

    p = subs.add_parser("baseline", help="keyword matching / lemma matching baselines")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kind", choices=("matching", "lemma"), default="matching")
    p.add_argument("--lemmas", help="TSV lemma table (surface<TAB>lemma)")
    p.set_defaults(func=cmd_baseline)

    p = subs.add_parser("synth", help="generate a synthetic ontology and corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--types", type=int, default=20)
    p.add_argument("--roles", type=int, default=6)
    p.add_argument("--sentences", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--corpus-seed", type=int, default=None,
                   help="decouple corpus sampling from the ontology seed")
    p.add_argument("--inflect", type=float, default=0.0)
    p.add_argument("--no-args", action="store_true")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, remaining = parser.parse_known_args(argv)
    if args.config:
        defaults = json.loads(Path(args.config).read_text("utf-8"))
        # Subcommands parse into their own namespace, so config-file defaults
        # must be installed on every subparser, keyed to real flags only.
        for sub in parser.eekit_subparsers.choices.values():
            dests = {action.dest for action in sub._actions}
            sub.set_defaults(**{k: v for k, v in defaults.items() if k in dests})
        args = parser.parse_args(argv)
    elif remaining:
        parser.error(f"unrecognized arguments: {' '.join(remaining)}")
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OntologyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
