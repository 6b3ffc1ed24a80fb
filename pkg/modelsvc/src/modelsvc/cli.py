"""Command-line entry point: serve the wire protocol or fine-tune a model."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .server import GenerationService, ServiceConfig, serve_http, serve_stdio


def cmd_serve(args) -> int:
    cfg = ServiceConfig(
        mode=args.mode,
        checkpoint=args.checkpoint,
        max_input_length=args.max_input_length,
        max_output_length=args.max_output_length,
        beam_size=args.beam_size,
        batch_size=args.batch_size,
        device=args.device,
        port=args.port,
    )
    service = GenerationService(cfg)
    if args.transport == "stdio":
        return serve_stdio(service)
    serve_http(service)
    return 0


def cmd_finetune(args) -> int:
    from .finetune import TrainConfig, finetune

    arch = json.loads(args.arch) if args.arch else {}
    cfg = TrainConfig(
        learning_rate=args.lr,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        max_input_length=args.max_input_length,
        max_output_length=args.max_output_length,
        arch=arch,
    )
    _, history = finetune(args.instances, args.out, cfg)
    if history:
        print(f"trained {args.epochs} epochs; loss {history[0]:.4f} -> "
              f"{history[-1]:.4f}")
    else:
        print("0 epochs requested; checkpoint equals initialization")
    print(f"checkpoint written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelsvc",
        description="Generation service and fine-tuning for the event-extraction toolkit")
    parser.add_argument("--version", action="version",
                        version=f"modelsvc {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("serve", help="answer the generation wire protocol")
    p.add_argument("--mode", choices=("echo", "model"), default="echo")
    p.add_argument("--checkpoint", help="checkpoint directory (model mode)")
    p.add_argument("--transport", choices=("http", "stdio"), default="http")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--max-input-length", type=int, default=256)
    p.add_argument("--max-output-length", type=int, default=64)
    p.add_argument("--beam-size", type=int, default=1)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--device", default="cpu")
    p.set_defaults(func=cmd_serve)

    p = subs.add_parser("finetune", help="fine-tune on an instance file")
    p.add_argument("--instances", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lr", type=float, default=1e-5)
    p.add_argument("--weight-decay", type=float, default=1e-5)
    p.add_argument("--epochs", type=int, default=45)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-input-length", type=int, default=256)
    p.add_argument("--max-output-length", type=int, default=64)
    p.add_argument("--arch", help="JSON dict of model-size overrides")
    p.set_defaults(func=cmd_finetune)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
