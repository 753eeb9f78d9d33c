"""Command-line entry point for the embedding exporter."""

import argparse
import logging
import sys

from .exporter import ExportConfig, ExportError, export_embeddings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Export per-token embeddings from a masked language model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", required=True, help="model name or local path")
    p.add_argument("--fine-tune", action="store_true", dest="fine_tune")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=1e-5)
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--max-len", type=int, default=128, dest="max_len")
    p.add_argument("--sum-layers", type=int, default=4, dest="sum_layers")
    p.add_argument("--format", choices=["jsonl", "plain-lines"])
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = ExportConfig(
            corpus_path=args.corpus,
            model_name_or_path=args.model,
            output_path=args.out,
            fine_tune=args.fine_tune,
            epochs=args.epochs,
            learning_rate=args.lr,
            batch_size=args.batch,
            max_seq_len=args.max_len,
            layers_to_sum=args.sum_layers,
            corpus_format=args.format,
        )
        path = export_embeddings(config)
    except (ExportError, ValueError, OSError) as exc:
        print(f"export error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
