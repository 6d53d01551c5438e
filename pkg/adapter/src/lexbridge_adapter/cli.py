"""Command-line entry points for the adapter."""
from __future__ import annotations

import argparse
import sys

from lexbridge_adapter import ModelLoadFailure
from lexbridge_adapter.export import DEFAULT_MODEL, ExportJob, export_embeddings
from lexbridge_adapter.service import DEFAULT_CROSS_ENCODER, CrossEncoderScorer, serve_scores


def export_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lexbridge-export",
        description="Embed a lexbridge corpus file with a neural model.")
    parser.add_argument("--corpus", required=True, help="corpus JSONL file")
    parser.add_argument("--out", required=True, help="output vector file")
    parser.add_argument("--model", default=DEFAULT_MODEL)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--prefix", choices=("query", "passage", "none"),
                        default="query")
    args = parser.parse_args(argv)

    job = ExportJob(corpus_path=args.corpus, output_path=args.out,
                    model_id=args.model, batch_size=args.batch_size,
                    prefix=args.prefix)
    try:
        header = export_embeddings(job)
    except (ModelLoadFailure, OSError, ValueError) as exc:
        print(f"ERROR {exc}", file=sys.stderr)
        return 1
    print(f"wrote {header['count']} vectors (dim {header['dim']}) to {args.out}",
          file=sys.stderr)
    return 0


def server_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lexbridge-score-server",
        description="Serve the lexbridge pair-scoring wire protocol.")
    parser.add_argument("--port", type=int, default=8901)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--model", default=DEFAULT_CROSS_ENCODER)
    args = parser.parse_args(argv)
    serve_scores(args.port, scorer=CrossEncoderScorer(args.model), host=args.host)
    return 0


if __name__ == "__main__":
    sys.exit(export_main())
