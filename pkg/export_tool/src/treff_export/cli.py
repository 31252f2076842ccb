"""treff-export: write audio/text embedding files for the treff toolkit.

Classes come from --classes (comma-separated), a --class-file (one name per
line), or, without a manifest, the dataset's class folder names.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .encoders import load_encoder
from .job import DEFAULT_PROMPT, ExportJob, export_audio, export_text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treff-export")
    parser.add_argument("--dataset", required=True, help="dataset root directory")
    parser.add_argument("--manifest", help="CSV of (relative path, class name)")
    parser.add_argument("--checkpoint", required=True,
                        help="model id, or stub:<dim> for a deterministic test encoder")
    parser.add_argument("--prompt", default=DEFAULT_PROMPT)
    parser.add_argument("--classes", help="comma-separated class names, vocabulary order")
    parser.add_argument("--class-file", help="file with one class name per line")
    parser.add_argument("--out-audio", required=True)
    parser.add_argument("--out-text", required=True)
    return parser


def _class_names(args) -> tuple[str, ...]:
    if args.classes:
        return tuple(c.strip() for c in args.classes.split(","))
    if args.class_file:
        lines = Path(args.class_file).read_text().splitlines()
        return tuple(line.strip() for line in lines if line.strip())
    if args.manifest:
        raise ValueError("--classes or --class-file is required with a manifest")
    root = Path(args.dataset)
    names = tuple(sorted(p.name for p in root.iterdir() if p.is_dir()))
    if not names:
        raise ValueError(f"no class folders under {root}")
    return names


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        names = _class_names(args)
        job = ExportJob(
            dataset_root=Path(args.dataset),
            class_names=names,
            out_audio=Path(args.out_audio),
            out_text=Path(args.out_text),
            prompt=args.prompt,
            manifest=Path(args.manifest) if args.manifest else None,
        )
        encoder = load_encoder(args.checkpoint)
        report = export_audio(job, encoder)
        export_text(job, encoder)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    json.dump(
        {
            "exported": report.exported,
            "skipped": report.skipped,
            "classes": list(names),
            "out_audio": str(job.out_audio),
            "out_text": str(job.out_text),
        },
        sys.stdout,
        indent=2,
        sort_keys=True,
    )
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
