"""Export jobs: enumerate a dataset, run the frozen encoder, and write the
audio and text embedding files with one shared, identically ordered
vocabulary."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .encoders import Encoder
from .format import write_treffemb

log = logging.getLogger(__name__)

DEFAULT_PROMPT = "This is a sound of "


@dataclass(frozen=True)
class ExportJob:
    dataset_root: Path
    class_names: tuple[str, ...]
    out_audio: Path
    out_text: Path
    prompt: str = DEFAULT_PROMPT
    manifest: Path | None = None  # CSV of (relative path, class name); else class folders

    def __post_init__(self):
        if not self.class_names:
            raise ValueError("class list is empty")
        if len(set(self.class_names)) != len(self.class_names):
            raise ValueError("duplicate class names")


@dataclass
class ExportReport:
    exported: int = 0
    skipped: list[str] = field(default_factory=list)


def _clips(job: ExportJob) -> list[tuple[Path, int]]:
    """(audio path, class id) pairs, in manifest or sorted-folder order."""
    index = {name: i for i, name in enumerate(job.class_names)}
    pairs = []
    if job.manifest is not None:
        with open(job.manifest, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].startswith("#"):
                    continue
                rel, cls = row[0].strip(), row[1].strip()
                if cls not in index:
                    raise ValueError(f"manifest class {cls!r} not in class list")
                pairs.append((job.dataset_root / rel, index[cls]))
    else:
        for name in job.class_names:
            folder = job.dataset_root / name
            if not folder.is_dir():
                raise ValueError(f"missing class folder {folder}")
            for p in sorted(folder.iterdir()):
                if p.is_file():
                    pairs.append((p, index[name]))
    if not pairs:
        raise ValueError("no audio clips found")
    return pairs


def export_audio(job: ExportJob, encoder: Encoder) -> ExportReport:
    """Embed every clip and write the labeled audio file.

    Unreadable clips are skipped with a warning and listed in the report;
    encoder failures on well-formed input propagate.
    """
    report = ExportReport()
    rows, labels = [], []
    for path, class_id in _clips(job):
        try:
            row = encoder.embed_audio(path)
        except (OSError, ValueError) as exc:
            log.warning("skipping %s: %s", path, exc)
            report.skipped.append(str(path))
            continue
        rows.append(row)
        labels.append(class_id)
    if not rows:
        raise ValueError("every clip failed to embed")
    write_treffemb(np.vstack(rows), job.out_audio, labels, list(job.class_names))
    report.exported = len(rows)
    return report


def export_text(job: ExportJob, encoder: Encoder) -> None:
    """Embed one prompt per class and write the vocabulary-ordered text file.

    Rows carry their class ids so the vocabulary travels with the file.
    """
    rows = [encoder.embed_text(job.prompt + name) for name in job.class_names]
    write_treffemb(
        np.vstack(rows),
        job.out_text,
        list(range(len(job.class_names))),
        list(job.class_names),
    )
