"""Embedding export tool: runs a frozen contrastive audio-text encoder over a
dataset and writes TREFFEMB files for the treff toolkit."""

__version__ = "0.1.0"

from .encoders import ClapEncoder, StubEncoder, load_encoder
from .format import write_treffemb
from .job import DEFAULT_PROMPT, ExportJob, ExportReport, export_audio, export_text
