"""Encoder backends.

An encoder maps audio files and text strings to rows in a shared embedding
space. The checkpoint identifier selects the backend:

  "stub:<dim>"   deterministic hash-based embeddings, no model download;
                 useful for tests and offline pipeline checks
  anything else  a contrastive audio-text checkpoint loaded through
                 transformers (e.g. a CLAP model id)

Embeddings are written as produced; the consuming toolkit normalizes.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Protocol

import numpy as np


class Encoder(Protocol):
    dim: int

    def embed_audio(self, path: Path) -> np.ndarray: ...

    def embed_text(self, text: str) -> np.ndarray: ...


class StubEncoder:
    """Deterministic pseudo-embeddings derived from content hashes.

    Identical inputs give identical rows, like a frozen encoder would, but
    there is no semantic structure beyond per-content determinism.
    """

    def __init__(self, dim: int = 32):
        if dim < 2:
            raise ValueError(f"dim must be >= 2, got {dim}")
        self.dim = dim

    def _from_bytes(self, payload: bytes) -> np.ndarray:
        seed = int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")
        return np.random.default_rng(seed).standard_normal(self.dim)

    def embed_audio(self, path: Path) -> np.ndarray:
        return self._from_bytes(Path(path).read_bytes())

    def embed_text(self, text: str) -> np.ndarray:
        return self._from_bytes(text.encode("utf-8"))


class ClapEncoder:
    """Frozen contrastive audio-text model via transformers.

    Only WAV input is supported; audio is mono-mixed and linearly resampled
    to the processor's sampling rate before feature extraction.
    """

    def __init__(self, checkpoint: str):
        try:
            import torch
            from transformers import ClapModel, ClapProcessor
        except ImportError as exc:
            raise RuntimeError(f"transformers/torch unavailable: {exc}") from exc
        try:
            self._model = ClapModel.from_pretrained(checkpoint).eval()
            self._processor = ClapProcessor.from_pretrained(checkpoint)
        except Exception as exc:
            raise RuntimeError(f"failed to load checkpoint {checkpoint!r}: {exc}") from exc
        self._torch = torch
        self.dim = int(self._model.config.projection_dim)
        self._rate = int(self._processor.feature_extractor.sampling_rate)

    def _load_wav(self, path: Path) -> np.ndarray:
        from scipy.io import wavfile

        rate, samples = wavfile.read(path)
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim == 2:
            samples = samples.mean(axis=1)
        peak = np.abs(samples).max()
        if peak > 0:
            samples = samples / peak
        if rate != self._rate:
            duration = samples.shape[0] / rate
            n_out = max(int(round(duration * self._rate)), 1)
            samples = np.interp(
                np.linspace(0.0, samples.shape[0] - 1, n_out),
                np.arange(samples.shape[0]),
                samples,
            )
        return samples

    def embed_audio(self, path: Path) -> np.ndarray:
        samples = self._load_wav(Path(path))
        inputs = self._processor(
            audios=samples, sampling_rate=self._rate, return_tensors="pt"
        )
        with self._torch.no_grad():
            features = self._model.get_audio_features(**inputs)
        return features[0].cpu().numpy().astype(np.float64)

    def embed_text(self, text: str) -> np.ndarray:
        inputs = self._processor(text=[text], return_tensors="pt", padding=True)
        with self._torch.no_grad():
            features = self._model.get_text_features(**inputs)
        return features[0].cpu().numpy().astype(np.float64)


def load_encoder(checkpoint: str) -> Encoder:
    if checkpoint.startswith("stub:"):
        return StubEncoder(dim=int(checkpoint.split(":", 1)[1]))
    return ClapEncoder(checkpoint)
