"""Plain text -> sentence-embedding trajectory -> diffusion report.

Sentences become points either by averaging word vectors over a
self-contained EmbeddingSet (no neural model needed) or by loading
externally computed sentence vectors from a canonical file whose tokens are
the sentence ordinals "0".."N-1".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .embeddings import EmbeddingSet, load_canonical
from .errors import EmptyDocumentError, FormatError, InvariantError
from .msd import DiffusionReport, MsdCurve, Trajectory, analyze_trajectory

SPLIT_MODES = ("lines", "naive_punct")

# sentence boundary: ./!/? followed by whitespace and an ASCII uppercase
# letter; known to over-split abbreviations ("Mr. Smith" -> "Mr.", "Smith...")
_BOUNDARY = re.compile(r"(?<=[.!?])\s+(?=[A-Z])")

_WORD = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class SentenceSequence:
    sentences: tuple[str, ...]
    source: str = "<text>"

    def __post_init__(self):
        if any(not s for s in self.sentences):
            raise InvariantError("empty sentence in sequence")

    def __len__(self) -> int:
        return len(self.sentences)


def split_sentences(text: str, mode: str = "naive_punct",
                    source: str = "<text>") -> SentenceSequence:
    """Split a document into sentences.

    "lines" takes one sentence per input line, dropping blanks;
    "naive_punct" splits after ./!/? followed by whitespace and an
    uppercase letter (or at end of text).
    """
    if mode not in SPLIT_MODES:
        raise ValueError(f"unknown split mode {mode!r}")
    if mode == "lines":
        parts = [ln.strip() for ln in text.splitlines()]
    else:
        parts = [p.strip() for p in _BOUNDARY.split(text.strip())]
    sentences = tuple(p for p in parts if p)
    if not sentences:
        raise EmptyDocumentError(f"no sentences in {source}")
    return SentenceSequence(sentences, source)


def embed_sentences_avg(seq: SentenceSequence, words: EmbeddingSet,
                        ) -> tuple[Trajectory, list[int]]:
    """Average in-vocabulary word vectors per sentence.

    Tokens are lowercased and split on non-alphanumeric boundaries, then
    looked up exactly. Sentences with no in-vocabulary token are dropped;
    their indices are returned alongside the trajectory.
    """
    points = []
    dropped = []
    for i, sentence in enumerate(seq.sentences):
        rows = [words.matrix[idx] for tok in _WORD.findall(sentence.lower())
                if (idx := words.index_of(tok)) is not None]
        if rows:
            points.append(np.mean(rows, axis=0))
        else:
            dropped.append(i)
    if len(points) < 2:
        raise EmptyDocumentError(
            f"only {len(points)} of {len(seq)} sentences had known words")
    traj = Trajectory(np.asarray(points), provenance="document")
    return traj, dropped


def load_sentence_embeddings(source: BinaryIO) -> Trajectory:
    """Read a canonical file of per-sentence vectors keyed "0".."N-1"."""
    es = load_canonical(source)
    try:
        ordinals = [int(t) for t in es.tokens]
    except ValueError:
        raise FormatError("sentence file tokens must be decimal ordinals") from None
    if sorted(ordinals) != list(range(len(es))):
        raise FormatError("sentence ordinals are not contiguous from 0")
    order = np.argsort(ordinals)
    return Trajectory(es.matrix[order], provenance="document")


def analyze_document(traj: Trajectory, max_breakpoints: int = 2,
                     window: tuple[float, float] | None = None,
                     tail_fraction: float = 0.1,
                     ) -> tuple[DiffusionReport, MsdCurve]:
    """Full diffusion analysis of a sentence trajectory (needs >= 10 points)."""
    if len(traj) < 10:
        raise EmptyDocumentError(
            f"document too short: {len(traj)} sentences, need >= 10")
    return analyze_trajectory(traj, max_breakpoints=max_breakpoints,
                              window=window, tail_fraction=tail_fraction)
