"""Regenerate the bundled demo corpus and its word-vector file.

The corpus is a synthetic public-domain (CC0) document of ~3,400 sentences
built to carry real topical structure: a latent 24-dimensional topic state
follows a slow mean-reverting path, and each sentence draws its content
words from a working set that is gradually refreshed with words whose
vectors lie near the current topic state. Nearby sentences therefore share
vocabulary and topic direction, while distant sentences decorrelate, which
is exactly the rising-then-flattening MSD shape the document pipeline is
meant to detect. Word labels are pronounceable nonsense; the vector file
holds the same vectors the generator sampled from.

Usage: python tools/make_corpus.py [out_dir]   (default src/semrheo/data)
"""

from __future__ import annotations

import io
import sys
from pathlib import Path

import numpy as np

from semrheo.embeddings import EmbeddingSet, save_word2vec_text
from semrheo.rng import SplitMix64, normal_block
from semrheo.synthetic import SyntheticSpec, generate

SEED = 20240601
N_SENTENCES = 3400
DIMS = 24
N_CONTENT = 1200
N_FUNCTION = 60
ACTIVE_WORDS = 10          # content words per sentence
REFRESH_PROB = 0.2         # per-word chance of replacement each sentence
CANDIDATES = 40            # sample size for topic-matched replacement
THETA = 0.02               # topic reversion rate
FUNCTION_SCALE = 0.15

_CONSONANTS = "b c d f g h j k l m n p r s t v z br ch dr gr pl st tr".split()
_VOWELS = "a e i o u ai ea ou".split()


def make_words(rng: SplitMix64, count: int, min_syll: int, max_syll: int,
               taken: set[str]) -> list[str]:
    words = []
    while len(words) < count:
        n = min_syll + rng.randbelow(max_syll - min_syll + 1)
        w = "".join(_CONSONANTS[rng.randbelow(len(_CONSONANTS))]
                    + _VOWELS[rng.randbelow(len(_VOWELS))] for _ in range(n))
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def build() -> tuple[str, EmbeddingSet]:
    rng = SplitMix64(SEED)
    taken: set[str] = set()
    content = make_words(rng, N_CONTENT, 2, 4, taken)
    function = make_words(rng, N_FUNCTION, 1, 2, taken)

    content_vecs = normal_block(SEED + 1, N_CONTENT * DIMS).reshape(
        N_CONTENT, DIMS)
    function_vecs = FUNCTION_SCALE * normal_block(
        SEED + 2, N_FUNCTION * DIMS).reshape(N_FUNCTION, DIMS)

    topic = generate(SyntheticSpec("ou_confined", dims=DIMS,
                                   steps=N_SENTENCES - 1, seed=SEED + 3,
                                   theta=THETA, sigma=1.0)).points

    def nearest_candidate(t: np.ndarray) -> int:
        idx = [rng.randbelow(N_CONTENT) for _ in range(CANDIDATES)]
        d2 = ((content_vecs[idx] - t) ** 2).sum(axis=1)
        return idx[int(np.argmin(d2))]

    active = [nearest_candidate(topic[0]) for _ in range(ACTIVE_WORDS)]
    lines = []
    for s in range(N_SENTENCES):
        for slot in range(ACTIVE_WORDS):
            if rng.randbelow(1000) < REFRESH_PROB * 1000:
                active[slot] = nearest_candidate(topic[s])
        words = [content[i] for i in active]
        # two function words at deterministic pseudo-random positions
        for _ in range(2):
            pos = rng.randbelow(len(words) + 1)
            words.insert(pos, function[rng.randbelow(N_FUNCTION)])
        sentence = " ".join(words)
        lines.append(sentence[0].upper() + sentence[1:] + ".")

    vocab = EmbeddingSet(content + function,
                         np.vstack([content_vecs, function_vecs]))
    return "\n".join(lines) + "\n", vocab


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "src" / "semrheo" / "data")
    out_dir.mkdir(parents=True, exist_ok=True)
    text, vocab = build()
    (out_dir / "corpus.txt").write_text(text, encoding="utf-8")
    buf = io.BytesIO()
    save_word2vec_text(vocab, buf)
    (out_dir / "corpus_vectors.txt").write_bytes(buf.getvalue())
    print(f"wrote {len(text.splitlines())} sentences, "
          f"{len(vocab)} word vectors to {out_dir}")


if __name__ == "__main__":
    main()
