"""Exact cosine-similarity queries over an EmbeddingSet.

Queries are brute-force scans (O(N_vocab * D)) with a full stable sort, so
results are exactly reproducible: ties in score break by ascending token
index, and scaling the query by any positive constant cannot change the
returned index sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .embeddings import EmbeddingSet, TokenRef
from .errors import DegenerateVectorError, EmptyPoolError


@dataclass(frozen=True)
class Neighbor:
    token: TokenRef
    score: float


@dataclass(frozen=True)
class CompositeQuery:
    """Deduplicated positive token list; the query is their combination."""
    positive: tuple[TokenRef, ...]

    def __post_init__(self):
        if not self.positive:
            raise ValueError("composite query needs at least one token")
        if len({r.index for r in self.positive}) != len(self.positive):
            raise ValueError("composite query tokens must be distinct")


def cosine(a, b) -> float:
    """a.b / (|a||b|); raises DegenerateVectorError on a zero vector."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError("cosine of a zero vector")
    return float(np.dot(a, b) / (na * nb))


def top_k(es: EmbeddingSet, query, k: int,
          exclude: Iterable[int] = ()) -> list[Neighbor]:
    """The k highest-cosine tokens not in `exclude`, best first.

    Ties break by ascending token index. Zero-norm rows can never be
    returned (cosine is undefined for them). Returns fewer than k when the
    candidate pool is smaller; raises EmptyPoolError when it is empty.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    query = np.asarray(query, dtype=np.float64)
    qnorm = np.linalg.norm(query)
    if qnorm == 0.0:
        raise DegenerateVectorError("zero query vector")
    norms = np.linalg.norm(es.matrix, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = (es.matrix @ query) / (norms * qnorm)
    mask = norms > 0.0
    excluded = set(exclude)
    if excluded:
        idx = np.fromiter(excluded, dtype=np.int64)
        mask[idx] = False
    if not mask.any():
        raise EmptyPoolError("no candidates after exclusions")
    scores = np.where(mask, scores, -np.inf)
    order = np.argsort(-scores, kind="stable")
    picked = order[: min(k, int(mask.sum()))]
    return [Neighbor(es.ref_at(int(i)), float(scores[i])) for i in picked]


def composite_vector(es: EmbeddingSet, q: CompositeQuery) -> np.ndarray:
    """Arithmetic mean of the L2-normalized member vectors."""
    rows = es.matrix[[r.index for r in q.positive]]
    norms = np.linalg.norm(rows, axis=1)
    zero = np.where(norms == 0.0)[0]
    if zero.size:
        raise DegenerateVectorError(
            f"zero vector for token {q.positive[int(zero[0])].token!r}")
    return (rows / norms[:, None]).mean(axis=0)


def make_composite(es: EmbeddingSet, tokens: Sequence[TokenRef]) -> CompositeQuery:
    """Build a CompositeQuery, dropping duplicate refs while keeping order."""
    seen: set[int] = set()
    unique = []
    for ref in tokens:
        if ref.index not in seen:
            seen.add(ref.index)
            unique.append(ref)
    return CompositeQuery(tuple(unique))
