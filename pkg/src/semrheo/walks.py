"""Free and guided similarity walks, plus absorbing-cluster detection.

A walk repeatedly queries the top-n most similar tokens and steps to one of
them chosen uniformly by a per-walk SplitMix64 stream, so the whole path is
a pure function of (embedding set, parameters). Guided walks blend the
current token with a fixed anchor set (the start token plus the guide
tokens); anchors are barred from the candidate lists, which confines the
reachable vocabulary.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSet, TokenRef
from .errors import InvariantError
from .rng import SplitMix64
from .similarity import Neighbor, composite_vector, make_composite, top_k


@dataclass(frozen=True)
class WalkParams:
    start: TokenRef
    top_n: int
    steps: int
    guides: tuple[TokenRef, ...] = ()
    seed: int = 0
    self_exclusion: bool = True

    def __post_init__(self):
        if self.top_n < 1:
            raise InvariantError("top_n must be >= 1")
        if self.steps < 1:
            raise InvariantError("steps must be >= 1")
        if any(g.index == self.start.index for g in self.guides):
            raise InvariantError("start token cannot be one of the guides")


@dataclass(frozen=True)
class Walk:
    params: WalkParams
    path: tuple[TokenRef, ...]
    candidate_log: tuple[tuple[Neighbor, ...], ...]


@dataclass(frozen=True)
class AbsorptionReport:
    absorbed: bool
    onset_step: int | None
    cluster: frozenset[TokenRef]
    window: int
    distinct_threshold: int


def free_walk(es: EmbeddingSet, params: WalkParams) -> Walk:
    """Unrestricted similarity walk from params.start."""
    if params.guides:
        raise InvariantError("free_walk takes empty guides; use guided_walk")
    return _run(es, params, anchors=())


def guided_walk(es: EmbeddingSet, params: WalkParams) -> Walk:
    """Similarity walk tethered to {start} ∪ guides.

    The step query is the composite of the anchors plus the current token;
    anchors never appear in candidate lists, so they cannot be revisited.
    """
    if not params.guides:
        raise InvariantError("guided_walk needs at least one guide")
    return _run(es, params, anchors=(params.start,) + params.guides)


def _run(es: EmbeddingSet, params: WalkParams,
         anchors: tuple[TokenRef, ...]) -> Walk:
    rng = SplitMix64(params.seed)
    current = params.start
    path = [current]
    log: list[tuple[Neighbor, ...]] = []
    anchor_idx = {a.index for a in anchors}
    for _ in range(params.steps):
        if anchors:
            query = composite_vector(es, make_composite(es, anchors + (current,)))
        else:
            query = es.vector(current.index)
        exclude = set(anchor_idx)
        if params.self_exclusion:
            exclude.add(current.index)
        candidates = top_k(es, query, params.top_n, exclude)
        current = candidates[rng.randbelow(len(candidates))].token
        log.append(tuple(candidates))
        path.append(current)
    return Walk(params=params, path=tuple(path), candidate_log=tuple(log))


def detect_absorption(walk: Walk, window: int,
                      distinct_threshold: int) -> AbsorptionReport:
    """Find the earliest step after which the path stays inside a small set.

    The onset is the smallest t such that every length-`window` slice of the
    path starting at or after t holds at most `distinct_threshold` distinct
    tokens; the walk counts as absorbed only when a full window fits between
    the onset and the final step.
    """
    steps = walk.params.steps
    if window > steps:
        raise ValueError("window must be <= steps")
    if distinct_threshold < 1:
        raise ValueError("distinct_threshold must be >= 1")
    path = walk.path
    n_windows = len(path) - window + 1
    counts: dict[int, int] = {}
    distinct = 0
    last_fail = -1
    for s in range(n_windows):
        if s == 0:
            for ref in path[:window]:
                counts[ref.index] = counts.get(ref.index, 0) + 1
            distinct = len(counts)
        else:
            out = path[s - 1].index
            counts[out] -= 1
            if counts[out] == 0:
                del counts[out]
            inc = path[s + window - 1].index
            counts[inc] = counts.get(inc, 0) + 1
            distinct = len(counts)
        if distinct > distinct_threshold:
            last_fail = s
    onset = last_fail + 1
    if onset >= n_windows or onset + window > steps:
        return AbsorptionReport(False, None, frozenset(), window,
                                distinct_threshold)
    cluster = frozenset(path[onset:])
    return AbsorptionReport(True, onset, cluster, window, distinct_threshold)


def walk_points(es: EmbeddingSet, walk: Walk, normalize: bool = False) -> np.ndarray:
    """Embedding coordinates of the walk path, one row per visited token."""
    pts = es.matrix[[ref.index for ref in walk.path]].copy()
    if normalize:
        norms = np.linalg.norm(pts, axis=1)
        pts /= norms[:, None]
    return pts


def walk_to_json(walk: Walk, include_candidates: bool = False) -> str:
    doc = {
        "params": {
            "start": walk.params.start.token,
            "top_n": walk.params.top_n,
            "steps": walk.params.steps,
            "guides": [g.token for g in walk.params.guides],
            "seed": walk.params.seed,
            "self_exclusion": walk.params.self_exclusion,
        },
        "path": [ref.token for ref in walk.path],
    }
    if include_candidates:
        doc["candidate_log"] = [
            [{"token": nb.token.token, "score": nb.score} for nb in step]
            for step in walk.candidate_log
        ]
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def walk_to_csv(walk: Walk) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "token"])
    for step, ref in enumerate(walk.path):
        writer.writerow([step, ref.token])
    return buf.getvalue()


def absorption_to_json(report: AbsorptionReport) -> str:
    doc = {
        "absorbed": report.absorbed,
        "onset_step": report.onset_step,
        "cluster": sorted(ref.token for ref in report.cluster),
        "window": report.window,
        "distinct_threshold": report.distinct_threshold,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
