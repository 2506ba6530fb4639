"""Deterministic 2-D PCA export for plotting walk and document trajectories."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError

_TOL = 1e-10
_MAX_ITER = 1000


@dataclass(frozen=True)
class Projection2D:
    coords: np.ndarray               # (N, 2), aligned with the input order
    explained_variance: tuple[float, float]  # fractions of total variance
    degenerate: bool                 # rank < 2: second axis is all zeros


def _power_iterate(mat: np.ndarray, start: np.ndarray) -> np.ndarray:
    """Dominant eigenvector by power iteration (tol 1e-10, <= 1000 iters)."""
    v = start / np.linalg.norm(start)
    for _ in range(_MAX_ITER):
        w = mat @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return v
        w /= norm
        if np.linalg.norm(w - v) < _TOL or np.linalg.norm(w + v) < _TOL:
            return w
        v = w
    return v


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # largest-magnitude loading points positive
    return -v if v[int(np.argmax(np.abs(v)))] < 0 else v


def pca_2d(points) -> Projection2D:
    """Project onto the top two principal directions of the covariance.

    Eigenvectors come from power iteration with deflation; each axis is
    sign-fixed so its largest-magnitude loading is positive. Collinear
    input yields zero y-coordinates and the degenerate flag.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise InsufficientDataError("need at least 3 points")
    if pts.shape[1] < 2:
        raise InsufficientDataError("need dimension >= 2")
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / (pts.shape[0] - 1)
    total = float(np.trace(cov))
    n2 = pts.shape[0]
    if total <= 0.0:
        return Projection2D(np.zeros((n2, 2)), (0.0, 0.0), True)

    v1 = _fix_sign(_power_iterate(cov, _basis_start(cov)))
    lam1 = float(v1 @ cov @ v1)
    deflated = cov - lam1 * np.outer(v1, v1)
    v2 = _fix_sign(_power_iterate(deflated, _basis_start(deflated)))
    lam2 = max(float(v2 @ deflated @ v2), 0.0)

    degenerate = lam2 <= _TOL * lam1
    x = centered @ v1
    y = np.zeros(n2) if degenerate else centered @ v2
    ev = (min(lam1 / total, 1.0), 0.0 if degenerate else min(lam2 / total, 1.0))
    return Projection2D(np.column_stack([x, y]), ev, degenerate)


def _basis_start(mat: np.ndarray) -> np.ndarray:
    start = np.zeros(mat.shape[0])
    start[int(np.argmax(np.diag(mat)))] = 1.0
    return start


def projection_to_csv(proj: Projection2D) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["idx", "x", "y"])
    for i, (x, y) in enumerate(proj.coords):
        writer.writerow([i, repr(float(x)), repr(float(y))])
    return buf.getvalue()
