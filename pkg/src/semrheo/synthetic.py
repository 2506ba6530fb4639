"""Reference trajectories with known diffusion laws.

Four generators: Brownian increments, constant-velocity motion, a
mean-reverting process integrated with its exact one-step discretization

    x_{t+1} = x_t * exp(-theta) + sigma * sqrt(1 - exp(-2*theta)) * xi_t,

and a heavy-tailed flight (Pareto step lengths, isotropic directions).
The first three have closed-form expected MSDs used to validate the
analyzer; all four are deterministic functions of the spec's seed, with a
documented draw order so trajectories are reproducible anywhere.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import InvariantError, UnsupportedError
from .msd import Trajectory
from .rng import normal_block, pareto_block

KINDS = ("brownian", "ballistic", "ou_confined", "levy")


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str
    dims: int
    steps: int
    seed: int = 0
    step_std: float = 1.0                      # brownian: per-axis noise std
    velocity: tuple[float, ...] | None = None  # ballistic
    theta: float = 0.1                         # ou_confined: reversion rate
    sigma: float = 1.0                         # ou_confined: stationary std
    mu: float = 1.5                            # levy: tail exponent
    x_min: float = 1.0                         # levy: minimum step length

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvariantError(f"unknown kind {self.kind!r}")
        if self.dims < 1:
            raise InvariantError("dims must be >= 1")
        if self.steps < 2:
            raise InvariantError("steps must be >= 2")
        if self.kind == "brownian" and self.step_std < 0:
            raise InvariantError("step_std must be >= 0")
        if self.kind == "ballistic":
            v = self.velocity
            if v is None or len(v) != self.dims:
                raise InvariantError("velocity must have length dims")
        if self.kind == "ou_confined" and (self.theta <= 0 or self.sigma < 0):
            raise InvariantError("need theta > 0 and sigma >= 0")
        if self.kind == "levy" and not (0 < self.mu <= 3 and self.x_min > 0):
            raise InvariantError("need mu in (0, 3] and x_min > 0")


def generate(spec: SyntheticSpec) -> Trajectory:
    """Trajectory of spec.steps + 1 points, deterministic given spec.seed.

    Draw order: brownian consumes steps*dims normals (step-major);
    ou_confined consumes (steps+1)*dims normals, the first dims for the
    stationary start; levy consumes steps Pareto uniforms then steps*dims
    direction normals; ballistic consumes nothing.
    """
    n, d = spec.steps, spec.dims
    if spec.kind == "ballistic":
        t = np.arange(n + 1, dtype=np.float64)
        pts = t[:, None] * np.asarray(spec.velocity, dtype=np.float64)
    elif spec.kind == "brownian":
        noise = normal_block(spec.seed, n * d).reshape(n, d) * spec.step_std
        pts = np.vstack([np.zeros(d), np.cumsum(noise, axis=0)])
    elif spec.kind == "ou_confined":
        draws = normal_block(spec.seed, (n + 1) * d).reshape(n + 1, d)
        decay = math.exp(-spec.theta)
        kick = spec.sigma * math.sqrt(1.0 - math.exp(-2.0 * spec.theta))
        x0 = spec.sigma * draws[0]
        rest, _ = lfilter([1.0], [1.0, -decay], kick * draws[1:],
                          axis=0, zi=(decay * x0)[None, :])
        pts = np.vstack([x0, rest])
    else:  # levy
        lengths = pareto_block(spec.mu, spec.x_min, spec.seed, n)
        dirs = normal_block(spec.seed, n * d, offset=n).reshape(n, d)
        norms = np.linalg.norm(dirs, axis=1)
        norms[norms == 0.0] = 1.0
        jumps = lengths[:, None] * (dirs / norms[:, None])
        pts = np.vstack([np.zeros(d), np.cumsum(jumps, axis=0)])
    return Trajectory(pts, provenance="synthetic")


def expected_msd(spec: SyntheticSpec, delays) -> np.ndarray:
    """Closed-form ensemble MSD at the given delays.

    brownian: dims * step_std^2 * delay
    ballistic: |v|^2 * delay^2
    ou_confined: 2 * dims * sigma^2 * (1 - exp(-theta * delay))
    """
    d = np.asarray(delays, dtype=np.float64)
    if spec.kind == "brownian":
        return spec.dims * spec.step_std ** 2 * d
    if spec.kind == "ballistic":
        v2 = float(np.dot(spec.velocity, spec.velocity))
        return v2 * d ** 2
    if spec.kind == "ou_confined":
        return 2.0 * spec.dims * spec.sigma ** 2 * (1.0 - np.exp(-spec.theta * d))
    raise UnsupportedError(
        "no finite-variance closed form for levy trajectories")


def trajectory_to_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"x{i}" for i in range(traj.dim)])
    for t, row in enumerate(traj.points):
        writer.writerow([t] + [repr(float(v)) for v in row])
    return buf.getvalue()
