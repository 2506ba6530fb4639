"""Command-line entry point.

Subcommands: convert (text embedding formats -> canonical), walk / guided
(similarity walks plus MSD analysis), doc (document pipeline), simulate
(synthetic reference trajectories). All randomness flows from --seed; file
contents are byte-identical across repeat invocations and across --jobs.

Exit codes: 0 success, 2 input/format error, 3 unknown token,
4 degenerate data.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import documents, figures, msd, projection, synthetic, walks
from .embeddings import (
    EmbeddingSet,
    l2_normalize,
    load_canonical,
    load_glove_text,
    load_word2vec_text,
    save_canonical,
)
from .errors import (
    DegenerateVectorError,
    EmptyDocumentError,
    EmptyPoolError,
    FormatError,
    InsufficientDataError,
    InvariantError,
    UnsupportedError,
)

_INPUT_ERRORS = (FormatError, InvariantError, UnsupportedError,
                 FileNotFoundError, IsADirectoryError, NotADirectoryError,
                 PermissionError, ValueError)
_DATA_ERRORS = (EmptyDocumentError, InsufficientDataError,
                DegenerateVectorError, EmptyPoolError)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except KeyError as e:
        print(f"error: unknown token {e.args[0]!r}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semrheo",
        description="Similarity walks and MSD diffusion analysis of "
                    "embedding-space trajectories.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="text embedding file -> canonical")
    p.add_argument("--from", dest="in_format", required=True,
                   choices=["word2vec", "glove"])
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dims", type=int, help="vector size (glove input only)")
    p.add_argument("--normalize", action="store_true",
                   help="L2-normalize rows before writing")
    p.set_defaults(func=_cmd_convert)

    analysis = argparse.ArgumentParser(add_help=False)
    analysis.add_argument("--window", nargs=2, type=float, metavar=("LO", "HI"),
                          help="fit window in delays (default: automatic)")
    analysis.add_argument("--max-breakpoints", type=int, default=2)
    analysis.add_argument("--tail-fraction", type=float, default=0.1)
    analysis.add_argument("--normalize", action="store_true",
                          help="unit-normalize trajectory points before MSD")
    out_opts = argparse.ArgumentParser(add_help=False)
    out_opts.add_argument("--out", required=True, help="output directory")
    out_opts.add_argument("--no-figures", action="store_true",
                          help="skip PNG rendering")

    walk_opts = argparse.ArgumentParser(add_help=False)
    walk_opts.add_argument("--embeddings", required=True,
                           help="canonical embedding file")
    walk_opts.add_argument("--start", required=True)
    walk_opts.add_argument("--top-n", type=int, default=10)
    walk_opts.add_argument("--steps", type=int, default=1000)
    walk_opts.add_argument("--seed", type=int, default=0)
    walk_opts.add_argument("--no-self-exclusion", dest="self_exclusion",
                           action="store_false")
    walk_opts.add_argument("--ensemble", type=int, default=1)
    walk_opts.add_argument("--jobs", type=int, default=None,
                           help="concurrent walks (default: $SEMRHEO_JOBS or 1)")
    walk_opts.add_argument("--absorb-window", type=int, default=None,
                           help="absorption window (default: min(50, steps))")
    walk_opts.add_argument("--absorb-distinct", type=int, default=10)
    walk_opts.add_argument("--candidates", action="store_true",
                           help="include candidate lists in walk JSON")

    p = sub.add_parser("walk", parents=[walk_opts, analysis, out_opts],
                       help="free similarity walk")
    p.set_defaults(func=_cmd_walk, guided=False)

    p = sub.add_parser("guided", parents=[walk_opts, analysis, out_opts],
                       help="guided (tethered) similarity walk")
    p.add_argument("--guide", action="append", required=True,
                   help="tether token (repeatable)")
    p.set_defaults(func=_cmd_walk, guided=True)

    p = sub.add_parser("doc", parents=[analysis, out_opts],
                       help="document MSD analysis")
    p.add_argument("--text", help="UTF-8 plain text file")
    p.add_argument("--embeddings", help="canonical word-vector file")
    p.add_argument("--sentence-embeddings",
                   help="canonical per-sentence vector file (alternative input)")
    p.add_argument("--mode", choices=list(documents.SPLIT_MODES),
                   default="naive_punct")
    p.set_defaults(func=_cmd_doc)

    p = sub.add_parser("simulate", parents=[analysis, out_opts],
                       help="synthetic reference trajectory")
    p.add_argument("--kind", required=True, choices=list(synthetic.KINDS))
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-std", type=float, default=1.0)
    p.add_argument("--velocity", help="comma-separated components")
    p.add_argument("--theta", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.5)
    p.add_argument("--x-min", type=float, default=1.0)
    p.set_defaults(func=_cmd_simulate)
    return parser


def _write(path: Path, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(content)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_set(path: str) -> EmbeddingSet:
    with open(path, "rb") as fh:
        return load_canonical(fh)


def _cmd_convert(args) -> int:
    with open(args.in_path, "rb") as fh:
        if args.in_format == "word2vec":
            es = load_word2vec_text(fh)
        else:
            if args.dims is None:
                raise ValueError("--dims is required for glove input")
            es = load_glove_text(fh, args.dims)
    if args.normalize:
        es = l2_normalize(es)
    with open(args.out, "wb") as fh:
        save_canonical(es, fh)
    print(f"{len(es)} {es.dim}")
    return 0


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    return max(1, int(os.environ.get("SEMRHEO_JOBS", "1")))


def _analysis_kwargs(args) -> dict:
    return {
        "max_breakpoints": args.max_breakpoints,
        "window": tuple(args.window) if args.window else None,
        "tail_fraction": args.tail_fraction,
    }


def _cmd_walk(args) -> int:
    es = _load_set(args.embeddings)
    start = es.ref(args.start)
    guides = tuple(es.ref(g) for g in args.guide) if args.guided else ()
    absorb_window = args.absorb_window or min(50, args.steps)
    out = _outdir(args)

    def one(ordinal: int):
        params = walks.WalkParams(start=start, top_n=args.top_n,
                                  steps=args.steps, guides=guides,
                                  seed=args.seed + ordinal,
                                  self_exclusion=args.self_exclusion)
        walk = (walks.guided_walk if args.guided else walks.free_walk)(es, params)
        traj = msd.Trajectory(walks.walk_points(es, walk, args.normalize),
                              provenance="walk")
        report, curve = msd.analyze_trajectory(traj, **_analysis_kwargs(args))
        absorption = walks.detect_absorption(walk, absorb_window,
                                             args.absorb_distinct)
        return walk, report, curve, absorption

    n = max(1, args.ensemble)
    if _jobs(args) > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=_jobs(args)) as pool:
            results = list(pool.map(one, range(n)))
    else:
        results = [one(i) for i in range(n)]

    curves = []
    for i, (walk, report, curve, absorption) in enumerate(results):
        sfx = f"_{i:03d}" if n > 1 else ""
        _write(out / f"walk{sfx}.json",
               walks.walk_to_json(walk, include_candidates=args.candidates))
        _write(out / f"walk{sfx}.csv", walks.walk_to_csv(walk))
        _write(out / f"msd{sfx}.csv", msd.msd_to_csv(curve))
        _write(out / f"report{sfx}.json", msd.report_to_json(report))
        _write(out / f"absorption{sfx}.json",
               walks.absorption_to_json(absorption))
        curves.append(curve)
        print(f"walk {i}: seed={walk.params.seed} regime={report.regime} "
              f"absorbed={absorption.absorbed} final={walk.path[-1].token}")

    if n > 1:
        mean_curve = msd.MsdCurve(curves[0].delays,
                                  np.mean([c.values for c in curves], axis=0),
                                  np.sum([c.counts for c in curves], axis=0))
        _write(out / "msd_mean.csv", msd.msd_to_csv(mean_curve))
        if not args.no_figures:
            figures.render_msd(str(out / "msd_mean.png"), mean_curve,
                               members=curves, title="ensemble mean MSD")
    elif not args.no_figures:
        figures.render_msd(str(out / "msd.png"), curves[0],
                           report=results[0][1], title="walk MSD")
    return 0


def _cmd_doc(args) -> int:
    out = _outdir(args)
    if args.sentence_embeddings:
        with open(args.sentence_embeddings, "rb") as fh:
            traj = documents.load_sentence_embeddings(fh)
        n_split, dropped = len(traj), []
    else:
        if not (args.text and args.embeddings):
            raise ValueError("doc needs --text and --embeddings, "
                             "or --sentence-embeddings")
        text = Path(args.text).read_text(encoding="utf-8")
        seq = documents.split_sentences(text, args.mode, source=args.text)
        words = _load_set(args.embeddings)
        traj, dropped = documents.embed_sentences_avg(seq, words)
        n_split = len(seq)
    if args.normalize:
        norms = np.linalg.norm(traj.points, axis=1)
        if np.any(norms == 0.0):
            raise DegenerateVectorError("zero sentence vector")
        traj = msd.Trajectory(traj.points / norms[:, None],
                              provenance="document")
    report, curve = documents.analyze_document(traj, **_analysis_kwargs(args))
    proj = projection.pca_2d(traj.points)
    _write(out / "msd.csv", msd.msd_to_csv(curve))
    _write(out / "report.json", msd.report_to_json(report))
    _write(out / "projection.csv", projection.projection_to_csv(proj))
    if not args.no_figures:
        figures.render_msd(str(out / "msd.png"), curve, report=report,
                           title="document MSD")
        figures.render_projection(str(out / "projection.png"), proj,
                                  title="document trajectory (PCA)")
    print(f"sentences: split={n_split} used={len(traj)} dropped={len(dropped)}")
    print(f"regime: {report.regime}")
    return 0


def _cmd_simulate(args) -> int:
    out = _outdir(args)
    velocity = None
    if args.velocity is not None:
        velocity = tuple(float(v) for v in args.velocity.split(","))
    elif args.kind == "ballistic":
        velocity = (1.0,) + (0.0,) * (args.dims - 1)
    spec = synthetic.SyntheticSpec(kind=args.kind, dims=args.dims,
                                   steps=args.steps, seed=args.seed,
                                   step_std=args.step_std, velocity=velocity,
                                   theta=args.theta, sigma=args.sigma,
                                   mu=args.mu, x_min=args.x_min)
    traj = synthetic.generate(spec)
    report, curve = msd.analyze_trajectory(traj, **_analysis_kwargs(args))
    _write(out / "trajectory.csv", synthetic.trajectory_to_csv(traj))
    _write(out / "msd.csv", msd.msd_to_csv(curve))
    _write(out / "report.json", msd.report_to_json(report))
    expected = None
    if spec.kind != "levy":
        expected = synthetic.expected_msd(spec, curve.delays)
        lines = ["delay,msd"] + [f"{int(d)},{v!r}"
                                 for d, v in zip(curve.delays, expected)]
        _write(out / "msd_expected.csv", "\n".join(lines) + "\n")
    if not args.no_figures:
        figures.render_msd(str(out / "msd.png"), curve, report=report,
                           expected=expected, title=f"{spec.kind} MSD")
    tail = ("" if report.tail_exponent is None
            else f" tail_exponent={report.tail_exponent:.3f}")
    print(f"regime: {report.regime}{tail}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
