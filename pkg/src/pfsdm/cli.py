"""Command-line pipeline driver.

Exit codes: 0 success, 2 usage, 3 malformed input, 4 solver failure,
5 degenerate data. Every command writes outputs atomically and leaves a
manifest (embedded for JSON artifacts, a sidecar otherwise) that records
the full merged configuration, so identical invocations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import analysis, serialize
from .config import RunConfig, load_config_file
from .errors import (
    BorderContact,
    DegenerateCohort,
    DegenerateEmbedding,
    DegenerateShape,
    IllConditioned,
    IncompatibleCurves,
    InputFormatError,
    InvalidKind,
    MultipleComponents,
    OutOfDomain,
    PfsdmError,
    SingletonClass,
    SolverDiverged,
    UndefinedProjection,
)
from .moments import distance_matrix, normalizing_constants
from .shapes import SHAPE_KINDS, extract_contour, generate_shape, rasterize_contour, read_pgm, write_pgm

log = logging.getLogger("pfsdm")

EXIT_INPUT = 3
EXIT_SOLVER = 4
EXIT_DEGENERATE = 5

_SOLVER_ERRORS = (IllConditioned, SolverDiverged)
_DEGENERATE_ERRORS = (
    BorderContact,
    DegenerateCohort,
    DegenerateEmbedding,
    DegenerateShape,
    IncompatibleCurves,
    InvalidKind,
    MultipleComponents,
    OutOfDomain,
    SingletonClass,
    UndefinedProjection,
)

_CONFIG_FLAGS = (
    ("--degree", int, "degree"),
    ("--def-degree", int, "def_degree"),
    ("--viscosity", float, "viscosity"),
    ("--grid", int, "grid"),
    ("--boundary-weight", float, "boundary_weight"),
    ("--theta-samples", int, "theta_samples"),
    ("--r-samples", int, "r_samples"),
    ("--k-order", int, "k_order"),
    ("--seed", int, "seed"),
    ("--jobs", int, "jobs"),
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    for flag, typ, dest in _CONFIG_FLAGS:
        parser.add_argument(flag, type=typ, dest=dest, default=None)
    parser.add_argument("--config", default=None, help="JSON file with RunConfig overrides")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = cfg.merged(load_config_file(args.config))
    flags = {dest: getattr(args, dest, None) for _, _, dest in _CONFIG_FLAGS}
    return cfg.merged(flags)


def _sidecar(path, command: str, cfg: RunConfig, inputs: dict) -> None:
    doc = {"command": command, "config": cfg.to_dict(), "inputs": inputs}
    serialize.write_json(str(path) + ".manifest.json", doc)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfsdm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic contour CSV")
    p.add_argument("kind", choices=SHAPE_KINDS)
    p.add_argument("points", type=int)
    p.add_argument("gen_seed", type=int)
    p.add_argument("out")
    _add_config_flags(p)

    p = sub.add_parser("extract", help="threshold a PGM image and trace the contour")
    p.add_argument("image")
    p.add_argument("out")
    p.add_argument("--threshold", type=float, default=0.5)
    _add_config_flags(p)

    p = sub.add_parser("rasterize", help="render a contour CSV to a binary PGM")
    p.add_argument("contour")
    p.add_argument("out")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--binary", action="store_true", help="write P5 instead of P2")
    _add_config_flags(p)

    p = sub.add_parser("sdf", help="solve the distance surrogate, write model JSON")
    p.add_argument("contour")
    p.add_argument("out")
    _add_config_flags(p)

    p = sub.add_parser("pfsdf", help="solve + fit deformation, write field bundle JSON")
    p.add_argument("contour")
    p.add_argument("out")
    _add_config_flags(p)

    p = sub.add_parser("moments", help="angular moment curves of a field bundle")
    p.add_argument("bundle")
    p.add_argument("out")
    _add_config_flags(p)

    p = sub.add_parser("distmat", help="distance matrix over a curve cohort")
    p.add_argument("curves_dir")
    p.add_argument("manifest")
    p.add_argument("out")
    _add_config_flags(p)

    p = sub.add_parser("exp1", help="moment curves for the five canonical shapes")
    p.add_argument("out_dir")
    _add_config_flags(p)

    p = sub.add_parser("exp2", help="augmented-corpus clustering experiment")
    p.add_argument("exp_seed", type=int)
    p.add_argument("out_dir")
    _add_config_flags(p)

    return parser


def cmd_gen(args, cfg: RunConfig) -> None:
    contour = generate_shape(args.kind, args.points, args.gen_seed)
    serialize.write_contour_csv(args.out, contour)
    _sidecar(args.out, "gen", cfg, {"kind": args.kind, "points": args.points, "seed": args.gen_seed})


def cmd_extract(args, cfg: RunConfig) -> None:
    contour = extract_contour(read_pgm(args.image), args.threshold)
    serialize.write_contour_csv(args.out, contour)
    _sidecar(args.out, "extract", cfg, {"image": args.image, "threshold": args.threshold})


def cmd_rasterize(args, cfg: RunConfig) -> None:
    contour = serialize.read_contour_csv(args.contour)
    write_pgm(rasterize_contour(contour, args.size), args.out, binary=args.binary)
    _sidecar(args.out, "rasterize", cfg, {"contour": args.contour, "size": args.size})


def cmd_sdf(args, cfg: RunConfig) -> None:
    field_input = serialize.read_contour_csv(args.contour)
    model = analysis.compute_field(field_input, cfg).sdf
    doc = serialize.sdf_model_to_dict(model)
    doc["config"] = cfg.to_dict()
    serialize.write_json(args.out, doc)


def cmd_pfsdf(args, cfg: RunConfig) -> None:
    contour = serialize.read_contour_csv(args.contour)
    field = analysis.compute_field(contour, cfg)
    doc = serialize.field_to_dict(field)
    doc["config"] = cfg.to_dict()
    serialize.write_json(args.out, doc)


def cmd_moments(args, cfg: RunConfig) -> None:
    from .moments import angular_moments

    field = serialize.field_from_dict(serialize.read_json(args.bundle))
    curves = angular_moments(
        field, k_max=cfg.k_order, r_grid=cfg.r_grid(), theta_samples=cfg.theta_samples
    )
    serialize.write_moments_csv(args.out, curves)
    _sidecar(args.out, "moments", cfg, {"bundle": args.bundle})


def cmd_distmat(args, cfg: RunConfig) -> None:
    manifest = serialize.read_json(args.manifest)
    shapes = manifest.get("shapes")
    if not isinstance(shapes, list) or not shapes:
        raise InputFormatError("cohort manifest needs a nonempty 'shapes' list")
    curves = []
    for item in shapes:
        try:
            sid, rel = item["id"], item["curves"]
        except (TypeError, KeyError) as exc:
            raise InputFormatError("each cohort entry needs 'id' and 'curves'") from exc
        curves.append(serialize.read_moments_csv(Path(args.curves_dir) / rel, shape_id=sid))
    consts = normalizing_constants(curves)
    dmat = distance_matrix(curves, consts, cfg.k_order)
    serialize.write_distmat_csv(args.out, dmat)
    _sidecar(
        args.out,
        "distmat",
        cfg,
        {
            "manifest": args.manifest,
            "curves_dir": args.curves_dir,
            "normalizing_constants": [float(v) for v in consts.m],
        },
    )


def cmd_exp1(args, cfg: RunConfig) -> None:
    analysis.run_experiment1(args.out_dir, cfg, jobs=cfg.jobs)


def cmd_exp2(args, cfg: RunConfig) -> None:
    analysis.run_experiment2(args.exp_seed, args.out_dir, cfg, jobs=cfg.jobs)


_DISPATCH = {
    "gen": cmd_gen,
    "extract": cmd_extract,
    "rasterize": cmd_rasterize,
    "sdf": cmd_sdf,
    "pfsdf": cmd_pfsdf,
    "moments": cmd_moments,
    "distmat": cmd_distmat,
    "exp1": cmd_exp1,
    "exp2": cmd_exp2,
}


def _configure_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("PFSDM_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        _DISPATCH[args.command](args, cfg)
    except InputFormatError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _SOLVER_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except _DEGENERATE_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except PfsdmError as exc:  # any future subtype: treat as degenerate data
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
