"""Artifact formats: canonical JSON, contour/moments/distance CSV, atomic writes.

Every float is printed with 17 significant digits so parsing the file back
reproduces the exact binary value, and repeated runs produce byte-identical
artifacts (nothing here embeds timestamps or machine state).
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .eikonal import SdfModel
from .errors import InputFormatError
from .moments import DistanceMatrix, MomentCurves
from .polybasis import PolySurrogate
from .pushforward import PfSdfField, PushForwardMap
from .shapes import Contour


def fmt(x: float) -> str:
    """17-significant-digit decimal form; round-trips every finite double."""
    return format(float(x), ".17g")


def write_text_atomic(path, text: str) -> None:
    """Write via temp file + rename so readers never see partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_canonical(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits, dicts in insertion order."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {dumps_canonical(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        return "[" + ", ".join(dumps_canonical(v, indent) for v in seq) + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_json(path, obj) -> None:
    write_text_atomic(path, dumps_canonical(obj) + "\n")


def read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read JSON {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Contour CSV: one "x,y" line per point, no header.
# ---------------------------------------------------------------------------


def contour_to_csv(c: Contour) -> str:
    return "\n".join(f"{fmt(x)},{fmt(y)}" for x, y in c.points) + "\n"


def write_contour_csv(path, c: Contour) -> None:
    write_text_atomic(path, contour_to_csv(c))


def read_contour_csv(path, contour_id: str = "") -> Contour:
    rows = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise InputFormatError(f"{path}:{line_no}: expected 'x,y', got {line!r}")
                rows.append((float(parts[0]), float(parts[1])))
    except OSError as exc:
        raise InputFormatError(f"cannot read contour {path}: {exc}") from exc
    except ValueError as exc:
        raise InputFormatError(f"non-numeric coordinate in {path}: {exc}") from exc
    if len(rows) < 3:
        raise InputFormatError(f"{path}: contour needs at least 3 points")
    try:
        return Contour(np.array(rows), contour_id=contour_id or Path(path).stem)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Polynomial / model / field bundles as JSON.
# ---------------------------------------------------------------------------


def poly_to_dict(p: PolySurrogate) -> dict:
    return {
        "basis": "legendre-tensor",
        "degree": p.degree,
        "coeffs": [float(v) for v in p.coeffs.ravel()],
    }


def poly_from_dict(d: dict) -> PolySurrogate:
    try:
        if d["basis"] != "legendre-tensor":
            raise InputFormatError(f"unsupported basis {d['basis']!r}")
        degree = int(d["degree"])
        coeffs = np.array(d["coeffs"], dtype=float).reshape(degree + 1, degree + 1)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed polynomial record: {exc}") from exc
    return PolySurrogate(degree, coeffs)


def sdf_model_to_dict(m: SdfModel) -> dict:
    return {
        "poly": poly_to_dict(m.poly),
        "viscosity": m.viscosity,
        "pde_rms": m.pde_rms,
        "boundary_rms": m.boundary_rms,
        "contour_id": m.contour_id,
        "converged": m.converged,
        "iterations": m.iterations,
    }


def sdf_model_from_dict(d: dict) -> SdfModel:
    try:
        return SdfModel(
            poly=poly_from_dict(d["poly"]),
            viscosity=float(d["viscosity"]),
            pde_rms=float(d["pde_rms"]),
            boundary_rms=float(d["boundary_rms"]),
            contour_id=str(d.get("contour_id", "")),
            converged=bool(d.get("converged", True)),
            iterations=int(d.get("iterations", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed SDF model record: {exc}") from exc


def map_to_dict(m: PushForwardMap) -> dict:
    return {
        "disp_x": poly_to_dict(m.disp_x),
        "disp_y": poly_to_dict(m.disp_y),
        "zero_residual": m.zero_residual,
        "contour_id": m.contour_id,
    }


def map_from_dict(d: dict) -> PushForwardMap:
    try:
        return PushForwardMap(
            disp_x=poly_from_dict(d["disp_x"]),
            disp_y=poly_from_dict(d["disp_y"]),
            zero_residual=float(d["zero_residual"]),
            contour_id=str(d.get("contour_id", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"malformed push-forward map record: {exc}") from exc


def field_to_dict(f: PfSdfField) -> dict:
    return {"sdf": sdf_model_to_dict(f.sdf), "map": map_to_dict(f.deformation)}


def field_from_dict(d: dict) -> PfSdfField:
    try:
        return PfSdfField(sdf_model_from_dict(d["sdf"]), map_from_dict(d["map"]))
    except KeyError as exc:
        raise InputFormatError(f"field bundle missing section: {exc}") from exc


# ---------------------------------------------------------------------------
# Moment curves CSV: header "r,M1,...,MK", one row per radius.
# ---------------------------------------------------------------------------


def moments_to_csv(mc: MomentCurves) -> str:
    header = "r," + ",".join(f"M{k}" for k in range(1, mc.k_max + 1))
    lines = [header]
    for j, r in enumerate(mc.r_grid):
        lines.append(fmt(r) + "," + ",".join(fmt(v) for v in mc.values[:, j]))
    return "\n".join(lines) + "\n"


def write_moments_csv(path, mc: MomentCurves) -> None:
    write_text_atomic(path, moments_to_csv(mc))


def read_moments_csv(path, shape_id: str = "") -> MomentCurves:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InputFormatError(f"cannot read moments {path}: {exc}") from exc
    if not lines or not lines[0].startswith("r,"):
        raise InputFormatError(f"{path}: missing moments header")
    k_max = len(lines[0].split(",")) - 1
    rs, vals = [], []
    for line_no, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != k_max + 1:
            raise InputFormatError(f"{path}:{line_no}: expected {k_max + 1} columns")
        try:
            rs.append(float(parts[0]))
            vals.append([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise InputFormatError(f"{path}:{line_no}: {exc}") from exc
    try:
        return MomentCurves(shape_id or Path(path).stem, np.array(rs), np.array(vals).T)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Distance matrix CSV with shape-id header row and column.
# ---------------------------------------------------------------------------


def distmat_to_csv(d: DistanceMatrix) -> str:
    lines = ["id," + ",".join(d.shape_ids)]
    for sid, row in zip(d.shape_ids, d.values):
        lines.append(sid + "," + ",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_distmat_csv(path, d: DistanceMatrix) -> None:
    write_text_atomic(path, distmat_to_csv(d))


def read_distmat_csv(path) -> DistanceMatrix:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InputFormatError(f"cannot read distance matrix {path}: {exc}") from exc
    if not lines or not lines[0].startswith("id,"):
        raise InputFormatError(f"{path}: missing distance-matrix header")
    ids = tuple(lines[0].split(",")[1:])
    rows = []
    for line_no, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != len(ids) + 1 or parts[0] != ids[len(rows)]:
            raise InputFormatError(f"{path}:{line_no}: row/column ids disagree")
        try:
            rows.append([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise InputFormatError(f"{path}:{line_no}: {exc}") from exc
    try:
        return DistanceMatrix(ids, np.array(rows))
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc
