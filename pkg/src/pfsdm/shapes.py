"""Closed shape contours: generation, normalization, augmentation, rasters.

Contours are ordered closed polylines (last point connects back to the
first; the closing vertex is not repeated). The working domain is
Omega = (-1,1)^2 and normalized contours are centered at their polygon
centroid and scaled to a maximum point radius of 0.7, which leaves margin
between the shape and the domain boundary for area quadrature.

Also provides the brute-force signed-distance oracle (negative inside,
even-odd rule) used for solver initialization and as ground truth in tests,
plus PGM raster I/O and marching-squares contour extraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BorderContact,
    DegenerateShape,
    InputFormatError,
    InvalidKind,
    MultipleComponents,
    OutOfDomain,
)

# Contours used by the solver pipeline must be sampled at least this densely.
PIPELINE_MIN_POINTS = 16

# Radius every normalized contour is scaled to.
NORMALIZED_RADIUS = 0.7

SHAPE_KINDS = ("star", "ellipse", "circle", "rounded_square", "folded")

# Canonical class labels for the five synthetic families.
SHAPE_LABELS = {
    "star": "S1",
    "ellipse": "S2",
    "circle": "S3",
    "rounded_square": "S4",
    "folded": "S5",
}


@dataclass(eq=False)
class Contour:
    """Ordered closed polyline. ``contour_id`` is a provenance tag only."""

    points: np.ndarray
    contour_id: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise ValueError("contour needs an (m, 2) array with m >= 3")
        if not np.all(np.isfinite(pts)):
            raise ValueError("contour coordinates must be finite")
        gaps = np.roll(pts, -1, axis=0) - pts
        if np.any(np.hypot(gaps[:, 0], gaps[:, 1]) == 0.0):
            raise ValueError("consecutive contour points must be distinct")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    def signed_area(self) -> float:
        x, y = self.points[:, 0], self.points[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        return float(0.5 * np.sum(x * yn - xn * y))

    def centroid(self) -> np.ndarray:
        """Area centroid of the enclosed polygon (shoelace-weighted)."""
        x, y = self.points[:, 0], self.points[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        area = 0.5 * np.sum(cross)
        if abs(area) < 1e-14:
            raise DegenerateShape("zero-area contour has no centroid")
        cx = np.sum((x + xn) * cross) / (6.0 * area)
        cy = np.sum((y + yn) * cross) / (6.0 * area)
        return np.array([cx, cy])

    def perimeter(self) -> float:
        edges = np.roll(self.points, -1, axis=0) - self.points
        return float(np.sum(np.hypot(edges[:, 0], edges[:, 1])))

    def max_radius(self) -> float:
        return float(np.max(np.hypot(self.points[:, 0], self.points[:, 1])))

    def is_ccw(self) -> bool:
        return self.signed_area() > 0.0


@dataclass(eq=False)
class RasterImage:
    """Square grayscale raster with intensities in [0, 1]."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=float)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError("pixel grid must be (height, width)")
        if self.width != self.height or self.width < 32:
            raise ValueError("raster must be square with side >= 32")
        if np.any(self.pixels < 0.0) or np.any(self.pixels > 1.0):
            raise ValueError("intensities must lie in [0, 1]")


@dataclass(frozen=True)
class AugmentParams:
    """Shape-preserving transform: reflect, then rotate, then scale, then translate."""

    rotation: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)
    scale: float = 1.0
    reflect: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.scale > 0.0:
            raise ValueError("scale must be positive")


def normalize_contour(c: Contour) -> Contour:
    """Center on the area centroid, scale max radius to 0.7, force CCW order."""
    area = c.signed_area()
    if abs(area) < 1e-12:
        raise DegenerateShape("contour encloses no area")
    pts = c.points - c.centroid()
    max_r = np.max(np.hypot(pts[:, 0], pts[:, 1]))
    if max_r < 1e-12:
        raise DegenerateShape("contour collapses to a point")
    pts = pts * (NORMALIZED_RADIUS / max_r)
    if area < 0.0:
        pts = pts[::-1].copy()
    return Contour(pts, contour_id=c.contour_id)


def resample_contour(c: Contour, m: int) -> Contour:
    """Resample to m points equally spaced in arc length.

    The first output point is the input vertex with lexicographically
    smallest (y, x), which makes resampling independent of where the input
    tracing happened to start.
    """
    if m < 3:
        raise ValueError("resampling needs at least 3 points")
    start = int(np.lexsort((c.points[:, 0], c.points[:, 1]))[0])
    pts = np.roll(c.points, -start, axis=0)
    closed = np.vstack([pts, pts[:1]])
    seg = np.diff(closed, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    arc = np.concatenate(([0.0], np.cumsum(seg_len)))
    total = arc[-1]
    targets = np.arange(m) * (total / m)
    idx = np.clip(np.searchsorted(arc, targets, side="right") - 1, 0, len(seg_len) - 1)
    t = ((targets - arc[idx]) / seg_len[idx])[:, None]
    out = closed[idx] + t * seg[idx]
    out[0] = pts[0]
    return Contour(out, contour_id=c.contour_id)


def _radial_points(thetas: np.ndarray, radii: np.ndarray) -> np.ndarray:
    return np.stack([radii * np.cos(thetas), radii * np.sin(thetas)], axis=1)


def generate_shape(kind: str, m: int = 256, seed: int = 0) -> Contour:
    """One of the five synthetic families, normalized, sampled at m points.

    Families: circle r=1; star r=1+0.35cos(5t); ellipse (2cos t, 0.45 sin t);
    rounded_square |x|^p+|y|^p=1 with p=2.3 (gentle squircle: harder
    exponents drift away from the circle in moment space and break the
    expected similarity ordering); folded r=1+0.25cos(3t)+0.15sin(2t+0.8).
    All are deterministic; ``seed`` is recorded in the contour id so corpora
    stay traceable but does not perturb the geometry.
    """
    if kind not in SHAPE_KINDS:
        raise InvalidKind(f"unknown shape kind {kind!r}; expected one of {SHAPE_KINDS}")
    if m < 64:
        raise ValueError("generated shapes need at least 64 points")
    thetas = np.arange(m) * (2.0 * math.pi / m)
    if kind == "circle":
        pts = _radial_points(thetas, np.ones(m))
    elif kind == "star":
        pts = _radial_points(thetas, 1.0 + 0.35 * np.cos(5.0 * thetas))
    elif kind == "folded":
        pts = _radial_points(
            thetas, 1.0 + 0.25 * np.cos(3.0 * thetas) + 0.15 * np.sin(2.0 * thetas + 0.8)
        )
    elif kind == "ellipse":
        pts = np.stack([2.0 * np.cos(thetas), 0.45 * np.sin(thetas)], axis=1)
    else:  # rounded_square: superellipse |x|^p + |y|^p = 1
        exponent = 2.0 / 2.3
        ct, st = np.cos(thetas), np.sin(thetas)
        pts = np.stack(
            [np.sign(ct) * np.abs(ct) ** exponent, np.sign(st) * np.abs(st) ** exponent],
            axis=1,
        )
    return normalize_contour(Contour(pts, contour_id=f"{kind}-m{m}-s{seed}"))


def augment(c: Contour, p: AugmentParams) -> Contour:
    """Apply reflect, rotation, scale, translation (in that order)."""
    pts = c.points.copy()
    if p.reflect:
        pts[:, 1] = -pts[:, 1]
    cos_a, sin_a = math.cos(p.rotation), math.sin(p.rotation)
    rot = np.array([[cos_a, -sin_a], [sin_a, cos_a]])
    pts = pts @ rot.T
    pts = pts * p.scale + np.asarray(p.translation, dtype=float)
    if np.any(np.abs(pts) >= 1.0):
        raise OutOfDomain("augmented contour escapes (-1,1)^2")
    return Contour(pts, contour_id=c.contour_id)


def _point_in_polygon(queries: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Even-odd crossing test, vectorized over query points."""
    a = pts
    b = np.roll(pts, -1, axis=0)
    qx = queries[:, 0][:, None]
    qy = queries[:, 1][:, None]
    cond = (a[None, :, 1] > qy) != (b[None, :, 1] > qy)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = a[None, :, 0] + (qy - a[None, :, 1]) * (b[None, :, 0] - a[None, :, 0]) / (
            b[None, :, 1] - a[None, :, 1]
        )
    crossings = np.sum(cond & (qx < x_cross), axis=1)
    return crossings % 2 == 1


def signed_distance_oracle_many(queries: np.ndarray, c: Contour) -> np.ndarray:
    """Brute-force signed distances from many points to the contour polygon.

    Magnitude is the exact minimum distance to any polygon edge; the sign is
    negative inside (even-odd rule). Quadratic in problem size but exact,
    which is what makes it a usable ground truth.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    a = c.points
    e = np.roll(a, -1, axis=0) - a
    ee = np.sum(e * e, axis=1)
    out = np.empty(queries.shape[0])
    # Chunk the (queries x segments) broadcast to bound memory.
    step = max(1, 8_000_000 // max(1, a.shape[0]))
    for lo in range(0, queries.shape[0], step):
        q = queries[lo : lo + step]
        diff = q[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("psd,sd->ps", diff, e) / ee, 0.0, 1.0)
        proj = diff - t[:, :, None] * e[None, :, :]
        d = np.sqrt(np.min(np.sum(proj * proj, axis=2), axis=1))
        inside = _point_in_polygon(q, a)
        out[lo : lo + step] = np.where(inside, -d, d)
    return out


def signed_distance_oracle(q, c: Contour) -> float:
    return float(signed_distance_oracle_many(np.asarray(q, dtype=float)[None, :], c)[0])


# ---------------------------------------------------------------------------
# Raster ingestion
# ---------------------------------------------------------------------------


def extract_contour(img: RasterImage, threshold: float) -> Contour:
    """Outer boundary of the single thresholded foreground region.

    Runs marching squares at the threshold level, so boundary points sit at
    subpixel crossings in (x=column, y=row) pixel coordinates, ordered
    counterclockwise.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    from scipy import ndimage
    from skimage import measure

    mask = img.pixels > threshold
    if not mask.any():
        raise MultipleComponents("no foreground component above threshold")
    _, n_comp = ndimage.label(mask)
    if n_comp != 1:
        raise MultipleComponents(f"expected one foreground component, found {n_comp}")
    if mask[0, :].any() or mask[-1, :].any() or mask[:, 0].any() or mask[:, -1].any():
        raise BorderContact("foreground touches the image border")

    contours = measure.find_contours(img.pixels, threshold)
    closed = [c for c in contours if np.allclose(c[0], c[-1])]
    if not closed:
        raise MultipleComponents("no closed level contour found")

    def enclosed_area(rc: np.ndarray) -> float:
        x, y = rc[:, 1], rc[:, 0]
        return abs(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    best = max(closed, key=enclosed_area)
    pts = best[:-1, ::-1].copy()  # (row, col) -> (x, y); drop closing vertex
    out = Contour(pts, contour_id="raster")
    if not out.is_ccw():
        out = Contour(pts[::-1].copy(), contour_id="raster")
    return out


def rasterize_contour(c: Contour, size: int = 64) -> RasterImage:
    """Binary raster of the polygon interior on a size x size grid over Omega.

    Row i maps to y = -1 + 2*(i+0.5)/size (row 0 is the y=-1 edge), so a
    rasterize/extract round trip preserves orientation.
    """
    if size < 32:
        raise ValueError("raster side must be >= 32")
    if np.any(np.abs(c.points) >= 1.0):
        raise OutOfDomain("contour must lie inside (-1,1)^2 to rasterize")
    coords = -1.0 + 2.0 * (np.arange(size) + 0.5) / size
    xx, yy = np.meshgrid(coords, coords, indexing="xy")
    centers = np.stack([xx.ravel(), yy.ravel()], axis=1)
    inside = _point_in_polygon(centers, c.points)
    return RasterImage(size, size, inside.reshape(size, size).astype(float))


def read_pgm(path) -> RasterImage:
    """Read a plain (P2) or binary (P5) PGM file."""
    with open(path, "rb") as fh:
        data = fh.read()

    def tokens():
        i = 0
        while i < len(data):
            ch = data[i : i + 1]
            if ch == b"#":
                while i < len(data) and data[i : i + 1] != b"\n":
                    i += 1
            elif ch.isspace():
                i += 1
            else:
                j = i
                while j < len(data) and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                    j += 1
                yield i, data[i:j]
                i = j

    stream = tokens()
    try:
        _, magic = next(stream)
        header = []
        while len(header) < 3:
            pos, tok = next(stream)
            header.append((pos, tok))
        (_, w_tok), (_, h_tok), (maxval_pos, maxval_tok) = header
        width, height, maxval = int(w_tok), int(h_tok), int(maxval_tok)
    except (StopIteration, ValueError) as exc:
        raise InputFormatError(f"malformed PGM header in {path}") from exc
    if maxval <= 0 or maxval > 65535:
        raise InputFormatError(f"unsupported PGM maxval {maxval}")

    if magic == b"P2":
        try:
            values = [int(tok) for _, tok in stream]
        except ValueError as exc:
            raise InputFormatError(f"non-integer sample in {path}") from exc
        raw = np.array(values, dtype=float)
    elif magic == b"P5":
        offset = maxval_pos + len(maxval_tok) + 1  # single whitespace after maxval
        body = data[offset:]
        dtype = np.dtype(">u2") if maxval > 255 else np.uint8
        raw = np.frombuffer(body, dtype=dtype, count=width * height).astype(float)
    else:
        raise InputFormatError(f"not a PGM file (magic {magic!r})")
    if raw.size != width * height:
        raise InputFormatError(f"PGM body has {raw.size} samples, expected {width * height}")
    pixels = (raw / maxval).reshape(height, width)
    return RasterImage(width, height, pixels)


def write_pgm(img: RasterImage, path, binary: bool = False) -> None:
    """Write a PGM file (P2 by default, P5 when binary=True), maxval 255."""
    samples = np.rint(img.pixels * 255.0).astype(np.uint8)
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n255\n"
    if binary:
        payload = header.encode("ascii") + samples.tobytes()
    else:
        lines = "\n".join(" ".join(str(v) for v in row) for row in samples)
        payload = (header + lines + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(payload)
