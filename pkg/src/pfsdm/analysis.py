"""Experiment drivers: moment-curve interpretation and robustness clustering.

Experiment 1 runs the full pipeline on the five canonical shapes and writes
normalized moment curves per order. Experiment 2 builds a seeded corpus of
50 augmented shapes (10 per class), computes the order-3 distance matrix,
embeds its rows with PCA and scores how well the classes cluster.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import DegenerateEmbedding, OutOfDomain, SingletonClass
from .eikonal import solve_eikonal
from .moments import MomentCurves, angular_moments, distance_matrix, normalizing_constants
from .pushforward import PfSdfField, fit_deformation
from .shapes import (
    SHAPE_KINDS,
    SHAPE_LABELS,
    AugmentParams,
    Contour,
    augment,
    generate_shape,
    normalize_contour,
    resample_contour,
)
from . import serialize, svgplot

CORPUS_PER_CLASS = 10
CORPUS_SCALE_RANGE = (0.6, 1.4)
# Stay this far from the domain wall when drawing translations.
CORPUS_MARGIN = 0.02


# ---------------------------------------------------------------------------
# Shared pipeline
# ---------------------------------------------------------------------------


def compute_field(contour: Contour, cfg: RunConfig | None = None) -> PfSdfField:
    """normalize -> resample -> Eikonal solve -> deformation fit."""
    cfg = cfg or RunConfig()
    c = resample_contour(normalize_contour(contour), cfg.resample_points)
    model = solve_eikonal(c, cfg.solver_config())
    deformation = fit_deformation(c, cfg.def_degree)
    return PfSdfField(model, deformation)


def compute_moments(contour: Contour, cfg: RunConfig | None = None, shape_id: str | None = None) -> MomentCurves:
    cfg = cfg or RunConfig()
    field = compute_field(contour, cfg)
    return angular_moments(
        field,
        k_max=cfg.k_order,
        r_grid=cfg.r_grid(),
        theta_samples=cfg.theta_samples,
        shape_id=shape_id if shape_id is not None else contour.contour_id,
    )


def _moments_task(args) -> tuple[str, np.ndarray, np.ndarray]:
    points, shape_id, cfg_dict = args
    curves = compute_moments(Contour(points, contour_id=shape_id), RunConfig(**cfg_dict), shape_id)
    return curves.shape_id, curves.r_grid, curves.values


def moments_for_contours(
    contours: list[Contour], cfg: RunConfig, shape_ids: list[str], jobs: int | None = None
) -> list[MomentCurves]:
    """Per-shape pipelines, optionally across a process pool; order preserved."""
    jobs = jobs or cfg.jobs or os.cpu_count() or 1
    tasks = [(c.points, sid, cfg.to_dict()) for c, sid in zip(contours, shape_ids)]
    if jobs <= 1 or len(tasks) <= 1:
        results = [_moments_task(t) for t in tasks]
    else:
        with get_context("fork").Pool(processes=min(jobs, len(tasks))) as pool:
            results = pool.map(_moments_task, tasks)
    return [MomentCurves(sid, r, v) for sid, r, v in results]


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    shape_id: str
    label: str
    kind: str
    params: AugmentParams
    contour: Contour


@dataclass(frozen=True)
class Corpus:
    entries: tuple[CorpusEntry, ...]
    master_seed: int

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.entries]

    @property
    def shape_ids(self) -> list[str]:
        return [e.shape_id for e in self.entries]


def build_corpus(seed: int, per_class: int = CORPUS_PER_CLASS, points: int = 256) -> Corpus:
    """Deterministic augmented corpus: per_class entries for each family.

    Rotation ~ U[0, 2pi), scale ~ U[0.6, 1.4], reflection a fair coin, and
    the translation uniform inside the axis-aligned margin the transformed
    contour leaves free. Draws that would escape the domain are rejected and
    redrawn from the same generator stream.
    """
    rng = np.random.default_rng(seed)
    entries = []
    index = 0
    for kind in SHAPE_KINDS:
        base = generate_shape(kind, points, seed=0)
        for i in range(per_class):
            for _ in range(10):
                rotation = float(rng.uniform(0.0, 2.0 * math.pi))
                scale = float(rng.uniform(*CORPUS_SCALE_RANGE))
                reflect = bool(rng.random() < 0.5)
                rotated = _rigid_part(base.points, rotation, scale, reflect)
                mx = 1.0 - CORPUS_MARGIN - float(np.max(np.abs(rotated[:, 0])))
                my = 1.0 - CORPUS_MARGIN - float(np.max(np.abs(rotated[:, 1])))
                if mx < 0.0 or my < 0.0:
                    continue
                translation = (float(rng.uniform(-mx, mx)), float(rng.uniform(-my, my)))
                params = AugmentParams(rotation, translation, scale, reflect, seed=index)
                try:
                    contour = augment(base, params)
                except OutOfDomain:
                    continue
                break
            else:
                raise OutOfDomain(f"could not place {kind} inside the domain")
            shape_id = f"{kind}_{i:02d}"
            entries.append(
                CorpusEntry(shape_id, SHAPE_LABELS[kind], kind, params,
                            Contour(contour.points, contour_id=shape_id))
            )
            index += 1
    return Corpus(tuple(entries), seed)


def _rigid_part(pts: np.ndarray, rotation: float, scale: float, reflect: bool) -> np.ndarray:
    out = pts.copy()
    if reflect:
        out[:, 1] = -out[:, 1]
    c, s = math.cos(rotation), math.sin(rotation)
    return (out @ np.array([[c, -s], [s, c]]).T) * scale


# ---------------------------------------------------------------------------
# PCA and clustering scores
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Embedding:
    coords: np.ndarray
    explained: np.ndarray
    shape_ids: tuple[str, ...] = ()

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        self.explained = np.asarray(self.explained, dtype=float)
        if np.any(self.explained < -1e-12) or np.any(self.explained > 1.0 + 1e-12):
            raise ValueError("explained-variance fractions must lie in [0, 1]")
        if np.any(np.diff(self.explained) > 1e-12):
            raise ValueError("explained-variance fractions must be non-increasing")


def pca_rows(matrix, components: int = 2) -> Embedding:
    """PCA of distance-matrix rows via a symmetric eigensolve.

    Rows are centered by column means; the sign of each component is fixed
    so its largest-magnitude loading is positive, which makes the embedding
    deterministic and permutation-equivariant.
    """
    if hasattr(matrix, "values"):
        rows = np.asarray(matrix.values, dtype=float)
        ids = tuple(matrix.shape_ids)
    else:
        rows = np.asarray(matrix, dtype=float)
        ids = ()
    n = rows.shape[0]
    if n < 3:
        raise ValueError("need at least 3 rows for a 2-component embedding")
    centered = rows - rows.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    total = float(np.trace(cov))
    if total <= 1e-30:
        raise DegenerateEmbedding("rows carry no variance")
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:components]
    vecs = eigvecs[:, order]
    vals = np.clip(eigvals[order], 0.0, None)
    for j in range(vecs.shape[1]):
        lead = np.argmax(np.abs(vecs[:, j]))
        if vecs[lead, j] < 0.0:
            vecs[:, j] = -vecs[:, j]
    return Embedding(centered @ vecs, vals / total, ids)


@dataclass(frozen=True)
class ClusterScores:
    nearest_medoid_accuracy: float
    mean_silhouette: float


def _as_vectors(data) -> np.ndarray:
    if isinstance(data, Embedding):
        return data.coords
    return np.atleast_2d(np.asarray(data, dtype=float))


def _medoid(dist: np.ndarray, members: list[int]) -> int:
    costs = dist[np.ix_(members, members)].sum(axis=1)
    return members[int(np.argmin(costs))]


def clustering_score(data, labels) -> ClusterScores:
    """Leave-one-out nearest-medoid accuracy and mean silhouette.

    Both scores use Euclidean distances between the given vectors (embedding
    coordinates or raw distance-matrix rows).
    """
    vectors = _as_vectors(data)
    labels = list(labels)
    if len(labels) != vectors.shape[0]:
        raise ValueError("labels must match the number of vectors")
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise SingletonClass("need at least two classes to score clustering")
    members = {c: [i for i, l in enumerate(labels) if l == c] for c in classes}
    for c, idx in members.items():
        if len(idx) < 2:
            raise SingletonClass(f"class {c!r} has a single member")

    diff = vectors[:, None, :] - vectors[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))

    hits = 0
    for i, label in enumerate(labels):
        best_class, best_d = None, np.inf
        for c in classes:
            loo = [j for j in members[c] if j != i]
            med = _medoid(dist, loo)
            if dist[i, med] < best_d:
                best_class, best_d = c, dist[i, med]
        hits += best_class == label
    accuracy = hits / len(labels)

    sil = []
    for i, label in enumerate(labels):
        own = [j for j in members[label] if j != i]
        a = float(np.mean(dist[i, own]))
        b = min(float(np.mean(dist[i, members[c]])) for c in classes if c != label)
        denom = max(a, b)
        sil.append(0.0 if denom == 0.0 else (b - a) / denom)
    return ClusterScores(accuracy, float(np.mean(sil)))


def class_medoids(dist_values: np.ndarray, labels) -> dict[str, int]:
    """Per-class medoid indices under the given (morphometric) distance matrix."""
    labels = list(labels)
    out = {}
    for c in sorted(set(labels)):
        out[c] = _medoid(np.asarray(dist_values, dtype=float), [i for i, l in enumerate(labels) if l == c])
    return out


def medoid_summary(dist_values: np.ndarray, labels) -> dict:
    """Medoid ids plus inter-medoid distances, most-distant class, closest pair."""
    medoids = class_medoids(dist_values, labels)
    classes = sorted(medoids)
    table = {
        a: {b: float(dist_values[medoids[a], medoids[b]]) for b in classes if b != a} for a in classes
    }
    mean_dist = {a: float(np.mean(list(table[a].values()))) for a in classes}
    most_distant = max(classes, key=lambda c: mean_dist[c])
    pairs = [(table[a][b], a, b) for a in classes for b in classes if a < b]
    _, pa, pb = min(pairs)
    return {
        "medoid_index": medoids,
        "inter_medoid_distances": table,
        "mean_distance_to_other_medoids": mean_dist,
        "most_distant_class": most_distant,
        "closest_pair": [pa, pb],
    }


# ---------------------------------------------------------------------------
# Experiment drivers
# ---------------------------------------------------------------------------


def run_experiment1(out_dir, cfg: RunConfig | None = None, jobs: int | None = None) -> dict:
    """Moment curves for the five canonical shapes, normalized per order.

    Writes moments/<kind>.csv (raw curves), normalized/<kind>_k<k>.csv with
    |M^k|/m_k, one chart per order, and a manifest with the normalizing
    constants.
    """
    cfg = cfg or RunConfig()
    out = Path(out_dir)
    contours = [generate_shape(kind, cfg.resample_points, cfg.seed) for kind in SHAPE_KINDS]
    curves = moments_for_contours(contours, cfg, list(SHAPE_KINDS), jobs=jobs)
    consts = normalizing_constants(curves)

    for mc in curves:
        serialize.write_moments_csv(out / "moments" / f"{mc.shape_id}.csv", mc)
    r = curves[0].r_grid
    for k in range(1, cfg.k_order + 1):
        series = []
        for mc in curves:
            norm = np.abs(mc.row(k)) / consts.m[k - 1]
            lines = [f"{serialize.fmt(rv)},{serialize.fmt(v)}" for rv, v in zip(r, norm)]
            serialize.write_text_atomic(
                out / "normalized" / f"{mc.shape_id}_k{k}.csv", "r,value\n" + "\n".join(lines) + "\n"
            )
            series.append((mc.shape_id, norm))
        svgplot.line_chart(
            out / "plots" / f"moments_k{k}.svg",
            r,
            series,
            title=f"normalized |M{k}| across radius",
            x_label="r",
            y_label=f"|M{k}| / m{k}",
        )
    manifest = {
        "command": "exp1",
        "config": cfg.to_dict(),
        "shapes": list(SHAPE_KINDS),
        "labels": SHAPE_LABELS,
        "normalizing_constants": [float(v) for v in consts.m],
        "outputs": {
            "moments": [f"moments/{k}.csv" for k in SHAPE_KINDS],
            "normalized": [
                f"normalized/{kind}_k{k}.csv" for kind in SHAPE_KINDS for k in range(1, cfg.k_order + 1)
            ],
            "plots": [f"plots/moments_k{k}.svg" for k in range(1, cfg.k_order + 1)],
        },
    }
    serialize.write_json(out / "manifest.json", manifest)
    return {"curves": curves, "constants": consts, "manifest": manifest}


def run_experiment2(seed: int, out_dir, cfg: RunConfig | None = None, jobs: int | None = None) -> dict:
    """Corpus of 50 augmented shapes -> distance matrix -> PCA -> scores."""
    cfg = cfg or RunConfig()
    out = Path(out_dir)
    corpus = build_corpus(seed, points=cfg.resample_points)
    curves = moments_for_contours(
        [e.contour for e in corpus.entries], cfg, corpus.shape_ids, jobs=jobs
    )
    consts = normalizing_constants(curves)
    dmat = distance_matrix(curves, consts, cfg.k_order)
    embedding = pca_rows(dmat, 2)
    scores = clustering_score(dmat.values, corpus.labels)
    medoids = medoid_summary(dmat.values, corpus.labels)

    for mc in curves:
        serialize.write_moments_csv(out / "moments" / f"{mc.shape_id}.csv", mc)
    serialize.write_distmat_csv(out / "distmat.csv", dmat)
    emb_lines = ["id,pc1,pc2"] + [
        f"{sid},{serialize.fmt(x)},{serialize.fmt(y)}"
        for sid, (x, y) in zip(corpus.shape_ids, embedding.coords)
    ]
    serialize.write_text_atomic(out / "embedding.csv", "\n".join(emb_lines) + "\n")

    scores_doc = {
        "nearest_medoid_accuracy": scores.nearest_medoid_accuracy,
        "mean_silhouette": scores.mean_silhouette,
        "explained_variance": [float(v) for v in embedding.explained],
        "medoids": {c: corpus.shape_ids[i] for c, i in medoids["medoid_index"].items()},
        "mean_distance_to_other_medoids": medoids["mean_distance_to_other_medoids"],
        "most_distant_class": medoids["most_distant_class"],
        "closest_medoid_pair": medoids["closest_pair"],
    }
    serialize.write_json(out / "scores.json", scores_doc)
    svgplot.scatter_chart(
        out / "plots" / "pca.svg",
        embedding.coords,
        corpus.labels,
        title="distance-row PCA of the augmented corpus",
        x_label="PC1",
        y_label="PC2",
    )
    manifest = {
        "command": "exp2",
        "seed": seed,
        "config": cfg.to_dict(),
        "entries": [
            {
                "shape_id": e.shape_id,
                "label": e.label,
                "kind": e.kind,
                "rotation": e.params.rotation,
                "translation": list(e.params.translation),
                "scale": e.params.scale,
                "reflect": e.params.reflect,
            }
            for e in corpus.entries
        ],
        "outputs": {
            "distmat": "distmat.csv",
            "embedding": "embedding.csv",
            "scores": "scores.json",
            "moments": [f"moments/{sid}.csv" for sid in corpus.shape_ids],
            "plots": ["plots/pca.svg"],
        },
    }
    serialize.write_json(out / "manifest.json", manifest)
    return {
        "corpus": corpus,
        "curves": curves,
        "constants": consts,
        "distance_matrix": dmat,
        "embedding": embedding,
        "scores": scores,
        "medoids": medoids,
    }
