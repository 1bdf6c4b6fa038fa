import numpy as np
import pytest

from pfsdm.analysis import (
    Corpus,
    build_corpus,
    class_medoids,
    clustering_score,
    compute_moments,
    medoid_summary,
    pca_rows,
    run_experiment1,
)
from pfsdm.config import RunConfig
from pfsdm.errors import DegenerateEmbedding, SingletonClass
from pfsdm.moments import DistanceMatrix
from pfsdm.shapes import SHAPE_KINDS


def blobs(rng, centers, per=10, spread=0.05):
    pts, labels = [], []
    for i, c in enumerate(centers):
        pts.append(rng.normal(0, spread, (per, len(c))) + c)
        labels += [f"c{i}"] * per
    return np.vstack(pts), labels


class TestCorpus:
    def test_counts(self):
        corpus = build_corpus(42)
        assert len(corpus.entries) == 50
        for kind in SHAPE_KINDS:
            assert sum(e.kind == kind for e in corpus.entries) == 10

    def test_deterministic(self):
        a = build_corpus(7)
        b = build_corpus(7)
        for ea, eb in zip(a.entries, b.entries):
            assert ea.params == eb.params
            assert np.array_equal(ea.contour.points, eb.contour.points)

    def test_seed_changes_params(self):
        a = build_corpus(1)
        b = build_corpus(2)
        assert any(ea.params != eb.params for ea, eb in zip(a.entries, b.entries))

    def test_contours_inside_domain(self):
        corpus = build_corpus(3)
        for e in corpus.entries:
            assert np.all(np.abs(e.contour.points) < 1.0)
            assert e.shape_id.startswith(e.kind)


class TestPca:
    def test_collinear_rows(self):
        t = np.linspace(0, 1, 8)
        rows = np.outer(t, np.arange(6.0))
        emb = pca_rows(rows)
        assert emb.explained[1] <= 1e-8

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(0)
        sym = rng.uniform(0, 1, (7, 7))
        sym = (sym + sym.T) / 2
        np.fill_diagonal(sym, 0.0)
        perm = rng.permutation(7)
        base = pca_rows(sym)
        shuffled = pca_rows(sym[np.ix_(perm, perm)])
        # same point cloud up to the same permutation (distances preserved)
        d0 = np.linalg.norm(base.coords[:, None] - base.coords[None], axis=2)
        d1 = np.linalg.norm(shuffled.coords[:, None] - shuffled.coords[None], axis=2)
        assert np.allclose(d0[np.ix_(perm, perm)], d1, atol=1e-9)

    def test_matches_bruteforce_eigensolver(self):
        vals = np.array(
            [
                [0.0, 1.0, 4.0, 2.0],
                [1.0, 0.0, 3.0, 5.0],
                [4.0, 3.0, 0.0, 1.5],
                [2.0, 5.0, 1.5, 0.0],
            ]
        )
        emb = pca_rows(DistanceMatrix(("a", "b", "c", "d"), vals))
        centered = vals - vals.mean(axis=0)
        cov = np.zeros((4, 4))
        for row in centered:
            cov += np.outer(row, row)
        cov /= 3.0
        eigvals, eigvecs = np.linalg.eig(cov)
        order = np.argsort(eigvals.real)[::-1][:2]
        proj = centered @ eigvecs[:, order].real
        for j in range(2):
            got, want = emb.coords[:, j], proj[:, j]
            assert np.allclose(got, want, atol=1e-8) or np.allclose(got, -want, atol=1e-8)
        assert emb.explained[0] >= emb.explained[1]

    def test_degenerate(self):
        with pytest.raises(DegenerateEmbedding):
            pca_rows(np.zeros((5, 5)))

    def test_too_small(self):
        with pytest.raises(ValueError):
            pca_rows(np.zeros((2, 2)))


class TestClusteringScore:
    def test_separated_blobs(self):
        rng = np.random.default_rng(1)
        vectors, labels = blobs(rng, [(0, 0), (5, 0), (0, 5), (5, 5), (9, 9)])
        scores = clustering_score(vectors, labels)
        assert scores.nearest_medoid_accuracy == 1.0
        assert scores.mean_silhouette > 0.8

    def test_shuffled_labels_chance_level(self):
        rng = np.random.default_rng(2)
        vectors, labels = blobs(rng, [(0, 0), (5, 0), (0, 5), (5, 5), (9, 9)])
        shuffled = list(labels)
        rng.shuffle(shuffled)
        scores = clustering_score(vectors, shuffled)
        assert 0.1 <= scores.nearest_medoid_accuracy <= 0.3

    def test_duplicate_point_classes(self):
        vectors = np.array([[0.0, 0.0]] * 4 + [[3.0, 3.0]] * 4)
        labels = ["a"] * 4 + ["b"] * 4
        scores = clustering_score(vectors, labels)
        assert scores.mean_silhouette == 1.0
        assert scores.nearest_medoid_accuracy == 1.0

    def test_singleton_class(self):
        vectors = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        with pytest.raises(SingletonClass):
            clustering_score(vectors, ["a", "a", "b"])

    def test_single_class(self):
        vectors = np.array([[0.0, 0.0], [1.0, 1.0]])
        with pytest.raises(SingletonClass):
            clustering_score(vectors, ["a", "a"])


class TestMedoids:
    def test_medoid_definition(self):
        # 1-d layout where index 1 minimizes total distance within its class
        d = np.abs(np.subtract.outer([0.0, 1.0, 2.0, 9.0], [0.0, 1.0, 2.0, 9.0]))
        meds = class_medoids(d, ["a", "a", "a", "b"])
        assert meds["a"] == 1

    def test_summary_fields(self):
        d = np.abs(np.subtract.outer(np.arange(6.0), np.arange(6.0)))
        labels = ["a", "a", "b", "b", "c", "c"]
        summary = medoid_summary(d, labels)
        assert set(summary["medoid_index"]) == {"a", "b", "c"}
        assert summary["most_distant_class"] in {"a", "c"}
        assert summary["closest_pair"] in (["a", "b"], ["b", "c"])


class TestExperiment1:
    def test_outputs(self, tmp_path):
        cfg = RunConfig()
        result = run_experiment1(tmp_path / "exp1", cfg, jobs=2)
        normalized = sorted((tmp_path / "exp1" / "normalized").glob("*.csv"))
        assert len(normalized) == 15  # 5 shapes x 3 orders
        assert len(sorted((tmp_path / "exp1" / "moments").glob("*.csv"))) == 5
        for k in (1, 2, 3):
            assert (tmp_path / "exp1" / "plots" / f"moments_k{k}.svg").exists()
        assert (tmp_path / "exp1" / "manifest.json").exists()

        for path in normalized:
            body = np.loadtxt(path, delimiter=",", skiprows=1)
            assert np.all(body[:, 1] >= 0.0) and np.all(body[:, 1] <= 1.0 + 1e-12)

        star_k1 = np.loadtxt(tmp_path / "exp1" / "normalized" / "star_k1.csv",
                             delimiter=",", skiprows=1)
        assert np.max(star_k1[:, 1]) == pytest.approx(1.0, abs=1e-12)
        assert result["constants"].m[0] > 0


class TestExperiment2:
    def test_counts_and_scores(self, exp2_result):
        result, out, _ = exp2_result
        assert isinstance(result["corpus"], Corpus)
        assert len(result["curves"]) == 50
        assert result["distance_matrix"].values.shape == (50, 50)
        assert (out / "distmat.csv").exists()
        assert (out / "embedding.csv").exists()
        assert (out / "scores.json").exists()
        assert (out / "plots" / "pca.svg").exists()
        assert len(sorted((out / "moments").glob("*.csv"))) == 50

    def test_clustering_quality(self, exp2_result):
        result, _, _ = exp2_result
        assert result["scores"].nearest_medoid_accuracy >= 0.9
        assert result["scores"].mean_silhouette > 0.3

    def test_medoid_hierarchy(self, exp2_result):
        result, _, _ = exp2_result
        medoids = result["medoids"]
        assert medoids["most_distant_class"] == "S1"
        assert sorted(medoids["closest_pair"]) == ["S3", "S4"]

    def test_embedding_invariance_under_permutation(self, exp2_result):
        result, _, _ = exp2_result
        dmat = result["distance_matrix"]
        rng = np.random.default_rng(5)
        perm = rng.permutation(50)
        base = pca_rows(dmat.values)
        shuffled = pca_rows(dmat.values[np.ix_(perm, perm)])
        d0 = np.linalg.norm(base.coords[:, None] - base.coords[None], axis=2)
        d1 = np.linalg.norm(shuffled.coords[:, None] - shuffled.coords[None], axis=2)
        assert np.allclose(d0[np.ix_(perm, perm)], d1, atol=1e-9)


class TestPipelineHelpers:
    def test_compute_moments_small_config(self):
        cfg = RunConfig(degree=6, grid=12, theta_samples=128, r_samples=16, resample_points=128)
        from pfsdm.shapes import generate_shape

        mc = compute_moments(generate_shape("circle", 128, 0), cfg, "tiny")
        assert mc.shape_id == "tiny"
        assert mc.values.shape == (3, 16)
