import numpy as np
import pytest
from conftest import make_corpus

from stylescape import codebook as cb
from stylescape import corpus
from stylescape.errors import ValidationError


class TestFitCodebook:
    def test_k1_closed_form(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(40, 3))
        book = cb.fit_codebook(X, 1, seed=0)
        assert np.allclose(book.centroids[0], X.mean(axis=0), atol=1e-12)
        centered_ss = ((X - X.mean(axis=0)) ** 2).sum()
        assert book.fit_meta["inertia"] == pytest.approx(centered_ss, rel=1e-12)

    def test_two_blob_recovery(self):
        rng = np.random.default_rng(2)
        n, sigma = 500, 0.8
        mean_a, mean_b = np.array([0.0, 0.0]), np.array([10.0, 10.0])
        X = np.vstack([
            mean_a + rng.normal(0, sigma, size=(n, 2)),
            mean_b + rng.normal(0, sigma, size=(n, 2)),
        ])
        book = cb.fit_codebook(X, 2, seed=3)
        # Sampling noise of a blob mean is sigma/sqrt(n) per coordinate.
        tol = 3 * sigma / np.sqrt(n)
        pairing = []
        for c in book.centroids:
            d_a = np.abs(c - mean_a).max()
            d_b = np.abs(c - mean_b).max()
            pairing.append("a" if d_a < d_b else "b")
            assert min(d_a, d_b) < tol
        assert sorted(pairing) == ["a", "b"]

    def test_k_equals_n(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(12, 4))
        book = cb.fit_codebook(X, 12, seed=5)
        assert book.fit_meta["inertia"] == 0.0
        got = {tuple(row) for row in book.centroids}
        expected = {tuple(row) for row in X.astype(np.float64)}
        assert got == expected

    def test_inertia_history_non_increasing(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(300, 5))
        book = cb.fit_codebook(X, 8, seed=7)
        history = book.fit_meta["inertia_history"]
        assert len(history) >= 2
        assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))
        assert book.fit_meta["inertia"] == history[-1]

    def test_refit_bit_identical(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(200, 6))
        a = cb.fit_codebook(X, 10, seed=9)
        b = cb.fit_codebook(X, 10, seed=9)
        assert a.centroids.tobytes() == b.centroids.tobytes()
        assert a.fit_meta == b.fit_meta

    def test_repeated_distinct_points(self):
        points = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0], [5.0, 5.0], [2.5, 9.0]])
        X = np.repeat(points, 20, axis=0)
        book = cb.fit_codebook(X, 5, seed=10)
        assert book.fit_meta["inertia"] == 0.0
        got = {tuple(row) for row in book.centroids}
        assert got == {tuple(row) for row in points}

    def test_n_less_than_k_rejected(self):
        with pytest.raises(ValidationError, match="n >= k"):
            cb.fit_codebook(np.zeros((3, 2)), 4)

    def test_k_zero_rejected(self):
        with pytest.raises(ValidationError):
            cb.fit_codebook(np.zeros((3, 2)), 0)


class TestAssign:
    def setup_method(self):
        rng = np.random.default_rng(20)
        self.book = cb.Codebook(k=10, dim=4, centroids=rng.normal(size=(10, 4)))

    def test_exact_centroid_match(self):
        assert cb.assign(self.book, self.book.centroids[7]) == 7

    def test_tie_breaks_to_lower_index(self):
        centroids = np.full((6, 2), 100.0)
        centroids[2] = [1.0, 0.0]
        centroids[5] = [-1.0, 0.0]
        book = cb.Codebook(k=6, dim=2, centroids=centroids)
        assert cb.assign(book, np.zeros(2)) == 2

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(21)
        queries = rng.normal(size=(1000, 4))
        labels = cb.assign_block(self.book, queries)
        for v, label in zip(queries, labels):
            brute = int(((self.book.centroids - v) ** 2).sum(axis=1).argmin())
            assert label == brute

    def test_assign_consistent_with_distances(self):
        rng = np.random.default_rng(22)
        for v in rng.normal(size=(100, 4)):
            j = cb.assign(self.book, v)
            dj = ((self.book.centroids[j] - v) ** 2).sum()
            for c in self.book.centroids:
                assert dj <= ((c - v) ** 2).sum() + 1e-12

    def test_dim_mismatch(self):
        with pytest.raises(ValidationError):
            cb.assign(self.book, np.zeros(3))


class TestBuildCodewordVector:
    def test_single_bin_mass(self, tmp_path):
        centroids = np.array([[0.0], [10.0], [20.0], [30.0]])
        book = cb.Codebook(k=4, dim=1, centroids=centroids)
        manifest, block = make_corpus(tmp_path, np.full((10, 1), 30.0))
        cv = cb.build_codeword_vector(book, manifest, block)
        assert cv.bins.tolist() == [0.0, 0.0, 0.0, 1.0]
        assert cv.support == 10

    def test_empty_manifest(self, tmp_path):
        book = cb.Codebook(k=4, dim=1, centroids=np.arange(4.0)[:, None])
        manifest, block = make_corpus(tmp_path, np.zeros((1, 1)))
        empty = corpus.Manifest([], manifest.vector_file, manifest.dim)
        cv = cb.build_codeword_vector(book, empty, block)
        assert cv.support == 0
        assert cv.bins.tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_hand_counts(self, tmp_path):
        centroids = np.array([[0.0], [10.0], [20.0], [30.0]])
        book = cb.Codebook(k=4, dim=1, centroids=centroids)
        values = [0.0] * 3 + [10.0] * 1 + [30.0] * 4
        manifest, block = make_corpus(tmp_path, np.array(values)[:, None])
        cv = cb.build_codeword_vector(book, manifest, block)
        assert cv.bins.tolist() == [0.375, 0.125, 0.0, 0.5]

    def test_l1_normalized(self, tmp_path):
        rng = np.random.default_rng(30)
        book = cb.fit_codebook(rng.normal(size=(50, 3)), 6, seed=1)
        manifest, block = make_corpus(tmp_path, rng.normal(size=(80, 3)))
        cv = cb.build_codeword_vector(book, manifest, block)
        assert cv.bins.sum() == pytest.approx(1.0, abs=1e-6)
        assert (cv.bins >= 0).all()

    def test_record_order_invariant(self, tmp_path):
        rng = np.random.default_rng(31)
        book = cb.fit_codebook(rng.normal(size=(50, 3)), 6, seed=1)
        manifest, block = make_corpus(tmp_path, rng.normal(size=(40, 3)))
        shuffled = corpus.Manifest(
            list(reversed(manifest.records)), manifest.vector_file, manifest.dim
        )
        a = cb.build_codeword_vector(book, manifest, block)
        b = cb.build_codeword_vector(book, shuffled, block)
        assert np.array_equal(a.bins, b.bins)

    def test_dim_mismatch(self, tmp_path):
        book = cb.Codebook(k=2, dim=5, centroids=np.zeros((2, 5)) + np.arange(2)[:, None])
        manifest, block = make_corpus(tmp_path, np.zeros((3, 2)))
        with pytest.raises(ValidationError):
            cb.build_codeword_vector(book, manifest, block)


class TestCodebookSerialization:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(40)
        book = cb.fit_codebook(rng.normal(size=(60, 4)).astype(np.float32), 5, seed=2)
        cb.save_codebook(book, tmp_path / "book")
        loaded = cb.load_codebook(tmp_path / "book")
        assert loaded.k == 5 and loaded.dim == 4
        assert np.allclose(loaded.centroids, book.centroids, atol=1e-6)
        assert loaded.fit_meta["seed"] == 2

    def test_assignments_stable_after_roundtrip(self, tmp_path):
        # float32 storage must not flip any assignment on float32 data.
        rng = np.random.default_rng(41)
        X = rng.normal(size=(200, 4)).astype(np.float32)
        book = cb.fit_codebook(X, 8, seed=3)
        cb.save_codebook(book, tmp_path / "book")
        loaded = cb.load_codebook(tmp_path / "book")
        q = rng.normal(size=(100, 4)).astype(np.float32)
        assert np.array_equal(cb.assign_block(book, q), cb.assign_block(loaded, q))


class TestCodewordCsv:
    def test_roundtrip(self, tmp_path):
        vecs = [
            cb.CodewordVector(np.array([0.5, 0.5, 0.0]), 10, city="A", period="2004"),
            cb.CodewordVector(np.array([0.25, 0.25, 0.5]), 4, city="B", period="2005"),
        ]
        path = tmp_path / "h.csv"
        cb.write_codeword_csv(path, vecs)
        loaded = cb.read_codeword_csv(path)
        assert [(v.city, v.period, v.support) for v in loaded] == [("A", "2004", 10), ("B", "2005", 4)]
        for orig, back in zip(vecs, loaded):
            assert np.array_equal(orig.bins, back.bins)

    def test_mixed_k_rejected(self, tmp_path):
        vecs = [
            cb.CodewordVector(np.array([1.0]), 1, city="A"),
            cb.CodewordVector(np.array([0.5, 0.5]), 2, city="B"),
        ]
        with pytest.raises(ValidationError):
            cb.write_codeword_csv(tmp_path / "h.csv", vecs)
