import numpy as np

from stylescape import corpus


def make_corpus(tmp_path, vectors, cities=None, periods=None):
    """Tiny on-disk corpus: one record per vector row, optional city labels."""
    vectors = np.asarray(vectors, dtype=np.float32)
    path = tmp_path / "v.tlvb"
    block = corpus.write_vector_block(path, vectors)
    records = [
        corpus.Record(
            id=f"r{i:04d}",
            city=(cities[i] if cities else "c"),
            ts=(periods[i] if periods else 1000 + i),
            lon=0.0,
            lat=0.0,
            vector_index=i,
        )
        for i in range(len(vectors))
    ]
    manifest = corpus.Manifest(records, vector_file=str(path), dim=block.dim)
    return manifest, block
