"""City similarity: score all city pairs by codeword-vector similarity and
keep edges above a threshold; export Graphviz DOT.

Run: python demos/06_similarity_graph.py
"""

import numpy as np

from stylescape import build_similarity_graph, graph_to_dot, similarity
from stylescape.codebook import CodewordVector

rng = np.random.default_rng(6)

# Hand-built city profiles over an 8-word dictionary: two European cities
# share most of their mass, Tokyo is distinct, the fourth sits in between.
profiles = {
    "London":   [0.30, 0.25, 0.20, 0.10, 0.05, 0.05, 0.03, 0.02],
    "Paris":    [0.28, 0.27, 0.18, 0.12, 0.05, 0.04, 0.04, 0.02],
    "Tokyo":    [0.02, 0.03, 0.05, 0.05, 0.25, 0.30, 0.20, 0.10],
    "New York": [0.15, 0.15, 0.15, 0.15, 0.10, 0.10, 0.10, 0.10],
}
vectors = {
    city: CodewordVector(np.array(p), support=10_000, city=city)
    for city, p in profiles.items()
}

print("pairwise cosine similarities:")
cities = sorted(vectors)
for i, a in enumerate(cities):
    for b in cities[i + 1 :]:
        cos = similarity(vectors[a], vectors[b], "cosine")
        inter = similarity(vectors[a], vectors[b], "histogram_intersection")
        print(f"  {a:>8} -- {b:<8}  cosine={cos:.3f}  intersection={inter:.3f}")

for th in (0.0, 0.5, 0.9):
    graph = build_similarity_graph(vectors, threshold=th)
    print(f"\nthreshold {th}: {len(graph.edges)} edges")
    for a, b, w in graph.edges:
        print(f"  {a} -- {b} ({w:.3f})")

print("\nDOT output at the 0.5 operating point:\n")
print(graph_to_dot(build_similarity_graph(vectors, threshold=0.5)))
