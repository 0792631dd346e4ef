"""The whole pipeline end to end on a synthetic corpus with one planted
trend, driven through the CLI exactly as a batch run would be.

Run: python demos/07_full_pipeline.py
"""

import json
import tempfile
from pathlib import Path

from stylescape import cli

root = Path(tempfile.mkdtemp(prefix="stylescape-demo-"))
fixture = root / "corpus"
run_dir = root / "run"

# A 4-city, 2-year corpus; London moves 8% of its mass from latent style 0
# to style 5 in 2014.
cli.main([
    "synth", "--out", str(fixture),
    "--cities", "4", "--years", "2013:2014",
    "--per-bucket", "2000", "--clusters", "8", "--dim", "8",
    "--shift", "London:2013:2014:0:5:0.08",
    "--seed", "11",
])

config = {
    "manifest": str(fixture / "manifest.jsonl"),
    "vectors": str(fixture / "vectors.tlvb"),
    "out": str(run_dir),
    "k": 8,
    "threshold": 0.01,
    "years": [2013, 2014],
    "codebook_sample": 50_000,
    "train_n": 5,
    "test_n": 2,
    "sample_size": 500,
    "graph_threshold": 0.2,
}
cfg_path = root / "config.json"
cfg_path.write_text(json.dumps(config, indent=2))

print("\nrunning: stylescape pipeline --config", cfg_path, "\n")
assert cli.main(["pipeline", "--config", str(cfg_path)]) == 0

report = json.loads((run_dir / "report.json").read_text())
print("\nper-city record counts:", report["counts"]["cities"])
print("classifier accuracy:", report["counts"]["accuracy"])
print("similarity edges kept:", report["counts"]["graph_edges"])

trends = json.loads((run_dir / "trends.json").read_text())
for t in trends:
    if t["plus"] or t["minus"]:
        print(f"\ndetected trend in {t['city']} {t['from']}->{t['to']}:")
        print("  rising:", t["plus"])
        print("  falling:", t["minus"])

print("\nartifacts and content hashes:")
for entry in report["outputs"]:
    print(f"  {entry['sha256'][:12]}  {entry['path']}")
