"""
Which nodes can be reached securely?
====================================

A small LEO relay chain and a terrestrial spur around one source. For each
node the best route of at most seven hops is found under every model, and
the node passes when that route's SCP is at least 0.99. The same run is
available as ``ntnscp classify`` with the files in demos/data.
"""
from pathlib import Path

from ntnscp.classify import classify
from ntnscp.model import PER_KM2, reference_layers
from ntnscp.scenario_io import load_dataset

data = Path(__file__).parent / "data"
ds = load_dataset(data / "chain_nodes.csv", data / "chain_adjacency.csv")
results = classify(ds, reference_layers(1e-8 * PER_KM2), "s", 0.99, seed=3)

for model in ("rician", "rayleigh_multi", "rayleigh_single", "erlang"):
    rows = [r for r in results if r.model == model]
    print(f"{model:16s} passing: {sum(r.passes for r in rows)}/{len(rows)}")
for r in results:
    if r.model == "rician" and r.node_id.startswith("l"):
        print(f"  {r.node_id}: SCP {r.best_scp:.4f} via {'-'.join(r.path)}")
