#!/usr/bin/env python3
"""Convert the public processed WebKB distribution to this project's layout.

The processed distribution (as shipped with several graph-learning
repositories) stores each university as two files:

  out1_node_feature_label.txt   header line, then: node_id <TAB> f1,f2,... <TAB> label
  out1_graph_edges.txt          header line, then: src <TAB> dst

Usage:
  python3 tools/convert_webkb.py <in_dir> <out_dir>

Writes <out_dir>/nodes.tsv and <out_dir>/edges.tsv. Duplicate and reversed
edges collapse to one undirected edge; self-loops are dropped (the loader
would reject them). Run `glance stats --data <out_dir>` to verify counts.
"""

import sys
from pathlib import Path


def main():
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    in_dir = Path(sys.argv[1])
    out_dir = Path(sys.argv[2])

    nodes = []
    with open(in_dir / "out1_node_feature_label.txt") as f:
        next(f)  # header
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            node_id, feats, label = line.split("\t")
            nodes.append((int(node_id), feats, int(label)))
    nodes.sort()
    for expect, (node_id, _, _) in enumerate(nodes):
        if node_id != expect:
            sys.exit(f"non-contiguous node ids: expected {expect}, got {node_id}")

    edges = set()
    dropped_loops = 0
    with open(in_dir / "out1_graph_edges.txt") as f:
        next(f)  # header
        for line in f:
            line = line.strip()
            if not line:
                continue
            src, dst = (int(v) for v in line.split("\t"))
            if src == dst:
                dropped_loops += 1
                continue
            edges.add((min(src, dst), max(src, dst)))

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "nodes.tsv", "w") as f:
        for node_id, feats, label in nodes:
            f.write(f"{node_id}\t{label}\t{feats}\n")
    with open(out_dir / "edges.tsv", "w") as f:
        for src, dst in sorted(edges):
            f.write(f"{src}\t{dst}\n")
    print(f"{out_dir}: {len(nodes)} nodes, {len(edges)} undirected edges, "
          f"{dropped_loops} self-loops dropped")


if __name__ == "__main__":
    main()
