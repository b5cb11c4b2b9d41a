#!/usr/bin/env python3
"""Deterministically regenerate the bundled webkb-style datasets.

The three graphs mirror the published Cornell/Texas/Wisconsin statistics:
node counts 183/183/251, 1703 binary word features, 5 imbalanced classes,
and edge homophily 0.13/0.11/0.20. Documents activate words from their
class's vocabulary block plus background noise, and the edge generator hits
the target same-label edge count exactly, so the homophily figures are
reproduced to rounding. Page distributions and link structure are sampled,
not scraped; see tools/convert_webkb.py for preparing the real corpus.

Usage: python3 tools/make_synthetic_webkb.py [OUT_DIR]
"""

import random
import sys
from pathlib import Path

FEATURE_DIM = 1703
CLASS_WORDS = 60      # vocabulary block per class
P_OWN = 0.40          # own-block word activation
P_CROSS = 0.025       # other-block activation (cross-talk)
P_BACKGROUND = 0.02   # shared vocabulary activation

# Relative link propensity between class pairs. Cross-class links follow the
# webkb pattern of structured relations (e.g. student pages linking course
# pages), which gives neighborhoods class-informative composition instead of
# uniform noise.
AFFINITY = {
    (0, 1): 6.0, (0, 2): 1.0, (0, 3): 0.2, (0, 4): 0.2,
    (1, 2): 6.0, (1, 3): 0.4, (1, 4): 0.2,
    (2, 3): 6.0, (2, 4): 0.4,
    (3, 4): 6.0,
}


def affinity(a, b):
    return AFFINITY[(min(a, b), max(a, b))]

DATASETS = {
    # name: (seed, class sizes, edge count, target homophily)
    "cornell": (101, [86, 42, 28, 15, 12], 295, 0.13),
    "texas": (102, [95, 38, 25, 14, 11], 309, 0.11),
    "wisconsin": (103, [118, 60, 40, 21, 12], 499, 0.20),
}


def make_labels(sizes):
    labels = []
    for cls, count in enumerate(sizes):
        labels.extend([cls] * count)
    return labels


def make_features(rng, labels):
    rows = []
    for label in labels:
        row = [0] * FEATURE_DIM
        for cls in range(5):
            block = range(cls * CLASS_WORDS, (cls + 1) * CLASS_WORDS)
            p = P_OWN if cls == label else P_CROSS
            for w in block:
                if rng.random() < p:
                    row[w] = 1
        for w in range(5 * CLASS_WORDS, FEATURE_DIM):
            if rng.random() < P_BACKGROUND:
                row[w] = 1
        rows.append(row)
    return rows


def make_edges(rng, labels, num_edges, homophily):
    n = len(labels)
    same_target = round(homophily * num_edges)
    cross_target = num_edges - same_target
    max_affinity = max(AFFINITY.values())
    edges = set()
    same = cross = 0
    while same < same_target or cross < cross_target:
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key in edges:
            continue
        if labels[i] == labels[j]:
            if same == same_target:
                continue
            same += 1
        else:
            if cross == cross_target:
                continue
            if rng.random() * max_affinity > affinity(labels[i], labels[j]):
                continue
            cross += 1
        edges.add(key)
    return sorted(edges)


def write_dataset(out_dir, labels, features, edges):
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "nodes.tsv", "w") as f:
        for node, (label, row) in enumerate(zip(labels, features)):
            f.write(f"{node}\t{label}\t{','.join(str(v) for v in row)}\n")
    with open(out_dir / "edges.tsv", "w") as f:
        for i, j in edges:
            f.write(f"{i}\t{j}\n")


def main():
    base = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    for name, (seed, sizes, num_edges, homophily) in DATASETS.items():
        rng = random.Random(seed)
        labels = make_labels(sizes)
        features = make_features(rng, labels)
        edges = make_edges(rng, labels, num_edges, homophily)
        write_dataset(base / name, labels, features, edges)
        same = sum(1 for i, j in edges if labels[i] == labels[j])
        print(f"{name}: n={len(labels)} m={len(edges)} homophily={same / len(edges):.4f}")


if __name__ == "__main__":
    main()
