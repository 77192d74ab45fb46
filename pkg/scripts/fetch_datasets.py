#!/usr/bin/env python3
"""Download the public friendship edge lists used by the dataset tests.

Files land in data/ next to the repository root (or the directory given as
the first argument). The dataset-dependent acceptance tests pick them up from
there or from the NPAGRAPH_DATA environment variable.
"""

import sys
import urllib.request
from pathlib import Path

DATASETS = {
    "loc-brightkite_edges.txt.gz":
        "https://snap.stanford.edu/data/loc-brightkite_edges.txt.gz",
    "loc-gowalla_edges.txt.gz":
        "https://snap.stanford.edu/data/loc-gowalla_edges.txt.gz",
}


def main() -> int:
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "data")
    target.mkdir(parents=True, exist_ok=True)
    for name, url in DATASETS.items():
        dest = target / name
        if dest.exists():
            print(f"{name}: already present")
            continue
        print(f"{name}: downloading from {url}")
        urllib.request.urlretrieve(url, dest)
        print(f"{name}: {dest.stat().st_size} bytes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
