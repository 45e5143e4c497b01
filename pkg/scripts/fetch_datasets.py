#!/usr/bin/env python3
"""Optional: download the real binary-classification datasets.

The committed fixtures are synthetic stand-ins; this fetches the public
LIBSVM originals for full-scale runs. Needs network access, which CI and
the test suite do not assume.
"""

import argparse
import urllib.request
from pathlib import Path

BASE = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary"

DATASETS = {
    "heart": f"{BASE}/heart_scale",
    "australian": f"{BASE}/australian_scale",
    "splice": f"{BASE}/splice_scale",
    "mushrooms": f"{BASE}/mushrooms",
    "a9a": f"{BASE}/a9a",
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", default=list(DATASETS),
                        help=f"datasets to fetch (default: all of {', '.join(DATASETS)})")
    parser.add_argument("--out", type=Path, default=Path("data/full"))
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.names or list(DATASETS):
        if name not in DATASETS:
            raise SystemExit(f"unknown dataset {name!r}")
        target = args.out / f"{name}.libsvm"
        print(f"fetching {DATASETS[name]} -> {target}")
        urllib.request.urlretrieve(DATASETS[name], target)


if __name__ == "__main__":
    main()
